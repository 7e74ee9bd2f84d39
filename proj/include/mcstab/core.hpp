/*
 * Copyright 2026 The mcstab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/**
 * \file mcstab/core.hpp
 *
 * \brief Core of the multicast game: membership, non-emptiness, convexity
 *        and closed-form sufficient conditions.
 *
 * A payoff profile x is in the core when it is efficient (sum x = v(N)) and
 * no coalition S can do better alone (sum_{i in S} x_i >= v(S)).
 */

#ifndef MCSTAB_CORE_HPP
#define MCSTAB_CORE_HPP

#include <mcstab/errors.hpp>
#include <mcstab/lp.hpp>
#include <mcstab/scenario.hpp>
#include <mcstab/value.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mcstab {

using payoff_profile = std::vector<double>;

enum class core_method
{
	lp,
	theorem
};

struct core_verdict
{
	bool feasible = false;
	std::optional<payoff_profile> witness;
	/// First blocking coalition in mask order (membership checks only).
	std::optional<coalition> violated;
	core_method method = core_method::lp;
	std::size_t iterations = 0;
};

/**
 * Exhaustive membership test with tolerance tol * max(1, |v(N)|) on the
 * efficiency equality and on every coalitional inequality.
 */
inline core_verdict is_in_core(const scenario& s, const payoff_profile& x, double tol,
                               const enumeration_limits& lim = {})
{
	const std::size_t n = s.users();
	if (x.size() != n)
	{
		throw invalid_input("payoff profile has " + std::to_string(x.size()) + " entries for "
		                    + std::to_string(n) + " users");
	}
	if (tol < 0)
	{
		throw invalid_input("tolerance must be non-negative");
	}
	require_within("core membership", n, lim.core_scan);

	core_verdict out;
	const mask_type all = s.all_users();
	const double grand = coalition_value(s, all);
	const double slack = tol * std::max(1.0, std::abs(grand));

	double total = 0;
	for (double xi : x)
	{
		if (!std::isfinite(xi))
		{
			throw invalid_input("payoff profile entries must be finite");
		}
		total += xi;
	}
	if (std::abs(total - grand) > slack)
	{
		out.violated = coalition::from_mask(all, n);
		return out;
	}

	for (mask_type m = 1; m < all; ++m)
	{
		double share = 0;
		for (mask_type r = m; r != 0; r &= r - 1)
		{
			share += x[static_cast<std::size_t>(std::countr_zero(r))];
		}
		if (share < coalition_value(s, m) - slack)
		{
			out.violated = coalition::from_mask(m, n);
			return out;
		}
	}
	out.feasible = true;
	out.witness = x;
	return out;
}

/**
 * Core constraints as a linear system over x: one efficiency row and one
 * row per proper non-empty coalition, in mask order. Singleton values are
 * attached as lower bounds so the solver can shift instead of split.
 */
inline linear_system core_system(const scenario& s)
{
	const std::size_t n = s.users();
	const mask_type all = s.all_users();
	linear_system sys;
	sys.n_vars = n;
	sys.eq_rows.push_back({std::vector<double>(n, 1.0), coalition_value(s, all)});
	sys.ge_rows.reserve(static_cast<std::size_t>(all > 0 ? all - 1 : 0));
	for (mask_type m = 1; m < all; ++m)
	{
		linear_row row;
		row.coefficients.assign(n, 0.0);
		for (mask_type r = m; r != 0; r &= r - 1)
		{
			row.coefficients[static_cast<std::size_t>(std::countr_zero(r))] = 1.0;
		}
		row.rhs = coalition_value(s, m);
		sys.ge_rows.push_back(std::move(row));
	}
	std::vector<double> lower(n);
	for (std::size_t i = 0; i < n; ++i)
	{
		lower[i] = coalition_value(s, mask_type{1} << i);
	}
	sys.lower_bounds = std::move(lower);
	return sys;
}

inline constexpr std::size_t default_simplex_iterations = 200000;

/// Decides core non-emptiness by linear feasibility; a feasible verdict's
/// witness has been re-verified by is_in_core at tolerance 1e-7.
inline core_verdict core_nonempty(const scenario& s, const enumeration_limits& lim = {},
                                  std::size_t iter_cap = default_simplex_iterations)
{
	const std::size_t n = s.users();
	require_within("core LP", n, lim.lp);

	core_verdict out;
	out.method = core_method::lp;
	if (n == 1)
	{
		out.feasible = true;
		out.witness = payoff_profile{coalition_value(s, mask_type{1})};
		return out;
	}

	// Same rows as core_system(s), generated straight into the dictionary in
	// mask order with x = v({i}) + y.
	const mask_type all = s.all_users();
	std::vector<double> lower(n);
	double lower_sum = 0;
	for (std::size_t i = 0; i < n; ++i)
	{
		lower[i] = coalition_value(s, mask_type{1} << i);
		lower_sum += lower[i];
	}
	const double grand = coalition_value(s, all);
	double scale = std::max(1.0, std::abs(grand));
	const std::size_t rows = static_cast<std::size_t>(all) + 1;
	auto fill = [&](detail::feasibility_dictionary& dict) {
		std::vector<double> c(n, 1.0);
		dict.set_row(0, c, grand - lower_sum);
		std::fill(c.begin(), c.end(), -1.0);
		dict.set_row(1, c, -(grand - lower_sum));
		std::size_t r = 2;
		for (mask_type m = 1; m < all; ++m)
		{
			double offset = 0;
			for (std::size_t j = 0; j < n; ++j)
			{
				const bool in = ((m >> j) & 1u) != 0;
				c[j] = in ? -1.0 : 0.0;
				offset += in ? lower[j] : 0.0;
			}
			const double v = coalition_value(s, m);
			scale = std::max(scale, std::abs(v));
			dict.set_row(r++, c, -(v - offset));
		}
	};

	const simplex_tolerances tol;
	// The scale is only known after filling, so accept on the raw auxiliary
	// value here and apply the relative threshold below.
	detail::phase_one_outcome phase =
		detail::run_phase_one(rows, n, fill, iter_cap, tol.pivot, std::numeric_limits<double>::infinity());
	out.iterations = phase.iterations;
	if (phase.status == feasibility_status::stalled)
	{
		throw solver_stall(phase.iterations);
	}
	if (phase.aux > tol.feasibility * scale)
	{
		return out;
	}
	payoff_profile x(n);
	for (std::size_t i = 0; i < n; ++i)
	{
		x[i] = lower[i] + phase.y[i];
	}
	const core_verdict check = is_in_core(s, x, tol.recheck, lim);
	if (!check.feasible)
	{
		throw std::runtime_error("LP witness failed independent core re-verification");
	}
	out.feasible = true;
	out.witness = std::move(x);
	return out;
}

struct convexity_result
{
	bool convex = true;
	/// (S1, S2) with v(S1) + v(S2) > v(S1 u S2) + v(S1 n S2).
	std::optional<std::pair<coalition, coalition>> counterexample;
};

/**
 * Supermodularity check. A set function is convex iff every pair S u {i},
 * S u {j} (i, j outside S) satisfies the convexity inequality, so the scan
 * costs 2^N N^2 / 2 lookups instead of 4^N. The empty coalition has value 0.
 * Inequalities are accepted up to 1e-9 relative to the largest term.
 */
inline convexity_result is_convex(const scenario& s, const enumeration_limits& lim = {})
{
	const std::size_t n = s.users();
	require_within("convexity", n, lim.convexity);
	const value_table v(s, lim.convexity);
	const mask_type all = s.all_users();

	convexity_result out;
	for (mask_type base = 0; base <= all; ++base)
	{
		const mask_type outside = all & ~base;
		for (mask_type ri = outside; ri != 0; ri &= ri - 1)
		{
			const mask_type bi = ri & (~ri + 1);
			for (mask_type rj = ri & (ri - 1); rj != 0; rj &= rj - 1)
			{
				const mask_type bj = rj & (~rj + 1);
				const double lhs = v(base | bi) + v(base | bj);
				const double rhs = v(base | bi | bj) + v(base);
				const double mag = std::max({1.0, std::abs(lhs), std::abs(rhs)});
				if (lhs > rhs + 1e-9 * mag)
				{
					out.convex = false;
					out.counterexample.emplace(coalition::from_mask(base | bi, n),
					                           coalition::from_mask(base | bj, n));
					return out;
				}
			}
		}
	}
	return out;
}

inline bool has_uniform_rates(const scenario& s)
{
	const auto r = s.rates();
	return std::all_of(r.begin(), r.end(), [&](double x) { return x == r[0]; });
}

inline bool has_uniform_rx_power(const scenario& s)
{
	const auto p = s.rx_powers();
	return std::all_of(p.begin(), p.end(), [&](double x) { return x == p[0]; });
}

/**
 * Equal-cost-share profile for a symmetric network (common rate R0 and
 * common reception cost alpha): every user pays alpha / R0 for reception
 * and an equal 1/N share of the transmission cost (beta + gamma) / R0.
 */
inline payoff_profile symmetric_core_profile(const scenario& s)
{
	if (!has_uniform_rates(s))
	{
		throw not_applicable("symmetric profile needs equal rates for all users");
	}
	if (!has_uniform_rx_power(s))
	{
		throw not_applicable("symmetric profile needs equal receive power for all users");
	}
	const std::size_t n = s.users();
	const double r0 = s.rates()[0];
	const derived_constants& k = s.constants();
	const double alpha = k.alphas[0];
	const double shared = (k.beta + k.gamma) / (static_cast<double>(n) * r0);
	payoff_profile x(n);
	for (std::size_t i = 0; i < n; ++i)
	{
		x[i] = s.valuations()[i] - alpha / r0 - shared;
	}
	return x;
}

// -- closed-form conditions ----------------------------------------------------

/// One inequality of a sufficient condition, with both sides evaluated.
struct inequality
{
	std::string label;
	double lhs;
	std::string relation;
	double rhs;
	bool holds;
};

/**
 * Outcome of a closed-form sufficient condition. condition_holds is only
 * meaningful when applicable; lhs/rhs are the sides of the binding
 * inequality (the first failing one, else the tightest).
 */
struct theorem_check
{
	std::string name;
	bool applicable = false;
	bool condition_holds = false;
	double lhs = 0;
	double rhs = 0;
	std::string relation;
	std::string reason;
	std::vector<std::pair<std::string, double>> diagnostics;
	std::vector<inequality> inequalities;
};

namespace detail {

inline theorem_check not_applicable_check(std::string name, std::string reason)
{
	theorem_check t;
	t.name = std::move(name);
	t.reason = std::move(reason);
	return t;
}

inline double min_rate(const scenario& s)
{
	return *std::min_element(s.rates().begin(), s.rates().end());
}

inline double max_rate(const scenario& s)
{
	return *std::max_element(s.rates().begin(), s.rates().end());
}

} // namespace detail

/// Equal rates and equal receive powers make the game convex, hence the core non-empty.
inline theorem_check thm_symmetric_nonempty(const scenario& s)
{
	theorem_check t;
	t.name = "symmetric";
	t.relation = "<=";
	t.lhs = detail::max_rate(s) / detail::min_rate(s);
	t.rhs = 1.0;
	const bool rates = has_uniform_rates(s);
	const bool powers = has_uniform_rx_power(s);
	t.applicable = rates && powers;
	t.condition_holds = t.applicable;
	if (!rates)
	{
		t.reason = "rates differ across users";
	}
	else if (!powers)
	{
		t.reason = "receive powers differ across users";
	}
	t.inequalities.push_back({"R_max / R_min", t.lhs, "<=", t.rhs, t.lhs <= t.rhs});
	return t;
}

/**
 * Non-empty core when the rate spread is small:
 *   R_max / R_min <= N/(N-1) * (alpha_min (N-1) + beta + gamma) / (alpha_max N + beta + gamma).
 */
inline theorem_check thm_rate_ratio_nonempty(const scenario& s)
{
	const std::size_t n = s.users();
	if (n < 2)
	{
		return detail::not_applicable_check("rate_ratio", "needs at least two users");
	}
	const derived_constants& k = s.constants();
	const double nn = static_cast<double>(n);
	const double bg = k.beta + k.gamma;
	const double a_min = k.alpha_min();
	const double a_max = k.alpha_max();
	const double r_min = detail::min_rate(s);
	const double r_max = detail::max_rate(s);

	theorem_check t;
	t.name = "rate_ratio";
	t.applicable = true;
	t.relation = "<=";
	t.lhs = r_max / r_min;
	t.rhs = nn / (nn - 1.0) * (a_min * (nn - 1.0) + bg) / (a_max * nn + bg);
	t.condition_holds = t.lhs <= t.rhs;
	t.diagnostics = {{"R_min", r_min}, {"R_max", r_max}, {"alpha_min", a_min}, {"alpha_max", a_max}};
	t.inequalities.push_back({"R_max / R_min", t.lhs, "<=", t.rhs, t.condition_holds});
	return t;
}

/**
 * Empty core when the slowest user k drags everyone else down: with j the
 * second-slowest and lambda = R_j / R_k, the other N-1 users block when
 * lambda > 1 + (beta + gamma) / (alpha (N - 1)). Needs equal receive power.
 */
inline theorem_check thm_second_min_empty(const scenario& s)
{
	const std::size_t n = s.users();
	if (n < 2)
	{
		return detail::not_applicable_check("second_min_gap", "needs at least two users");
	}
	if (!has_uniform_rx_power(s))
	{
		return detail::not_applicable_check("second_min_gap", "receive powers differ across users");
	}
	const derived_constants& k = s.constants();
	const std::size_t slowest = argmin_rate(s, s.all_users());
	const std::size_t second = argmin_rate(s, s.all_users() & ~(mask_type{1} << slowest));
	const double alpha = k.alphas[0];

	theorem_check t;
	t.name = "second_min_gap";
	t.applicable = true;
	t.relation = ">";
	t.lhs = s.rates()[second] / s.rates()[slowest];
	t.rhs = 1.0 + (k.beta + k.gamma) / (alpha * static_cast<double>(n - 1));
	t.condition_holds = t.lhs > t.rhs;
	t.diagnostics = {{"lambda", t.lhs},
	                 {"k", static_cast<double>(slowest)},
	                 {"j", static_cast<double>(second)},
	                 {"alpha", alpha}};
	t.inequalities.push_back({"lambda = R_j / R_k", t.lhs, ">", t.rhs, t.condition_holds});
	return t;
}

/**
 * Empty core when the fastest user m leaves: with mu = R_m / R_k,
 * mu > 1 + (beta + gamma) / alpha. Needs equal receive power.
 */
inline theorem_check thm_max_min_empty(const scenario& s)
{
	const std::size_t n = s.users();
	if (n < 2)
	{
		return detail::not_applicable_check("max_min_gap", "needs at least two users");
	}
	if (!has_uniform_rx_power(s))
	{
		return detail::not_applicable_check("max_min_gap", "receive powers differ across users");
	}
	const derived_constants& k = s.constants();
	const std::size_t slowest = argmin_rate(s, s.all_users());
	const std::size_t fastest = argmax_rate(s, s.all_users());
	const double alpha = k.alphas[0];

	theorem_check t;
	t.name = "max_min_gap";
	t.applicable = true;
	t.relation = ">";
	t.lhs = s.rates()[fastest] / s.rates()[slowest];
	t.rhs = 1.0 + (k.beta + k.gamma) / alpha;
	t.condition_holds = t.lhs > t.rhs;
	t.diagnostics = {{"mu", t.lhs},
	                 {"k", static_cast<double>(slowest)},
	                 {"m", static_cast<double>(fastest)},
	                 {"alpha", alpha}};
	t.inequalities.push_back({"mu = R_m / R_k", t.lhs, ">", t.rhs, t.condition_holds});
	return t;
}

enum class core_screen_verdict
{
	nonempty,
	empty,
	inconclusive
};

struct core_screen_result
{
	core_screen_verdict verdict = core_screen_verdict::inconclusive;
	/// Name of the first condition that fired.
	std::string decided_by;
	std::vector<theorem_check> checks;
};

/// Runs the four closed-form conditions; a failed sufficient condition never
/// counts as evidence for the opposite verdict.
inline core_screen_result core_screen(const scenario& s)
{
	core_screen_result out;
	out.checks = {thm_symmetric_nonempty(s), thm_rate_ratio_nonempty(s), thm_second_min_empty(s),
	              thm_max_min_empty(s)};
	for (std::size_t i = 0; i < out.checks.size(); ++i)
	{
		const theorem_check& t = out.checks[i];
		if (t.applicable && t.condition_holds)
		{
			out.verdict = i < 2 ? core_screen_verdict::nonempty : core_screen_verdict::empty;
			out.decided_by = t.name;
			break;
		}
	}
	return out;
}

} // namespace mcstab

#endif // MCSTAB_CORE_HPP
