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
 * \file mcstab/lp.hpp
 *
 * \brief Linear feasibility by phase-1 simplex.
 *
 * Decides whether {A_eq x = b_eq, A_ge x >= b_ge} has a solution. Free
 * variables are either shifted by caller-supplied valid lower bounds
 * (x = l + y, y >= 0) or split into positive and negative parts. Every row
 * is rewritten as c.y <= d (equalities become two rows) and the auxiliary
 * problem
 *
 *   maximize -t  subject to  c.y - t <= d,  y >= 0,  t >= 0
 *
 * is solved on a dense dictionary with one column per non-basic variable,
 * so memory is rows x (vars + 2) regardless of the number of slacks. The
 * system is feasible iff the optimum t is zero. Entering and leaving
 * variables follow Bland's smallest-index rule, except that t leaves as
 * soon as it is eligible (which ends the phase).
 */

#ifndef MCSTAB_LP_HPP
#define MCSTAB_LP_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcstab {

struct linear_row
{
	std::vector<double> coefficients;
	double rhs = 0;
};

struct linear_system
{
	std::size_t n_vars = 0;
	std::vector<linear_row> eq_rows;
	std::vector<linear_row> ge_rows;
	/// Bounds every solution is known to satisfy; enables the shift.
	std::optional<std::vector<double>> lower_bounds;

	/// max(1, max |rhs|), the reference magnitude for all tolerances.
	double scale() const
	{
		double s = 1.0;
		for (const auto& r : eq_rows)
		{
			s = std::max(s, std::abs(r.rhs));
		}
		for (const auto& r : ge_rows)
		{
			s = std::max(s, std::abs(r.rhs));
		}
		return s;
	}

	void check() const
	{
		auto check_rows = [this](const std::vector<linear_row>& rows) {
			for (const auto& r : rows)
			{
				if (r.coefficients.size() != n_vars)
				{
					throw std::invalid_argument("row width differs from n_vars");
				}
				for (double c : r.coefficients)
				{
					if (!std::isfinite(c))
					{
						throw std::invalid_argument("non-finite coefficient");
					}
				}
				if (!std::isfinite(r.rhs))
				{
					throw std::invalid_argument("non-finite right-hand side");
				}
			}
		};
		check_rows(eq_rows);
		check_rows(ge_rows);
		if (lower_bounds && lower_bounds->size() != n_vars)
		{
			throw std::invalid_argument("lower bound count differs from n_vars");
		}
	}
};

/// Largest violation of any row by x (0 when x satisfies everything).
inline double max_violation(const linear_system& sys, const std::vector<double>& x)
{
	auto dot = [&x](const linear_row& r) {
		double s = 0;
		for (std::size_t j = 0; j < x.size(); ++j)
		{
			s += r.coefficients[j] * x[j];
		}
		return s;
	};
	double worst = 0;
	for (const auto& r : sys.eq_rows)
	{
		worst = std::max(worst, std::abs(dot(r) - r.rhs));
	}
	for (const auto& r : sys.ge_rows)
	{
		worst = std::max(worst, r.rhs - dot(r));
	}
	return worst;
}

struct simplex_tolerances
{
	double pivot = 1e-10;
	double feasibility = 1e-9;
	double recheck = 1e-7;
};

enum class feasibility_status
{
	feasible,
	infeasible,
	stalled
};

inline const char* to_string(feasibility_status s) noexcept
{
	switch (s)
	{
		case feasibility_status::feasible: return "feasible";
		case feasibility_status::infeasible: return "infeasible";
		case feasibility_status::stalled: return "stalled";
	}
	return "unknown";
}

struct feasibility_result
{
	feasibility_status status = feasibility_status::stalled;
	/// Present iff status is feasible.
	std::vector<double> witness;
	std::size_t iterations = 0;
	/// Largest row violation of the witness; for infeasible systems, the
	/// optimal auxiliary value (how far the rows are from agreeing).
	double max_residual = 0;
};

namespace detail {

class feasibility_dictionary
{
public:
	feasibility_dictionary(std::size_t rows, std::size_t structural)
	: rows_(rows), cols_(structural + 1), table_(rows * (structural + 1), 0.0), rhs_(rows, 0.0),
	  objective_(structural + 1, 0.0), basis_(rows), nonbasic_(structural + 1)
	{
		// Variable ids: 0 is the auxiliary t, 1..structural are y, then one slack per row.
		for (std::size_t j = 0; j < cols_; ++j)
		{
			nonbasic_[j] = j;
		}
		for (std::size_t r = 0; r < rows_; ++r)
		{
			basis_[r] = cols_ + r;
			at(r, 0) = 1.0;
		}
		objective_[0] = -1.0;
	}

	/// Sets row r to  slack_r = d - c.y + t.
	void set_row(std::size_t r, const std::vector<double>& c, double d)
	{
		for (std::size_t j = 0; j < c.size(); ++j)
		{
			at(r, j + 1) = -c[j];
		}
		rhs_[r] = d;
	}

	/// Runs phase 1; returns the final auxiliary value, or nullopt on stall.
	std::optional<double> solve(std::size_t iter_cap, double pivot_tol, std::size_t& iterations)
	{
		iterations = 0;
		if (rows_ == 0)
		{
			return 0.0;
		}
		std::size_t worst = 0;
		for (std::size_t r = 1; r < rows_; ++r)
		{
			if (rhs_[r] < rhs_[worst])
			{
				worst = r;
			}
		}
		if (rhs_[worst] >= 0)
		{
			return 0.0;
		}
		pivot(worst, 0);
		++iterations;

		while (true)
		{
			if (aux_value() <= 0.0)
			{
				return 0.0;
			}
			if (iterations >= iter_cap)
			{
				return std::nullopt;
			}

			std::size_t enter = cols_;
			for (std::size_t j = 0; j < cols_; ++j)
			{
				if (objective_[j] > pivot_tol && (enter == cols_ || nonbasic_[j] < nonbasic_[enter]))
				{
					enter = j;
				}
			}
			if (enter == cols_)
			{
				return aux_value();
			}

			std::size_t leave = rows_;
			double best = std::numeric_limits<double>::infinity();
			bool aux_eligible = false;
			for (std::size_t r = 0; r < rows_; ++r)
			{
				const double coef = at(r, enter);
				if (coef >= -pivot_tol)
				{
					continue;
				}
				const double ratio = std::max(rhs_[r], 0.0) / -coef;
				if (leave == rows_)
				{
					best = ratio;
					leave = r;
					aux_eligible = basis_[r] == 0;
					continue;
				}
				const double slack = 1e-12 * std::max(1.0, best);
				if (ratio < best - slack)
				{
					best = ratio;
					leave = r;
					aux_eligible = basis_[r] == 0;
				}
				else if (ratio <= best + slack)
				{
					if (basis_[r] == 0)
					{
						aux_eligible = true;
						leave = r;
					}
					else if (!aux_eligible && basis_[r] < basis_[leave])
					{
						leave = r;
					}
					best = std::min(best, ratio);
				}
			}
			if (leave == rows_)
			{
				// Cannot happen for a bounded auxiliary objective; treat as numerical breakdown.
				return std::nullopt;
			}
			pivot(leave, enter);
			++iterations;
		}
	}

	/// Value of structural variable j (0-based) in the current basic solution.
	std::vector<double> structural_values(std::size_t structural) const
	{
		std::vector<double> y(structural, 0.0);
		for (std::size_t r = 0; r < rows_; ++r)
		{
			const std::size_t id = basis_[r];
			if (id >= 1 && id <= structural)
			{
				y[id - 1] = std::max(rhs_[r], 0.0);
			}
		}
		return y;
	}

private:
	double& at(std::size_t r, std::size_t j) { return table_[r * cols_ + j]; }
	double at(std::size_t r, std::size_t j) const { return table_[r * cols_ + j]; }

	double aux_value() const
	{
		for (std::size_t r = 0; r < rows_; ++r)
		{
			if (basis_[r] == 0)
			{
				return std::max(rhs_[r], 0.0);
			}
		}
		return 0.0;
	}

	void pivot(std::size_t r, std::size_t e)
	{
		double* row = &table_[r * cols_];
		const double piv = row[e];
		// Solve row r for the entering variable.
		const double inv = 1.0 / piv;
		rhs_[r] = -rhs_[r] * inv;
		for (std::size_t j = 0; j < cols_; ++j)
		{
			row[j] = (j == e) ? inv : -row[j] * inv;
		}
		for (std::size_t i = 0; i < rows_; ++i)
		{
			if (i == r)
			{
				continue;
			}
			double* other = &table_[i * cols_];
			const double f = other[e];
			if (f == 0.0)
			{
				continue;
			}
			rhs_[i] += f * rhs_[r];
			for (std::size_t j = 0; j < cols_; ++j)
			{
				other[j] = (j == e) ? f * row[e] : other[j] + f * row[j];
			}
		}
		const double f = objective_[e];
		if (f != 0.0)
		{
			for (std::size_t j = 0; j < cols_; ++j)
			{
				objective_[j] = (j == e) ? f * row[e] : objective_[j] + f * row[j];
			}
		}
		std::swap(basis_[r], nonbasic_[e]);
	}

	std::size_t rows_;
	std::size_t cols_;
	std::vector<double> table_;
	std::vector<double> rhs_;
	std::vector<double> objective_;
	std::vector<std::size_t> basis_;
	std::vector<std::size_t> nonbasic_;
};

struct phase_one_outcome
{
	feasibility_status status = feasibility_status::stalled;
	/// Structural values of the final basic solution (feasible only).
	std::vector<double> y;
	/// Optimal auxiliary value t.
	double aux = 0;
	std::size_t iterations = 0;
};

/**
 * Builds a rows x structural dictionary, lets fill(dict) set every row via
 * set_row, and runs phase 1. Feasible iff the optimal t is <= accept.
 */
template <typename Fill>
phase_one_outcome run_phase_one(std::size_t rows, std::size_t structural, Fill&& fill,
                                std::size_t iter_cap, double pivot_tol, double accept)
{
	feasibility_dictionary dict(rows, structural);
	fill(dict);
	phase_one_outcome out;
	const std::optional<double> aux = dict.solve(iter_cap, pivot_tol, out.iterations);
	if (!aux)
	{
		out.status = feasibility_status::stalled;
		return out;
	}
	out.aux = *aux;
	if (*aux > accept)
	{
		out.status = feasibility_status::infeasible;
		return out;
	}
	out.status = feasibility_status::feasible;
	out.y = dict.structural_values(structural);
	return out;
}

} // namespace detail

/**
 * Phase-1 feasibility check. A feasible verdict always carries a witness
 * whose largest row violation is at most tol.recheck * scale; if rounding
 * ever pushes a witness past that bound the result is reported as stalled
 * rather than trusted.
 */
inline feasibility_result solve_feasibility(const linear_system& sys, std::size_t iter_cap,
                                            simplex_tolerances tol = {})
{
	if (iter_cap == 0)
	{
		throw std::invalid_argument("iteration cap must be positive");
	}
	sys.check();

	const std::size_t n = sys.n_vars;
	const bool shifted = sys.lower_bounds.has_value();
	const std::size_t structural = shifted ? n : 2 * n;
	const std::size_t rows = 2 * sys.eq_rows.size() + sys.ge_rows.size();
	const double scale = sys.scale();

	std::vector<double> c(structural);

	// Writes  sign * (a.x) >= sign * b  as  c.y <= d.
	auto add = [&](detail::feasibility_dictionary& dict, std::size_t r, const linear_row& row,
	               double sign) {
		double offset = 0;
		for (std::size_t j = 0; j < n; ++j)
		{
			const double aj = sign * row.coefficients[j];
			c[j] = -aj;
			if (shifted)
			{
				offset += aj * (*sys.lower_bounds)[j];
			}
			else
			{
				c[n + j] = aj;
			}
		}
		dict.set_row(r, c, -(sign * row.rhs - offset));
	};
	auto fill = [&](detail::feasibility_dictionary& dict) {
		std::size_t r = 0;
		for (const auto& row : sys.eq_rows)
		{
			add(dict, r++, row, 1.0);
			add(dict, r++, row, -1.0);
		}
		for (const auto& row : sys.ge_rows)
		{
			add(dict, r++, row, 1.0);
		}
	};

	const detail::phase_one_outcome phase = detail::run_phase_one(
		rows, structural, fill, iter_cap, tol.pivot, tol.feasibility * scale);
	feasibility_result out;
	out.iterations = phase.iterations;
	out.status = phase.status;
	if (phase.status == feasibility_status::stalled)
	{
		return out;
	}
	if (phase.status == feasibility_status::infeasible)
	{
		out.max_residual = phase.aux;
		return out;
	}

	const std::vector<double>& y = phase.y;
	std::vector<double> x(n);
	for (std::size_t j = 0; j < n; ++j)
	{
		x[j] = shifted ? (*sys.lower_bounds)[j] + y[j] : y[j] - y[n + j];
	}
	out.max_residual = max_violation(sys, x);
	if (out.max_residual > tol.recheck * scale)
	{
		out.status = feasibility_status::stalled;
		return out;
	}
	out.status = feasibility_status::feasible;
	out.witness = std::move(x);
	return out;
}

} // namespace mcstab

#endif // MCSTAB_LP_HPP
