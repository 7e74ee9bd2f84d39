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
 * \file mcstab/dc_stability.hpp
 *
 * \brief D_c-stability of coalition structures.
 *
 * A partition P is D_c-stable when v(S[P]) >= v(S) for every collection S,
 * where S[P] regroups the users of S along the blocks of P. Equivalently:
 *
 *  1. inside each block, merging never hurts: v(S_1 u ... u S_k) >= sum v(S_i)
 *     for every collection of subsets of one block;
 *  2. across blocks, splitting along P never hurts: sum_i v(S n P_i) >= v(S)
 *     for every coalition S that meets two or more blocks.
 */

#ifndef MCSTAB_DC_STABILITY_HPP
#define MCSTAB_DC_STABILITY_HPP

#include <mcstab/core.hpp>
#include <mcstab/errors.hpp>
#include <mcstab/partitions.hpp>
#include <mcstab/scenario.hpp>
#include <mcstab/value.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace mcstab {

/// S[P]: the union of the parts of col, cut along the blocks of p.
inline collection restrict_collection(const collection& col, const partition& p)
{
	if (col.users() != p.users())
	{
		throw invalid_input("collection and partition cover different user sets");
	}
	const mask_type joined = col.union_mask();
	std::vector<mask_type> parts;
	for (coalition block : p.blocks())
	{
		if (const mask_type m = joined & block.mask(); m != 0)
		{
			parts.push_back(m);
		}
	}
	return collection(parts, p.users());
}

enum class dc_violation
{
	compatible_split,
	incompatible_coalition
};

inline const char* to_string(dc_violation k) noexcept
{
	return k == dc_violation::compatible_split ? "CompatibleSplit" : "IncompatibleCoalition";
}

struct dc_counterexample
{
	dc_violation kind;
	/// The split {A, B} of a within-block set, or the cross-block coalition.
	std::variant<collection, coalition> witness;
	/// Value kept by staying with P: v(A u B), or sum_i v(S n P_i).
	double lhs;
	/// Value of the deviation: v(A) + v(B), or v(S).
	double rhs;
};

struct dc_verdict
{
	bool stable = true;
	std::optional<dc_counterexample> counterexample;
};

namespace detail {

inline bool dc_violates(double keep, double deviate)
{
	const double mag = std::max({1.0, std::abs(keep), std::abs(deviate)});
	return deviate > keep + 1e-9 * mag;
}

/// Scans T within each block and every split (A, T \ A) with A holding the
/// lowest member of T.
inline std::optional<dc_counterexample> first_within_block_violation(const value_table& v,
                                                                     const partition& p)
{
	for (coalition block : p.blocks())
	{
		const mask_type bm = block.mask();
		for (mask_type t = bm; t != 0; t = (t - 1) & bm)
		{
			if (std::popcount(t) < 2)
			{
				continue;
			}
			const mask_type low = t & (~t + 1);
			const mask_type rest = t & ~low;
			for (mask_type sub = rest;; sub = (sub - 1) & rest)
			{
				const mask_type a = low | sub;
				if (a != t)
				{
					const mask_type b = t & ~a;
					const double keep = v(t);
					const double deviate = v(a) + v(b);
					if (dc_violates(keep, deviate))
					{
						const mask_type parts[] = {a, b};
						return dc_counterexample{dc_violation::compatible_split,
						                         collection(parts, p.users()), keep, deviate};
					}
				}
				if (sub == 0)
				{
					break;
				}
			}
		}
	}
	return std::nullopt;
}

} // namespace detail

/**
 * Exhaustive D_c-stability check.
 *
 * Within-block merging is verified on two-way splits only: if v(T) >= v(A) +
 * v(B) for every subset T of a block and every split of T, the k-way version
 * follows by peeling one part at a time. The first violation in scan order
 * is reported: within-block checks block by block (subsets T in decreasing
 * mask order), then cross-block coalitions by increasing mask. Ties up to 1e-9 relative count as holding.
 */
inline dc_verdict is_dc_stable(const scenario& s, const partition& p,
                               const enumeration_limits& lim = {})
{
	const std::size_t n = s.users();
	if (p.users() != n)
	{
		throw invalid_input("partition covers " + std::to_string(p.users()) + " users, scenario has "
		                    + std::to_string(n));
	}
	require_within("D_c cross-block scan", n, lim.dc_scan);
	for (coalition block : p.blocks())
	{
		require_within("D_c within-block scan", block.size(), lim.dc_block);
	}
	const value_table v(s, lim.dc_scan);
	dc_verdict out;
	if (auto split = detail::first_within_block_violation(v, p))
	{
		out.stable = false;
		out.counterexample = std::move(split);
		return out;
	}

	const mask_type all = s.all_users();
	std::vector<mask_type> block_of(n);
	for (coalition block : p.blocks())
	{
		for (std::size_t i : block.members())
		{
			block_of[i] = block.mask();
		}
	}
	for (mask_type sm = 1; sm <= all; ++sm)
	{
		const mask_type home = block_of[static_cast<std::size_t>(std::countr_zero(sm))];
		if ((sm & ~home) == 0)
		{
			continue;
		}
		double keep = 0;
		for (coalition block : p.blocks())
		{
			keep += v(sm & block.mask());
		}
		const double deviate = v(sm);
		if (detail::dc_violates(keep, deviate))
		{
			out.stable = false;
			out.counterexample = dc_counterexample{dc_violation::incompatible_coalition,
			                                       coalition::from_mask(sm, n), keep, deviate};
			return out;
		}
	}
	return out;
}

/// Rate bands of a partition, blocks sorted by minimum rate.
struct band_structure
{
	/// Block indices of p, sorted by (R_min, R_max, index).
	std::vector<std::size_t> order;
	std::vector<double> r_min;
	std::vector<double> r_max;
	std::vector<std::size_t> sizes;
	double alpha_min = 0;
	double alpha_max = 0;
	/// R_1,max <= R_2,min, R_2,max <= R_3,min, ... after sorting.
	bool ordered = true;
};

inline band_structure bands_of(const scenario& s, const partition& p)
{
	band_structure b;
	const std::size_t k = p.size();
	std::vector<double> lo(k), hi(k);
	for (std::size_t i = 0; i < k; ++i)
	{
		const mask_type m = p.blocks()[i].mask();
		lo[i] = s.rates()[argmin_rate(s, m)];
		hi[i] = s.rates()[argmax_rate(s, m)];
	}
	b.order.resize(k);
	std::iota(b.order.begin(), b.order.end(), std::size_t{0});
	std::stable_sort(b.order.begin(), b.order.end(), [&](std::size_t x, std::size_t y) {
		return lo[x] != lo[y] ? lo[x] < lo[y] : hi[x] < hi[y];
	});
	for (std::size_t i : b.order)
	{
		b.r_min.push_back(lo[i]);
		b.r_max.push_back(hi[i]);
		b.sizes.push_back(p.blocks()[i].size());
	}
	for (std::size_t i = 0; i + 1 < k; ++i)
	{
		if (b.r_max[i] > b.r_min[i + 1])
		{
			b.ordered = false;
		}
	}
	b.alpha_min = s.constants().alpha_min();
	b.alpha_max = s.constants().alpha_max();
	return b;
}

namespace detail {

/// Relative slack of an inequality in its "holds" direction.
inline double slack_of(const inequality& q)
{
	if (q.relation == ">=" || q.relation == ">")
	{
		return q.lhs / q.rhs - 1.0;
	}
	return q.rhs / q.lhs - 1.0;
}

inline void bind_tightest(theorem_check& t)
{
	const inequality* pick = nullptr;
	for (const auto& q : t.inequalities)
	{
		if (!q.holds)
		{
			pick = &q;
			break;
		}
		if (pick == nullptr || slack_of(q) < slack_of(*pick))
		{
			pick = &q;
		}
	}
	if (pick != nullptr)
	{
		t.lhs = pick->lhs;
		t.rhs = pick->rhs;
		t.relation = pick->relation;
	}
}

} // namespace detail

/**
 * Banded sufficient condition for D_c-stability. With blocks sorted into
 * ascending, non-overlapping rate bands and alpha_min / alpha_max taken over
 * all users:
 *
 *   gap:    R_{i+1,min} / R_{i,min} >= (alpha_min + beta + gamma) / alpha_min
 *   spread: R_{j,max} / R_{j,min} <= 2 (alpha_min + beta + gamma) / (alpha_max |P_j| + beta + gamma)
 *
 * Partitions whose bands overlap are reported as not applicable. Inequality
 * labels number blocks from 1.
 */
inline theorem_check thm_banded_dc_sufficient(const scenario& s, const partition& p)
{
	if (p.users() != s.users())
	{
		throw invalid_input("partition and scenario disagree on the number of users");
	}
	const band_structure b = bands_of(s, p);
	theorem_check t;
	t.name = "banded_partition";
	if (!b.ordered)
	{
		t.reason = "rate bands of the blocks overlap";
		return t;
	}
	t.applicable = true;
	const double bg = s.constants().beta + s.constants().gamma;
	const double gap_threshold = (b.alpha_min + bg) / b.alpha_min;
	for (std::size_t i = 0; i + 1 < b.r_min.size(); ++i)
	{
		const double ratio = b.r_min[i + 1] / b.r_min[i];
		t.inequalities.push_back({"gap block " + std::to_string(b.order[i + 1] + 1) + " over block "
		                              + std::to_string(b.order[i] + 1),
		                          ratio, ">=", gap_threshold, ratio >= gap_threshold});
	}
	for (std::size_t i = 0; i < b.r_min.size(); ++i)
	{
		const double ratio = b.r_max[i] / b.r_min[i];
		const double bound = 2.0 * (b.alpha_min + bg)
		                   / (b.alpha_max * static_cast<double>(b.sizes[i]) + bg);
		t.inequalities.push_back({"spread block " + std::to_string(b.order[i] + 1), ratio, "<=", bound,
		                          ratio <= bound});
	}
	t.condition_holds = std::all_of(t.inequalities.begin(), t.inequalities.end(),
	                                [](const inequality& q) { return q.holds; });
	t.diagnostics = {{"alpha_min", b.alpha_min}, {"alpha_max", b.alpha_max},
	                 {"gap_threshold", gap_threshold}};
	detail::bind_tightest(t);
	return t;
}

/**
 * All-singletons sufficient condition: with users sorted by rate (ties by
 * index), R_{i+1} / R_i >= (alpha_{i+1} + beta + gamma) / alpha_{i+1} for
 * every consecutive pair. Labels number users from 1.
 */
inline theorem_check thm_singleton_dc_sufficient(const scenario& s)
{
	const std::size_t n = s.users();
	std::vector<std::size_t> order(n);
	std::iota(order.begin(), order.end(), std::size_t{0});
	std::stable_sort(order.begin(), order.end(),
	                 [&](std::size_t x, std::size_t y) { return s.rates()[x] < s.rates()[y]; });

	theorem_check t;
	t.name = "singleton_partition";
	t.applicable = true;
	const derived_constants& k = s.constants();
	const double bg = k.beta + k.gamma;
	for (std::size_t i = 0; i + 1 < n; ++i)
	{
		const std::size_t lo = order[i];
		const std::size_t hi = order[i + 1];
		const double ratio = s.rates()[hi] / s.rates()[lo];
		const double bound = (k.alphas[hi] + bg) / k.alphas[hi];
		t.inequalities.push_back({"user " + std::to_string(hi + 1) + " over user " + std::to_string(lo + 1),
		                          ratio, ">=", bound, ratio >= bound});
	}
	t.condition_holds = std::all_of(t.inequalities.begin(), t.inequalities.end(),
	                                [](const inequality& q) { return q.holds; });
	t.relation = ">=";
	detail::bind_tightest(t);
	return t;
}

struct best_partition_result
{
	partition best;
	double value;
	std::uint64_t partitions_scanned;
};

/// Welfare-maximizing partition by exhaustive enumeration; the first
/// maximizer in restricted-growth-string order wins ties.
inline best_partition_result best_partition_bruteforce(const scenario& s,
                                                       const enumeration_limits& lim = {})
{
	const std::size_t n = s.users();
	require_within("partition enumeration", n, lim.partitions);
	const value_table v(s, lim.partitions);

	std::vector<mask_type> best;
	double best_value = 0;
	std::uint64_t scanned = 0;
	for_each_partition(s.all_users(), [&](std::span<const mask_type> blocks) {
		double total = 0;
		for (mask_type m : blocks)
		{
			total += v(m);
		}
		if (scanned == 0 || total > best_value)
		{
			best.assign(blocks.begin(), blocks.end());
			best_value = total;
		}
		++scanned;
	});
	return {partition(best, n), best_value, scanned};
}

} // namespace mcstab

#endif // MCSTAB_DC_STABILITY_HPP
