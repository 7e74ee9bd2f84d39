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

#include "generators.hpp"
#include "oracles.hpp"

#include <mcstab/dc_stability.hpp>

#include <gtest/gtest.h>

#include <set>

using namespace mcstab;

namespace {

oracle::collection blocks_of(const partition& p)
{
	oracle::collection out;
	for (const auto& b : p.blocks())
	{
		out.push_back(b.members());
	}
	return out;
}

partition random_partition(splitmix64& rng, std::size_t n)
{
	std::vector<std::vector<std::size_t>> blocks;
	for (std::size_t i = 0; i < n; ++i)
	{
		const std::size_t b = gen::pick(rng, 0, blocks.size());
		if (b == blocks.size())
		{
			blocks.emplace_back();
		}
		blocks[b].push_back(i);
	}
	return partition(blocks, n);
}

} // namespace

TEST(Restriction, CompatibleCollectionCollapsesToOnePart)
{
	const partition p = partition::sequential(20, 5);
	const collection col({{5, 6}, {8}}, 20);
	const collection r = restrict_collection(col, p);
	ASSERT_EQ(r.size(), 1u);
	EXPECT_EQ(r.parts()[0].members(), (std::vector<std::size_t>{5, 6, 8}));
}

TEST(Restriction, WholeUserSetGivesThePartition)
{
	splitmix64 rng(51);
	for (int t = 0; t < 50; ++t)
	{
		const std::size_t n = gen::pick(rng, 1, 12);
		const partition p = random_partition(rng, n);
		const collection r = restrict_collection(collection(std::vector<mask_type>{full_mask(n)}, n), p);
		std::set<mask_type> got, want;
		for (const auto& c : r.parts())
		{
			got.insert(c.mask());
		}
		for (const auto& c : p.blocks())
		{
			want.insert(c.mask());
		}
		EXPECT_EQ(got, want);
	}
}

TEST(Restriction, UsersInDifferentBlocksAreSeparated)
{
	const collection r = restrict_collection(collection(std::vector<std::vector<std::size_t>>{{0, 5}}, 20), partition::sequential(20, 5));
	ASSERT_EQ(r.size(), 2u);
	EXPECT_EQ(r.parts()[0].members(), (std::vector<std::size_t>{0}));
	EXPECT_EQ(r.parts()[1].members(), (std::vector<std::size_t>{5}));
}

TEST(Restriction, PreservesUnionAndIsIdempotent)
{
	splitmix64 rng(52);
	for (int t = 0; t < 200; ++t)
	{
		const std::size_t n = gen::pick(rng, 1, 14);
		const partition p = random_partition(rng, n);
		std::vector<mask_type> parts;
		mask_type used = 0;
		for (int k = 0; k < 3; ++k)
		{
			const mask_type m = rng.next() & full_mask(n) & ~used;
			if (m != 0)
			{
				parts.push_back(m);
				used |= m;
			}
		}
		if (parts.empty())
		{
			continue;
		}
		const collection col(parts, n);
		const collection once = restrict_collection(col, p);
		EXPECT_EQ(once.union_mask(), col.union_mask());
		const collection twice = restrict_collection(once, p);
		ASSERT_EQ(once.size(), twice.size());
		for (std::size_t k = 0; k < once.size(); ++k)
		{
			EXPECT_EQ(once.parts()[k], twice.parts()[k]);
		}
	}
}

TEST(DcStability, SingletonsStableWhenRatesAreFarApart)
{
	const scenario s = uniform_scenario({20, 100, 500}, 95, 0.3);
	const theorem_check t = thm_singleton_dc_sufficient(s);
	EXPECT_TRUE(t.condition_holds);
	ASSERT_EQ(t.inequalities.size(), 2u);
	EXPECT_DOUBLE_EQ(t.inequalities[0].lhs, 5.0);
	EXPECT_NEAR(t.inequalities[0].rhs, 50.0 / 15.0, 1e-12);
	EXPECT_TRUE(is_dc_stable(s, partition::singletons(3)).stable);
	EXPECT_TRUE(oracle::dc_stable_by_definition(s, blocks_of(partition::singletons(3))));
}

TEST(DcStability, SymmetricGrandCoalitionIsStable)
{
	splitmix64 rng(53);
	for (int t = 0; t < 20; ++t)
	{
		const std::size_t n = gen::pick(rng, 1, 6);
		const scenario s = gen::symmetric(rng, n);
		EXPECT_TRUE(is_dc_stable(s, partition::grand(n)).stable);
		EXPECT_TRUE(oracle::dc_stable_by_definition(s, blocks_of(partition::grand(n))));
	}
}

TEST(DcStability, FourUserSubNetworkMatchesDefinition)
{
	const scenario s = sub_scenario(reference_scenario(), {0, 1, 5, 6});
	const partition p({{0, 1}, {2, 3}}, 4);
	EXPECT_EQ(is_dc_stable(s, p).stable, oracle::dc_stable_by_definition(s, blocks_of(p)));
}

TEST(DcStability, CounterexampleReproducesTheInequality)
{
	splitmix64 rng(54);
	int unstable = 0;
	for (int t = 0; t < 300; ++t)
	{
		const std::size_t n = gen::pick(rng, 2, 8);
		const scenario s = gen::any(rng, n);
		const partition p = random_partition(rng, n);
		const dc_verdict v = is_dc_stable(s, p);
		if (v.stable)
		{
			EXPECT_FALSE(v.counterexample.has_value());
			continue;
		}
		++unstable;
		ASSERT_TRUE(v.counterexample.has_value());
		const dc_counterexample& c = *v.counterexample;
		auto val = [&](mask_type m) { return oracle::value(s, oracle::members_of(m)); };
		double keep = 0, deviate = 0;
		if (c.kind == dc_violation::compatible_split)
		{
			const auto& col = std::get<collection>(c.witness);
			ASSERT_EQ(col.size(), 2u);
			keep = val(col.union_mask());
			deviate = val(col.parts()[0].mask()) + val(col.parts()[1].mask());
			// Both parts sit in one block.
			bool inside = false;
			for (const auto& b : p.blocks())
			{
				inside |= (col.union_mask() & ~b.mask()) == 0;
			}
			EXPECT_TRUE(inside);
		}
		else
		{
			const auto& co = std::get<coalition>(c.witness);
			for (const auto& b : p.blocks())
			{
				if (const mask_type m = co.mask() & b.mask())
				{
					keep += val(m);
				}
			}
			deviate = val(co.mask());
		}
		EXPECT_NEAR(c.lhs, keep, 1e-9 * std::max(1.0, std::abs(keep)));
		EXPECT_NEAR(c.rhs, deviate, 1e-9 * std::max(1.0, std::abs(deviate)));
		EXPECT_GT(c.rhs, c.lhs);
	}
	EXPECT_GT(unstable, 50);
}

TEST(DcStability, AgreesWithDefinitionOnRandomSmallNetworks)
{
	splitmix64 rng(55);
	int stable = 0;
	for (int t = 0; t < 150; ++t)
	{
		const std::size_t n = gen::pick(rng, 1, 5);
		const scenario s = gen::any(rng, n);
		const partition p = t % 2 ? best_partition_bruteforce(s).best : random_partition(rng, n);
		const bool expect = oracle::dc_stable_by_definition(s, blocks_of(p));
		EXPECT_EQ(is_dc_stable(s, p).stable, expect) << "case " << t;
		stable += expect;
	}
	EXPECT_GT(stable, 10);
}

TEST(DcStability, StablePartitionsMaximizeTotalValue)
{
	splitmix64 rng(56);
	int stable = 0;
	for (int t = 0; t < 200; ++t)
	{
		const std::size_t n = gen::pick(rng, 1, 8);
		const scenario s = gen::any(rng, n);
		const partition p = t % 2 ? partition::singletons(n) : best_partition_bruteforce(s).best;
		if (!is_dc_stable(s, p).stable)
		{
			continue;
		}
		++stable;
		const double best = oracle::best_partition_value(s);
		EXPECT_NEAR(collection_value(s, p), best, 1e-9 * std::max(1.0, std::abs(best)));
	}
	EXPECT_GT(stable, 20);
}

TEST(DcStability, SizeLimitsAreEnforced)
{
	const scenario s = reference_scenario();
	EXPECT_THROW(is_dc_stable(s, partition::grand(20)), size_limit);
	enumeration_limits lim;
	lim.dc_scan = 10;
	EXPECT_THROW(is_dc_stable(s, partition::singletons(20), lim), size_limit);
	EXPECT_THROW(is_dc_stable(s, partition::grand(4)), invalid_input);
}

TEST(BandedCondition, HoldsForWellSeparatedFlatBands)
{
	std::vector<double> rates;
	for (double r : {10.0, 50.0, 250.0})
	{
		rates.insert(rates.end(), 4, r);
	}
	const scenario s = uniform_scenario(rates, 95, 0.3);
	const partition p = partition::sequential(12, 4);
	const theorem_check t = thm_banded_dc_sufficient(s, p);
	EXPECT_TRUE(t.applicable);
	EXPECT_TRUE(t.condition_holds);
	for (const inequality& q : t.inequalities)
	{
		if (q.relation == ">=")
		{
			EXPECT_DOUBLE_EQ(q.lhs, 5.0);
			EXPECT_NEAR(q.rhs, 50.0 / 15.0, 1e-12);
		}
		else
		{
			EXPECT_DOUBLE_EQ(q.lhs, 1.0);
			EXPECT_NEAR(q.rhs, 100.0 / 95.0, 1e-12);
		}
	}
	EXPECT_TRUE(is_dc_stable(s, p).stable);
}

TEST(BandedCondition, FailsForReferenceFourByFive)
{
	const theorem_check t = thm_banded_dc_sufficient(reference_scenario(), partition::sequential(20, 5));
	EXPECT_TRUE(t.applicable);
	EXPECT_FALSE(t.condition_holds);
	bool gap_fails = false, spread_fails = false;
	for (const inequality& q : t.inequalities)
	{
		if (q.relation == ">=" && !q.holds && std::abs(q.lhs - 1.5) < 1e-12)
		{
			gap_fails = true;
		}
		if (q.relation == "<=")
		{
			// 2 (15 + 35) < 15 * 5 + 35: the bound is below one.
			EXPECT_NEAR(q.rhs, 100.0 / 110.0, 1e-12);
			spread_fails |= !q.holds;
		}
	}
	EXPECT_TRUE(gap_fails);
	EXPECT_TRUE(spread_fails);
}

TEST(BandedCondition, SingleBlockHasOnlyTheSpreadCondition)
{
	const scenario s = uniform_scenario({100, 101, 102}, 95, 0.3);
	const theorem_check t = thm_banded_dc_sufficient(s, partition::grand(3));
	ASSERT_EQ(t.inequalities.size(), 1u);
	EXPECT_EQ(t.inequalities[0].relation, "<=");
	EXPECT_NEAR(t.inequalities[0].rhs, 100.0 / 80.0, 1e-12);
	EXPECT_TRUE(t.condition_holds);
}

TEST(BandedCondition, OverlappingBandsAreNotApplicable)
{
	const scenario s = uniform_scenario({10, 30, 20, 40}, 95, 0.3);
	const theorem_check t = thm_banded_dc_sufficient(s, partition({{0, 1}, {2, 3}}, 4));
	EXPECT_FALSE(t.applicable);
	EXPECT_FALSE(t.condition_holds);
}

// The spread bound only controls a block against its own minimum rate, but a
// faster member of a lower block can still profit from joining a higher
// block. Here both inequality families hold, yet {user 2, user 3} deviates.
TEST(BandedCondition, CanHoldOnAnUnstablePartition)
{
	const scenario s = uniform_scenario({30, 40, 101}, 95, 0.3);
	const partition p({{0, 1}, {2}}, 3);
	const theorem_check t = thm_banded_dc_sufficient(s, p);
	EXPECT_TRUE(t.applicable);
	EXPECT_TRUE(t.condition_holds);

	const dc_verdict v = is_dc_stable(s, p);
	EXPECT_FALSE(v.stable);
	EXPECT_FALSE(oracle::dc_stable_by_definition(s, blocks_of(p)));
	ASSERT_TRUE(v.counterexample.has_value());
	EXPECT_EQ(v.counterexample->kind, dc_violation::incompatible_coalition);
	EXPECT_EQ(std::get<coalition>(v.counterexample->witness).members(), (std::vector<std::size_t>{1, 2}));
	EXPECT_NEAR(v.counterexample->rhs - v.counterexample->lhs, 50.0 / 101.0 - 15.0 / 40.0, 1e-9);
}

TEST(SingletonCondition, AdjacentEqualRatesFail)
{
	const theorem_check t = thm_singleton_dc_sufficient(uniform_scenario({500, 20, 20}, 95, 0.3));
	EXPECT_FALSE(t.condition_holds);
}

TEST(SingletonCondition, SingleUserHoldsVacuously)
{
	const theorem_check t = thm_singleton_dc_sufficient(uniform_scenario({20}, 95, 0.3));
	EXPECT_TRUE(t.applicable);
	EXPECT_TRUE(t.condition_holds);
	EXPECT_TRUE(t.inequalities.empty());
}

TEST(SingletonCondition, UsesAlphaOfTheFasterUser)
{
	scenario_fields f = uniform_scenario({100, 20}, 95, 0.3).fields();
	f.rx_powers[0] = 0.1;
	const theorem_check t = thm_singleton_dc_sufficient(scenario::from_fields(f));
	ASSERT_EQ(t.inequalities.size(), 1u);
	EXPECT_NEAR(t.inequalities[0].rhs, (5.0 + 35.0) / 5.0, 1e-12);
	EXPECT_FALSE(t.condition_holds);
}

TEST(SingletonCondition, SoundOnGeometricNetworks)
{
	splitmix64 rng(57);
	int fired = 0;
	for (int t = 0; t < 200; ++t)
	{
		const std::size_t n = gen::pick(rng, 2, 9);
		const scenario s = gen::geometric(rng, n);
		if (thm_singleton_dc_sufficient(s).condition_holds)
		{
			++fired;
			EXPECT_TRUE(is_dc_stable(s, partition::singletons(n)).stable) << "case " << t;
		}
	}
	EXPECT_GT(fired, 20);
}

TEST(BestPartition, SymmetricFourUsersMergeFully)
{
	const scenario s = uniform_scenario({60, 60, 60, 60}, 95, 0.3);
	const best_partition_result r = best_partition_bruteforce(s);
	EXPECT_EQ(r.best.size(), 1u);
	EXPECT_EQ(r.partitions_scanned, 15u);
	EXPECT_NEAR(r.value, coalition_value(s, s.all_users()), 1e-12);
}

TEST(BestPartition, SingleUser)
{
	const best_partition_result r = best_partition_bruteforce(uniform_scenario({60}, 95, 0.3));
	EXPECT_EQ(r.best.size(), 1u);
	EXPECT_EQ(r.partitions_scanned, 1u);
}

TEST(BestPartition, OneUserPerBandMatchesOracle)
{
	const scenario s = sub_scenario(reference_scenario(), {0, 5, 10, 15});
	const best_partition_result r = best_partition_bruteforce(s);
	EXPECT_NEAR(r.value, oracle::best_partition_value(s), 1e-9);
	EXPECT_NEAR(collection_value(s, r.best), r.value, 1e-12);
	EXPECT_EQ(r.partitions_scanned, 15u);
}

TEST(BestPartition, TiesGoToTheFirstGrowthString)
{
	// The reported maximizer must be the first one met in enumeration order.
	splitmix64 rng(58);
	for (int t = 0; t < 50; ++t)
	{
		const std::size_t n = gen::pick(rng, 1, 7);
		const scenario s = gen::any(rng, n);
		const best_partition_result r = best_partition_bruteforce(s);
		EXPECT_NEAR(r.value, oracle::best_partition_value(s), 1e-9 * std::max(1.0, std::abs(r.value)));
		bool found = false;
		for_each_partition(s.all_users(), [&](std::span<const mask_type> blocks) {
			if (found)
			{
				return;
			}
			double total = 0;
			for (mask_type m : blocks)
			{
				total += coalition_value(s, m);
			}
			if (total == r.value)
			{
				found = true;
				std::set<mask_type> want(blocks.begin(), blocks.end());
				std::set<mask_type> got;
				for (const auto& b : r.best.blocks())
				{
					got.insert(b.mask());
				}
				EXPECT_EQ(got, want);
			}
		});
		EXPECT_TRUE(found);
	}
}

TEST(BestPartition, SizeLimitIsEnforced)
{
	EXPECT_THROW(best_partition_bruteforce(reference_scenario()), size_limit);
}
