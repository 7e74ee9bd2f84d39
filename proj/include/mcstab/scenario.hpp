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
 * \file mcstab/scenario.hpp
 *
 * \brief Multicast game instances, coalitions, partitions and collections.
 *
 * A scenario holds N users downloading one file of X bits from a single
 * transmitter. User i has download rate R_i, valuation U_i and receive
 * power P_Rx,i; the transmitter radiates P_Tx. Energy at a user costs a per
 * joule, energy at the transmitter costs b per joule, and bandwidth costs w
 * per second. All quantities are in consistent arbitrary units.
 */

#ifndef MCSTAB_SCENARIO_HPP
#define MCSTAB_SCENARIO_HPP

#include <mcstab/errors.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

namespace mcstab {

/// Largest N representable by the 64-bit coalition masks (2^N must fit).
inline constexpr std::size_t max_users = 62;

using mask_type = std::uint64_t;

inline constexpr mask_type full_mask(std::size_t n) noexcept
{
	return (mask_type{1} << n) - 1;
}

/// Non-empty set of user indices, stored as a bitmask (bit i = user i).
class coalition
{
public:
	static coalition from_mask(mask_type mask, std::size_t n)
	{
		if (mask == 0)
		{
			throw invalid_input("coalition must be non-empty");
		}
		if (n > max_users || (mask & ~full_mask(n)) != 0)
		{
			throw invalid_input("coalition member index out of range");
		}
		return coalition(mask);
	}

	static coalition from_members(std::span<const std::size_t> members, std::size_t n)
	{
		mask_type mask = 0;
		for (std::size_t i : members)
		{
			if (i >= n)
			{
				throw invalid_input("coalition member " + std::to_string(i) + " out of range");
			}
			mask |= mask_type{1} << i;
		}
		return from_mask(mask, n);
	}

	static coalition from_members(std::initializer_list<std::size_t> members, std::size_t n)
	{
		return from_members(std::span<const std::size_t>(members.begin(), members.size()), n);
	}

	mask_type mask() const noexcept { return mask_; }
	std::size_t size() const noexcept { return static_cast<std::size_t>(std::popcount(mask_)); }
	bool contains(std::size_t i) const noexcept { return i < 64 && ((mask_ >> i) & 1u) != 0; }

	std::vector<std::size_t> members() const
	{
		std::vector<std::size_t> out;
		out.reserve(size());
		for (mask_type m = mask_; m != 0; m &= m - 1)
		{
			out.push_back(static_cast<std::size_t>(std::countr_zero(m)));
		}
		return out;
	}

	friend bool operator==(coalition, coalition) = default;
	friend auto operator<=>(coalition, coalition) = default;

private:
	explicit coalition(mask_type mask) : mask_(mask) {}

	mask_type mask_;
};

namespace detail {

inline std::vector<coalition> disjoint_blocks(std::span<const mask_type> masks, std::size_t n,
                                              mask_type& covered)
{
	std::vector<coalition> out;
	out.reserve(masks.size());
	covered = 0;
	for (mask_type m : masks)
	{
		coalition c = coalition::from_mask(m, n);
		if ((covered & m) != 0)
		{
			throw invalid_input("blocks must be mutually disjoint");
		}
		covered |= m;
		out.push_back(c);
	}
	return out;
}

inline std::vector<mask_type> masks_of(const std::vector<std::vector<std::size_t>>& blocks)
{
	std::vector<mask_type> masks;
	masks.reserve(blocks.size());
	for (const auto& b : blocks)
	{
		mask_type m = 0;
		for (std::size_t i : b)
		{
			if (i >= max_users)
			{
				throw invalid_input("member index " + std::to_string(i) + " out of range");
			}
			if ((m >> i) & 1u)
			{
				throw invalid_input("member " + std::to_string(i) + " repeated within a block");
			}
			m |= mask_type{1} << i;
		}
		masks.push_back(m);
	}
	return masks;
}

} // namespace detail

/// Mutually disjoint non-empty coalitions; their union may miss some users.
class collection
{
public:
	collection() = default;

	collection(std::span<const mask_type> masks, std::size_t n)
	: n_(n), parts_(detail::disjoint_blocks(masks, n, union_))
	{
	}

	collection(const std::vector<std::vector<std::size_t>>& parts, std::size_t n)
	: collection(std::span<const mask_type>(detail::masks_of(parts)), n)
	{
	}

	std::size_t users() const noexcept { return n_; }
	const std::vector<coalition>& parts() const noexcept { return parts_; }
	std::size_t size() const noexcept { return parts_.size(); }
	mask_type union_mask() const noexcept { return union_; }

	friend bool operator==(const collection&, const collection&) = default;

private:
	std::size_t n_ = 0;
	mask_type union_ = 0;
	std::vector<coalition> parts_;
};

/// Disjoint non-empty blocks covering every user exactly once.
class partition
{
public:
	partition(std::span<const mask_type> masks, std::size_t n)
	: n_(n)
	{
		if (n == 0 || n > max_users)
		{
			throw invalid_input("partition needs 1.." + std::to_string(max_users) + " users");
		}
		mask_type covered = 0;
		blocks_ = detail::disjoint_blocks(masks, n, covered);
		if (covered != full_mask(n))
		{
			throw invalid_input("partition blocks must cover all users");
		}
	}

	partition(const std::vector<std::vector<std::size_t>>& blocks, std::size_t n)
	: partition(std::span<const mask_type>(detail::masks_of(blocks)), n)
	{
	}

	static partition grand(std::size_t n)
	{
		const mask_type m = full_mask(n);
		return partition(std::span<const mask_type>(&m, 1), n);
	}

	static partition singletons(std::size_t n)
	{
		std::vector<mask_type> masks(n);
		for (std::size_t i = 0; i < n; ++i)
		{
			masks[i] = mask_type{1} << i;
		}
		return partition(masks, n);
	}

	/// Consecutive blocks {0..k-1}, {k..2k-1}, ...; the last block may be short.
	static partition sequential(std::size_t n, std::size_t block_size)
	{
		if (block_size == 0)
		{
			throw invalid_input("block size must be positive");
		}
		std::vector<mask_type> masks;
		for (std::size_t start = 0; start < n; start += block_size)
		{
			const std::size_t len = std::min(block_size, n - start);
			masks.push_back(full_mask(len) << start);
		}
		return partition(masks, n);
	}

	std::size_t users() const noexcept { return n_; }
	const std::vector<coalition>& blocks() const noexcept { return blocks_; }
	std::size_t size() const noexcept { return blocks_.size(); }

	collection as_collection() const
	{
		std::vector<mask_type> masks;
		masks.reserve(blocks_.size());
		for (coalition c : blocks_)
		{
			masks.push_back(c.mask());
		}
		return collection(masks, n_);
	}

	friend bool operator==(const partition&, const partition&) = default;

private:
	std::size_t n_;
	std::vector<coalition> blocks_;
};

/// Global cost and transmission parameters.
struct cost_parameters
{
	double tx_power = 2.0;
	double a = 5.0;
	double b = 1.5;
	double w = 0.5;
	double file_size = 10.0;
};

/// Unvalidated scenario fields, as read from a file or built by hand.
struct scenario_fields
{
	std::vector<double> rates;
	std::vector<double> valuations;
	std::vector<double> rx_powers;
	cost_parameters costs;
	/// Declared user count; when absent the rate list length is used.
	std::optional<std::size_t> n;
};

enum class violation_kind
{
	non_positive_rate,
	length_mismatch,
	non_positive_parameter,
	negative_valuation,
	non_finite,
	bad_user_count
};

inline const char* to_string(violation_kind k) noexcept
{
	switch (k)
	{
		case violation_kind::non_positive_rate: return "NonPositiveRate";
		case violation_kind::length_mismatch: return "LengthMismatch";
		case violation_kind::non_positive_parameter: return "NonPositiveParameter";
		case violation_kind::negative_valuation: return "NegativeValuation";
		case violation_kind::non_finite: return "NonFinite";
		case violation_kind::bad_user_count: return "BadUserCount";
	}
	return "Unknown";
}

struct validation_error
{
	violation_kind kind;
	std::string field;
	std::optional<std::size_t> index;

	std::string describe() const
	{
		std::string s = std::string(to_string(kind)) + "(" + field;
		if (index)
		{
			s += "[" + std::to_string(*index) + "]";
		}
		return s + ")";
	}
};

struct validation_result;

validation_result validate_scenario(scenario_fields fields);

/// Per-user reception cost alpha_i = a P_Rx,i X, transmitter energy cost
/// beta = b P_Tx X and bandwidth cost gamma = w X.
struct derived_constants
{
	std::vector<double> alphas;
	double beta;
	double gamma;

	double alpha_min() const { return *std::min_element(alphas.begin(), alphas.end()); }
	double alpha_max() const { return *std::max_element(alphas.begin(), alphas.end()); }
};

/// Validated, immutable game instance.
class scenario
{
public:
	/// Validates and throws invalid_input listing every violation.
	static scenario from_fields(scenario_fields fields);

	std::size_t users() const noexcept { return fields_.rates.size(); }
	std::span<const double> rates() const noexcept { return fields_.rates; }
	std::span<const double> valuations() const noexcept { return fields_.valuations; }
	std::span<const double> rx_powers() const noexcept { return fields_.rx_powers; }
	const cost_parameters& costs() const noexcept { return fields_.costs; }
	double tx_power() const noexcept { return fields_.costs.tx_power; }
	double a() const noexcept { return fields_.costs.a; }
	double b() const noexcept { return fields_.costs.b; }
	double w() const noexcept { return fields_.costs.w; }
	double file_size() const noexcept { return fields_.costs.file_size; }
	mask_type all_users() const noexcept { return full_mask(users()); }

	const derived_constants& constants() const noexcept { return constants_; }

	/// Copy of the raw fields, for building modified scenarios.
	scenario_fields fields() const { return fields_; }

	friend bool operator==(const scenario& l, const scenario& r) noexcept
	{
		return l.fields_.rates == r.fields_.rates && l.fields_.valuations == r.fields_.valuations
		    && l.fields_.rx_powers == r.fields_.rx_powers
		    && l.fields_.costs.tx_power == r.fields_.costs.tx_power
		    && l.fields_.costs.a == r.fields_.costs.a && l.fields_.costs.b == r.fields_.costs.b
		    && l.fields_.costs.w == r.fields_.costs.w
		    && l.fields_.costs.file_size == r.fields_.costs.file_size;
	}

private:
	friend validation_result validate_scenario(scenario_fields fields);

	explicit scenario(scenario_fields fields)
	: fields_(std::move(fields)), constants_(compute_constants(fields_))
	{
		fields_.n = fields_.rates.size();
	}

	static derived_constants compute_constants(const scenario_fields& f)
	{
		derived_constants c;
		c.alphas.reserve(f.rx_powers.size());
		for (double p : f.rx_powers)
		{
			c.alphas.push_back(f.costs.a * p * f.costs.file_size);
		}
		c.beta = f.costs.b * f.costs.tx_power * f.costs.file_size;
		c.gamma = f.costs.w * f.costs.file_size;
		return c;
	}

	scenario_fields fields_;
	derived_constants constants_;
};

struct validation_result
{
	std::optional<scenario> value;
	std::vector<validation_error> errors;

	bool ok() const noexcept { return errors.empty(); }
};

inline validation_result validate_scenario(scenario_fields f)
{
	validation_result out;
	auto fail = [&](violation_kind k, std::string field, std::optional<std::size_t> idx = {}) {
		out.errors.push_back({k, std::move(field), idx});
	};

	const std::size_t n = f.n.value_or(f.rates.size());
	if (n == 0 || n > max_users)
	{
		fail(violation_kind::bad_user_count, "n");
	}
	if (f.rates.size() != n)
	{
		fail(violation_kind::length_mismatch, "rates");
	}
	if (f.valuations.size() != n)
	{
		fail(violation_kind::length_mismatch, "valuations");
	}
	if (f.rx_powers.size() != n)
	{
		fail(violation_kind::length_mismatch, "rx_powers");
	}

	for (std::size_t i = 0; i < f.rates.size(); ++i)
	{
		if (!std::isfinite(f.rates[i]))
		{
			fail(violation_kind::non_finite, "rates", i);
		}
		else if (f.rates[i] <= 0)
		{
			fail(violation_kind::non_positive_rate, "rates", i);
		}
	}
	for (std::size_t i = 0; i < f.valuations.size(); ++i)
	{
		if (!std::isfinite(f.valuations[i]))
		{
			fail(violation_kind::non_finite, "valuations", i);
		}
		else if (f.valuations[i] < 0)
		{
			fail(violation_kind::negative_valuation, "valuations", i);
		}
	}
	for (std::size_t i = 0; i < f.rx_powers.size(); ++i)
	{
		if (!std::isfinite(f.rx_powers[i]))
		{
			fail(violation_kind::non_finite, "rx_powers", i);
		}
		else if (f.rx_powers[i] <= 0)
		{
			fail(violation_kind::non_positive_parameter, "rx_powers", i);
		}
	}

	const std::pair<const char*, double> params[] = {
		{"tx_power", f.costs.tx_power}, {"a", f.costs.a}, {"b", f.costs.b},
		{"w", f.costs.w}, {"file_size", f.costs.file_size}};
	for (const auto& [name, value] : params)
	{
		if (!std::isfinite(value))
		{
			fail(violation_kind::non_finite, name);
		}
		else if (value <= 0)
		{
			fail(violation_kind::non_positive_parameter, name);
		}
	}

	if (out.errors.empty())
	{
		out.value = scenario(std::move(f));
	}
	return out;
}

inline scenario scenario::from_fields(scenario_fields fields)
{
	validation_result r = validate_scenario(std::move(fields));
	if (!r.ok())
	{
		std::string msg = "invalid scenario:";
		for (const auto& e : r.errors)
		{
			msg += " " + e.describe();
		}
		throw invalid_input(msg);
	}
	return std::move(*r.value);
}

inline derived_constants derive_constants(const scenario& s)
{
	return s.constants();
}

/// The 20 default user rates of the reference network.
inline std::vector<double> default_rates()
{
	return {20, 25, 30, 35, 40, 100, 105, 110, 115, 120,
	        150, 155, 160, 165, 170, 200, 205, 210, 215, 220};
}

/// Every user gets the same valuation and receive power.
inline scenario uniform_scenario(std::vector<double> rates, double valuation, double rx_power,
                                 cost_parameters costs = {})
{
	scenario_fields f;
	f.valuations.assign(rates.size(), valuation);
	f.rx_powers.assign(rates.size(), rx_power);
	f.rates = std::move(rates);
	f.costs = costs;
	return scenario::from_fields(std::move(f));
}

/// Reference network with deterministic users: U_i = 95, P_Rx,i = 0.3 and
/// the default rates and costs.
inline scenario reference_scenario()
{
	return uniform_scenario(default_rates(), 95.0, 0.3);
}

/// Scenario restricted to the listed users, renumbered 0.. in list order.
inline scenario sub_scenario(const scenario& s, std::span<const std::size_t> users)
{
	scenario_fields f;
	f.costs = s.costs();
	for (std::size_t i : users)
	{
		if (i >= s.users())
		{
			throw invalid_input("sub-scenario user " + std::to_string(i) + " out of range");
		}
		f.rates.push_back(s.rates()[i]);
		f.valuations.push_back(s.valuations()[i]);
		f.rx_powers.push_back(s.rx_powers()[i]);
	}
	return scenario::from_fields(std::move(f));
}

inline scenario sub_scenario(const scenario& s, std::initializer_list<std::size_t> users)
{
	return sub_scenario(s, std::span<const std::size_t>(users.begin(), users.size()));
}

// -- generation ---------------------------------------------------------------

/**
 * SplitMix64 used as a counter-based generator: draw k of seed s is
 * mix(s + (k + 1) * 0x9E3779B97F4A7C15), independent of platform and
 * standard library. Uniform doubles take the top 53 bits.
 */
class splitmix64
{
public:
	explicit splitmix64(std::uint64_t seed) noexcept : state_(seed) {}

	std::uint64_t next() noexcept
	{
		std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
		z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
		z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
		return z ^ (z >> 31);
	}

	/// Uniform on [0, 1).
	double unit() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

	double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * unit(); }

private:
	std::uint64_t state_;
};

struct explicit_rates
{
	std::vector<double> rates;
};

/// R_i = bases[ceil(i / block) - 1] + step * ((i - 1) mod block) for 1-based i.
struct banded_rates
{
	std::vector<double> bases{20, 100, 150, 200};
	double step = 5;
	std::size_t block = 5;

	std::size_t max_users() const noexcept { return bases.size() * block; }

	std::vector<double> rates(std::size_t n) const
	{
		if (block == 0 || n > max_users())
		{
			throw invalid_input("UnsupportedN: banded rates cover at most "
			                    + std::to_string(max_users()) + " users, got " + std::to_string(n));
		}
		std::vector<double> out(n);
		for (std::size_t i = 0; i < n; ++i)
		{
			out[i] = bases[i / block] + step * static_cast<double>(i % block);
		}
		return out;
	}
};

using rate_rule = std::variant<explicit_rates, banded_rates>;

/// Valuation and receive-power ranges used for random users.
struct draw_ranges
{
	double valuation_lo = 90.0;
	double valuation_hi = 100.0;
	double rx_power_lo = 0.2;
	double rx_power_hi = 0.4;
};

/**
 * Draws U_i and P_Rx,i uniformly (user by user, U_i first) from a
 * splitmix64 stream keyed by seed; rates come from the rule.
 */
inline scenario generate_scenario(std::uint64_t seed, std::size_t n, const rate_rule& rule,
                                  cost_parameters costs = {}, draw_ranges ranges = {})
{
	if (n == 0 || n > max_users)
	{
		throw invalid_input("generator needs 1.." + std::to_string(max_users) + " users");
	}
	scenario_fields f;
	f.costs = costs;
	f.rates = std::visit(
		[n](const auto& r) -> std::vector<double> {
			if constexpr (std::is_same_v<std::decay_t<decltype(r)>, explicit_rates>)
			{
				if (r.rates.size() != n)
				{
					throw invalid_input("explicit rate list has " + std::to_string(r.rates.size())
					                    + " entries for " + std::to_string(n) + " users");
				}
				return r.rates;
			}
			else
			{
				return r.rates(n);
			}
		},
		rule);

	splitmix64 rng(seed);
	f.valuations.resize(n);
	f.rx_powers.resize(n);
	for (std::size_t i = 0; i < n; ++i)
	{
		f.valuations[i] = rng.uniform(ranges.valuation_lo, ranges.valuation_hi);
		f.rx_powers[i] = rng.uniform(ranges.rx_power_lo, ranges.rx_power_hi);
	}
	return scenario::from_fields(std::move(f));
}

/// Lowest index attaining the minimum rate among users in mask.
inline std::size_t argmin_rate(const scenario& s, mask_type mask)
{
	std::size_t best = 64;
	for (mask_type m = mask; m != 0; m &= m - 1)
	{
		const auto i = static_cast<std::size_t>(std::countr_zero(m));
		if (best == 64 || s.rates()[i] < s.rates()[best])
		{
			best = i;
		}
	}
	return best;
}

/// Lowest index attaining the maximum rate among users in mask.
inline std::size_t argmax_rate(const scenario& s, mask_type mask)
{
	std::size_t best = 64;
	for (mask_type m = mask; m != 0; m &= m - 1)
	{
		const auto i = static_cast<std::size_t>(std::countr_zero(m));
		if (best == 64 || s.rates()[i] > s.rates()[best])
		{
			best = i;
		}
	}
	return best;
}

} // namespace mcstab

#endif // MCSTAB_SCENARIO_HPP
