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
 * \file mcstab/value.hpp
 *
 * \brief Characteristic function of the multicast game.
 *
 * A coalition S is served at its bottleneck rate R_S = min_{i in S} R_i and
 * pays every energy and bandwidth cost of that single transmission:
 *
 *   v(S) = sum_{i in S} U_i - (sum_{i in S} alpha_i + beta + gamma) / R_S.
 */

#ifndef MCSTAB_VALUE_HPP
#define MCSTAB_VALUE_HPP

#include <mcstab/errors.hpp>
#include <mcstab/scenario.hpp>

#include <bit>
#include <cstddef>
#include <vector>

namespace mcstab {

inline double coalition_rate(const scenario& s, mask_type mask)
{
	double r = 0;
	bool first = true;
	for (mask_type m = mask; m != 0; m &= m - 1)
	{
		const double ri = s.rates()[static_cast<std::size_t>(std::countr_zero(m))];
		if (first || ri < r)
		{
			r = ri;
			first = false;
		}
	}
	return r;
}

inline double coalition_rate(const scenario& s, coalition c)
{
	return coalition_rate(s, c.mask());
}

/// v(S) through the derived constants. v of the empty mask is 0.
inline double coalition_value(const scenario& s, mask_type mask)
{
	if (mask == 0)
	{
		return 0.0;
	}
	const derived_constants& k = s.constants();
	double utility = 0;
	double reception = 0;
	double rate = 0;
	bool first = true;
	for (mask_type m = mask; m != 0; m &= m - 1)
	{
		const auto i = static_cast<std::size_t>(std::countr_zero(m));
		utility += s.valuations()[i];
		reception += k.alphas[i];
		if (first || s.rates()[i] < rate)
		{
			rate = s.rates()[i];
			first = false;
		}
	}
	return utility - (reception + k.beta + k.gamma) / rate;
}

inline double coalition_value(const scenario& s, coalition c)
{
	return coalition_value(s, c.mask());
}

/// v(S) from the physical quantities: download time X / R_S, energy
/// P_Rx,i X / R_S at each user and P_Tx X / R_S at the transmitter.
inline double coalition_value_raw(const scenario& s, mask_type mask)
{
	if (mask == 0)
	{
		return 0.0;
	}
	const double rate = coalition_rate(s, mask);
	const double x = s.file_size();
	double utility = 0;
	double rx_energy = 0;
	for (mask_type m = mask; m != 0; m &= m - 1)
	{
		const auto i = static_cast<std::size_t>(std::countr_zero(m));
		utility += s.valuations()[i];
		rx_energy += s.rx_powers()[i] * x / rate;
	}
	return utility - s.a() * rx_energy - s.b() * s.tx_power() * x / rate - s.w() * x / rate;
}

/**
 * v(S) evaluated in an arbitrary field type constructible from double.
 * With an exact rational type every input double is taken at its exact
 * binary value, so the result carries no rounding at all.
 */
template <typename Real>
Real coalition_value_as(const scenario& s, mask_type mask)
{
	if (mask == 0)
	{
		return Real(0);
	}
	const Real a(s.a()), x(s.file_size());
	const Real beta = Real(s.b()) * Real(s.tx_power()) * x;
	const Real gamma = Real(s.w()) * x;
	Real utility(0), reception(0);
	for (mask_type m = mask; m != 0; m &= m - 1)
	{
		const auto i = static_cast<std::size_t>(std::countr_zero(m));
		utility += Real(s.valuations()[i]);
		reception += a * Real(s.rx_powers()[i]) * x;
	}
	const Real rate(coalition_rate(s, mask));
	return utility - (reception + beta + gamma) / rate;
}

inline double collection_value(const scenario& s, const collection& col)
{
	double total = 0;
	for (coalition c : col.parts())
	{
		total += coalition_value(s, c);
	}
	return total;
}

inline double collection_value(const scenario& s, const partition& p)
{
	double total = 0;
	for (coalition c : p.blocks())
	{
		total += coalition_value(s, c);
	}
	return total;
}

/// v for every mask of an N-user scenario, filled once on construction.
class value_table
{
public:
	static constexpr std::size_t default_cap = 24;

	explicit value_table(const scenario& s, std::size_t cap = default_cap)
	{
		require_within("value table", s.users(), cap);
		const mask_type count = mask_type{1} << s.users();
		values_.resize(static_cast<std::size_t>(count));
		for (mask_type m = 0; m < count; ++m)
		{
			values_[static_cast<std::size_t>(m)] = coalition_value(s, m);
		}
	}

	double operator()(mask_type mask) const { return values_[static_cast<std::size_t>(mask)]; }
	std::size_t size() const noexcept { return values_.size(); }

private:
	std::vector<double> values_;
};

} // namespace mcstab

#endif // MCSTAB_VALUE_HPP
