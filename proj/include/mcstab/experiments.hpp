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
 * \file mcstab/experiments.hpp
 *
 * \brief Sum-of-utilities comparisons and one-parameter sweeps.
 *
 * Three coalition structures are compared: the grand coalition, a fixed
 * partition and individual downloads. A sweep varies one parameter of a base
 * scenario over a grid and records each structure's total value. Random
 * valuations and receive powers are drawn once (in the base scenario) and
 * held fixed across the grid.
 */

#ifndef MCSTAB_EXPERIMENTS_HPP
#define MCSTAB_EXPERIMENTS_HPP

#include <mcstab/core.hpp>
#include <mcstab/dc_stability.hpp>
#include <mcstab/errors.hpp>
#include <mcstab/scenario.hpp>
#include <mcstab/value.hpp>

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace mcstab {

/// A grid value that would change the meaning of the swept parameter.
class grid_domain : public invalid_input
{
public:
	using invalid_input::invalid_input;
};

struct mode
{
	enum class kind
	{
		grand,
		fixed_partition,
		singletons
	};

	kind tag = kind::grand;
	/// Explicit 0-based blocks; when empty, consecutive blocks of block_size.
	std::vector<std::vector<std::size_t>> blocks;
	std::size_t block_size = 5;
	std::string label;

	static mode grand() { return {kind::grand, {}, 5, "grand"}; }
	static mode singletons() { return {kind::singletons, {}, 5, "singletons"}; }
	static mode sequential(std::size_t block_size)
	{
		return {kind::fixed_partition, {}, block_size, "partition"};
	}
	static mode explicit_partition(std::vector<std::vector<std::size_t>> blocks)
	{
		return {kind::fixed_partition, std::move(blocks), 0, "partition"};
	}

	partition structure(std::size_t n) const
	{
		switch (tag)
		{
			case kind::grand: return partition::grand(n);
			case kind::singletons: return partition::singletons(n);
			case kind::fixed_partition:
				return blocks.empty() ? partition::sequential(n, block_size) : partition(blocks, n);
		}
		throw invalid_input("unknown mode");
	}
};

/// Total value of all users under the mode's coalition structure.
inline double mode_sum(const scenario& s, const mode& m)
{
	return collection_value(s, m.structure(s.users()));
}

enum class sweep_axis
{
	min_rate,
	rx_power,
	tx_power,
	max_rate,
	num_users,
	file_size
};

struct axis_info
{
	sweep_axis axis;
	const char* name;
	int figure;
};

inline constexpr axis_info axis_table[] = {
	{sweep_axis::min_rate, "min_rate", 2},   {sweep_axis::rx_power, "rx_power", 3},
	{sweep_axis::tx_power, "tx_power", 4},   {sweep_axis::max_rate, "max_rate", 5},
	{sweep_axis::num_users, "num_users", 6}, {sweep_axis::file_size, "file_size", 7}};

inline const axis_info& info(sweep_axis a)
{
	for (const auto& i : axis_table)
	{
		if (i.axis == a)
		{
			return i;
		}
	}
	throw invalid_input("unknown sweep axis");
}

inline sweep_axis parse_axis(const std::string& name)
{
	for (const auto& i : axis_table)
	{
		if (name == i.name)
		{
			return i.axis;
		}
	}
	throw invalid_input("unknown sweep axis '" + name + "'");
}

/// Conventional output name, e.g. "fig7_file_size.csv".
inline std::string default_output_name(sweep_axis a, const std::string& extension = "csv")
{
	const axis_info& i = info(a);
	return "fig" + std::to_string(i.figure) + "_" + i.name + "." + extension;
}

struct sweep_spec
{
	scenario base;
	sweep_axis axis = sweep_axis::file_size;
	std::vector<double> grid{};
	std::vector<mode> modes{};
	bool annotate_core = false;
	bool annotate_dc = false;
	/// min_rate: users dropped from the front of base before sweeping.
	std::size_t drop_leading = 5;
	/// num_users: common receive power and rate rule of the regenerated users.
	double rx_power = 0.5;
	banded_rates bands{};
	enumeration_limits limits{};
};

struct sweep_row
{
	double axis_value;
	std::vector<double> sums;
	/// 1 = non-empty core / stable, 0 = empty / unstable, -1 = undetermined.
	std::vector<double> annotations;
};

namespace detail {

inline std::size_t argmin_excluding(std::span<const double> r, std::size_t skip)
{
	std::size_t best = r.size();
	for (std::size_t i = 0; i < r.size(); ++i)
	{
		if (i != skip && (best == r.size() || r[i] < r[best]))
		{
			best = i;
		}
	}
	return best;
}

inline std::size_t argmax_excluding(std::span<const double> r, std::size_t skip)
{
	std::size_t best = r.size();
	for (std::size_t i = 0; i < r.size(); ++i)
	{
		if (i != skip && (best == r.size() || r[i] > r[best]))
		{
			best = i;
		}
	}
	return best;
}

inline void require_positive(double x, const char* what)
{
	if (!(x > 0) || !std::isfinite(x))
	{
		throw grid_domain(std::string(what) + " grid values must be positive and finite");
	}
}

} // namespace detail

/// The scenario a sweep evaluates at grid value x.
inline scenario scenario_at(const sweep_spec& spec, double x)
{
	scenario_fields f = spec.base.fields();
	switch (spec.axis)
	{
		case sweep_axis::min_rate:
		{
			detail::require_positive(x, "min_rate");
			if (f.rates.size() < spec.drop_leading + 2)
			{
				throw invalid_input("min_rate sweep needs at least two users after dropping "
				                    + std::to_string(spec.drop_leading));
			}
			const auto cut = static_cast<std::ptrdiff_t>(spec.drop_leading);
			f.rates.erase(f.rates.begin(), f.rates.begin() + cut);
			f.valuations.erase(f.valuations.begin(), f.valuations.begin() + cut);
			f.rx_powers.erase(f.rx_powers.begin(), f.rx_powers.begin() + cut);
			f.n.reset();
			const std::size_t lowest = detail::argmin_excluding(f.rates, f.rates.size());
			const std::size_t runner_up = detail::argmin_excluding(f.rates, lowest);
			if (x > f.rates[runner_up])
			{
				throw grid_domain("min_rate value exceeds the second-lowest rate "
				                  + std::to_string(f.rates[runner_up]));
			}
			f.rates[lowest] = x;
			break;
		}
		case sweep_axis::max_rate:
		{
			detail::require_positive(x, "max_rate");
			if (f.rates.size() < 2)
			{
				throw invalid_input("max_rate sweep needs at least two users");
			}
			const std::size_t highest = detail::argmax_excluding(f.rates, f.rates.size());
			const std::size_t runner_up = detail::argmax_excluding(f.rates, highest);
			if (x < f.rates[runner_up])
			{
				throw grid_domain("max_rate value is below the second-highest rate "
				                  + std::to_string(f.rates[runner_up]));
			}
			f.rates[highest] = x;
			break;
		}
		case sweep_axis::rx_power:
			detail::require_positive(x, "rx_power");
			f.rx_powers.assign(f.rx_powers.size(), x);
			break;
		case sweep_axis::tx_power:
			detail::require_positive(x, "tx_power");
			f.costs.tx_power = x;
			break;
		case sweep_axis::file_size:
			detail::require_positive(x, "file_size");
			f.costs.file_size = x;
			break;
		case sweep_axis::num_users:
		{
			if (!(x >= 1) || x != std::floor(x))
			{
				throw grid_domain("num_users grid values must be positive integers");
			}
			const auto n = static_cast<std::size_t>(x);
			if (n > f.valuations.size())
			{
				throw grid_domain("num_users value " + std::to_string(n) + " exceeds the "
				                  + std::to_string(f.valuations.size()) + " users of the base scenario");
			}
			if (n > spec.bands.max_users())
			{
				throw grid_domain("num_users value " + std::to_string(n)
				                  + " exceeds the banded rate rule");
			}
			f.rates = spec.bands.rates(n);
			f.valuations.resize(n);
			f.rx_powers.assign(n, spec.rx_power);
			f.n.reset();
			break;
		}
	}
	return scenario::from_fields(std::move(f));
}

/// Column names: axis, one per mode, then annotations.
inline std::vector<std::string> sweep_columns(const sweep_spec& spec)
{
	std::vector<std::string> cols{info(spec.axis).name};
	for (const mode& m : spec.modes)
	{
		cols.push_back(m.label);
	}
	if (spec.annotate_core)
	{
		cols.emplace_back("core_nonempty");
	}
	if (spec.annotate_dc)
	{
		for (const mode& m : spec.modes)
		{
			cols.push_back("dc_stable_" + m.label);
		}
	}
	return cols;
}

/// 1 / 0 core verdict from the closed-form screen, falling back to the LP;
/// -1 when neither can decide within the limits.
inline double core_annotation(const scenario& s, const enumeration_limits& lim)
{
	const core_screen_result screen = core_screen(s);
	if (screen.verdict != core_screen_verdict::inconclusive)
	{
		return screen.verdict == core_screen_verdict::nonempty ? 1.0 : 0.0;
	}
	try
	{
		return core_nonempty(s, lim).feasible ? 1.0 : 0.0;
	}
	catch (const size_limit&)
	{
		return -1.0;
	}
	catch (const solver_stall&)
	{
		return -1.0;
	}
}

inline double dc_annotation(const scenario& s, const partition& p, const enumeration_limits& lim)
{
	try
	{
		return is_dc_stable(s, p, lim).stable ? 1.0 : 0.0;
	}
	catch (const size_limit&)
	{
		return -1.0;
	}
}

inline void check_sweep_spec(const sweep_spec& spec)
{
	if (spec.grid.empty())
	{
		throw invalid_input("sweep grid must not be empty");
	}
	for (std::size_t i = 1; i < spec.grid.size(); ++i)
	{
		if (!(spec.grid[i] > spec.grid[i - 1]))
		{
			throw invalid_input("sweep grid must be strictly increasing");
		}
	}
	if (spec.modes.empty())
	{
		throw invalid_input("sweep needs at least one mode");
	}
	for (std::size_t i = 0; i < spec.modes.size(); ++i)
	{
		for (std::size_t j = 0; j < i; ++j)
		{
			if (spec.modes[i].label == spec.modes[j].label)
			{
				throw invalid_input("duplicate mode label '" + spec.modes[i].label + "'");
			}
		}
	}
}

/// One row per grid value, in grid order.
inline std::vector<sweep_row> run_sweep(const sweep_spec& spec)
{
	check_sweep_spec(spec);
	std::vector<sweep_row> rows;
	rows.reserve(spec.grid.size());
	for (double x : spec.grid)
	{
		const scenario s = scenario_at(spec, x);
		sweep_row row{x, {}, {}};
		std::vector<partition> structures;
		for (const mode& m : spec.modes)
		{
			structures.push_back(m.structure(s.users()));
			row.sums.push_back(collection_value(s, structures.back()));
		}
		if (spec.annotate_core)
		{
			row.annotations.push_back(core_annotation(s, spec.limits));
		}
		if (spec.annotate_dc)
		{
			for (const partition& p : structures)
			{
				row.annotations.push_back(dc_annotation(s, p, spec.limits));
			}
		}
		rows.push_back(std::move(row));
	}
	return rows;
}

enum class output_format
{
	csv,
	jsonl
};

/// Six significant digits, "%.6g" style.
inline std::string format_number(double x)
{
	char buf[32];
	std::snprintf(buf, sizeof buf, "%.6g", x);
	return buf;
}

inline void emit_results(std::ostream& out, const std::vector<std::string>& columns,
                         const std::vector<sweep_row>& rows, output_format format)
{
	auto values_of = [](const sweep_row& r) {
		std::vector<double> v{r.axis_value};
		v.insert(v.end(), r.sums.begin(), r.sums.end());
		v.insert(v.end(), r.annotations.begin(), r.annotations.end());
		return v;
	};

	if (format == output_format::csv)
	{
		for (std::size_t i = 0; i < columns.size(); ++i)
		{
			out << (i ? "," : "") << columns[i];
		}
		out << '\n';
		for (const sweep_row& r : rows)
		{
			const std::vector<double> v = values_of(r);
			for (std::size_t i = 0; i < v.size(); ++i)
			{
				out << (i ? "," : "") << format_number(v[i]);
			}
			out << '\n';
		}
	}
	else
	{
		for (const sweep_row& r : rows)
		{
			const std::vector<double> v = values_of(r);
			out << '{';
			for (std::size_t i = 0; i < v.size(); ++i)
			{
				out << (i ? "," : "") << '"' << columns[i] << "\":" << format_number(v[i]);
			}
			out << "}\n";
		}
	}
	if (!out)
	{
		throw std::runtime_error("failed writing sweep results");
	}
}

} // namespace mcstab

#endif // MCSTAB_EXPERIMENTS_HPP
