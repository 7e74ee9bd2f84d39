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
 * \file mcstab/io.hpp
 *
 * \brief JSON scenario files and sweep specifications.
 *
 * Scenario file:
 *
 *   { "n": 3, "rates": [...], "valuations": [...], "rx_powers": [...],
 *     "tx_power": 2, "a": 5, "b": 1.5, "w": 0.5, "file_size": 10,
 *     "generator": { "seed": 7, "n": 20, "rate_rule": "banded" } }
 *
 * Without a generator block every key except "n" is required. With one, the
 * generator draws valuations and receive powers, the rule supplies rates,
 * missing cost keys take the reference defaults, and any explicit list or
 * cost key overrides the generated value. "rate_rule" is "banded",
 * {"banded": {"bases": [...], "step": 5, "block": 5}} or {"explicit": [...]}.
 *
 * Sweep specification:
 *
 *   { "scenario": {...} | "scenario_file": "relative/or/absolute.json",
 *     "axis": "min_rate" | "rx_power" | "tx_power" | "max_rate" | "num_users" | "file_size",
 *     "grid": [x1, x2, ...] | {"start": a, "stop": b, "count": k},
 *     "modes": ["grand", "singletons", "partition",
 *               {"partition": [[1,2,3],[4,5]], "label": "pairs"},
 *               {"partition": {"block_size": 4}}],
 *     "annotations": ["core", "dc"],
 *     "drop_leading": 5, "rx_power": 0.5 }
 *
 * Partition blocks in files use 1-based user numbers.
 */

#ifndef MCSTAB_IO_HPP
#define MCSTAB_IO_HPP

#include <mcstab/errors.hpp>
#include <mcstab/experiments.hpp>
#include <mcstab/scenario.hpp>

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace mcstab {

using json = nlohmann::json;

namespace detail {

template <typename T>
T json_get(const json& j, const char* key)
{
	if (!j.contains(key))
	{
		throw invalid_input(std::string("missing key '") + key + "'");
	}
	try
	{
		return j.at(key).get<T>();
	}
	catch (const json::exception&)
	{
		throw invalid_input(std::string("key '") + key + "' has the wrong type");
	}
}

inline rate_rule parse_rate_rule(const json& j)
{
	if (j.is_string())
	{
		if (j.get<std::string>() == "banded")
		{
			return banded_rates{};
		}
		throw invalid_input("unknown rate_rule '" + j.get<std::string>() + "'");
	}
	if (j.is_object() && j.contains("explicit"))
	{
		return explicit_rates{json_get<std::vector<double>>(j, "explicit")};
	}
	if (j.is_object() && j.contains("banded"))
	{
		const json& b = j.at("banded");
		banded_rates rule;
		if (b.contains("bases"))
		{
			rule.bases = json_get<std::vector<double>>(b, "bases");
		}
		if (b.contains("step"))
		{
			rule.step = json_get<double>(b, "step");
		}
		if (b.contains("block"))
		{
			rule.block = json_get<std::size_t>(b, "block");
		}
		return rule;
	}
	throw invalid_input("rate_rule must be \"banded\", {\"banded\": {...}} or {\"explicit\": [...]}");
}

inline std::vector<std::vector<std::size_t>> zero_based(const std::vector<std::vector<std::size_t>>& blocks)
{
	std::vector<std::vector<std::size_t>> out = blocks;
	for (auto& b : out)
	{
		for (auto& i : b)
		{
			if (i == 0)
			{
				throw invalid_input("user numbers are 1-based");
			}
			--i;
		}
	}
	return out;
}

} // namespace detail

/// Scenario fields from a parsed JSON document (not yet validated).
inline scenario_fields scenario_fields_from_json(const json& j)
{
	if (!j.is_object())
	{
		throw invalid_input("scenario must be a JSON object");
	}
	scenario_fields f;
	const char* cost_keys[] = {"tx_power", "a", "b", "w", "file_size"};
	double* cost_slots[] = {&f.costs.tx_power, &f.costs.a, &f.costs.b, &f.costs.w,
	                        &f.costs.file_size};

	if (j.contains("generator"))
	{
		const json& g = j.at("generator");
		const auto seed = detail::json_get<std::uint64_t>(g, "seed");
		const auto n = detail::json_get<std::size_t>(g, "n");
		const rate_rule rule = g.contains("rate_rule") ? detail::parse_rate_rule(g.at("rate_rule"))
		                                               : rate_rule{banded_rates{}};
		cost_parameters costs;
		double* slots[] = {&costs.tx_power, &costs.a, &costs.b, &costs.w, &costs.file_size};
		for (std::size_t k = 0; k < 5; ++k)
		{
			if (j.contains(cost_keys[k]))
			{
				*slots[k] = detail::json_get<double>(j, cost_keys[k]);
			}
		}
		// Generated values must themselves be valid; overrides are validated later.
		f = generate_scenario(seed, n, rule, costs).fields();
		f.n.reset();
		if (j.contains("rates"))
		{
			f.rates = detail::json_get<std::vector<double>>(j, "rates");
		}
		if (j.contains("valuations"))
		{
			f.valuations = detail::json_get<std::vector<double>>(j, "valuations");
		}
		if (j.contains("rx_powers"))
		{
			f.rx_powers = detail::json_get<std::vector<double>>(j, "rx_powers");
		}
	}
	else
	{
		f.rates = detail::json_get<std::vector<double>>(j, "rates");
		f.valuations = detail::json_get<std::vector<double>>(j, "valuations");
		f.rx_powers = detail::json_get<std::vector<double>>(j, "rx_powers");
		for (std::size_t k = 0; k < 5; ++k)
		{
			*cost_slots[k] = detail::json_get<double>(j, cost_keys[k]);
		}
	}
	if (j.contains("n"))
	{
		f.n = detail::json_get<std::size_t>(j, "n");
	}
	return f;
}

inline json read_json_file(const std::filesystem::path& path)
{
	std::ifstream in(path);
	if (!in)
	{
		throw invalid_input("cannot open " + path.string());
	}
	try
	{
		return json::parse(in);
	}
	catch (const json::parse_error& e)
	{
		throw invalid_input(path.string() + ": " + e.what());
	}
}

inline validation_result load_scenario(const std::filesystem::path& path)
{
	return validate_scenario(scenario_fields_from_json(read_json_file(path)));
}

inline json to_json(const scenario& s)
{
	json j;
	j["n"] = s.users();
	j["rates"] = std::vector<double>(s.rates().begin(), s.rates().end());
	j["valuations"] = std::vector<double>(s.valuations().begin(), s.valuations().end());
	j["rx_powers"] = std::vector<double>(s.rx_powers().begin(), s.rx_powers().end());
	j["tx_power"] = s.tx_power();
	j["a"] = s.a();
	j["b"] = s.b();
	j["w"] = s.w();
	j["file_size"] = s.file_size();
	return j;
}

inline mode mode_from_json(const json& j)
{
	if (j.is_string())
	{
		const std::string name = j.get<std::string>();
		if (name == "grand")
		{
			return mode::grand();
		}
		if (name == "singletons")
		{
			return mode::singletons();
		}
		if (name == "partition")
		{
			return mode::sequential(5);
		}
		throw invalid_input("unknown mode '" + name + "'");
	}
	if (j.is_object() && j.contains("partition"))
	{
		const json& p = j.at("partition");
		mode m;
		if (p.is_array())
		{
			m = mode::explicit_partition(
				detail::zero_based(p.get<std::vector<std::vector<std::size_t>>>()));
		}
		else if (p.is_object())
		{
			m = mode::sequential(detail::json_get<std::size_t>(p, "block_size"));
		}
		else
		{
			throw invalid_input("partition mode needs a block list or {\"block_size\": k}");
		}
		if (j.contains("label"))
		{
			m.label = detail::json_get<std::string>(j, "label");
		}
		return m;
	}
	throw invalid_input("mode must be a name or a {\"partition\": ...} object");
}

inline std::vector<double> grid_from_json(const json& j)
{
	if (j.is_array())
	{
		return j.get<std::vector<double>>();
	}
	if (j.is_object())
	{
		const auto start = detail::json_get<double>(j, "start");
		const auto stop = detail::json_get<double>(j, "stop");
		const auto count = detail::json_get<std::size_t>(j, "count");
		if (count == 0)
		{
			throw invalid_input("grid count must be positive");
		}
		std::vector<double> g(count);
		for (std::size_t i = 0; i < count; ++i)
		{
			g[i] = count == 1 ? start
			                  : start + (stop - start) * static_cast<double>(i)
			                                / static_cast<double>(count - 1);
		}
		return g;
	}
	throw invalid_input("grid must be a list or {\"start\", \"stop\", \"count\"}");
}

/// Parses a sweep specification; relative scenario_file paths resolve
/// against base_dir.
inline sweep_spec sweep_spec_from_json(const json& j, const std::filesystem::path& base_dir = {})
{
	if (!j.is_object())
	{
		throw invalid_input("sweep specification must be a JSON object");
	}
	scenario_fields fields;
	if (j.contains("scenario"))
	{
		fields = scenario_fields_from_json(j.at("scenario"));
	}
	else if (j.contains("scenario_file"))
	{
		std::filesystem::path p = detail::json_get<std::string>(j, "scenario_file");
		if (p.is_relative())
		{
			p = base_dir / p;
		}
		fields = scenario_fields_from_json(read_json_file(p));
	}
	else
	{
		throw invalid_input("sweep specification needs \"scenario\" or \"scenario_file\"");
	}

	sweep_spec spec{.base = scenario::from_fields(std::move(fields))};
	spec.axis = parse_axis(detail::json_get<std::string>(j, "axis"));
	if (!j.contains("grid"))
	{
		throw invalid_input("missing key 'grid'");
	}
	spec.grid = grid_from_json(j.at("grid"));
	if (j.contains("modes"))
	{
		for (const json& m : j.at("modes"))
		{
			spec.modes.push_back(mode_from_json(m));
		}
	}
	else
	{
		spec.modes = {mode::grand(), mode::sequential(5), mode::singletons()};
	}
	if (j.contains("annotations"))
	{
		for (const auto& a : detail::json_get<std::vector<std::string>>(j, "annotations"))
		{
			if (a == "core")
			{
				spec.annotate_core = true;
			}
			else if (a == "dc")
			{
				spec.annotate_dc = true;
			}
			else
			{
				throw invalid_input("unknown annotation '" + a + "'");
			}
		}
	}
	if (j.contains("drop_leading"))
	{
		spec.drop_leading = detail::json_get<std::size_t>(j, "drop_leading");
	}
	if (j.contains("rx_power"))
	{
		spec.rx_power = detail::json_get<double>(j, "rx_power");
	}
	check_sweep_spec(spec);
	return spec;
}

inline sweep_spec load_sweep_spec(const std::filesystem::path& path)
{
	return sweep_spec_from_json(read_json_file(path), path.parent_path());
}

} // namespace mcstab

#endif // MCSTAB_IO_HPP
