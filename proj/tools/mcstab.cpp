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

// Command-line front end. Users are numbered from 1 on the command line and
// in every report; the library numbers them from 0.
//
// Exit codes: 0 definitive answer, 1 usage or validation error,
// 2 inconclusive, 3 size or iteration limit reached.

#include <mcstab/mcstab.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using mcstab::json;

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_inconclusive = 2;
constexpr int exit_limit = 3;

/// Thrown for bad command-line values; maps to exit code 1.
struct usage_error : std::runtime_error
{
	using std::runtime_error::runtime_error;
};

std::string num(double x)
{
	return mcstab::format_number(x);
}

std::vector<std::size_t> parse_index_list(const std::string& text)
{
	std::vector<std::size_t> out;
	std::stringstream in(text);
	std::string item;
	while (std::getline(in, item, ','))
	{
		const auto first = item.find_first_not_of(" \t");
		const auto last = item.find_last_not_of(" \t");
		if (first == std::string::npos)
		{
			throw usage_error("empty entry in user list '" + text + "'");
		}
		item = item.substr(first, last - first + 1);
		std::size_t used = 0;
		unsigned long long v = 0;
		try
		{
			v = std::stoull(item, &used);
		}
		catch (const std::exception&)
		{
			used = 0;
		}
		if (used != item.size() || item[0] == '-' || v == 0)
		{
			throw usage_error("'" + item + "' is not a user number (users are numbered from 1)");
		}
		out.push_back(static_cast<std::size_t>(v - 1));
	}
	if (out.empty())
	{
		throw usage_error("empty user list");
	}
	return out;
}

std::vector<std::vector<std::size_t>> parse_blocks(const std::string& text)
{
	std::vector<std::vector<std::size_t>> blocks;
	std::stringstream in(text);
	std::string block;
	while (std::getline(in, block, ';'))
	{
		blocks.push_back(parse_index_list(block));
	}
	if (blocks.empty())
	{
		throw usage_error("empty partition");
	}
	return blocks;
}

std::vector<std::size_t> one_based(const std::vector<std::size_t>& users)
{
	std::vector<std::size_t> out;
	for (std::size_t i : users)
	{
		out.push_back(i + 1);
	}
	return out;
}

std::string set_text(const std::vector<std::size_t>& users)
{
	std::string s = "{";
	for (std::size_t k = 0; k < users.size(); ++k)
	{
		s += (k ? "," : "") + std::to_string(users[k] + 1);
	}
	return s + "}";
}

json blocks_json(const std::vector<mcstab::coalition>& parts)
{
	json j = json::array();
	for (const auto& c : parts)
	{
		j.push_back(one_based(c.members()));
	}
	return j;
}

std::string blocks_text(const std::vector<mcstab::coalition>& parts)
{
	std::string s;
	for (std::size_t k = 0; k < parts.size(); ++k)
	{
		s += (k ? " " : "") + set_text(parts[k].members());
	}
	return s;
}

struct context
{
	bool as_json = false;
	mcstab::enumeration_limits limits;
};

void print_json(const json& j)
{
	std::cout << j.dump(2) << '\n';
}

mcstab::scenario load(const std::string& path)
{
	mcstab::validation_result r = mcstab::load_scenario(path);
	if (!r.ok())
	{
		std::string msg = path + ": invalid scenario";
		for (const auto& e : r.errors)
		{
			msg += "\n  " + std::string(mcstab::to_string(e.kind)) + ": " + e.field;
			if (e.index)
			{
				msg += ", user " + std::to_string(*e.index + 1);
			}
		}
		throw mcstab::invalid_input(msg);
	}
	return std::move(*r.value);
}

// -- validate ----------------------------------------------------------------

int cmd_validate(const context& ctx, const std::string& path)
{
	const mcstab::validation_result r = mcstab::load_scenario(path);
	if (!r.ok())
	{
		if (ctx.as_json)
		{
			json errs = json::array();
			for (const auto& e : r.errors)
			{
				json item{{"kind", mcstab::to_string(e.kind)}, {"field", e.field}};
				if (e.index)
				{
					item["user"] = *e.index + 1;
				}
				errs.push_back(item);
			}
			print_json({{"valid", false}, {"errors", errs}});
		}
		else
		{
			std::cout << "invalid scenario: " << r.errors.size() << " problem(s)\n";
			for (const auto& e : r.errors)
			{
				std::cout << "  " << mcstab::to_string(e.kind) << ": " << e.field;
				if (e.index)
				{
					std::cout << ", user " << *e.index + 1;
				}
				std::cout << '\n';
			}
		}
		return exit_usage;
	}
	const mcstab::scenario& s = *r.value;
	const auto& k = s.constants();
	if (ctx.as_json)
	{
		print_json({{"valid", true},
		            {"n", s.users()},
		            {"alphas", k.alphas},
		            {"beta", k.beta},
		            {"gamma", k.gamma}});
	}
	else
	{
		std::cout << "valid scenario: " << s.users() << " users\n"
		          << "  alpha range [" << num(k.alpha_min()) << ", " << num(k.alpha_max())
		          << "], beta " << num(k.beta) << ", gamma " << num(k.gamma) << '\n';
	}
	return exit_ok;
}

// -- value -------------------------------------------------------------------

int cmd_value(const context& ctx, const std::string& path, const std::string& members)
{
	const mcstab::scenario s = load(path);
	const auto c = mcstab::coalition::from_members(parse_index_list(members), s.users());
	const double v = mcstab::coalition_value(s, c);
	const double r = mcstab::coalition_rate(s, c);
	if (ctx.as_json)
	{
		print_json({{"coalition", one_based(c.members())}, {"rate", r}, {"value", v}});
	}
	else
	{
		std::cout << "v(" << set_text(c.members()) << ") = " << num(v) << "  (rate " << num(r) << ")\n";
	}
	return exit_ok;
}

// -- theorem reports ---------------------------------------------------------

std::string check_title(const std::string& name)
{
	if (name == "symmetric") return "symmetric network condition (core non-empty)";
	if (name == "rate_ratio") return "rate-ratio condition (core non-empty)";
	if (name == "second_min_gap") return "second-minimum gap condition (core empty)";
	if (name == "max_min_gap") return "max/min gap condition (core empty)";
	if (name == "banded_partition") return "banded partition condition (partition D_c-stable)";
	if (name == "singleton_partition") return "singleton condition (all-singletons partition D_c-stable)";
	return name;
}

bool is_user_diagnostic(const std::string& key)
{
	return key == "k" || key == "j" || key == "m";
}

json check_json(const mcstab::theorem_check& t)
{
	json j{{"name", t.name}, {"applicable", t.applicable}};
	if (!t.applicable)
	{
		j["reason"] = t.reason;
		return j;
	}
	j["holds"] = t.condition_holds;
	j["lhs"] = t.lhs;
	j["relation"] = t.relation;
	j["rhs"] = t.rhs;
	json d = json::object();
	for (const auto& [key, value] : t.diagnostics)
	{
		d[key] = is_user_diagnostic(key) ? value + 1 : value;
	}
	j["diagnostics"] = d;
	json ineq = json::array();
	for (const auto& q : t.inequalities)
	{
		ineq.push_back({{"label", q.label}, {"lhs", q.lhs}, {"relation", q.relation},
		                {"rhs", q.rhs}, {"holds", q.holds}});
	}
	j["inequalities"] = ineq;
	return j;
}

void print_check(const mcstab::theorem_check& t)
{
	std::cout << check_title(t.name) << ": ";
	if (!t.applicable)
	{
		std::cout << "not applicable (" << t.reason << ")\n";
		return;
	}
	std::cout << (t.condition_holds ? "HOLDS" : "does not hold");
	if (!t.inequalities.empty())
	{
		std::cout << "  [" << num(t.lhs) << ' ' << t.relation << ' ' << num(t.rhs) << ']';
	}
	std::cout << '\n';
	if (!t.diagnostics.empty())
	{
		std::cout << "   ";
		for (const auto& [key, value] : t.diagnostics)
		{
			std::cout << ' ' << key << '=' << num(is_user_diagnostic(key) ? value + 1 : value);
		}
		std::cout << '\n';
	}
	if (t.inequalities.size() > 1)
	{
		for (const auto& q : t.inequalities)
		{
			std::cout << "    " << q.label << ": " << num(q.lhs) << ' ' << q.relation << ' '
			          << num(q.rhs) << (q.holds ? "" : "  (fails)") << '\n';
		}
	}
}

int cmd_theorems(const context& ctx, const std::string& path, const std::string& partition_text)
{
	const mcstab::scenario s = load(path);
	std::vector<mcstab::theorem_check> checks = mcstab::core_screen(s).checks;
	checks.push_back(mcstab::thm_singleton_dc_sufficient(s));
	if (!partition_text.empty())
	{
		const mcstab::partition p(parse_blocks(partition_text), s.users());
		checks.push_back(mcstab::thm_banded_dc_sufficient(s, p));
	}
	if (ctx.as_json)
	{
		json arr = json::array();
		for (const auto& t : checks)
		{
			arr.push_back(check_json(t));
		}
		print_json({{"checks", arr}});
	}
	else
	{
		for (const auto& t : checks)
		{
			print_check(t);
		}
	}
	return exit_ok;
}

// -- check-core --------------------------------------------------------------

int cmd_check_core(const context& ctx, const std::string& path, const std::string& method)
{
	const mcstab::scenario s = load(path);
	const bool use_theorems = method != "lp";
	const bool use_lp = method != "theorems";

	json report{{"method", method}};
	std::optional<mcstab::core_screen_result> screen;
	if (use_theorems)
	{
		screen = mcstab::core_screen(s);
		json arr = json::array();
		for (const auto& t : screen->checks)
		{
			arr.push_back(check_json(t));
		}
		report["checks"] = arr;
	}
	const bool decided = screen && screen->verdict != mcstab::core_screen_verdict::inconclusive;

	std::optional<mcstab::core_verdict> lp;
	std::string lp_note;
	int limit_code = exit_ok;
	// In "both" mode the LP runs only to settle an open screen or to
	// supply a witness for a non-empty verdict.
	const bool want_lp = use_lp
	                  && (!decided || method == "lp"
	                      || screen->verdict == mcstab::core_screen_verdict::nonempty);
	if (want_lp)
	{
		try
		{
			lp = mcstab::core_nonempty(s, ctx.limits);
		}
		catch (const mcstab::size_limit& e)
		{
			lp_note = e.what();
			limit_code = exit_limit;
		}
		catch (const mcstab::solver_stall& e)
		{
			lp_note = e.what();
			limit_code = exit_limit;
		}
	}

	std::string verdict;
	std::string basis;
	int code = exit_ok;
	if (decided)
	{
		const bool nonempty = screen->verdict == mcstab::core_screen_verdict::nonempty;
		verdict = nonempty ? "NON-EMPTY" : "EMPTY";
		basis = check_title(screen->decided_by);
		basis = basis.substr(0, basis.find(" ("));
		if (lp)
		{
			if (lp->feasible != nonempty)
			{
				throw std::runtime_error("closed-form condition and LP disagree");
			}
			basis += nonempty ? " + LP witness" : " + LP infeasible";
		}
	}
	else if (lp)
	{
		verdict = lp->feasible ? "NON-EMPTY" : "EMPTY";
		basis = lp->feasible ? "LP witness" : "LP infeasible";
	}
	else
	{
		verdict = "UNDETERMINED";
		basis = use_lp ? "LP unavailable: " + lp_note : "no closed-form condition applies";
		code = use_lp ? limit_code : exit_inconclusive;
	}

	report["verdict"] = verdict;
	report["basis"] = basis;
	if (screen && decided)
	{
		report["decided_by"] = screen->decided_by;
	}
	if (lp)
	{
		report["lp"] = {{"feasible", lp->feasible}, {"iterations", lp->iterations}};
		if (lp->witness)
		{
			report["lp"]["witness"] = *lp->witness;
		}
	}
	else if (!lp_note.empty())
	{
		report["lp"] = {{"error", lp_note}};
	}

	if (ctx.as_json)
	{
		print_json(report);
	}
	else
	{
		if (screen)
		{
			for (const auto& t : screen->checks)
			{
				print_check(t);
			}
		}
		std::cout << "core: " << verdict << " (" << basis << ")\n";
		if (lp && lp->witness)
		{
			std::cout << "witness:";
			for (std::size_t i = 0; i < lp->witness->size(); ++i)
			{
				std::cout << " x" << i + 1 << '=' << num((*lp->witness)[i]);
			}
			std::cout << '\n';
		}
	}
	return code;
}

// -- check-convex ------------------------------------------------------------

int cmd_check_convex(const context& ctx, const std::string& path)
{
	const mcstab::scenario s = load(path);
	const mcstab::convexity_result r = mcstab::is_convex(s, ctx.limits);
	if (ctx.as_json)
	{
		json j{{"convex", r.convex}};
		if (r.counterexample)
		{
			j["counterexample"] = {one_based(r.counterexample->first.members()),
			                       one_based(r.counterexample->second.members())};
		}
		print_json(j);
	}
	else
	{
		std::cout << "convex: " << (r.convex ? "yes" : "no") << '\n';
		if (r.counterexample)
		{
			const auto& [a, b] = *r.counterexample;
			std::cout << "  v(S1) + v(S2) > v(S1 u S2) + v(S1 n S2) for S1 = " << set_text(a.members())
			          << ", S2 = " << set_text(b.members()) << '\n';
		}
	}
	return exit_ok;
}

// -- check-dc ----------------------------------------------------------------

int cmd_check_dc(const context& ctx, const std::string& path, const std::string& partition_text)
{
	const mcstab::scenario s = load(path);
	const mcstab::partition p(parse_blocks(partition_text), s.users());
	const mcstab::dc_verdict r = mcstab::is_dc_stable(s, p, ctx.limits);
	json j{{"partition", blocks_json(p.blocks())}, {"stable", r.stable}};
	std::string detail;
	if (r.counterexample)
	{
		const auto& c = *r.counterexample;
		json w;
		if (const auto* col = std::get_if<mcstab::collection>(&c.witness))
		{
			w = blocks_json(col->parts());
			detail = "splitting into " + blocks_text(col->parts());
		}
		else
		{
			const auto& co = std::get<mcstab::coalition>(c.witness);
			w = one_based(co.members());
			detail = "coalition " + set_text(co.members()) + " across blocks";
		}
		j["counterexample"] = {{"kind", mcstab::to_string(c.kind)},
		                       {"witness", w},
		                       {"keep", c.lhs},
		                       {"deviate", c.rhs}};
		detail += ": keeps " + num(c.lhs) + " by staying, gets " + num(c.rhs) + " by deviating";
	}
	if (ctx.as_json)
	{
		print_json(j);
	}
	else
	{
		std::cout << "partition " << blocks_text(p.blocks()) << ": "
		          << (r.stable ? "D_c-stable" : "NOT D_c-stable") << '\n';
		if (r.counterexample)
		{
			std::cout << "  " << mcstab::to_string(r.counterexample->kind) << ", " << detail << '\n';
		}
	}
	return exit_ok;
}

// -- best-partition ----------------------------------------------------------

int cmd_best_partition(const context& ctx, const std::string& path)
{
	const mcstab::scenario s = load(path);
	const mcstab::best_partition_result r = mcstab::best_partition_bruteforce(s, ctx.limits);
	if (ctx.as_json)
	{
		print_json({{"partition", blocks_json(r.best.blocks())},
		            {"value", r.value},
		            {"partitions_scanned", r.partitions_scanned}});
	}
	else
	{
		std::cout << "best partition: " << blocks_text(r.best.blocks()) << '\n'
		          << "  total value " << num(r.value) << " over " << r.partitions_scanned
		          << " partitions\n";
	}
	return exit_ok;
}

// -- gen ---------------------------------------------------------------------

int cmd_gen(std::uint64_t seed, std::size_t n, bool banded, const std::string& rates_text,
            const std::string& out_path)
{
	mcstab::rate_rule rule;
	if (banded)
	{
		if (!rates_text.empty())
		{
			throw usage_error("--banded and --rates are mutually exclusive");
		}
		rule = mcstab::banded_rates{};
	}
	else if (!rates_text.empty())
	{
		std::vector<double> rates;
		std::stringstream in(rates_text);
		std::string item;
		while (std::getline(in, item, ','))
		{
			try
			{
				rates.push_back(std::stod(item));
			}
			catch (const std::exception&)
			{
				throw usage_error("'" + item + "' is not a rate");
			}
		}
		rule = mcstab::explicit_rates{rates};
	}
	else
	{
		std::vector<double> rates = mcstab::default_rates();
		if (n > rates.size())
		{
			throw usage_error("without --rates or --banded at most " + std::to_string(rates.size())
			                  + " users can be generated");
		}
		rates.resize(n);
		rule = mcstab::explicit_rates{rates};
	}
	const mcstab::scenario s = mcstab::generate_scenario(seed, n, rule);
	const std::string text = mcstab::to_json(s).dump(2) + "\n";
	if (out_path.empty())
	{
		std::cout << text;
	}
	else
	{
		std::ofstream out(out_path);
		if (!(out << text))
		{
			throw std::runtime_error("cannot write " + out_path);
		}
	}
	return exit_ok;
}

// -- sweep -------------------------------------------------------------------

int cmd_sweep(const context& ctx, const std::string& spec_path, std::string out_path,
              const std::string& format_name)
{
	mcstab::sweep_spec spec = mcstab::load_sweep_spec(spec_path);
	spec.limits = ctx.limits;
	const auto format = format_name == "jsonl" ? mcstab::output_format::jsonl : mcstab::output_format::csv;
	if (std::filesystem::is_directory(out_path))
	{
		out_path = (std::filesystem::path(out_path)
		            / mcstab::default_output_name(spec.axis, format_name))
		               .string();
	}
	const auto rows = mcstab::run_sweep(spec);
	std::ofstream out(out_path);
	if (!out)
	{
		throw std::runtime_error("cannot write " + out_path);
	}
	mcstab::emit_results(out, mcstab::sweep_columns(spec), rows, format);
	if (ctx.as_json)
	{
		print_json({{"output", out_path}, {"rows", rows.size()}, {"columns", mcstab::sweep_columns(spec)}});
	}
	else
	{
		std::cout << "wrote " << rows.size() << " rows to " << out_path << '\n';
	}
	return exit_ok;
}

void report_error(const context& ctx, const std::string& kind, const std::string& message)
{
	if (ctx.as_json)
	{
		print_json({{"error", kind}, {"message", message}});
	}
	else
	{
		std::cerr << "error: " << message << '\n';
	}
}

} // namespace

int main(int argc, char** argv)
{
	CLI::App app{"Coalition stability analysis for cooperative wireless multicast"};
	app.require_subcommand(1);
	app.fallthrough();
	context ctx;
	app.add_flag("--json", ctx.as_json, "Machine-readable output");

	std::string file;
	std::string members;
	std::string method = "both";
	std::string partition_text;
	std::uint64_t seed = 0;
	std::size_t n = 0;
	bool banded = false;
	std::string rates_text;
	std::string out_path;
	std::string spec_path;
	std::string format_name = "csv";

	auto* validate = app.add_subcommand("validate", "Check a scenario file");
	validate->add_option("file", file, "Scenario file")->required();

	auto* value = app.add_subcommand("value", "Value of a coalition");
	value->add_option("file", file, "Scenario file")->required();
	value->add_option("--coalition", members, "Users, e.g. 1,2,5")->required();

	auto* core = app.add_subcommand("check-core", "Decide whether the core is non-empty");
	core->add_option("file", file, "Scenario file")->required();
	core->add_option("--method", method, "lp, theorems or both")
		->check(CLI::IsMember({"lp", "theorems", "both"}));

	auto* convex = app.add_subcommand("check-convex", "Check convexity of the game");
	convex->add_option("file", file, "Scenario file")->required();

	auto* dc = app.add_subcommand("check-dc", "Check D_c-stability of a partition");
	dc->add_option("file", file, "Scenario file")->required();
	dc->add_option("--partition", partition_text, "Blocks, e.g. \"1,2;3,4\"")->required();

	auto* thms = app.add_subcommand("theorems", "Evaluate the closed-form conditions");
	thms->add_option("file", file, "Scenario file")->required();
	thms->add_option("--partition", partition_text, "Partition for the banded condition");

	auto* best = app.add_subcommand("best-partition", "Welfare-maximizing partition by enumeration");
	best->add_option("file", file, "Scenario file")->required();

	auto* gen = app.add_subcommand("gen", "Generate a random scenario");
	gen->add_option("--seed", seed, "Generator seed")->required();
	gen->add_option("--n", n, "Number of users")->required()->check(CLI::Range(1, 62));
	gen->add_flag("--banded", banded, "Banded rate rule");
	gen->add_option("--rates", rates_text, "Explicit comma-separated rates");
	gen->add_option("--out", out_path, "Output file (default: standard output)");

	auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep");
	sweep->add_option("--spec", spec_path, "Sweep specification file")->required();
	sweep->add_option("--out", out_path, "Output file or directory")->required();
	sweep->add_option("--format", format_name, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));

	try
	{
		app.parse(argc, argv);
	}
	catch (const CLI::CallForHelp& e)
	{
		return app.exit(e);
	}
	catch (const CLI::CallForAllHelp& e)
	{
		return app.exit(e);
	}
	catch (const CLI::ParseError& e)
	{
		std::cerr << "error: " << e.what() << "\n\n" << app.help();
		return exit_usage;
	}

	try
	{
		ctx.limits = mcstab::enumeration_limits::from_environment();
		if (validate->parsed()) return cmd_validate(ctx, file);
		if (value->parsed()) return cmd_value(ctx, file, members);
		if (core->parsed()) return cmd_check_core(ctx, file, method);
		if (convex->parsed()) return cmd_check_convex(ctx, file);
		if (dc->parsed()) return cmd_check_dc(ctx, file, partition_text);
		if (thms->parsed()) return cmd_theorems(ctx, file, partition_text);
		if (best->parsed()) return cmd_best_partition(ctx, file);
		if (gen->parsed()) return cmd_gen(seed, n, banded, rates_text, out_path);
		if (sweep->parsed()) return cmd_sweep(ctx, spec_path, out_path, format_name);
	}
	catch (const usage_error& e)
	{
		report_error(ctx, "usage", e.what());
		return exit_usage;
	}
	catch (const mcstab::invalid_input& e)
	{
		report_error(ctx, "invalid_input", e.what());
		return exit_usage;
	}
	catch (const mcstab::size_limit& e)
	{
		report_error(ctx, "size_limit", e.what());
		return exit_limit;
	}
	catch (const mcstab::solver_stall& e)
	{
		report_error(ctx, "solver_stall", e.what());
		return exit_limit;
	}
	catch (const std::exception& e)
	{
		report_error(ctx, "failure", e.what());
		return exit_usage;
	}
	return exit_usage;
}
