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

#include <mcstab/io.hpp>

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

namespace {

const std::string cli = MCSTAB_CLI_PATH;
const std::filesystem::path samples = MCSTAB_SAMPLES_DIR;

struct run_result
{
	int code;
	std::string out;
};

run_result run(const std::string& args, const std::string& env = "")
{
	const std::string command = env + " '" + cli + "' " + args + " 2>/dev/null";
	FILE* pipe = popen(command.c_str(), "r");
	if (pipe == nullptr)
	{
		return {-1, ""};
	}
	std::string out;
	std::array<char, 4096> buf;
	while (const std::size_t got = std::fread(buf.data(), 1, buf.size(), pipe))
	{
		out.append(buf.data(), got);
	}
	const int status = pclose(pipe);
	return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string sample(const std::string& name)
{
	return "'" + (samples / name).string() + "'";
}

bool contains(const std::string& haystack, const std::string& needle)
{
	return haystack.find(needle) != std::string::npos;
}

std::filesystem::path temp_dir()
{
	const auto dir = std::filesystem::temp_directory_path() / "mcstab_cli_test";
	std::filesystem::create_directories(dir);
	return dir;
}

} // namespace

TEST(Cli, SymmetricCoreIsNonEmptyWithWitness)
{
	const run_result r = run("check-core " + sample("symmetric.json"));
	EXPECT_EQ(r.code, 0);
	EXPECT_TRUE(contains(r.out, "core: NON-EMPTY (symmetric network condition + LP witness)")) << r.out;
	EXPECT_TRUE(contains(r.out, "witness: x1="));
}

TEST(Cli, ReferenceCoreIsEmptyByClosedForm)
{
	const run_result r = run("check-core " + sample("reference20.json"));
	EXPECT_EQ(r.code, 0);
	EXPECT_TRUE(contains(r.out, "core: EMPTY")) << r.out;
}

TEST(Cli, ZeroRateFailsValidationAndNamesTheUser)
{
	const run_result r = run("validate " + sample("bad_rate.json"));
	EXPECT_EQ(r.code, 1);
	EXPECT_TRUE(contains(r.out, "NonPositiveRate: rates, user 2")) << r.out;
	EXPECT_EQ(run("validate " + sample("reference20.json")).code, 0);
}

TEST(Cli, TheoremsOnReferenceNetwork)
{
	const run_result r = run("theorems " + sample("reference20.json"));
	EXPECT_EQ(r.code, 0);
	EXPECT_TRUE(contains(r.out, "second-minimum gap condition (core empty): HOLDS  [1.25 > 1.12281]")) << r.out;
	EXPECT_TRUE(contains(r.out, "max/min gap condition (core empty): HOLDS  [11 > 3.33333]")) << r.out;
}

TEST(Cli, JsonReportCarriesEveryDiagnostic)
{
	const run_result text = run("theorems " + sample("reference20.json"));
	const run_result r = run("--json theorems " + sample("reference20.json"));
	ASSERT_EQ(r.code, 0);
	const mcstab::json j = mcstab::json::parse(r.out);
	ASSERT_EQ(j["checks"].size(), 5u);
	for (const auto& c : j["checks"])
	{
		if (!c["applicable"].get<bool>())
		{
			EXPECT_TRUE(c.contains("reason"));
			continue;
		}
		EXPECT_TRUE(c.contains("lhs"));
		EXPECT_TRUE(c.contains("rhs"));
		EXPECT_TRUE(contains(text.out, mcstab::format_number(c["lhs"].get<double>())));
		EXPECT_TRUE(contains(text.out, mcstab::format_number(c["rhs"].get<double>())));
		for (const auto& [key, value] : c["diagnostics"].items())
		{
			EXPECT_TRUE(contains(text.out, key + "=" + mcstab::format_number(value.get<double>()))) << key;
		}
	}
	const auto& second = j["checks"][2];
	EXPECT_EQ(second["name"], "second_min_gap");
	EXPECT_DOUBLE_EQ(second["lhs"].get<double>(), 1.25);
	EXPECT_NEAR(second["rhs"].get<double>(), 1.12281, 1e-5);
	EXPECT_EQ(second["diagnostics"]["k"], 1.0);
}

TEST(Cli, JsonFlagAfterSubcommand)
{
	const run_result r = run("value " + sample("reference20.json") + " --coalition 16,17,18,19,20 --json");
	ASSERT_EQ(r.code, 0);
	const mcstab::json j = mcstab::json::parse(r.out);
	EXPECT_NEAR(j["value"].get<double>(), 474.45, 1e-9);
	EXPECT_EQ(j["coalition"], mcstab::json({16, 17, 18, 19, 20}));
}

TEST(Cli, JsonOutputIsByteIdenticalAcrossRuns)
{
	for (const std::string& args : {"--json check-core " + sample("symmetric.json"),
	                                "--json theorems " + sample("generated.json"),
	                                "--json best-partition " + sample("three_users.json")})
	{
		const run_result a = run(args);
		const run_result b = run(args);
		EXPECT_EQ(a.code, b.code);
		EXPECT_EQ(a.out, b.out) << args;
		EXPECT_FALSE(a.out.empty());
	}
}

TEST(Cli, UnknownFlagIsAUsageError)
{
	EXPECT_EQ(run("check-core " + sample("symmetric.json") + " --frobnicate").code, 1);
	EXPECT_EQ(run("").code, 1);
	EXPECT_EQ(run("check-core " + sample("symmetric.json") + " --method simplex").code, 1);
}

TEST(Cli, TheoremOnlyScreenCanBeInconclusive)
{
	const run_result r = run("check-core " + sample("three_users.json") + " --method theorems");
	// Equal receive powers and a wide rate spread: the max/min gap fires.
	EXPECT_EQ(r.code, 0);
	const auto dir = temp_dir();
	std::ofstream(dir / "mixed.json") << R"({"rates": [50, 52, 55], "valuations": [90, 90, 90],
		"rx_powers": [0.2, 0.3, 0.4], "tx_power": 2, "a": 5, "b": 1.5, "w": 0.5, "file_size": 10})";
	const std::string mixed = "'" + (dir / "mixed.json").string() + "'";
	const run_result open = run("check-core " + mixed + " --method theorems");
	EXPECT_EQ(open.code, 2);
	EXPECT_TRUE(contains(open.out, "UNDETERMINED")) << open.out;
	EXPECT_EQ(run("check-core " + mixed).code, 0);
}

TEST(Cli, EnumerationCapFromEnvironment)
{
	EXPECT_EQ(run("check-convex " + sample("three_users.json"), "MCSTAB_ENUM_CAP=2").code, 3);
	EXPECT_EQ(run("check-convex " + sample("three_users.json"), "MCSTAB_ENUM_CAP=3").code, 0);
	EXPECT_EQ(run("check-convex " + sample("three_users.json"), "MCSTAB_ENUM_CAP=lots").code, 1);
	EXPECT_EQ(run("check-core " + sample("generated.json") + " --method lp").code, 3);
}

TEST(Cli, DcCheckReportsCounterexampleWithOneBasedUsers)
{
	const run_result r = run("--json check-dc " + sample("three_users.json") + " --partition '1;2;3'");
	ASSERT_EQ(r.code, 0);
	const mcstab::json j = mcstab::json::parse(r.out);
	EXPECT_FALSE(j["stable"].get<bool>());
	EXPECT_EQ(j["counterexample"]["kind"], "IncompatibleCoalition");
	EXPECT_EQ(j["counterexample"]["witness"], mcstab::json({2, 3}));
	EXPECT_EQ(run("check-dc " + sample("three_users.json") + " --partition '1;2;3;4'").code, 1);
	EXPECT_EQ(run("check-dc " + sample("three_users.json") + " --partition '0;1,2'").code, 1);
	const run_result ok = run("check-dc " + sample("three_users.json") + " --partition '1;2,3'");
	EXPECT_TRUE(contains(ok.out, ": D_c-stable")) << ok.out;
}

TEST(Cli, BestPartitionAndConvexity)
{
	const run_result best = run("best-partition " + sample("three_users.json"));
	EXPECT_EQ(best.code, 0);
	EXPECT_TRUE(contains(best.out, "best partition: {1} {2,3}")) << best.out;
	const run_result convex = run("--json check-convex " + sample("symmetric.json"));
	EXPECT_EQ(mcstab::json::parse(convex.out)["convex"], true);
}

TEST(Cli, GenIsDeterministicAndValid)
{
	const auto dir = temp_dir();
	const auto path = dir / "gen.json";
	const run_result a = run("gen --seed 99 --n 20 --banded");
	const run_result b = run("gen --seed 99 --n 20 --banded --out '" + path.string() + "'");
	EXPECT_EQ(a.code, 0);
	EXPECT_EQ(b.code, 0);
	std::ifstream in(path);
	const std::string written((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
	EXPECT_EQ(a.out, written);
	const mcstab::validation_result r = mcstab::load_scenario(path);
	ASSERT_TRUE(r.ok());
	EXPECT_TRUE(*r.value == mcstab::generate_scenario(99, 20, mcstab::banded_rates{}));
	EXPECT_EQ(run("gen --seed 1 --n 21").code, 1);
	EXPECT_EQ(run("gen --seed 1 --n 3 --rates 5,6,7").code, 0);
}

TEST(Cli, SweepWritesConventionalFile)
{
	const auto dir = temp_dir() / "sweeps";
	std::filesystem::remove_all(dir);
	std::filesystem::create_directories(dir);
	const run_result r = run("sweep --spec " + sample("fig7_file_size.json") + " --out '" + dir.string() + "'");
	ASSERT_EQ(r.code, 0) << r.out;
	std::ifstream in(dir / "fig7_file_size.csv");
	std::string header;
	std::getline(in, header);
	EXPECT_EQ(header, "file_size,grand,partition,singletons,core_nonempty");

	const run_result jl = run("sweep --spec " + sample("fig4_tx_power.json") + " --format jsonl --out '"
	                          + (dir / "tx.jsonl").string() + "'");
	EXPECT_EQ(jl.code, 0);
	std::ifstream lines(dir / "tx.jsonl");
	std::string first;
	std::getline(lines, first);
	EXPECT_TRUE(mcstab::json::parse(first).contains("tx_power"));
}
