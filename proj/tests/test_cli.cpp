#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("cpdptw_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

Outcome run(const std::string& args, const fs::path& dir) {
    const fs::path out = dir / "stdout.txt", err = dir / "stderr.txt";
    const std::string cmd = "cd '" + dir.string() + "' && CPDPTW_LOG=quiet '" CPDPTW_CLI_PATH "' " + args + " >'" +
                            out.string() + "' 2>'" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    Outcome r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

void write_scenario(const fs::path& p, int customers, const std::string& solver, const std::string& out_dir) {
    nlohmann::json j = {{"format_version", 1},
                        {"seed", 3},
                        {"instance", {{"generate", {{"customers", customers}, {"depots", 1}, {"area_km", 3.0}, {"profile", "uniform"}}}}},
                        {"fleet", {{"uav", 1}, {"adr", 1}}},
                        {"solver", solver},
                        {"output_dir", out_dir}};
    std::ofstream(p) << j.dump(2);
}

}  // namespace

TEST(Cli, ToyPrintsTheWorkedFigures) {
    const auto dir = scratch("toy");
    const Outcome r = run("toy --out toy", dir);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("14.12"), std::string::npos);
    EXPECT_NE(r.out.find("6.80"), std::string::npos);
    EXPECT_NE(r.out.find("5.40"), std::string::npos);
    const auto j = nlohmann::json::parse(slurp(dir / "toy" / "toy.json"));
    EXPECT_TRUE(j.contains("figures"));
    EXPECT_TRUE(fs::exists(dir / "toy" / "toy.txt"));
}

TEST(Cli, SolvesASingleCustomerScenario) {
    const auto dir = scratch("solve1");
    write_scenario(dir / "one.json", 1, "both", "res");
    const Outcome r = run("solve --scenario one.json", dir);
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(slurp(dir / "res" / "solve.json"));
    EXPECT_TRUE(j["exact"]["proven_optimal"].get<bool>());
    EXPECT_TRUE(j["exact"]["solution"]["complete"].get<bool>());
    EXPECT_NEAR(j["exact"]["solution"]["cost"]["total"].get<double>(),
                j["heuristic"]["solution"]["cost"]["total"].get<double>(), 1e-9);
    const std::string csv = slurp(dir / "res" / "solution_exact.csv");
    EXPECT_EQ(csv.rfind("vehicle,node,kind,arrival,departure,battery,load", 0), 0u);
    EXPECT_TRUE(fs::exists(dir / "res" / "solution_heuristic.csv"));
}

TEST(Cli, CoalitionSweepWritesTableAndSummary) {
    const auto dir = scratch("coalition");
    write_scenario(dir / "s.json", 3, "exact", "co");
    const Outcome r = run("coalition --scenario s.json --m 2 --n 1", dir);
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string csv = slurp(dir / "co" / "coalition.csv");
    EXPECT_EQ(csv.rfind("d,r,C,gain,core_nonempty\n", 0), 0u);
    int lines = 0;
    for (char c : csv) lines += c == '\n';
    EXPECT_EQ(lines, 1 + 2 * 1);  // header plus one row per (d, r) with d <= 2, r <= 1
    EXPECT_FALSE(slurp(dir / "co" / "coalition_summary.txt").empty());
}

TEST(Cli, MalformedScenarioReportsStructuredError) {
    const auto dir = scratch("bad");
    std::ofstream(dir / "bad.json") << R"({"format_version": 1, "seed": "three"})";
    const Outcome r = run("solve --scenario bad.json", dir);
    EXPECT_NE(r.code, 0);
    const auto pos = r.err.find("error: ");
    ASSERT_NE(pos, std::string::npos) << r.err;
    const auto j = nlohmann::json::parse(r.err.substr(pos + 7));
    EXPECT_EQ(j["type"], "parse");
    EXPECT_FALSE(j["field"].get<std::string>().empty());
    EXPECT_FALSE(j["message"].get<std::string>().empty());

    std::ofstream(dir / "broken.json") << "{ not json";
    EXPECT_NE(run("solve --scenario broken.json", dir).code, 0);
}

TEST(Cli, UsageErrorsExitWithTwo) {
    const auto dir = scratch("usage");
    EXPECT_EQ(run("solve --solver fastest", dir).code, 2);
    EXPECT_EQ(run("no-such-command", dir).code, 2);
}

TEST(Cli, RunsAreReproducible) {
    const auto dir = scratch("repro");
    write_scenario(dir / "s.json", 4, "both", "a");
    write_scenario(dir / "t.json", 4, "both", "b");
    ASSERT_EQ(run("solve --scenario s.json", dir).code, 0);
    ASSERT_EQ(run("solve --scenario t.json", dir).code, 0);
    for (const char* f : {"solve.json", "solution_exact.csv", "solution_heuristic.csv"})
        EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
    ASSERT_EQ(run("rollout --scenario s.json --out ra", dir).code, 0);
    ASSERT_EQ(run("rollout --scenario s.json --out rb", dir).code, 0);
    EXPECT_EQ(slurp(dir / "ra" / "rollout.csv"), slurp(dir / "rb" / "rollout.csv"));
    EXPECT_EQ(slurp(dir / "ra" / "rollout.json"), slurp(dir / "rb" / "rollout.json"));
}

TEST(Cli, GenWritesInstanceToStdout) {
    const auto dir = scratch("gen");
    const Outcome r = run("gen --customers 3 --depots 2 --seed 5", dir);
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["customers"].size(), 3u);
    EXPECT_EQ(j["depots"].size(), 2u);
    EXPECT_EQ(run("gen --customers 3 --depots 2 --seed 5", dir).out, r.out);
}
