#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "covertime/chain_io.hpp"
#include "covertime/cli.hpp"
#include "support/chains.hpp"

using namespace covertime;
namespace ct = covertime::testing;
namespace fs = std::filesystem;

namespace {

const std::string kChainsDir = COVERTIME_CHAINS_DIR;

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string write_temp(const std::string& name, const std::string& content) {
    const fs::path path = fs::temp_directory_path() / name;
    std::ofstream file(path);
    file << content;
    return path.string();
}

}  // namespace

TEST_CASE("shipped chain files parse to the expected chains") {
    CHECK(load_chain_file(kChainsDir + "/two_state_r2.json") == ct::two_state(Rational(2)));
    CHECK(load_chain_file(kChainsDir + "/three_state_loop.json") == ct::three_state_loop());
    CHECK(load_chain_file(kChainsDir + "/seven_state_one_way.json") ==
          ct::seven_state_one_way());
    CHECK(load_chain_file(kChainsDir + "/cycle3.json") == ct::cycle3());
    CHECK(load_chain_file(kChainsDir + "/single_state.json") == ct::single_state());
}

TEST_CASE("cover subcommand prints the exact value and a 12-digit decimal") {
    const auto r = run_cli({"cover", kChainsDir + "/two_state_r2.json", "--k", "1", "--start", "1"});
    CHECK(r.code == 0);
    CHECK(r.out == "2\n2.000000000000\n");
    CHECK(r.err.empty());
}

TEST_CASE("cover subcommand reports the infinite regime with exit code 0") {
    const auto r =
        run_cli({"cover", kChainsDir + "/seven_state_one_way.json", "--k", "1", "--start", "a"});
    CHECK(r.code == 0);
    CHECK(r.out == "infinite\n");
}

TEST_CASE("cover with two walks") {
    const auto r =
        run_cli({"cover", kChainsDir + "/two_state_r2.json", "--k", "2", "--start", "1,1"});
    CHECK(r.code == 0);
    CHECK(r.out == "4/3\n1.333333333333\n");
}

TEST_CASE("hit subcommand prints membership, exact value and decimal") {
    const auto r = run_cli(
        {"hit", kChainsDir + "/seven_state_one_way.json", "--from", "x", "--targets", "f"});
    CHECK(r.code == 0);
    CHECK(r.out == "x ∈ B({f})\n9\n9.000000000000\n");

    const auto outside = run_cli(
        {"hit", kChainsDir + "/seven_state_one_way.json", "--from", "a", "--targets", "x"});
    CHECK(outside.code == 0);  // a definite negative answer is still an answer
    CHECK(outside.out == "a ∉ B({x})\n");
}

TEST_CASE("validate subcommand") {
    const auto ok = run_cli({"validate", kChainsDir + "/seven_state_one_way.json"});
    CHECK(ok.code == 0);
    CHECK(ok.out == "valid: 7 states, 11 transitions\n");

    const std::string bad = write_temp("covertime_bad_rowsum.json",
                                       R"({"transitions": [["a","a","9/10"]]})");
    const auto invalid = run_cli({"validate", bad});
    CHECK(invalid.code == 2);
    CHECK(invalid.err.find("sum to 9/10") != std::string::npos);

    const std::string garbage = write_temp("covertime_garbage.json", "{not json");
    CHECK(run_cli({"validate", garbage}).code == 1);
    CHECK(run_cli({"validate", "/nonexistent/chain.json"}).code == 1);
}

TEST_CASE("usage errors exit with code 1") {
    CHECK(run_cli({}).code == 1);
    CHECK(run_cli({"frobnicate"}).code == 1);
    CHECK(run_cli({"cover", kChainsDir + "/two_state_r2.json"}).code == 1);  // --start missing
    CHECK(run_cli({"--help"}).code == 0);
}

TEST_CASE("domain errors exit with code 2") {
    CHECK(run_cli({"cover", kChainsDir + "/two_state_r2.json", "--k", "1", "--start", "nope"})
              .code == 2);
    CHECK(run_cli({"cover", kChainsDir + "/two_state_r2.json", "--k", "2", "--start", "1"})
              .code == 2);
    CHECK(run_cli({"hit", kChainsDir + "/two_state_r2.json", "--from", "1", "--targets", ""})
              .code == 2);
}

TEST_CASE("exceeding the state budget exits with code 3") {
    const auto r = run_cli({"cover", kChainsDir + "/three_state_loop.json", "--k", "1",
                            "--start", "1", "--budget", "3"});
    CHECK(r.code == 3);
}

TEST_CASE("aux-export writes a deterministic DOT file") {
    const fs::path dot_path = fs::temp_directory_path() / "covertime_aux.dot";
    const auto r = run_cli({"aux-export", kChainsDir + "/three_state_loop.json", "--k", "1",
                            "--start", "1", "--out", dot_path.string()});
    CHECK(r.code == 0);
    CHECK(r.out == "wrote " + dot_path.string() + " (6 states, 3 targets)\n");

    std::ifstream in(dot_path);
    std::stringstream content;
    content << in.rdbuf();
    CHECK(content.str().find("digraph aux_chain {") == 0);
    CHECK(content.str().find("peripheries=2") != std::string::npos);
}

TEST_CASE("simulate subcommands are reproducible byte for byte") {
    const std::vector<std::string> args{"simulate", "cover",
                                        kChainsDir + "/two_state_r2.json",
                                        "--k", "1", "--start", "1",
                                        "--trials", "20000", "--seed", "5", "--max-steps", "1000"};
    const auto a = run_cli(args);
    const auto b = run_cli(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.find("mean: ") == 0);
    CHECK(a.out.find("truncated: 0\n") != std::string::npos);

    const auto h = run_cli({"simulate", "hit", kChainsDir + "/cycle3.json", "--from", "1",
                            "--targets", "3", "--trials", "500", "--seed", "1", "--max-steps",
                            "100"});
    CHECK(h.code == 0);
    CHECK(h.out.find("mean: 2\n") == 0);
}

TEST_CASE("simulate reports the all-truncated regime as a domain error") {
    const auto r = run_cli({"simulate", "cover", kChainsDir + "/seven_state_one_way.json",
                            "--k", "1", "--start", "a", "--trials", "20", "--seed", "3",
                            "--max-steps", "10000"});
    CHECK(r.code == 2);
    CHECK(r.err.find("step cap") != std::string::npos);
}

TEST_CASE("json output round-trips rationals and carries the schema") {
    const auto r = run_cli({"cover", kChainsDir + "/two_state_r2.json", "--k", "1", "--start",
                            "1", "--json"});
    CHECK(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["command"] == "cover");
    CHECK(doc["result"]["infinite"] == false);
    CHECK(parse_rational(doc["result"]["rational"].get<std::string>()) == Rational(2));
    CHECK(doc["result"]["decimal"] == "2.000000000000");

    const auto inf = run_cli({"cover", kChainsDir + "/seven_state_one_way.json", "--k", "1",
                              "--start", "b", "--json"});
    const auto inf_doc = nlohmann::json::parse(inf.out);
    CHECK(inf_doc["result"]["infinite"] == true);
    CHECK(inf_doc["result"]["rational"].is_null());

    const auto hit = run_cli({"hit", kChainsDir + "/two_state_r2.json", "--from", "1",
                              "--targets", "2", "--json"});
    const auto hit_doc = nlohmann::json::parse(hit.out);
    CHECK(hit_doc["result"]["in_finite_set"] == true);
    CHECK(parse_rational(hit_doc["result"]["rational"].get<std::string>()) == Rational(2));
}

TEST_CASE("json output reports errors as structured objects") {
    const std::string bad = write_temp("covertime_bad_rowsum2.json",
                                       R"({"transitions": [["a","a","1/3"]]})");
    const auto r = run_cli({"validate", bad, "--json"});
    CHECK(r.code == 2);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["error"]["type"] == "RowSumMismatch");
}

TEST_CASE("identical invocations produce byte-identical stdout") {
    const std::vector<std::string> args{"hit", kChainsDir + "/three_state_loop.json",
                                        "--from", "1", "--targets", "3", "--json"};
    CHECK(run_cli(args).out == run_cli(args).out);
}
