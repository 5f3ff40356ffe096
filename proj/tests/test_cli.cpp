#include "lomboost/cli.hpp"
#include "lomboost/data.hpp"
#include "lomboost/report.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace lomboost;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), {});
}

struct Scratch {
    fs::path dir;
    Scratch() : dir(fs::temp_directory_path() / "lomboost_cli_test") {
        fs::remove_all(dir);
        fs::create_directories(dir);
        write_sparse_file(dir / "data.svm", synthetic_hierarchical(6, 12, 300, 0.2, 4));
    }
    ~Scratch() { fs::remove_all(dir); }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("train writes tree, trace and manifest") {
    Scratch s;
    auto r = run({"train", "--data", s.path("data.svm"), "--splits", "7", "--lr", "0.5", "--epochs",
                  "5", "--seed", "1", "--out", s.path("run")});
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("test error: ", 0) == 0);
    CHECK(fs::exists(s.dir / "run" / "tree"));
    CHECK(fs::exists(s.dir / "run" / "trace.csv"));
    REQUIRE(fs::exists(s.dir / "run" / "manifest"));

    const auto m = nlohmann::json::parse(slurp(s.dir / "run" / "manifest"));
    CHECK(m["command"] == "train");
    CHECK(m["seed"] == 1);
    CHECK(m["config"]["splits"] == 7);
    CHECK(m["dataset"]["size"] == 300);
    CHECK(m["dataset"]["k"] == 6);
    CHECK(m["dataset"]["d"] == 12);
    CHECK(m["dataset"]["fnv1a64"].get<std::string>().size() == 16);
    CHECK(m["artifacts"]["trace"] == "trace.csv");

    std::istringstream trace(slurp(s.dir / "run" / "trace.csv"));
    CHECK(parse_trace_csv(trace).size() == 8);

    auto e = run({"evaluate", "--tree", s.path("run/tree"), "--data", s.path("data.svm")});
    CHECK(e.code == 0);
    CHECK(e.out.rfind("error: ", 0) == 0);
}

TEST_CASE("zero splits leaves a single trace record") {
    Scratch s;
    REQUIRE(run({"train", "--data", s.path("data.svm"), "--splits", "0", "--out", s.path("r0")}).code == 0);
    std::istringstream trace(slurp(s.dir / "r0" / "trace.csv"));
    CHECK(parse_trace_csv(trace).size() == 1);
}

TEST_CASE("bad command lines exit with usage") {
    auto missing = run({"train", "--out", "x"});
    CHECK(missing.code == 2);
    CHECK(missing.err.find("--data") != std::string::npos);
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"bounds", "--k", "2", "--gamma", "0.5", "--alpha", "x"}).code == 2);
    CHECK(run({"bounds", "--criterion", "nope", "--k", "2", "--gamma", "0.5", "--alpha", "1"}).code == 2);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("data errors exit with 1") {
    Scratch s;
    CHECK(run({"train", "--data", s.path("missing.svm"), "--out", s.path("x")}).code == 1);
    std::ofstream(s.dir / "bad.svm") << "1 2:1 1:1\n";
    auto bad = run({"train", "--data", s.path("bad.svm"), "--out", s.path("x")});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("line 1") != std::string::npos);
    CHECK(run({"train", "--data", s.path("data.svm"), "--lr", "-1", "--out", s.path("x")}).code == 1);
}

TEST_CASE("bounds command") {
    auto e = run({"bounds", "--criterion", "entropy", "--k", "2", "--gamma", "0.5", "--alpha", "0.693147"});
    CHECK(e.code == 0);
    CHECK(e.out == "4\n");
    auto top = run({"bounds", "--criterion", "gini", "--k", "2", "--gamma", "0.5", "--alpha", "1"});
    CHECK(top.out == "1\n");
    auto g = run({"bounds", "--criterion", "gini", "--k", "2", "--gamma", "0.5", "--alpha", "0.5"});
    CHECK(g.out == "3\n");
    auto zero = run({"bounds", "--criterion", "gini", "--k", "5", "--gamma", "0.2", "--alpha", "0"});
    CHECK(zero.out == "infinite\n");
    auto huge = run({"bounds", "--criterion", "gini", "--k", "100", "--gamma", "0.05", "--alpha", "0.01"});
    CHECK(huge.code == 0);
    CHECK(huge.out.rfind("astronomical: log2(t) = ", 0) == 0);

    auto gamma = run({"bounds", "--criterion", "entropy", "--k", "2", "--gamma", "0.7", "--alpha", "0.5"});
    CHECK(gamma.code == 1);
    auto alpha = run({"bounds", "--criterion", "mgini", "--k", "2", "--gamma", "0.5", "--alpha", "1"});
    CHECK(alpha.code == 1);
    CHECK(alpha.err.find("[1.73205081, 5.29150262]") != std::string::npos);

    auto all = run({"bounds", "--k", "10", "--gamma", "0.5", "--alpha", "1.75"});
    CHECK(all.code == 0);
    CHECK(all.out.find("entropy: ") != std::string::npos);
    CHECK(all.out.find("gini: ") != std::string::npos);
    CHECK(all.out.find("mgini: ") != std::string::npos);
}

TEST_CASE("verify command") {
    auto a = run({"verify", "--trials", "10", "--seed", "3"});
    auto b = run({"verify", "--trials", "10", "--seed", "3"});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    auto fault = run({"verify", "--trials", "1000", "--inject-fault", "modulus"});
    CHECK(fault.code == 1);
    CHECK(fault.out.find("FAIL") != std::string::npos);
    CHECK(fault.out.find("counterexample") != std::string::npos);
}

TEST_CASE("curves command") {
    Scratch s;
    REQUIRE(run({"train", "--data", s.path("data.svm"), "--splits", "4", "--epochs", "3", "--out",
                 s.path("run")})
                .code == 0);
    auto printed = run({"curves", "--trace", s.path("run/trace.csv")});
    CHECK(printed.code == 0);
    CHECK(printed.out.rfind(std::string(kCurvesHeader) + "\n0,1,1,1,1\n", 0) == 0);
    REQUIRE(run({"curves", "--trace", s.path("run/trace.csv"), "--out", s.path("curves.csv")}).code == 0);
    CHECK(slurp(s.dir / "curves.csv") == printed.out);
    CHECK(run({"curves", "--trace", s.path("nope.csv")}).code == 1);
}

TEST_CASE("replay reproduces a run byte for byte") {
    Scratch s;
    REQUIRE(run({"train", "--data", s.path("data.svm"), "--splits", "5", "--epochs", "4", "--lr-sweep",
                 "--seed", "9", "--out", s.path("a")})
                .code == 0);
    REQUIRE(run({"replay", "--manifest", s.path("a/manifest"), "--out", s.path("b")}).code == 0);
    CHECK(slurp(s.dir / "a" / "trace.csv") == slurp(s.dir / "b" / "trace.csv"));
    CHECK(slurp(s.dir / "a" / "tree") == slurp(s.dir / "b" / "tree"));
    CHECK(slurp(s.dir / "a" / "manifest") == slurp(s.dir / "b" / "manifest"));

    const auto m = nlohmann::json::parse(slurp(s.dir / "a" / "manifest"));
    CHECK(m["results"]["lr_sweep"].size() == 7);

    // Changing the data under a manifest is detected.
    write_sparse_file(s.dir / "data.svm", synthetic_hierarchical(6, 12, 300, 0.2, 5));
    auto changed = run({"replay", "--manifest", s.path("a/manifest"), "--out", s.path("c")});
    CHECK(changed.code == 1);
    CHECK(changed.err.find("fingerprint") != std::string::npos);
}

TEST_CASE("seed defaults to the environment") {
    Scratch s;
    ::setenv("LOMBOOST_SEED", "5", 1);
    const int code = run({"train", "--data", s.path("data.svm"), "--splits", "2", "--epochs", "2",
                          "--out", s.path("env")})
                         .code;
    ::setenv("LOMBOOST_SEED", "bogus", 1);
    const int bad = run({"train", "--data", s.path("data.svm"), "--out", s.path("bad")}).code;
    ::unsetenv("LOMBOOST_SEED");
    REQUIRE(code == 0);
    CHECK(nlohmann::json::parse(slurp(s.dir / "env" / "manifest"))["seed"] == 5);
    CHECK(bad == 2);
}

TEST_CASE("synth command") {
    Scratch s;
    REQUIRE(run({"synth", "--k", "4", "--d", "8", "--n", "40", "--noise", "0", "--out", s.path("s.svm")})
                .code == 0);
    CHECK(parse_sparse_file(s.path("s.svm")).examples == synthetic_hierarchical(4, 8, 40, 0.0, 1).examples);
    CHECK(run({"synth", "--k", "9", "--d", "8", "--out", s.path("t.svm")}).code == 1);
}
