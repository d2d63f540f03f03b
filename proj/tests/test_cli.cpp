#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "phaseret/commands.hpp"
#include "phaseret/io.hpp"

namespace fs = std::filesystem;
using phaseret::io::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "phaseret");
  std::ostringstream out, err;
  const int code = phaseret::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() / ("phaseret_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name, const std::string& text) const {
    const auto p = (path_ / name).string();
    std::ofstream(p) << text;
    return p;
  }
  std::string path(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

std::string slurp(const std::string& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json report_without_time(const std::string& p) {
  json j = json::parse(slurp(p));
  j.erase("wall_time_s");
  j.erase("command");
  return j;
}

const char* kTri = R"({"field": "real", "dim": 2, "vectors": [[1, 0], [0, 1], [1, 1]]})";
const char* kAxes = R"({"field": "real", "dim": 2, "vectors": [[1, 0], [0, 1]]})";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("check-cp") {
    TempDir d;
    const auto tri = run({"check-cp", d.file("tri.json", kTri)});
    CHECK(tri.code == 0);
    CHECK(tri.out == "holds\n");
    const auto axes = run({"check-cp", d.file("axes.json", kAxes)});
    CHECK(axes.code == 1);
    CHECK(axes.out.rfind("fails, I = {1}", 0) == 0);
    const auto four =
        run({"check-cp", d.file("four.json", R"({"field": "real", "dim": 3, "vectors": [[1,0,0],[0,1,0],[0,0,1],[1,1,0]]})")});
    CHECK(four.code == 1);
    CHECK(four.out == "fails, I = {1, 2, 4}, I^c = {3} (rank 2 vs 1)\n");
    CHECK(run({"check-cp", d.file("bad.json", "{\"field\": ")}).code == 2);
    CHECK(run({"check-cp", d.path("missing.json")}).code == 2);
    CHECK(run({"check-cp", d.file("tri.csv", "1,0\n0,1\n1,1\n")}).code == 0);
    const auto cap = run({"check-cp", "--cap", "2", d.file("tri2.json", kTri)});
    CHECK(cap.code == 2);
    CHECK(cap.err.find("cap") != std::string::npos);
  }

  TEST_CASE("check-spark") {
    TempDir d;
    const auto gen = run({"gen", "--kind", "full-spark", "--n", "3", "--m", "5", "--out", d.path("v.json")});
    REQUIRE(gen.code == 0);
    CHECK(gen.out.find("full spark holds") != std::string::npos);
    CHECK(run({"check-spark", d.path("v.json")}).code == 0);
    const auto dup = run({"check-spark", d.file("dup.json", R"({"field": "real", "dim": 2, "vectors": [[1,2],[0,1],[1,2]]})")});
    CHECK(dup.code == 1);
    CHECK(dup.out.find("{1, 3}") != std::string::npos);
    CHECK(run({"check-spark", d.file("short.json", R"({"field": "real", "dim": 3, "vectors": [[1,0,0]]})")}).code == 2);
  }

  TEST_CASE("falsify") {
    TempDir d;
    const auto axes = d.file("axes.json", R"({"field": "real", "dim": 2, "projections": [[[1,0],[0,0]], [[0,0],[0,1]]]})");
    const auto r = run({"falsify", axes, "--report", d.path("r.json")});
    CHECK(r.code == 1);
    const json rep = json::parse(slurp(d.path("r.json")));
    CHECK(rep["exit_code"] == 1);
    CHECK(rep["subcommand"] == "falsify");
    const auto& w = rep["result"]["verdict"]["witness"];
    REQUIRE(w.is_object());
    // e1 + e2 and e1 - e2, in either order and sign.
    for (const char* key : {"u", "v"})
      for (const auto& e : w[key]) CHECK(std::abs(std::abs(e.get<double>()) - 1.0) < 1e-12);

    CHECK(run({"falsify", d.file("tri.json", kTri)}).code == 0);
    CHECK(run({"falsify", "--mode", "pr", d.file("tri2.json", kTri)}).code == 3);

    const auto bad = run({"falsify", d.file("bad.json", R"({"field": "real", "dim": 2, "projections": [[[1,0],[0,0]], [[1,1],[0,0]]]})")});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("projection 2") != std::string::npos);
    CHECK(bad.err.find("residual") != std::string::npos);
    CHECK(run({"falsify", "--mode", "nope", axes}).code == 2);
  }

  TEST_CASE("counterexample end to end") {
    TempDir d;
    const auto g = run({"gen", "--kind", "counterexample", "--n", "2", "--out", d.path("ce.json")});
    REQUIRE(g.code == 0);
    CHECK(g.out.find("1000/1000") != std::string::npos);
    const json ce = json::parse(slurp(d.path("ce.json")));
    CHECK(ce["witness"]["max_mismatch"].get<double>() < 1e-9);
    CHECK(ce["witness"]["phase_gap"].get<double>() > 0.1);
    CHECK(run({"falsify", "--mode", "pr", d.path("ce.json")}).code == 1);
    CHECK(run({"verify-witness", d.path("ce.json"), d.path("ce.json")}).code == 0);
    const auto same = d.file("same.json", R"({"u": [[1,0],[0,0]], "v": [[0,1],[0,0]]})");
    CHECK(run({"verify-witness", d.path("ce.json"), same}).code == 1);
  }

  TEST_CASE("gen random-proj is reproducible and re-parses") {
    TempDir d;
    REQUIRE(run({"gen", "--kind", "random-proj", "--n", "3", "--ranks", "2,2", "--seed", "7", "--out", d.path("a.json")}).code == 0);
    REQUIRE(run({"gen", "--kind", "random-proj", "--n", "3", "--ranks", "2,2", "--seed", "7", "--out", d.path("b.json")}).code == 0);
    REQUIRE(run({"gen", "--kind", "random-proj", "--n", "3", "--ranks", "2,2", "--seed", "8", "--out", d.path("c.json")}).code == 0);
    CHECK(slurp(d.path("a.json")) == slurp(d.path("b.json")));
    CHECK(slurp(d.path("a.json")) != slurp(d.path("c.json")));
    CHECK(run({"falsify", d.path("a.json")}).code == 1);
    CHECK(run({"gen", "--kind", "random-proj", "--n", "3", "--ranks", "4"}).code == 2);
    CHECK(run({"gen", "--kind", "counterexample", "--n", "1"}).code == 2);
    CHECK(run({"gen", "--kind", "widget", "--n", "3"}).code == 2);
  }

  TEST_CASE("seed fallback and report determinism") {
    TempDir d;
    const auto fam = d.file("p.json", R"({"field": "complex", "dim": 2, "vectors": [[1,0],[0,1],[1,1]]})");
    ::setenv("PHASERET_SEED", "41", 1);
    REQUIRE(run({"falsify", "--mode", "pr", fam, "--report", d.path("r1.json")}).code == 1);
    REQUIRE(run({"falsify", "--mode", "pr", fam, "--report", d.path("r2.json")}).code == 1);
    ::unsetenv("PHASERET_SEED");
    REQUIRE(run({"falsify", "--mode", "pr", fam, "--seed", "41", "--report", d.path("r3.json")}).code == 1);
    const json a = report_without_time(d.path("r1.json"));
    CHECK(a["config"]["seed"] == 41);
    CHECK(a.dump() == report_without_time(d.path("r2.json")).dump());
    CHECK(a["result"].dump() == report_without_time(d.path("r3.json"))["result"].dump());
    ::setenv("PHASERET_SEED", "abc", 1);
    CHECK(run({"falsify", fam}).code == 2);
    ::unsetenv("PHASERET_SEED");
  }

  TEST_CASE("survey") {
    const auto real = run({"survey", "--n", "2", "--m", "2:3", "--trials", "100", "--field", "real"});
    REQUIRE(real.code == 0);
    std::istringstream in(real.out);
    std::string header, row2, row3;
    std::getline(in, header);
    std::getline(in, row2);
    std::getline(in, row3);
    CHECK(header == "n,m,field,trials,rate,mean_runtime,note");
    CHECK(row2.rfind("2,2,real,100,0.000000,", 0) == 0);
    CHECK(row3.rfind("2,3,real,100,1.000000,", 0) == 0);

    const auto cx = run({"survey", "--n", "2", "--m", "3", "--trials", "20", "--field", "complex", "--restarts", "8"});
    REQUIRE(cx.code == 0);
    CHECK(cx.out.find("2,3,complex,20,1.000000,") != std::string::npos);

    const auto na = run({"survey", "--n", "2", "--m", "25", "--trials", "1"});
    CHECK(na.code == 0);
    CHECK(na.out.find("NA,NA,") != std::string::npos);
    CHECK(run({"survey", "--trials", "0"}).code == 2);
    CHECK(run({"survey", "--n", "x"}).code == 2);
  }

  TEST_CASE("tolerance flags and usage errors") {
    TempDir d;
    CHECK(run({"--tol-rank", "2", "check-cp", d.file("t.json", kTri)}).code == 2);
    CHECK(run({"check-cp", d.file("t2.json", kTri), "--tol-phase", "-1"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"--help"}).code == 0);
  }
}
