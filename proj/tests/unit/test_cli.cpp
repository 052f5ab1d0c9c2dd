#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"

using pgsos::cli::run_command;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_command(args, out, err);
  return {code, out.str(), err.str()};
}

const std::string PA = oracle::spec_path("pa.pgsos");
const std::string EX = oracle::spec_path("examples.pgsos");

}  // namespace

TEST_CASE("FNV-1a reference values") {
  CHECK(pgsos::cli::fnv1a64("") == "cbf29ce484222325");
  CHECK(pgsos::cli::fnv1a64("a") == "af63dc4c8601ec8c");
  CHECK(pgsos::cli::fnv1a64("foobar") == "85944171f73967e8");
}

TEST_CASE("distance prints the exact value") {
  const auto r = run({"distance", PA, "par(AA, AA)", "par(A91, A91)"});
  CHECK(r.code == 0);
  CHECK(r.out == "19/100\n");
  const auto lower = run({"distance", PA, "par(AA, AA)", "par(A91, A91)", "--iterate", "1"});
  CHECK(lower.code == 0);
  CHECK(lower.out.find("lower bound") != std::string::npos);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run({"distance"}).code == 2);
  CHECK(run({"distance", PA, "AA"}).code == 2);
  CHECK(run({"frobnicate", PA}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"check", "/nonexistent.pgsos"}).code == 2);
  const auto bad = run({"transitions", PA, "par(AA"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("SyntaxError") != std::string::npos);
  CHECK(run({"bound", PA, "par(x, x)", "--dist", "x=1"}).code == 2);
  CHECK(run({"check-modulus", PA, "par", "--z", "e1*e2"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("analysis refusals exit with 1") {
  const auto r = run({"explore", EX, "irepl(pref_a(zero))", "--max-states", "5"});
  CHECK(r.code == 1);
  CHECK(r.out.find("truncated") != std::string::npos);
  CHECK(run({"distance", EX, "irepl(AA)", "irepl(A91)", "--max-states", "30"}).code == 1);
  CHECK(run({"denote", EX, "repl(x)", "--max-iter", "2"}).code == 1);
}

TEST_CASE("denotations, bounds and continuity") {
  CHECK(run({"bound", PA, "par(x, x)", "--dist", "x=1/10"}).out == "19/100\n");
  CHECK(run({"bound", PA, "choice(pa_5_5(par(x, x), zero), pref_b(y))", "--dist", "x=0.1, y=1/5"}).out == "1/5\n");
  const auto d = run({"denote", EX, "repl(x)"});
  CHECK(d.out.find("[[repl(x)]] = 1@{x:inf}") != std::string::npos);
  CHECK(d.out.find("widened") != std::string::npos);
  const auto c = run({"continuity", PA, "par"});
  CHECK(c.code == 0);
  CHECK(c.out.find("par: uniformly-continuous, z = min(e1 + e2, 1)") != std::string::npos);
  CHECK(run({"continuity", EX, "repl"}).out.find("not-shown") != std::string::npos);
  CHECK(run({"check-modulus", PA, "par", "--z", "e1 + e2"}).out.find("satisfied") == 0);
  CHECK(run({"check-modulus", PA, "par", "--z", "1/2*e1 + e2"}).out.find("not satisfied") == 0);
}

TEST_CASE("JSON reports") {
  const auto r = run({"distance", PA, "par(AA, AA)", "par(A91, A91)", "--json"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["schema"] == "pgsos-report/1");
  CHECK(doc["command"] == "distance");
  CHECK(doc["spec"]["digest"] == "fnv1a64:" + pgsos::cli::fnv1a64(pgsos::read_file(PA)));
  CHECK(doc["results"]["distance"] == "19/100");
  CHECK(doc["results"]["exact"] == true);
  const auto& table = doc["results"]["table"];
  CHECK(table.size() == doc["results"]["states"].size());
  for (const auto& row : table) {
    for (const auto& cell : row) CHECK(cell.is_string());
  }
  CHECK(doc["flags"]["truncated"] == false);

  const auto err = run({"explore", EX, "irepl(pref_a(zero))", "--max-states", "3", "--json"});
  CHECK(nlohmann::json::parse(err.out)["flags"]["truncated"] == true);
}

TEST_CASE("reports are byte-identical across runs") {
  for (const std::vector<std::string>& args :
       {std::vector<std::string>{"oracle", PA, "--samples", "15", "--seed", "7", "--json"},
        std::vector<std::string>{"continuity", EX, "--json"},
        std::vector<std::string>{"explore", PA, "par(A91, A91)", "--json"},
        std::vector<std::string>{"check", PA, "--json", "--print"}}) {
    const auto a = run(args), b = run(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
  }
}

TEST_CASE("oracle command") {
  const auto r = run({"oracle", PA, "--samples", "20", "--seed", "3", "--json"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["results"]["violations"] == 0);
  CHECK(doc["results"]["samples"].size() == 20);
  const auto fixed = run({"oracle", PA, "par(x, x)", "--samples", "10"});
  CHECK(fixed.code == 0);
  CHECK(fixed.out.find("10 samples, 0 violations") == 0);
}

TEST_CASE("check and transitions") {
  const auto c = run({"check", PA});
  CHECK(c.out.find("ok: 26 operators, 2 actions, 34 rules") == 0);
  const auto t = run({"transitions", PA, "A91"});
  CHECK(t.out == "pa_9_1(pref_a(zero), zero) --a--> 9/10 pref_a(zero) + 1/10 zero\n");
  CHECK(run({"transitions", PA, "zero"}).out == "(no transitions)\n");
}
