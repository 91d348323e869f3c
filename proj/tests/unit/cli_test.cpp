#include <doctest.h>

#include <sstream>

#include "symkawa/cli.hpp"
#include "symkawa/io.hpp"

using namespace symkawa;

namespace {

struct Out {
  int code;
  std::string out, err;
};

Out run(std::vector<std::string> args) {
  std::ostringstream o, e;
  int code = run_cli(args, o, e);
  return {code, o.str(), e.str()};
}

}  // namespace

TEST_CASE("pde json") {
  PdeInstance p = pde_from_json(json::parse(R"({"f":"u^2","alpha":"1","beta":"1","sigma":"t"})"));
  CHECK(p.cls() == PdeClass::Full);
  PdeInstance q = pde_from_json(pde_to_json(p));
  CHECK(q.str() == p.str());
  CHECK(pde_from_json(json::parse(R"({"b":"2"})")).cls() == PdeClass::LinearB);
  CHECK_THROWS_AS(pde_from_json(json::parse(R"({"gamma":"1"})")), InputError);
  PdeInstance r = pde_from_json(
      json::parse(R"({"class":"nonlinear-gauged","f":"u^n","beta":"lambda","params":{"n":2,"lambda":"3/2"}})"));
  CHECK(r.f().str() == "u^2");
  CHECK(r.beta().str() == "3/2");
}

TEST_CASE("group element json") {
  GroupElement g = group_element_from_json(json::parse(R"({"group":"nonlinear-gauged","params":{"d1":0.5,"d3":"-2"}})"));
  CHECK(g.param("d1") == Rational(1, 2));
  CHECK(g.param("d3") == -2);
  GroupElement h = group_element_from_json(group_element_to_json(g));
  CHECK(h.str() == g.str());
  CHECK_THROWS_AS(group_element_from_json(json::parse(R"({"group":"nonlinear-gauged","params":{"d1":0}})")), InputError);
}

TEST_CASE("malformed json reports an offset") {
  try {
    load_json_argument(R"({"f": "u^2",})");
    FAIL("expected an InputError");
  } catch (const InputError& e) {
    CHECK(e.offset() >= 0);
  }
}

TEST_CASE("cli exit codes") {
  CHECK(run({"symmetry", "--pde", R"({"f":"u^2","alpha":"t","beta":"t^2+1","sigma":"1"})", "--vf", "0; 1; 0"}).code == 0);
  CHECK(run({"symmetry", "--pde", R"({"f":"u^2"})", "--vf", "0; t; 1"}).code == 1);
  Out t1 = run({"verify-table", "--table", "1"});
  CHECK(t1.code == 0);
  CHECK(t1.out.find("10/10 cases pass") != std::string::npos);
  Out red = run({"reducible", "--pde", R"({"f":"u^2","alpha":"1","beta":"1","sigma":"t"})"});
  CHECK(red.code == 1);
  CHECK(red.out.find("(σ/α)_t = 1") != std::string::npos);
  CHECK(run({"frobnicate"}).code == 2);
  Out bad = run({"parse", "u + * x"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("byte 4") != std::string::npos);
  CHECK(run({"parse", "sin(x)^2+cos(x)^2-1", "--at", "x=1"}).code == 0);
  CHECK(run({"transform", "--pde", R"({"f":"u^2"})", "--tr", R"({"U1":"x"})"}).code == 1);
}

TEST_CASE("probably-zero verdicts are inconclusive unless accepted") {
  std::vector<std::string> args = {"symmetry", "--pde",
                                   R"j({"f":"u*(sin(u)^2+cos(u)^2)"})j", "--vf", "0; t; 1"};
  CHECK(run(args).code == 3);
  args.insert(args.begin(), "--accept-probable");
  CHECK(run(args).code == 0);
}

TEST_CASE("json reports are deterministic and versioned") {
  std::vector<std::string> args = {"--json", "--seed", "5", "verify-kernel", "--class", "linear-gauged", "--samples", "3"};
  Out a = run(args), b = run(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  json j = json::parse(a.out);
  CHECK(j["schema"] == "symkawa.report/1");
  CHECK(j["exit_code"] == 0);
  CHECK(j["zero_policy"]["PROBABLY_ZERO"] == 0);
  json sub = json::parse(run({"symmetry", "--pde", R"({"f":"u^2"})", "--vf", "0;1;0", "--json"}).out);
  CHECK(sub["result"]["verdict"] == "YES");
}
