#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

using namespace std::string_literals;

namespace {

struct RunResult {
  int exit_code;
  std::string out;
};

RunResult run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + COVFORGE_BIN + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (size_t n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = pclose(pipe);
  return RunResult{WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("molien subcommand") {
  auto r = run("molien --group td --initial A1,E,F2,F2 --final F2 --order 4");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "taylor: 0 2 7 25 69"));

  r = run("molien --group ci --initial A2,A2,A2 --final A1 --order 4");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "(1 + 3*t^2)/((1-t^2)^3)"));
  CHECK(contains(r.out, "taylor: 1 0 6 0 15"));

  r = run("molien --group td --initial A1 --final A1 --order 3");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "taylor: 1 1 1 1"));

  // An invariant slice carries no sign-covariants: the zero function.
  r = run("molien --group ci --initial A1 --final A2 --order 3");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "= 0"));
  CHECK(contains(r.out, "taylor: 0 0 0 0"));

  // S1-style bookkeeping: one extra 1/(1-t) factor.
  r = run("molien --group td --initial E,F2,F2 --final F2 --order 4 --append-trivial 1");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "taylor: 0 2 7 25 69"));
}

TEST_CASE("basis subcommand") {
  auto r = run("basis --group ci --initial A2,A2,A2 --final A2");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "numerators per degree: 3 0 1; total 4"));

  r = run("basis --group td --initial F2 --final A2");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "numerators per degree: 1; total 1"));
}

TEST_CASE("basis file feeds enumerate") {
  const std::string path = "/tmp/covforge_test_f2.json";
  auto r = run("basis --group td --initial A1,E,F2,F2 --final F2 -o " + path);
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "numerators per degree: 2 5 12 23 41 60 71 71 60 45 27 12 3; total 432"));

  r = run("enumerate --basis " + path + " --partner x --dmax 4");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "degree 4: 69 terms"));
  CHECK(contains(r.out, "total 103 terms"));
  std::remove(path.c_str());
}

TEST_CASE("text emitter lists one polynomial per line") {
  const std::string path = "/tmp/covforge_test_ci_basis.txt";
  auto r = run("basis --group ci --final A2 --format text -o " + path);
  CHECK(r.exit_code == 0);
  const std::string text = slurp(path);
  CHECK(contains(text, "f1 = (1) * x1^2"));
  CHECK(contains(text, "f3 = (1) * x3^2"));
  CHECK(contains(text, "g4 deg=3 : (1) * x1*x2*x3"));
  std::remove(path.c_str());
}

TEST_CASE("enumerate subcommand") {
  auto r = run("enumerate --group ci --final A2 --dmax 5");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "degree 1: 3 terms"));
  CHECK(contains(r.out, "degree 3: 10 terms"));
  CHECK(contains(r.out, "degree 5: 21 terms"));

  r = run("enumerate --group ci --final A1 --dmax 0");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "total 1 terms"));
}

TEST_CASE("verify subcommand") {
  auto r = run("verify --group ci --dmax 8");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "PASS: 2 irreps x 9 degrees"));

  r = run("verify --group td --final F2 --dmax 4");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "F2 4 69 69 69 ok"));
}

TEST_CASE("verify holds for other slice orders and irrep combinations") {
  auto r = run("verify --group td --initial F1,F2 --final all --dmax 5");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "PASS: 5 irreps x 6 degrees"));

  // The same-degree profile is reached regardless of association order.
  r = run("basis --group td --initial F2,F2,E --final F2");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "numerators per degree: 2 5 12 23 41 60 71 71 60 45 27 12 3; total 432"));
}

TEST_CASE("three-way agreement to degree six for every tetrahedral irrep") {
  auto r = run("verify --group td --final all --dmax 6");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "A1 6 162 162 162 ok"));
  CHECK(contains(r.out, "A2 6 101 101 101 ok"));
  CHECK(contains(r.out, "E 6 257 257 257 ok"));
  CHECK(contains(r.out, "F1 6 342 342 342 ok"));
  CHECK(contains(r.out, "F2 6 400 400 400 ok"));
  CHECK(contains(r.out, "PASS: 5 irreps x 7 degrees"));
}

TEST_CASE("configuration errors exit with code 2") {
  CHECK(run("molien --group nosuchgroup.json --final A1").exit_code == 2);
  CHECK(run("molien --group ci --final BOGUS").exit_code == 2);
  CHECK(run("basis --group td --initial A1,Q --final F2").exit_code == 2);
  CHECK(run("nonsense").exit_code == 2);

  const std::string path = "/tmp/covforge_bad_group.json";
  std::ofstream(path) << "{\"not\": \"a group\"}";
  CHECK(run("molien --group " + path + " --final A1").exit_code == 2);
  std::remove(path.c_str());
}

TEST_CASE("seeded coupling faults flip verification to exit 1") {
  for (int k : {0, 1, 2, 3}) {
    auto r = run("verify --group ci --dmax 4", "COVFORGE_FAULT_CG=" + std::to_string(k));
    CHECK(r.exit_code == 1);
  }
  // Faults in the first tetrahedral coupling round surface at low degree.
  CHECK(run("verify --group td --final all --dmax 2", "COVFORGE_FAULT_CG=10").exit_code == 1);
  CHECK(run("verify --group td --final all --dmax 2", "COVFORGE_FAULT_CG=31").exit_code == 1);
  // Control: an index beyond every tensor use leaves verification green.
  CHECK(run("verify --group ci --dmax 4", "COVFORGE_FAULT_CG=9999").exit_code == 0);

  // The same faults make basis construction report an internal
  // inconsistency (exit 3) rather than writing a corrupt file.
  CHECK(run("basis --group ci --final A1", "COVFORGE_FAULT_CG=0").exit_code == 3);
  CHECK(run("basis --group td --initial F2,F2 --final E", "COVFORGE_FAULT_CG=10").exit_code == 3);
}

TEST_CASE("byte-identical reruns") {
  const std::string p1 = "/tmp/covforge_det_1.json";
  const std::string p2 = "/tmp/covforge_det_2.json";
  CHECK(run("basis --group ci --initial A2,A2,A2 --final A1 -o " + p1).exit_code == 0);
  CHECK(run("basis --group ci --initial A2,A2,A2 --final A1 -o " + p2).exit_code == 0);
  CHECK(slurp(p1) == slurp(p2));
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("group export round-trips through the loader") {
  const std::string path = "/tmp/covforge_td_group.json";
  CHECK(run("export-group --group td -o " + path).exit_code == 0);
  auto r = run("molien --group " + path + " --initial F2 --final A1 --order 6");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "taylor: 1 0 1 1 2 1 3"));
  std::remove(path.c_str());
}
