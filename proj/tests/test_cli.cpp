#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string tmp_path(const std::string& name) { return "/tmp/hartree_cli_test_" + name; }

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

Run run(const std::string& args) {
  std::string err_file = tmp_path("stderr.txt");
  std::string cmd = std::string(HARTREE_CLI_PATH) + " " + args + " 2>" + err_file;
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = slurp(err_file);
  return r;
}

std::string write_config(const std::string& name, const std::string& body) {
  std::string path = tmp_path(name);
  std::ofstream(path) << body;
  return path;
}

const char* kGoodConfig = R"({"N":5,"alpha":1,"r0":1,"x0pp":[0.1,0,0],"delta":0.1,
 "q1":[[-1,0,0,0],[0,-1,0,0],[0,0,-1,0],[0,0,0,-1]],
 "q2":[[-1,0,0,0],[0,-1,0,0],[0,0,-1,0],[0,0,0,-1]],"L0":0.1,"L1":100})";

}  // namespace

TEST_CASE("constants") {
  auto r = run("constants --N 5 --alpha 1 --kmax 3");
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["two_star"].get<double>() == doctest::Approx(2.0));
  CHECK(j["A1"].get<double>() == doctest::Approx(14.0625).epsilon(1e-10));
  CHECK(run("constants --N 4 --alpha 1").code == 2);
  CHECK(run("constants --N 6 --alpha 3").code == 2);
}

TEST_CASE("spectrum") {
  auto r = run("spectrum --N 6 --alpha 1");
  CHECK(r.code == 0);
  CHECK(run("--tol 1e-15 spectrum --N 6 --alpha 1").code == 1);
}

TEST_CASE("oracle") {
  CHECK(run("oracle --N 6 --kmax 3").code == 0);
  CHECK(run("oracle --N 6 --t 6").code == 2);
  CHECK(run("oracle --t 5 --rule legendre --nodes 8 --kmax 2").code == 1);
}

TEST_CASE("reduced-solve is deterministic and validates its config") {
  std::string good = write_config("good.json", kGoodConfig);
  auto a = run("reduced-solve --m 16 --config " + good);
  auto b = run("reduced-solve --m 16 --config " + good);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  auto j = nlohmann::json::parse(a.out);
  CHECK(j.dump().find("t_star") != std::string::npos);

  auto missing = run("reduced-solve --m 16 --config " + tmp_path("does_not_exist.json"));
  CHECK(missing.code == 2);
  CHECK(!missing.err.empty());

  std::string bad_body = kGoodConfig;
  bad_body.replace(bad_body.find("\"q2\":[[-1,0,0,0]"), 16, "\"q2\":[[-1,0,0]");
  auto bad = run("reduced-solve --config " + write_config("bad.json", bad_body));
  CHECK(bad.code == 2);
  auto err = nlohmann::json::parse(bad.err);
  CHECK(err["pointer"] == "/q2/0");

  auto no_n = run("reduced-solve --config " + write_config("non.json", R"({"alpha":1})"));
  CHECK(no_n.code == 2);
  CHECK(nlohmann::json::parse(no_n.err)["pointer"] == "/N");
}

TEST_CASE("output file and formats") {
  std::string path = tmp_path("out.json");
  std::remove(path.c_str());
  auto r = run("--out " + path + " constants --N 5 --alpha 1 --kmax 1");
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(slurp(path))["N"] == 5);
  std::string good = write_config("good.json", kGoodConfig);
  auto csv = run("landscape --m 16 --config " + good + " --points 5");
  CHECK(csv.code == 0);
  int lines = 0;
  for (char c : csv.out) lines += c == '\n';
  CHECK(lines == 6);
}

TEST_CASE("bubble and pohozaev subcommands") {
  CHECK(run("bubble residual --points 50").code == 0);
  auto p = run("--seed 3 pohozaev --which d1 --samples 20000");
  REQUIRE(p.code == 0);
  auto j = nlohmann::json::parse(p.out);
  CHECK(std::abs(j["value"].get<double>()) <= 3.0 * j["std_error"].get<double>() + 1e-12 * j["abs_scale"].get<double>());
  CHECK(run("--seed 3 pohozaev --which d1 --samples 20000").out == p.out);
  CHECK(run("pohozaev --which d2 --i 2").code == 2);
}

TEST_CASE("usage errors") {
  CHECK(run("").code != 0);
  CHECK(run("no-such-command").code != 0);
}
