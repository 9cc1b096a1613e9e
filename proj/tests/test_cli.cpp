#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ocm/analytics.hpp"
#include "ocm/cli.hpp"

namespace {

struct RunResult {
  int rc = -1;
  std::string out;
  std::string err;
};

RunResult run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int rc = ocm::cli::dispatch(args, out, err);
  return {rc, out.str(), err.str()};
}

double number_after(const std::string& json, const std::string& key) {
  const std::string pat = "\"" + key + "\":";
  const auto pos = json.find(pat);
  REQUIRE(pos != std::string::npos);
  return std::strtod(json.c_str() + pos + pat.size(), nullptr);
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct EnvGuard {
  explicit EnvGuard(const char* name) : name_(name) { ::unsetenv(name); }
  ~EnvGuard() { ::unsetenv(name_); }
  const char* name_;
};

}  // namespace

TEST_CASE("predict emits the headline constants") {
  auto main_law = run({"predict", "--dist", "main"});
  CHECK(main_law.rc == 0);
  CHECK(main_law.err.empty());
  CHECK(main_law.out.find("\"cr\":0.8206259") != std::string::npos);

  auto trunc = run({"predict", "--dist", "trunc:4"});
  CHECK(trunc.rc == 0);
  CHECK(trunc.out.find("\"ks_lower\":0.75") != std::string::npos);
  CHECK(trunc.out.find("\"fixed_point\":[1,1]") != std::string::npos);
}

TEST_CASE("predict closed forms per family") {
  auto u2 = run({"predict", "--dist", "unif:2"});
  REQUIRE(u2.rc == 0);
  CHECK(std::fabs(number_after(u2.out, "greedy") - std::tanh(1.0)) < 1e-12);
  CHECK(std::fabs(number_after(u2.out, "max_matching") - 0.838097440527021285) < 1e-9);
  CHECK(std::fabs(number_after(u2.out, "ks_upper") - 0.838097440527021285) < 1e-8);

  auto em = run({"predict", "--dist", "epsmass:2:0.1"});
  REQUIRE(em.rc == 0);
  // the extremality level and the KS upper bound are one number for eps-mass
  CHECK(std::fabs(number_after(em.out, "alpha") - number_after(em.out, "ks_upper")) < 1e-9);
  CHECK(number_after(em.out, "alpha") < 0.6);
  CHECK(number_after(em.out, "alpha") > 0.59);
  CHECK(number_after(em.out, "psi") == 16.0 * std::pow(0.1, 3.0) / 3.0);

  auto du = run({"predict", "--dist", "du:0.5"});
  REQUIRE(du.rc == 0);
  CHECK(std::fabs(number_after(du.out, "cr") - 0.924234314520019517) < 1e-8);
  CHECK(std::fabs(number_after(du.out, "u") - 0.5) == 0.0);

  // degenerate law: no fixed point block, greedy matches nothing
  auto zero = run({"predict", "--dist", "explicit:0=1.0"});
  REQUIRE(zero.rc == 0);
  CHECK(number_after(zero.out, "greedy") == 0.0);
  CHECK(zero.out.find("fixed_point") == std::string::npos);
}

TEST_CASE("argument validation exits 2 with one-line diagnostics") {
  auto no_dist = run({"predict"});
  CHECK(no_dist.rc == 2);
  CHECK(!no_dist.err.empty());
  CHECK(std::count(no_dist.err.begin(), no_dist.err.end(), '\n') == 1);

  CHECK(run({"predict", "--dist", "main", "--bogus"}).rc == 2);
  CHECK(run({"frobnicate"}).rc == 2);
  CHECK(run({}).rc == 2);
  CHECK(run({"predict", "--dist", "trunc:1"}).rc == 2);
  CHECK(run({"curve", "--u", "0.5,zebra"}).rc == 2);
  CHECK(run({"curve", "--u", "1.5"}).rc == 2);
  CHECK(run({"simulate", "--dist", "unif:2", "--trials", "0"}).rc == 2);
  CHECK(run({"simulate", "--dist", "unif:2", "--algs", "greedy,flood"}).rc == 2);

  auto bad_explicit = run({"simulate", "--dist", "explicit:2=0.5"});
  CHECK(bad_explicit.rc == 2);
  CHECK(bad_explicit.err.find("probabilities must sum to 1") != std::string::npos);
}

TEST_CASE("help text lists every flag and exits 0") {
  auto top = run({"--help"});
  CHECK(top.rc == 0);
  for (const char* cmd : {"predict", "simulate", "curve", "verify"})
    CHECK(top.out.find(cmd) != std::string::npos);

  auto sim = run({"simulate", "--help"});
  CHECK(sim.rc == 0);
  for (const char* flag : {"--dist", "--n", "--ads", "--trials", "--seed",
                           "--algs", "--out", "--workers", "--force"})
    CHECK(sim.out.find(flag) != std::string::npos);

  auto curve = run({"curve", "--help"});
  CHECK(curve.rc == 0);
  for (const char* flag : {"--u", "--n", "--trials", "--seed", "--workers"})
    CHECK(curve.out.find(flag) != std::string::npos);

  CHECK(run({"predict", "--help"}).rc == 0);
  CHECK(run({"verify", "--help"}).rc == 0);
}

TEST_CASE("simulate reports, attaches predictions, and is reproducible") {
  EnvGuard guard("OCM_SEED");
  const std::vector<std::string> args = {"simulate", "--dist",   "unif:2",
                                         "--n",      "400",      "--trials",
                                         "2",        "--seed",   "7",
                                         "--workers", "1"};
  auto a = run(args);
  REQUIRE(a.rc == 0);
  CHECK(a.out.find("\"dist_spec\":\"unif:2\"") != std::string::npos);
  CHECK(a.out.find("\"master_seed\":7") != std::string::npos);
  CHECK(std::fabs(number_after(a.out.substr(a.out.find("\"predictions\"")), "value") -
                  std::tanh(1.0)) < 1e-9);

  auto b = run(args);
  CHECK(a.out == b.out);
}

TEST_CASE("simulate on an explicit law warns instead of predicting") {
  auto r = run({"simulate", "--dist", "explicit:0=0.5,2=0.5", "--n", "300",
                "--trials", "2", "--workers", "1"});
  REQUIRE(r.rc == 0);
  CHECK(r.out.find("no analytic model") != std::string::npos);
  CHECK(r.out.find("\"predictions\":{}") != std::string::npos);
}

TEST_CASE("OCM_SEED fills the default and loses to the flag") {
  EnvGuard guard("OCM_SEED");
  ::setenv("OCM_SEED", "9001", 1);
  auto env_run = run({"simulate", "--dist", "unif:2", "--n", "200", "--trials",
                      "1", "--workers", "1"});
  REQUIRE(env_run.rc == 0);
  CHECK(env_run.out.find("\"master_seed\":9001") != std::string::npos);

  auto flag_run = run({"simulate", "--dist", "unif:2", "--n", "200", "--trials",
                       "1", "--seed", "5", "--workers", "1"});
  REQUIRE(flag_run.rc == 0);
  CHECK(flag_run.out.find("\"master_seed\":5") != std::string::npos);

  ::setenv("OCM_SEED", "12x", 1);
  auto bad = run({"simulate", "--dist", "unif:2", "--n", "200", "--trials", "1",
                  "--workers", "1"});
  CHECK(bad.rc == 2);
  CHECK(bad.err.find("OCM_SEED") != std::string::npos);
}

TEST_CASE("output files are guarded and byte-stable") {
  namespace fs = std::filesystem;
  const fs::path path = fs::temp_directory_path() / "ocm_cli_trials.csv";
  fs::remove(path);
  const std::vector<std::string> base = {"simulate", "--dist", "trunc:3",
                                         "--n",      "300",    "--trials",
                                         "2",        "--out",  path.string(),
                                         "--workers", "1"};
  auto first = run(base);
  REQUIRE(first.rc == 0);
  REQUIRE(fs::exists(path));
  const std::string csv = read_file(path);
  CHECK(csv.rfind("trial,n_users,n_ads,edges,greedy,ranking,karp_sipser,"
                  "ks_upper,max_matching,ms_greedy,ms_ranking,ms_ks,ms_max\n",
                  0) == 0);
  // timing cells stay empty so identical runs write identical bytes
  CHECK(csv.find(",,,,\n") != std::string::npos);

  auto blocked = run(base);
  CHECK(blocked.rc == 2);
  CHECK(blocked.err.find("refusing to overwrite") != std::string::npos);

  std::vector<std::string> forced = base;
  forced.push_back("--force");
  auto second = run(forced);
  CHECK(second.rc == 0);
  CHECK(read_file(path) == csv);

  const fs::path jpath = fs::temp_directory_path() / "ocm_cli_trials.json";
  fs::remove(jpath);
  std::vector<std::string> jargs = base;
  jargs[8] = jpath.string();
  auto jr = run(jargs);
  REQUIRE(jr.rc == 0);
  CHECK(read_file(jpath) == jr.out);
  fs::remove(path);
  fs::remove(jpath);
}

TEST_CASE("curve sweep prints rows and the argmin markers") {
  const std::vector<std::string> args = {"curve",    "--u",     "0.5,1.0",
                                         "--n",      "3000",    "--trials",
                                         "2",        "--workers", "1"};
  auto a = run(args);
  REQUIRE(a.rc == 0);
  CHECK(a.out.find("\"rows\":[") != std::string::npos);
  CHECK(a.out.find("\"u\":0.5") != std::string::npos);
  CHECK(std::fabs(number_after(a.out, "analytic") - ocm::cr_du(0.5)) < 1e-12);
  CHECK(a.out.find("\"min_analytic_u\":1") != std::string::npos);

  auto b = run(args);
  CHECK(a.out == b.out);
}
