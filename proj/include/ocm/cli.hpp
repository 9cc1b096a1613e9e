#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ocm/acceptance.hpp"
#include "ocm/harness.hpp"
#include "ocm/predict.hpp"

namespace ocm::cli {
namespace detail {

inline std::vector<Alg> parse_algs(const std::string& csv) {
  std::vector<Alg> algs;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const std::size_t comma = csv.find(',', start);
    const std::string tok =
        csv.substr(start, comma == std::string::npos ? comma : comma - start);
    if (tok.empty()) throw std::invalid_argument("empty entry in --algs");
    algs.push_back(alg_from_name(tok));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return algs;
}

inline std::vector<double> parse_u_list(const std::string& csv) {
  std::vector<double> us;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const std::size_t comma = csv.find(',', start);
    const std::string tok =
        csv.substr(start, comma == std::string::npos ? comma : comma - start);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size() || tok.empty())
      throw std::invalid_argument("invalid u value: '" + tok + "'");
    us.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return us;
}

inline bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace detail

// Testable command core. argv excludes the program name; everything written
// to stdout goes through `out`, diagnostics through `err`. Exit code 2 marks
// flag or input validation failures, 1 a failed verification run.
inline int dispatch(const std::vector<std::string>& argv, std::ostream& out,
                    std::ostream& err) {
  CLI::App app{"analytics and Monte Carlo laboratory for online matching on "
               "irregular cuckoo instances"};
  app.name("ocm");
  app.require_subcommand(1);

  std::string dist;
  std::uint32_t n = 100'000;
  std::uint32_t ads = 0;
  std::uint32_t trials = 5;
  std::uint64_t seed = 42;
  std::string algs = "greedy,max_matching";
  std::string out_path;
  std::string u_csv;
  unsigned workers = 0;
  bool force = false;

  const char* dist_help =
      "distribution spec: main | trunc:D | epsmass:D:E | du:U | unif:D | "
      "explicit:d1=p1,d2=p2,...";

  CLI::App* c_predict =
      app.add_subcommand("predict", "print closed-form analytics for a distribution as JSON");
  c_predict->add_option("--dist", dist, dist_help)->required();

  CLI::App* c_sim =
      app.add_subcommand("simulate", "run seeded trials and compare against analytics");
  c_sim->add_option("--dist", dist, dist_help)->required();
  c_sim->add_option("--n", n, "number of users (default 100000)");
  c_sim->add_option("--ads", ads, "number of ads (default: same as --n)");
  c_sim->add_option("--trials", trials, "number of trials (default 5)");
  CLI::Option* sim_seed =
      c_sim->add_option("--seed", seed, "master seed (default 42, or env OCM_SEED)");
  c_sim->add_option("--algs", algs,
                    "comma list from greedy,ranking,karp_sipser,max_matching "
                    "(default greedy,max_matching)");
  c_sim->add_option("--out", out_path,
                    "write per-trial rows to this path (CSV, or JSON when the "
                    "path ends in .json)");
  c_sim->add_option("--workers", workers,
                    "worker threads (default: available parallelism)");
  c_sim->add_flag("--force", force, "allow overwriting an existing --out file");

  CLI::App* c_curve = app.add_subcommand(
      "curve", "sweep the generalized family and compare with the analytic curve");
  c_curve->add_option("--u", u_csv, "comma list of u values in (0,1]")->required();
  c_curve->add_option("--n", n, "ads per sweep point; users = ceil(u*n) (default 100000)");
  c_curve->add_option("--trials", trials, "trials per sweep point (default 5)");
  CLI::Option* curve_seed =
      c_curve->add_option("--seed", seed, "master seed (default 42, or env OCM_SEED)");
  c_curve->add_option("--workers", workers,
                      "worker threads (default: available parallelism)");

  CLI::App* c_verify =
      app.add_subcommand("verify", "run the acceptance suite; exit 1 on any failure");
  c_verify->add_option("--workers", workers,
                       "worker threads (default: available parallelism)");

  std::vector<std::string> rev(argv.rbegin(), argv.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "ocm: " << e.what() << "\n";
    return 2;
  }

  // the env default loses to an explicit flag
  if (const char* env = std::getenv("OCM_SEED");
      env && *env && sim_seed->count() == 0 && curve_seed->count() == 0) {
    char* endp = nullptr;
    const unsigned long long v = std::strtoull(env, &endp, 10);
    if (endp == env || *endp != '\0') {
      err << "ocm: OCM_SEED is not an unsigned integer: '" << env << "'\n";
      return 2;
    }
    seed = v;
  }

  try {
    if (app.got_subcommand(c_predict)) {
      out << predict_json(dist) << "\n";
      return 0;
    }

    if (app.got_subcommand(c_sim)) {
      namespace fs = std::filesystem;
      if (!out_path.empty() && fs::exists(out_path) && !force) {
        err << "ocm: refusing to overwrite " << out_path << " (pass --force)\n";
        return 2;
      }
      ExperimentConfig cfg;
      cfg.dist_spec = dist;
      cfg.n_users = n;
      cfg.n_ads = ads == 0 ? n : ads;
      cfg.trials = trials;
      cfg.master_seed = seed;
      cfg.algorithms = detail::parse_algs(algs);
      cfg.workers = workers;
      ExperimentReport report = run_trials(cfg);
      try {
        report = compare_analytic(report);
      } catch (const std::runtime_error& e) {
        const std::string msg = e.what();
        if (msg.find("no analytic model") == std::string::npos) throw;
        report.warnings.push_back(msg + "; predictions omitted");
      }
      if (!out_path.empty()) {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) {
          err << "ocm: cannot open " << out_path << " for writing\n";
          return 2;
        }
        if (detail::ends_with(out_path, ".json"))
          f << report_to_json(report) << "\n";
        else
          write_trials_csv(report, f, /*include_timings=*/false);
      }
      out << report_to_json(report) << "\n";
      return 0;
    }

    if (app.got_subcommand(c_curve)) {
      CurveTable table = curve_sweep(detail::parse_u_list(u_csv), n, trials, seed, workers);
      out << curve_to_json(table) << "\n";
      return 0;
    }

    if (app.got_subcommand(c_verify))
      return acceptance::run_all(out, workers) ? 0 : 1;
  } catch (const std::exception& e) {
    err << "ocm: " << e.what() << "\n";
    return 2;
  }
  err << "ocm: no command\n";
  return 2;
}

}  // namespace ocm::cli
