#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ocm/analytics.hpp"
#include "ocm/degree_dist.hpp"
#include "ocm/graph.hpp"
#include "ocm/graph_gen.hpp"
#include "ocm/harness.hpp"
#include "ocm/matching.hpp"
#include "ocm/predict.hpp"
#include "ocm/rng.hpp"

namespace ocm::acceptance {

struct Criterion {
  int id = 0;
  bool pass = false;
  std::string detail;
};

namespace detail {

template <class... Args>
std::string fmt(const char* pattern, Args... args) {
  char buf[768];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return std::string(buf);
}

inline double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

inline ExperimentReport run(const std::string& dist, std::uint32_t n_users,
                            std::uint32_t n_ads, std::uint32_t trials,
                            std::vector<Alg> algs, unsigned workers) {
  ExperimentConfig cfg;
  cfg.dist_spec = dist;
  cfg.n_users = n_users;
  cfg.n_ads = n_ads;
  cfg.trials = trials;
  cfg.master_seed = 42;
  cfg.algorithms = std::move(algs);
  cfg.workers = workers;
  return run_trials(cfg);
}

inline double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  return xs[xs.size() / 2];
}

// First number following "key": in a JSON string emitted by JsonWriter.
inline double json_number(const std::string& json, const std::string& key) {
  const std::string pat = "\"" + key + "\":";
  const auto pos = json.find(pat);
  if (pos == std::string::npos)
    throw std::runtime_error("predict output lacks key " + key);
  return std::strtod(json.c_str() + pos + pat.size(), nullptr);
}

// Residual of the simplified graph after removing phase-1 matched vertices.
inline BipartiteMultigraph residual_after(const BipartiteMultigraph& g,
                                          const KarpSipserOutcome& o) {
  auto s = simplify(g);
  std::vector<char> um(s.n_users, 0), am(s.n_ads, 0);
  for (auto [u, a] : o.partial.pairs) {
    um[u] = 1;
    am[a] = 1;
  }
  std::vector<std::vector<std::uint32_t>> adj(s.n_users);
  for (std::uint32_t u = 0; u < s.n_users; ++u) {
    if (um[u]) continue;
    for (const auto* it = s.nbr_begin(u); it != s.nbr_end(u); ++it)
      if (!am[*it]) adj[u].push_back(*it);
  }
  return BipartiteMultigraph::from_adjacency(s.n_ads, adj);
}

}  // namespace detail

// The ten desk-scale checks, master seed 42 throughout. Prints one verdict
// line per criterion as it completes; returns true iff every one passed.
inline bool run_all(std::ostream& out, unsigned workers = 0) {
  using detail::fmt;
  const double t_all = detail::now_s();
  std::vector<Criterion> results;

  auto record = [&](int id, bool pass, const std::string& text) {
    results.push_back({id, pass, text});
    out << "C" << id << (id < 10 ? "  " : " ") << (pass ? "PASS" : "FAIL")
        << "  " << text << "\n";
    out.flush();
  };
  auto guarded = [&](int id, auto&& body) {
    try {
      body();
    } catch (const std::exception& e) {
      record(id, false, fmt("exception: %s", e.what()));
    }
  };

  // 1: main-instance online bound
  guarded(1, [&] {
    const double t0 = detail::now_s();
    auto rep = detail::run("main", 1'000'000, 1'000'000, 10, {Alg::Greedy}, workers);
    const double mean = rep.stats.at("greedy").mean;
    const double secs = detail::now_s() - t0;
    const bool ok = mean >= 0.8186 && mean <= 0.8226 && secs < 120.0;
    record(1, ok,
           fmt("main n=10^6, 10 trials: greedy mean %.6f in [0.8186, 0.8226]; %.0fs (limit 120s)",
               mean, secs));
  });

  // 2: quasi-perfect offline matching, medians nondecreasing in n
  guarded(2, [&] {
    const double t0 = detail::now_s();
    std::vector<double> med;
    for (std::uint32_t n : {1'000u, 10'000u, 100'000u}) {
      auto rep = detail::run("main", n, n, 5, {Alg::MaxMatching}, workers);
      std::vector<double> fr;
      for (const auto& r : rep.trials)
        fr.push_back(static_cast<double>(*r.max_size) / n);
      med.push_back(detail::median(fr));
    }
    const double secs = detail::now_s() - t0;
    const bool ok = med[0] <= med[1] && med[1] <= med[2] && med[2] >= 0.95 &&
                    secs < 300.0;
    record(2, ok,
           fmt("max-matching medians %.6f / %.6f / %.6f at n=10^3/10^4/10^5 "
               "(nondecreasing, last >= 0.95); %.0fs (limit 300s)",
               med[0], med[1], med[2], secs));
  });

  // 3: degree-2 benchmarks, simulation and closed forms
  guarded(3, [&] {
    auto g = detail::run("unif:2", 1'000'000, 1'000'000, 5, {Alg::Greedy}, workers);
    auto o = detail::run("unif:2", 100'000, 100'000, 5, {Alg::MaxMatching}, workers);
    const double gm = g.stats.at("greedy").mean;
    const double om = o.stats.at("max_matching").mean;
    const std::string pj = predict_json("unif:2");
    const double pg = detail::json_number(pj, "greedy");
    const double pm = detail::json_number(pj, "max_matching");
    const bool ok = std::fabs(gm - 0.7616) <= 0.003 &&
                    std::fabs(om - 0.8381) <= 0.004 &&
                    std::fabs(pg - 0.76159) <= 1e-5 &&
                    std::fabs(pm - 0.83809) <= 1e-5;
    record(3, ok,
           fmt("unif:2 greedy mean %.6f (0.7616 +- 0.003), oracle mean %.6f "
               "(0.8381 +- 0.004), predict %.6f / %.6f vs 0.76159 / 0.83809",
               gm, om, pg, pm));
  });

  // 4: tangent fixed points and matching bounds for truncated laws
  guarded(4, [&] {
    double worst_fp = 0.0, worst_b = 0.0;
    for (std::uint32_t d : {2u, 3u, 10u}) {
      auto dist = parse_dist_spec("trunc:" + std::to_string(d));
      auto p = pgf_pair(dist, 1.0);
      auto fp = fixed_point_solve(p.f_prime, p.f_hat_prime, p.mu);
      auto b = ks_matching_bounds(p.f, p.f_hat, p.f_prime, fp);
      const double target = 1.0 - 1.0 / d;
      worst_fp = std::max({worst_fp, std::fabs(fp.w_hat_1 - 1.0),
                           std::fabs(fp.w_2 - 1.0)});
      worst_b = std::max({worst_b, std::fabs(b.lower_fraction - target),
                          std::fabs(b.upper_fraction - target)});
    }
    const bool ok = worst_fp <= 1e-9 && worst_b <= 1e-9;
    record(4, ok,
           fmt("trunc:{2,3,10}: |fixed point - (1,1)| <= %.2e, |bounds - (1-1/D)| <= %.2e "
               "(tolerance 1e-9)",
               worst_fp, worst_b));
  });

  // 5: Karp-Sipser phase-1 yield at the tangent point
  guarded(5, [&] {
    auto rep = detail::run("trunc:4", 100'000, 100'000, 5,
                           {Alg::KarpSipser, Alg::MaxMatching}, workers);
    const double mean = rep.stats.at("karp_sipser").mean;
    bool bounded = true;
    for (const auto& r : rep.trials)
      bounded = bounded && *r.max_size <= *r.ks_upper_bound;
    const bool ok = mean >= 0.74 && bounded;
    record(5, ok,
           fmt("trunc:4 n=10^5, 5 trials: phase-1 mean %.6f (threshold 0.74), "
               "max <= ks_upper in every trial: %s",
               mean, bounded ? "yes" : "NO"));
  });

  // 6: eps-mass extremality
  guarded(6, [&] {
    const double alpha = extremality_alpha(2, 0.1).alpha;
    auto rep = detail::run("epsmass:2:0.1", 100'000, 100'000, 5,
                           {Alg::MaxMatching}, workers);
    const double mm = rep.stats.at("max_matching").mean;
    auto p = pgf_pair(parse_dist_spec("epsmass:2:0.1"), 1.0);
    auto fp = fixed_point_solve(p.f_prime, p.f_hat_prime, p.mu);
    auto b = ks_matching_bounds(p.f, p.f_hat, p.f_prime, fp);
    const bool ok = mm >= alpha - 0.02 && mm <= alpha + 0.01 && alpha < 0.6 &&
                    std::fabs(b.upper_fraction - alpha) <= 1e-9;
    record(6, ok,
           fmt("epsmass:2:0.1: max mean %.6f in [%.6f, %.6f], alpha %.6f < 0.6, "
               "|ks_upper - alpha| = %.2e (tolerance 1e-9)",
               mm, alpha - 0.02, alpha + 0.01, alpha,
               std::fabs(b.upper_fraction - alpha)));
  });

  // 7: generalized-family curve and optimality of u = 1
  guarded(7, [&] {
    auto tab = curve_sweep({0.3, 0.5, 0.7, 0.9, 1.0}, 100'000, 5, 42, workers);
    double a10 = 0.0, a05 = 0.0, worst_emp = 0.0;
    bool floor_ok = true;
    for (const auto& r : tab.rows) {
      if (r.u == 1.0) a10 = r.analytic;
      if (r.u == 0.5) a05 = r.analytic;
      worst_emp = std::max(worst_emp, std::fabs(r.delta));
      // margin floor from the exact constant; the 6-digit 0.820626 would
      // overshoot cr_du(1) itself by 8e-8
      floor_ok = floor_ok &&
                 r.analytic >= cr_main() + (1.0 - r.u) / 500.0 - 1e-12;
    }
    const bool ok = std::fabs(a10 - 0.820626) <= 1e-6 &&
                    std::fabs(a05 - 0.924234) <= 1e-6 && worst_emp <= 0.01 &&
                    tab.min_analytic_u == 1.0 && tab.min_empirical_u == 1.0 &&
                    floor_ok;
    record(7, ok,
           fmt("curve u={0.3,0.5,0.7,0.9,1}: cr(1)=%.8f, cr(0.5)=%.8f, max "
               "|empirical-analytic| %.4f (<= 0.01), argmin analytic u=%g, "
               "empirical u=%g, margin floor %s",
               a10, a05, worst_emp, tab.min_analytic_u, tab.min_empirical_u,
               floor_ok ? "holds" : "VIOLATED"));
  });

  // 8: exhaustive coupling against shuffled configuration scripts
  guarded(8, [&] {
    const double tv = coupling_enumeration_test();
    record(8, tv <= 1e-12,
           fmt("coupling enumeration: total variation %.3e (tolerance 1e-12)", tv));
  });

  // 9: ad degrees against Poisson(H_3)
  guarded(9, [&] {
    constexpr std::uint32_t n = 100'000;
    RandomStream rng(trial_stream(42, 0, 0));
    auto g = sample_cuckoo(n, n, parse_dist_spec("trunc:4"), rng);
    std::vector<std::uint32_t> addeg(g.n_ads, 0);
    for (std::uint32_t u = 0; u < g.n_users; ++u)
      for (const auto* it = g.nbr_begin(u); it != g.nbr_end(u); ++it)
        ++addeg[*it];
    std::vector<double> hist;
    for (std::uint32_t a = 0; a < g.n_ads; ++a) {
      if (addeg[a] >= hist.size()) hist.resize(addeg[a] + 1, 0.0);
      hist[addeg[a]] += 1.0 / n;
    }
    const double lambda = harmonic(3);
    double tv = 0.0, poi_cum = 0.0;
    for (std::size_t d = 0; d < hist.size(); ++d) {
      const double poi = poisson_pmf(lambda, static_cast<std::uint32_t>(d));
      poi_cum += poi;
      tv += std::fabs(hist[d] - poi);
    }
    tv = 0.5 * (tv + (1.0 - poi_cum));
    record(9, tv <= 0.01,
           fmt("trunc:4 n=10^5 ad-degree histogram vs Poisson(11/6): TV %.5f "
               "(tolerance 0.01)",
               tv));
  });

  // 10: property suites and the whole-run time budget
  guarded(10, [&] {
    int bad = 0;
    std::string first_bad;
    RandomStream corpus(trial_stream(1234, 0));
    for (int rep = 0; rep < 500; ++rep) {
      const std::uint32_t nu = 1 + corpus.next_below(10);
      const std::uint32_t na = 1 + corpus.next_below(10);
      std::vector<std::uint32_t> degs(nu);
      for (auto& d : degs) d = corpus.next_below(4);
      auto g = cuckoo_from_degrees(na, degs, corpus);
      RandomStream r1(trial_stream(1234, static_cast<std::uint64_t>(rep), 1));
      RandomStream r2(trial_stream(1234, static_cast<std::uint64_t>(rep), 2));
      auto mg = greedy_online(g, r1);
      auto mr = ranking(g, r2);
      auto ks = karp_sipser_phase1(g);
      auto mm = hopcroft_karp(g);
      const auto bf = brute_force_max(g);
      const bool valid = is_valid_matching(g, mg) && is_valid_matching(g, mr) &&
                         is_valid_matching(g, ks.partial) && is_valid_matching(g, mm);
      const bool exact = mm.size() == bf;
      const bool extend =
          bf == ks.partial.size() + brute_force_max(detail::residual_after(g, ks));
      if (!(valid && exact && extend)) {
        ++bad;
        if (first_bad.empty())
          first_bad = fmt(" first failure at graph %d (valid=%d exact=%d extend=%d)",
                          rep, valid, exact, extend);
      }
    }

    double worst_w = 0.0;
    for (double x : {-0.3678794, -0.3, -0.2, -0.05, 0.0, 1e-3, 0.1, 0.5, 1.0,
                     2.0, 2.718281828459045, 5.0, 10.0, 50.0, 100.0}) {
      const double w = lambert_w0(x);
      worst_w = std::max(worst_w, std::fabs(w * std::exp(w) - x));
    }

    double worst_lerch = 0.0;
    for (double z = 0.05; z < 0.96; z += 0.05) {
      for (std::uint32_t a : {1u, 2u, 4u, 9u, 40u}) {
        const double lhs = lerch_phi_s1(z, a);
        const double rhs = 1.0 / a + z * lerch_phi_s1(z, a + 1);
        worst_lerch = std::max(worst_lerch, std::fabs(lhs - rhs));
      }
    }

    double worst_fd = 0.0;
    const double h = 1e-5;
    for (double a = 0.05; a < 0.9; a += 0.08) {
      const double exact = 1.0 / ((1.0 - a) * (1.0 - std::log1p(-a)));
      const double fd = (arrival_integral(a + h) - arrival_integral(a - h)) / (2.0 * h);
      worst_fd = std::max(worst_fd, std::fabs(fd - exact));
    }

    const double total = detail::now_s() - t_all;
    const bool ok = bad == 0 && worst_w <= 1e-12 && worst_lerch <= 1e-12 &&
                    worst_fd <= 1e-4 && total < 600.0;
    record(10, ok,
           fmt("500-graph corpus: %d failures%s; Lambert residual %.2e, Lerch "
               "recurrence residual %.2e (both <= 1e-12); arrival-integral FD "
               "error %.2e (<= 1e-4); full run %.0fs (limit 600s)",
               bad, first_bad.c_str(), worst_w, worst_lerch, worst_fd, total));
  });

  int passed = 0;
  for (const auto& c : results) passed += c.pass ? 1 : 0;
  out << "acceptance: " << passed << "/" << results.size() << " criteria passed\n";
  return passed == static_cast<int>(results.size());
}

}  // namespace ocm::acceptance
