#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "ocm/analytics.hpp"
#include "ocm/degree_dist.hpp"
#include "ocm/graph_gen.hpp"
#include "ocm/json_writer.hpp"
#include "ocm/matching.hpp"
#include "ocm/rng.hpp"

namespace ocm {

enum class Alg { Greedy, Ranking, KarpSipser, MaxMatching };

inline const char* alg_name(Alg a) {
  switch (a) {
    case Alg::Greedy: return "greedy";
    case Alg::Ranking: return "ranking";
    case Alg::KarpSipser: return "karp_sipser";
    case Alg::MaxMatching: return "max_matching";
  }
  return "";
}

inline Alg alg_from_name(const std::string& s) {
  if (s == "greedy") return Alg::Greedy;
  if (s == "ranking") return Alg::Ranking;
  if (s == "karp_sipser") return Alg::KarpSipser;
  if (s == "max_matching") return Alg::MaxMatching;
  throw std::invalid_argument("unknown algorithm: " + s);
}

struct ExperimentConfig {
  std::string dist_spec;
  std::uint32_t n_users = 0;
  std::uint32_t n_ads = 0;
  std::uint32_t trials = 1;
  std::uint64_t master_seed = 0;
  std::vector<Alg> algorithms;
  unsigned workers = 0;  // 0 = hardware concurrency
};

struct TrialRecord {
  std::uint32_t trial_index = 0;
  std::uint64_t edges = 0;
  std::optional<std::uint32_t> greedy_size;
  std::optional<std::uint32_t> ranking_size;
  std::optional<std::uint32_t> ks_size;
  std::optional<std::uint32_t> ks_upper_bound;
  std::optional<std::uint32_t> max_size;
  // wall times; excluded from determinism comparisons and stdout JSON
  double ms_greedy = 0.0, ms_ranking = 0.0, ms_ks = 0.0, ms_max = 0.0;
};

struct MetricStats {
  double mean = 0.0, sd = 0.0, min = 0.0, max = 0.0;
};

struct Prediction {
  double value = 0.0;
  bool has_interval = false;
  double lo = 0.0, hi = 0.0;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<TrialRecord> trials;
  std::map<std::string, MetricStats> stats;       // fractions of min(n_users, n_ads)
  std::map<std::string, Prediction> predictions;  // filled by compare_analytic
  std::map<std::string, double> deltas;           // empirical mean - prediction
  std::vector<std::string> warnings;
};

namespace detail {

inline bool wants(const ExperimentConfig& cfg, Alg a) {
  return std::find(cfg.algorithms.begin(), cfg.algorithms.end(), a) != cfg.algorithms.end();
}

inline double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

inline TrialRecord run_one_trial(const DegreeDistribution& dist, const ExperimentConfig& cfg,
                                 std::uint32_t t) {
  TrialRecord rec;
  rec.trial_index = t;
  RandomStream graph_rng = trial_stream(cfg.master_seed, t, 0);
  BipartiteMultigraph g = sample_cuckoo(cfg.n_users, cfg.n_ads, dist, graph_rng);
  rec.edges = g.edge_count();
  if (wants(cfg, Alg::Greedy)) {
    RandomStream rng = trial_stream(cfg.master_seed, t, 1);
    double t0 = now_ms();
    rec.greedy_size = static_cast<std::uint32_t>(greedy_online(g, rng).size());
    rec.ms_greedy = now_ms() - t0;
  }
  if (wants(cfg, Alg::Ranking)) {
    RandomStream rng = trial_stream(cfg.master_seed, t, 2);
    double t0 = now_ms();
    rec.ranking_size = static_cast<std::uint32_t>(ranking(g, rng).size());
    rec.ms_ranking = now_ms() - t0;
  }
  if (wants(cfg, Alg::KarpSipser)) {
    double t0 = now_ms();
    KarpSipserOutcome out = karp_sipser_phase1(g);
    rec.ms_ks = now_ms() - t0;
    rec.ks_size = static_cast<std::uint32_t>(out.partial.size());
    rec.ks_upper_bound = out.upper_bound();
  }
  if (wants(cfg, Alg::MaxMatching)) {
    double t0 = now_ms();
    rec.max_size = static_cast<std::uint32_t>(hopcroft_karp(g).size());
    rec.ms_max = now_ms() - t0;
  }
  return rec;
}

inline MetricStats stats_of(const std::vector<double>& xs) {
  MetricStats s;
  if (xs.empty()) return s;
  double sum = 0.0;
  s.min = s.max = xs[0];
  for (double x : xs) {
    sum += x;
    s.min = std::min(s.min, x);
    s.max = std::max(s.max, x);
  }
  s.mean = sum / xs.size();
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / (xs.size() - 1));
  }
  return s;
}

inline void validate(const ExperimentConfig& cfg) {
  if (cfg.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (cfg.n_ads < 1) throw std::invalid_argument("n_ads must be >= 1");
  if (cfg.n_users < 1) throw std::invalid_argument("n_users must be >= 1");
  if (cfg.algorithms.empty()) throw std::invalid_argument("algorithms must be nonempty");
}

inline ExperimentReport run_trials_impl(const DegreeDistribution& dist,
                                        const ExperimentConfig& cfg) {
  validate(cfg);
  ExperimentReport report;
  report.config = cfg;
  if (wants(cfg, Alg::MaxMatching) && cfg.n_users > 1'000'000u)
    report.warnings.push_back("oracle too slow: max_matching requested with n_users > 10^6");

  report.trials.resize(cfg.trials);
  unsigned workers = cfg.workers ? cfg.workers : std::thread::hardware_concurrency();
  if (workers < 1) workers = 1;
  workers = std::min<unsigned>(workers, cfg.trials);

  std::atomic<std::uint32_t> next{0};
  std::mutex err_mu;
  std::exception_ptr first_error;
  auto body = [&]() {
    for (;;) {
      std::uint32_t t = next.fetch_add(1);
      if (t >= cfg.trials) return;
      try {
        report.trials[t] = run_one_trial(dist, cfg, t);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  if (workers == 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  // fractions of the min side, accumulated as exact integer sums
  double denom = static_cast<double>(std::min(cfg.n_users, cfg.n_ads));
  auto collect = [&](const char* name, auto getter) {
    std::vector<double> xs;
    xs.reserve(cfg.trials);
    for (const TrialRecord& r : report.trials) {
      auto v = getter(r);
      if (v) xs.push_back(*v / denom);
    }
    if (!xs.empty()) report.stats[name] = stats_of(xs);
  };
  collect("greedy", [](const TrialRecord& r) { return r.greedy_size; });
  collect("ranking", [](const TrialRecord& r) { return r.ranking_size; });
  collect("karp_sipser", [](const TrialRecord& r) { return r.ks_size; });
  collect("ks_upper", [](const TrialRecord& r) { return r.ks_upper_bound; });
  collect("max_matching", [](const TrialRecord& r) { return r.max_size; });

  // measured ratios against the oracle when it ran
  if (wants(cfg, Alg::MaxMatching)) {
    auto ratio = [&](const char* name, auto getter) {
      std::vector<double> xs;
      for (const TrialRecord& r : report.trials) {
        auto v = getter(r);
        if (v && r.max_size && *r.max_size > 0)
          xs.push_back(static_cast<double>(*v) / *r.max_size);
      }
      if (!xs.empty()) report.stats[name] = stats_of(xs);
    };
    ratio("greedy_over_max", [](const TrialRecord& r) { return r.greedy_size; });
    ratio("ranking_over_max", [](const TrialRecord& r) { return r.ranking_size; });
    ratio("karp_sipser_over_max", [](const TrialRecord& r) { return r.ks_size; });
  }
  return report;
}

}  // namespace detail

// Seeded Monte Carlo experiment: one independent stream per (trial, stage),
// so results are bit-identical for a fixed config regardless of workers.
inline ExperimentReport run_trials(const ExperimentConfig& cfg) {
  DegreeDistribution dist = parse_dist_spec(cfg.dist_spec);
  return detail::run_trials_impl(dist, cfg);
}

// Attaches analytic predictions (as fractions of the min side) and deltas.
// Explicit distributions have no paper model.
inline ExperimentReport compare_analytic(ExperimentReport report) {
  DegreeDistribution dist = parse_dist_spec(report.config.dist_spec);
  if (dist.kind() == DegreeKind::Explicit) throw std::runtime_error("no analytic model");
  double tau = static_cast<double>(report.config.n_users) / report.config.n_ads;
  double min_frac = std::min(tau, 1.0);  // min side as a fraction of n_ads

  if (detail::wants(report.config, Alg::Greedy)) {
    Prediction p;
    p.value = greedy_beta(dist, tau) / min_frac;
    report.predictions["greedy"] = p;
  }

  bool finite = dist.finite_support();
  if (finite && tau <= 1.0) {
    PgfPair pg = pgf_pair(dist, tau);
    FixedPoint fp = fixed_point_solve(pg.f_prime, pg.f_hat_prime, pg.mu);
    MatchingBounds b = ks_matching_bounds(pg.f, pg.f_hat, pg.f_prime, fp);
    if (detail::wants(report.config, Alg::KarpSipser)) {
      Prediction p;
      p.value = b.lower_fraction / min_frac;
      p.has_interval = true;
      p.lo = b.lower_fraction / min_frac;
      p.hi = std::min(b.upper_fraction / min_frac, 1.0);
      report.predictions["karp_sipser"] = p;
    }
    if (detail::wants(report.config, Alg::MaxMatching)) {
      Prediction p;
      p.value = std::min(b.upper_fraction / min_frac, 1.0);
      p.has_interval = true;
      p.lo = std::max(p.value - 0.02, 0.0);
      p.hi = std::min(p.value + 0.01, 1.0);
      report.predictions["max_matching"] = p;
    }
  } else if (!finite && detail::wants(report.config, Alg::MaxMatching)) {
    // unbounded main law: the offline matching is quasi-complete
    Prediction p;
    p.value = 1.0;
    p.has_interval = true;
    p.lo = 0.98;
    p.hi = 1.0;
    report.predictions["max_matching"] = p;
  }

  for (const auto& [name, pred] : report.predictions) {
    auto it = report.stats.find(name);
    if (it != report.stats.end()) report.deltas[name] = it->second.mean - pred.value;
  }
  return report;
}

namespace detail {

// Replays a fixed script of next_below draws; enumeration over all scripts
// visits every equally likely outcome of the generator exactly once.
struct ScriptedStream {
  const std::vector<std::uint32_t>* vals;
  std::size_t idx = 0;
  std::uint32_t next_below(std::uint32_t bound) {
    if (idx >= vals->size() || (*vals)[idx] >= bound)
      throw std::logic_error("scripted stream misuse");
    return (*vals)[idx++];
  }
};

inline std::string graph_key(const BipartiteMultigraph& g) {
  // multiplicity matrix of the labeled multigraph
  std::string key(static_cast<std::size_t>(g.n_users) * g.n_ads, '0');
  for (std::uint32_t u = 0; u < g.n_users; ++u)
    for (const std::uint32_t* it = g.nbr_begin(u); it != g.nbr_end(u); ++it)
      ++key[static_cast<std::size_t>(u) * g.n_ads + *it];
  return key;
}

}  // namespace detail

// Desk-scale exhaustive check of the conditional-law coupling: user degrees
// (1,2,1) on 3 ads. Every ad-choice tuple of the cuckoo layer is enumerated
// and bucketed by the induced ad-degree sequence; for each bucket the
// conditional law is compared against the configuration model on the same
// degree sequence (all pairings enumerated via the shuffle's choice script).
// Returns the worst total-variation distance over buckets.
inline double coupling_enumeration_test() {
  const std::vector<std::uint32_t> user_degrees = {1, 2, 1};
  const std::uint32_t n_ads = 3;
  const std::uint32_t stubs = 4;

  std::map<std::array<std::uint32_t, 3>, std::map<std::string, double>> cuckoo;
  std::map<std::array<std::uint32_t, 3>, double> bucket_mass;
  std::vector<std::uint32_t> script(stubs);
  const double tuple_p = 1.0 / 81.0;  // 3^4 equally likely tuples
  for (std::uint32_t code = 0; code < 81; ++code) {
    std::uint32_t c = code;
    for (std::uint32_t i = 0; i < stubs; ++i) {
      script[i] = c % 3;
      c /= 3;
    }
    detail::ScriptedStream s{&script};
    BipartiteMultigraph g = cuckoo_from_degrees(n_ads, user_degrees, s);
    std::array<std::uint32_t, 3> adseq = {0, 0, 0};
    for (std::uint32_t a : g.ads) ++adseq[a];
    cuckoo[adseq][detail::graph_key(g)] += tuple_p;
    bucket_mass[adseq] += tuple_p;
  }

  double worst = 0.0;
  for (const auto& [adseq, bucket] : cuckoo) {
    // configuration model on the same sequence: 4 ad-side points shuffled,
    // scripts (j0 < 4, j1 < 3, j2 < 2) cover all 4! pairings uniformly
    std::map<std::string, double> config;
    DegreeSequence seq;
    seq.user_degrees = user_degrees;
    seq.ad_degrees.assign(adseq.begin(), adseq.end());
    std::vector<std::uint32_t> shuffle_script(3);
    for (std::uint32_t j0 = 0; j0 < 4; ++j0)
      for (std::uint32_t j1 = 0; j1 < 3; ++j1)
        for (std::uint32_t j2 = 0; j2 < 2; ++j2) {
          shuffle_script = {j0, j1, j2};
          detail::ScriptedStream s{&shuffle_script};
          BipartiteMultigraph g = sample_config_model(seq, s);
          config[detail::graph_key(g)] += 1.0 / 24.0;
        }

    double mass = bucket_mass.at(adseq);
    double tv = 0.0;
    for (const auto& [key, p] : bucket) {
      auto it = config.find(key);
      double q = it == config.end() ? 0.0 : it->second;
      tv += std::fabs(p / mass - q);
    }
    for (const auto& [key, q] : config)
      if (!bucket.count(key)) tv += q;
    worst = std::max(worst, tv / 2.0);
  }
  return worst;
}

struct CurveRow {
  double u = 0.0;
  double analytic = 0.0;
  double empirical = 0.0;
  double delta = 0.0;
};

struct CurveTable {
  std::vector<CurveRow> rows;
  double min_analytic_u = 0.0;
  double min_empirical_u = 0.0;
};

// Sweeps the D_u family: analytic cr_du(u) against the Monte Carlo greedy
// fraction on ceil(u*n) users and n ads.
inline CurveTable curve_sweep(const std::vector<double>& u_values, std::uint32_t n,
                              std::uint32_t trials, std::uint64_t master_seed,
                              unsigned workers = 0) {
  if (u_values.empty()) throw std::invalid_argument("u list must be nonempty");
  CurveTable table;
  for (double u : u_values) {
    if (!(u > 0.0) || u > 1.0) throw std::domain_error("u must be in (0,1]");
    CurveRow row;
    row.u = u;
    row.analytic = cr_du(u);

    ExperimentConfig cfg;
    char buf[40];
    std::snprintf(buf, sizeof buf, "du:%.17g", u);
    cfg.dist_spec = buf;
    cfg.n_users = static_cast<std::uint32_t>(std::ceil(u * static_cast<double>(n)));
    cfg.n_ads = n;
    cfg.trials = trials;
    cfg.master_seed = master_seed;
    cfg.algorithms = {Alg::Greedy};
    cfg.workers = workers;
    ExperimentReport rep =
        detail::run_trials_impl(DegreeDistribution::generalized_u(u), cfg);
    row.empirical = rep.stats.at("greedy").mean;
    row.delta = row.empirical - row.analytic;
    table.rows.push_back(row);
  }
  const CurveRow* amin = &table.rows[0];
  const CurveRow* emin = &table.rows[0];
  for (const CurveRow& r : table.rows) {
    if (r.analytic < amin->analytic) amin = &r;
    if (r.empirical < emin->empirical) emin = &r;
  }
  table.min_analytic_u = amin->u;
  table.min_empirical_u = emin->u;
  return table;
}

// CSV artifact: one row per trial, sizes as raw counts, empty fields for
// algorithms that were not requested, wall times in milliseconds. Timing
// cells can be left empty so identical runs produce identical files.
inline void write_trials_csv(const ExperimentReport& report, std::ostream& os,
                             bool include_timings = true) {
  os << "trial,n_users,n_ads,edges,greedy,ranking,karp_sipser,ks_upper,max_matching,"
        "ms_greedy,ms_ranking,ms_ks,ms_max\n";
  auto opt = [](const std::optional<std::uint32_t>& v) {
    return v ? std::to_string(*v) : std::string();
  };
  auto ms = [include_timings](bool present, double v) {
    if (!present || !include_timings) return std::string();
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const TrialRecord& r : report.trials) {
    os << r.trial_index << ',' << report.config.n_users << ',' << report.config.n_ads << ','
       << r.edges << ',' << opt(r.greedy_size) << ',' << opt(r.ranking_size) << ','
       << opt(r.ks_size) << ',' << opt(r.ks_upper_bound) << ',' << opt(r.max_size) << ','
       << ms(r.greedy_size.has_value(), r.ms_greedy) << ','
       << ms(r.ranking_size.has_value(), r.ms_ranking) << ','
       << ms(r.ks_size.has_value(), r.ms_ks) << ',' << ms(r.max_size.has_value(), r.ms_max)
       << '\n';
  }
}

// JSON mirror of the report. Wall times are emitted only on request so that
// identical configs produce byte-identical output.
inline std::string report_to_json(const ExperimentReport& report, bool include_timings = false) {
  JsonWriter w;
  w.begin_object();
  w.key("config").begin_object();
  w.key("dist_spec").value(report.config.dist_spec);
  w.key("n_users").value(report.config.n_users);
  w.key("n_ads").value(report.config.n_ads);
  w.key("trials").value(report.config.trials);
  w.key("master_seed").value(report.config.master_seed);
  w.key("algorithms").begin_array();
  for (Alg a : report.config.algorithms) w.value(alg_name(a));
  w.end_array();
  w.key("workers").value(static_cast<std::uint64_t>(report.config.workers));
  w.end_object();

  w.key("trials").begin_array();
  for (const TrialRecord& r : report.trials) {
    w.begin_object();
    w.key("trial_index").value(r.trial_index);
    w.key("edges").value(r.edges);
    auto field = [&](const char* name, const std::optional<std::uint32_t>& v) {
      if (v) w.key(name).value(*v);
    };
    field("greedy_size", r.greedy_size);
    field("ranking_size", r.ranking_size);
    field("ks_size", r.ks_size);
    field("ks_upper_bound", r.ks_upper_bound);
    field("max_size", r.max_size);
    if (include_timings) {
      if (r.greedy_size) w.key("ms_greedy").value(r.ms_greedy);
      if (r.ranking_size) w.key("ms_ranking").value(r.ms_ranking);
      if (r.ks_size) w.key("ms_ks").value(r.ms_ks);
      if (r.max_size) w.key("ms_max").value(r.ms_max);
    }
    w.end_object();
  }
  w.end_array();

  w.key("stats").begin_object();
  for (const auto& [name, s] : report.stats) {
    w.key(name).begin_object();
    w.key("mean").value(s.mean);
    w.key("sd").value(s.sd);
    w.key("min").value(s.min);
    w.key("max").value(s.max);
    w.end_object();
  }
  w.end_object();

  w.key("predictions").begin_object();
  for (const auto& [name, p] : report.predictions) {
    w.key(name).begin_object();
    w.key("value").value(p.value);
    if (p.has_interval) {
      w.key("interval").begin_array().value(p.lo).value(p.hi).end_array();
    }
    w.end_object();
  }
  w.end_object();

  w.key("deltas").begin_object();
  for (const auto& [name, d] : report.deltas) w.key(name).value(d);
  w.end_object();

  w.key("warnings").begin_array();
  for (const std::string& m : report.warnings) w.value(m);
  w.end_array();

  w.end_object();
  return w.str();
}

inline std::string curve_to_json(const CurveTable& table) {
  JsonWriter w;
  w.begin_object();
  w.key("rows").begin_array();
  for (const CurveRow& r : table.rows) {
    w.begin_object();
    w.key("u").value(r.u);
    w.key("analytic").value(r.analytic);
    w.key("empirical").value(r.empirical);
    w.key("delta").value(r.delta);
    w.end_object();
  }
  w.end_array();
  w.key("min_analytic_u").value(table.min_analytic_u);
  w.key("min_empirical_u").value(table.min_empirical_u);
  w.end_object();
  return w.str();
}

}  // namespace ocm
