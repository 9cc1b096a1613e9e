#pragma once

#include <string>

#include "ocm/analytics.hpp"
#include "ocm/degree_dist.hpp"
#include "ocm/json_writer.hpp"

namespace ocm {

// Closed-form prediction report for a distribution spec. Emits the
// quantities that are defined for the family: the competitive ratio for the
// quasi-complete constructions, the Karp-Sipser fixed point and matching
// bounds for bounded laws, and the extremality pair for the eps-mass family.
// Key order is fixed so identical specs produce byte-identical output.
inline std::string predict_json(const std::string& dist_spec) {
  const DegreeDistribution dist = parse_dist_spec(dist_spec);
  JsonWriter w;
  w.begin_object();
  w.key("dist").value(dist.spec_string());

  if (dist.is_main_law()) {
    w.key("cr").value(cr_main());
    w.end_object();
    return w.str();
  }

  const bool is_du = dist.kind() == DegreeKind::GeneralizedU;
  const double tau = is_du ? dist.u() : 1.0;
  if (is_du) {
    w.key("u").value(dist.u());
    w.key("cr").value(cr_du(dist.u()));
  } else {
    w.key("mean_degree").value(dist.mean_degree());
  }

  if (dist.kind() == DegreeKind::UniformDegree && dist.delta() == 2) {
    // tanh / Lambert closed forms for the degree-2 benchmark instance
    const Degree2Benchmarks b = degree2_benchmarks();
    w.key("greedy").value(b.greedy_fraction);
    w.key("max_matching").value(b.max_fraction);
  } else if (!is_du) {
    w.key("greedy").value(greedy_beta(dist, tau));
  } else {
    w.key("greedy_beta").value(greedy_beta(dist, tau));
  }

  if (dist.mean_degree() > 0.0) {
    const PgfPair p = pgf_pair(dist, tau);
    const FixedPoint fp = fixed_point_solve(p.f_prime, p.f_hat_prime, p.mu);
    const MatchingBounds b = ks_matching_bounds(p.f, p.f_hat, p.f_prime, fp);
    w.key("fixed_point").begin_array().value(fp.w_hat_1).value(fp.w_2).end_array();
    w.key("ks_lower").value(b.lower_fraction);
    w.key("ks_upper").value(b.upper_fraction);
  }

  if (dist.kind() == DegreeKind::EpsMass) {
    const Extremality ex = extremality_alpha(dist.delta(), dist.eps());
    w.key("alpha").value(ex.alpha);
    w.key("psi").value(psi_leading(dist.delta(), dist.eps()));
  }

  w.end_object();
  return w.str();
}

}  // namespace ocm
