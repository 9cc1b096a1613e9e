#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "ocm/degree_dist.hpp"
#include "ocm/graph.hpp"
#include "ocm/rng.hpp"

namespace ocm {

struct DegreeSequence {
  std::vector<std::uint32_t> user_degrees;
  std::vector<std::uint32_t> ad_degrees;
};

// Conditional layer of the cuckoo model: user degrees given, each incident ad
// uniform in [0, n_ads) with replacement, adjacency in sampling order.
template <class RNG>
BipartiteMultigraph cuckoo_from_degrees(std::uint32_t n_ads,
                                        const std::vector<std::uint32_t>& degrees, RNG& rng) {
  if (n_ads < 1) throw std::invalid_argument("n_ads must be >= 1");
  BipartiteMultigraph g;
  g.n_users = static_cast<std::uint32_t>(degrees.size());
  g.n_ads = n_ads;
  g.origin = GraphOrigin::Cuckoo;
  std::uint64_t total = 0;
  for (std::uint32_t d : degrees) total += d;
  g.ads.reserve(total);
  g.offsets.reserve(degrees.size() + 1);
  for (std::uint32_t d : degrees) {
    for (std::uint32_t k = 0; k < d; ++k) g.ads.push_back(rng.next_below(n_ads));
    g.offsets.push_back(g.ads.size());
  }
  return g;
}

// Irregular cuckoo hashing model: degrees i.i.d. from dist (capped at n_ads
// unless the distribution carries its own cap), then uniform ad choices.
template <class RNG>
BipartiteMultigraph sample_cuckoo(std::uint32_t n_users, std::uint32_t n_ads,
                                  const DegreeDistribution& dist, RNG& rng) {
  if (n_ads < 1) throw std::invalid_argument("n_ads must be >= 1");
  const DegreeDistribution capped =
      dist.cap() == DegreeDistribution::kNoCap ? dist.with_cap(n_ads) : dist;
  std::vector<std::uint32_t> degrees(n_users);
  for (std::uint32_t u = 0; u < n_users; ++u) degrees[u] = capped.sample(rng);
  return cuckoo_from_degrees(n_ads, degrees, rng);
}

// Configuration model: one configuration point per degree unit on each side;
// the ad-side point sequence is shuffled uniformly and paired positionally,
// which is exactly uniform over perfect pairings of the points.
template <class RNG>
BipartiteMultigraph sample_config_model(const DegreeSequence& seq, RNG& rng) {
  std::uint64_t user_total = 0, ad_total = 0;
  for (std::uint32_t d : seq.user_degrees) user_total += d;
  for (std::uint32_t d : seq.ad_degrees) ad_total += d;
  if (user_total != ad_total) throw std::invalid_argument("degree sums differ");

  std::vector<std::uint32_t> points;
  points.reserve(ad_total);
  for (std::uint32_t a = 0; a < seq.ad_degrees.size(); ++a)
    for (std::uint32_t k = 0; k < seq.ad_degrees[a]; ++k) points.push_back(a);
  fisher_yates(points, rng);

  BipartiteMultigraph g;
  g.n_users = static_cast<std::uint32_t>(seq.user_degrees.size());
  g.n_ads = static_cast<std::uint32_t>(seq.ad_degrees.size());
  g.origin = GraphOrigin::ConfigModel;
  g.ads = std::move(points);
  g.offsets.reserve(g.n_users + 1);
  std::uint64_t pos = 0;
  for (std::uint32_t d : seq.user_degrees) {
    pos += d;
    g.offsets.push_back(pos);
  }
  return g;
}

}  // namespace ocm
