#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ocm {

enum class GraphOrigin : std::uint8_t { Cuckoo, ConfigModel, Explicit };

// Users x ads multigraph in CSR form. Per-user adjacency keeps multiset
// semantics and sampling order; instances reach ~10^7 edges so the edge
// array is flat and offsets are 64-bit.
struct BipartiteMultigraph {
  std::uint32_t n_users = 0;
  std::uint32_t n_ads = 0;
  std::vector<std::uint64_t> offsets{0};  // n_users + 1 entries
  std::vector<std::uint32_t> ads;         // flat adjacency, arrival order
  GraphOrigin origin = GraphOrigin::Explicit;

  std::uint64_t edge_count() const { return ads.size(); }

  std::uint32_t degree(std::uint32_t user) const {
    return static_cast<std::uint32_t>(offsets[user + 1] - offsets[user]);
  }

  const std::uint32_t* nbr_begin(std::uint32_t user) const { return ads.data() + offsets[user]; }
  const std::uint32_t* nbr_end(std::uint32_t user) const { return ads.data() + offsets[user + 1]; }

  static BipartiteMultigraph from_adjacency(std::uint32_t n_ads,
                                            const std::vector<std::vector<std::uint32_t>>& adj,
                                            GraphOrigin origin = GraphOrigin::Explicit) {
    BipartiteMultigraph g;
    g.n_users = static_cast<std::uint32_t>(adj.size());
    g.n_ads = n_ads;
    g.origin = origin;
    g.offsets.reserve(adj.size() + 1);
    std::uint64_t total = 0;
    for (const auto& row : adj) total += row.size();
    g.ads.reserve(total);
    for (const auto& row : adj) {
      for (std::uint32_t a : row) {
        if (a >= n_ads) throw std::invalid_argument("ad index out of range");
        g.ads.push_back(a);
      }
      g.offsets.push_back(g.ads.size());
    }
    return g;
  }

  // Debug dump: line 1 "n_users n_ads", then one line per user with
  // space-separated ad indices. Every line newline-terminated.
  void dump(std::ostream& out) const {
    out << n_users << ' ' << n_ads << '\n';
    for (std::uint32_t u = 0; u < n_users; ++u) {
      const std::uint32_t* it = nbr_begin(u);
      const std::uint32_t* end = nbr_end(u);
      for (; it != end; ++it) {
        if (it != nbr_begin(u)) out << ' ';
        out << *it;
      }
      out << '\n';
    }
  }
};

// Parallel-edge removal keeping the first occurrence of each ad per user.
// Idempotent; never increases a degree; user and ad counts unchanged.
inline BipartiteMultigraph simplify(const BipartiteMultigraph& g) {
  BipartiteMultigraph out;
  out.n_users = g.n_users;
  out.n_ads = g.n_ads;
  out.origin = g.origin;
  out.offsets.reserve(g.n_users + 1);
  out.ads.reserve(g.ads.size());
  // stamp[a] = u+1 when ad a was already seen for user u
  std::vector<std::uint32_t> stamp(g.n_ads, 0);
  for (std::uint32_t u = 0; u < g.n_users; ++u) {
    for (const std::uint32_t* it = g.nbr_begin(u); it != g.nbr_end(u); ++it) {
      if (stamp[*it] != u + 1) {
        stamp[*it] = u + 1;
        out.ads.push_back(*it);
      }
    }
    out.offsets.push_back(out.ads.size());
  }
  return out;
}

// Exact degree -> count maps for both sides; ad degrees count multiplicity.
inline std::pair<std::map<std::uint32_t, std::uint64_t>, std::map<std::uint32_t, std::uint64_t>>
degree_histogram(const BipartiteMultigraph& g) {
  std::map<std::uint32_t, std::uint64_t> users;
  for (std::uint32_t u = 0; u < g.n_users; ++u) ++users[g.degree(u)];
  std::vector<std::uint64_t> ad_deg(g.n_ads, 0);
  for (std::uint32_t a : g.ads) ++ad_deg[a];
  std::map<std::uint32_t, std::uint64_t> adsm;
  for (std::uint64_t d : ad_deg) ++adsm[static_cast<std::uint32_t>(d)];
  return {std::move(users), std::move(adsm)};
}

}  // namespace ocm
