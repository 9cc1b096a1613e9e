#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ocm/graph.hpp"
#include "ocm/rng.hpp"

namespace ocm {

inline constexpr std::uint32_t kUnmatched = std::numeric_limits<std::uint32_t>::max();

struct Matching {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;  // (user, ad), user-ascending
  std::uint64_t size() const { return pairs.size(); }
};

// Type invariants of Matching against the graph it was computed on: no user
// or ad twice, every pair an edge (adjacency support; multiplicity ignored).
inline bool is_valid_matching(const BipartiteMultigraph& g, const Matching& m) {
  std::vector<char> user_seen(g.n_users, 0), ad_seen(g.n_ads, 0);
  for (auto [u, a] : m.pairs) {
    if (u >= g.n_users || a >= g.n_ads) return false;
    if (user_seen[u] || ad_seen[a]) return false;
    user_seen[u] = 1;
    ad_seen[a] = 1;
    bool edge = false;
    for (const auto* it = g.nbr_begin(u); it != g.nbr_end(u); ++it)
      if (*it == a) {
        edge = true;
        break;
      }
    if (!edge) return false;
  }
  return true;
}

// Online greedy: users arrive in storage order; a user with at least one
// unmatched neighbor is matched to one drawn uniformly among its distinct
// unmatched neighbors. Irrevocable.
inline Matching greedy_online(const BipartiteMultigraph& g, RandomStream& rng) {
  Matching m;
  std::vector<std::uint32_t> ad_owner(g.n_ads, kUnmatched);
  std::vector<std::uint32_t> stamp(g.n_ads, kUnmatched);
  std::vector<std::uint32_t> candidates;
  for (std::uint32_t u = 0; u < g.n_users; ++u) {
    candidates.clear();
    for (const auto* it = g.nbr_begin(u); it != g.nbr_end(u); ++it) {
      std::uint32_t a = *it;
      if (ad_owner[a] == kUnmatched && stamp[a] != u) {
        stamp[a] = u;
        candidates.push_back(a);
      }
    }
    if (candidates.empty()) continue;
    std::uint32_t a = candidates[rng.next_below(static_cast<std::uint32_t>(candidates.size()))];
    ad_owner[a] = u;
    m.pairs.emplace_back(u, a);
  }
  return m;
}

// RANKING core: each arriving user takes its unmatched neighbor of smallest
// rank. ranks must be a permutation-valued array over ads.
inline Matching ranking_with_ranks(const BipartiteMultigraph& g,
                                   const std::vector<std::uint32_t>& ranks) {
  if (ranks.size() != g.n_ads) throw std::invalid_argument("rank array size mismatch");
  Matching m;
  std::vector<char> ad_taken(g.n_ads, 0);
  for (std::uint32_t u = 0; u < g.n_users; ++u) {
    std::uint32_t best = kUnmatched;
    for (const auto* it = g.nbr_begin(u); it != g.nbr_end(u); ++it) {
      std::uint32_t a = *it;
      if (!ad_taken[a] && (best == kUnmatched || ranks[a] < ranks[best])) best = a;
    }
    if (best == kUnmatched) continue;
    ad_taken[best] = 1;
    m.pairs.emplace_back(u, best);
  }
  return m;
}

// RANKING: one uniform permutation of ads as ranks, then the deterministic core.
inline Matching ranking(const BipartiteMultigraph& g, RandomStream& rng) {
  return ranking_with_ranks(g, random_permutation(g.n_ads, rng));
}

struct KarpSipserOutcome {
  Matching partial;
  std::uint64_t isolated_users = 0;  // degree-0 unmatched users, accumulated
  std::uint64_t isolated_ads = 0;
  std::uint64_t rounds = 0;  // round index at termination, >= 1
  std::uint32_t n_users = 0;
  std::uint32_t n_ads = 0;

  // No matching of the input graph can exceed this.
  std::uint64_t upper_bound() const {
    return std::min<std::uint64_t>(n_users - isolated_users, n_ads - isolated_ads);
  }
};

// Karp-Sipser first phase on the simplified graph, round-based: each round
// processes all vertices that were pendant when the round started (users in
// index order, then ads); matching a pendant edge deletes both endpoints.
// Pendants created mid-round wait for the next round. A queued vertex whose
// degree hit 0 before its turn counts as isolated-unmatched.
inline KarpSipserOutcome karp_sipser_phase1(const BipartiteMultigraph& input) {
  const BipartiteMultigraph g = simplify(input);
  KarpSipserOutcome out;
  out.n_users = g.n_users;
  out.n_ads = g.n_ads;

  // reverse adjacency for the ad side
  std::vector<std::uint64_t> aoff(g.n_ads + 1, 0);
  for (std::uint32_t a : g.ads) ++aoff[a + 1];
  for (std::uint32_t a = 0; a < g.n_ads; ++a) aoff[a + 1] += aoff[a];
  std::vector<std::uint32_t> ausers(g.ads.size());
  {
    std::vector<std::uint64_t> cursor(aoff.begin(), aoff.end() - 1);
    for (std::uint32_t u = 0; u < g.n_users; ++u)
      for (const auto* it = g.nbr_begin(u); it != g.nbr_end(u); ++it)
        ausers[cursor[*it]++] = u;
  }

  std::vector<std::uint32_t> udeg(g.n_users), adeg(g.n_ads, 0);
  for (std::uint32_t u = 0; u < g.n_users; ++u) udeg[u] = g.degree(u);
  for (std::uint32_t a : g.ads) ++adeg[a];
  std::vector<std::uint32_t> umatch(g.n_users, kUnmatched), amatch(g.n_ads, kUnmatched);

  for (std::uint32_t u = 0; u < g.n_users; ++u)
    if (udeg[u] == 0) ++out.isolated_users;
  for (std::uint32_t a = 0; a < g.n_ads; ++a)
    if (adeg[a] == 0) ++out.isolated_ads;

  // queue keys: users are [0, n_users), ads are n_users + index, so sorting
  // a round queue gives users-then-ads in index order
  std::vector<std::uint64_t> round;
  for (std::uint32_t u = 0; u < g.n_users; ++u)
    if (udeg[u] == 1) round.push_back(u);
  for (std::uint32_t a = 0; a < g.n_ads; ++a)
    if (adeg[a] == 1) round.push_back(static_cast<std::uint64_t>(g.n_users) + a);

  std::vector<std::uint64_t> next;
  out.rounds = 1;  // the initial pendant scan is round 1 even when it is empty
  while (!round.empty()) {
    std::sort(round.begin(), round.end());
    next.clear();

    auto drop_edge_to = [&](std::uint32_t user_side, std::uint32_t v) {
      // one live edge incident to v disappears
      std::uint32_t& deg = user_side ? udeg[v] : adeg[v];
      --deg;
      if (deg == 1) {
        next.push_back(user_side ? v : static_cast<std::uint64_t>(g.n_users) + v);
      } else if (deg == 0) {
        if (user_side)
          ++out.isolated_users;
        else
          ++out.isolated_ads;
      }
    };

    for (std::uint64_t key : round) {
      bool user_side = key < g.n_users;
      std::uint32_t v = static_cast<std::uint32_t>(user_side ? key : key - g.n_users);
      if (user_side) {
        if (umatch[v] != kUnmatched || udeg[v] != 1) continue;
        std::uint32_t partner = kUnmatched;
        for (const auto* it = g.nbr_begin(v); it != g.nbr_end(v); ++it)
          if (amatch[*it] == kUnmatched) {
            partner = *it;
            break;
          }
        umatch[v] = partner;
        amatch[partner] = v;
        // deleting both endpoints kills every live edge at the partner
        for (std::uint64_t e = aoff[partner]; e < aoff[partner + 1]; ++e) {
          std::uint32_t other = ausers[e];
          if (other != v && umatch[other] == kUnmatched) drop_edge_to(1, other);
        }
      } else {
        if (amatch[v] != kUnmatched || adeg[v] != 1) continue;
        std::uint32_t partner = kUnmatched;
        for (std::uint64_t e = aoff[v]; e < aoff[v + 1]; ++e)
          if (umatch[ausers[e]] == kUnmatched) {
            partner = ausers[e];
            break;
          }
        amatch[v] = partner;
        umatch[partner] = v;
        for (const auto* it = g.nbr_begin(partner); it != g.nbr_end(partner); ++it) {
          std::uint32_t other = *it;
          if (other != v && amatch[other] == kUnmatched) drop_edge_to(0, other);
        }
      }
    }
    if (next.empty()) break;
    round.swap(next);
    ++out.rounds;
  }

  for (std::uint32_t u = 0; u < g.n_users; ++u)
    if (umatch[u] != kUnmatched) out.partial.pairs.emplace_back(u, umatch[u]);
  return out;
}

// Maximum-cardinality matching of the simplified graph (Hopcroft-Karp, BFS
// layering plus iterative DFS augmentation).
inline Matching hopcroft_karp(const BipartiteMultigraph& input) {
  const BipartiteMultigraph g = simplify(input);
  const std::uint32_t INF = kUnmatched;
  std::vector<std::uint32_t> pu(g.n_users, kUnmatched), pa(g.n_ads, kUnmatched);
  std::vector<std::uint32_t> dist(g.n_users);
  std::vector<std::uint32_t> bfs;
  bfs.reserve(g.n_users);

  auto bfs_layers = [&]() -> bool {
    bfs.clear();
    for (std::uint32_t u = 0; u < g.n_users; ++u) {
      if (pu[u] == kUnmatched) {
        dist[u] = 0;
        bfs.push_back(u);
      } else {
        dist[u] = INF;
      }
    }
    bool reachable_free_ad = false;
    for (std::size_t head = 0; head < bfs.size(); ++head) {
      std::uint32_t u = bfs[head];
      for (const auto* it = g.nbr_begin(u); it != g.nbr_end(u); ++it) {
        std::uint32_t w = pa[*it];
        if (w == kUnmatched) {
          reachable_free_ad = true;
        } else if (dist[w] == INF) {
          dist[w] = dist[u] + 1;
          bfs.push_back(w);
        }
      }
    }
    return reachable_free_ad;
  };

  // Iterative DFS over the layered graph; frame = (user, next edge offset).
  std::vector<std::pair<std::uint32_t, std::uint64_t>> stack;
  auto try_augment = [&](std::uint32_t root) -> bool {
    stack.clear();
    stack.emplace_back(root, g.offsets[root]);
    while (!stack.empty()) {
      auto& [u, eidx] = stack.back();
      if (eidx == g.offsets[u + 1]) {
        dist[u] = INF;  // dead end; prune for this phase
        stack.pop_back();
        if (!stack.empty()) ++stack.back().second;
        continue;
      }
      std::uint32_t a = g.ads[eidx];
      std::uint32_t w = pa[a];
      if (w == kUnmatched) {
        // augment along the stack
        for (std::size_t i = stack.size(); i-- > 0;) {
          std::uint32_t su = stack[i].first;
          std::uint32_t sa = g.ads[stack[i].second];
          pu[su] = sa;
          pa[sa] = su;
        }
        return true;
      }
      if (dist[w] == dist[u] + 1) {
        stack.emplace_back(w, g.offsets[w]);
      } else {
        ++eidx;
      }
    }
    return false;
  };

  while (bfs_layers()) {
    bool any = false;
    for (std::uint32_t u = 0; u < g.n_users; ++u)
      if (pu[u] == kUnmatched && dist[u] == 0 && try_augment(u)) any = true;
    if (!any) break;
  }

  Matching m;
  for (std::uint32_t u = 0; u < g.n_users; ++u)
    if (pu[u] != kUnmatched) m.pairs.emplace_back(u, pu[u]);
  return m;
}

// Exact maximum matching size by bitmask DP over ads; independent of the
// Hopcroft-Karp code path on purpose (test oracle).
inline std::uint64_t brute_force_max(const BipartiteMultigraph& g) {
  if (g.n_users > 12 || g.n_ads > 12) throw std::invalid_argument("instance too large");
  std::vector<std::uint32_t> nbr_mask(g.n_users, 0);
  for (std::uint32_t u = 0; u < g.n_users; ++u)
    for (const auto* it = g.nbr_begin(u); it != g.nbr_end(u); ++it)
      nbr_mask[u] |= 1u << *it;

  const std::uint32_t masks = 1u << g.n_ads;
  // best[mask] = max matching using users [i..n) with ads in mask still free
  std::vector<std::int8_t> best(masks, 0), prev(masks, 0);
  for (std::uint32_t i = g.n_users; i-- > 0;) {
    prev.swap(best);
    for (std::uint32_t mask = 0; mask < masks; ++mask) {
      std::int8_t b = prev[mask];  // skip user i
      std::uint32_t avail = nbr_mask[i] & mask;
      while (avail) {
        std::uint32_t bit = avail & (0u - avail);
        avail ^= bit;
        std::int8_t cand = static_cast<std::int8_t>(1 + prev[mask ^ bit]);
        if (cand > b) b = cand;
      }
      best[mask] = b;
    }
  }
  return static_cast<std::uint64_t>(best[masks - 1]);
}

}  // namespace ocm
