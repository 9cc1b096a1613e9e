#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "ocm/degree_dist.hpp"

namespace ocm {

inline double harmonic(std::uint32_t k) {
  double h = 0.0;
  for (std::uint32_t i = 1; i <= k; ++i) h += 1.0 / i;
  return h;
}

// q(x) = (1-x)(1 - ln(1-x)) = 1 - sum_{j>=2} x^j/(j(j-1)): the probability
// that an arriving main-law user finds an unmatched neighbor when a fraction
// x of ads is matched.
inline double q_availability(double x) {
  if (!(x >= 0.0) || x >= 1.0) throw std::domain_error("q_availability: x must be in [0,1)");
  return (1.0 - x) * (1.0 - std::log1p(-x));
}

// integral of 1/q_availability from 0 to a, in closed form
inline double arrival_integral(double a) {
  if (!(a >= 0.0) || a >= 1.0) throw std::domain_error("arrival_integral: a must be in [0,1)");
  return std::log(1.0 - std::log1p(-a));
}

// headline competitive ratio 1 - e^{1-e}
inline double cr_main() { return 1.0 - std::exp(1.0 - std::exp(1.0)); }

// principal-branch Lambert W by damped Halley iteration
inline double lambert_w0(double x) {
  double branch = -std::exp(-1.0);
  if (x < branch) throw std::domain_error("lambert_w0: x must be >= -1/e");
  if (x == 0.0) return 0.0;
  double w;
  if (x < -0.25) {
    // series around the branch point in p = sqrt(2(ex+1))
    double p = std::sqrt(2.0 * (std::exp(1.0) * x + 1.0));
    w = -1.0 + p - p * p / 3.0 + 11.0 * p * p * p / 72.0;
  } else if (x < 3.0) {
    w = x / (1.0 + x);  // crude but inside the basin
  } else {
    w = std::log(x) - std::log(std::log(x));
  }
  for (int it = 0; it < 200; ++it) {
    double ew = std::exp(w);
    double f = w * ew - x;
    if (std::fabs(f) <= 1e-14 * (1.0 + std::fabs(x))) break;
    double d1 = ew * (1.0 + w);
    double d2 = ew * (2.0 + w);
    double denom = d1 - f * d2 / (2.0 * d1);
    double step = (denom != 0.0) ? f / denom : f / d1;
    if (step > 0.5) step = 0.5;  // damping keeps w above the branch point
    if (step < -0.5) step = -0.5;
    double next = w - step;
    if (next < -1.0) next = (w - 1.0) / 2.0;
    w = next;
  }
  return w;
}

struct Degree2Benchmarks {
  double greedy_fraction;  // tanh(1)
  double max_fraction;     // 1 + W/2 + W^2/4 with W = W(-2 e^{-2})
};

inline Degree2Benchmarks degree2_benchmarks() {
  double w = lambert_w0(-2.0 * std::exp(-2.0));
  return {std::tanh(1.0), 1.0 + w / 2.0 + w * w / 4.0};
}

// Lerch transcendent at s=1: Phi(z,1,a) = sum_{k>=0} z^k/(k+a). The log
// identity z^a Phi = -ln(1-z) - sum_{i<a} z^i/i is exact and stable for z
// away from 0; raw series converges fast near 0.
inline double lerch_phi_s1(double z, std::uint32_t alpha) {
  if (!(z >= 0.0) || z >= 1.0) throw std::domain_error("lerch_phi_s1: z must be in [0,1)");
  if (alpha < 1) throw std::invalid_argument("lerch_phi_s1: alpha must be >= 1");
  if (z == 0.0) return 1.0 / alpha;
  // The closed form (-log(1-z) - sum) / z^alpha cancels catastrophically
  // once z^alpha << 1, so it is reserved for z near 1 where the direct
  // series stalls and z^alpha stays O(1) for small alpha.
  if (z > 0.99 && alpha <= 64) {
    // compensated summation of the finite part
    double sum = 0.0, comp = 0.0, zp = 1.0;
    for (std::uint32_t i = 1; i < alpha; ++i) {
      zp *= z;
      double term = zp / i - comp;
      double t = sum + term;
      comp = (t - sum) - term;
      sum = t;
    }
    double za = zp * z;  // z^alpha
    return (-std::log1p(-z) - sum) / za;
  }
  double sum = 0.0, comp = 0.0, zp = 1.0;
  for (std::uint64_t k = 0; k < 10'000'000; ++k) {
    double term = zp / (static_cast<double>(k) + alpha) - comp;
    double t = sum + term;
    comp = (t - sum) - term;
    sum = t;
    zp *= z;
    if (zp / (static_cast<double>(k) + 1.0 + alpha) < 1e-18 * sum) return sum;
  }
  throw std::runtime_error("lerch_phi_s1: series did not converge");
}

inline double poisson_pmf(double lambda, std::uint32_t i) {
  if (!(lambda > 0.0)) throw std::domain_error("poisson_pmf: lambda must be > 0");
  return std::exp(i * std::log(lambda) - lambda - std::lgamma(static_cast<double>(i) + 1.0));
}

namespace detail {

inline double simpson_rule(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <class F>
double simpson_rec(F&& f, double a, double fa, double b, double fb, double m, double fm,
                   double whole, double tol, int depth) {
  double lm = (a + m) / 2.0, rm = (m + b) / 2.0;
  double flm = f(lm), frm = f(rm);
  double left = simpson_rule(a, m, fa, flm, fm);
  double right = simpson_rule(m, b, fm, frm, fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_rec(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1) +
         simpson_rec(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1);
}

}  // namespace detail

// Adaptive Simpson quadrature with absolute tolerance.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol = 1e-10) {
  if (a == b) return 0.0;
  double m = (a + b) / 2.0;
  double fa = f(a), fb = f(b), fm = f(m);
  double whole = detail::simpson_rule(a, b, fa, fm, fb);
  return detail::simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, 60);
}

// Bracketed root of a continuous function: secant speed with bisection safety.
template <class F>
double find_root(F&& f, double lo, double hi, double tol = 1e-12) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw std::invalid_argument("find_root: endpoints do not bracket a root");
  for (int it = 0; it < 400 && hi - lo > tol; ++it) {
    double mid;
    double denom = fhi - flo;
    if (denom != 0.0) {
      mid = lo - flo * (hi - lo) / denom;  // secant
      double margin = (hi - lo) * 1e-3;
      if (!(mid > lo + margin) || !(mid < hi - margin)) mid = (lo + hi) / 2.0;
    } else {
      mid = (lo + hi) / 2.0;
    }
    double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if ((fmid > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
      fhi = fmid;
    }
  }
  return (lo + hi) / 2.0;
}

struct FixedPoint {
  double w_hat_1 = 0.0;
  double w_2 = 0.0;
  std::uint64_t iterations = 0;
  double residual = 0.0;
};

// Smallest solution of w1 = f_hat'(w2)/mu, w2 = 1 - f'(1-w1)/mu, by the
// monotone Jacobi iteration from (0,0). The D_Delta systems are tangent at
// (1,1) (the iteration slows to algebraic decay), so every second iterate of
// the composed scalar map is Aitken-accelerated; a jump is accepted only when
// it stays below the map (preserving the monotone approach from below). If
// the iteration stalls short of (1,1) while (1,1) solves the system exactly
// and the composed map has no crossing in between, the stall is resolved to
// (1,1); solutions closer to (1,1) than ~1e-8 are reported as (1,1).
inline FixedPoint fixed_point_solve(const std::function<double(double)>& f_prime,
                                    const std::function<double(double)>& f_hat_prime, double mu,
                                    double tol = 1e-10,
                                    const std::function<void(double, double)>& observer = {}) {
  if (!(mu > 0.0)) throw std::domain_error("fixed_point_solve: mu must be > 0");
  auto eq1 = [&](double b) { return f_hat_prime(b) / mu; };
  auto eq2 = [&](double a) { return 1.0 - f_prime(1.0 - a) / mu; };
  auto comp = [&](double w) { return eq1(eq2(w)); };
  auto residual_at = [&](double a, double b) {
    return std::max(std::fabs(eq1(b) - a), std::fabs(eq2(a) - b));
  };

  double w1 = 0.0, w2 = 0.0;
  std::vector<double> window;
  std::uint64_t iters = 0;
  constexpr std::uint64_t kMaxIters = 1'000'000;
  bool converged = false;
  while (iters < kMaxIters) {
    double n1 = eq1(w2), n2 = eq2(w1);
    ++iters;
    if (n1 < w1 - tol || n2 < w2 - tol)
      throw std::runtime_error("fixed_point_solve: monotonicity violated");
    double change = std::max(std::fabs(n1 - w1), std::fabs(n2 - w2));
    w1 = std::min(n1, 1.0);
    w2 = std::min(n2, 1.0);
    if (observer) observer(w1, w2);
    if (change < tol && residual_at(w1, w2) < 10.0 * tol) {
      converged = true;
      break;
    }
    if (iters % 2 == 0) {
      // even iterates form a trajectory of the composed map
      window.push_back(w1);
      if (window.size() == 3) {
        double d1 = window[1] - window[0], d2 = window[2] - window[1];
        double den = d2 - d1;
        window.clear();
        if (std::fabs(den) > 1e-18) {
          double cand = w1 - d2 * d2 / den;
          if (cand > 1.0) cand = 1.0;
          if (cand > w1 && comp(cand) >= cand - 1e-15) {
            w1 = cand;
            w2 = std::max(w2, eq2(cand));
            if (observer) observer(w1, w2);
          }
        }
      }
    }
  }
  if (!converged) throw std::runtime_error("fixed_point_solve: no convergence");

  // polish: a few extra plain steps tighten the residual when possible
  for (int extra = 0; extra < 1000 && residual_at(w1, w2) > tol * 0.5; ++extra) {
    double n1 = std::min(eq1(w2), 1.0), n2 = std::min(eq2(w1), 1.0);
    if (n1 < w1 || n2 < w2) break;
    if (n1 == w1 && n2 == w2) break;
    w1 = n1;
    w2 = n2;
    ++iters;
    if (observer) observer(w1, w2);
  }

  // tangent-stall endgame
  if ((w1 != 1.0 || w2 != 1.0) && residual_at(1.0, 1.0) <= 10.0 * tol) {
    bool no_crossing = true;
    constexpr int kGrid = 4096;
    for (int i = 0; i <= kGrid && no_crossing; ++i) {
      double x = w1 + (1.0 - w1) * i / kGrid;
      if (comp(x) < x - 1e-15) no_crossing = false;
    }
    if (no_crossing) {
      w1 = 1.0;
      w2 = 1.0;
      if (observer) observer(w1, w2);
    }
  }

  FixedPoint fp;
  fp.w_hat_1 = w1;
  fp.w_2 = w2;
  fp.iterations = iters;
  fp.residual = residual_at(w1, w2);
  return fp;
}

struct MatchingBounds {
  double lower_fraction = 0.0;
  double upper_fraction = 0.0;
};

// Karp-Sipser phase-1 bounds per the degree-sequence fixed point:
// lower = f(1) - f(1-w1) - f'(1-w1) w1, upper = lower + f_hat(1) - f_hat(w2).
inline MatchingBounds ks_matching_bounds(const std::function<double(double)>& f,
                                         const std::function<double(double)>& f_hat,
                                         const std::function<double(double)>& f_prime,
                                         const FixedPoint& fp) {
  double lower = f(1.0) - f(1.0 - fp.w_hat_1) - f_prime(1.0 - fp.w_hat_1) * fp.w_hat_1;
  if (lower < 0.0) lower = 0.0;
  double upper = lower + f_hat(1.0) - f_hat(fp.w_2);
  if (upper < lower) upper = lower;
  return {lower, upper};
}

// Generating-function pair for the configuration-model limit of a cuckoo
// instance with n_users = tau * n_ads, tau <= 1: the user side is padded with
// degree-0 vertices up to n_ads, the ad side is Poisson with the padded mean.
struct PgfPair {
  std::function<double(double)> f;
  std::function<double(double)> f_prime;
  std::function<double(double)> f_hat;
  std::function<double(double)> f_hat_prime;
  double mu = 0.0;
};

inline PgfPair pgf_pair(const DegreeDistribution& dist, double tau) {
  if (!(tau > 0.0) || tau > 1.0)
    throw std::domain_error("no analytic model for n_users > n_ads");
  if (!dist.finite_support()) throw std::domain_error("unbounded support");
  double lam = tau * dist.mean_degree();
  PgfPair p;
  p.mu = lam;
  p.f = [dist, tau](double x) { return (1.0 - tau) + tau * dist.gen_f(x); };
  p.f_prime = [dist, tau](double x) { return tau * dist.gen_f_prime(x); };
  p.f_hat = [lam](double x) { return std::exp(lam * (x - 1.0)); };
  p.f_hat_prime = [lam](double x) { return lam * std::exp(lam * (x - 1.0)); };
  return p;
}

// Greedy fluid limit: matched-ad fraction beta solves
// integral_0^beta dx / (1 - f(x)) = tau, with tau = n_users/n_ads arrivals
// per ad. Closed form for the main law; quadrature plus root bracketing
// otherwise.
inline double greedy_beta(const DegreeDistribution& dist, double tau) {
  if (!(tau >= 0.0)) throw std::domain_error("greedy_beta: tau must be >= 0");
  if (tau == 0.0) return 0.0;
  if (dist.is_main_law()) return 1.0 - std::exp(1.0 - std::exp(tau));
  auto f = [&](double x) { return dist.gen_f(x); };
  if (f(0.0) >= 1.0) return 0.0;  // all mass at degree 0
  auto integrand = [&](double x) { return 1.0 / (1.0 - f(x)); };
  auto time_to = [&](double b) { return adaptive_simpson(integrand, 0.0, b, 1e-11); };
  // expand the bracket toward 1 until the integral covers tau
  double hi = 0.5;
  while (time_to(hi) < tau) {
    hi = 1.0 - (1.0 - hi) / 2.0;
    if (1.0 - hi < 1e-15)
      throw std::runtime_error("greedy_beta: horizon not reachable");
  }
  return find_root([&](double b) { return time_to(b) - tau; }, 0.0, hi, 1e-12);
}

// Competitive ratio of the D_u instances: greedy matches beta(u) * n_ads in
// the fluid limit while the maximum matching is quasi-complete (u * n_ads).
inline double cr_du(double u) {
  if (!(u > 0.0) || u > 1.0) throw std::domain_error("cr_du: u must be in (0,1]");
  if (u == 1.0) return cr_main();
  return greedy_beta(DegreeDistribution::generalized_u(u), u) / u;
}

struct Extremality {
  double alpha = 0.0;
  double w_hat_1 = 0.0;
};

// Lemma eps-mass extremality: w1 is the root of (1-y) Phi(1-y, 1, Delta)
// = Delta * eps, alpha the induced maximum-matching fraction.
inline Extremality extremality_alpha(std::uint32_t delta, double eps) {
  if (delta < 2) throw std::invalid_argument("extremality_alpha: Delta must be >= 2");
  if (!(eps > 0.0)) throw std::domain_error("extremality_alpha: eps must be > 0");
  auto g = [&](double y) { return (1.0 - y) * lerch_phi_s1(1.0 - y, delta) - delta * eps; };
  // g decreases from +inf at 0+ to 0 at 1-; bisection to 1e-12
  double lo = 1e-15, hi = 1.0 - 1e-15;
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    double mid = (lo + hi) / 2.0;
    if (g(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  double w1 = (lo + hi) / 2.0;
  double d = static_cast<double>(delta);
  double alpha = 1.0 + eps - 1.0 / d -
                 std::pow(1.0 - w1, d - 1.0) *
                     (eps * (1.0 + (d - 1.0) * w1) - (1.0 - w1) / d);
  return {alpha, w1};
}

// Leading term of psi_Delta(eps) = Delta^{2 Delta} eps^{Delta+1}/(Delta+1).
inline double psi_leading(std::uint32_t delta, double eps) {
  if (delta < 2) throw std::invalid_argument("psi_leading: Delta must be >= 2");
  double d = static_cast<double>(delta);
  return std::pow(d, 2.0 * d) * std::pow(eps, d + 1.0) / (d + 1.0);
}

}  // namespace ocm
