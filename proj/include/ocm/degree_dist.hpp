#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ocm/rng.hpp"

namespace ocm {

enum class DegreeKind : std::uint8_t {
  Main,           // Pr[D=d] = 1/(d(d-1)) for d >= 2, tail Pr[D>d] = 1/d
  Truncated,      // mass 1/Delta at 0, main law on {2..Delta}
  EpsMass,        // Truncated with eps moved from degree 0 to degree Delta
  GeneralizedU,   // u=1: Main; u<1: main/u on {2..Delta-1}, remainder at Delta
  UniformDegree,  // point mass
  Explicit,       // arbitrary finite pmf
};

// Smallest integer Delta with 1/Delta <= 1-u, i.e. ceil(1/(1-u)), computed
// with a guard so representable breakpoints like u=0.9 land on the exact
// integer instead of the next one up.
inline std::uint32_t delta_for_u(double u) {
  double r = 1.0 / (1.0 - u);
  double d = std::ceil(r - 1e-9);
  if (d < 2.0) d = 2.0;
  if (d > 4.0e9) throw std::invalid_argument("u too close to 1: support exceeds 32-bit degrees");
  return static_cast<std::uint32_t>(d);
}

class DegreeDistribution {
 public:
  static constexpr std::uint32_t kNoCap = std::numeric_limits<std::uint32_t>::max();

  static DegreeDistribution main() {
    DegreeDistribution d;
    d.kind_ = DegreeKind::Main;
    d.spec_ = "main";
    return d;
  }

  static DegreeDistribution truncated(std::uint32_t delta) {
    if (delta < 2) throw std::invalid_argument("trunc: Delta must be >= 2");
    DegreeDistribution d;
    d.kind_ = DegreeKind::Truncated;
    d.delta_ = delta;
    d.spec_ = "trunc:" + std::to_string(delta);
    return d;
  }

  static DegreeDistribution eps_mass(std::uint32_t delta, double eps) {
    if (delta < 2) throw std::invalid_argument("epsmass: Delta must be >= 2");
    if (!(eps >= 0.0) || eps > 1.0 / delta)
      throw std::invalid_argument("epsmass: eps must satisfy 0 <= eps <= 1/Delta");
    DegreeDistribution d;
    d.kind_ = DegreeKind::EpsMass;
    d.delta_ = delta;
    d.eps_ = eps;
    d.spec_ = "epsmass:" + std::to_string(delta) + ":" + format_real(eps);
    return d;
  }

  static DegreeDistribution generalized_u(double u) {
    if (!(u > 0.0) || u > 1.0) throw std::invalid_argument("du: u must be in (0,1]");
    DegreeDistribution d;
    d.kind_ = DegreeKind::GeneralizedU;
    d.u_ = u;
    d.delta_ = (u < 1.0) ? delta_for_u(u) : 0;
    d.spec_ = "du:" + format_real(u);
    return d;
  }

  static DegreeDistribution uniform_degree(std::uint32_t deg) {
    DegreeDistribution d;
    d.kind_ = DegreeKind::UniformDegree;
    d.delta_ = deg;
    d.spec_ = "unif:" + std::to_string(deg);
    return d;
  }

  static DegreeDistribution explicit_pmf(std::vector<std::pair<std::uint32_t, double>> entries) {
    if (entries.empty()) throw std::invalid_argument("explicit: empty pmf");
    std::sort(entries.begin(), entries.end());
    double total = 0.0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (i > 0 && entries[i].first == entries[i - 1].first)
        throw std::invalid_argument("explicit: duplicate degree");
      if (!(entries[i].second >= 0.0))
        throw std::invalid_argument("explicit: negative probability");
      total += entries[i].second;
    }
    if (std::fabs(total - 1.0) > 1e-9)
      throw std::invalid_argument("probabilities must sum to 1");
    for (auto& e : entries) e.second /= total;

    DegreeDistribution d;
    d.kind_ = DegreeKind::Explicit;
    d.table_ = std::move(entries);
    d.cdf_.resize(d.table_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < d.table_.size(); ++i) {
      acc += d.table_[i].second;
      d.cdf_[i] = acc;
    }
    d.cdf_.back() = 1.0;
    std::string s = "explicit:";
    for (std::size_t i = 0; i < d.table_.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(d.table_[i].first) + "=" + format_real(d.table_[i].second);
    }
    d.spec_ = std::move(s);
    return d;
  }

  DegreeKind kind() const { return kind_; }
  std::uint32_t cap() const { return cap_; }
  const std::string& spec_string() const { return spec_; }
  std::uint32_t delta() const { return delta_; }
  double eps() const { return eps_; }
  double u() const { return u_; }

  // True when the law is the unbounded main law (Main, or GeneralizedU at u=1).
  bool is_main_law() const {
    return kind_ == DegreeKind::Main || (kind_ == DegreeKind::GeneralizedU && u_ == 1.0);
  }

  DegreeDistribution with_cap(std::uint32_t cap) const {
    DegreeDistribution d = *this;
    d.cap_ = cap;
    return d;
  }

  // Probability mass of the (uncapped) law at d.
  double pmf(std::uint32_t d) const {
    switch (kind_) {
      case DegreeKind::Main:
        return main_pmf(d);
      case DegreeKind::Truncated:
        if (d == 0) return 1.0 / delta_;
        if (d >= 2 && d <= delta_) return main_pmf(d);
        return 0.0;
      case DegreeKind::EpsMass:
        if (d == 0) return 1.0 / delta_ - eps_;
        if (d == delta_) return main_pmf(d) + eps_;
        if (d >= 2 && d < delta_) return main_pmf(d);
        return 0.0;
      case DegreeKind::GeneralizedU:
        if (u_ == 1.0) return main_pmf(d);
        if (d >= 2 && d < delta_) return main_pmf(d) / u_;
        if (d == delta_) return top_mass_u();
        return 0.0;
      case DegreeKind::UniformDegree:
        return d == delta_ ? 1.0 : 0.0;
      case DegreeKind::Explicit: {
        auto it = std::lower_bound(table_.begin(), table_.end(), d,
                                   [](const auto& e, std::uint32_t key) { return e.first < key; });
        return (it != table_.end() && it->first == d) ? it->second : 0.0;
      }
    }
    return 0.0;
  }

  // Pr[D > d] of the (uncapped) law.
  double tail(std::uint32_t d) const {
    switch (kind_) {
      case DegreeKind::Main:
        return d == 0 ? 1.0 : 1.0 / d;
      case DegreeKind::Truncated:
        if (d == 0) return 1.0 - 1.0 / delta_;
        if (d >= delta_) return 0.0;
        return 1.0 / d - 1.0 / delta_;
      case DegreeKind::EpsMass:
        if (d == 0) return 1.0 - 1.0 / delta_ + eps_;
        if (d >= delta_) return 0.0;
        return 1.0 / d - 1.0 / delta_ + eps_;
      case DegreeKind::GeneralizedU:
        if (u_ == 1.0) return d == 0 ? 1.0 : 1.0 / d;
        if (d >= delta_) return 0.0;
        if (d <= 1) return 1.0;
        return 1.0 - (1.0 / u_) * (1.0 - 1.0 / d);
      case DegreeKind::UniformDegree:
        return d < delta_ ? 1.0 : 0.0;
      case DegreeKind::Explicit: {
        double acc = 0.0;
        for (auto it = table_.rbegin(); it != table_.rend() && it->first > d; ++it)
          acc += it->second;
        return acc;
      }
    }
    return 0.0;
  }

  // Inverse-CDF transform of one uniform draw from (0,1); uncapped degree.
  std::uint64_t quantile(double unit) const {
    switch (kind_) {
      case DegreeKind::Main:
        return main_quantile(unit);
      case DegreeKind::Truncated:
        return unit > 1.0 - 1.0 / delta_ ? 0 : main_quantile(unit);
      case DegreeKind::EpsMass: {
        double t = 1.0 - 1.0 / delta_;
        if (unit > t + eps_) return 0;
        if (unit > t) return delta_;
        return main_quantile(unit);
      }
      case DegreeKind::GeneralizedU: {
        if (u_ == 1.0) return main_quantile(unit);
        double cdf_body = (1.0 / u_) * (1.0 - 1.0 / (delta_ - 1.0));
        if (unit >= cdf_body) return delta_;
        auto d = static_cast<std::uint64_t>(std::ceil(1.0 / (1.0 - u_ * unit)));
        if (d < 2) d = 2;
        if (d > delta_ - 1) d = delta_ - 1;
        return d;
      }
      case DegreeKind::UniformDegree:
        return delta_;
      case DegreeKind::Explicit: {
        auto it = std::lower_bound(cdf_.begin(), cdf_.end(), unit);
        if (it == cdf_.end()) --it;
        return table_[static_cast<std::size_t>(it - cdf_.begin())].first;
      }
    }
    return 0;
  }

  // One degree draw, clamped at cap(). RNG needs next_unit().
  template <class RNG>
  std::uint32_t sample(RNG& rng) const {
    std::uint64_t raw = quantile(rng.next_unit());
    return raw > cap_ ? cap_ : static_cast<std::uint32_t>(raw);
  }

  bool finite_support() const { return !is_main_law(); }

  // Largest degree with positive mass (finite kinds only).
  std::uint32_t max_degree() const {
    require_finite();
    switch (kind_) {
      case DegreeKind::Truncated:
      case DegreeKind::EpsMass:
      case DegreeKind::GeneralizedU:
      case DegreeKind::UniformDegree:
        return delta_;
      case DegreeKind::Explicit:
        return table_.back().first;
      default:
        return 0;
    }
  }

  double mean_degree() const {
    if (is_main_law()) return std::numeric_limits<double>::infinity();
    double m = 0.0;
    for_each_mass([&](std::uint32_t d, double p) { m += static_cast<double>(d) * p; });
    return m;
  }

  // f(x) = sum_d pmf(d) x^d over the finite support.
  double gen_f(double x) const {
    require_finite();
    double acc = 0.0;
    for_each_mass([&](std::uint32_t d, double p) { acc += p * pow_u32(x, d); });
    return acc;
  }

  // f'(x) = sum_d d pmf(d) x^{d-1}.
  double gen_f_prime(double x) const {
    require_finite();
    double acc = 0.0;
    for_each_mass([&](std::uint32_t d, double p) {
      if (d >= 1) acc += static_cast<double>(d) * p * pow_u32(x, d - 1);
    });
    return acc;
  }

  // Visits (degree, mass) pairs of the support in increasing degree order.
  template <class Fn>
  void for_each_mass(Fn&& fn) const {
    switch (kind_) {
      case DegreeKind::Main:
        throw std::domain_error("unbounded support");
      case DegreeKind::Truncated:
      case DegreeKind::EpsMass:
      case DegreeKind::GeneralizedU:
        if (kind_ == DegreeKind::GeneralizedU && u_ == 1.0)
          throw std::domain_error("unbounded support");
        if (kind_ != DegreeKind::GeneralizedU) fn(0u, pmf(0));
        for (std::uint32_t d = 2; d <= delta_; ++d) {
          double p = pmf(d);
          if (p != 0.0) fn(d, p);
        }
        break;
      case DegreeKind::UniformDegree:
        fn(delta_, 1.0);
        break;
      case DegreeKind::Explicit:
        for (const auto& [d, p] : table_) fn(d, p);
        break;
    }
  }

 private:
  static double main_pmf(std::uint32_t d) {
    if (d < 2) return 0.0;
    return 1.0 / (static_cast<double>(d) * (static_cast<double>(d) - 1.0));
  }

  // ceil(1/(1-U)) for U in (0,1); always >= 2.
  static std::uint64_t main_quantile(double unit) {
    double r = std::ceil(1.0 / (1.0 - unit));
    if (r < 2.0) r = 2.0;
    if (r > 9.0e18) r = 9.0e18;
    return static_cast<std::uint64_t>(r);
  }

  double top_mass_u() const {
    return 1.0 - (1.0 / u_) * (1.0 - 1.0 / (static_cast<double>(delta_) - 1.0));
  }

  void require_finite() const {
    if (is_main_law()) throw std::domain_error("unbounded support");
  }

  static double pow_u32(double x, std::uint32_t n) {
    double acc = 1.0, base = x;
    while (n) {
      if (n & 1u) acc *= base;
      base *= base;
      n >>= 1u;
    }
    return acc;
  }

  static std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }

  DegreeKind kind_ = DegreeKind::Main;
  std::uint32_t delta_ = 0;
  double eps_ = 0.0;
  double u_ = 1.0;
  std::uint32_t cap_ = kNoCap;
  std::vector<std::pair<std::uint32_t, double>> table_;  // Explicit only
  std::vector<double> cdf_;                              // Explicit only
  std::string spec_;
};

namespace detail {

inline std::uint64_t parse_uint(const std::string& s, const char* what) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw std::invalid_argument(std::string("invalid integer for ") + what + ": '" + s + "'");
  return v;
}

inline double parse_real(const std::string& s, const char* what) {
  if (s.empty()) throw std::invalid_argument(std::string("missing value for ") + what);
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v))
    throw std::invalid_argument(std::string("invalid real for ") + what + ": '" + s + "'");
  return v;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace detail

// Grammar: main | trunc:D | epsmass:D:eps | du:u | unif:d | explicit:d1=p1,d2=p2,...
inline DegreeDistribution parse_dist_spec(const std::string& spec) {
  if (spec == "main") return DegreeDistribution::main();
  auto parts = detail::split(spec, ':');
  const std::string& head = parts[0];
  if (head == "trunc") {
    if (parts.size() != 2) throw std::invalid_argument("trunc spec needs exactly one parameter");
    auto delta = detail::parse_uint(parts[1], "Delta");
    if (delta > 0xffffffffull) throw std::invalid_argument("trunc: Delta too large");
    return DegreeDistribution::truncated(static_cast<std::uint32_t>(delta));
  }
  if (head == "epsmass") {
    if (parts.size() != 3) throw std::invalid_argument("epsmass spec needs two parameters");
    auto delta = detail::parse_uint(parts[1], "Delta");
    if (delta > 0xffffffffull) throw std::invalid_argument("epsmass: Delta too large");
    double eps = detail::parse_real(parts[2], "eps");
    return DegreeDistribution::eps_mass(static_cast<std::uint32_t>(delta), eps);
  }
  if (head == "du") {
    if (parts.size() != 2) throw std::invalid_argument("du spec needs exactly one parameter");
    return DegreeDistribution::generalized_u(detail::parse_real(parts[1], "u"));
  }
  if (head == "unif") {
    if (parts.size() != 2) throw std::invalid_argument("unif spec needs exactly one parameter");
    auto d = detail::parse_uint(parts[1], "d");
    if (d > 0xffffffffull) throw std::invalid_argument("unif: degree too large");
    return DegreeDistribution::uniform_degree(static_cast<std::uint32_t>(d));
  }
  if (head == "explicit") {
    if (parts.size() != 2 || parts[1].empty())
      throw std::invalid_argument("explicit spec needs degree=prob entries");
    std::vector<std::pair<std::uint32_t, double>> entries;
    for (const auto& item : detail::split(parts[1], ',')) {
      auto kv = detail::split(item, '=');
      if (kv.size() != 2) throw std::invalid_argument("explicit entry must be degree=prob: '" + item + "'");
      auto d = detail::parse_uint(kv[0], "degree");
      if (d > 0xffffffffull) throw std::invalid_argument("explicit: degree too large");
      entries.emplace_back(static_cast<std::uint32_t>(d), detail::parse_real(kv[1], "probability"));
    }
    return DegreeDistribution::explicit_pmf(std::move(entries));
  }
  throw std::invalid_argument("unknown distribution spec: '" + spec + "'");
}

}  // namespace ocm
