#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/digamma.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcurv/constants.hpp"
#include "qcurv/exactnum.hpp"

namespace qcurv {

// Bubble U(x) = (1+|x|^2)^{-(n-2k)/2}. Radial formulas use r = |x|^2.
struct BubbleParams {
  long n = 0;
  long k = 0;
  long double mu = 1;

  BubbleParams(long n_, long k_, long double mu_ = 1) : n(n_), k(k_), mu(mu_) {
    if (k < 1) throw DomainError("k", "bubble needs k >= 1");
    if (n <= 2 * k) throw DomainError("n", "bubble needs n > 2k, got " + detail::nk(n, k));
    if (!(mu > 0)) throw DomainError("mu", "bubble needs mu > 0");
  }
};

// c * (1+r)^{-exponent}
struct PowerTerm {
  ExactNumber coeff;
  HalfInt exponent;

  long double eval(long double r) const { return coeff.to_float() * std::pow(1.0L + r, -to_float(exponent.value())); }
};

inline long double eval_terms(const std::vector<PowerTerm>& terms, long double r) {
  long double s = 0;
  for (const auto& t : terms) s += t.eval(r);
  return s;
}

// Coefficient of (1+r)^{-(n-2k+2j)/2} in d^j U / dr^j, product form.
inline mpq_class d_r_U_coeff(long n, long k, long j) {
  if (j < 0) throw DomainError("j", "derivative order must be >= 0");
  mpq_class c = (j % 2 == 0 ? 1 : -1) / pow_q(2, j);
  for (long i = 0; i < j; ++i) c *= n - 2 * k + 2 * i;
  return c;
}

// The same coefficient through Beta functions; needs n > 2k+2.
inline ExactNumber d_r_U_coeff_beta(long n, long k, long j) {
  if (j < 0) throw DomainError("j", "derivative order must be >= 0");
  detail::require(n > 2 * k + 2, "n", "Beta form needs n > 2k+2");
  mpq_class c = mpq_class(2 * (j % 2 == 0 ? 1 : -1)) * detail::fact_q(j) / (n - 2 * k - 2);
  return ExactNumber(c) * detail::beta_inv_shifted(n, k, j);
}

inline HalfInt d_r_U_exponent(long n, long k, long j) { return HalfInt::halves(n - 2 * k + 2 * j); }

inline long double d_r_U(const BubbleParams& p, long j, long double r) {
  return to_float(d_r_U_coeff(p.n, p.k, j)) * std::pow(1.0L + r, -to_float(d_r_U_exponent(p.n, p.k, j).value()));
}

// Delta_0^l U as a sum of powers of (1+r), with Delta_0 = -sum d_i^2.
inline std::vector<PowerTerm> laplacian_pow_U_terms(long n, long k, long l) {
  if (l < 0 || l > k) throw DomainError("l", "laplacian power must satisfy 0 <= l <= k");
  detail::require(k >= 1 && n > 2 * k, "n", "needs n > 2k");
  using detail::fact_q;
  if (l == k) {
    mpq_class c = pow_q(2, 2 * k) * fact_q(2 * k - 1);
    return {PowerTerm{ExactNumber(c) * beta_inv(HalfInt::halves(n - 2 * k), HalfInt::of(2 * k)), HalfInt::halves(n + 2 * k)}};
  }
  detail::require(n > 2 * k + 2, "n", "closed form for l < k needs n > 2k+2");
  mpq_class pre = pow_q(2, 2 * l + 1) * fact_q(l) / (mpq_class(n - 2 * k - 2) * fact_q(k - l - 1));
  std::vector<PowerTerm> out;
  for (long lp = l; lp <= 2 * l; ++lp) {
    mpq_class c = pre * fact_q(lp) * fact_q(k + l - lp - 1) / (fact_q(lp - l) * fact_q(2 * l - lp));
    out.push_back(PowerTerm{ExactNumber(c) * detail::beta_inv_shifted(n, k, lp), HalfInt::halves(n + 2 * lp - 2 * k)});
  }
  return out;
}

inline long double laplacian_pow_U(const BubbleParams& p, long l, long double r) {
  return eval_terms(laplacian_pow_U_terms(p.n, p.k, l), r);
}

namespace detail {

// Pairing sum over all permutations of the index slots:
//   sum_sigma delta_{i_s1 i_s2} ... delta_{i_s(2m-1) i_s(2m)} x_{i_s(2m+1)} ... x_{i_sj}
inline long double pairing_sum(const std::vector<int>& idx, long m, const std::vector<long double>& x) {
  std::vector<int> perm(idx.size());
  std::iota(perm.begin(), perm.end(), 0);
  long double total = 0;
  do {
    long double term = 1;
    for (long t = 0; t < m && term != 0; ++t)
      if (idx[perm[2 * t]] != idx[perm[2 * t + 1]]) term = 0;
    for (size_t s = 2 * m; s < perm.size() && term != 0; ++s) term *= x[idx[perm[s]]];
    total += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

}  // namespace detail

// Partial derivative d^{i_1...i_j} U at x through the radial expansion.
// Indices are 0-based coordinates of x.
inline long double partial_U(const BubbleParams& p, const std::vector<int>& multi_index, const std::vector<long double>& x) {
  long j = static_cast<long>(multi_index.size());
  if (j > 8) throw DomainError("multi_index", "partial_U supports |index| <= 8");
  for (int i : multi_index)
    if (i < 0 || i >= static_cast<int>(x.size())) throw DomainError("multi_index", "index outside the point's dimension");
  long double r = 0;
  for (long double xi : x) r += xi * xi;
  long double total = 0;
  for (long m = 0; 2 * m <= j; ++m) {
    long double w = std::pow(2.0L, static_cast<long double>(j - 2 * m)) /
                    (to_float(detail::fact_q(m)) * to_float(detail::fact_q(j - 2 * m)));
    total += w * d_r_U(p, j - m, r) * detail::pairing_sum(multi_index, m, x);
  }
  return total;
}

struct MomentResult {
  enum class Kind { exact_beta, log_divergent };
  Kind kind = Kind::exact_beta;
  ExactNumber value;            // B(a, b-a) when exact_beta
  ExactNumber log_coefficient;  // coefficient of ln(1/mu) when log_divergent
  std::string remainder;        // order of the neglected part
  long double remainder_bound = 0;
};

// Integral of r^{a-1}(1+r)^{-b} over [0, (r0/mu)^2].
inline MomentResult moment_integral(HalfInt a, HalfInt b, long double mu, long double r0) {
  if (!a.positive()) throw DomainError("a", "moment integral needs a > 0");
  if (b < a) throw DomainError("b", "moment integral diverges for b < a");
  if (!(mu > 0) || !(r0 > 0)) throw DomainError("mu", "moment integral needs mu, r0 > 0");
  MomentResult res;
  if (b == a) {
    res.kind = MomentResult::Kind::log_divergent;
    res.log_coefficient = ExactNumber(2);
    res.remainder = "O(1)";
    // |I - 2 ln(1/mu)| <= |2 ln r0| + ln(1 + (mu/r0)^2) + psi(a) + gamma
    long double av = to_float(a.value());
    res.remainder_bound = std::fabs(2 * std::log(r0)) + std::log1p((mu / r0) * (mu / r0)) +
                          boost::math::digamma(av) + boost::math::constants::euler<long double>();
    return res;
  }
  res.kind = MomentResult::Kind::exact_beta;
  res.value = beta(a, b - a);
  HalfInt d = b - a;
  res.remainder = "O(mu^" + HalfInt{2 * d.twice}.to_string() + ")";
  // tail beyond R = (r0/mu)^2 is at most R^{a-b}/(b-a)
  long double dv = to_float(d.value());
  res.remainder_bound = std::pow(mu / r0, 2 * dv) / dv;
  return res;
}

// Integral over the unit sphere S^{n-1} of y_{i_1}...y_{i_j}.
inline ExactNumber sphere_moment(long n, const std::vector<int>& multi_index) {
  detail::require(n >= 3, "n", "sphere_moment needs n >= 3");
  long j = static_cast<long>(multi_index.size());
  detail::require(j <= 8, "multi_index", "sphere_moment supports degree <= 8");
  if (j % 2 == 1) return ExactNumber();
  long pairings = 0;
  std::vector<int> perm(multi_index.size());
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool ok = true;
    for (long t = 0; 2 * t < j && ok; ++t) ok = multi_index[perm[2 * t]] == multi_index[perm[2 * t + 1]];
    pairings += ok;
  } while (std::next_permutation(perm.begin(), perm.end()));
  mpq_class h = detail::fact_q(j / 2);
  mpq_class c = mpq_class(n - 2) * pairings / (pow_q(2, j + 1) * h * h);
  return ExactNumber(c) * sphere_volume(n - 1) * beta(HalfInt::halves(n - 2), HalfInt::halves(j + 2));
}

// Catalog of the delta-contraction sums.
struct DeltaCatalogEntry {
  enum class Pattern { one, pair12, pair12_pair34, sym3 };
  mpq_class scalar;
  Pattern pattern;

  // Value at concrete indices i_1.. (0-based slots).
  long double at(const std::vector<int>& i) const {
    auto d = [&](int a, int b) { return i[a] == i[b] ? 1.0L : 0.0L; };
    long double base = 0;
    switch (pattern) {
      case Pattern::one: base = 1; break;
      case Pattern::pair12: base = d(0, 1); break;
      case Pattern::pair12_pair34: base = d(0, 1) * d(2, 3); break;
      case Pattern::sym3: base = d(0, 1) * d(2, 3) + d(0, 2) * d(1, 3) + d(0, 3) * d(1, 2); break;
    }
    return to_float(scalar) * base;
  }
};

inline DeltaCatalogEntry delta_contraction_sum(long jp, long jpp, long m) {
  using P = DeltaCatalogEntry::Pattern;
  auto uncataloged = [&] {
    return DomainError("(j',j'',m)", "uncataloged triple (" + std::to_string(jp) + "," + std::to_string(jpp) + "," +
                                         std::to_string(m) + ")");
  };
  if (m < 0) throw uncataloged();
  if (jp == 0 && jpp == 0 && m == 0) return {1, P::one};
  if (jp == 1 && jpp == 1 && m == 0) return {2, P::pair12};
  if (jp == 2 && jpp == 0 && m <= 1) return {mpq_class(2 * (2 - m)), P::pair12};
  if (jp == 2 && jpp == 2 && m == 0) return {16, P::sym3};
  if (jp == 2 && jpp == 2 && m == 1) return {4, P::pair12_pair34};
  if (jp == 3 && jpp == 1 && m <= 1) return {2 * detail::fact_q(4 - 2 * m), P::sym3};
  if (jp == 4 && jpp == 0 && m <= 2) return {8 * detail::fact_q(4 - 2 * m), P::sym3};
  throw uncataloged();
}

class QuadratureFailure : public std::runtime_error {
 public:
  QuadratureFailure(const std::string& message, long double achieved)
      : std::runtime_error(message), achieved_(achieved) {}
  long double achieved() const noexcept { return achieved_; }

 private:
  long double achieved_;
};

struct QuadDomain {
  enum class Map { identity, half_line, logarithmic };
  long double lo = 0;
  long double hi = 1;  // ignored for half_line
  Map map = Map::identity;
};

struct QuadResult {
  long double value = 0;
  long double error_estimate = 0;
};

// Adaptive Gauss-Kronrod quadrature. half_line integrates [lo, inf) through
// r = lo + t/(1-t); logarithmic integrates [lo, hi] through r = lo + expm1(u),
// which resolves integrands spread over many decades.
inline QuadResult quad_oracle(const std::function<long double(long double)>& f, QuadDomain dom,
                              long double rel_tol = 1e-10L, unsigned max_depth = 30) {
  using GK = boost::math::quadrature::gauss_kronrod<long double, 61>;
  std::function<long double(long double)> g;
  long double a = 0, b = 0;
  switch (dom.map) {
    case QuadDomain::Map::identity:
      g = f;
      a = dom.lo;
      b = dom.hi;
      break;
    case QuadDomain::Map::half_line:
      g = [&](long double t) {
        if (t >= 1) return 0.0L;
        long double s = 1 - t;
        return f(dom.lo + t / s) / (s * s);
      };
      a = 0;
      b = 1;
      break;
    case QuadDomain::Map::logarithmic:
      g = [&](long double u) { return f(dom.lo + std::expm1(u)) * std::exp(u); };
      a = 0;
      b = std::log1p(dom.hi - dom.lo);
      break;
  }
  long double err = 0;
  long double v = GK::integrate(g, a, b, max_depth, rel_tol, &err);
  long double scale = std::max(std::fabs(v), std::numeric_limits<long double>::min());
  if (!std::isfinite(v) || err / scale > rel_tol * 10)
    throw QuadratureFailure("quadrature did not reach requested tolerance", err / scale);
  return {v, err};
}

}  // namespace qcurv
