#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "qcurv/constants.hpp"
#include "qcurv/exactnum.hpp"
#include "qcurv/poly.hpp"

namespace qcurv {

struct SphereSpec {
  long n = 0;
  long k = 0;
  long L = 0;

  SphereSpec(long n_, long k_, long L_ = 0) : n(n_), k(k_), L(L_) {
    if (k < 1) throw DomainError("k", "sphere computations need k >= 1");
    if (n <= 2 * k) throw DomainError("n", "sphere computations need n > 2k, got " + detail::nk(n, k));
    if (L < 0) throw DomainError("L", "truncation degree must be >= 0");
  }
};

// Eigenvalue of P_{2k} on the round S^n on spherical harmonics of degree l:
// prod_j (l(l+n-1) + (n+2j-2)(n-2j)/4).
inline mpq_class gjms_eigenvalue(long n, long k, long l) {
  SphereSpec s(n, k);
  if (l < 0) throw DomainError("l", "harmonic degree must be >= 0");
  mpq_class lap = mpq_class(l) * (l + n - 1), e = 1;
  for (long j = 1; j <= k; ++j) e *= lap + rat((n + 2 * j - 2) * (n - 2 * j), 4);
  return e;
}

// Dimension of the degree-l spherical harmonics on S^n.
inline mpz_class harmonic_dimension(long n, long l) {
  if (n < 1 || l < 0) throw DomainError("l", "harmonic_dimension needs n >= 1, l >= 0");
  mpz_class num = 2 * l + n - 1;
  for (long i = 1; i <= n - 2; ++i) num *= l + i;
  return num / factorial(n - 1);
}

struct CoercivityResult {
  bool coercive = false;
  mpq_class min_eigenvalue;
  long argmin = 0;
  long degrees_checked = 0;
};

// Minimum eigenvalue over degrees 0..max_degree; positivity of every factor
// makes l = 0 the minimizer.
inline CoercivityResult coercivity_check(long n, long k, long max_degree = 64) {
  CoercivityResult r;
  r.min_eigenvalue = gjms_eigenvalue(n, k, 0);
  for (long l = 1; l <= max_degree; ++l) {
    mpq_class e = gjms_eigenvalue(n, k, l);
    if (e < r.min_eigenvalue) {
      r.min_eigenvalue = e;
      r.argmin = l;
    }
  }
  r.degrees_checked = max_degree + 1;
  r.coercive = sgn(r.min_eigenvalue) > 0;
  return r;
}

struct SharpnessResult {
  mpq_class eigenvalue0;   // P_{2k} 1 on the round sphere
  mpq_class beta_form;     // (2k-1)! B(n/2-k, 2k)^{-1}
  mpq_class product_form;  // 4^{-k} prod (n-2j)(n+2j-2)
  bool equal = false;
};

// I(1) = omega_n^{2k/n} * eigenvalue0 on the round sphere; compares with the threshold's rational part.
inline SharpnessResult sharpness_check(long n, long k) {
  SharpnessResult r;
  r.eigenvalue0 = gjms_eigenvalue(n, k, 0);
  ExactNumber b = ExactNumber(mpq_class(factorial(2 * k - 1))) * beta_inv(HalfInt::halves(n - 2 * k), HalfInt::of(2 * k));
  if (!b.is_rational()) throw DomainError("n", "threshold rational part is not rational");
  r.beta_form = b.rational();
  r.product_form = 1 / pow_q(4, k);
  for (long j = 1; j <= k; ++j) r.product_form *= mpq_class((n - 2 * j) * (n + 2 * j - 2));
  r.equal = r.eigenvalue0 == r.beta_form && r.beta_form == r.product_form;
  return r;
}

struct ZonalResult {
  long double value = 0;       // truncated (or Abel-completed) series
  long double tail_bound = 0;  // rigorous bound on |Green - value|
  long double closed_form = 0; // b_{n,k} (2 sin(theta/2))^{2k-n}
  long L = 0;
  std::string method;          // "direct" or "abel"
  bool conclusive = false;     // tail_bound <= tol
  bool positive = false;       // value - tail_bound > 0
};

namespace detail {

// dim H_l / lambda_l as a quotient of polynomials in l.
inline std::pair<Poly, Poly> zonal_coefficient_polys(long n, long k) {
  Poly l = Poly::x();
  Poly num = Poly(2) * l + Poly(n - 1);
  for (long i = 1; i <= n - 2; ++i) num *= l + Poly(i);
  num *= Poly(mpq_class(1) / mpq_class(factorial(n - 1)));
  Poly den(1);
  Poly lap = l * (l + Poly(n - 1));
  for (long j = 1; j <= k; ++j) den *= lap + Poly(rat((n + 2 * j - 2) * (n - 2 * j), 4));
  return {num, den};
}

inline long double zonal_coefficient(long n, long k, long l) {
  long double d = (2.0L * l + n - 1);
  for (long i = 1; i <= n - 2; ++i) d *= static_cast<long double>(l + i) / i;
  d /= n - 1;
  long double lap = static_cast<long double>(l) * (l + n - 1);
  for (long j = 1; j <= k; ++j) d /= lap + (n + 2.0L * j - 2) * (n - 2.0L * j) / 4;
  return d;
}

// Abel sum of sum_l (-1)^l p(l), through the binomial basis:
// sum_l (-1)^l C(l,j) = (-1)^j / 2^{j+1}.
inline mpq_class abel_alternating_sum(const Poly& p) {
  int deg = p.degree();
  if (deg < 0) return 0;
  std::vector<mpq_class> vals(deg + 1);
  for (int i = 0; i <= deg; ++i) vals[i] = p(mpq_class(i));
  mpq_class total = 0;
  for (int j = 0; j <= deg; ++j) {
    total += vals[0] * (j % 2 ? -1 : 1) / pow_q(2, j + 1);
    for (int i = 0; i + 1 < static_cast<int>(vals.size()) - j; ++i) vals[i] = vals[i + 1] - vals[i];
  }
  return total;
}

}  // namespace detail

inline long double green_closed_form(long n, long k, long double theta) {
  return b_nk(n, k).to_float() * std::pow(2 * std::sin(theta / 2), static_cast<long double>(2 * k - n));
}

// Zonal series of the Green's function of P_{2k} on S^n at geodesic angle
// theta, sum_l dim H_l/(omega_n lambda_l) P_l(cos theta), P_l the Gegenbauer
// polynomial normalized by P_l(1) = 1, truncated at degree L.
//
// For 0 < theta < pi the tail is bounded by the Erdelyi-Magnus-Nevai estimate
// (1-x^2)^{(n-1)/2} p_l(x)^2 <= 2e(2 + sqrt2 (n-2)/2)/pi for the orthonormal
// Jacobi polynomials, with ||P_l||^2 = omega_n / (dim H_l omega_{n-1}),
// dim H_l <= 3 2^{n-2} l^{n-1}/(n-1)! and lambda_l >= l^{2k} for l >= n-1,
// which needs 2k - (n-1)/2 > 1 and L >= n-2.
//
// At theta = pi the series is split as p(l) + q(l) by polynomial division of
// dim H_l/lambda_l; the polynomial part is Abel-summed exactly, and the
// alternating remainder is bounded by its first omitted term once |q| is
// certified monotone (Fujiwara root bounds).
inline ZonalResult green_zonal_partial_sum(const SphereSpec& s, long double theta, long double tol) {
  if (!(theta > 0) || theta > std::numbers::pi_v<long double> + 1e-15L)
    throw DomainError("theta", "zonal probe needs 0 < theta <= pi");
  const long n = s.n, k = s.k, L = s.L;
  const long double omega_n = sphere_volume(n).to_float();
  const long double eps = std::numeric_limits<long double>::epsilon();
  ZonalResult r;
  r.L = L;
  r.closed_form = green_closed_form(n, k, theta);
  long double x = std::cos(theta);
  bool antipode = std::fabs(theta - std::numbers::pi_v<long double>) <= 1e-15L;
  if (antipode) x = -1;

  if (antipode) {
    auto [num, den] = detail::zonal_coefficient_polys(n, k);
    auto [p, q] = num.divmod(den);
    long double sum = to_float(detail::abel_alternating_sum(p));
    long double mag = std::fabs(sum);
    for (long l = 0; l <= L; ++l) {
      long double term = (l % 2 ? -1 : 1) * to_float(q(mpq_class(l)) / den(mpq_class(l)));
      sum += term;
      mag = std::max(mag, std::fabs(term));
    }
    long bound = std::max({q.fujiwara_root_bound(), den.fujiwara_root_bound(),
                           (q.derivative() * den - q * den.derivative()).fujiwara_root_bound()});
    r.method = "abel";
    r.value = sum / omega_n;
    if (L + 1 > bound)
      r.tail_bound = std::fabs(to_float(q(mpq_class(L + 1)) / den(mpq_class(L + 1)))) / omega_n;
    else
      r.tail_bound = std::numeric_limits<long double>::infinity();
    r.tail_bound += (L + 2) * eps * mag / omega_n * 4;
  } else {
    const long double lambda = (n - 1) / 2.0L;
    long double prev = 0, cur = 1, sum = 0, mag = 0;
    for (long l = 0; l <= L; ++l) {
      long double term = detail::zonal_coefficient(n, k, l) * cur;
      sum += term;
      mag = std::max(mag, std::fabs(term));
      long double next = l == 0 ? x : ((2 * l + 2 * lambda) * x * cur - l * prev) / (l + 2 * lambda);
      prev = cur;
      cur = next;
    }
    r.method = "direct";
    r.value = sum / omega_n;
    long double gamma = 2 * k - (n - 1) / 2.0L;
    if (gamma > 1 && L >= n - 2) {
      long double K = 2 * std::numbers::e_v<long double> * (2 + std::numbers::sqrt2_v<long double> * (n - 2) / 2) /
                      std::numbers::pi_v<long double>;
      long double omega_nm1 = sphere_volume(n - 1).to_float();
      long double A = std::sqrt(K * 3 * std::pow(2.0L, n - 2) / (std::tgamma(static_cast<long double>(n)) * omega_n * omega_nm1)) /
                      std::pow(std::sin(theta), (n - 1) / 2.0L);
      r.tail_bound = A * std::pow(static_cast<long double>(L), 1 - gamma) / (gamma - 1);
    } else {
      r.tail_bound = std::numeric_limits<long double>::infinity();
    }
    r.tail_bound += (L + 2) * eps * mag / omega_n * 4;
  }
  r.conclusive = r.tail_bound <= tol;
  r.positive = r.value - r.tail_bound > 0;
  return r;
}

// Smallest truncation (doubling from n-2, capped at max_L) whose tail bound meets tol.
inline ZonalResult green_zonal_probe(long n, long k, long double theta, long double tol, long max_L = 1L << 21) {
  SphereSpec base(n, k);
  long L = std::max(n - 2, 8L);
  ZonalResult r = green_zonal_partial_sum(SphereSpec(n, k, L), theta, tol);
  while (!r.conclusive && L < max_L) {
    L = std::min(2 * L, max_L);
    r = green_zonal_partial_sum(SphereSpec(n, k, L), theta, tol);
  }
  return r;
}

}  // namespace qcurv
