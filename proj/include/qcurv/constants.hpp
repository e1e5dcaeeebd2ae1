#pragma once

#include <algorithm>
#include <atomic>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "qcurv/exactnum.hpp"

namespace qcurv {

namespace detail {

inline void require(bool ok, const char* parameter, const std::string& message) {
  if (!ok) throw DomainError(parameter, message);
}

inline std::string nk(long n, long k) { return "(n,k)=(" + std::to_string(n) + "," + std::to_string(k) + ")"; }

inline mpq_class fact_q(long m) { return mpq_class(factorial(m)); }

// B(n/2 - k - 1, j + 1)^{-1}
inline ExactNumber beta_inv_shifted(long n, long k, long j) {
  return beta_inv(HalfInt::halves(n - 2 * k - 2), HalfInt::of(j + 1));
}

}  // namespace detail

// Auxiliary constant c(n,k,j',l,l',m,m') of the moment bookkeeping.
inline ExactNumber c_aux(long n, long k, long jp, long l, long lp, long m, long mp) {
  using detail::fact_q;
  detail::require(k >= 1, "k", "c_aux needs k >= 1");
  detail::require(n >= 2 * k + 3, "n", "c_aux needs n >= 2k+3 so that n/2-k-1 > 0");
  detail::require(m >= 0 && jp - 2 * m >= 0, "m", "c_aux needs 0 <= 2m <= j'");
  detail::require(n + jp - m + lp - 2 * k - 1 >= 0, "l'", "c_aux: negative factorial argument n+j'-m+l'-2k-1");
  detail::require(jp - m - mp + l - k + 2 >= 0, "m'", "c_aux: negative factorial argument j'-m-m'+l-k+2");
  mpq_class sign = (jp - m) % 2 == 0 ? 1 : -1;
  mpq_class frac = sign * fact_q(jp - m) /
                   (fact_q(m) * fact_q(jp - 2 * m) * fact_q(n + jp - m + lp - 2 * k - 1) * fact_q(jp - m - mp + l - k + 2));
  return detail::beta_inv_shifted(n, k, jp - m) * ExactNumber(frac);
}

namespace detail {

inline void require_l_range(long n, long k, long l) {
  require(k >= 2, "k", "needs k >= 2");
  require(l >= k - 2 && l <= 2 * k - 4, "l", "l must satisfy k-2 <= l <= 2k-4, got l=" + std::to_string(l));
  require(n > 2 * k, "n", "needs n > 2k");
}

}  // namespace detail

// Polynomial c(n,k,l) in its defining form.
inline mpq_class c_nkl(long n, long k, long l) {
  detail::require_l_range(n, k, l);
  mpq_class N(n), K(k), L(l);
  mpq_class A = N + L - 2 * K;
  mpq_class first = 5 * N * (N + 2) * (K - 1) * (3 * N + 2 * K - 4) - 30 * N * (N + 2) * (N - 2) -
                    20 * (N + 2) * (K - 1) * (K - 2) * (N + 3 * K + 1) + 24 * (K - 1) * (K - 2) * (K + 1) * (3 * K + 1);
  mpq_class second = 6 * (N + 2) * (N - 2) - (N + 2) * (K - 1) * (3 * N + 4 * K - 2) + 12 * (K + 1) * (K - 1) * (K - 2);
  mpq_class third = 4 * (K + 1) * (K - 1) * (N - 2 * K - 2 * L + 4) -
                    3 * (N - 2) * (2 * (N - 2 * K + 2) - N * (N + 2 * L - 2 * K));
  return 4 * A * (A + 1) * first + 20 * N * (N - 2 * K) * (A + 1) * second + 5 * N * (N + 2) * (N - 2 * K) * third;
}

// The same polynomial expanded in a = k-3, b = n-2k-4, c = l-k+2.
inline mpq_class c_nkl_expanded(long n, long k, long l) {
  detail::require_l_range(n, k, l);
  detail::require(k >= 3, "k", "expanded form needs k >= 3");
  detail::require(n >= 2 * k + 4, "n", "expanded form needs n >= 2k+4");
  mpz_class a = k - 3, b = n - 2 * k - 4, c = l - k + 2;
  auto p = [](const mpz_class& v, unsigned e) {
    mpz_class r;
    mpz_pow_ui(r.get_mpz_t(), v.get_mpz_t(), e);
    return r;
  };
  mpz_class c2 = 15 * a * p(b, 3) + 1200 * p(a, 2) * b + 3880 * a * b + 1920 + 10656 * a + 480 * b + 4528 * p(a, 2) +
                 624 * p(a, 3) + 40 * p(b, 2) + 450 * a * p(b, 2) + 80 * p(a, 3) * b + 80 * p(a, 2) * p(b, 2) +
                 32 * p(a, 4);
  mpz_class c1 = 71552 * p(a, 2) * b + 414912 * a + 500 * p(a, 2) * p(b, 3) + 247984 * a * b + 31840 * p(a, 3) +
                 53660 * a * p(b, 2) + 3200 * p(a, 4) + 640 * p(a, 3) * p(b, 2) + 11020 * p(b, 3) + 150 * a * p(b, 4) +
                 128 * p(a, 5) + 9056 * p(a, 3) * b + 660 * p(b, 4) + 161440 * p(a, 2) + 448 * p(a, 4) * b +
                 15 * p(b, 5) + 311040 * b + 10520 * p(a, 2) * p(b, 2) + 4830 * a * p(b, 3) + 426240 +
                 85840 * p(b, 2);
  mpz_class c0 = 128 * p(a, 6) + 576 * p(a, 5) * b + 1088 * p(a, 4) * p(b, 2) + 1020 * p(a, 3) * p(b, 3) +
                 560 * p(a, 2) * p(b, 4) + 150 * a * p(b, 5) + 15 * p(b, 6) + 3904 * p(a, 5) + 14720 * p(a, 4) * b +
                 21896 * p(a, 3) * p(b, 2) + 15940 * p(a, 2) * p(b, 3) + 5640 * a * p(b, 4) + 720 * p(b, 5) +
                 49408 * p(a, 4) + 149280 * p(a, 3) * b + 167032 * p(a, 2) * p(b, 2) + 81120 * a * p(b, 3) +
                 13780 * p(b, 4) + 332096 * p(a, 3) + 754720 * p(a, 2) * b + 563824 * a * p(b, 2) +
                 134240 * p(b, 3) + 1250304 * p(a, 2) + 1900224 * a * b + 704640 * p(b, 2) + 2499840 * a +
                 1900800 * b + 2073600;
  return mpq_class(4 * c2 * c * c + 2 * c1 * c + c0);
}

namespace detail {

// Shared l-sum of the Weyl coefficient: sum over l of
// l!/((l-k+2)!(2k-l-4)!(n+l-2k+1)!) * weight(l) * B(n/2-k-1,l+1)^{-1} * {2 chi or Beta}.
template <class Weight>
ExactNumber weyl_l_sum(long n, long k, Weight weight) {
  ExactNumber sum;
  for (long l = k - 2; l <= 2 * k - 4; ++l) {
    ExactNumber tail;
    if (n == 2 * k + 4) {
      if (l != k - 2) continue;
      tail = ExactNumber(2);
    } else {
      tail = beta(HalfInt::halves(n + 2 * l - 4 * k), HalfInt::of(2 * k - l - 2));
    }
    mpq_class f = fact_q(l) / (fact_q(l - k + 2) * fact_q(2 * k - l - 4) * fact_q(n + l - 2 * k + 1));
    sum += ExactNumber(f * weight(l)) * beta_inv_shifted(n, k, l) * tail;
  }
  return sum;
}

inline void require_weyl_domain(long n, long k) {
  require(k >= 2, "k", "C(n,k) needs k >= 2");
  require(n >= 2 * k + 4, "n", "C(n,k) needs n >= 2k+4, got " + nk(n, k));
}

}  // namespace detail

// Weyl coefficient C(n,k), assembled from the polynomial c(n,k,l).
inline ExactNumber big_C(long n, long k) {
  detail::require_weyl_domain(n, k);
  using detail::fact_q;
  mpq_class pre = mpq_class(n - 3) * fact_q(n - 5) * fact_q(k) / (5760 * mpq_class(n) * (n + 2) * (k - 1) * (n - 2 * k - 2));
  return ExactNumber(pre) * detail::weyl_l_sum(n, k, [&](long l) { return c_nkl(n, k, l); });
}

// C(n,k) assembled from the unexpanded bracket of curvature coefficients.
inline ExactNumber big_C_bracketed(long n, long k) {
  detail::require_weyl_domain(n, k);
  using detail::fact_q;
  mpq_class N(n), K(k);
  mpq_class X = (K - 1) * (3 * N + 2 * K - 4) / 144 - (N - 2) / 24 - (K - 1) * (K - 2) * (N + 3 * K + 1) / (36 * N) +
                (K - 1) * (K - 2) * (K + 1) * (3 * K + 1) / (30 * N * (N + 2));
  mpq_class Y = (N - 2) / 12 - (K - 1) * (3 * N + 4 * K - 2) / 72 + (K + 1) * (K - 1) * (K - 2) / (6 * (N + 2));
  auto bracket = [&](long l) -> mpq_class {
    mpq_class L(l);
    mpq_class Z = (K + 1) * (K - 1) * (N - 2 * K - 2 * L + 4) / 18 -
                  (N - 2) * (2 * (N - 2 * K + 2) - N * (N + 2 * L - 2 * K)) / 24;
    return 8 * (N + L - 2 * K) * (N + L - 2 * K + 1) * X + 4 * (N - 2 * K) * (N + L - 2 * K + 1) * Y + (N - 2 * K) * Z;
  };
  mpq_class pre = mpq_class(n - 3) * fact_q(n - 5) * fact_q(k) / (16 * mpq_class(k - 1) * (n - 2 * k - 2));
  return ExactNumber(pre) * detail::weyl_l_sum(n, k, bracket);
}

// Weight of the bilaplacian of f against the Weyl term in the existence
// criterion; zero in the log dimension n = 2k+4.
inline ExactNumber small_c_given(long n, long k, const ExactNumber& C) {
  detail::require(k >= 1, "k", "small_c needs k >= 1");
  detail::require(n >= 2 * k + 4, "n", "small_c needs n >= 2k+4, got " + detail::nk(n, k));
  if (n == 2 * k + 4) return ExactNumber();
  using detail::fact_q;
  mpq_class pre = mpq_class(n - 2 * k) * fact_q(2 * k - 1) / (8 * mpq_class(n) * (n - 2) * (n - 4));
  return ExactNumber(pre) * beta_inv(HalfInt::halves(n - 2 * k), HalfInt::of(2 * k)) / C;
}

inline ExactNumber small_c(long n, long k) {
  if (n == 2 * k + 4 && k >= 1) return ExactNumber();
  return small_c_given(n, k, big_C(n, k));
}

// 1 / b_{n,k} = 2^{k-1} (k-1)! (n-2)(n-4)...(n-2k) omega_{n-1}
inline ExactNumber b_nk_inv(long n, long k) {
  detail::require(k >= 1, "k", "b_nk needs k >= 1");
  detail::require(n > 2 * k, "n", "b_nk needs n > 2k, got " + detail::nk(n, k));
  mpq_class c = pow_q(2, k - 1) * detail::fact_q(k - 1);
  for (long j = 1; j <= k; ++j) c *= n - 2 * j;
  return ExactNumber(c) * sphere_volume(n - 1);
}

inline ExactNumber b_nk(long n, long k) { return b_nk_inv(n, k).inverse(); }

// Coefficient of m(xi) mu^{n-2k} in the mass expansion.
inline ExactNumber mass_coeff(long n, long k) {
  return b_nk_inv(n, k) * beta_inv(HalfInt::halves(n), HalfInt::halves(n)) * beta(HalfInt::halves(n), HalfInt::of(k));
}

// Rational multipliers of |W(xi)|^2 for the curvature quantities at xi in
// conformal normal coordinates.
struct CurvatureCoeffTable {
  mpq_class lap_scal;               // Delta Scal
  mpq_class hess_scal_trace;        // sum_a (nabla^2 Scal)_aa
  mpq_class schouten_double_trace;  // sum P_aa;bb = sum P_ab;ab = sum P_ab;ba
  mpq_class f1;
  mpq_class lap_f1;
  mpq_class f2;
  mpq_class div_T1;           // sum_a (T1)_a;a
  mpq_class T2_trace;         // sum_a (T2)_aa
  mpq_class T2_second;        // sum (T2)_aa;bb = (T2)_ab;ab = (T2)_ab;ba
  mpq_class T3_trace;         // sum_a (T3)_aa
  mpq_class T4_combination;   // sum (T4)_aab;b + (T4)_aba;b + (T4)_abb;a
  mpq_class T5_combination;   // sum (T5)_aabb + (T5)_abab + (T5)_abba
};

inline CurvatureCoeffTable curvature_coeffs(long n, long k) {
  detail::require(n >= 3, "n", "curvature_coeffs needs n >= 3");
  mpq_class N(n), K(k);
  CurvatureCoeffTable t;
  t.lap_scal = rat(1, 6);
  t.hess_scal_trace = rat(-1, 6);
  t.schouten_double_trace = -1 / (12 * (N - 1));
  t.f1 = 0;
  t.lap_f1 = (N - 2) / (24 * (N - 1));
  t.f2 = -(3 * N + 2 * K - 4) / (144 * (N - 1));
  t.div_T1 = -(3 * N + 4 * K - 2) / (72 * (N - 1));
  t.T2_trace = 0;
  t.T2_second = -(K + 1) / (18 * (N - 1));
  t.T3_trace = -(N + 3 * K + 1) / (36 * (N - 1));
  t.T4_combination = -(K + 1) / (6 * (N - 1));
  t.T5_combination = -(K + 1) / (10 * (N - 1));
  return t;
}

struct ScanRow {
  long n = 0;
  long k = 0;
  int sign_C = 0;
  long double value_C = 0;
  int sign_c = 0;
  long double value_c = 0;
  bool violation = false;
};

struct ScanReport {
  std::vector<ScanRow> rows;
  std::vector<ScanRow> violations;
};

// Exact-sign scan of C(n,k) > 0 and c(n,k) >= 0 (zero only at n = 2k+4) over
// k_lo <= k <= k_hi, 2k+4 <= n <= 2k+n_margin. Cells are split across threads.
inline ScanReport scan_positivity(long k_lo, long k_hi, long n_margin, unsigned threads = 0) {
  ScanReport report;
  if (k_lo < 2) throw DomainError("k-range", "scan needs k >= 2");
  if (k_hi < k_lo || n_margin < 4) return report;
  for (long k = k_lo; k <= k_hi; ++k)
    for (long n = 2 * k + 4; n <= 2 * k + n_margin; ++n) report.rows.push_back(ScanRow{n, k});

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(report.rows.size()));
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < report.rows.size(); i = next++) {
      ScanRow& row = report.rows[i];
      ExactNumber C = big_C(row.n, row.k);
      ExactNumber c = small_c_given(row.n, row.k, C);
      row.sign_C = C.sign();
      row.value_C = C.to_float();
      row.sign_c = c.sign();
      row.value_c = c.to_float();
      bool log_dim = row.n == 2 * row.k + 4;
      row.violation = row.sign_C <= 0 || (log_dim ? row.sign_c != 0 : row.sign_c <= 0);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  for (const auto& row : report.rows)
    if (row.violation) report.violations.push_back(row);
  return report;
}

}  // namespace qcurv
