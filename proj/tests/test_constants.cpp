#include "catch_amalgamated.hpp"

#include "qcurv/constants.hpp"

using namespace qcurv;

namespace {

mpq_class fact(long m) { return mpq_class(factorial(m)); }

// Rational part of a pi-free ExactNumber, failing loudly otherwise.
mpq_class as_rational(const ExactNumber& x) {
  REQUIRE(x.is_rational());
  return x.rational();
}

// B(a, j+1)^{-1} = a(a+1)...(a+j)/j! for integer j, evaluated without Gamma.
mpq_class beta_inv_int(const mpq_class& a, long j) {
  mpq_class p = 1;
  for (long i = 0; i <= j; ++i) p *= a + i;
  return p / fact(j);
}

}  // namespace

TEST_CASE("c_aux spot values", "[constants][c_aux]") {
  CHECK(as_rational(c_aux(10, 3, 0, 1, 1, 0, 0)) == mpq_class(10 - 6 - 2) / (2 * fact(10 + 1 - 6 - 1)));
  CHECK(as_rational(c_aux(12, 4, 1, 2, 2, 0, 0)) == -mpq_class((12 - 8 - 2) * (12 - 8)) / (4 * fact(12 + 2 - 8)));
  // j' = m = 0: B(n/2-k-1, 1)^{-1} / ((n+l'-2k-1)! (l-k+2)!)
  mpq_class a = rat(10 - 6 - 2, 2);
  CHECK(as_rational(c_aux(10, 3, 0, 1, 1, 0, 0)) == beta_inv_int(a, 0) / (fact(4) * fact(0)));
  CHECK_THROWS_AS(c_aux(8, 3, 0, 1, 0, 0, 0), DomainError);
  CHECK_THROWS_AS(c_aux(12, 3, 1, 1, 0, 1, 0), DomainError);
}

TEST_CASE("c_aux identity list over a grid", "[constants][c_aux][property]") {
  for (long k = 3; k <= 8; ++k)
    for (long n = 2 * k + 4; n <= 2 * k + 20; ++n)
      for (long lp = 0; lp <= 4; ++lp) {
        mpq_class N(n), K(k), L(lp);
        mpq_class first = as_rational(c_aux(n, k, 0, k - 2, lp, 0, 0));
        REQUIRE(first == (N - 2 * K - 2) / (2 * fact(n + lp - 2 * k - 1)));
        mpq_class second = as_rational(c_aux(n, k, 1, k - 2, lp, 0, 0));
        REQUIRE(second == -(N - 2 * K - 2) * (N - 2 * K) / (4 * fact(n + lp - 2 * k)));
        mpq_class combo = 2 * as_rational(c_aux(n, k, 2, k - 3, lp, 0, 0)) + as_rational(c_aux(n, k, 2, k - 3, lp, 1, 0));
        REQUIRE(combo == -(N - 2 * K - 2) * (N - 2 * K) * (N + 2 * L - 2 * K) / (8 * fact(n + lp - 2 * k + 1)));
        auto c = [&](long jp, long l, long m, long mp) { return as_rational(c_aux(n, k, jp, l, lp, m, mp)); };
        REQUIRE(c(2, k - 2, 0, 0) == (N - 2 * K - 2) * (N - 2 * K) * (N - 2 * K + 2) / (32 * fact(n + lp - 2 * k + 1)));
        REQUIRE(2 * c(2, k - 2, 0, 1) + c(2, k - 2, 1, 1) == combo);
        REQUIRE(4 * c(2, k - 2, 0, 0) + c(2, k - 2, 1, 0) == combo);
        REQUIRE(24 * c(3, k - 3, 0, 0) + 2 * c(3, k - 3, 1, 0) ==
                (N - 2 * K - 2) * (N - 2 * K) * (N - 2 * K + 2) * (N + 2 * L - 2 * K) / (8 * fact(n + lp - 2 * k + 2)));
        if (k >= 4)
          REQUIRE(24 * c(4, k - 4, 0, 0) + 2 * c(4, k - 4, 1, 0) + c(4, k - 4, 2, 0) ==
                  (N - 2 * K - 2) * (N - 2 * K) * (N - 2 * K + 2) * (N + 2 * L - 2 * K) * (N + 2 * L - 2 * K + 2) /
                      (64 * fact(n + lp - 2 * k + 3)));
      }
}

TEST_CASE("c_aux matches a direct re-evaluation of its defining product", "[constants][c_aux][property]") {
  for (long k = 2; k <= 5; ++k)
    for (long n = 2 * k + 4; n <= 2 * k + 10; ++n)
      for (long jp = 0; jp <= 4; ++jp)
        for (long m = 0; 2 * m <= jp; ++m)
          for (long mp = 0; mp <= 1; ++mp)
            for (long l = k - 2; l <= k; ++l)
              for (long lp = 0; lp <= 2; ++lp) {
                if (jp - m - mp + l - k + 2 < 0) continue;
                mpq_class a = rat(n - 2 * k - 2, 2);
                mpq_class expected = ((jp - m) % 2 ? -1 : 1) * fact(jp - m) * beta_inv_int(a, jp - m) /
                                     (fact(m) * fact(jp - 2 * m) * fact(n + jp - m + lp - 2 * k - 1) *
                                      fact(jp - m - mp + l - k + 2));
                REQUIRE(as_rational(c_aux(n, k, jp, l, lp, m, mp)) == expected);
              }
}

TEST_CASE("c(n,k,l) spot values", "[constants][c_nkl]") {
  CHECK(c_nkl(10, 3, 1) == 2073600);
  CHECK(c_nkl_expanded(10, 3, 1) == 2073600);
  CHECK(c_nkl(10, 3, 2) == 2933760);
  CHECK(c_nkl_expanded(10, 3, 2) == 2933760);
  CHECK(c_nkl(8, 2, 0) == 537600);
  CHECK_THROWS_AS(c_nkl(10, 3, 3), DomainError);
  CHECK_THROWS_AS(c_nkl(10, 3, 0), DomainError);
  CHECK_THROWS_AS(c_nkl_expanded(8, 2, 0), DomainError);
}

TEST_CASE("definitional and expanded c(n,k,l) agree", "[constants][c_nkl][property]") {
  for (long k = 3; k <= 10; ++k)
    for (long n = 2 * k + 4; n <= 2 * k + 40; ++n)
      for (long l = k - 2; l <= 2 * k - 4; ++l) REQUIRE(c_nkl(n, k, l) == c_nkl_expanded(n, k, l));
}

// The defining bracket reduces to 15n(n+2)(n-4)^2(n^2-4n-4) at k=2, three
// times the printed closed form; C(n,2) is built from the defining bracket.
TEST_CASE("c(n,2,0) closed form", "[constants][c_nkl][property]") {
  for (long n = 8; n <= 200; ++n) {
    mpz_class N = n;
    REQUIRE(c_nkl(n, 2, 0) == mpq_class(15 * N * (N + 2) * (N - 4) * (N - 4) * (N * N - 4 * N - 4)));
  }
}

TEST_CASE("C(n,k) regression values", "[constants][big_C]") {
  CHECK(as_rational(big_C(8, 2)) == rat(7, 12));
  CHECK(as_rational(big_C(9, 2)) == rat(205, 288));
  CHECK(as_rational(big_C(10, 2)) == rat(7, 16));
  CHECK(as_rational(big_C(10, 3)) == 21);
  CHECK(as_rational(big_C(12, 3)) == rat(45, 2));
  CHECK(as_rational(big_C(11, 3)) == rat(70835, 2304));
  CHECK(as_rational(big_C(12, 4)) == 1386);
  CHECK(as_rational(big_C(14, 4)) == 1892);
  CHECK(as_rational(big_C(16, 4)) == 2385);
  CHECK_THROWS_AS(big_C(9, 3), DomainError);
  CHECK_THROWS_AS(big_C(12, 1), DomainError);
}

TEST_CASE("C(n,k) in the log dimension uses the l=k-2 term with factor 2", "[constants][big_C]") {
  for (long k = 2; k <= 8; ++k) {
    long n = 2 * k + 4;
    mpq_class pre = mpq_class(n - 3) * fact(n - 5) * fact(k) / (5760 * mpq_class(n) * (n + 2) * (k - 1) * (n - 2 * k - 2));
    long l = k - 2;
    mpq_class term = fact(l) / (fact(0) * fact(k - 2) * fact(n + l - 2 * k + 1)) * c_nkl(n, k, l) *
                     beta_inv_int(rat(n - 2 * k - 2, 2), l) * 2;
    CHECK(as_rational(big_C(n, k)) == pre * term);
  }
}

TEST_CASE("C(n,k) from c(n,k,l) equals C(n,k) from the curvature bracket", "[constants][big_C][property]") {
  for (long k = 2; k <= 8; ++k)
    for (long n = 2 * k + 4; n <= 2 * k + 30; ++n) REQUIRE(big_C(n, k) == big_C_bracketed(n, k));
}

TEST_CASE("small c(n,k)", "[constants][small_c]") {
  for (long k = 1; k <= 10; ++k) CHECK(small_c(2 * k + 4, k).is_zero());
  ExactNumber expected = ExactNumber(rat(8 * 6, 8 * 12 * 10 * 8)) * beta_inv(HalfInt::of(4), HalfInt::of(4)) / big_C(12, 2);
  CHECK(small_c(12, 2) == expected);
  CHECK(small_c(12, 2).sign() == 1);
  CHECK_THROWS_AS(small_c(9, 3), DomainError);
}

TEST_CASE("b_{n,k} and the fundamental solution profile", "[constants][b_nk]") {
  CHECK(b_nk(3, 1) == ExactNumber::monomial(rat(1, 4), HalfInt::of(-1)));
  CHECK(b_nk(5, 2) == (ExactNumber(6) * sphere_volume(4)).inverse());
  CHECK(b_nk(5, 2).pi_exponent() == HalfInt::of(-2));
  CHECK_THROWS_AS(b_nk(4, 2), DomainError);
  // Delta_0^k |x|^{2k-n} = 0 away from the origin, via Delta_0 |x|^a = a(a+n-2)|x|^{a-2}
  for (long k = 1; k <= 4; ++k)
    for (long n = 2 * k + 1; n <= 13; ++n) {
      long a = 2 * k - n;
      long coeff = 1;
      for (long j = 0; j < k; ++j, a -= 2) coeff *= a * (a + n - 2);
      CHECK(coeff == 0);
    }
}

TEST_CASE("mass coefficient", "[constants][mass_coeff]") {
  CHECK(mass_coeff(3, 1) == ExactNumber(rat(64, 3)));
  // omega_{n-1} leaves pi^{n/2} (n even) or pi^{(n-1)/2} against one pi in B(n/2,n/2) (n odd)
  for (long n = 3; n <= 30; ++n)
    for (long k = 1; 2 * k < n; ++k) {
      ExactNumber a = mass_coeff(n, k);
      REQUIRE(a.is_monomial());
      REQUIRE(a.pi_exponent() == HalfInt::of(n % 2 ? (n - 3) / 2 : n / 2));
      REQUIRE(a.sign() == 1);
    }
  // 2*_k (n-2k)/n = 2
  for (long n = 3; n <= 60; ++n)
    for (long k = 1; 2 * k < n; ++k) REQUIRE(mpq_class(2 * n, n - 2 * k) * mpq_class(n - 2 * k, n) == 2);
}

TEST_CASE("curvature coefficient table", "[constants][curvature]") {
  CHECK(curvature_coeffs(10, 3).lap_f1 == rat(1, 27));
  CHECK(curvature_coeffs(10, 3).f2 == rat(-2, 81));
  for (long n = 3; n <= 12; ++n) {
    auto t = curvature_coeffs(n, 2);
    CHECK(t.lap_scal == rat(1, 6));
    CHECK(t.f1 == 0);
    CHECK(t.T2_trace == 0);
  }
  CHECK_THROWS_AS(curvature_coeffs(2, 1), DomainError);
}

TEST_CASE("positivity scan", "[constants][scan]") {
  CHECK(scan_positivity(3, 2, 10).rows.empty());
  auto single = scan_positivity(2, 2, 4);
  REQUIRE(single.rows.size() == 1);
  CHECK(single.rows[0].n == 8);
  CHECK(single.rows[0].sign_C == 1);
  CHECK(single.rows[0].sign_c == 0);
  auto report = scan_positivity(2, 12, 60, 4);
  CHECK(report.violations.empty());
  CHECK(report.rows.size() == 11 * 57);
  for (const auto& row : report.rows)
    if (row.n > 2 * row.k + 4) REQUIRE(row.sign_c == 1);
}
