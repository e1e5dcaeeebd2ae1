#include "catch_amalgamated.hpp"

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "qcurv/energy.hpp"
#include "qcurv/radial.hpp"

using namespace qcurv;

namespace {

mpq_class product_form(long n, long k) {
  mpq_class r = 1 / pow_q(4, k);
  for (long j = 1; j <= k; ++j) r *= mpq_class((n - 2 * j) * (n + 2 * j - 2));
  return r;
}

// Bracket part driven by f alone: (D(mu)/D(0))^{-(n-2k)/n} * Lambda, in floats.
long double f_bracket_oracle(const PointData& p, long double mu) {
  long double n = p.n, f = to_float(p.f_val);
  long double ratio = 1 - to_float(p.lap_f) * mu * mu / (2 * (n - 2) * f) +
                      to_float(p.bilap_f) * std::pow(mu, 4) / (8 * (n - 2) * (n - 4) * f);
  return to_float(product_form(p.n, p.k)) * std::pow(ratio, -(n - 2 * p.k) / n);
}

CertifyOptions lcf_options(bool jets) {
  CertifyOptions o;
  o.lcf = true;
  o.jets_vanish = jets;
  return o;
}

bool sorted_with_unique_logs(const ExpansionSeries& s) {
  for (size_t i = 1; i < s.terms.size(); ++i) {
    const auto &a = s.terms[i - 1], &b = s.terms[i];
    if (a.power > b.power || (a.power == b.power && a.log == b.log)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("threshold") {
  auto t = threshold(3, 1);
  CHECK(t.rational_part == mpq_class(3, 4));
  CHECK(t.omega_exponent == mpq_class(2, 3));
  const long double pi = std::numbers::pi_v<long double>;
  CHECK(oracle::close_rel(t.value, 0.75L * std::pow(2 * pi * pi, 2.0L / 3), 1e-15L));
  CHECK(std::fabs(t.value - 5.478L) < 1e-3L);
  CHECK(threshold(5, 2).rational_part == mpq_class(105, 16));
  for (long k = 1; k <= 6; ++k)
    for (long n = 2 * k + 1; n <= 2 * k + 20; ++n) REQUIRE(threshold(n, k).rational_part == product_form(n, k));
  CHECK(oracle::close_rel(t.scaled(8), t.value / 2, 1e-15L));
  CHECK_THROWS_AS(threshold(4, 2), DomainError);
}

TEST_CASE("point data validation") {
  CHECK_THROWS_AS(PointData(4, 2), DomainError);
  CHECK_THROWS_AS(PointData(8, 2, 0), DomainError);
  CHECK_THROWS_AS(PointData(8, 2, -1), DomainError);
  CHECK_THROWS_AS(PointData(8, 2, 1, 0, 0, -1), DomainError);
  CHECK_NOTHROW(PointData(8, 2, 1, 0, 0, 0));
}

TEST_CASE("denominator expansion") {
  auto flat = denominator_expansion(PointData(8, 2));
  REQUIRE(flat.terms.size() == 1);
  CHECK(flat.coeff(0) == sphere_volume(8) / ExactNumber(256));

  PointData p(9, 2, 3, 5, 7);
  auto d = denominator_expansion(p);
  CHECK(d.coeff(2) / d.coeff(0) == ExactNumber(-mpq_class(5) / (2 * 7 * 3)));

  auto e = denominator_expansion(PointData(8, 2, 1, 0, 1));
  CHECK(e.coeff(4) == sphere_volume(8) / ExactNumber(2048 * 6 * 4));
  CHECK(e.remainder.to_string() == "o(mu^4)");

  auto low = denominator_expansion(PointData(3, 1, 1, 1, 1));
  CHECK(low.coeff(4).is_zero());
  CHECK_FALSE(low.coeff(2).is_zero());
}

TEST_CASE("energy expansion of U") {
  auto flat = energy_expansion_U(PointData(10, 2));
  REQUIRE(flat.terms.size() == 1);
  CHECK(flat.remainder.to_string() == "o(mu^4)");

  PointData p(11, 2, 2, 3, 5, 7);
  auto s = energy_expansion_U(p);
  mpq_class lam = product_form(11, 2);
  CHECK(s.coeff(2) == ExactNumber(mpq_class(7) * lam / (2 * 11 * 9) * mpq_class(3, 2)));
  CHECK(s.coeff(4) == ExactNumber(-mpq_class(7) * lam / (4 * 11 * 9) *
                                  (mpq_class(5) / (2 * 7 * 2) - mpq_class(9 * 9) / (11 * 9 * 4))) -
                          big_C(11, 2) * ExactNumber(7));
  CHECK(sorted_with_unique_logs(s));
  CHECK(s.prefactor.omega_exponent == mpq_class(4, 11));
  CHECK(s.prefactor.f_exponent == mpq_class(-7, 11));

  auto log = energy_expansion_U(PointData(10, 3, 1, 0, 0, 2));
  CHECK(log.coeff(4, true) == -big_C(10, 3) * ExactNumber(2));
  CHECK(log.remainder.to_string() == "O(mu^4)");
  CHECK(sorted_with_unique_logs(log));

  auto no_weyl = energy_expansion_U(PointData(11, 2, 1, 0, 0, 7), false);
  CHECK(no_weyl.terms.size() == 1);

  CHECK_THROWS_AS(energy_expansion_U(PointData(7, 2)), DomainError);
  CHECK_THROWS_AS(energy_expansion_U(PointData(9, 1, 1, 0, 0, 1)), DomainError);
}

TEST_CASE("leading value times max_f power equals the threshold") {
  for (long k = 1; k <= 6; ++k)
    for (long n = 2 * k + 1; n <= 2 * k + 20; ++n) {
      Threshold t = threshold(n, k);
      ExpansionSeries s = n >= 2 * k + 4 ? energy_expansion_U(PointData(n, k)) : mass_expansion(PointData(n, k, 1, 0, 0, 0, 0));
      REQUIRE(s.leading() == ExactNumber(t.rational_part));
      REQUIRE(s.prefactor.omega_exponent == t.omega_exponent);
      REQUIRE(oracle::close_rel(s.evaluate(0.5L), t.value, 1e-15L));
    }
}

TEST_CASE("Weyl coefficient: direct formula and block assembly agree") {
  for (long k = 2; k <= 4; ++k)
    for (long n = 2 * k + 4; n <= 2 * k + 12; ++n) {
      auto r = weyl_coefficient_two_path(n, k);
      INFO("(n,k)=(" << n << "," << k << ") direct " << r.direct.to_string() << " assembled " << r.assembled.to_string());
      REQUIRE(r.equal);
      REQUIRE(r.log == (n == 2 * k + 4));
    }
}

TEST_CASE("quotient assembly reproduces the whole bracket") {
  std::vector<PointData> cases{PointData(8, 2, 1, 0, 0, 1), PointData(9, 2, 2, 1, -3, 5), PointData(12, 3, rat(1, 3), 2, 7, 1),
                               PointData(10, 3, 5, -1, 2, 3), PointData(13, 4, 2, 1, 1, 2), PointData(14, 5, 1, 0, 1, 1)};
  for (const auto& p : cases) {
    auto a = energy_expansion_U(p), b = energy_expansion_quotient(p);
    REQUIRE(a.terms.size() == b.terms.size());
    for (size_t i = 0; i < a.terms.size(); ++i) {
      REQUIRE(a.terms[i].power == b.terms[i].power);
      REQUIRE(a.terms[i].log == b.terms[i].log);
      REQUIRE(a.terms[i].coeff == b.terms[i].coeff);
    }
  }
}

TEST_CASE("f-driven terms match a floating-point power of the denominator") {
  for (const auto& p : {PointData(9, 2, 2, 1, -3), PointData(12, 3, 3, 2, 7), PointData(16, 4, 1, -2, 5)})
    for (long double mu : {1e-2L, 3e-2L}) {
      auto s = energy_expansion_U(p);
      long double bracket = s.evaluate(mu) / s.prefactor.numeric();
      long double ref = f_bracket_oracle(p, mu);
      CHECK(std::fabs(bracket - ref) <= 100 * std::pow(mu, 6) * std::fabs(ref));
    }
}

TEST_CASE("mass expansion") {
  auto flat = mass_expansion(PointData(5, 2, 1, 0, 0, 0, 0));
  CHECK(flat.terms.size() == 1);

  auto s = mass_expansion(PointData(3, 1, 1, 0, 0, 0, 1));
  CHECK(s.coeff(1) == ExactNumber(rat(-64, 3)));
  CHECK(s.prefactor.constant == ExactNumber(rat(3, 4)));
  CHECK(s.remainder.to_string() == "o(mu^1)");

  for (long k = 1; k <= 5; ++k)
    for (long n = 2 * k + 1; n <= 2 * k + 6; ++n) {
      PointData p(n, k, rat(2, 3), 0, 0, 0, rat(5, 7));
      auto direct = mass_expansion(p), quot = mass_expansion_quotient(p);
      REQUIRE(direct.coeff(n - 2 * k) == -mass_coeff(n, k) * ExactNumber(rat(5, 7)));
      REQUIRE(quot.coeff(n - 2 * k) == direct.coeff(n - 2 * k));
      REQUIRE(quot.coeff(0) == ExactNumber(1));
    }
  CHECK_THROWS_AS(mass_expansion(PointData(5, 2)), DomainError);
}

TEST_CASE("certify examples") {
  auto a = certify(PointData(10, 3, 1, 0, 0, 1));
  CHECK(a.certified);
  CHECK(a.branch == Branch::weyl);
  CHECK(oracle::close_rel(a.threshold, threshold(10, 3).value, 1e-15L));

  auto b = certify(PointData(10, 3, 1, 0, 0, 0));
  CHECK_FALSE(b.certified);
  CHECK(b.branch == Branch::weyl);

  auto c = certify(PointData(5, 2, 1, 0, 0, 0, rat(1, 2)));
  CHECK(c.certified);
  CHECK(c.branch == Branch::mass);
  CHECK(c.hypothesis_value == 0.5L);

  auto d = certify(PointData(11, 3, 1, 0, 0, 1));
  CHECK(d.branch == Branch::weyl_bilap);
  CHECK(d.certified);

  // A large negative bilaplacian beats the Weyl term.
  auto e = certify(PointData(11, 3, 1, 0, -1000000, 1));
  CHECK_FALSE(e.certified);
  CHECK(e.hypothesis_exact == 1 - 1000000 * small_c(11, 3).rational());
}

TEST_CASE("certify preconditions and flags") {
  CHECK_THROWS_AS(certify(PointData(11, 3, 1, 1, 0, 1)), DomainError);
  CHECK_THROWS_AS(certify(PointData(5, 2)), DomainError);
  CHECK_THROWS_AS(certify(PointData(12, 3, 1, 0, 0, 1), lcf_options(false)), DomainError);
  CHECK_NOTHROW(certify(PointData(5, 2, 1, 1, 0, 0, 1)));  // n = 2k+1 imposes no Laplacian condition

  PointData lcf(12, 3, 1, 0, 0, 0, 2);
  CHECK_FALSE(certify(lcf, lcf_options(false)).certified);
  auto v = certify(lcf, lcf_options(true));
  CHECK(v.certified);
  CHECK(v.branch == Branch::lcf);
  CHECK(v.assumptions.size() >= 3);

  auto below = certify(PointData(10, 3, 1, 0, 0, 1), {.max_f = mpq_class(2)});
  CHECK_FALSE(below.certified);
  CHECK_THROWS_AS(certify(PointData(10, 3, 2, 0, 0, 1), {.max_f = mpq_class(1)}), DomainError);
}

TEST_CASE("certify is monotone in the tested quantity") {
  for (long k = 1; k <= 4; ++k)
    for (long n = 2 * k + 1; n <= 2 * k + 8; ++n) {
      bool was = false;
      for (int i = -4; i <= 8; ++i) {
        mpq_class x = rat(i, 3);
        ExistenceVerdict v;
        if (n <= 2 * k + 3) {
          v = certify(PointData(n, k, 1, 0, 0, 0, x));
        } else {
          if (i < 0) continue;
          v = certify(PointData(n, k, 1, 0, k >= 2 ? -1 : 0, x));
        }
        REQUIRE((!was || v.certified));
        was = v.certified;
      }
    }
}

TEST_CASE("numerator constant matches quadrature of U Delta^2 U on B(0,1)") {
  const long n = 8, k = 2;
  const long double mu = 1e-2L;
  auto lap = oracle::laplacian_power(n, k, k);
  long double omega = sphere_volume(n - 1).to_float();
  // x = mu y: int_{|x|<1} U_mu Delta^2 U_mu dx = int_{|y|<1/mu} U Delta^2 U dy, r = |y|^2
  auto integrand = [&](long double r) {
    return omega / 2 * std::pow(r, (n - 2) / 2.0L) * std::pow(1 + r, -(n - 2 * k) / 2.0L) * oracle::eval_sum(lap, r);
  };
  auto q = quad_oracle(integrand, QuadDomain{0, 1 / (mu * mu), QuadDomain::Map::logarithmic}, 1e-12L);
  long double series = numerator_expansion(PointData(n, k)).coeff(0).to_float();
  CHECK(std::fabs(q.value - series) <= 1e-5L * series + std::pow(mu, n - 2 * k) * series);
}
