#include "catch_amalgamated.hpp"

#include <cmath>

#include "oracles.hpp"
#include "qcurv/radial.hpp"

using namespace qcurv;

using namespace oracle;

namespace {

HalfInt h(long twice) { return HalfInt::halves(twice); }

}  // namespace

TEST_CASE("radial derivatives of the bubble", "[radial][d_r_U]") {
  BubbleParams p(5, 1);
  CHECK(d_r_U(p, 1, 0) == Catch::Approx(-1.5L).epsilon(1e-18));
  CHECK(d_r_U_coeff(5, 1, 1) == rat(-3, 2));
  for (long double r : {0.0L, 0.5L, 3.0L}) CHECK(d_r_U(p, 0, r) == Catch::Approx(std::pow(1 + r, -1.5L)).epsilon(1e-18));
  for (long j = 0; j <= 10; ++j) CHECK(ExactNumber(d_r_U_coeff(12, 3, j)) == d_r_U_coeff_beta(12, 3, j));
  CHECK_THROWS_AS(BubbleParams(4, 2), DomainError);
  CHECK_THROWS_AS(BubbleParams(6, 2, 0), DomainError);
}

TEST_CASE("radial derivatives agree with finite differences", "[radial][d_r_U][oracle]") {
  for (long k = 1; k <= 5; ++k)
    for (long n = 2 * k + 1; n <= 2 * k + 12; ++n) {
      BubbleParams p(n, k);
      for (long j = 0; j <= 6; ++j)
        for (long double r : {0.0L, 0.1L, 0.5L, 1.0L, 2.0L, 5.0L, 10.0L}) {
          long double fd = derivative([&](long double s) { return d_r_U(p, j, s); }, r, 1e-3L * (1 + r));
          REQUIRE(close_rel(d_r_U(p, j + 1, r), fd, 1e-7L));
        }
    }
}

TEST_CASE("Laplacian powers match the radial recursion exactly", "[radial][laplacian][oracle]") {
  for (long k = 1; k <= 5; ++k)
    for (long n = 2 * k + 1; n <= 2 * k + 12; ++n)
      for (long l = 0; l <= k; ++l) {
        if (l < k && n <= 2 * k + 2) continue;
        RadialSum f = laplacian_power(n, k, l);
        std::map<long, mpq_class> closed;
        for (const auto& t : laplacian_pow_U_terms(n, k, l)) {
          REQUIRE(t.coeff.is_rational());
          closed[t.exponent.twice] += t.coeff.rational();
        }
        std::erase_if(closed, [](const auto& kv) { return kv.second == 0; });
        INFO("n=" << n << " k=" << k << " l=" << l);
        REQUIRE(closed == to_shifted_basis(f));
        BubbleParams p(n, k);
        for (long double r : {0.0L, 0.25L, 1.0L, 3.0L, 10.0L, 50.0L})
          REQUIRE(close_rel(laplacian_pow_U(p, l, r), eval_sum(f, r), 1e-7L));
      }
}

TEST_CASE("Laplacian power domain", "[radial][laplacian]") {
  CHECK_THROWS_AS(laplacian_pow_U_terms(10, 3, 4), DomainError);
  CHECK_THROWS_AS(laplacian_pow_U_terms(8, 3, 1), DomainError);
  CHECK(laplacian_pow_U_terms(7, 3, 3).size() == 1);
}

TEST_CASE("partial derivatives of U agree with finite differences", "[radial][partial_U][oracle]") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> coord(-0.9, 0.9);
  std::uniform_int_distribution<int> slot(0, 3);
  for (auto [n, k] : {std::pair{6L, 2L}, std::pair{9L, 3L}, std::pair{5L, 1L}}) {
    BubbleParams p(n, k);
    for (int trial = 0; trial < 12; ++trial) {
      std::vector<long double> x(n);
      for (auto& v : x) v = coord(rng);
      std::vector<int> idx;
      for (int j = 1; j <= 5; ++j) {
        idx.push_back(slot(rng));
        std::vector<int> prefix(idx.begin(), idx.end() - 1);
        int dir = idx.back();
        long double fd = derivative(
            [&](long double t) {
              auto y = x;
              y[dir] = t;
              return partial_U(p, prefix, y);
            },
            x[dir]);
        long double exact = partial_U(p, idx, x);
        REQUIRE(std::fabs(exact - fd) <= 1e-7L * std::max(std::fabs(fd), 1.0L));
      }
    }
  }
  CHECK_THROWS_AS(partial_U(BubbleParams(6, 2), {0, 7}, {0.1L, 0.2L}), DomainError);
}

TEST_CASE("moment integrals", "[radial][moment]") {
  auto one = moment_integral(HalfInt::of(1), HalfInt::of(2), 1e-3L, 1);
  CHECK(one.kind == MomentResult::Kind::exact_beta);
  CHECK(one.value == ExactNumber(1));
  CHECK(moment_integral(HalfInt::of(4), HalfInt::of(8), 1e-3L, 1).value == beta(HalfInt::of(4), HalfInt::of(4)));
  CHECK_THROWS_AS(moment_integral(HalfInt::of(3), HalfInt::of(2), 1e-3L, 1), DomainError);

  auto log_case = moment_integral(HalfInt::of(3), HalfInt::of(3), 1e-3L, 1);
  REQUIRE(log_case.kind == MomentResult::Kind::log_divergent);
  CHECK(log_case.log_coefficient == ExactNumber(2));
  long double mu = 1e-3L;
  long double R = 1 / (mu * mu);
  long double numeric =
      quad_oracle([](long double r) { return r * r / std::pow(1 + r, 3); }, {0, R, QuadDomain::Map::logarithmic}).value;
  CHECK(std::fabs(numeric - 2 * std::log(1 / mu)) <= log_case.remainder_bound);
  // ratio to ln(1/mu) approaches 2 as mu -> 0; the O(1) part is -psi(3) - gamma = -3/2
  CHECK(numeric / std::log(1 / mu) == Catch::Approx(2 - 1.5L / std::log(1 / mu)).epsilon(1e-5));
}

TEST_CASE("log-dimension moment slope", "[radial][moment][oracle]") {
  for (long k = 1; k <= 4; ++k) {
    long n = 2 * k + 4;
    HalfInt a = h(n);
    auto res = moment_integral(a, a, 1e-2L, 1);
    REQUIRE(res.kind == MomentResult::Kind::log_divergent);
    std::vector<long double> xs, ys;
    for (long double mu : {1e-2L, 1e-3L, 1e-4L}) {
      long double R = 1 / (mu * mu);
      auto f = [&](long double r) { return std::pow(r, n / 2.0L - 1) / std::pow(1 + r, n / 2.0L); };
      xs.push_back(std::log(1 / mu));
      ys.push_back(quad_oracle(f, {0, R, QuadDomain::Map::logarithmic}).value);
    }
    long double mx = (xs[0] + xs[1] + xs[2]) / 3, my = (ys[0] + ys[1] + ys[2]) / 3, sxy = 0, sxx = 0;
    for (int i = 0; i < 3; ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    CHECK(close_rel(sxy / sxx, res.log_coefficient.to_float(), 1e-2L));
  }
}

TEST_CASE("sphere moments", "[radial][sphere_moment]") {
  for (long n = 3; n <= 12; ++n) {
    ExactNumber w = sphere_volume(n - 1);
    CHECK(sphere_moment(n, {0, 0}) == ExactNumber(rat(1, n)) * w);
    CHECK(sphere_moment(n, {1, 1, 1, 1}) == ExactNumber(rat(3, n * (n + 2))) * w);
    CHECK(sphere_moment(n, {0, 1, 1}).is_zero());
    CHECK(sphere_moment(n, {0, 1}).is_zero());
  }
  CHECK(sphere_moment(4, {}) == sphere_volume(3));
}

TEST_CASE("sphere moments agree with Monte Carlo on S^2 and S^4", "[radial][sphere_moment][oracle]") {
  const auto& cases = moment_monomials();
  for (long n : {3L, 5L}) {
    auto mc = monte_carlo_moments(n, cases, 3000000, 424242 + n);
    for (size_t q = 0; q < cases.size(); ++q) {
      long double exact = sphere_moment(n, cases[q]).to_float();
      INFO("n=" << n << " degree=" << cases[q].size() << " mc=" << static_cast<double>(mc[q])
                << " exact=" << static_cast<double>(exact));
      CHECK(close_rel(mc[q], exact, 1e-3L));
    }
  }
}

TEST_CASE("Beta identity linking sphere moments and volumes", "[radial][identity]") {
  for (long n = 3; n <= 30; ++n)
    for (long j = 0; j <= 8; j += 2) {
      ExactNumber rhs = ExactNumber(pow_q(2, 2 - n) * fact(n - 1) * fact(j / 2) / (mpq_class(n - 2) * fact(n + j / 2 - 1))) *
                        sphere_volume(n) / sphere_volume(n - 1) * beta_inv(h(n), h(n + j));
      REQUIRE(beta(h(n - 2), h(j + 2)) == rhs);
    }
}

TEST_CASE("composite Beta identity for the moment integrals", "[radial][identity]") {
  long checked = 0;
  for (long k = 1; k <= 5; ++k)
    for (long n = 2 * k + 4; n <= 2 * k + 16; ++n)
      for (long jp = 0; jp <= 4; ++jp)
        for (long jpp = 0; jpp <= jp + 4; ++jpp) {
          if ((jp + jpp) % 2) continue;
          for (long m = 0; 2 * m <= jp; ++m)
            for (long lp = 0; lp <= 2 * k; ++lp) {
              long A = n + jp - jpp + 2 * lp - 4 * k, B = jpp - jp + 4 * k - 2 * lp;
              if (A <= 0 || B <= 0 || n + jp - m + lp - 2 * k - 1 < 0) continue;
              long s = n + jp + jpp - 2 * m;
              ExactNumber lhs = beta_inv(h(n), h(s)) * beta(h(s), h(A));
              ExactNumber rhs = ExactNumber(fact((jp + jpp) / 2 + n - m - 1) /
                                            (fact(n + jp - m + lp - 2 * k - 1) * fact((jpp - jp) / 2 + 2 * k - lp - 1))) *
                                beta(h(A), h(B));
              REQUIRE(lhs == rhs);
              ++checked;
            }
        }
  CHECK(checked > 1000);
}

// The printed left side B(n/2+l'-2k, 2k-l'+4) is a misprint; the recursion
// B(a,b) = 2(b-1)/(n-2) B(a,b-1) with a+b = n/2 forces second argument 2k-l'.
TEST_CASE("Beta step identities", "[radial][identity]") {
  for (long k = 2; k <= 6; ++k)
    for (long n = 2 * k + 4; n <= 2 * k + 20; ++n) {
      for (long lp = 0; lp <= 2 * k - 3; ++lp) {
        HalfInt a = h(n + 2 * lp - 4 * k);
        if (!a.positive()) continue;
        REQUIRE(beta(a, HalfInt::of(2 * k - lp)) ==
                ExactNumber(rat(4 * (2 * k - lp - 1) * (2 * k - lp - 2), (n - 2) * (n - 4))) * beta(a, HalfInt::of(2 * k - lp - 2)));
      }
      for (long l = 0; l < k; ++l)
        for (long lp = l; lp <= 2 * l; ++lp) {
          HalfInt a = h(n + 2 * lp - 2 * l - 2 * k - 4);
          long b = k + l - lp;
          if (!a.positive() || b < 1) continue;
          ExactNumber top = beta(a, HalfInt::of(b + 2));
          REQUIRE(top == ExactNumber(rat(2 * (b + 1), n - 2)) * beta(a, HalfInt::of(b + 1)));
          REQUIRE(top == ExactNumber(rat(4 * (b + 1) * b, (n - 2) * (n - 4))) * beta(a, HalfInt::of(b)));
        }
    }
}

TEST_CASE("delta contraction catalog", "[radial][delta]") {
  CHECK(delta_contraction_sum(0, 0, 0).at({}) == 1);
  auto e = delta_contraction_sum(2, 2, 1);
  CHECK(e.scalar == 4);
  CHECK(e.at({0, 0, 1, 1}) == 4);
  CHECK(e.at({0, 1, 0, 1}) == 0);
  CHECK_THROWS_AS(delta_contraction_sum(3, 0, 0), DomainError);
  CHECK_THROWS_AS(delta_contraction_sum(2, 0, 2), DomainError);
}

TEST_CASE("delta contraction catalog matches permutation enumeration", "[radial][delta][oracle]") {
  CHECK(delta_catalog_mismatches() == 0);
  CHECK(brute_delta(2, 2, 0, {0, 0, 1, 1}) == 16);
  CHECK(brute_delta(4, 0, 0, {0, 0, 0, 0}) == 8 * 24 * 3);
}

TEST_CASE("quadrature oracle", "[radial][quad]") {
  CHECK(quad_oracle([](long double) { return 1.0L; }, {0, 1}).value == Catch::Approx(1.0L).epsilon(1e-15));
  long double b44 = beta(HalfInt::of(4), HalfInt::of(4)).to_float();
  auto res = quad_oracle([](long double r) { return std::pow(r, 3) / std::pow(1 + r, 8); }, {0, 0, QuadDomain::Map::half_line});
  CHECK(close_rel(res.value, b44, 1e-10L));
  CHECK_THROWS_AS(quad_oracle([](long double r) { return 1 / std::sqrt(r) + std::sin(1 / r); }, {0, 1}, 1e-14L, 3),
                  QuadratureFailure);
}

TEST_CASE("radialized energy of the bubble matches the closed form", "[radial][quad][oracle]") {
  for (auto [n, k] : {std::pair{8L, 2L}, std::pair{10L, 3L}, std::pair{7L, 1L}}) {
    BubbleParams p(n, k);
    auto integrand = [&](long double r) {
      return std::pow(r, (n - 2) / 2.0L) * std::pow(1 + r, -(n - 2 * k) / 2.0L) * laplacian_pow_U(p, k, r);
    };
    long double numeric = sphere_volume(n - 1).to_float() / 2 *
                          quad_oracle(integrand, {0, 0, QuadDomain::Map::half_line}, 1e-12L).value;
    ExactNumber closed = ExactNumber(pow_q(2, 2 * k - n) * fact(2 * k - 1)) * sphere_volume(n) *
                         beta_inv(h(n - 2 * k), HalfInt::of(2 * k));
    CHECK(close_rel(numeric, closed.to_float(), 1e-6L));
  }
}
