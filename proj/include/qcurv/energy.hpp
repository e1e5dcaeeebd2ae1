#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "qcurv/constants.hpp"
#include "qcurv/exactnum.hpp"

namespace qcurv {

// Pointwise data at the concentration point xi, in conformal normal coordinates.
struct PointData {
  long n = 0;
  long k = 0;
  mpq_class f_val = 1;
  mpq_class lap_f = 0;
  mpq_class bilap_f = 0;
  mpq_class weyl_sq = 0;
  std::optional<mpq_class> mass;

  PointData(long n_, long k_, mpq_class f = 1, mpq_class lap = 0, mpq_class bilap = 0, mpq_class weyl = 0,
            std::optional<mpq_class> m = std::nullopt)
      : n(n_), k(k_), f_val(std::move(f)), lap_f(std::move(lap)), bilap_f(std::move(bilap)), weyl_sq(std::move(weyl)),
        mass(std::move(m)) {
    detail::require(k >= 1, "k", "k must be >= 1");
    detail::require(n > 2 * k, "n", "energy expansions need n > 2k, got " + detail::nk(n, k));
    detail::require(sgn(f_val) > 0, "f_val", "f(xi) must be positive");
    detail::require(sgn(weyl_sq) >= 0, "weyl_sq", "|W(xi)|^2 must be nonnegative");
  }
};

struct Remainder {
  bool big_o = false;  // O(...) rather than o(...)
  long power = 0;
  bool log = false;

  std::string to_string() const {
    std::string s = std::string(big_o ? "O" : "o") + "(mu^" + std::to_string(power);
    if (log) s += " ln(1/mu)";
    return s + ")";
  }
};

struct SeriesTerm {
  long power = 0;
  bool log = false;  // multiplied by ln(1/mu)
  ExactNumber coeff;
};

// constant * omega_n^{omega_exponent} * f(xi)^{f_exponent}; the two powers
// stay symbolic until numeric().
struct Prefactor {
  ExactNumber constant{1};
  long n = 0;
  mpq_class omega_exponent = 0;
  mpq_class f_value = 1;
  mpq_class f_exponent = 0;

  long double numeric() const {
    long double v = constant.to_float();
    if (omega_exponent != 0) v *= real_pow(sphere_volume(n), omega_exponent);
    if (f_exponent != 0) v *= rational_pow(f_value, f_exponent);
    return v;
  }

  std::string to_string() const {
    std::string s = constant.to_string();
    if (omega_exponent != 0) s += " * omega_" + std::to_string(n) + "^(" + omega_exponent.get_str() + ")";
    if (f_exponent != 0) s += " * f^(" + f_exponent.get_str() + ")";
    return s;
  }
};

struct ExpansionSeries {
  Prefactor prefactor;
  std::vector<SeriesTerm> terms;  // sorted by (power, log)
  Remainder remainder;

  void add(long power, bool log, const ExactNumber& c) {
    auto it = std::find_if(terms.begin(), terms.end(), [&](const SeriesTerm& t) {
      return t.power > power || (t.power == power && t.log >= log);
    });
    if (it != terms.end() && it->power == power && it->log == log) {
      it->coeff += c;
      if (it->coeff.is_zero()) terms.erase(it);
    } else if (!c.is_zero()) {
      terms.insert(it, SeriesTerm{power, log, c});
    }
  }

  ExactNumber coeff(long power, bool log = false) const {
    for (const auto& t : terms)
      if (t.power == power && t.log == log) return t.coeff;
    return ExactNumber();
  }

  ExactNumber leading() const { return prefactor.constant * coeff(0); }

  // Truncated sum at a given mu > 0, prefactor included.
  long double evaluate(long double mu) const {
    if (!(mu > 0)) throw DomainError("mu", "series evaluation needs mu > 0");
    long double s = 0;
    for (const auto& t : terms) s += t.coeff.to_float() * std::pow(mu, static_cast<long double>(t.power)) * (t.log ? std::log(1 / mu) : 1);
    return prefactor.numeric() * s;
  }

  std::string to_string() const {
    std::string s = prefactor.to_string() + " * (";
    for (size_t i = 0; i < terms.size(); ++i) {
      if (i) s += " + ";
      s += "(" + terms[i].coeff.to_string() + ")";
      if (terms[i].power) s += " mu^" + std::to_string(terms[i].power);
      if (terms[i].log) s += " ln(1/mu)";
    }
    return s + " + " + remainder.to_string() + ")";
  }
};

struct Threshold {
  long n = 0;
  long k = 0;
  mpq_class rational_part;   // (2k-1)! B(n/2-k, 2k)^{-1}
  mpq_class omega_exponent;  // 2k/n
  long double value = 0;     // omega_n^{2k/n} * rational_part

  // Lambda(n,k) * max_f^{-(n-2k)/n}
  long double scaled(const mpq_class& max_f) const {
    detail::require(sgn(max_f) > 0, "max_f", "max f must be positive");
    return value * rational_pow(max_f, rat(2 * k - n, n));
  }
};

namespace detail {

inline mpq_class lambda_rational(long n, long k) {
  return (ExactNumber(fact_q(2 * k - 1)) * beta_inv(HalfInt::halves(n - 2 * k), HalfInt::of(2 * k))).rational();
}

}  // namespace detail

inline Threshold threshold(long n, long k) {
  detail::require(k >= 1, "k", "threshold needs k >= 1");
  detail::require(n > 2 * k, "n", "threshold needs n > 2k, got " + detail::nk(n, k));
  Threshold t;
  t.n = n;
  t.k = k;
  t.rational_part = detail::lambda_rational(n, k);
  t.omega_exponent = rat(2 * k, n);
  t.value = real_pow(sphere_volume(n), t.omega_exponent) * to_float(t.rational_part);
  return t;
}

// int f U_mu^{2*_k} dv_g up to o(mu^4); omega_n is kept inside the
// coefficients, which are exact.
inline ExpansionSeries denominator_expansion(const PointData& p) {
  const long n = p.n;
  ExactNumber w = sphere_volume(n);
  ExpansionSeries s;
  s.prefactor.n = n;
  s.add(0, false, w * ExactNumber(p.f_val / pow_q(2, n)));
  s.add(2, false, -w * ExactNumber(p.lap_f / (pow_q(2, n + 1) * (n - 2))));
  if (n > 4) s.add(4, false, w * ExactNumber(p.bilap_f / (pow_q(2, n + 3) * (n - 2) * (n - 4))));
  s.remainder = Remainder{false, 4, false};
  return s;
}

namespace detail {

// mu^4 (or mu^2) coefficient of one Step-3 block, per unit of its trace input;
// log marks the ln(1/mu) branch at n = 2k+4.
struct BlockValue {
  ExactNumber mu2;
  ExactNumber mu4;
  bool log = false;
};

inline mpq_class block_common(long n, long k, long drop) {
  return fact_q(n - 1) * fact_q(k - drop) / (mpq_class(n - 2) * (n - 4) * (n - 2 * k - 2));
}

// Sum over l of weight(l) * B(n/2-k-1, l+1)^{-1} * {2 (log) | B(n/2+l-2k+shift, 2k-l-2-shift)}.
template <class Weight>
inline BlockValue block_sum(long n, long k, long drop, long shift, Weight weight) {
  BlockValue v;
  v.log = n == 2 * k + 4;
  const long lo = k - drop, hi = 2 * k - 2 * drop;
  for (long l = lo; l <= hi; ++l) {
    if (v.log && l != lo) continue;
    ExactNumber tail = v.log ? ExactNumber(2)
                             : beta(HalfInt::halves(n + 2 * l - 4 * k + 2 * shift), HalfInt::of(2 * k - l - 2 - shift));
    v.mu4 += ExactNumber(weight(l)) * beta_inv(HalfInt::halves(n - 2 * k - 2), HalfInt::of(l + 1)) * tail;
  }
  return v;
}

// int f U Delta^{k-2} U, per unit f(xi).
inline BlockValue block_scalar(long n, long k) {
  mpq_class pre = pow_q(2, 2 * k - n - 1) * block_common(n, k, 2);
  auto v = block_sum(n, k, 2, 0, [&](long l) -> mpq_class {
    return fact_q(l) / (fact_q(l - k + 2) * fact_q(2 * k - l - 4) * fact_q(n + l - 2 * k - 1));
  });
  v.mu4 *= ExactNumber(pre) * sphere_volume(n);
  return v;
}

// int (T, nabla U) Delta^{k-2} U, per unit sum_a T_{a;a}.
inline BlockValue block_gradient(long n, long k) {
  mpq_class pre = -pow_q(2, 2 * k - n - 2) * (n - 2 * k) * block_common(n, k, 2);
  auto v = block_sum(n, k, 2, 0, [&](long l) -> mpq_class {
    return fact_q(l) / (fact_q(l - k + 2) * fact_q(2 * k - l - 4) * fact_q(n + l - 2 * k));
  });
  v.mu4 *= ExactNumber(pre) * sphere_volume(n);
  return v;
}

// int (T, nabla^2 U) Delta^{k-2} U for a rank-2 T with the given traces:
// tr = sum T_aa, sym = sum (T_ab;ab + T_ab;ba), lap = sum T_aa;bb.
inline BlockValue block_hessian(long n, long k, const mpq_class& tr, const mpq_class& sym, const mpq_class& lap) {
  mpq_class pre = pow_q(2, 2 * k - n - 4) * (n - 2 * k) * block_common(n, k, 2);
  auto base = [&](long l) -> mpq_class {
    return fact_q(l) / (fact_q(l - k + 2) * fact_q(2 * k - l - 4) * fact_q(n + l - 2 * k + 1));
  };
  BlockValue v = block_sum(n, k, 2, 0, [&](long l) -> mpq_class {
    return base(l) * ((n - 2 * k + 2) * sym - mpq_class(n + 2 * l - 2 * k) * lap);
  });
  for (long l = k - 2; l <= 2 * k - 4; ++l)
    v.mu2 += ExactNumber(base(l) * -2 * (n - 4) * (n + 2 * l - 2 * k) * tr) *
             beta_inv(HalfInt::halves(n - 2 * k - 2), HalfInt::of(l + 1)) *
             beta(HalfInt::halves(n - 4 * k + 2 * l + 2), HalfInt::of(2 * k - l - 2));
  ExactNumber scale = ExactNumber(pre) * sphere_volume(n);
  v.mu2 *= scale;
  v.mu4 *= scale;
  return v;
}

// int (T, nabla^2 U) Delta^{k-3} U, per unit sum_a T_aa.
inline BlockValue block_hessian_low(long n, long k) {
  mpq_class pre = -pow_q(2, 2 * k - n - 5) * (n - 2 * k) * block_common(n, k, 3);
  auto v = block_sum(n, k, 3, 1, [&](long l) -> mpq_class {
    return mpq_class(n + 2 * l - 2 * k) * fact_q(l) / (fact_q(l - k + 3) * fact_q(2 * k - l - 6) * fact_q(n + l - 2 * k + 1));
  });
  v.mu4 *= ExactNumber(pre) * sphere_volume(n);
  return v;
}

// int (T, nabla^3 U) Delta^{k-3} U, per unit sum (T_aab;b + T_aba;b + T_abb;a).
inline BlockValue block_third(long n, long k) {
  mpq_class pre = pow_q(2, 2 * k - n - 6) * (n - 2 * k) * (n - 2 * k + 2) * block_common(n, k, 3);
  auto v = block_sum(n, k, 3, 1, [&](long l) -> mpq_class {
    return mpq_class(n + 2 * l - 2 * k) * fact_q(l) / (fact_q(l - k + 3) * fact_q(2 * k - l - 6) * fact_q(n + l - 2 * k + 2));
  });
  v.mu4 *= ExactNumber(pre) * sphere_volume(n);
  return v;
}

// int (T, nabla^4 U) Delta^{k-4} U, per unit sum (T_aabb + T_abab + T_abba).
inline BlockValue block_fourth(long n, long k) {
  mpq_class pre = pow_q(2, 2 * k - n - 8) * (n - 2 * k) * (n - 2 * k + 2) * block_common(n, k, 4) / 3;
  auto v = block_sum(n, k, 4, 2, [&](long l) -> mpq_class {
    return mpq_class((n + 2 * l - 2 * k) * (n + 2 * l - 2 * k + 2)) * fact_q(l) /
           (fact_q(l - k + 4) * fact_q(2 * k - l - 8) * fact_q(n + l - 2 * k + 3));
  });
  v.mu4 *= ExactNumber(pre) * sphere_volume(n);
  return v;
}

// s1 * s2 truncated above max_power.
inline std::vector<SeriesTerm> truncated_product(const std::vector<SeriesTerm>& a, const std::vector<SeriesTerm>& b,
                                                 long max_power) {
  ExpansionSeries out;
  for (const auto& x : a)
    for (const auto& y : b) {
      if (x.power + y.power > max_power) continue;
      if (x.log && y.log) throw Unsupported("series product with two logarithmic factors");
      out.add(x.power + y.power, x.log || y.log, x.coeff * y.coeff);
    }
  return out.terms;
}

// (1 + x)^e for a series x without constant term, truncated above max_power.
inline std::vector<SeriesTerm> binomial_power(const std::vector<SeriesTerm>& x, const mpq_class& e, long max_power) {
  std::vector<SeriesTerm> result{SeriesTerm{0, false, ExactNumber(1)}};
  std::vector<SeriesTerm> xp{SeriesTerm{0, false, ExactNumber(1)}};
  mpq_class binom = 1;
  for (long j = 1; j <= max_power; ++j) {
    xp = truncated_product(xp, x, max_power);
    if (xp.empty()) break;
    binom *= (e - (j - 1)) / mpq_class(j);
    ExpansionSeries acc;
    acc.terms = result;
    for (const auto& t : xp) acc.add(t.power, t.log, ExactNumber(binom) * t.coeff);
    result = acc.terms;
  }
  return result;
}

}  // namespace detail

// int U_mu P_2k U_mu dv_g through the Step-3 blocks and the curvature
// coefficient table; the weyl_sq-free part is the flat leading term.
inline ExpansionSeries numerator_expansion(const PointData& p) {
  const long n = p.n, k = p.k;
  detail::require(n >= 2 * k + 4, "n", "numerator expansion needs n >= 2k+4, got " + detail::nk(n, k));
  using detail::fact_q;
  ExpansionSeries s;
  s.prefactor.n = n;
  s.add(0, false,
        ExactNumber(pow_q(2, 2 * k - n) * fact_q(2 * k - 1)) * sphere_volume(n) *
            beta_inv(HalfInt::halves(n - 2 * k), HalfInt::of(2 * k)));
  const bool log = n == 2 * k + 4;
  s.remainder = Remainder{log, 4, false};
  if (k < 2 || p.weyl_sq == 0) return s;

  auto t = curvature_coeffs(n, k);
  const mpq_class K(k);
  // ((k-1) f2 + Delta f1) U
  ExactNumber mu4 = ExactNumber((K - 1) * t.f2 + t.lap_f1) * detail::block_scalar(n, k).mu4;
  // ((k-1) T1 - 2 grad f1, grad U): divergence of -2 grad f1 is 2 Delta f1
  mu4 += ExactNumber((K - 1) * t.div_T1 + 2 * t.lap_f1) * detail::block_gradient(n, k).mu4;
  // ((k-1) T2 - f1 g, nabla^2 U)
  auto h = detail::block_hessian(n, k, (K - 1) * t.T2_trace - n * t.f1, 2 * (K - 1) * t.T2_second + 2 * t.lap_f1,
                                 (K - 1) * t.T2_second + n * t.lap_f1);
  mu4 += h.mu4;
  ExactNumber mu2 = h.mu2;
  mu4 *= ExactNumber(K);
  mu2 *= ExactNumber(K);
  if (k >= 3) {
    ExactNumber low = ExactNumber(t.T3_trace) * detail::block_hessian_low(n, k).mu4 +
                      ExactNumber(t.T4_combination) * detail::block_third(n, k).mu4;
    mu4 += ExactNumber(K * (K - 1) * (K - 2)) * low;
  }
  if (k >= 4)
    mu4 += ExactNumber(K * (K - 1) * (K - 2) * (K - 3) * t.T5_combination) * detail::block_fourth(n, k).mu4;
  s.add(2, false, ExactNumber(p.weyl_sq) * mu2);
  s.add(4, log, ExactNumber(p.weyl_sq) * mu4);
  return s;
}

namespace detail {

inline Prefactor energy_prefactor(const PointData& p) {
  Prefactor pre;
  pre.n = p.n;
  pre.omega_exponent = rat(2 * p.k, p.n);
  pre.f_value = p.f_val;
  pre.f_exponent = rat(2 * p.k - p.n, p.n);
  return pre;
}

}  // namespace detail

// I(U_mu) as omega_n^{2k/n} f^{-(n-2k)/n} (...), the bracket in closed form.
inline ExpansionSeries energy_expansion_U(const PointData& p, bool include_weyl = true) {
  const long n = p.n, k = p.k;
  if (n < 2 * k + 4)
    throw DomainError("n", "energy_expansion_U needs n >= 2k+4, got " + detail::nk(n, k) + "; use mass_expansion");
  ExpansionSeries s;
  s.prefactor = detail::energy_prefactor(p);
  const mpq_class lam = detail::lambda_rational(n, k);
  const mpq_class& f = p.f_val;
  s.add(0, false, ExactNumber(lam));
  s.add(2, false, ExactNumber(mpq_class(n - 2 * k) * lam / (2 * mpq_class(n) * (n - 2)) * p.lap_f / f));
  mpq_class bracket = p.bilap_f / (2 * mpq_class(n - 4) * f) - mpq_class(n - k) * p.lap_f * p.lap_f / (mpq_class(n) * (n - 2) * f * f);
  s.add(4, false, ExactNumber(-mpq_class(n - 2 * k) * lam / (4 * mpq_class(n) * (n - 2)) * bracket));
  const bool log = n == 2 * k + 4;
  if (include_weyl && p.weyl_sq != 0) s.add(4, log, -big_C(n, k) * ExactNumber(p.weyl_sq));
  s.remainder = Remainder{log, 4, false};
  return s;
}

// The same bracket as numerator / denominator^{(n-2k)/n}, expanded exactly.
inline ExpansionSeries energy_expansion_quotient(const PointData& p) {
  const long n = p.n, k = p.k;
  ExpansionSeries num = numerator_expansion(p), den = denominator_expansion(p);
  ExactNumber d0 = den.coeff(0);
  std::vector<SeriesTerm> x;
  for (const auto& t : den.terms)
    if (t.power > 0) x.push_back(SeriesTerm{t.power, t.log, t.coeff / d0});
  auto inv = detail::binomial_power(x, rat(2 * k - n, n), 4);
  // (omega_n f / 2^n)^{-(n-2k)/n} = omega_n^{2k/n} f^{-(n-2k)/n} * 2^{n-2k} / omega_n
  ExactNumber scale = ExactNumber(pow_q(2, n - 2 * k)) / sphere_volume(n);
  std::vector<SeriesTerm> n_scaled;
  for (const auto& t : num.terms) n_scaled.push_back(SeriesTerm{t.power, t.log, t.coeff * scale});
  ExpansionSeries s;
  s.prefactor = detail::energy_prefactor(p);
  for (const auto& t : detail::truncated_product(n_scaled, inv, 4)) s.add(t.power, t.log, t.coeff);
  s.remainder = num.remainder;
  return s;
}

struct WeylTwoPath {
  ExactNumber direct;     // -C(n,k)
  ExactNumber assembled;  // mu^4 |W|^2 coefficient of the quotient
  bool log = false;
  bool equal = false;
};

inline WeylTwoPath weyl_coefficient_two_path(long n, long k) {
  PointData p(n, k, 1, 0, 0, 1);
  WeylTwoPath r;
  r.log = n == 2 * k + 4;
  r.direct = -big_C(n, k);
  r.assembled = energy_expansion_quotient(p).coeff(4, r.log);
  r.equal = r.direct == r.assembled;
  return r;
}

namespace detail {

inline const mpq_class& require_mass(const PointData& p) {
  if (!p.mass) throw DomainError("mass", "the mass m(xi) is required for " + nk(p.n, p.k));
  return *p.mass;
}

}  // namespace detail

// I(V_mu) = Lambda f^{-(n-2k)/n} (1 - A m mu^{n-2k} + o(mu^{n-2k})), A = mass_coeff.
inline ExpansionSeries mass_expansion(const PointData& p) {
  const mpq_class& m = detail::require_mass(p);
  ExpansionSeries s;
  s.prefactor = detail::energy_prefactor(p);
  s.prefactor.constant = ExactNumber(detail::lambda_rational(p.n, p.k));
  s.add(0, false, ExactNumber(1));
  s.add(p.n - 2 * p.k, false, -mass_coeff(p.n, p.k) * ExactNumber(m));
  s.remainder = Remainder{false, p.n - 2 * p.k, false};
  return s;
}

// The same series from the numerator (1 + A m eps) and the denominator
// (1 + 2*_k A m eps), eps = mu^{n-2k}.
inline ExpansionSeries mass_expansion_quotient(const PointData& p) {
  const mpq_class& m = detail::require_mass(p);
  const long n = p.n, k = p.k, e = n - 2 * k;
  ExactNumber a = mass_coeff(n, k) * ExactNumber(m);
  std::vector<SeriesTerm> num{{0, false, ExactNumber(1)}, {e, false, a}};
  std::vector<SeriesTerm> x{{e, false, ExactNumber(rat(2 * n, e)) * a}};
  ExpansionSeries s;
  s.prefactor = detail::energy_prefactor(p);
  s.prefactor.constant = ExactNumber(detail::lambda_rational(n, k));
  for (const auto& t : detail::truncated_product(num, detail::binomial_power(x, rat(-e, n), e), e))
    s.add(t.power, t.log, t.coeff);
  s.remainder = Remainder{false, e, false};
  return s;
}

enum class Branch { weyl_bilap, weyl, mass, lcf };

inline std::string branch_name(Branch b) {
  switch (b) {
    case Branch::weyl_bilap: return "n>=2k+5";
    case Branch::weyl: return "n=2k+4";
    case Branch::mass: return "2k+1<=n<=2k+3";
    case Branch::lcf: return "lcf";
  }
  return "";
}

struct CertifyOptions {
  bool lcf = false;
  std::optional<mpq_class> max_f;  // defaults to f_val
  bool jets_vanish = false;        // caller asserts nabla^j f(xi) = 0 for j <= n-2k
};

struct ExistenceVerdict {
  Branch branch = Branch::weyl_bilap;
  mpq_class hypothesis_exact;
  long double hypothesis_value = 0;
  bool certified = false;
  long double threshold = 0;  // Lambda(n,k) max_f^{-(n-2k)/n}
  std::string reason;
  std::vector<std::string> assumptions;
};

// Decides the pointwise hypothesis of the existence criterion. A certified
// verdict means inf I < threshold.
inline ExistenceVerdict certify(const PointData& p, const CertifyOptions& opt = {}) {
  const long n = p.n, k = p.k;
  mpq_class max_f = opt.max_f.value_or(p.f_val);
  detail::require(sgn(max_f) > 0, "max_f", "max f must be positive");
  detail::require(max_f >= p.f_val, "max_f", "max f is below f(xi)");
  if (n >= 2 * k + 2 && p.lap_f != 0)
    throw DomainError("lap_f", "Delta f(xi) must vanish when n >= 2k+2, got " + p.lap_f.get_str());

  ExistenceVerdict v;
  v.threshold = threshold(n, k).scaled(max_f);
  v.assumptions.push_back("P_2k is coercive");
  v.assumptions.push_back("xi is a maximum point of f");
  if (opt.lcf)
    v.branch = Branch::lcf;
  else if (n >= 2 * k + 5)
    v.branch = Branch::weyl_bilap;
  else if (n == 2 * k + 4)
    v.branch = Branch::weyl;
  else
    v.branch = Branch::mass;

  switch (v.branch) {
    case Branch::weyl_bilap:
      v.hypothesis_exact = p.weyl_sq * p.f_val;
      if (p.bilap_f != 0) v.hypothesis_exact += small_c(n, k).rational() * p.bilap_f;
      v.reason = "|W|^2 f + c(n,k) Delta^2 f";
      break;
    case Branch::weyl:
      v.hypothesis_exact = p.weyl_sq;
      v.reason = "|W|^2";
      break;
    case Branch::mass:
    case Branch::lcf:
      v.hypothesis_exact = detail::require_mass(p);
      v.reason = "m(xi)";
      v.assumptions.push_back("mass of P_2k at xi is defined");
      break;
  }
  v.hypothesis_value = to_float(v.hypothesis_exact);
  v.certified = sgn(v.hypothesis_exact) > 0;
  v.reason += v.certified ? " > 0" : " <= 0";
  if (v.branch == Branch::lcf) {
    v.assumptions.push_back("g is conformally flat near xi");
    v.assumptions.push_back("nabla^j f(xi) = 0 for 1 <= j <= n-2k (caller-asserted)");
    if (!opt.jets_vanish) {
      v.certified = false;
      v.reason += "; jets of f at xi not asserted to vanish";
    }
  }
  if (max_f != p.f_val) {
    v.certified = false;
    v.reason += "; f(xi) < max f, so xi is not a maximum point";
  }
  return v;
}

}  // namespace qcurv
