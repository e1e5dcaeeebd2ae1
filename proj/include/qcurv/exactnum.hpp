#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <compare>
#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <utility>

namespace qcurv {

// Raised when an argument lies outside the domain of a formula. `parameter`
// names the offending input so front ends can report it.
class DomainError : public std::domain_error {
 public:
  DomainError(std::string parameter, const std::string& message)
      : std::domain_error(message), parameter_(std::move(parameter)) {}
  const std::string& parameter() const noexcept { return parameter_; }

 private:
  std::string parameter_;
};

class Unsupported : public std::invalid_argument {
 public:
  explicit Unsupported(const std::string& message) : std::invalid_argument(message) {}
};

inline mpq_class rat(long num, long den = 1) {
  if (den == 0) throw std::invalid_argument("rat: zero denominator");
  mpq_class q(num, 1);
  q /= den;
  return q;
}

inline std::string to_string(const mpq_class& q) { return q.get_str(); }

inline mpq_class pow_q(const mpq_class& base, long e) {
  mpq_class r = 1;
  mpq_class b = e >= 0 ? base : mpq_class(1 / base);
  unsigned long u = e >= 0 ? static_cast<unsigned long>(e) : static_cast<unsigned long>(-e);
  while (u) {
    if (u & 1UL) r *= b;
    b *= b;
    u >>= 1;
  }
  return r;
}

// A value in (1/2)Z stored as twice the value.
struct HalfInt {
  long twice = 0;

  static constexpr HalfInt of(long v) { return HalfInt{2 * v}; }
  static constexpr HalfInt halves(long twice_value) { return HalfInt{twice_value}; }

  constexpr bool is_integer() const { return twice % 2 == 0; }
  constexpr bool positive() const { return twice > 0; }
  // Floor of the value; exact when is_integer().
  constexpr long floor() const { return twice >= 0 ? twice / 2 : -((-twice + 1) / 2); }
  mpq_class value() const { return rat(twice, 2); }
  std::string to_string() const {
    return is_integer() ? std::to_string(twice / 2) : std::to_string(twice) + "/2";
  }

  constexpr HalfInt operator+(HalfInt o) const { return HalfInt{twice + o.twice}; }
  constexpr HalfInt operator-(HalfInt o) const { return HalfInt{twice - o.twice}; }
  constexpr HalfInt operator+(long v) const { return HalfInt{twice + 2 * v}; }
  constexpr HalfInt operator-(long v) const { return HalfInt{twice - 2 * v}; }
  friend constexpr auto operator<=>(HalfInt, HalfInt) = default;
};

namespace detail {

class FactorialTable {
 public:
  mpz_class get(unsigned long m) {
    {
      std::shared_lock lock(mutex_);
      if (m < table_.size()) return table_[m];
    }
    std::unique_lock lock(mutex_);
    if (table_.empty()) table_.emplace_back(1);
    while (table_.size() <= m) {
      mpz_class next = table_.back() * static_cast<unsigned long>(table_.size());
      table_.push_back(std::move(next));
    }
    return table_[m];
  }

 private:
  std::shared_mutex mutex_;
  std::deque<mpz_class> table_;
};

inline FactorialTable& factorials() {
  static FactorialTable t;
  return t;
}

}  // namespace detail

inline mpz_class factorial(long m) {
  if (m < 0) throw DomainError("factorial", "factorial of negative integer " + std::to_string(m));
  return detail::factorials().get(static_cast<unsigned long>(m));
}

// Finite sum of rational multiples of integer powers of sqrt(pi).
class ExactNumber {
 public:
  // key: twice the exponent of pi
  using Terms = std::map<long, mpq_class>;

  ExactNumber() = default;
  ExactNumber(long v) { add_monomial(0, mpq_class(v)); }
  ExactNumber(const mpz_class& v) { add_monomial(0, mpq_class(v)); }
  ExactNumber(const mpq_class& v) { add_monomial(0, v); }

  static ExactNumber monomial(const mpq_class& coeff, HalfInt pi_exponent) {
    ExactNumber r;
    r.add_monomial(pi_exponent.twice, coeff);
    return r;
  }
  static ExactNumber pi_power(HalfInt e) { return monomial(1, e); }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_monomial() const { return terms_.size() == 1; }
  bool is_rational() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == 0); }

  mpq_class rational() const {
    if (!is_rational()) throw DomainError("value", "not a pi-free rational: " + to_string());
    return terms_.empty() ? mpq_class(0) : terms_.begin()->second;
  }
  // Coefficient and pi-exponent of a single monomial (zero counts as 0*pi^0).
  mpq_class coefficient() const {
    require_monomial("coefficient");
    return terms_.empty() ? mpq_class(0) : terms_.begin()->second;
  }
  HalfInt pi_exponent() const {
    require_monomial("pi_exponent");
    return terms_.empty() ? HalfInt{0} : HalfInt{terms_.begin()->first};
  }

  ExactNumber operator-() const {
    ExactNumber r = *this;
    for (auto& [e, c] : r.terms_) c = -c;
    return r;
  }
  ExactNumber& operator+=(const ExactNumber& o) {
    for (const auto& [e, c] : o.terms_) add_monomial(e, c);
    return *this;
  }
  ExactNumber& operator-=(const ExactNumber& o) {
    for (const auto& [e, c] : o.terms_) add_monomial(e, -c);
    return *this;
  }
  ExactNumber& operator*=(const ExactNumber& o) { return *this = *this * o; }
  ExactNumber& operator/=(const ExactNumber& o) { return *this = *this / o; }

  friend ExactNumber operator+(ExactNumber a, const ExactNumber& b) { return a += b; }
  friend ExactNumber operator-(ExactNumber a, const ExactNumber& b) { return a -= b; }
  friend ExactNumber operator*(const ExactNumber& a, const ExactNumber& b) {
    ExactNumber r;
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) r.add_monomial(ea + eb, ca * cb);
    return r;
  }
  // Division is defined only by a single nonzero monomial.
  friend ExactNumber operator/(const ExactNumber& a, const ExactNumber& b) { return a * b.inverse(); }

  ExactNumber inverse() const {
    if (!is_monomial()) throw DomainError("divisor", "division requires a single nonzero monomial, got " + to_string());
    const auto& [e, c] = *terms_.begin();
    ExactNumber r;
    r.add_monomial(-e, 1 / c);
    return r;
  }

  ExactNumber pow(long e) const {
    if (e < 0) return inverse().pow(-e);
    ExactNumber r(1), b = *this;
    while (e) {
      if (e & 1) r *= b;
      b *= b;
      e >>= 1;
    }
    return r;
  }

  friend bool operator==(const ExactNumber& a, const ExactNumber& b) { return a.terms_ == b.terms_; }

  // Sign of the real value. Monomials are exact; mixed sums go through
  // 128-bit MPFR, which is ample for the sums that occur here.
  int sign() const {
    if (terms_.empty()) return 0;
    if (is_monomial()) return sgn(terms_.begin()->second);
    long double v = to_float();
    return (v > 0) - (v < 0);
  }

  long double to_float() const {
    mpfr_t acc, pi, term, q;
    mpfr_inits2(kPrecisionBits, acc, pi, term, q, static_cast<mpfr_ptr>(nullptr));
    mpfr_set_zero(acc, 1);
    mpfr_const_pi(pi, MPFR_RNDN);
    mpfr_sqrt(pi, pi, MPFR_RNDN);
    for (const auto& [e, c] : terms_) {
      mpfr_pow_si(term, pi, e, MPFR_RNDN);
      mpfr_set_q(q, c.get_mpq_t(), MPFR_RNDN);
      mpfr_mul(term, term, q, MPFR_RNDN);
      mpfr_add(acc, acc, term, MPFR_RNDN);
    }
    long double r = mpfr_get_ld(acc, MPFR_RNDN);
    mpfr_clears(acc, pi, term, q, static_cast<mpfr_ptr>(nullptr));
    return r;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (const auto& [e, c] : terms_) {
      if (!s.empty()) s += " + ";
      s += c.get_str();
      if (e != 0) s += "*pi^(" + HalfInt{e}.to_string() + ")";
    }
    return s;
  }

  static constexpr mpfr_prec_t kPrecisionBits = 128;

 private:
  void add_monomial(long e, const mpq_class& c) {
    if (c == 0) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
      terms_.emplace(e, c);
      return;
    }
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
  void require_monomial(const char* what) const {
    if (terms_.size() > 1) throw DomainError("value", std::string(what) + " requires a monomial, got " + to_string());
  }

  Terms terms_;
};

// base^exponent for a positive monomial base and rational exponent, at
// 128-bit precision. Used where irrational powers such as omega_n^(2k/n) meet
// floating point.
inline long double real_pow(const ExactNumber& base, const mpq_class& exponent) {
  if (!base.is_monomial() || base.sign() <= 0) throw DomainError("base", "real_pow needs a positive monomial");
  mpfr_t b, e, q;
  mpfr_inits2(ExactNumber::kPrecisionBits, b, e, q, static_cast<mpfr_ptr>(nullptr));
  mpfr_const_pi(b, MPFR_RNDN);
  mpfr_sqrt(b, b, MPFR_RNDN);
  mpfr_pow_si(b, b, base.pi_exponent().twice, MPFR_RNDN);
  mpfr_set_q(q, base.coefficient().get_mpq_t(), MPFR_RNDN);
  mpfr_mul(b, b, q, MPFR_RNDN);
  mpfr_set_q(e, exponent.get_mpq_t(), MPFR_RNDN);
  mpfr_pow(b, b, e, MPFR_RNDN);
  long double r = mpfr_get_ld(b, MPFR_RNDN);
  mpfr_clears(b, e, q, static_cast<mpfr_ptr>(nullptr));
  return r;
}

inline long double rational_pow(const mpq_class& base, const mpq_class& exponent) {
  return real_pow(ExactNumber(base), exponent);
}

inline long double to_float(const mpq_class& q) { return ExactNumber(q).to_float(); }

// Gamma at a positive half-integer.
inline ExactNumber gamma_half(HalfInt a) {
  if (!a.positive()) throw DomainError("a", "gamma_half needs a > 0, got " + a.to_string());
  if (a.is_integer()) return ExactNumber(factorial(a.twice / 2 - 1));
  // a = m + 1/2: Gamma = (2m)! / (4^m m!) * sqrt(pi)
  long m = (a.twice - 1) / 2;
  mpq_class c(factorial(2 * m), factorial(m));
  c.canonicalize();
  c /= pow_q(4, m);
  return ExactNumber::monomial(c, HalfInt::halves(1));
}

inline ExactNumber beta(HalfInt a, HalfInt b) {
  if (!a.positive()) throw DomainError("a", "beta needs a > 0, got " + a.to_string());
  if (!b.positive()) throw DomainError("b", "beta needs b > 0, got " + b.to_string());
  return gamma_half(a) * gamma_half(b) / gamma_half(a + b);
}

inline ExactNumber beta_inv(HalfInt a, HalfInt b) { return beta(a, b).inverse(); }

// Volume of the unit n-sphere in R^{n+1}.
inline ExactNumber sphere_volume(long n) {
  if (n < 1) throw DomainError("n", "sphere_volume needs n >= 1, got " + std::to_string(n));
  return ExactNumber::monomial(2, HalfInt::halves(n + 1)) / gamma_half(HalfInt::halves(n + 1));
}

inline mpq_class faulhaber(int p, long k) {
  if (k < 0) throw DomainError("k", "faulhaber needs k >= 0");
  mpq_class K(k);
  switch (p) {
    case 1: return K * (K + 1) / 2;
    case 2: return K * (K + 1) * (2 * K + 1) / 6;
    case 3: return K * K * (K + 1) * (K + 1) / 4;
    case 4: return K * (K + 1) * (2 * K + 1) * (3 * K * K + 3 * K - 1) / 30;
    case 5: return K * K * (K + 1) * (K + 1) * (2 * K * K + 2 * K - 1) / 12;
    default: throw Unsupported("faulhaber: power " + std::to_string(p) + " outside 1..5");
  }
}

}  // namespace qcurv
