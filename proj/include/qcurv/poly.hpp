#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qcurv/exactnum.hpp"

namespace qcurv {

// Dense univariate polynomial over Q; coeffs[i] multiplies x^i.
class Poly {
 public:
  Poly() = default;
  Poly(long c) : coeffs_{mpq_class(c)} { trim(); }
  Poly(const mpq_class& c) : coeffs_{c} { trim(); }
  explicit Poly(std::vector<mpq_class> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

  static Poly x() { return Poly(std::vector<mpq_class>{0, 1}); }
  // x - root
  static Poly linear(const mpq_class& root) { return Poly(std::vector<mpq_class>{-root, 1}); }

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  const std::vector<mpq_class>& coeffs() const { return coeffs_; }
  mpq_class coeff(int i) const { return i >= 0 && i < static_cast<int>(coeffs_.size()) ? coeffs_[i] : mpq_class(0); }
  mpq_class lead() const { return coeffs_.empty() ? mpq_class(0) : coeffs_.back(); }

  mpq_class operator()(const mpq_class& v) const {
    mpq_class r = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) r = r * v + *it;
    return r;
  }
  long double eval(long double v) const {
    long double r = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) r = r * v + to_float(*it);
    return r;
  }

  Poly derivative() const {
    std::vector<mpq_class> d;
    for (size_t i = 1; i < coeffs_.size(); ++i) d.push_back(coeffs_[i] * static_cast<long>(i));
    return Poly(std::move(d));
  }

  Poly operator-() const {
    Poly r = *this;
    for (auto& c : r.coeffs_) c = -c;
    return r;
  }
  Poly& operator+=(const Poly& o) {
    if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size());
    for (size_t i = 0; i < o.coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    trim();
    return *this;
  }
  Poly& operator-=(const Poly& o) { return *this += -o; }
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly();
    std::vector<mpq_class> r(a.coeffs_.size() + b.coeffs_.size() - 1);
    for (size_t i = 0; i < a.coeffs_.size(); ++i)
      for (size_t j = 0; j < b.coeffs_.size(); ++j) r[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return Poly(std::move(r));
  }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }

  // Euclidean division: *this = q*d + r with deg r < deg d.
  std::pair<Poly, Poly> divmod(const Poly& d) const {
    if (d.is_zero()) throw std::domain_error("Poly::divmod by zero polynomial");
    Poly r = *this;
    std::vector<mpq_class> q(std::max(0, degree() - d.degree() + 1));
    while (!r.is_zero() && r.degree() >= d.degree()) {
      int shift = r.degree() - d.degree();
      mpq_class c = r.lead() / d.lead();
      q[shift] = c;
      for (int i = 0; i <= d.degree(); ++i) r.coeffs_[i + shift] -= c * d.coeffs_[i];
      r.trim();
    }
    return {Poly(std::move(q)), r};
  }

  Poly monic() const {
    if (is_zero()) return *this;
    Poly r = *this;
    mpq_class l = lead();
    for (auto& c : r.coeffs_) c /= l;
    return r;
  }

  static Poly gcd(Poly a, Poly b) {
    while (!b.is_zero()) {
      Poly r = a.divmod(b).second;
      a = std::move(b);
      b = std::move(r);
    }
    return a.monic();
  }

  // Every real root has |root| < 1 + max |a_i / a_deg| (Cauchy).
  mpq_class cauchy_root_bound() const {
    if (degree() < 1) return 0;
    mpq_class m = 0;
    for (int i = 0; i < degree(); ++i) m = std::max(m, mpq_class(abs(coeffs_[i] / lead())));
    return 1 + m;
  }

  // Fujiwara bound 2 max |a_{d-i}/a_d|^{1/i}, rounded up to an integer.
  long fujiwara_root_bound() const {
    int d = degree();
    if (d < 1) return 0;
    double m = 0;
    for (int i = 1; i <= d; ++i) {
      double r = std::fabs(coeffs_[d - i].get_d() / lead().get_d());
      if (i == d) r /= 2;
      m = std::max(m, std::pow(r, 1.0 / i));
    }
    return static_cast<long>(std::ceil(2 * m * (1 + 1e-9))) + 1;
  }

  friend bool operator==(const Poly& a, const Poly& b) { return a.coeffs_ == b.coeffs_; }

  std::string to_string(const std::string& var = "n") const {
    if (is_zero()) return "0";
    std::string s;
    for (int i = degree(); i >= 0; --i) {
      const mpq_class& c = coeffs_[i];
      if (c == 0) continue;
      mpq_class a = abs(c);
      if (!s.empty()) s += sgn(c) < 0 ? " - " : " + ";
      else if (sgn(c) < 0) s += "-";
      bool unit = a == 1 && i > 0;
      if (!unit) s += a.get_str();
      if (i > 0) {
        if (!unit) s += "*";
        s += var;
        if (i > 1) s += "^" + std::to_string(i);
      }
    }
    return s;
  }

 private:
  void trim() {
    while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
  }
  std::vector<mpq_class> coeffs_;
};

// Reduced quotient of polynomials with a monic denominator.
class RatFn {
 public:
  RatFn() : den_(1) {}
  RatFn(long c) : num_(c), den_(1) {}
  RatFn(const mpq_class& c) : num_(c), den_(1) {}
  RatFn(Poly p) : num_(std::move(p)), den_(1) {}
  RatFn(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) { normalize(); }

  static RatFn var() { return RatFn(Poly::x()); }

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }

  mpq_class operator()(const mpq_class& v) const {
    mpq_class d = den_(v);
    if (d == 0) throw DomainError("n", "rational function evaluated at a pole");
    return num_(v) / d;
  }

  RatFn operator-() const { return RatFn(-num_, den_, Reduced{}); }
  friend RatFn operator+(const RatFn& a, const RatFn& b) {
    if (a.den_ == b.den_) return RatFn(a.num_ + b.num_, a.den_);
    return RatFn(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend RatFn operator-(const RatFn& a, const RatFn& b) { return a + (-b); }
  friend RatFn operator*(const RatFn& a, const RatFn& b) {
    if (a.is_zero() || b.is_zero()) return RatFn();
    return RatFn(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend RatFn operator/(const RatFn& a, const RatFn& b) {
    if (b.is_zero()) throw std::domain_error("RatFn division by zero");
    return RatFn(a.num_ * b.den_, a.den_ * b.num_);
  }
  RatFn& operator+=(const RatFn& o) { return *this = *this + o; }
  RatFn& operator-=(const RatFn& o) { return *this = *this - o; }
  RatFn& operator*=(const RatFn& o) { return *this = *this * o; }

  friend bool operator==(const RatFn& a, const RatFn& b) { return a.num_ == b.num_ && a.den_ == b.den_; }

  std::string to_string(const std::string& var = "n") const {
    if (den_.degree() == 0) {
      if (num_.degree() <= 0) return num_.to_string(var);
      return "(" + num_.to_string(var) + ")";
    }
    return "(" + num_.to_string(var) + ")/(" + den_.to_string(var) + ")";
  }

 private:
  struct Reduced {};
  RatFn(Poly num, Poly den, Reduced) : num_(std::move(num)), den_(std::move(den)) {}

  void normalize() {
    if (den_.is_zero()) throw std::domain_error("RatFn with zero denominator");
    if (num_.is_zero()) {
      den_ = Poly(1);
      return;
    }
    Poly g = Poly::gcd(num_, den_);
    if (g.degree() > 0) {
      num_ = num_.divmod(g).first;
      den_ = den_.divmod(g).first;
    }
    mpq_class l = den_.lead();
    num_ = num_ * Poly(mpq_class(1 / l));
    den_ = den_.monic();
  }

  Poly num_;
  Poly den_;
};

}  // namespace qcurv
