#pragma once

#include <compare>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "qcurv/exactnum.hpp"
#include "qcurv/poly.hpp"

// Graded operator words for the leading part of P_{2k}. Every word is
// homogeneous: operator order plus curvature weight is 2k. Terms whose
// curvature weight exceeds the working bound (4, i.e. order < 2k-4) go to an
// order-indexed Z bucket.

namespace qcurv::opalg {

enum class Sym {
  None,
  Scal,
  LapScal,    // Delta Scal
  Scal2,      // Scal^2
  PNorm2,     // |P|^2
  GradScal,   // nabla Scal
  DivP,       // delta P
  HessScal,   // nabla^2 Scal
  P,
  ScalP,      // Scal P
  DivGradP,   // delta nabla P
  GradDivP,   // nabla delta P
  RiemP,      // Riem * P
  PsharpP,    // P^# P
  Bach,
  GradP,      // nabla P
  HessP,      // nabla^2 P
  PtensP,     // P (x) P
};

inline int weight(Sym s) {
  switch (s) {
    case Sym::None: return 0;
    case Sym::Scal:
    case Sym::P: return 2;
    case Sym::GradScal:
    case Sym::DivP:
    case Sym::GradP: return 3;
    default: return 4;
  }
}

inline std::string sym_name(Sym s) {
  switch (s) {
    case Sym::None: return "1";
    case Sym::Scal: return "Scal";
    case Sym::LapScal: return "ΔScal";
    case Sym::Scal2: return "Scal²";
    case Sym::PNorm2: return "|P|²";
    case Sym::GradScal: return "∇Scal";
    case Sym::DivP: return "δP";
    case Sym::HessScal: return "∇²Scal";
    case Sym::P: return "P";
    case Sym::ScalP: return "ScalP";
    case Sym::DivGradP: return "δ∇P";
    case Sym::GradDivP: return "∇δP";
    case Sym::RiemP: return "Riem∗P";
    case Sym::PsharpP: return "P#P";
    case Sym::Bach: return "Bach";
    case Sym::GradP: return "∇P";
    case Sym::HessP: return "∇²P";
    case Sym::PtensP: return "P⊗P";
  }
  return "?";
}

enum class Kind { Lap, Mul, Grad1, Hess, Third, Fourth, DivSchDiv, DivA6, Mu6 };

struct Letter {
  Kind kind = Kind::Lap;
  Sym sym = Sym::None;

  static Letter lap() { return {Kind::Lap, Sym::None}; }
  static Letter mul(Sym s) { return {Kind::Mul, s}; }
  static Letter contract(Sym s, int derivatives) {
    static const Kind kinds[] = {Kind::Mul, Kind::Grad1, Kind::Hess, Kind::Third, Kind::Fourth};
    return {kinds[derivatives], s};
  }
  static Letter div_sch_div() { return {Kind::DivSchDiv, Sym::None}; }
  static Letter div_a6() { return {Kind::DivA6, Sym::None}; }
  static Letter mu6() { return {Kind::Mu6, Sym::None}; }

  int order() const {
    switch (kind) {
      case Kind::Lap:
      case Kind::Hess:
      case Kind::DivSchDiv:
      case Kind::DivA6: return 2;
      case Kind::Grad1: return 1;
      case Kind::Third: return 3;
      case Kind::Fourth: return 4;
      default: return 0;
    }
  }

  // Curvature weight; operator order + weight is the homogeneity 2 of M_2-type factors.
  int weight() const {
    switch (kind) {
      case Kind::Lap: return 0;
      case Kind::DivSchDiv: return 2;
      case Kind::DivA6: return 4;
      case Kind::Mu6: return 6;
      default: return opalg::weight(sym);
    }
  }

  std::string to_string() const {
    switch (kind) {
      case Kind::Lap: return "Δ";
      case Kind::Mul: return sym_name(sym) + "·";
      case Kind::Grad1: return "(" + sym_name(sym) + ",∇)";
      case Kind::Hess: return "(" + sym_name(sym) + ",∇²)";
      case Kind::Third: return "(" + sym_name(sym) + ",∇³)";
      case Kind::Fourth: return "(" + sym_name(sym) + ",∇⁴)";
      case Kind::DivSchDiv: return "δP#d";
      case Kind::DivA6: return "δA6#d";
      case Kind::Mu6: return "μ6·";
    }
    return "?";
  }

  auto operator<=>(const Letter&) const = default;
};

using Word = std::vector<Letter>;

inline int word_order(const Word& w) {
  int o = 0;
  for (const auto& l : w) o += l.order();
  return o;
}

inline int word_weight(const Word& w) {
  int o = 0;
  for (const auto& l : w) o += l.weight();
  return o;
}

inline std::string word_to_string(const Word& w) {
  if (w.empty()) return "1";
  std::string s;
  size_t i = 0;
  while (i < w.size()) {
    if (w[i].kind == Kind::Lap) {
      size_t j = i;
      while (j < w.size() && w[j].kind == Kind::Lap) ++j;
      s += j - i == 1 ? "Δ" : "Δ^" + std::to_string(j - i);
      i = j;
    } else {
      s += w[i++].to_string();
    }
  }
  return s;
}

// Shape Delta^a X with X a single non-Laplacian letter or absent.
struct NormalShape {
  int lap = 0;
  Letter tail{Kind::Lap, Sym::None};
  bool has_tail = false;
};

inline bool is_normal(const Word& w, NormalShape* shape = nullptr) {
  NormalShape s;
  for (size_t i = 0; i < w.size(); ++i) {
    if (w[i].kind == Kind::Lap) {
      if (s.has_tail) return false;
      ++s.lap;
    } else {
      if (s.has_tail || i + 1 != w.size()) return false;
      s.tail = w[i];
      s.has_tail = true;
    }
  }
  if (shape) *shape = s;
  return true;
}

inline Word normal_word(int lap, const Letter* tail = nullptr) {
  Word w(lap, Letter::lap());
  if (tail) w.push_back(*tail);
  return w;
}

struct OperatorExpr {
  std::map<Word, RatFn> terms;
  std::map<int, long> z_bucket;  // operator order -> number of dropped (partial) words
  int homogeneity = 0;           // order + weight of every word
  int max_weight = 4;            // words above this weight go to Z

  int truncation_order() const { return homogeneity - max_weight; }

  void add(const Word& w, const RatFn& c) {
    if (c.is_zero()) return;
    if (word_weight(w) > max_weight) {
      ++z_bucket[homogeneity - word_weight(w)];
      return;
    }
    auto [it, fresh] = terms.try_emplace(w, c);
    if (!fresh) {
      it->second += c;
      if (it->second.is_zero()) terms.erase(it);
    }
  }

  RatFn coeff(const Word& w) const {
    auto it = terms.find(w);
    return it == terms.end() ? RatFn() : it->second;
  }

  // Descending Laplacian power, then letter tags.
  std::vector<std::pair<Word, RatFn>> sorted() const {
    std::vector<std::pair<Word, RatFn>> v(terms.begin(), terms.end());
    std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
      NormalShape sa, sb;
      bool na = is_normal(a.first, &sa), nb = is_normal(b.first, &sb);
      if (na && nb && sa.lap != sb.lap) return sa.lap > sb.lap;
      return a.first < b.first;
    });
    return v;
  }

  std::string to_string() const {
    std::string s;
    for (const auto& [w, c] : sorted()) {
      if (!s.empty()) s += "\n";
      NormalShape sh;
      std::string body;
      if (is_normal(w, &sh) && sh.has_tail)
        body = (sh.lap == 0 ? std::string() : sh.lap == 1 ? "Δ" : "Δ^" + std::to_string(sh.lap)) + "(" +
               sh.tail.to_string() + ")";
      else
        body = word_to_string(w);
      s += c.to_string() + " " + body;
    }
    for (const auto& [o, cnt] : z_bucket) s += (s.empty() ? "" : "\n") + ("Z[order " + std::to_string(o) + "]: " + std::to_string(cnt) + " terms");
    return s;
  }
};

class IncompleteRules : public std::runtime_error {
 public:
  explicit IncompleteRules(const std::string& word) : std::runtime_error("incomplete rule set: " + word), word_(word) {}
  const std::string& word() const noexcept { return word_; }

 private:
  std::string word_;
};

inline RatFn nvar() { return RatFn::var(); }
inline RatFn rq(long a, long b = 1) { return RatFn(rat(a, b)); }

// Concatenation product, dropping words above the weight bound.
inline OperatorExpr multiply(const OperatorExpr& a, const OperatorExpr& b) {
  OperatorExpr out;
  out.homogeneity = a.homogeneity + b.homogeneity;
  out.max_weight = std::min(a.max_weight, b.max_weight);
  for (const auto& [o, c] : a.z_bucket) out.z_bucket[o + b.homogeneity] += c;
  for (const auto& [o, c] : b.z_bucket) out.z_bucket[o + a.homogeneity] += c;
  for (const auto& [wa, ca] : a.terms)
    for (const auto& [wb, cb] : b.terms) {
      Word w = wa;
      w.insert(w.end(), wb.begin(), wb.end());
      out.add(w, ca * cb);
    }
  return out;
}

inline OperatorExpr identity_expr(int max_weight = 4) {
  OperatorExpr e;
  e.max_weight = max_weight;
  e.add({}, RatFn(1));
  return e;
}

// M_2 = Delta + (n-2)/(4(n-1)) Scal.
inline OperatorExpr m2() {
  OperatorExpr e;
  e.homogeneity = 2;
  e.add({Letter::lap()}, RatFn(1));
  e.add({Letter::mul(Sym::Scal)}, (nvar() - rq(2)) / (rq(4) * (nvar() - rq(1))));
  return e;
}

// M_4 = 4 delta P^# d + Delta Scal/(2(n-1)) + Scal^2/(4(n-1)^2) + (n-4)|P|^2.
inline OperatorExpr m4() {
  OperatorExpr e;
  e.homogeneity = 4;
  e.add({Letter::div_sch_div()}, rq(4));
  e.add({Letter::mul(Sym::LapScal)}, rq(1) / (rq(2) * (nvar() - rq(1))));
  e.add({Letter::mul(Sym::Scal2)}, rq(1) / (rq(4) * (nvar() - rq(1)) * (nvar() - rq(1))));
  e.add({Letter::mul(Sym::PNorm2)}, nvar() - rq(4));
  return e;
}

// M_6 = delta A_6^# d + mu_6; mu_6 is opaque and only ever lands in Z.
inline OperatorExpr m6() {
  OperatorExpr e;
  e.homogeneity = 6;
  e.max_weight = 6;
  e.add({Letter::div_a6()}, rq(1));
  e.add({Letter::mu6()}, rq(1));
  e.max_weight = 4;
  return e;
}

inline OperatorExpr power(const OperatorExpr& base, long p) {
  OperatorExpr r = identity_expr();
  for (long i = 0; i < p; ++i) r = multiply(r, base);
  return r;
}

// Product of M-factors given by their indices (2, 4 or 6), associated left to right.
inline OperatorExpr m_word(const std::vector<int>& factors) {
  OperatorExpr r = identity_expr();
  for (int f : factors) r = multiply(r, f == 2 ? m2() : f == 4 ? m4() : m6());
  return r;
}

// Same product associated right to left.
inline OperatorExpr m_word_right(const std::vector<int>& factors) {
  OperatorExpr r = identity_expr();
  for (auto it = factors.rbegin(); it != factors.rend(); ++it) r = multiply(*it == 2 ? m2() : *it == 4 ? m4() : m6(), r);
  return r;
}

struct JuhlBlock {
  enum Sum { M2Power, M4, M6, M4M4 } sum;
  mpq_class weight;         // signed coefficient in front of the M-word
  std::vector<int> factors; // M-indices, left to right
};

inline void require_k(long k, long lo, long hi, const char* what) {
  if (k < lo || k > hi)
    throw Unsupported(std::string(what) + " supports " + std::to_string(lo) + " <= k <= " + std::to_string(hi) + ", got k=" + std::to_string(k));
}

inline std::vector<int> m_factors(long before, int middle, long after) {
  std::vector<int> f(before, 2);
  f.push_back(middle);
  f.insert(f.end(), after, 2);
  return f;
}

// Juhl's four sums for P_{2k}, as signed M-words.
inline std::vector<JuhlBlock> juhl_blocks(long k) {
  require_k(k, 2, 8, "juhl_assemble");
  std::vector<JuhlBlock> out;
  out.push_back({JuhlBlock::M2Power, 1, std::vector<int>(k, 2)});
  for (long j = 1; j <= k - 1; ++j) out.push_back({JuhlBlock::M4, -mpq_class(j * (k - j)), m_factors(j - 1, 4, k - j - 1)});
  for (long j = 1; j <= k - 2; ++j)
    out.push_back({JuhlBlock::M6, rat(j * (j + 1) * (k - j) * (k - j - 1), 4), m_factors(j - 1, 6, k - j - 2)});
  for (long j = 2; j <= k - 2; ++j)
    for (long i = 1; i <= j - 1; ++i) {
      std::vector<int> f(i - 1, 2);
      f.push_back(4);
      f.insert(f.end(), j - i - 1, 2);
      f.push_back(4);
      f.insert(f.end(), k - j - 2, 2);
      out.push_back({JuhlBlock::M4M4, mpq_class((j + 1) * (k - j - 1) * i * (k - i)), f});
    }
  return out;
}

inline OperatorExpr scale(OperatorExpr e, const RatFn& c) {
  for (auto& [w, v] : e.terms) v *= c;
  return e;
}

inline void accumulate(OperatorExpr& into, const OperatorExpr& e) {
  into.homogeneity = e.homogeneity;
  for (const auto& [w, c] : e.terms) into.add(w, c);
  for (const auto& [o, c] : e.z_bucket) into.z_bucket[o] += c;
}

inline OperatorExpr assemble_blocks(long k, const std::vector<JuhlBlock>& blocks,
                                    const std::function<bool(const JuhlBlock&)>& keep = nullptr) {
  OperatorExpr out;
  out.homogeneity = 2 * k;
  for (const auto& b : blocks)
    if (!keep || keep(b)) accumulate(out, scale(m_word(b.factors), RatFn(b.weight)));
  return out;
}

// P_{2k} as a formal word sum; the o^{2k-5} remainder is implicit.
inline OperatorExpr juhl_assemble(long k) { return assemble_blocks(k, juhl_blocks(k)); }

namespace detail {

// Products of two weight-2 letters, leading symbol only.
inline bool leading_product(const Letter& y, const Letter& x, Letter& out, RatFn& sign) {
  sign = RatFn(1);
  if (y.kind == Kind::Mul && y.sym == Sym::Scal) {
    if (x.kind == Kind::Mul && x.sym == Sym::Scal) return out = Letter::mul(Sym::Scal2), true;
    if (x.kind == Kind::Hess && x.sym == Sym::P) return out = Letter::contract(Sym::ScalP, 2), true;
  }
  if (y.kind == Kind::DivSchDiv) {
    // delta P^# d = -(P, nabla^2) + lower.
    sign = RatFn(-1);
    if (x.kind == Kind::Mul && x.sym == Sym::Scal) return out = Letter::contract(Sym::ScalP, 2), true;
    if (x.kind == Kind::Hess && x.sym == Sym::P) return out = Letter::contract(Sym::PtensP, 4), true;
  }
  return false;
}

// y Delta^j in Delta-leading form.
inline void single_step(const Letter& y, int j, const RatFn& c, OperatorExpr& out) {
  auto put = [&](int lap, Letter t, const RatFn& f) {
    if (lap < 0 || f.is_zero()) return;
    out.add(normal_word(lap, &t), c * f);
  };
  const int W = out.max_weight;
  if (j == 0 && y.kind != Kind::DivSchDiv && y.kind != Kind::DivA6 && y.kind != Kind::Mu6) {
    put(0, y, RatFn(1));
    return;
  }
  switch (y.kind) {
    case Kind::Mul:
      if (y.sym == Sym::Scal) {
        put(j, y, RatFn(1));
        put(j - 1, Letter::mul(Sym::LapScal), rq(-j));
        put(j - 1, Letter::contract(Sym::GradScal, 1), rq(2 * j));
        put(j - 2, Letter::contract(Sym::HessScal, 2), rq(2 * j * (j - 1)));
        return;
      }
      break;
    case Kind::DivSchDiv:
      put(j, Letter::contract(Sym::DivP, 1), RatFn(1));
      put(j, Letter::contract(Sym::P, 2), rq(-1));
      put(j - 1, Letter::contract(Sym::DivGradP, 2), rq(j));
      put(j - 1, Letter::contract(Sym::GradDivP, 2), rq(2 * j));
      put(j - 1, Letter::contract(Sym::RiemP, 2), rq(2 * j));
      put(j - 1, Letter::contract(Sym::GradP, 3), rq(-2 * j));
      put(j - 2, Letter::contract(Sym::HessP, 4), rq(-2 * j * (j - 1)));
      return;
    case Kind::DivA6:
      // A_6 = 48 P^# P + 16/(n-4) Bach; delta A^# d = -(A, nabla^2) + weight >= 5.
      put(j, Letter::contract(Sym::PsharpP, 2), rq(-48));
      put(j, Letter::contract(Sym::Bach, 2), rq(-16) / (nvar() - rq(4)));
      return;
    case Kind::Mu6:
      ++out.z_bucket[out.homogeneity - 6];
      return;
    default:
      break;
  }
  if (y.weight() >= W) {
    put(j, y, RatFn(1));
    return;
  }
  Word w{y};
  w.insert(w.end(), j, Letter::lap());
  throw IncompleteRules(word_to_string(w));
}

inline void prepend(const Letter& y, const Word& nf, const RatFn& c, OperatorExpr& out) {
  NormalShape s;
  is_normal(nf, &s);
  if (y.kind == Kind::Lap) {
    Word w{y};
    w.insert(w.end(), nf.begin(), nf.end());
    out.add(w, c);
    return;
  }
  if (!s.has_tail) {
    single_step(y, s.lap, c, out);
    return;
  }
  if (y.weight() + s.tail.weight() > out.max_weight) {
    ++out.z_bucket[out.homogeneity - y.weight() - s.tail.weight()];
    return;
  }
  Letter prod;
  RatFn sign;
  if (!leading_product(y, s.tail, prod, sign)) {
    Word w{y};
    w.insert(w.end(), nf.begin(), nf.end());
    throw IncompleteRules(word_to_string(w));
  }
  out.add(normal_word(s.lap, &prod), c * sign);
}

}  // namespace detail

// Delta-leading normal form by absorbing letters right to left with the
// single-step rules (Scal Delta^j and delta P^# d Delta^j expansions) and
// leading-symbol products. Terms of order below `threshold` go to Z.
inline OperatorExpr rewrite_normal_form(const OperatorExpr& e, int threshold) {
  int max_weight = e.homogeneity - threshold;
  if (max_weight > 4) throw Unsupported("rewrite rules are only valid down to order homogeneity-4");
  OperatorExpr out;
  out.homogeneity = e.homogeneity;
  out.max_weight = max_weight;
  out.z_bucket = e.z_bucket;
  for (const auto& [word, c] : e.terms) {
    if (word_weight(word) > max_weight) {
      ++out.z_bucket[e.homogeneity - word_weight(word)];
      continue;
    }
    OperatorExpr acc;
    acc.homogeneity = e.homogeneity;
    acc.max_weight = max_weight;
    acc.add({}, c);
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
      OperatorExpr next;
      next.homogeneity = e.homogeneity;
      next.max_weight = max_weight;
      next.z_bucket = acc.z_bucket;
      for (const auto& [nf, cc] : acc.terms) detail::prepend(*it, nf, cc, next);
      acc = std::move(next);
    }
    for (const auto& [w, cc] : acc.terms) out.add(w, cc);
    for (const auto& [o, cnt] : acc.z_bucket) out.z_bucket[o] += cnt;
  }
  return out;
}

inline OperatorExpr normal_form(const OperatorExpr& e) { return rewrite_normal_form(e, e.homogeneity - e.max_weight); }

// Normal-form term constructors.
inline Word nf_word(int lap, Sym s, int derivatives) {
  Letter t = Letter::contract(s, derivatives);
  return normal_word(lap, &t);
}
inline Word nf_lap(int lap) { return normal_word(lap); }

struct StepCheck {
  std::string block;
  std::string term;
  RatFn expected;
  RatFn actual;
  bool ok = false;
};

struct StepReport {
  long k = 0;
  std::vector<StepCheck> checks;
  bool ok = true;
};

namespace detail {

inline void compare(StepReport& r, const std::string& block, const OperatorExpr& expected, const OperatorExpr& actual) {
  std::map<Word, bool> seen;
  for (const auto& [w, c] : expected.terms) seen[w] = true;
  for (const auto& [w, c] : actual.terms) seen[w] = true;
  for (const auto& [w, _] : seen) {
    StepCheck c{block, word_to_string(w), expected.coeff(w), actual.coeff(w), false};
    c.ok = c.expected == c.actual;
    r.ok = r.ok && c.ok;
    r.checks.push_back(std::move(c));
  }
}

inline OperatorExpr expr(long k) {
  OperatorExpr e;
  e.homogeneity = 2 * k;
  return e;
}

inline RatFn kq(long k) { return rq(k); }

}  // namespace detail

// Closed forms of the four Step-1 sums, transcribed term by term.
inline OperatorExpr expected_scal_sum(long k) {
  auto e = detail::expr(k);
  e.add(nf_word(k - 1, Sym::Scal, 0), rq(k));
  e.add(nf_word(k - 2, Sym::LapScal, 0), rq(-k * (k - 1), 2));
  e.add(nf_word(k - 2, Sym::GradScal, 1), rq(k * (k - 1)));
  if (k >= 3) e.add(nf_word(k - 3, Sym::HessScal, 2), rq(2 * k * (k - 1) * (k - 2), 3));
  return e;
}

inline OperatorExpr expected_m4_sum(long k) {
  auto e = detail::expr(k);
  RatFn n = nvar(), pre = rq(k * (k - 1) * (k + 1));
  e.add(nf_word(k - 2, Sym::DivP, 1), pre * rq(2, 3));
  e.add(nf_word(k - 2, Sym::P, 2), -pre * rq(2, 3));
  if (k >= 3) {
    RatFn a = pre * rq(k - 2, 3);
    e.add(nf_word(k - 3, Sym::DivGradP, 2), a);
    e.add(nf_word(k - 3, Sym::GradDivP, 2), a * rq(2));
    e.add(nf_word(k - 3, Sym::RiemP, 2), a * rq(2));
    e.add(nf_word(k - 3, Sym::GradP, 3), a * rq(-2));
    e.add(nf_word(k - 3, Sym::ScalP, 2), -pre * rq(k - 2) * (n - rq(2)) / (rq(6) * (n - rq(1))));
  }
  RatFn mu = pre * rq(1, 6);
  e.add(nf_word(k - 2, Sym::LapScal, 0), mu / (rq(2) * (n - rq(1))));
  e.add(nf_word(k - 2, Sym::Scal2, 0), mu / (rq(4) * (n - rq(1)) * (n - rq(1))));
  e.add(nf_word(k - 2, Sym::PNorm2, 0), mu * (n - rq(4)));
  if (k >= 4) e.add(nf_word(k - 4, Sym::HessP, 4), -pre * rq(2 * (k - 2) * (k - 3), 5));
  return e;
}

inline OperatorExpr expected_m6_sum(long k) {
  auto e = detail::expr(k);
  if (k < 3) return e;
  RatFn c = rq(-k * (k - 1) * (k - 2) * (k + 1) * (k + 2), 30);
  e.add(nf_word(k - 3, Sym::PsharpP, 2), c * rq(48));
  e.add(nf_word(k - 3, Sym::Bach, 2), c * rq(16) / (nvar() - rq(4)));
  return e;
}

inline OperatorExpr expected_m4m4_sum(long k) {
  auto e = detail::expr(k);
  if (k < 4) return e;
  e.add(nf_word(k - 4, Sym::PtensP, 4), rq(2 * k * (k - 1) * (k - 2) * (k - 3) * (k + 1) * (5 * k + 7), 45));
  return e;
}

inline OperatorExpr expected_m2_power(long k) {
  auto e = detail::expr(k);
  RatFn n = nvar();
  e.add(nf_lap(k), RatFn(1));
  RatFn mu2 = (n - rq(2)) / (rq(4) * (n - rq(1)));
  for (const auto& [w, c] : expected_scal_sum(k).terms) e.add(w, c * mu2);
  e.add(nf_word(k - 2, Sym::Scal2, 0), rq(k * (k - 1)) * (n - rq(2)) * (n - rq(2)) / (rq(32) * (n - rq(1)) * (n - rq(1))));
  return e;
}

// Engine-side sums of the same four blocks.
inline OperatorExpr scal_sum(long k) {
  auto e = detail::expr(k);
  for (long j = 1; j <= k; ++j) {
    Word w(j - 1, Letter::lap());
    w.push_back(Letter::mul(Sym::Scal));
    w.insert(w.end(), k - j, Letter::lap());
    e.add(w, RatFn(1));
  }
  return normal_form(e);
}

inline OperatorExpr block_sum(long k, JuhlBlock::Sum which, bool strip_weights_sign) {
  auto blocks = juhl_blocks(k);
  auto e = assemble_blocks(k, blocks, [&](const JuhlBlock& b) { return b.sum == which; });
  auto nf = normal_form(e);
  if (strip_weights_sign) {
    // The displayed sums carry j(k-j) and j(j+1)(k-j)(k-j-1) without Juhl's -1 and 1/4.
    RatFn f = which == JuhlBlock::M4 ? rq(-1) : which == JuhlBlock::M6 ? rq(4) : rq(1);
    nf = scale(nf, f);
  }
  return nf;
}

inline StepReport verify_step1_sums(long k) {
  require_k(k, 3, 8, "verify_step1_sums");
  StepReport r;
  r.k = k;
  detail::compare(r, "M2^k", expected_m2_power(k), block_sum(k, JuhlBlock::M2Power, false));
  detail::compare(r, "scal_sum", expected_scal_sum(k), scal_sum(k));
  detail::compare(r, "m4_sum", expected_m4_sum(k), block_sum(k, JuhlBlock::M4, true));
  detail::compare(r, "m6_sum", expected_m6_sum(k), block_sum(k, JuhlBlock::M6, true));
  detail::compare(r, "m4m4_sum", expected_m4m4_sum(k), block_sum(k, JuhlBlock::M4M4, true));
  return r;
}

struct NormalFormBlock {
  std::string name;  // f1, f2, T1..T5
  int lap = 0;       // Laplacian power in front
  int derivatives = 0;
  mpq_class multiplier;                // k, k(k-1), ...
  std::map<Sym, RatFn> coefficients;   // in the scalar-symbol basis
};

struct NormalFormTable {
  long k = 0;
  RatFn leading;  // coefficient of Delta^k
  std::vector<NormalFormBlock> blocks;
  std::map<int, long> z_bucket;
};

inline std::vector<NormalFormBlock> block_layout(long k) {
  auto ff = [](long k, int m) {
    mpq_class r = 1;
    for (int i = 0; i < m; ++i) r *= k - i;
    return r;
  };
  return {{"f1", int(k - 1), 0, ff(k, 1), {}}, {"f2", int(k - 2), 0, ff(k, 2), {}}, {"T1", int(k - 2), 1, ff(k, 2), {}},
          {"T2", int(k - 2), 2, ff(k, 2), {}}, {"T3", int(k - 3), 2, ff(k, 3), {}}, {"T4", int(k - 3), 3, ff(k, 3), {}},
          {"T5", int(k - 4), 4, ff(k, 4), {}}};
}

// Normal form of P_{2k} split into the blocks k Delta^{k-1}(f1.),
// k(k-1) Delta^{k-2}(f2. + (T1,nabla) + (T2,nabla^2)), ...; each block's
// coefficients are divided by its multiplier.
inline NormalFormTable extract_P2k_normal_form(long k) {
  require_k(k, 2, 8, "extract_P2k_normal_form");
  OperatorExpr nf = normal_form(juhl_assemble(k));
  NormalFormTable t;
  t.k = k;
  t.blocks = block_layout(k);
  t.z_bucket = nf.z_bucket;
  for (const auto& [w, c] : nf.terms) {
    NormalShape s;
    if (!is_normal(w, &s)) throw IncompleteRules(word_to_string(w));
    if (!s.has_tail) {
      if (s.lap != k) throw IncompleteRules(word_to_string(w));
      t.leading = c;
      continue;
    }
    bool placed = false;
    for (auto& b : t.blocks)
      if (b.lap == s.lap && b.derivatives == s.tail.order() && b.multiplier != 0) {
        b.coefficients[s.tail.sym] += c / RatFn(b.multiplier);
        placed = true;
        break;
      }
    if (!placed) throw IncompleteRules(word_to_string(w));
  }
  return t;
}

// f1, f2, T1..T5 as printed, in the scalar-symbol basis.
inline NormalFormTable expected_normal_form(long k) {
  NormalFormTable t;
  t.k = k;
  t.leading = RatFn(1);
  t.blocks = block_layout(k);
  RatFn n = nvar(), K = rq(k), n1 = n - rq(1), n2 = n - rq(2);
  auto& f1 = t.blocks[0].coefficients;
  f1[Sym::Scal] = n2 / (rq(4) * n1);
  auto& f2 = t.blocks[1].coefficients;
  f2[Sym::Scal2] = (rq(3) * n * n - rq(12) * n - rq(4) * K + rq(8)) / (rq(96) * n1 * n1);
  f2[Sym::PNorm2] = -(K + rq(1)) * (n - rq(4)) / rq(6);
  f2[Sym::LapScal] = -(rq(3) * n + rq(2) * K - rq(4)) / (rq(24) * n1);
  auto& t1 = t.blocks[2].coefficients;
  t1[Sym::GradScal] = n2 / (rq(4) * n1);
  t1[Sym::DivP] = -rq(2, 3) * (K + rq(1));
  t.blocks[3].coefficients[Sym::P] = rq(2, 3) * (K + rq(1));
  auto& t3 = t.blocks[4].coefficients;
  t3[Sym::HessScal] = n2 / (rq(6) * n1);
  t3[Sym::ScalP] = (K + rq(1)) * n2 / (rq(6) * n1);
  t3[Sym::DivGradP] = -(K + rq(1)) / rq(3);
  t3[Sym::GradDivP] = -rq(2) * (K + rq(1)) / rq(3);
  t3[Sym::RiemP] = -rq(2) * (K + rq(1)) / rq(3);
  t3[Sym::PsharpP] = -rq(2, 15) * (K + rq(1)) * (K + rq(2)) * rq(3);
  t3[Sym::Bach] = -rq(2, 15) * (K + rq(1)) * (K + rq(2)) / (n - rq(4));
  t.blocks[5].coefficients[Sym::GradP] = rq(2, 3) * (K + rq(1));
  auto& t5 = t.blocks[6].coefficients;
  t5[Sym::HessP] = rq(2, 5) * (K + rq(1));
  t5[Sym::PtensP] = rq(2, 5) * (K + rq(1)) * rq(5 * k + 7, 9);
  for (auto& b : t.blocks)
    if (b.multiplier == 0) b.coefficients.clear();
  return t;
}

inline StepReport compare_normal_form(const NormalFormTable& expected, const NormalFormTable& engine) {
  StepReport r;
  r.k = engine.k;
  auto push = [&](const std::string& block, const std::string& term, const RatFn& e, const RatFn& a) {
    StepCheck c{block, term, e, a, e == a};
    r.ok = r.ok && c.ok;
    r.checks.push_back(std::move(c));
  };
  push("leading", "Δ^" + std::to_string(engine.k), expected.leading, engine.leading);
  for (size_t i = 0; i < expected.blocks.size(); ++i) {
    std::map<Sym, bool> keys;
    for (const auto& [s, c] : expected.blocks[i].coefficients) keys[s] = true;
    for (const auto& [s, c] : engine.blocks[i].coefficients) keys[s] = true;
    for (const auto& [s, _] : keys) {
      auto get = [&](const NormalFormBlock& b) {
        auto it = b.coefficients.find(s);
        return it == b.coefficients.end() ? RatFn() : it->second;
      };
      push(expected.blocks[i].name, sym_name(s), get(expected.blocks[i]), get(engine.blocks[i]));
    }
  }
  return r;
}

}  // namespace qcurv::opalg
