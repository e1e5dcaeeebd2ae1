#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <ctime>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <string>

#include "qcurv/constants.hpp"
#include "qcurv/energy.hpp"
#include "qcurv/opalg.hpp"
#include "qcurv/serialize.hpp"
#include "qcurv/sphere.hpp"

using json = nlohmann::ordered_json;
using namespace qcurv;

namespace {

constexpr int kExitDomain = 2;
constexpr int kExitVerification = 3;
constexpr int kExitUsage = 64;

struct Options {
  long n = 0, k = 0;
  std::optional<long> l;
  std::string f = "1", lap_f = "0", bilap_f = "0", weyl_sq = "0", max_f;
  std::optional<std::string> mass, mu, theta;
  bool lcf = false, jets_vanish = false, meta = false;
  std::string k_range, format = "json", tol = "1e-10";
  long n_margin = 120;
};

struct Output {
  json body;
  std::string csv;
  int code = 0;
};

std::string utc_now() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void put_exact(json& j, const std::string& key, const ExactNumber& x) {
  j[key] = x.to_string();
  j[key + "_decimal"] = decimal_string(x.to_float());
}

std::pair<long, long> parse_range(const std::string& text) {
  auto colon = text.find(':');
  try {
    if (colon == std::string::npos) throw std::invalid_argument(text);
    size_t a = 0, b = 0;
    long lo = std::stol(text.substr(0, colon), &a), hi = std::stol(text.substr(colon + 1), &b);
    if (a != colon || b != text.size() - colon - 1) throw std::invalid_argument(text);
    if (lo > hi) throw DomainError("k-range", "empty range " + text);
    return {lo, hi};
  } catch (const DomainError&) {
    throw;
  } catch (const std::exception&) {
    throw DomainError("k-range", "expected lo:hi, got '" + text + "'");
  }
}

PointData point(const Options& o) {
  std::optional<mpq_class> m;
  if (o.mass) m = parse_rational(*o.mass, "mass");
  return PointData(o.n, o.k, parse_rational(o.f, "f"), parse_rational(o.lap_f, "lap-f"), parse_rational(o.bilap_f, "bilap-f"),
                   parse_rational(o.weyl_sq, "weyl-sq"), m);
}

long double positive_real(const std::string& text, const std::string& parameter) {
  mpq_class q = parse_rational(text, parameter);
  if (sgn(q) <= 0) throw DomainError(parameter, parameter + " must be positive");
  return to_float(q);
}

bool same_terms(const ExpansionSeries& a, const ExpansionSeries& b) {
  if (a.terms.size() != b.terms.size()) return false;
  for (size_t i = 0; i < a.terms.size(); ++i)
    if (a.terms[i].power != b.terms[i].power || a.terms[i].log != b.terms[i].log || !(a.terms[i].coeff == b.terms[i].coeff))
      return false;
  return true;
}

Output cmd_constants(const Options& o) {
  Output out;
  json& j = out.body;
  j["n"] = o.n;
  j["k"] = o.k;
  b_nk_inv(o.n, o.k);  // validates n > 2k, k >= 1
  put_exact(j, "b_nk", b_nk(o.n, o.k));
  put_exact(j, "mass_coeff", mass_coeff(o.n, o.k));
  Threshold t = threshold(o.n, o.k);
  j["threshold_rational"] = t.rational_part.get_str();
  j["threshold_omega_exponent"] = t.omega_exponent.get_str();
  j["threshold_decimal"] = decimal_string(t.value);
  bool weyl = o.k >= 2 && o.n >= 2 * o.k + 4;
  if (weyl) {
    put_exact(j, "C", big_C(o.n, o.k));
    put_exact(j, "c", small_c(o.n, o.k));
  }
  std::vector<long> ls;
  if (o.l) {
    ls.push_back(*o.l);
  } else if (o.k >= 2) {
    for (long l = o.k - 2; l <= 2 * o.k - 4; ++l) ls.push_back(l);
  }
  std::vector<std::vector<std::string>> rows;
  for (long l : ls) {
    mpq_class c = c_nkl(o.n, o.k, l);
    if (o.l) {
      j["l"] = l;
      j["c_nkl"] = c.get_str();
    } else {
      j["c_nkl_by_l"][std::to_string(l)] = c.get_str();
    }
    rows.push_back({std::to_string(o.n), std::to_string(o.k), std::to_string(l), c.get_str(),
                    weyl ? big_C(o.n, o.k).to_string() : "", weyl ? small_c(o.n, o.k).to_string() : "",
                    t.rational_part.get_str()});
  }
  if (rows.empty())
    rows.push_back({std::to_string(o.n), std::to_string(o.k), "", "", "", "", t.rational_part.get_str()});
  out.csv = csv_rows({"n", "k", "l", "c_nkl", "C", "c", "threshold_rational"}, rows);
  return out;
}

Output cmd_scan(const Options& o) {
  auto [lo, hi] = parse_range(o.k_range.empty() ? "2:20" : o.k_range);
  ScanReport r = scan_positivity(lo, hi, o.n_margin);
  Output out;
  out.body["k_range"] = std::to_string(lo) + ":" + std::to_string(hi);
  out.body["n_margin"] = o.n_margin;
  out.body["cells"] = r.rows.size();
  out.body["violation_count"] = r.violations.size();
  json v = json::array();
  for (const auto& row : r.violations)
    v.push_back({{"n", row.n}, {"k", row.k}, {"sign_C", row.sign_C}, {"sign_c", row.sign_c}});
  out.body["violations"] = v;
  std::vector<std::vector<std::string>> rows;
  for (const auto& row : r.rows)
    rows.push_back({std::to_string(row.n), std::to_string(row.k), std::to_string(row.sign_C), decimal_string(row.value_C),
                    std::to_string(row.sign_c), decimal_string(row.value_c), row.violation ? "true" : "false"});
  out.csv = csv_rows({"n", "k", "sign_C", "C_decimal", "sign_c", "c_decimal", "violation"}, rows);
  if (!r.violations.empty()) out.code = kExitVerification;
  return out;
}

Output series_output(const ExpansionSeries& s, const ExpansionSeries& check, const Options& o) {
  Output out;
  out.body["series"] = series_json(s);
  bool agree = same_terms(s, check);
  out.body["two_path_agree"] = agree;
  if (o.mu) out.body["value_at_mu"] = decimal_string(s.evaluate(positive_real(*o.mu, "mu")));
  Threshold t = threshold(o.n, o.k);
  out.body["threshold_decimal"] = decimal_string(t.scaled(s.prefactor.f_value));
  out.csv = series_csv(s);
  if (!agree) out.code = kExitVerification;
  return out;
}

Output cmd_energy(const Options& o) {
  PointData p = point(o);
  return series_output(energy_expansion_U(p), energy_expansion_quotient(p), o);
}

Output cmd_mass(const Options& o) {
  PointData p = point(o);
  return series_output(mass_expansion(p), mass_expansion_quotient(p), o);
}

Output cmd_certify(const Options& o) {
  CertifyOptions c;
  c.lcf = o.lcf;
  c.jets_vanish = o.jets_vanish;
  if (!o.max_f.empty()) c.max_f = parse_rational(o.max_f, "max-f");
  ExistenceVerdict v = certify(point(o), c);
  Output out;
  out.body["verdict"] = verdict_json(v);
  out.csv = csv_rows({"n", "k", "branch", "hypothesis", "certified", "threshold_decimal"},
                     {{std::to_string(o.n), std::to_string(o.k), branch_name(v.branch), v.hypothesis_exact.get_str(),
                       v.certified ? "true" : "false", decimal_string(v.threshold)}});
  return out;
}

Output cmd_sphere(const Options& o) {
  SphereSpec spec(o.n, o.k);
  long l = o.l.value_or(0);
  Output out;
  json& j = out.body;
  j["n"] = o.n;
  j["k"] = o.k;
  j["l"] = l;
  mpq_class e = gjms_eigenvalue(o.n, o.k, l);
  j["eigenvalue"] = e.get_str();
  j["eigenvalue_decimal"] = decimal_string(to_float(e));
  j["harmonic_dimension"] = harmonic_dimension(o.n, l).get_str();
  auto c = coercivity_check(o.n, o.k);
  j["coercive"] = c.coercive;
  j["min_eigenvalue"] = c.min_eigenvalue.get_str();
  auto s = sharpness_check(o.n, o.k);
  j["sharpness_equal"] = s.equal;
  long double theta = o.theta ? positive_real(*o.theta, "theta") : std::numbers::pi_v<long double>;
  long double tol = positive_real(o.tol, "tol");
  ZonalResult z = green_zonal_probe(o.n, o.k, theta, tol * green_closed_form(o.n, o.k, theta), 1L << 18);
  j["zonal"] = {{"theta", decimal_string(theta)},
                {"value", decimal_string(z.value)},
                {"tail_bound", decimal_string(z.tail_bound)},
                {"closed_form", decimal_string(z.closed_form)},
                {"L", z.L},
                {"method", z.method},
                {"conclusive", z.conclusive},
                {"positive", z.positive}};
  out.csv = csv_rows({"n", "k", "l", "eigenvalue", "harmonic_dimension", "coercive", "sharpness_equal", "zonal_value",
                      "zonal_tail_bound", "zonal_conclusive", "zonal_positive"},
                     {{std::to_string(o.n), std::to_string(o.k), std::to_string(l), e.get_str(),
                       harmonic_dimension(o.n, l).get_str(), c.coercive ? "true" : "false", s.equal ? "true" : "false",
                       decimal_string(z.value), decimal_string(z.tail_bound), z.conclusive ? "true" : "false",
                       z.positive ? "true" : "false"}});
  if (!c.coercive || !s.equal) out.code = kExitVerification;
  return out;
}

Output cmd_verify(const Options&) {
  std::vector<std::pair<std::string, bool>> checks;
  for (long k = 3; k <= 8; ++k) checks.emplace_back("step1_sums k=" + std::to_string(k), opalg::verify_step1_sums(k).ok);
  for (long k = 2; k <= 8; ++k)
    checks.emplace_back("normal_form k=" + std::to_string(k),
                        opalg::compare_normal_form(opalg::expected_normal_form(k), opalg::extract_P2k_normal_form(k)).ok);
  for (long k = 2; k <= 4; ++k) {
    bool ok = true;
    for (long n = 2 * k + 4; n <= 2 * k + 12; ++n) ok = ok && weyl_coefficient_two_path(n, k).equal;
    checks.emplace_back("weyl_two_path k=" + std::to_string(k), ok);
  }
  bool sharp = true, maple = true, mass = true;
  for (long k = 1; k <= 6; ++k)
    for (long n = 2 * k + 1; n <= 2 * k + 20; ++n) sharp = sharp && sharpness_check(n, k).equal;
  for (long k = 3; k <= 10; ++k)
    for (long n = 2 * k + 4; n <= 2 * k + 12; ++n)
      for (long l = k - 2; l <= 2 * k - 4; ++l) maple = maple && c_nkl(n, k, l) == c_nkl_expanded(n, k, l);
  for (long k = 1; k <= 5; ++k)
    for (long n = 2 * k + 1; n <= 2 * k + 6; ++n) {
      PointData p(n, k, 1, 0, 0, 0, 1);
      mass = mass && same_terms(mass_expansion(p), mass_expansion_quotient(p));
    }
  checks.emplace_back("sharpness", sharp);
  checks.emplace_back("c_nkl_expanded", maple);
  checks.emplace_back("mass_quotient", mass);

  Output out;
  json list = json::array();
  std::vector<std::vector<std::string>> rows;
  bool all = true;
  for (const auto& [name, ok] : checks) {
    list.push_back({{"name", name}, {"ok", ok}});
    rows.push_back({name, ok ? "true" : "false"});
    all = all && ok;
  }
  out.body["checks"] = list;
  out.body["ok"] = all;
  out.csv = csv_rows({"check", "ok"}, rows);
  if (!all) out.code = kExitVerification;
  return out;
}

int emit(const Output& out, const std::string& command, const Options& o) {
  if (o.format == "csv") {
    std::cout << out.csv;
  } else {
    json j = {{"schema", "1"}, {"command", command}};
    j.update(out.body);
    if (o.meta) j["meta"] = {{"generated_at", utc_now()}, {"tool", "qcurv"}};
    std::cout << j.dump(2) << "\n";
  }
  return out.code;
}

// Library parameter names mapped to the flags that carry them.
std::string flag_name(const std::string& parameter) {
  static const std::map<std::string, std::string> names{
      {"f_val", "f"}, {"lap_f", "lap-f"}, {"bilap_f", "bilap-f"}, {"weyl_sq", "weyl-sq"}, {"max_f", "max-f"}};
  auto it = names.find(parameter);
  return it == names.end() ? parameter : it->second;
}

int error(const std::string& code, const std::string& message, const std::string& parameter) {
  std::cout << json{{"code", code}, {"message", message}, {"parameter", flag_name(parameter)}}.dump() << "\n";
  return kExitDomain;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constants, expansions and verdicts for the higher-order Q-curvature problem", "qcurv"};
  app.require_subcommand(1);
  Options o;
  std::optional<long> l_opt;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_flag("--meta", o.meta, "Add a timestamp block");
  };
  auto nk = [&](CLI::App* sub) {
    sub->add_option("--n", o.n, "Dimension")->required();
    sub->add_option("--k", o.k, "Order")->required();
  };
  auto point_flags = [&](CLI::App* sub) {
    nk(sub);
    sub->add_option("--f", o.f, "f(xi)");
    sub->add_option("--lap-f", o.lap_f, "Delta f(xi)");
    sub->add_option("--bilap-f", o.bilap_f, "Delta^2 f(xi)");
    sub->add_option("--weyl-sq", o.weyl_sq, "|W(xi)|^2");
    sub->add_option("--mass", o.mass, "m(xi)");
  };

  std::map<std::string, std::function<Output(const Options&)>> handlers;
  auto add = [&](const std::string& name, const std::string& help, std::function<Output(const Options&)> h) {
    CLI::App* sub = app.add_subcommand(name, help);
    common(sub);
    handlers[name] = std::move(h);
    return sub;
  };

  auto* constants = add("constants", "C(n,k), c(n,k), c(n,k,l), b_nk, mass coefficient, threshold", cmd_constants);
  nk(constants);
  constants->add_option("--l", l_opt, "Summation index of c(n,k,l)");

  auto* scan = add("scan", "Exact positivity scan of C(n,k) and c(n,k)", cmd_scan);
  scan->add_option("--k-range", o.k_range, "lo:hi");
  scan->add_option("--n-margin", o.n_margin, "n ranges over 2k+4..2k+margin");

  auto* energy = add("energy", "Expansion of I(U_mu)", cmd_energy);
  point_flags(energy);
  energy->add_option("--mu", o.mu, "Evaluate the truncated series at mu");

  auto* mass = add("mass", "Mass expansion of I(V_mu)", cmd_mass);
  point_flags(mass);
  mass->add_option("--mu", o.mu, "Evaluate the truncated series at mu");

  auto* cert = add("certify", "Existence-criterion verdict", cmd_certify);
  point_flags(cert);
  cert->add_flag("--lcf", o.lcf, "Locally conformally flat near xi");
  cert->add_flag("--jets-vanish", o.jets_vanish, "Assert nabla^j f(xi) = 0 for j <= n-2k");
  cert->add_option("--max-f", o.max_f, "max f (defaults to f(xi))");

  auto* sphere = add("sphere", "Round-sphere spectrum and zonal Green's probe", cmd_sphere);
  nk(sphere);
  sphere->add_option("--l", l_opt, "Harmonic degree");
  sphere->add_option("--theta", o.theta, "Geodesic angle (default pi)");
  sphere->add_option("--tol", o.tol, "Tail tolerance relative to the closed form");

  auto* verify = add("verify", "Exact internal consistency checks", cmd_verify);
  verify->add_option("--tol", o.tol, "Unused by the exact checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  o.l = l_opt;

  for (const auto& [name, handler] : handlers) {
    if (!app.got_subcommand(name)) continue;
    try {
      return emit(handler(o), name, o);
    } catch (const DomainError& e) {
      return error("domain_error", e.what(), e.parameter());
    } catch (const Unsupported& e) {
      return error("unsupported", e.what(), "");
    }
  }
  return kExitUsage;
}
