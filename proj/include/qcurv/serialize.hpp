#pragma once

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcurv/energy.hpp"
#include "qcurv/exactnum.hpp"

namespace qcurv {

inline std::string decimal_string(long double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.18Lg", v);
  return buf;
}

// Exact input: integer, p/q, or decimal with optional exponent ("2.5e-3").
inline mpq_class parse_rational(const std::string& text, const std::string& parameter) {
  auto fail = [&] { return DomainError(parameter, "not an exact number: '" + text + "'"); };
  if (text.empty()) throw fail();
  try {
    if (text.find('/') != std::string::npos) {
      mpq_class q(text, 10);
      if (q.get_den() == 0) throw fail();
      q.canonicalize();
      return q;
    }
    std::string mant = text;
    long exp10 = 0;
    if (auto e = text.find_first_of("eE"); e != std::string::npos) {
      mant = text.substr(0, e);
      size_t used = 0;
      exp10 = std::stol(text.substr(e + 1), &used);
      if (used != text.size() - e - 1) throw fail();
    }
    bool neg = !mant.empty() && (mant[0] == '-' || mant[0] == '+');
    std::string digits = neg ? mant.substr(1) : mant;
    bool minus = !mant.empty() && mant[0] == '-';
    if (auto dot = digits.find('.'); dot != std::string::npos) {
      exp10 -= static_cast<long>(digits.size() - dot - 1);
      digits.erase(dot, 1);
    }
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) throw fail();
    mpq_class q(mpz_class(digits, 10));
    q *= exp10 >= 0 ? pow_q(10, exp10) : 1 / pow_q(10, -exp10);
    return minus ? mpq_class(-q) : q;
  } catch (const DomainError&) {
    throw;
  } catch (const std::exception&) {
    throw fail();
  }
}

// Exact value as {exact, decimal}; a monomial adds rational and pi half-power parts.
inline nlohmann::ordered_json exact_json(const ExactNumber& x) {
  nlohmann::ordered_json j;
  j["exact"] = x.to_string();
  if (x.is_zero()) {
    j["rational"] = "0";
    j["pi_halfpower"] = 0;
  } else if (x.is_monomial()) {
    j["rational"] = x.coefficient().get_str();
    j["pi_halfpower"] = x.pi_exponent().twice;
  }
  j["decimal"] = decimal_string(x.to_float());
  return j;
}

inline nlohmann::ordered_json series_json(const ExpansionSeries& s) {
  nlohmann::ordered_json terms = nlohmann::ordered_json::array();
  for (const auto& t : s.terms) {
    nlohmann::ordered_json e = exact_json(t.coeff);
    terms.push_back({{"power", t.power},
                     {"log", t.log},
                     {"coeff_rational", e.value("rational", e["exact"].get<std::string>())},
                     {"coeff_pi_halfpower", e.value("pi_halfpower", 0)},
                     {"coeff_decimal", e["decimal"]}});
  }
  nlohmann::ordered_json pre = {{"constant", exact_json(s.prefactor.constant)},
                        {"omega_n", s.prefactor.n},
                        {"omega_exponent", s.prefactor.omega_exponent.get_str()},
                        {"f_value", s.prefactor.f_value.get_str()},
                        {"f_exponent", s.prefactor.f_exponent.get_str()},
                        {"decimal", decimal_string(s.prefactor.numeric())}};
  return {{"prefactor", pre}, {"terms", terms}, {"remainder", s.remainder.to_string()}};
}

inline std::string series_csv(const ExpansionSeries& s) {
  std::ostringstream out;
  out << "power,log,coeff_rational,coeff_pi_halfpower,coeff_decimal\n";
  const auto j = series_json(s);
  for (const auto& t : j["terms"])
    out << t["power"].get<long>() << "," << (t["log"].get<bool>() ? "true" : "false") << ","
        << t["coeff_rational"].get<std::string>() << "," << t["coeff_pi_halfpower"].get<long>() << ","
        << t["coeff_decimal"].get<std::string>() << "\n";
  return out.str();
}

inline nlohmann::ordered_json verdict_json(const ExistenceVerdict& v) {
  return {{"branch", branch_name(v.branch)},
          {"hypothesis", v.hypothesis_exact.get_str()},
          {"hypothesis_decimal", decimal_string(v.hypothesis_value)},
          {"certified", v.certified},
          {"threshold_decimal", decimal_string(v.threshold)},
          {"reason", v.reason},
          {"assumptions", v.assumptions}};
}

// One header row plus one row per object; values are written as given.
inline std::string csv_rows(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  };
  std::ostringstream out;
  for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << quote(header[i]);
  out << "\n";
  for (const auto& r : rows) {
    for (size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << quote(r[i]);
    out << "\n";
  }
  return out.str();
}

}  // namespace qcurv
