#pragma once
// Text formats shared by the CLI and file IO.
//
//   complex scalar: "a", "bi", "a+bi", "a-bi" (also "i", "-i"; exponents ok)
//   matrix: rows separated by ';', entries by ','  e.g. "1,0;0,-1"
//   rational literal: optional sign, digits, optionally "/digits" or a finite
//   decimal, optionally a decimal exponent; all exactly representable.

#include <cctype>
#include <charconv>
#include <complex>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace heis {

inline std::string strip_ws(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline std::vector<std::string> split(const std::string& s, char delim) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == delim) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

inline double parse_real(const std::string& raw) {
  const std::string s = strip_ws(raw);
  if (s.empty()) throw std::invalid_argument("empty number");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size())
    throw std::invalid_argument("bad number: '" + raw + "'");
  return v;
}

// Splits "a+bi" at the first top-level sign (one not in position 0 and not
// part of an exponent), then classifies each term by a trailing 'i'.
inline std::complex<double> parse_complex(const std::string& raw) {
  const std::string s = strip_ws(raw);
  if (s.empty()) throw std::invalid_argument("empty complex literal");
  std::size_t cut = std::string::npos;
  for (std::size_t k = 1; k < s.size(); ++k) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      cut = k;
      break;
    }
  }
  auto term = [&raw](const std::string& t, double& re, double& im) {
    if (!t.empty() && (t.back() == 'i' || t.back() == 'I')) {
      std::string body = t.substr(0, t.size() - 1);
      if (body.empty() || body == "+")
        im += 1.0;
      else if (body == "-")
        im += -1.0;
      else
        im += parse_real(body);
    } else {
      re += parse_real(t.empty() ? raw : t);
    }
  };
  double re = 0.0, im = 0.0;
  if (cut == std::string::npos) {
    term(s, re, im);
  } else {
    term(s.substr(0, cut), re, im);
    term(s.substr(cut), re, im);
  }
  return {re, im};
}

inline std::vector<std::vector<std::complex<double>>> parse_matrix_text(
    const std::string& raw) {
  std::vector<std::vector<std::complex<double>>> rows;
  for (const std::string& row : split(strip_ws(raw), ';')) {
    std::vector<std::complex<double>> r;
    for (const std::string& e : split(row, ',')) r.push_back(parse_complex(e));
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw std::invalid_argument("empty matrix");
  for (const auto& r : rows)
    if (r.size() != rows[0].size())
      throw std::invalid_argument("ragged matrix rows");
  return rows;
}

// True when the literal denotes a rational exactly: sign, digits with at most
// one '.' or one '/', optional integer exponent.  No 'i', no inf/nan.
inline bool is_rational_literal(const std::string& raw) {
  const std::string s = strip_ws(raw);
  std::size_t k = 0;
  auto digits = [&](std::size_t& p) {
    std::size_t start = p;
    while (p < s.size() && std::isdigit(static_cast<unsigned char>(s[p]))) ++p;
    return p > start;
  };
  if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
  bool intpart = digits(k);
  bool fracpart = false;
  if (k < s.size() && s[k] == '.') {
    ++k;
    fracpart = digits(k);
  } else if (k < s.size() && s[k] == '/') {
    ++k;
    if (!intpart || !digits(k)) return false;
    intpart = true;
  }
  if (!intpart && !fracpart) return false;
  if (k < s.size() && (s[k] == 'e' || s[k] == 'E')) {
    ++k;
    if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
    if (!digits(k)) return false;
  }
  return k == s.size();
}

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string format_complex(std::complex<double> v) {
  if (v.imag() == 0.0) return format_double(v.real());
  std::string s = v.real() == 0.0 ? std::string() : format_double(v.real());
  if (v.imag() >= 0.0 && !s.empty()) s += "+";
  s += format_double(v.imag());
  s += "i";
  return s;
}

}  // namespace heis
