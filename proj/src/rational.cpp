#include "ideq/rational.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

namespace ideq {

namespace {

bool all_digits(const std::string& s, std::size_t from, std::size_t to) {
  if (from >= to) return false;
  for (std::size_t i = from; i < to; ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

Rational make_frac(std::uint64_t num, std::uint64_t den) {
  Rational q(static_cast<unsigned long>(num), static_cast<unsigned long>(den));
  q.canonicalize();
  return q;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  std::size_t start = 0;
  if (!text.empty() && text[0] == '-') start = 1;
  std::size_t slash = text.find('/');
  bool ok;
  if (slash == std::string::npos) {
    ok = all_digits(text, start, text.size());
  } else {
    ok = all_digits(text, start, slash) && all_digits(text, slash + 1, text.size());
  }
  if (!ok) throw std::invalid_argument("malformed rational: '" + text + "'");
  Rational q;
  if (q.set_str(text, 10) != 0) throw std::invalid_argument("malformed rational: '" + text + "'");
  if (q.get_den() == 0) throw std::invalid_argument("zero denominator: '" + text + "'");
  q.canonicalize();
  return q;
}

std::string rational_string(const Rational& q) {
  return q.get_str();
}

double to_double(const Rational& q) {
  return q.get_d();
}

Rational rationalize(double x, std::uint64_t max_den) {
  if (!std::isfinite(x)) throw std::invalid_argument("rationalize: non-finite input");
  bool neg = x < 0;
  double v = neg ? -x : x;

  // Continued-fraction expansion. (h1,k1) is the previous convergent,
  // (h2,k2) the one before; standard seeds h_{-1}/k_{-1}=1/0, h_{-2}/k_{-2}=0/1.
  std::uint64_t h1 = 1, k1 = 0, h2 = 0, k2 = 1;
  std::uint64_t best_h = 0, best_k = 1;
  std::uint64_t semi_h = 0, semi_k = 0;
  double rest = v;
  for (int iter = 0; iter < 64; ++iter) {
    double a_f = std::floor(rest);
    if (a_f > 9.0e18) break;
    std::uint64_t a = static_cast<std::uint64_t>(a_f);
    if (a > 0 && k1 > 0 && a > (max_den - k2) / k1) {
      // Next convergent busts the cap; remember the largest semiconvergent.
      std::uint64_t a_cut = (max_den - k2) / k1;
      if (a_cut >= 1) {
        semi_h = a_cut * h1 + h2;
        semi_k = a_cut * k1 + k2;
      }
      break;
    }
    std::uint64_t h = a * h1 + h2;
    std::uint64_t k = a * k1 + k2;
    h2 = h1; k2 = k1; h1 = h; k1 = k;
    best_h = h; best_k = k;
    double frac = rest - a_f;
    if (frac < 1e-12) break;
    rest = 1.0 / frac;
  }
  Rational best = make_frac(best_h, best_k);
  if (semi_k != 0) {
    Rational semi = make_frac(semi_h, semi_k);
    if (std::abs(to_double(semi) - v) < std::abs(to_double(best) - v)) best = semi;
  }
  if (neg) best = -best;
  return best;
}

}  // namespace ideq
