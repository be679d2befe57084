#include "hyperorbit/hyperbolic_core.hpp"

#include <cmath>
#include <sstream>

#include "hyperorbit/error.hpp"

namespace hyperorbit {

namespace {

Wide checked_mul(Wide x, Wide y) {
  Wide out;
  if (__builtin_mul_overflow(x, y, &out)) {
    throw OverflowError("128-bit overflow in matrix arithmetic; T too large for fixed-width entries");
  }
  return out;
}

Wide checked_add(Wide x, Wide y) {
  Wide out;
  if (__builtin_add_overflow(x, y, &out)) {
    throw OverflowError("128-bit overflow in matrix arithmetic; T too large for fixed-width entries");
  }
  return out;
}

Int narrow(Wide x) {
  if (x > static_cast<Wide>(INT64_MAX) || x < static_cast<Wide>(INT64_MIN)) {
    throw OverflowError("matrix entry exceeds 64 bits; T too large for fixed-width entries");
  }
  return static_cast<Int>(x);
}

std::string reduce_word(std::string word) {
  std::string out;
  out.reserve(word.size());
  for (char ch : word) {
    if (!out.empty() && letter_index(out.back()) == letter_index(ch) &&
        letter_is_inverse(out.back()) != letter_is_inverse(ch)) {
      out.pop_back();
    } else {
      out.push_back(ch);
    }
  }
  return out;
}

// Shared by the integer and real paths. p = a^2+b^2-c^2-d^2 and
// q = -2(ac+bd) locate g.i in the disk; pinv/qinv do the same for g^{-1}.
CartanCoords assemble(long double norm_sq, long double p, long double q, long double pinv,
                      long double qinv) {
  CartanCoords out;
  const long double half = norm_sq / 2.0L;
  out.t = static_cast<double>(half <= 1.0L ? 0.0L : std::acosh(half));
  out.r = std::tanh(out.t / 2.0);
  out.theta1 = reduce_angle(static_cast<double>(0.5L * std::atan2(q, p)));
  out.theta2 = reduce_angle(static_cast<double>(kPi / 2.0L - 0.5L * std::atan2(qinv, pinv)));
  return out;
}

}  // namespace

char generator_letter(int index, bool inverse) {
  return static_cast<char>((inverse ? 'A' : 'a') + index);
}

int letter_index(char letter) {
  return letter >= 'a' ? letter - 'a' : letter - 'A';
}

bool letter_is_inverse(char letter) { return letter < 'a'; }

std::string invert_word(std::string_view word) {
  std::string out(word.rbegin(), word.rend());
  for (char& ch : out) {
    ch = generator_letter(letter_index(ch), !letter_is_inverse(ch));
  }
  return out;
}

GroupElement::GroupElement(Int a, Int b, Int c, Int d, std::string word)
    : a_(a), b_(b), c_(c), d_(d), word_(std::move(word)) {
  const Wide det = checked_add(checked_mul(a, d), -checked_mul(b, c));
  if (det != 1) {
    throw DomainError("matrix " + to_string(*this) + " does not have determinant 1");
  }
}

GroupElement GroupElement::inverse() const {
  GroupElement out;
  out.a_ = d_;
  out.b_ = narrow(-static_cast<Wide>(b_));
  out.c_ = narrow(-static_cast<Wide>(c_));
  out.d_ = a_;
  out.word_ = invert_word(word_);
  return out;
}

std::array<Int, 4> GroupElement::canonical_key() const {
  std::array<Int, 4> key = entries();
  for (Int v : key) {
    if (v == 0) continue;
    if (v < 0) {
      for (Int& w : key) w = narrow(-static_cast<Wide>(w));
    }
    break;
  }
  return key;
}

std::string to_string(Wide value) {
  if (value == 0) return "0";
  const bool negative = value < 0;
  unsigned __int128 mag = negative ? -static_cast<unsigned __int128>(value)
                                   : static_cast<unsigned __int128>(value);
  std::string digits;
  while (mag > 0) {
    digits.push_back(static_cast<char>('0' + static_cast<int>(mag % 10)));
    mag /= 10;
  }
  if (negative) digits.push_back('-');
  return {digits.rbegin(), digits.rend()};
}

std::string to_string(const GroupElement& g) {
  std::ostringstream os;
  os << "[[" << g.a() << "," << g.b() << "],[" << g.c() << "," << g.d() << "]]";
  return os.str();
}

RealMatrix to_real(const GroupElement& g) {
  return {static_cast<double>(g.a()), static_cast<double>(g.b()), static_cast<double>(g.c()),
          static_cast<double>(g.d())};
}

RealMatrix multiply(const RealMatrix& x, const RealMatrix& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c,
          x.c * y.b + x.d * y.d};
}

RealMatrix rotation(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {c, s, -s, c};
}

RealMatrix diagonal_flow(double t) { return {std::exp(t / 2), 0, 0, std::exp(-t / 2)}; }

GroupElement compose(const GroupElement& g, const GroupElement& h) {
  const Int a = narrow(checked_add(checked_mul(g.a(), h.a()), checked_mul(g.b(), h.c())));
  const Int b = narrow(checked_add(checked_mul(g.a(), h.b()), checked_mul(g.b(), h.d())));
  const Int c = narrow(checked_add(checked_mul(g.c(), h.a()), checked_mul(g.d(), h.c())));
  const Int d = narrow(checked_add(checked_mul(g.c(), h.b()), checked_mul(g.d(), h.d())));
  return {a, b, c, d, reduce_word(g.word() + h.word())};
}

Wide frobenius_norm_sq(const GroupElement& g) {
  Wide sum = 0;
  for (Int v : g.entries()) sum = checked_add(sum, checked_mul(v, v));
  return sum;
}

double operator_norm_from_frobenius_sq(long double norm_sq) {
  // sigma_max^2 + sigma_min^2 = F^2 and sigma_max * sigma_min = 1.
  const long double gap = norm_sq > 2.0L ? std::sqrt(norm_sq - 2.0L) : 0.0L;
  return static_cast<double>((std::sqrt(norm_sq + 2.0L) + gap) / 2.0L);
}

double operator_norm(const GroupElement& g) {
  return operator_norm_from_frobenius_sq(static_cast<long double>(frobenius_norm_sq(g)));
}

double reduce_angle(double theta) {
  double out = std::fmod(theta, kPi);
  if (out < 0) out += kPi;
  if (out >= kPi) out = 0;
  return out;
}

CartanCoords cartan_decompose(const GroupElement& g) {
  const Wide a = g.a(), b = g.b(), c = g.c(), d = g.d();
  const Wide norm_sq = frobenius_norm_sq(g);
  const Wide p = checked_add(checked_add(a * a, b * b), -checked_add(c * c, d * d));
  const Wide q = -2 * checked_add(checked_mul(a, c), checked_mul(b, d));
  if (p == 0 && q == 0) {
    // g is a rotation k(theta): (a, b) = (cos, sin) up to sign.
    CartanCoords out;
    out.degenerate = true;
    out.theta1 = reduce_angle(std::atan2(static_cast<double>(b), static_cast<double>(a)));
    return out;
  }
  const Wide pinv = checked_add(checked_add(d * d, b * b), -checked_add(c * c, a * a));
  const Wide qinv = 2 * checked_add(checked_mul(c, d), checked_mul(a, b));
  return assemble(static_cast<long double>(norm_sq), static_cast<long double>(p),
                  static_cast<long double>(q), static_cast<long double>(pinv),
                  static_cast<long double>(qinv));
}

CartanCoords cartan_decompose(const RealMatrix& g) {
  const long double a = g.a, b = g.b, c = g.c, d = g.d;
  const long double norm_sq = a * a + b * b + c * c + d * d;
  const long double p = a * a + b * b - c * c - d * d;
  const long double q = -2.0L * (a * c + b * d);
  if (norm_sq - 2.0L <= 1e-14L * norm_sq) {
    CartanCoords out;
    out.degenerate = true;
    out.theta1 = reduce_angle(std::atan2(g.b, g.a));
    return out;
  }
  const long double pinv = d * d + b * b - c * c - a * a;
  const long double qinv = 2.0L * (c * d + a * b);
  return assemble(norm_sq, p, q, pinv, qinv);
}

RealMatrix cartan_reconstruct(const CartanCoords& coords) {
  return multiply(multiply(rotation(coords.theta1), diagonal_flow(coords.t)),
                  rotation(coords.theta2));
}

DiskPoint disk_point(const GroupElement& g) {
  const CartanCoords coords = cartan_decompose(g);
  return {coords.theta1, coords.r, coords.degenerate};
}

}  // namespace hyperorbit
