#pragma once

// Exact 2x2 integer matrix arithmetic in SL(2,Z) and the Cartan (KA+K)
// coordinate map.
//
// Conventions used throughout the library:
//   k(theta) = [[cos theta, sin theta], [-sin theta, cos theta]]
//   a(t)     = diag(e^{t/2}, e^{-t/2})
//   g = +-k(theta1) a(t) k(theta2),  0 <= theta1, theta2 < pi,  t >= 0
//   ||g||_F^2 = e^t + e^{-t}
// With this normalisation k(theta) rotates the unit disk by 2*theta and the
// orbit point g.o sits at e^{2 i theta1} tanh(t/2).

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace hyperorbit {

using Int = std::int64_t;
using Wide = __int128;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Letters of a word: generator i is 'a'+i, its inverse is 'A'+i.
char generator_letter(int index, bool inverse);
int letter_index(char letter);
bool letter_is_inverse(char letter);
std::string invert_word(std::string_view word);

class GroupElement {
 public:
  GroupElement() = default;  // identity
  // Throws DomainError unless ad - bc == 1.
  GroupElement(Int a, Int b, Int c, Int d, std::string word = {});

  static GroupElement identity() { return {}; }

  Int a() const { return a_; }
  Int b() const { return b_; }
  Int c() const { return c_; }
  Int d() const { return d_; }
  std::array<Int, 4> entries() const { return {a_, b_, c_, d_}; }
  const std::string& word() const { return word_; }

  GroupElement inverse() const;
  bool is_identity() const { return a_ == 1 && b_ == 0 && c_ == 0 && d_ == 1; }

  // Representative of {g, -g} whose first nonzero entry (reading order
  // a, b, c, d) is positive. Used as the PSL(2,Z) identity of the element.
  std::array<Int, 4> canonical_key() const;
  bool projectively_equal(const GroupElement& other) const {
    return canonical_key() == other.canonical_key();
  }

  // Matrix equality; provenance words are ignored.
  friend bool operator==(const GroupElement& g, const GroupElement& h) {
    return g.entries() == h.entries();
  }

 private:
  Int a_ = 1, b_ = 0, c_ = 0, d_ = 1;
  std::string word_;
};

std::string to_string(const GroupElement& g);
std::string to_string(Wide value);

struct RealMatrix {
  double a = 1, b = 0, c = 0, d = 1;
};

RealMatrix to_real(const GroupElement& g);
RealMatrix multiply(const RealMatrix& x, const RealMatrix& y);
RealMatrix rotation(double theta);
RealMatrix diagonal_flow(double t);

struct CartanCoords {
  double theta1 = 0;
  double t = 0;
  double theta2 = 0;
  double r = 0;  // tanh(t/2), radius of g.o in the disk
  bool degenerate = false;  // g in K; theta2 set to 0 by convention
};

struct DiskPoint {
  double angle = 0;
  double radius = 0;
  bool degenerate = false;
};

// Exact product with overflow detection; the word of the result is the
// freely reduced concatenation of the two words.
GroupElement compose(const GroupElement& g, const GroupElement& h);

// a^2 + b^2 + c^2 + d^2, exact. Throws OverflowError if it does not fit.
Wide frobenius_norm_sq(const GroupElement& g);

// Largest singular value, from the Frobenius norm of a unimodular matrix.
double operator_norm(const GroupElement& g);
double operator_norm_from_frobenius_sq(long double norm_sq);

// Reduce an angle into [0, pi).
double reduce_angle(double theta);

CartanCoords cartan_decompose(const GroupElement& g);
CartanCoords cartan_decompose(const RealMatrix& g);
RealMatrix cartan_reconstruct(const CartanCoords& coords);

DiskPoint disk_point(const GroupElement& g);

}  // namespace hyperorbit
