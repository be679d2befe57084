#pragma once

// Orbit balls {gamma in Gamma : ||gamma||_F < T} for free subgroups of
// SL(2,Z), congruence bookkeeping, and the on-disk orbit cache.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hyperorbit/hyperbolic_core.hpp"

namespace hyperorbit {

// Open intervals of the real line (boundary of the upper half plane) that
// contain no limit points, as certified by a ping-pong fundamental domain.
struct PingPongCertificate {
  std::vector<std::pair<double, double>> free_intervals;
};

struct GroupPresentation {
  std::string label;
  std::vector<GroupElement> generators;
  std::optional<PingPongCertificate> freeness_certificate;

  // Checks det = 1 (enforced by GroupElement) and that generators and their
  // inverses are pairwise distinct in PSL(2,Z). Throws DomainError.
  void validate() const;
  // Generator i as a one-letter word; letter 2i is g_i, 2i+1 is g_i^{-1}.
  GroupElement letter(int code) const;
  int letter_count() const { return 2 * static_cast<int>(generators.size()); }
};

// <[[1,c],[0,1]], [[1,0],[c,1]]>, free and of the second kind for c >= 3.
GroupPresentation gamma_c(int c);

// Boundary angle in [0, pi) of the real point x under z -> (z-i)/(z+i),
// matching the theta1 convention of cartan_decompose.
double boundary_angle(double x);

struct OrbitPoint {
  GroupElement element;
  CartanCoords coords;
};

struct OrbitBall {
  GroupPresentation group;
  double T = 0;
  std::vector<OrbitPoint> elements;
  bool complete = false;

  std::size_t size() const { return elements.size(); }
};

struct EnumerateOptions {
  int threads = 1;
  // Hash every element to detect non-free input.
  bool check_duplicates = true;
  // With check_duplicates: drop repeats instead of throwing.
  bool dedup = false;
};

// ||g||_F < T, evaluated exactly for integral T.
bool norm_below(Wide norm_sq, double T);

// Depth-first over reduced words in letter order, pruning a prefix p once
// sigma_max(p) / kappa >= T with kappa the largest generator operator norm.
// Output is in lexicographic word order, identity first.
OrbitBall enumerate_ball(const GroupPresentation& group, double T,
                         const EnumerateOptions& options = {});

struct GrowthPoint {
  double T = 0;
  std::size_t count = 0;
};

// One enumeration at the largest T, then counts for each grid value.
std::vector<GrowthPoint> count_growth(const GroupPresentation& group,
                                      std::span<const double> T_grid,
                                      const EnumerateOptions& options = {});
std::vector<GrowthPoint> count_growth(const OrbitBall& ball, std::span<const double> T_grid);

// Entries reduced into [0, q).
struct Residue {
  Int a = 1, b = 0, c = 0, d = 1;
  friend bool operator==(const Residue&, const Residue&) = default;
};

struct ResidueHash {
  std::size_t operator()(const Residue& r) const noexcept;
};

Residue reduce_mod_q(const GroupElement& g, Int q);
Residue multiply_mod(const Residue& x, const Residue& y, Int q);

// Congruence data for a modulus q = q' q'' with q' | ramification.
// The residue table enumerates the image of the group in SL(2, Z/q); its
// size is the index [Gamma : Gamma(q)] of the principal congruence subgroup.
class CongruenceContext {
 public:
  CongruenceContext(const GroupPresentation& group, Int q, Int ramification = 1);

  Int q() const { return q_; }
  Int q_prime() const { return q_prime_; }
  Int q_double_prime() const { return q_double_prime_; }
  std::size_t index() const { return residues_.size(); }
  // Position of red(g) in the image; throws DomainError if g is not in the group.
  std::size_t coset_id(const GroupElement& g) const;
  const std::vector<Residue>& image() const { return residues_; }

 private:
  Int q_;
  Int q_prime_;
  Int q_double_prime_;
  std::vector<Residue> residues_;
  std::unordered_map<Residue, std::size_t, ResidueHash> lookup_;
};

// Elements of the ball in the coset gamma0 * Gamma(q).
OrbitBall coset_filter(const OrbitBall& ball, const CongruenceContext& ctx,
                       const GroupElement& gamma0);

// Number of ball elements in each coset, indexed by CongruenceContext::coset_id.
std::vector<std::size_t> coset_counts(const OrbitBall& ball, const CongruenceContext& ctx);

using RowResidue = std::pair<Int, Int>;

// Partition of ball indices by (c,d) gamma mod q.
std::map<RowResidue, std::vector<std::size_t>> stabilizer_filter_row(const OrbitBall& ball, Int q,
                                                                    RowResidue row);

// Binary orbit cache. Throws FormatError on bad magic, version, label or
// checksum.
void save_ball(const OrbitBall& ball, const std::filesystem::path& path);
OrbitBall load_ball(const std::filesystem::path& path, const GroupPresentation& group);

// Directory of cached balls keyed by group generators and T.
class OrbitCache {
 public:
  explicit OrbitCache(std::filesystem::path dir);
  std::filesystem::path path_for(const GroupPresentation& group, double T) const;
  // Loads a cached ball when present, otherwise enumerates and stores it.
  OrbitBall fetch(const GroupPresentation& group, double T, const EnumerateOptions& options = {});
  bool last_fetch_was_hit() const { return last_hit_; }

 private:
  std::filesystem::path dir_;
  bool last_hit_ = false;
};

std::uint64_t fnv1a(std::span<const unsigned char> bytes, std::uint64_t seed = 1469598103934665603ULL);

}  // namespace hyperorbit
