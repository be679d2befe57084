#include "hyperorbit/group_orbit.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <bit>
#include <cmath>
#include <cstring>
#include <deque>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "hyperorbit/error.hpp"

namespace hyperorbit {

namespace {

struct Mat {
  Wide a, b, c, d;
};

Mat times(const Mat& x, const Mat& y) {
  Mat out{};
  const Wide prods[8] = {x.a * y.a, x.b * y.c, x.a * y.b, x.b * y.d,
                         x.c * y.a, x.d * y.c, x.c * y.b, x.d * y.d};
  Wide* slots[4] = {&out.a, &out.b, &out.c, &out.d};
  for (int i = 0; i < 4; ++i) {
    if (__builtin_add_overflow(prods[2 * i], prods[2 * i + 1], slots[i])) {
      throw OverflowError("matrix product overflow during enumeration; reduce T");
    }
  }
  for (Wide v : {out.a, out.b, out.c, out.d}) {
    if (v > static_cast<Wide>(INT64_MAX) || v < static_cast<Wide>(INT64_MIN)) {
      throw OverflowError("matrix entry exceeds 64 bits during enumeration; reduce T");
    }
  }
  return out;
}

Wide norm_sq(const Mat& m) { return m.a * m.a + m.b * m.b + m.c * m.c + m.d * m.d; }

Mat to_mat(const GroupElement& g) { return {g.a(), g.b(), g.c(), g.d()}; }

// Reduced word as a run-length path: (letter code, run length).
class SyllablePath {
 public:
  void push(int code) {
    if (!runs_.empty() && runs_.back().first == code) {
      ++runs_.back().second;
    } else {
      runs_.emplace_back(code, 1);
    }
  }
  void pop() {
    if (--runs_.back().second == 0) runs_.pop_back();
  }
  std::string encode() const {
    std::string out;
    for (const auto& [code, count] : runs_) {
      out.push_back(generator_letter(code / 2, code % 2 == 1));
      if (count > 1) out += std::to_string(count);
    }
    return out;
  }

 private:
  std::vector<std::pair<int, int>> runs_;
};

struct Frame {
  Mat m;
  int last;  // letter code that produced this node
  int next;  // next child letter code to try
};

// Explores the subtree rooted at the one-letter word `root`.
std::vector<OrbitPoint> explore_branch(const GroupPresentation& group, int root, double T,
                                       double kappa) {
  const int letters = group.letter_count();
  std::vector<Mat> step(letters);
  for (int code = 0; code < letters; ++code) step[code] = to_mat(group.letter(code));

  const long double prune_at = static_cast<long double>(kappa) * T;
  auto keep_going = [&](const Mat& m) {
    return operator_norm_from_frobenius_sq(static_cast<long double>(norm_sq(m))) < prune_at;
  };

  // Distinct elements of SL(2,Z) with operator norm < kappa T number about
  // 12 (kappa T)^2; visiting more nodes than that means repeated elements.
  const long double budget = 16.0L * prune_at * prune_at + 4096.0L;
  long double visited = 0;

  std::vector<OrbitPoint> out;
  SyllablePath path;
  std::vector<Frame> stack;

  auto visit = [&](const Mat& m, int code) {
    if (!keep_going(m)) return;
    if (++visited > budget) {
      throw NonFreeGroupError("group " + group.label +
                              " is not free: the reduced-word tree exceeds the SL(2,Z) ball size");
    }
    path.push(code);
    if (norm_below(norm_sq(m), T)) {
      GroupElement g(static_cast<Int>(m.a), static_cast<Int>(m.b), static_cast<Int>(m.c),
                     static_cast<Int>(m.d), path.encode());
      CartanCoords coords = cartan_decompose(g);
      out.push_back({std::move(g), coords});
    }
    stack.push_back({m, code, 0});
  };

  visit(step[root], root);
  while (!stack.empty()) {
    Frame& top = stack.back();
    // Skip the letter that would cancel the last one.
    const int cancel = top.last ^ 1;
    while (top.next < letters && top.next == cancel) ++top.next;
    if (top.next >= letters) {
      stack.pop_back();
      path.pop();
      continue;
    }
    const int code = top.next++;
    const Mat child = times(top.m, step[code]);
    visit(child, code);
  }
  return out;
}

void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& buf, double v) { put_u64(buf, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

constexpr char kMagic[8] = {'H', 'O', 'R', 'B', 'C', 'A', 'C', 'H'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kRecordBytes = 4 * 8 + 3 * 8;

Int positive_mod(Wide x, Int q) {
  Wide r = x % q;
  if (r < 0) r += q;
  return static_cast<Int>(r);
}

}  // namespace

void GroupPresentation::validate() const {
  if (generators.empty()) throw DomainError("group presentation has no generators");
  std::set<std::array<Int, 4>> seen;
  for (int code = 0; code < letter_count(); ++code) {
    if (!seen.insert(letter(code).canonical_key()).second) {
      throw DomainError("generators of " + label + " are not pairwise distinct up to sign");
    }
  }
  if (generators.size() > 26) throw DomainError("at most 26 generators are supported");
}

GroupElement GroupPresentation::letter(int code) const {
  const GroupElement& g = generators.at(static_cast<std::size_t>(code / 2));
  const bool inv = code % 2 == 1;
  const GroupElement base = inv ? g.inverse() : g;
  return {base.a(), base.b(), base.c(), base.d(), std::string(1, generator_letter(code / 2, inv))};
}

GroupPresentation gamma_c(int c) {
  if (c < 2) throw DomainError("gamma_c requires c >= 2");
  GroupPresentation group;
  group.label = "Gamma_" + std::to_string(c);
  group.generators = {GroupElement(1, c, 0, 1), GroupElement(1, 0, c, 1)};
  if (c >= 3) {
    // Boundary arcs of the fundamental domain |Re z| <= c/2, |z -+ 1/c| >= 1/c.
    const double lo = 2.0 / c;
    const double hi = c / 2.0;
    group.freeness_certificate = PingPongCertificate{{{lo, hi}, {-hi, -lo}}};
  }
  return group;
}

double boundary_angle(double x) { return reduce_angle(std::atan2(-1.0, x)); }

bool norm_below(Wide norm_sq, double T) {
  if (T <= 0) return false;
  if (T == std::floor(T) && T < 3.0e9) {
    const Wide t = static_cast<Wide>(T);
    return norm_sq < t * t;
  }
  return static_cast<long double>(norm_sq) < static_cast<long double>(T) * T;
}

OrbitBall enumerate_ball(const GroupPresentation& group, double T, const EnumerateOptions& options) {
  group.validate();
  if (!(T >= std::sqrt(2.0))) throw DomainError("enumerate_ball requires T >= sqrt(2)");

  double kappa = 1.0;
  for (const GroupElement& g : group.generators) kappa = std::max(kappa, operator_norm(g));

  const int letters = group.letter_count();
  std::vector<std::vector<OrbitPoint>> branches(letters);
  const int workers = std::clamp(options.threads, 1, letters);
  if (workers == 1) {
    for (int code = 0; code < letters; ++code) branches[code] = explore_branch(group, code, T, kappa);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (int code = next++; code < letters; code = next++) {
            branches[code] = explore_branch(group, code, T, kappa);
          }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  OrbitBall ball;
  ball.group = group;
  ball.T = T;
  std::size_t total = 1;
  for (const auto& b : branches) total += b.size();
  ball.elements.reserve(total);
  if (norm_below(2, T)) {
    const GroupElement id;
    ball.elements.push_back({id, cartan_decompose(id)});
  }
  for (auto& b : branches) {
    std::move(b.begin(), b.end(), std::back_inserter(ball.elements));
    b.clear();
    b.shrink_to_fit();
  }

  if (options.check_duplicates) {
    struct KeyHash {
      std::size_t operator()(const std::array<Int, 4>& k) const noexcept {
        std::size_t h = 0;
        for (Int v : k) h = h * 1000003u ^ std::hash<Int>{}(v);
        return h;
      }
    };
    std::unordered_set<std::array<Int, 4>, KeyHash> seen;
    seen.reserve(ball.elements.size() * 2);
    std::vector<OrbitPoint> kept;
    bool dropped = false;
    for (auto& p : ball.elements) {
      if (seen.insert(p.element.canonical_key()).second) {
        if (options.dedup) kept.push_back(std::move(p));
        continue;
      }
      if (!options.dedup) {
        throw NonFreeGroupError("group " + group.label + " is not free: " +
                                to_string(p.element) + " reached again by word " +
                                p.element.word());
      }
      dropped = true;
    }
    if (options.dedup) ball.elements = std::move(kept);
    // Pruning is only certified for free groups.
    ball.complete = !dropped;
  } else {
    ball.complete = true;
  }
  return ball;
}

std::vector<GrowthPoint> count_growth(const OrbitBall& ball, std::span<const double> T_grid) {
  for (std::size_t i = 1; i < T_grid.size(); ++i) {
    if (!(T_grid[i] > T_grid[i - 1])) throw DomainError("count_growth requires an increasing grid");
  }
  if (!T_grid.empty() && T_grid.back() > ball.T) {
    throw DomainError("count_growth grid exceeds the enumerated radius");
  }
  std::vector<Wide> norms;
  norms.reserve(ball.size());
  for (const auto& p : ball.elements) norms.push_back(frobenius_norm_sq(p.element));
  std::sort(norms.begin(), norms.end());
  std::vector<GrowthPoint> out;
  for (double T : T_grid) {
    const auto it = std::partition_point(norms.begin(), norms.end(),
                                         [T](Wide n) { return norm_below(n, T); });
    out.push_back({T, static_cast<std::size_t>(it - norms.begin())});
  }
  return out;
}

std::vector<GrowthPoint> count_growth(const GroupPresentation& group, std::span<const double> T_grid,
                                      const EnumerateOptions& options) {
  if (T_grid.empty()) return {};
  const OrbitBall ball = enumerate_ball(group, T_grid.back(), options);
  return count_growth(ball, T_grid);
}

std::size_t ResidueHash::operator()(const Residue& r) const noexcept {
  std::size_t h = std::hash<Int>{}(r.a);
  for (Int v : {r.b, r.c, r.d}) h = h * 1000003u ^ std::hash<Int>{}(v);
  return h;
}

Residue reduce_mod_q(const GroupElement& g, Int q) {
  if (q < 1) throw DomainError("modulus must be >= 1");
  return {positive_mod(g.a(), q), positive_mod(g.b(), q), positive_mod(g.c(), q),
          positive_mod(g.d(), q)};
}

Residue multiply_mod(const Residue& x, const Residue& y, Int q) {
  auto mac = [q](Int p1, Int p2, Int p3, Int p4) {
    return positive_mod(static_cast<Wide>(p1) * p2 + static_cast<Wide>(p3) * p4, q);
  };
  return {mac(x.a, y.a, x.b, y.c), mac(x.a, y.b, x.b, y.d), mac(x.c, y.a, x.d, y.c),
          mac(x.c, y.b, x.d, y.d)};
}

CongruenceContext::CongruenceContext(const GroupPresentation& group, Int q, Int ramification)
    : q_(q) {
  if (q < 1) throw DomainError("modulus must be >= 1");
  if (ramification < 1) throw DomainError("ramification number must be >= 1");
  q_prime_ = std::gcd(q, ramification);
  q_double_prime_ = q / q_prime_;

  std::vector<Residue> gens;
  for (int code = 0; code < group.letter_count(); ++code) {
    gens.push_back(reduce_mod_q(group.letter(code), q));
  }
  const Residue identity = reduce_mod_q(GroupElement{}, q);
  residues_.push_back(identity);
  lookup_.emplace(identity, 0);
  for (std::size_t head = 0; head < residues_.size(); ++head) {
    for (const Residue& g : gens) {
      Residue next = multiply_mod(residues_[head], g, q);
      if (lookup_.emplace(next, residues_.size()).second) residues_.push_back(next);
    }
  }
}

std::size_t CongruenceContext::coset_id(const GroupElement& g) const {
  const auto it = lookup_.find(reduce_mod_q(g, q_));
  if (it == lookup_.end()) {
    throw DomainError(to_string(g) + " does not reduce into the group image mod " +
                      std::to_string(q_));
  }
  return it->second;
}

OrbitBall coset_filter(const OrbitBall& ball, const CongruenceContext& ctx,
                       const GroupElement& gamma0) {
  const Int q = ctx.q();
  const Residue shift = reduce_mod_q(gamma0.inverse(), q);
  const Residue identity = reduce_mod_q(GroupElement{}, q);
  OrbitBall out;
  out.group = ball.group;
  out.T = ball.T;
  out.complete = ball.complete;
  for (const auto& p : ball.elements) {
    if (multiply_mod(shift, reduce_mod_q(p.element, q), q) == identity) out.elements.push_back(p);
  }
  return out;
}

std::vector<std::size_t> coset_counts(const OrbitBall& ball, const CongruenceContext& ctx) {
  std::vector<std::size_t> counts(ctx.index(), 0);
  for (const auto& p : ball.elements) ++counts[ctx.coset_id(p.element)];
  return counts;
}

std::map<RowResidue, std::vector<std::size_t>> stabilizer_filter_row(const OrbitBall& ball, Int q,
                                                                    RowResidue row) {
  if (q < 1) throw DomainError("modulus must be >= 1");
  if (row.first == 0 && row.second == 0) throw DomainError("row vector must be nonzero");
  std::map<RowResidue, std::vector<std::size_t>> cells;
  const Wide c = row.first, d = row.second;
  for (std::size_t i = 0; i < ball.size(); ++i) {
    const GroupElement& g = ball.elements[i].element;
    cells[{positive_mod(c * g.a() + d * g.c(), q), positive_mod(c * g.b() + d * g.d(), q)}]
        .push_back(i);
  }
  return cells;
}

std::uint64_t fnv1a(std::span<const unsigned char> bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char byte : bytes) {
    h ^= byte;
    h *= 1099511628211ULL;
  }
  return h;
}

void save_ball(const OrbitBall& ball, const std::filesystem::path& path) {
  std::string records;
  records.reserve(ball.size() * kRecordBytes);
  for (const auto& p : ball.elements) {
    for (Int v : p.element.entries()) put_u64(records, static_cast<std::uint64_t>(v));
    put_f64(records, p.coords.theta1);
    put_f64(records, p.coords.t);
    put_f64(records, p.coords.theta2);
  }
  const auto* raw = reinterpret_cast<const unsigned char*>(records.data());
  std::string header(kMagic, sizeof kMagic);
  put_u32(header, kVersion);
  put_u32(header, static_cast<std::uint32_t>(ball.group.label.size()));
  header += ball.group.label;
  put_f64(header, ball.T);
  put_u64(header, ball.size());
  put_u64(header, fnv1a({raw, records.size()}));

  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw FormatError("cannot open " + tmp.string() + " for writing");
    os.write(header.data(), static_cast<std::streamsize>(header.size()));
    os.write(records.data(), static_cast<std::streamsize>(records.size()));
    if (!os) throw FormatError("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

OrbitBall load_ball(const std::filesystem::path& path, const GroupPresentation& group) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open orbit cache " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)),
                                   std::istreambuf_iterator<char>());
  const std::size_t fixed = sizeof kMagic + 4 + 4;
  if (bytes.size() < fixed || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw FormatError(path.string() + " is not an orbit cache file");
  }
  const std::uint32_t version = get_u32(bytes.data() + sizeof kMagic);
  if (version != kVersion) {
    throw FormatError("orbit cache version " + std::to_string(version) + " unsupported (expected " +
                      std::to_string(kVersion) + ")");
  }
  const std::uint32_t label_len = get_u32(bytes.data() + sizeof kMagic + 4);
  const std::size_t header_len = fixed + label_len + 8 + 8 + 8;
  if (bytes.size() < header_len) throw FormatError("orbit cache header truncated");
  const std::string label(bytes.begin() + fixed, bytes.begin() + fixed + label_len);
  if (label != group.label) {
    throw FormatError("orbit cache holds group " + label + ", expected " + group.label);
  }
  const unsigned char* p = bytes.data() + fixed + label_len;
  OrbitBall ball;
  ball.group = group;
  ball.T = std::bit_cast<double>(get_u64(p));
  const std::uint64_t count = get_u64(p + 8);
  const std::uint64_t checksum = get_u64(p + 16);
  const std::size_t body = bytes.size() - header_len;
  const std::uint64_t actual = fnv1a({bytes.data() + header_len, body});
  if (actual != checksum || body != count * kRecordBytes) {
    throw FormatError("orbit cache checksum mismatch in " + path.string() +
                      " (truncated or corrupted)");
  }
  ball.elements.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const unsigned char* rec = bytes.data() + header_len + i * kRecordBytes;
    GroupElement g(static_cast<Int>(get_u64(rec)), static_cast<Int>(get_u64(rec + 8)),
                   static_cast<Int>(get_u64(rec + 16)), static_cast<Int>(get_u64(rec + 24)));
    CartanCoords c;
    c.theta1 = std::bit_cast<double>(get_u64(rec + 32));
    c.t = std::bit_cast<double>(get_u64(rec + 40));
    c.theta2 = std::bit_cast<double>(get_u64(rec + 48));
    c.r = std::tanh(c.t / 2);
    c.degenerate = c.t == 0;
    ball.elements.push_back({std::move(g), c});
  }
  ball.complete = true;
  return ball;
}

OrbitCache::OrbitCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::filesystem::path OrbitCache::path_for(const GroupPresentation& group, double T) const {
  std::string key = group.label;
  put_f64(key, T);
  for (const auto& g : group.generators) {
    for (Int v : g.entries()) put_u64(key, static_cast<std::uint64_t>(v));
  }
  const std::uint64_t h = fnv1a({reinterpret_cast<const unsigned char*>(key.data()), key.size()});
  std::ostringstream name;
  name << group.label << "_T" << T << "_" << std::hex << std::setw(16) << std::setfill('0') << h
       << ".orb";
  return dir_ / name.str();
}

OrbitBall OrbitCache::fetch(const GroupPresentation& group, double T,
                            const EnumerateOptions& options) {
  const auto path = path_for(group, T);
  if (std::filesystem::exists(path)) {
    last_hit_ = true;
    return load_ball(path, group);
  }
  last_hit_ = false;
  OrbitBall ball = enumerate_ball(group, T, options);
  save_ball(ball, path);
  return ball;
}

}  // namespace hyperorbit
