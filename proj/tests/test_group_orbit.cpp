#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include "brute_force.hpp"
#include "hyperorbit/error.hpp"
#include "hyperorbit/group_orbit.hpp"

using namespace hyperorbit;
namespace fs = std::filesystem;

namespace {

std::vector<brute::M> entries_of(const OrbitBall& ball) {
  std::vector<brute::M> out;
  for (const auto& p : ball.elements) {
    const auto e = p.element.entries();
    out.push_back({e[0], e[1], e[2], e[3]});
  }
  std::sort(out.begin(), out.end());
  return out;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("hyperorbit_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("gamma_c presentation") {
  const GroupPresentation g4 = gamma_c(4);
  REQUIRE(g4.generators.size() == 2);
  CHECK(g4.generators[0] == GroupElement(1, 4, 0, 1));
  CHECK(g4.generators[1] == GroupElement(1, 0, 4, 1));
  CHECK_NOTHROW(g4.validate());
  GroupPresentation bad;
  bad.label = "bad";
  bad.generators = {GroupElement(1, 4, 0, 1), GroupElement(1, -4, 0, 1)};
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("small balls") {
  const GroupPresentation g4 = gamma_c(4);
  const OrbitBall b2 = enumerate_ball(g4, 2);
  CHECK(b2.complete);
  REQUIRE(b2.size() == 1);
  CHECK(b2.elements[0].element.is_identity());
  const OrbitBall b5 = enumerate_ball(g4, 5);
  CHECK(b5.size() == 5);
  const std::vector<double> grid = {2};
  const auto growth = count_growth(g4, grid);
  REQUIRE(growth.size() == 1);
  CHECK(growth[0].count == 1);
}

TEST_CASE("pruned enumeration matches the unpruned reference") {
  for (int c : {3, 4, 6}) {
    for (long long T : {10LL, 57LL, 100LL}) {
      CAPTURE(c);
      CAPTURE(T);
      const OrbitBall ball = enumerate_ball(gamma_c(c), static_cast<double>(T));
      CHECK(entries_of(ball) == brute::ball(c, T));
    }
  }
}

TEST_CASE("ball invariants") {
  const OrbitBall ball = enumerate_ball(gamma_c(4), 300);
  std::vector<std::array<Int, 4>> keys;
  for (const auto& p : ball.elements) {
    CHECK(norm_below(frobenius_norm_sq(p.element), 300));
    keys.push_back(p.element.canonical_key());
  }
  std::sort(keys.begin(), keys.end());
  CHECK(std::adjacent_find(keys.begin(), keys.end()) == keys.end());
  const auto all = entries_of(ball);
  for (const auto& p : ball.elements) {
    const auto inv = p.element.inverse().entries();
    CHECK(std::binary_search(all.begin(), all.end(), brute::M{inv[0], inv[1], inv[2], inv[3]}));
  }
}

TEST_CASE("thread count does not change the ball") {
  EnumerateOptions one;
  EnumerateOptions four;
  four.threads = 4;
  const OrbitBall a = enumerate_ball(gamma_c(4), 2000, one);
  const OrbitBall b = enumerate_ball(gamma_c(4), 2000, four);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.elements[i].element == b.elements[i].element);
}

TEST_CASE("non-free input is rejected") {
  GroupPresentation sl2;
  sl2.label = "SL2Z";
  sl2.generators = {GroupElement(1, 1, 0, 1), GroupElement(1, 0, 1, 1)};
  CHECK_THROWS_AS(enumerate_ball(sl2, 30), NonFreeGroupError);
}

TEST_CASE("count growth is monotone") {
  const std::vector<double> grid = {10, 20, 50, 100, 200, 500};
  const auto growth = count_growth(gamma_c(4), grid);
  for (std::size_t i = 1; i < growth.size(); ++i) CHECK(growth[i].count >= growth[i - 1].count);
}

TEST_CASE("reduction mod q") {
  CHECK(reduce_mod_q(GroupElement::identity(), 3) == Residue{1, 0, 0, 1});
  CHECK(reduce_mod_q(GroupElement(1, 4, 0, 1), 4) == Residue{1, 0, 0, 1});
  CHECK(reduce_mod_q(GroupElement(1, -4, 0, 1), 3) == Residue{1, 2, 0, 1});
  std::mt19937_64 rng(5);
  const OrbitBall ball = enumerate_ball(gamma_c(4), 500);
  std::uniform_int_distribution<std::size_t> pick(0, ball.size() - 1);
  for (int i = 0; i < 1000; ++i) {
    const GroupElement& g = ball.elements[pick(rng)].element;
    const GroupElement& h = ball.elements[pick(rng)].element;
    CHECK(reduce_mod_q(compose(g, h), 5) == multiply_mod(reduce_mod_q(g, 5), reduce_mod_q(h, 5), 5));
  }
}

TEST_CASE("congruence index is the order of the mod-q image") {
  // Gamma_4 mod 3: the two unipotents generate SL(2, Z/3), of order 24.
  CHECK(CongruenceContext(gamma_c(4), 3).index() == 24);
  // Both generators are the identity mod 4 and mod 2.
  CHECK(CongruenceContext(gamma_c(4), 4, 4).index() == 1);
  CHECK(CongruenceContext(gamma_c(4), 2, 4).index() == 1);
  // SL(2, Z/5) has order 120.
  CHECK(CongruenceContext(gamma_c(4), 5).index() == 120);
  const CongruenceContext ctx(gamma_c(4), 12, 4);
  CHECK(ctx.q_prime() == 4);
  CHECK(ctx.q_double_prime() == 3);
}

TEST_CASE("coset filters") {
  const OrbitBall ball = enumerate_ball(gamma_c(4), 100);
  const CongruenceContext trivial(gamma_c(4), 1);
  CHECK(coset_filter(ball, trivial, GroupElement::identity()).size() == ball.size());
  const CongruenceContext mod4(gamma_c(4), 4, 4);
  CHECK(coset_filter(ball, mod4, GroupElement::identity()).size() == ball.size());

  const CongruenceContext mod3(gamma_c(4), 3);
  std::size_t brute_count = 0;
  for (const auto& p : ball.elements) {
    const auto e = p.element.entries();
    auto m3 = [](Int x) { return ((x % 3) + 3) % 3; };
    if (m3(e[0]) == 1 && m3(e[1]) == 0 && m3(e[2]) == 0 && m3(e[3]) == 1) ++brute_count;
  }
  CHECK(coset_filter(ball, mod3, GroupElement::identity()).size() == brute_count);

  const auto counts = coset_counts(ball, mod3);
  CHECK(counts.size() == 24);
  std::size_t total = 0;
  for (auto n : counts) total += n;
  CHECK(total == ball.size());
}

TEST_CASE("row partitions") {
  const OrbitBall ball = enumerate_ball(gamma_c(4), 300);
  CHECK(stabilizer_filter_row(ball, 1, {0, 1}).size() == 1);
  const auto mod2 = stabilizer_filter_row(ball, 2, {1, 0});
  REQUIRE(mod2.size() == 1);
  CHECK(mod2.begin()->first == RowResidue{1, 0});
  const auto mod5 = stabilizer_filter_row(ball, 5, {2, 3});
  std::size_t total = 0;
  for (const auto& [row, idx] : mod5) total += idx.size();
  CHECK(total == ball.size());
}

TEST_CASE("orbit cache round trip") {
  const fs::path dir = scratch_dir("cache");
  const OrbitBall ball = enumerate_ball(gamma_c(4), 1000);
  const fs::path file = dir / "ball.bin";
  save_ball(ball, file);
  const OrbitBall back = load_ball(file, gamma_c(4));
  CHECK(back.complete);
  CHECK(back.T == ball.T);
  REQUIRE(back.size() == ball.size());
  for (std::size_t i = 0; i < ball.size(); ++i) {
    CHECK(back.elements[i].element == ball.elements[i].element);
    CHECK(back.elements[i].coords.theta1 == ball.elements[i].coords.theta1);
    CHECK(back.elements[i].coords.t == ball.elements[i].coords.t);
    CHECK(back.elements[i].coords.theta2 == ball.elements[i].coords.theta2);
  }

  CHECK_THROWS_AS(load_ball(file, gamma_c(3)), FormatError);

  const auto size = fs::file_size(file);
  fs::resize_file(file, size - 9);
  CHECK_THROWS_AS(load_ball(file, gamma_c(4)), FormatError);

  OrbitCache cache(dir / "cache");
  const OrbitBall first = cache.fetch(gamma_c(4), 1000);
  CHECK_FALSE(cache.last_fetch_was_hit());
  const OrbitBall second = cache.fetch(gamma_c(4), 1000);
  CHECK(cache.last_fetch_was_hit());
  REQUIRE(first.size() == second.size());
  for (std::size_t i = 0; i < first.size(); ++i) CHECK(first.elements[i].element == second.elements[i].element);
  fs::remove_all(dir);
}

TEST_CASE("corrupted cache payload fails the checksum") {
  const fs::path dir = scratch_dir("corrupt");
  const fs::path file = dir / "ball.bin";
  save_ball(enumerate_ball(gamma_c(4), 200), file);
  {
    std::fstream f(file, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(-5, std::ios::end);
    f.put('\x5a');
  }
  CHECK_THROWS_AS(load_ball(file, gamma_c(4)), FormatError);
  fs::remove_all(dir);
}
