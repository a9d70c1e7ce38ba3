#include <catch_amalgamated.hpp>

#include <map>
#include <random>
#include <sstream>

#include <sciball/cayley.hpp>
#include <sciball/zoo.hpp>

#include "generators.hpp"

using namespace sciball;

namespace {

  std::vector<std::size_t> sphere_sizes(CayleyBall const& b) {
    std::vector<std::size_t> out;
    for (std::size_t r = 0; r <= b.radius(); ++r) {
      out.push_back(b.sphere(r).size());
    }
    return out;
  }

  std::int64_t l1(std::vector<std::int64_t> const& c) {
    std::int64_t s = 0;
    for (auto x : c) {
      s += std::abs(x);
    }
    return s;
  }

}  // namespace

TEST_CASE("sphere sizes of standard groups", "[cayley]") {
  auto z2 = CayleyBall::build(zd_model(2), 12);
  for (std::size_t r = 1; r <= 12; ++r) {
    CHECK(z2->sphere(r).size() == 4 * r);
  }
  auto z3 = CayleyBall::build(zd_model(3), 8);
  for (std::size_t r = 1; r <= 8; ++r) {
    CHECK(z3->sphere(r).size() == 4 * r * r + 2);
  }
  auto f2 = CayleyBall::build(free_model(2), 7);
  std::size_t expect = 4;
  for (std::size_t r = 1; r <= 7; ++r, expect *= 3) {
    CHECK(f2->sphere(r).size() == expect);
  }
  // Free growth up to radius 3; at radius 4 the eight elements that are half
  // of a relator translate get a second geodesic.
  auto s2 = CayleyBall::build(surface2_model(), 4);
  CHECK(sphere_sizes(*s2) == std::vector<std::size_t>{1, 8, 56, 392, 8 * 343 - 8});
  CHECK(z2->sphere(0) == std::vector<VertexId>{CayleyBall::identity()});
}

TEST_CASE("ball structure invariants", "[cayley]") {
  for (auto const& name : {"Zd:2", "Zd:2+diag", "free:2", "surface2", "racg:pentagon", "bs12",
                           "lamplighter", "trefoil_amalgam"}) {
    auto b = CayleyBall::build(zoo_group(name), 5);
    INFO(name);
    REQUIRE(b->radius() == 5);
    std::map<Key, VertexId> seen;
    for (VertexId v = 0; v < b->size(); ++v) {
      CHECK(seen.emplace(b->key(v), v).second);
      CHECK(b->find(b->key(v)) == v);
      Word g = b->geodesic_word(v);
      CHECK(g.size() == b->dist(v));
      CHECK(b->solver().key_of(g) == b->key(v));
      if (v > 0) {
        CHECK(shortlex_less(b->geodesic_word(v - 1), g));
        CHECK(b->dist(b->parent(v)) + 1 == b->dist(v));
        CHECK(b->neighbor(b->parent(v), b->parent_letter(v)) == v);
      }
      for (std::size_t l = 0; l < b->num_letters(); ++l) {
        auto     letter = static_cast<Letter>(l);
        VertexId u      = b->neighbor(v, letter);
        if (u == kNoVertex) {
          CHECK(b->dist(v) == b->radius());
          continue;
        }
        CHECK(b->neighbor(u, inverse(letter)) == v);
        CHECK(b->key(u) == b->solver().multiply(b->key(v), letter));
        auto du = static_cast<long>(b->dist(u));
        auto dv = static_cast<long>(b->dist(v));
        CHECK(std::abs(du - dv) <= 1);
      }
      CHECK(b->key(b->inverse_vertex(v)) == b->solver().key_of(inverse(g)));
    }
  }
}

TEST_CASE("walk, trace and vertex lookup", "[cayley]") {
  auto            b = CayleyBall::build(surface2_model(), 4);
  std::mt19937_64 rng(31);
  for (int i = 0; i < 500; ++i) {
    Word w = gen::random_word(rng, 8, gen::uniform(rng, 0, 6));
    auto v = b->vertex_of(w);
    auto p = b->trace(CayleyBall::identity(), w);
    if (p) {
      REQUIRE(v);
      CHECK(p->back() == *v);
      CHECK(p->letters == w);
      CHECK(p->vertices.size() == w.size() + 1);
      CHECK(b->dist(*v) <= free_reduce(w).size());
    }
  }
}

TEST_CASE("closed-form lengths match breadth-first distance", "[cayley]") {
  for (auto const& [name, R] : std::vector<std::pair<std::string, std::size_t>>{
           {"Zd:2+diag", 9}, {"Zd:3", 7}, {"free:2", 7}, {"lamplighter", 8}, {"racg:pentagon", 6},
           {"surface2", 4}}) {
    auto b = CayleyBall::build(zoo_group(name), R);
    INFO(name);
    for (VertexId v = 0; v < b->size(); ++v) {
      auto len = b->solver().length(b->key(v));
      REQUIRE(len);
      CHECK(*len == b->dist(v));
    }
  }
}

TEST_CASE("group and pair distances", "[cayley]") {
  auto            b = CayleyBall::build(zd_model(2), 8);
  std::mt19937_64 rng(32);
  for (int i = 0; i < 300; ++i) {
    auto u  = static_cast<VertexId>(gen::uniform(rng, 0, b->size() - 1));
    auto v  = static_cast<VertexId>(gen::uniform(rng, 0, b->size() - 1));
    auto cu = *b->solver().coordinates(b->key(u));
    auto cv = *b->solver().coordinates(b->key(v));
    std::int64_t d = std::abs(cu[0] - cv[0]) + std::abs(cu[1] - cv[1]);
    CHECK(group_distance(*b, u, v) == static_cast<std::size_t>(d));
    auto pd = pair_distance(*b, u, v);
    CHECK(pd.value >= static_cast<std::size_t>(d));
    if (pd.exact) {
      CHECK(pd.value == static_cast<std::size_t>(d));
    }
  }
  auto f = CayleyBall::build(free_model(2), 4);
  auto x = *f->vertex_of(Word{0, 0, 0, 0});
  auto y = *f->vertex_of(Word{2, 2, 2, 2});
  CHECK(group_distance(*f, x, y) == 8);
  CHECK(pair_distance(*f, x, y).value == 8);
  CHECK(pair_distance(*f, x, y).exact == false);
  CHECK_THROWS_AS(pair_distance(*f, x, static_cast<VertexId>(f->size())), PreconditionError);
  auto bs = CayleyBall::build(bs12_model(), 4);
  CHECK(group_distance(*bs, *bs->vertex_of(Word{2, 2, 2, 2}), *bs->vertex_of(Word{3, 3, 3, 3}))
        == std::nullopt);
}

TEST_CASE("geodesic segments through a vertex", "[cayley]") {
  auto            b = CayleyBall::build(surface2_model(), 6);
  std::mt19937_64 rng(33);
  auto            near = b->layer(2);
  for (int i = 0; i < 30; ++i) {
    auto v   = static_cast<VertexId>(gen::uniform(rng, 0, near.second - 1));
    auto n   = 6 - b->dist(v);
    auto seg = geodesic_through(*b, v, n);
    CHECK(seg.length() >= n);
    CHECK(seg.length() <= 2 * n);
    CHECK(std::find(seg.vertices.begin(), seg.vertices.end(), v) != seg.vertices.end());
    auto traced = b->trace(seg.front(), seg.letters);
    REQUIRE(traced);
    CHECK(traced->vertices == seg.vertices);
    CHECK(group_distance(*b, seg.front(), seg.back()) == seg.length());
  }
  CHECK_THROWS_AS(geodesic_through(*b, b->sphere(6).front(), 1), PreconditionError);
}

TEST_CASE("relator cells in the ball", "[cayley]") {
  auto b  = CayleyBall::build(zd_model(2), 4);
  auto cx = make_complex(b);
  // Unit squares with all four corners at L1 norm <= 4.
  std::size_t expect = 0;
  for (int x = -4; x <= 4; ++x) {
    for (int y = -4; y <= 4; ++y) {
      if (l1({x, y}) <= 4 && l1({x + 1, y}) <= 4 && l1({x, y + 1}) <= 4 && l1({x + 1, y + 1}) <= 4) {
        ++expect;
      }
    }
  }
  CHECK(cx->cells().size() == expect);
  for (auto const& c : cx->cells()) {
    auto p = cx->boundary(c);
    CHECK(p.front() == c.base);
    CHECK(p.back() == c.base);
    CHECK(p.length() == 4);
  }

  // A periodic relator gives one cell per translate: one bigon per edge.
  auto        rc  = CayleyBall::build(zoo_group("racg:pentagon"), 3);
  auto        rcx = make_complex(rc);
  std::size_t bigons = 0;
  for (auto const& c : rcx->cells()) {
    bigons += rcx->relators()[c.relator].size() == 2;
  }
  std::size_t half_edges = 0;
  for (VertexId v = 0; v < rc->size(); ++v) {
    for (std::size_t g = 0; g < 5; ++g) {
      half_edges += rc->neighbor(v, letter_of(g)) != kNoVertex;
    }
  }
  CHECK(bigons * 2 == half_edges);
}

TEST_CASE("text export is deterministic", "[cayley]") {
  std::ostringstream a;
  std::ostringstream b;
  write_ball_text(a, *CayleyBall::build(surface2_model(), 3));
  write_ball_text(b, *CayleyBall::build(surface2_model(), 3));
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("# model surface2 radius 3 vertices 457\n0 1 0 a:1", 0) == 0);
}

TEST_CASE("ball budget", "[cayley]") {
  CHECK_THROWS_AS(CayleyBall::build(free_model(2), 10, 1000), BudgetExceeded);
  auto t = CayleyBall::build(free_model(2), 10, 1000, true);
  CHECK(t->radius() == 5);
  CHECK(t->size() == 485);
  CHECK_THROWS_AS(make_complex(CayleyBall::build(lamplighter_model(), 2)), PreconditionError);
}
