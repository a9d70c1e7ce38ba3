#include <catch_amalgamated.hpp>

#include <sciball/hyperbolic.hpp>
#include <sciball/zoo.hpp>

using namespace sciball;

namespace {

  std::int64_t l1(CayleyBall const& b, VertexId u, VertexId v) {
    auto cu = *b.solver().coordinates(b.key(u));
    auto cv = *b.solver().coordinates(b.key(v));
    return std::abs(cu[0] - cv[0]) + std::abs(cu[1] - cv[1]);
  }

  // Slimness defect of (1, x, y) in Z^2 from lattice distances.
  std::int64_t z2_defect(CayleyBall const& b, VertexId x, VertexId y) {
    auto const& s     = b.solver();
    Key         k     = s.multiply(s.key_of(inverse(b.geodesic_word(x))), b.geodesic_word(y));
    auto        side1 = b.geodesic_from_identity(x).vertices;
    auto        side2 = b.geodesic_from_identity(y).vertices;
    auto        side3 = b.trace(x, b.geodesic_word(*b.find(k)))->vertices;
    std::vector<std::vector<VertexId> const*> sides{&side1, &side2, &side3};
    std::int64_t worst = 0;
    for (std::size_t i = 0; i < 3; ++i) {
      for (auto p : *sides[i]) {
        std::int64_t best = std::numeric_limits<std::int64_t>::max();
        for (std::size_t j = 0; j < 3; ++j) {
          if (j == i) {
            continue;
          }
          for (auto u : *sides[j]) {
            best = std::min(best, l1(b, p, u));
          }
        }
        worst = std::max(worst, best);
      }
    }
    return worst;
  }

  // M, c, L and delta as measured on the radius-6 ball, c raised to 1.
  FanParams const kSurfaceParams{12, 1, 1112, 1};

}  // namespace

TEST_CASE("slimness of free groups is zero", "[hyperbolic]") {
  auto b = CayleyBall::build(free_model(2), 6);
  for (std::size_t rho = 1; rho <= 3; ++rho) {
    auto e = estimate_delta(*b, rho);
    CHECK(e.value == 0);
    CHECK(e.mode == "exhaustive");
    CHECK(e.triangles > 0);
  }
  CHECK(estimate_delta_sampled(*b, 3, 500, 9).value == 0);
}

TEST_CASE("Z^2 slimness matches a lattice oracle", "[hyperbolic]") {
  auto b = CayleyBall::build(zd_model(2), 8);
  for (std::size_t rho = 1; rho <= 4; ++rho) {
    auto         e    = estimate_delta(*b, rho);
    std::int64_t best = 0;
    auto const   last = b->layer(rho).second;
    for (VertexId x = 0; x < last; ++x) {
      for (VertexId y = x; y < last; ++y) {
        if (l1(*b, x, y) <= static_cast<std::int64_t>(rho)) {
          best = std::max(best, z2_defect(*b, x, y));
        }
      }
    }
    CHECK(static_cast<std::int64_t>(e.value) == best);
  }
  auto t = delta_table(*b, 1, 4);
  for (std::size_t i = 1; i < t.samples.size(); ++i) {
    CHECK(t.samples[i].value >= t.samples[i - 1].value);
  }
  CHECK(t.samples.back().value > 0);
}

TEST_CASE("sampled slimness is bounded by the exhaustive value", "[hyperbolic]") {
  auto b  = CayleyBall::build(zd_model(2), 8);
  auto ex = estimate_delta(*b, 8);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto sm = estimate_delta_sampled(*b, 4, 300, seed);
    CHECK(sm.value <= ex.value);
    CHECK(sm.triangles + sm.skipped == 300);
  }
  auto a = estimate_delta_sampled(*b, 4, 300, 3);
  auto c = estimate_delta_sampled(*b, 4, 300, 3);
  CHECK(a.value == c.value);
  CHECK(a.x == c.x);
  CHECK_THROWS_AS(estimate_delta(*b, 9), PreconditionError);
  CHECK_THROWS_AS(estimate_delta_sampled(*b, 4, 0, 1), PreconditionError);
  auto j = to_json(a, *b);
  CHECK(j["mode"] == "sampled");
  CHECK(j["seed"] == 3);
}

TEST_CASE("ray constant", "[hyperbolic]") {
  auto z2 = CayleyBall::build(zd_model(2), 8);
  auto rc = ray_constant(*z2, 2);
  CHECK(rc.value == 0);
  CHECK(rc.ray_set_size == z2->size());
  auto ll = CayleyBall::build(lamplighter_model(), 9);
  auto rl = ray_constant(*ll, 2);
  CHECK(rl.value > 0);
  CHECK(rl.ray_set_size < ll->size());
  CHECK(ll->dist(rl.witness) <= 7);
  CHECK_THROWS_AS(ray_constant(*z2, 8), PreconditionError);
}

TEST_CASE("complement paths are sound", "[hyperbolic]") {
  auto b   = CayleyBall::build(zd_model(3), 6);
  auto rep = cp_table(*b, 4, 1, 3);
  CHECK(rep.failures.empty());
  CHECK(rep.pairs > 0);
  BallSearch  s(*b);
  auto        pts   = b->sphere(3);
  std::size_t pairs = 0;
  std::size_t L     = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i; j < pts.size(); ++j) {
      auto d = group_distance(*b, pts[i], pts[j]);
      if (!d || *d > 4) {
        continue;
      }
      ++pairs;
      auto p = cp_path(*b, s, pts[i], pts[j], 3, 1);
      REQUIRE(p);
      CHECK(p->front() == pts[i]);
      CHECK(p->back() == pts[j]);
      CHECK(p->length() >= *d);
      for (auto v : p->vertices) {
        CHECK(b->dist(v) > 2);
      }
      auto t = b->trace(pts[i], p->letters);
      REQUIRE(t);
      CHECK(t->vertices == p->vertices);
      L = std::max(L, p->length());
    }
  }
  CHECK(pairs == rep.pairs);
  CHECK(L == rep.L);
  CHECK_THROWS_AS(cp_table(*b, 4, 3, 3), PreconditionError);
  CHECK_THROWS_AS(cp_table(*b, 4, 1, 6), PreconditionError);

  auto f  = CayleyBall::build(free_model(2), 5);
  auto fr = cp_table(*f, 4, 1, 3);
  CHECK_FALSE(fr.failures.empty());
  auto t = cp_growth_table(*f, 4, 1, 2, 3);
  for (auto const& x : t.samples) {
    CHECK(x.mode == SampleMode::lower_bound);
  }
}

TEST_CASE("fan construction preconditions", "[hyperbolic][fan]") {
  auto b  = CayleyBall::build(surface2_model(), 5);
  auto c2 = make_complex(b);
  auto p  = b->sphere(3).front();
  auto q  = b->neighbor(p, 0);
  CHECK_THROWS_AS(build_fan(*c2, p, p, 1, kSurfaceParams), PreconditionError);
  CHECK_THROWS_AS(build_fan(*c2, p, b->sphere(3).back(), 1, kSurfaceParams), PreconditionError);
  CHECK_THROWS_AS(build_fan(*c2, p, q, 1, FanParams{11, 1, 1112, 1}), PreconditionError);
  CHECK_THROWS_AS(build_fan(*c2, p, q, 1, FanParams{12, 1, 6, 1}), PreconditionError);
  CHECK_THROWS_AS(build_fan(*c2, p, q, 1, FanParams{12, 0, 1112, 1}), PreconditionError);
  CHECK_THROWS_AS(build_fan(*c2, p, q, 2, kSurfaceParams), PreconditionError);
  auto f  = CayleyBall::build(free_model(2), 5);
  auto fc = make_complex(f);
  auto fp = f->sphere(3).front();
  CHECK_THROWS_AS(build_fan(*fc, fp, f->neighbor(fp, 2), 1, kSurfaceParams), PreconditionError);
}

TEST_CASE("fans on surface2", "[hyperbolic][fan]") {
  auto b    = CayleyBall::build(surface2_model(), 6);
  auto c2   = make_complex(b);
  auto scan = first_fan_edge(*c2, 3, 1, kSurfaceParams);
  REQUIRE(scan.edge);
  auto [p, q] = *scan.edge;
  CHECK(b->dist(p) == 3);

  auto fan0 = build_fan(*c2, p, q, 0, kSurfaceParams);
  CHECK(fan0.levels.size() == 1);
  CHECK(fan0.cells.empty());
  CHECK(is_closed(*b, fan_loop(*b, fan0, 0)));

  auto fan = build_fan(*c2, p, q, 1, kSurfaceParams);
  REQUIRE(fan.levels.size() == 2);
  CHECK(fan.levels_outside);
  CHECK(fan.marks_close);
  CHECK(fan.cells_short);
  CHECK(fan.cells_outside);
  for (std::size_t i = 0; i < fan.levels.size(); ++i) {
    auto const& lv = fan.levels[i];
    CHECK(lv.radius == 3 + i);
    CHECK(lv.marks.front() == 0);
    CHECK(lv.marks.back() == lv.f.letters.size());
    CHECK(lv.f.front() == fan.rays[lv.rays.front()].vertices[lv.radius]);
    CHECK(lv.f.back() == fan.rays[lv.rays.back()].vertices[lv.radius]);
    CHECK(is_closed(*b, fan_loop(*b, fan, i)));
  }
  for (auto const& cell : fan.cells) {
    CHECK(is_closed(*b, cell.loop));
    CHECK(cell.min_dist == loop_min_dist(*b, cell.loop));
  }
  CHECK_THROWS_AS(fan.phi(2), PreconditionError);

  auto none = verify_fan_filling(*c2, fan, 1, FillBudget{0, 0});
  CHECK(none.chain_ok);
  CHECK(none.verdict == "unknown");

  auto v = verify_fan_filling(*c2, fan, 1);
  CHECK(v.chain_ok);
  CHECK(v.verdict == "filled");
  CHECK(v.phi0.replayed);
  for (auto const& res : v.cells) {
    CHECK(res.replayed);
  }
  CHECK_THROWS_AS(verify_fan_filling(*c2, fan, 2), PreconditionError);
  auto j = to_json(fan, *b, &v);
  CHECK(j.is_object());
}
