#include <catch_amalgamated.hpp>

#include <deque>
#include <map>
#include <numeric>
#include <sstream>

#include <sciball/ends.hpp>
#include <sciball/growth.hpp>
#include <sciball/zoo.hpp>

using namespace sciball;

namespace {

  using Point = std::vector<std::int64_t>;

  std::int64_t norm(Point const& p) {
    std::int64_t s = 0;
    for (auto x : p) {
      s += std::abs(x);
    }
    return s;
  }

  // Union-find over lattice points of Z^d with r < |x|_1 <= w.
  std::size_t lattice_components(std::size_t d, std::int64_t r, std::int64_t w) {
    std::vector<Point> pts;
    Point              p(d, -w);
    while (true) {
      auto n = norm(p);
      if (n > r && n <= w) {
        pts.push_back(p);
      }
      std::size_t i = 0;
      while (i < d && p[i] == w) {
        p[i++] = -w;
      }
      if (i == d) {
        break;
      }
      ++p[i];
    }
    std::map<Point, std::size_t> index;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      index[pts[i]] = i;
    }
    std::vector<std::size_t> parent(pts.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
      while (parent[x] != x) {
        x = parent[x] = parent[parent[x]];
      }
      return x;
    };
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t k = 0; k < d; ++k) {
        Point q = pts[i];
        ++q[k];
        if (auto it = index.find(q); it != index.end()) {
          parent[find(i)] = find(it->second);
        }
      }
    }
    std::size_t roots = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      roots += find(i) == i;
    }
    return roots;
  }

  // Independent breadth-first escape depth inside B(d + 1).
  std::optional<std::size_t> escape_depth(CayleyBall const& b, VertexId v) {
    std::size_t const         d = b.dist(v);
    std::map<VertexId, std::size_t> seen{{v, 0}};
    std::deque<VertexId>      q{v};
    while (!q.empty()) {
      VertexId x = q.front();
      q.pop_front();
      if (b.dist(x) > d) {
        return seen[x];
      }
      for (std::size_t l = 0; l < b.num_letters(); ++l) {
        VertexId y = b.neighbor(x, static_cast<Letter>(l));
        if (y != kNoVertex && b.dist(y) <= d + 1 && seen.emplace(y, seen[x] + 1).second) {
          q.push_back(y);
        }
      }
    }
    return std::nullopt;
  }

}  // namespace

TEST_CASE("complement components match a lattice oracle", "[ends]") {
  auto z2 = CayleyBall::build(zd_model(2), 10);
  for (std::size_t r = 0; r < 10; ++r) {
    for (std::size_t w = r + 1; w <= 10; ++w) {
      auto cs = complement_components(*z2, r, w);
      CHECK(cs.components.size() == lattice_components(2, static_cast<std::int64_t>(r),
                                                       static_cast<std::int64_t>(w)));
    }
  }
  auto z3 = CayleyBall::build(zd_model(3), 6);
  for (std::size_t r = 0; r < 6; ++r) {
    auto cs = complement_components(*z3, r);
    CHECK(cs.components.size() == lattice_components(3, static_cast<std::int64_t>(r), 6));
    CHECK(cs.boundary_count() == cs.components.size());
  }
}

TEST_CASE("complement components partition the annulus", "[ends]") {
  auto b  = CayleyBall::build(surface2_model(), 5);
  auto cs = complement_components(*b, 2);
  std::vector<VertexId> all;
  for (std::size_t i = 0; i < cs.components.size(); ++i) {
    auto const& c = cs.components[i];
    CHECK(std::is_sorted(c.begin(), c.end()));
    if (i > 0) {
      CHECK(cs.components[i - 1].front() < c.front());
    }
    all.insert(all.end(), c.begin(), c.end());
  }
  std::sort(all.begin(), all.end());
  CHECK(all.size() == b->layer(5).second - b->layer(3).first);
  CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());
  CHECK_THROWS_AS(complement_components(*b, 5), PreconditionError);
  CHECK_THROWS_AS(complement_components(*b, 1, 6), PreconditionError);
}

TEST_CASE("free group complements split into subtrees", "[ends]") {
  auto        b      = CayleyBall::build(free_model(2), 7);
  std::size_t expect = 4;
  for (std::size_t r = 0; r < 7; ++r) {
    auto cs = complement_components(*b, r);
    CHECK(cs.components.size() == expect);
    CHECK(cs.boundary_count() == cs.components.size());
    expect *= 3;
  }
  auto t = end_depth_table(free_model(2), 3);
  for (auto const& s : t.samples) {
    CHECK(s.mode == SampleMode::lower_bound);
  }
}

TEST_CASE("Z^2 end depth is r", "[ends]") {
  auto t = end_depth_table(zd_model(2), 8);
  REQUIRE(t.samples.size() == 9);
  for (auto const& s : t.samples) {
    CHECK(s.value == static_cast<std::int64_t>(s.r));
    CHECK(s.mode == SampleMode::exact);
    CHECK(s.window == 2 * s.r + 2);
  }
  CHECK(end_depth_window(5, {5, 2}) == 15);
  CHECK_THROWS_AS(end_depth_table(zd_model(2), 3, {3, 2}), PreconditionError);
  auto b = CayleyBall::build(zd_model(2), 6);
  CHECK_THROWS_AS(end_depth_sample(*b, 3, {2, 1}), PreconditionError);
}

TEST_CASE("dead ends", "[ends]") {
  auto b  = CayleyBall::build(lamplighter_model(), 9);
  auto de = dead_ends(*b);
  REQUIRE_FALSE(de.empty());
  std::size_t deepest = 0;
  for (auto const& e : de) {
    CHECK(e.dist == b->dist(e.vertex));
    CHECK(e.dist < b->radius());
    for (std::size_t l = 0; l < b->num_letters(); ++l) {
      CHECK(b->dist(b->neighbor(e.vertex, static_cast<Letter>(l))) <= e.dist);
    }
    CHECK(escape_depth(*b, e.vertex) == e.depth);
    CHECK(e.depth >= 2);
    deepest = std::max(deepest, e.depth);
  }
  CHECK(deepest == 3);
  CHECK(dead_ends(*CayleyBall::build(zd_model(2), 8)).empty());
  CHECK(dead_ends(*CayleyBall::build(free_model(2), 6)).empty());
  CHECK(dead_ends(*CayleyBall::build(lamplighter_model(), 0)).empty());
}

TEST_CASE("growth table CSV round trip", "[growth]") {
  GrowthTable t;
  t.kind = GrowthKind::sci;
  t.add({3, 4, SampleMode::interval, 4, 7, 10});
  t.add({1, 1, SampleMode::exact, 1, std::nullopt, 6});
  t.add({2, 2, SampleMode::lower_bound, 2, std::nullopt, 8});
  t.add({4, 6, SampleMode::interval, 6, std::nullopt, 12});
  std::ostringstream os;
  os << "# sciball test\n";
  write_csv(os, t);
  os << "\n# trailing comment\n";
  std::istringstream is(os.str());
  auto               back = read_csv(is, GrowthKind::sci);
  CHECK(back.samples == t.samples);
  CHECK(t.samples.front().r == 1);
  CHECK(sample_value_string(t.samples.back()) == "6..inf");

  std::istringstream bad("r,value,mode,window_R\n1,2,exact\n");
  CHECK_THROWS_AS(read_csv(bad, GrowthKind::sci), ParseError);
  std::istringstream bad_num("1,x,exact,4\n");
  CHECK_THROWS_AS(read_csv(bad_num, GrowthKind::sci), ParseError);
  CHECK_THROWS_AS(t.add({5, 9, SampleMode::interval, 9, 3, 0}), PreconditionError);

  auto j = to_json(t);
  CHECK(j["kind"] == "sci");
  CHECK(j["samples"][3]["hi"].is_null());
  CHECK(j["samples"][2]["hi"] == 7);
}

TEST_CASE("rationals", "[growth]") {
  CHECK(parse_rational("5/2") == Rational{5, 2});
  CHECK(parse_rational("-3") == Rational{-3, 1});
  CHECK(parse_rational("5/2").str() == "5/2");
  for (auto s : {"", "2/", "/3", "2/0", "2/-1", "1.5", "x"}) {
    CHECK_THROWS_AS(parse_rational(s), PreconditionError);
  }
}

TEST_CASE("rough equivalence witnesses", "[growth]") {
  auto f = end_depth_table(zd_model(2), 8);
  auto g = end_depth_table(zd_model(2, true), 8);
  auto w = rough_equiv(f, g);
  REQUIRE(w);
  CHECK(w->r_first == 0);
  CHECK(w->r_last == 8);
  for (auto const& s : g.samples) {
    double x  = static_cast<double>(s.r);
    double gx = static_cast<double>(s.value);
    // f(x) = x on its sampled range.
    CHECK(w->c1.value() * (w->c2.value() * x) + w->c3.value() <= gx + 1e-9);
    CHECK(gx <= w->C1.value() * (w->C2.value() * x) + w->C3.value() + 1e-9);
  }
  auto self = rough_equiv(f, f);
  REQUIRE(self);
  CHECK(self->c1 == Rational{1, 1});
  CHECK(self->c3 == Rational{0, 1});

  GrowthTable other = f;
  other.kind        = GrowthKind::sci;
  CHECK_THROWS_AS(rough_equiv(f, other), PreconditionError);
  GrowthTable tiny;
  tiny.add({0, 0, SampleMode::exact, 0, std::nullopt, 2});
  CHECK_THROWS_AS(rough_equiv(tiny, tiny), PreconditionError);

  GrowthTable steep;
  for (std::size_t r = 0; r <= 8; ++r) {
    auto v = static_cast<std::int64_t>(r * r * r);
    steep.add({r, v, SampleMode::exact, v, std::nullopt, 0});
  }
  CHECK_FALSE(rough_equiv(f, steep, 2));
}
