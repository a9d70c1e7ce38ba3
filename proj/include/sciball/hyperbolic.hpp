#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cayley.hpp"
#include "error.hpp"
#include "filling.hpp"
#include "growth.hpp"
#include "loop.hpp"
#include "parallel.hpp"
#include "rays.hpp"
#include "word.hpp"

namespace sciball {

  struct DeltaEstimate {
    std::size_t value = 0;
    //! "exhaustive" or "sampled".
    std::string mode;
    std::size_t rho       = 0;
    std::size_t count     = 0;
    std::uint64_t seed    = 0;
    std::size_t triangles = 0;
    //! Triangles whose third side leaves the ball.
    std::size_t skipped   = 0;
    //! Triangle (1, x, y) attaining the value.
    VertexId    x = 0;
    VertexId    y = 0;
  };

  namespace detail {

    //! Multi-source search that stops once every target has been reached.
    class TargetSearch {
     public:
      explicit TargetSearch(CayleyBall const& b) : b_(b), dist_(b.size(), kUnreached), mark_(b.size(), 0) {}

      //! Greatest distance from `sources` to a vertex of `targets`.
      std::size_t farthest(std::vector<VertexId> const& sources, std::vector<VertexId> const& targets) {
        ++stamp_;
        std::size_t left = 0;
        for (auto t : targets) {
          if (mark_[t] != stamp_) {
            mark_[t] = stamp_;
            ++left;
          }
        }
        for (auto v : order_) {
          dist_[v] = kUnreached;
        }
        order_.clear();
        std::size_t worst = 0;
        auto        visit = [&](VertexId v, std::int32_t d) {
          dist_[v] = d;
          order_.push_back(v);
          if (mark_[v] == stamp_) {
            mark_[v] = 0;
            --left;
            worst = std::max(worst, static_cast<std::size_t>(d));
          }
        };
        for (auto s : sources) {
          if (dist_[s] == kUnreached) {
            visit(s, 0);
          }
        }
        for (std::size_t head = 0; head < order_.size() && left > 0; ++head) {
          VertexId v = order_[head];
          for (std::size_t l = 0; l < b_.num_letters() && left > 0; ++l) {
            VertexId u = b_.neighbor(v, static_cast<Letter>(l));
            if (u != kNoVertex && dist_[u] == kUnreached) {
              visit(u, dist_[v] + 1);
            }
          }
        }
        if (left > 0) {
          throw WindowError("slimness search cannot reach every side point inside the ball");
        }
        return worst;
      }

     private:
      CayleyBall const&         b_;
      std::vector<std::int32_t> dist_;
      std::vector<std::uint32_t> mark_;
      std::uint32_t             stamp_ = 0;
      std::vector<VertexId>     order_;
    };

    //! Slimness defect of the triangle (1, x, y) with shortlex-least sides;
    //! nullopt when x^-1 y is not in the ball or its side leaves the ball.
    inline std::optional<std::size_t> triangle_defect(CayleyBall const& b, TargetSearch& s, VertexId x, VertexId y) {
      auto const& sv = b.solver();
      Key         k  = sv.multiply(sv.key_of(inverse(b.geodesic_word(x))), b.geodesic_word(y));
      auto        z  = b.find(k);
      if (!z) {
        return std::nullopt;
      }
      auto side3 = b.trace(x, b.geodesic_word(*z));
      if (!side3) {
        return std::nullopt;
      }
      auto side1 = b.geodesic_from_identity(x).vertices;
      auto side2 = b.geodesic_from_identity(y).vertices;
      auto join  = [](std::vector<VertexId> a, std::vector<VertexId> const& c) {
        a.insert(a.end(), c.begin(), c.end());
        return a;
      };
      std::size_t d = s.farthest(join(side2, side3->vertices), side1);
      d             = std::max(d, s.farthest(join(side1, side3->vertices), side2));
      d             = std::max(d, s.farthest(join(side1, side2), side3->vertices));
      return d;
    }

    inline void note_triangle(DeltaEstimate& e, std::optional<std::size_t> d, VertexId x, VertexId y) {
      if (!d) {
        ++e.skipped;
        return;
      }
      ++e.triangles;
      if (e.triangles == 1 || *d > e.value) {
        e.value = *d;
        e.x     = x;
        e.y     = y;
      }
    }

  }  // namespace detail

  //! Largest slimness defect over all triangles with sides at most rho. Every
  //! such triangle is a translate of one with a corner at the identity, so
  //! the triangles (1, x, y) with x, y in B(rho) and d(x, y) <= rho suffice.
  inline DeltaEstimate estimate_delta(CayleyBall const& b, std::size_t rho) {
    if (rho > b.radius()) {
      throw PreconditionError("rho exceeds the ball radius");
    }
    DeltaEstimate e;
    e.mode = "exhaustive";
    e.rho  = rho;
    detail::TargetSearch s(b);
    auto const           last = b.layer(rho).second;
    for (VertexId x = 0; x < last; ++x) {
      for (VertexId y = x; y < last; ++y) {
        auto d = group_distance(b, x, y);
        if (!d || *d > rho) {
          continue;
        }
        detail::note_triangle(e, detail::triangle_defect(b, s, x, y), x, y);
      }
    }
    if (e.triangles == 0) {
      throw PreconditionError("no triangle with exact side lengths in the ball");
    }
    return e;
  }

  //! Defect over `count` random triangles (1, x, y) with x, y in B(rho).
  inline DeltaEstimate estimate_delta_sampled(CayleyBall const& b, std::size_t rho, std::size_t count,
                                              std::uint64_t seed) {
    if (rho > b.radius() || count == 0) {
      throw PreconditionError("sampling needs rho <= R and a positive count");
    }
    DeltaEstimate e;
    e.mode  = "sampled";
    e.rho   = rho;
    e.count = count;
    e.seed  = seed;
    detail::TargetSearch                       s(b);
    std::mt19937_64                            rng(seed);
    std::uniform_int_distribution<VertexId>    pick(0, b.layer(rho).second - 1);
    for (std::size_t t = 0; t < count; ++t) {
      VertexId x = pick(rng);
      VertexId y = pick(rng);
      detail::note_triangle(e, detail::triangle_defect(b, s, x, y), x, y);
    }
    if (e.triangles == 0) {
      throw PreconditionError("no sampled triangle fits in the ball");
    }
    return e;
  }

  inline nlohmann::json to_json(DeltaEstimate const& e, CayleyBall const& b) {
    nlohmann::json j;
    j["delta"]     = e.value;
    j["mode"]      = e.mode;
    j["rho"]       = e.rho;
    j["triangles"] = e.triangles;
    j["skipped"]   = e.skipped;
    if (e.mode == "sampled") {
      j["count"] = e.count;
      j["seed"]  = e.seed;
    }
    j["witness"] = {b.normal_form_string(e.x), b.normal_form_string(e.y)};
    return j;
  }

  inline GrowthTable delta_table(CayleyBall const& b, std::size_t rho_min, std::size_t rho_max) {
    GrowthTable t;
    t.kind                    = GrowthKind::delta;
    t.model                   = b.model().name();
    t.metadata["ball_radius"] = b.radius();
    for (std::size_t rho = rho_min; rho <= rho_max; ++rho) {
      auto         e = estimate_delta(b, rho);
      GrowthSample s;
      s.r      = rho;
      s.value  = static_cast<std::int64_t>(e.value);
      s.lo     = s.value;
      s.mode   = SampleMode::exact;
      s.window = b.radius();
      t.add(s);
    }
    return t;
  }

  struct RayConstant {
    std::size_t value  = 0;
    std::size_t margin = 0;
    //! Vertex of B(R - margin) farthest from the ray set.
    VertexId    witness = 0;
    std::size_t ray_set_size = 0;
  };

  //! Largest distance from a vertex of B(R - margin) to the set of vertices
  //! lying on a geodesic from the identity to the outer sphere.
  inline RayConstant ray_constant(CayleyBall const& b, std::size_t margin) {
    if (margin >= b.radius()) {
      throw PreconditionError("margin must be smaller than the ball radius");
    }
    RaySet      y(b);
    auto        d = distance_to_ray_set(b, y);
    RayConstant out;
    out.margin      = margin;
    auto const last = b.layer(b.radius() - margin).second;
    for (VertexId v = 0; v < b.size(); ++v) {
      out.ray_set_size += y.contains(v) ? 1 : 0;
    }
    for (VertexId v = 0; v < last; ++v) {
      if (d[v] < 0) {
        throw WindowError("vertex cannot reach the ray set inside the ball");
      }
      if (static_cast<std::size_t>(d[v]) > out.value) {
        out.value   = static_cast<std::size_t>(d[v]);
        out.witness = v;
      }
    }
    return out;
  }

  //! Shortest path from x to y through vertices with dist > level - c.
  inline std::optional<Path> cp_path(CayleyBall const& b, BallSearch& s, VertexId x, VertexId y, std::size_t level,
                                     std::size_t c) {
    std::size_t floor = level - c;
    auto        ok    = [&](VertexId v) { return b.dist(v) > floor; };
    if (!ok(x) || !ok(y)) {
      return std::nullopt;
    }
    s.run({x}, ok, std::numeric_limits<std::size_t>::max(), y);
    if (!s.reached(y)) {
      return std::nullopt;
    }
    return s.path_to(y);
  }

  struct CPReport {
    std::size_t M     = 0;
    std::size_t c     = 0;
    std::size_t level = 0;
    //! Longest shortest complement path over the connected pairs.
    std::size_t L     = 0;
    std::size_t pairs = 0;
    std::vector<std::pair<VertexId, VertexId>> failures;
    VertexId    longest_x = 0;
    VertexId    longest_y = 0;
  };

  //! For all pairs on the sphere of radius `level` at group distance <= M,
  //! the shortest path joining them outside B(level - c).
  inline CPReport cp_table(CayleyBall const& b, std::size_t M, std::size_t c, std::size_t level,
                           std::size_t threads = 1) {
    if (c >= level || level + 1 > b.radius()) {
      throw PreconditionError("cp_table needs c < level <= R - 1");
    }
    auto pts = b.sphere(level);
    struct Row {
      std::size_t                                 pairs = 0;
      std::size_t                                 L     = 0;
      VertexId                                    y     = 0;
      std::vector<std::pair<VertexId, VertexId>> failures;
    };
    std::vector<Row> rows(pts.size());
    auto             floor = level - c;
    parallel_for(pts.size(), threads, [&](std::size_t i) {
      BallSearch s(b);
      Row&       row = rows[i];
      VertexId   x   = pts[i];
      s.run({x}, [&](VertexId v) { return b.dist(v) > floor; });
      for (std::size_t j = i; j < pts.size(); ++j) {
        VertexId y = pts[j];
        auto     d = group_distance(b, x, y);
        if (!d || *d > M) {
          continue;
        }
        ++row.pairs;
        if (!s.reached(y)) {
          row.failures.emplace_back(x, y);
          continue;
        }
        auto len = static_cast<std::size_t>(s.dist(y));
        if (len > row.L || row.pairs == 1) {
          row.L = std::max(row.L, len);
          row.y = y;
        }
      }
    });
    CPReport rep;
    rep.M     = M;
    rep.c     = c;
    rep.level = level;
    bool any  = false;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      rep.pairs += rows[i].pairs;
      rep.failures.insert(rep.failures.end(), rows[i].failures.begin(), rows[i].failures.end());
      if (rows[i].pairs > rows[i].failures.size() && (!any || rows[i].L > rep.L)) {
        any           = true;
        rep.L         = rows[i].L;
        rep.longest_x = pts[i];
        rep.longest_y = rows[i].y;
      }
    }
    return rep;
  }

  inline nlohmann::json to_json(CPReport const& r, CayleyBall const& b) {
    nlohmann::json j;
    j["M"]        = r.M;
    j["c"]        = r.c;
    j["level"]    = r.level;
    j["L"]        = r.L;
    j["pairs"]    = r.pairs;
    j["longest"]  = {b.normal_form_string(r.longest_x), b.normal_form_string(r.longest_y)};
    auto failures = nlohmann::json::array();
    for (auto [x, y] : r.failures) {
      failures.push_back({b.normal_form_string(x), b.normal_form_string(y)});
    }
    j["failures"] = std::move(failures);
    return j;
  }

  //! L(M) at each level; lower_bound when some pair has no complement path.
  inline GrowthTable cp_growth_table(CayleyBall const& b, std::size_t M, std::size_t c, std::size_t level_min,
                                     std::size_t level_max, std::size_t threads = 1) {
    GrowthTable t;
    t.kind                    = GrowthKind::cp;
    t.model                   = b.model().name();
    t.metadata["M"]           = M;
    t.metadata["c"]           = c;
    t.metadata["ball_radius"] = b.radius();
    auto failures             = nlohmann::json::object();
    for (std::size_t level = level_min; level <= level_max; ++level) {
      auto         rep = cp_table(b, M, c, level, threads);
      GrowthSample s;
      s.r      = level;
      s.value  = static_cast<std::int64_t>(rep.L);
      s.lo     = s.value;
      s.mode   = rep.failures.empty() ? SampleMode::exact : SampleMode::lower_bound;
      s.window = b.radius();
      t.add(s);
      failures[std::to_string(level)] = rep.failures.size();
    }
    t.metadata["failures"] = std::move(failures);
    return t;
  }

  //! Constants driving the fan: ray constant c, slimness delta, CP radius M
  //! and CP path bound L.
  struct FanParams {
    std::size_t M     = 0;
    std::size_t c     = 0;
    std::size_t L     = 0;
    std::size_t delta = 0;
  };

  struct MeasuredFanParams {
    FanParams   params;
    std::size_t c_hat = 0;
    std::size_t delta_hat = 0;
    std::size_t L_hat = 0;
    CPReport    cp;
  };

  //! Measures c, delta and L on the ball. Complement paths between points of
  //! one sphere cannot avoid that sphere, so c is at least 1; M and L are the
  //! least values satisfying M > 6c + 2 delta + 3 and L > 2c + 4.
  inline MeasuredFanParams measure_fan_params(CayleyBall const& b, std::size_t margin, std::size_t rho,
                                              std::size_t level, std::size_t threads = 1) {
    MeasuredFanParams m;
    m.c_hat          = ray_constant(b, margin).value;
    m.delta_hat      = estimate_delta(b, rho).value;
    m.params.c       = std::max<std::size_t>(m.c_hat, 1);
    m.params.delta   = m.delta_hat;
    m.params.M       = 6 * m.params.c + 2 * m.delta_hat + 4;
    m.cp             = cp_table(b, m.params.M, m.params.c, level, threads);
    m.L_hat          = m.cp.L;
    m.params.L       = std::max(m.L_hat, 2 * m.params.c + 5);
    return m;
  }

  struct FanCell {
    std::size_t level = 0;
    std::size_t j     = 0;
    std::size_t k     = 0;
    Loop        loop;
    std::size_t length   = 0;
    std::size_t min_dist = 0;
  };

  struct FanLevel {
    std::size_t radius = 0;
    Path        f;
    //! Ray index and position on f of each marked point, in order along f.
    std::vector<std::size_t> rays;
    std::vector<std::size_t> marks;
    std::size_t              min_dist = 0;
    std::size_t              max_mark_gap = 0;
  };

  struct Fan {
    std::size_t           r = 0;
    std::size_t           N = 0;
    VertexId              p = 0;
    VertexId              q = 0;
    FanParams             params;
    std::vector<Path>     rays;
    Path                  P;
    Path                  Q;
    std::vector<FanLevel> levels;
    std::vector<FanCell>  cells;
    //! Lemma-style invariants checked on the stored data.
    bool levels_outside  = false;
    bool marks_close     = false;
    bool cells_short     = false;
    bool cells_outside   = false;

    Loop phi(std::size_t level) const;
  };

  namespace detail {

    inline Letter edge_letter(CayleyBall const& b, VertexId from, VertexId to) {
      for (std::size_t l = 0; l < b.num_letters(); ++l) {
        if (b.neighbor(from, static_cast<Letter>(l)) == to) {
          return static_cast<Letter>(l);
        }
      }
      throw PreconditionError("vertices are not adjacent");
    }

    //! Letters along a geodesic ray between the points at dist a and b.
    inline Word ray_segment(Path const& ray, std::size_t a, std::size_t b) {
      if (a <= b) {
        return Word(ray.letters.begin() + static_cast<std::ptrdiff_t>(a),
                    ray.letters.begin() + static_cast<std::ptrdiff_t>(b));
      }
      return inverse(Word(ray.letters.begin() + static_cast<std::ptrdiff_t>(b),
                          ray.letters.begin() + static_cast<std::ptrdiff_t>(a)));
    }

    inline Word sub_letters(Path const& p, std::size_t a, std::size_t b) {
      return Word(p.letters.begin() + static_cast<std::ptrdiff_t>(a),
                  p.letters.begin() + static_cast<std::ptrdiff_t>(b));
    }

    //! The least vertex of the ray set nearest to v, within c of it.
    inline VertexId nearest_ray_vertex(CayleyBall const& b, RaySet const& y, BallSearch& s, VertexId v,
                                       std::size_t c) {
      s.run({v}, c);
      VertexId    best = kNoVertex;
      std::size_t bd   = 0;
      for (auto u : s.visited()) {
        if (!y.contains(u)) {
          continue;
        }
        auto d = static_cast<std::size_t>(s.dist(u));
        if (best == kNoVertex || d < bd || (d == bd && u < best)) {
          best = u;
          bd   = d;
        }
      }
      if (best == kNoVertex) {
        throw WindowError("no geodesic ray passes within " + std::to_string(c) + " of "
                          + b.normal_form_string(v));
      }
      return best;
    }

  }  // namespace detail

  inline Loop Fan::phi(std::size_t level) const {
    if (level >= levels.size() || rays.size() < 2) {
      throw PreconditionError("fan level out of range");
    }
    Path const& g0 = rays[levels[level].rays.front()];
    Path const& g1 = rays[levels[level].rays.back()];
    Word        w  = P.letters;
    auto        a  = detail::ray_segment(g0, r, r + level);
    w.insert(w.end(), a.begin(), a.end());
    w.insert(w.end(), levels[level].f.letters.begin(), levels[level].f.letters.end());
    auto b = detail::ray_segment(g1, r + level, r);
    w.insert(w.end(), b.begin(), b.end());
    auto qi = inverse(Q.letters);
    w.insert(w.end(), qi.begin(), qi.end());
    Loop l{p, std::move(w)};
    return l;
  }

  //! Builds f_0, ..., f_N for the edge pq: each f_i joins the rays through p
  //! and q at radius r + i outside B(r + i - c), passing through marked points
  //! of rays at most M apart; f_{i+1} is assembled from complement paths
  //! between rays passing near consecutive vertices of f_i.
  inline Fan build_fan(CayleyComplexBall const& c2, VertexId p, VertexId q, std::size_t N, FanParams const& prm) {
    auto const& b = c2.ball();
    if (p >= b.size() || q >= b.size()) {
      throw PreconditionError("fan endpoints lie outside the ball");
    }
    if (p == q) {
      throw PreconditionError("fan needs an edge pq, got p = q");
    }
    detail::edge_letter(b, q, p);
    if (!b.model().traits().one_ended) {
      throw PreconditionError("fan construction needs a one-ended model");
    }
    if (prm.c == 0) {
      throw PreconditionError("fan needs c >= 1");
    }
    if (prm.M <= 6 * prm.c + 2 * prm.delta + 3) {
      throw PreconditionError("parameters violate M > 6c + 2 delta + 3 (M = " + std::to_string(prm.M) + ")");
    }
    if (prm.L <= 2 * prm.c + 4) {
      throw PreconditionError("parameters violate L > 2c + 4 (L = " + std::to_string(prm.L) + ")");
    }
    Fan fan;
    fan.r      = b.dist(p);
    fan.N      = N;
    fan.p      = p;
    fan.q      = q;
    fan.params = prm;
    std::size_t const r = fan.r;
    std::size_t const c = prm.c;
    if (r <= c || r + N + 1 > b.radius()) {
      throw PreconditionError("fan needs c < dist(p) and dist(p) + N + 1 <= R");
    }
    RaySet     yset(b);
    BallSearch s(b);

    auto add_ray = [&](VertexId y) {
      fan.rays.push_back(yset.ray_through(y));
      return fan.rays.size() - 1;
    };
    std::size_t g0 = add_ray(detail::nearest_ray_vertex(b, yset, s, p, c));
    std::size_t g1 = add_ray(detail::nearest_ray_vertex(b, yset, s, q, c));
    auto        at = [&](std::size_t ray, std::size_t t) { return fan.rays[ray].vertices[t]; };

    s.run({p}, std::numeric_limits<std::size_t>::max(), at(g0, r));
    fan.P = s.path_to(at(g0, r));
    s.run({q}, std::numeric_limits<std::size_t>::max(), at(g1, r));
    fan.Q = s.path_to(at(g1, r));

    auto join_level = [&](std::vector<std::size_t> const& rays, std::size_t radius) {
      FanLevel lv;
      lv.radius = radius;
      lv.rays   = rays;
      lv.f.vertices.push_back(at(rays.front(), radius));
      lv.marks.push_back(0);
      for (std::size_t t = 0; t + 1 < rays.size(); ++t) {
        VertexId x   = at(rays[t], radius);
        VertexId y   = at(rays[t + 1], radius);
        auto     gap = group_distance(b, x, y);
        if (!gap) {
          throw WindowError("marked points too far apart to measure in the ball");
        }
        lv.max_mark_gap = std::max(lv.max_mark_gap, *gap);
        auto path       = cp_path(b, s, x, y, radius, c);
        if (!path) {
          throw WindowError("no complement path between " + b.normal_form_string(x) + " and "
                            + b.normal_form_string(y) + " at radius " + std::to_string(radius));
        }
        lv.f.letters.insert(lv.f.letters.end(), path->letters.begin(), path->letters.end());
        lv.f.vertices.insert(lv.f.vertices.end(), path->vertices.begin() + 1, path->vertices.end());
        lv.marks.push_back(lv.f.letters.size());
      }
      lv.min_dist = std::numeric_limits<std::size_t>::max();
      for (auto v : lv.f.vertices) {
        lv.min_dist = std::min(lv.min_dist, b.dist(v));
      }
      return lv;
    };

    fan.levels.push_back(join_level({g0, g1}, r));
    for (std::size_t i = 0; i < N; ++i) {
      FanLevel const           cur    = fan.levels[i];
      std::size_t const        radius = r + i;
      std::vector<std::size_t> next_rays;
      struct Foot {
        std::size_t ray;
        VertexId    y;
        Path        beta;
      };
      std::vector<std::vector<Foot>> feet;
      for (std::size_t j = 0; j + 1 < cur.rays.size(); ++j) {
        std::vector<Foot> fj;
        std::size_t const a = cur.marks[j];
        std::size_t const e = cur.marks[j + 1];
        fj.push_back({cur.rays[j], cur.f.vertices[a], Path{{cur.f.vertices[a]}, {}}});
        for (std::size_t k = a + 1; k < e; ++k) {
          VertexId    v  = cur.f.vertices[k];
          VertexId    y  = detail::nearest_ray_vertex(b, yset, s, v, c);
          std::size_t id = add_ray(y);
          std::size_t dy = b.dist(y);
          std::size_t dz = std::max(dy, radius + 1);
          if (dz - std::min(dz, dy) > 2 * c + 1) {
            throw WindowError("no ray point beyond radius " + std::to_string(radius + 1) + " near "
                              + b.normal_form_string(y));
          }
          s.run({v}, std::numeric_limits<std::size_t>::max(), y);
          fj.push_back({id, y, s.path_to(y)});
        }
        fj.push_back({cur.rays[j + 1], cur.f.vertices[e], Path{{cur.f.vertices[e]}, {}}});
        for (std::size_t t = 0; t + 1 < fj.size(); ++t) {
          next_rays.push_back(fj[t].ray);
        }
        feet.push_back(std::move(fj));
      }
      next_rays.push_back(cur.rays.back());
      fan.levels.push_back(join_level(next_rays, radius + 1));
      FanLevel const& nxt  = fan.levels.back();
      std::size_t     mark = 0;
      for (std::size_t j = 0; j < feet.size(); ++j) {
        auto const&       fj = feet[j];
        std::size_t const a  = cur.marks[j];
        for (std::size_t k = 0; k + 1 < fj.size(); ++k, ++mark) {
          auto const& f0 = fj[k];
          auto const& f1 = fj[k + 1];
          Word        w  = f0.beta.letters;
          auto        up = detail::ray_segment(fan.rays[f0.ray], b.dist(f0.y), radius + 1);
          w.insert(w.end(), up.begin(), up.end());
          auto cp = detail::sub_letters(nxt.f, nxt.marks[mark], nxt.marks[mark + 1]);
          w.insert(w.end(), cp.begin(), cp.end());
          auto down = detail::ray_segment(fan.rays[f1.ray], radius + 1, b.dist(f1.y));
          w.insert(w.end(), down.begin(), down.end());
          auto back = inverse(f1.beta.letters);
          w.insert(w.end(), back.begin(), back.end());
          if (a + k < cur.marks[j + 1]) {
            w.push_back(inverse(cur.f.letters[a + k]));
          }
          FanCell cell;
          cell.level  = i;
          cell.j      = j;
          cell.k      = k;
          cell.loop   = {cur.f.vertices[a + k], std::move(w)};
          cell.length = cell.loop.word.size();
          if (!is_closed(b, cell.loop)) {
            throw std::logic_error("fan sub-cell does not close up");
          }
          cell.min_dist = loop_min_dist(b, cell.loop);
          fan.cells.push_back(std::move(cell));
        }
      }
    }

    fan.levels_outside = true;
    fan.marks_close    = true;
    for (std::size_t i = 0; i < fan.levels.size(); ++i) {
      fan.levels_outside = fan.levels_outside && fan.levels[i].min_dist + c > r + i;
      fan.marks_close    = fan.marks_close && fan.levels[i].max_mark_gap <= prm.M;
    }
    fan.cells_short   = true;
    fan.cells_outside = true;
    for (auto const& cell : fan.cells) {
      fan.cells_short   = fan.cells_short && cell.length + 1 <= 2 * prm.L + 4 * c;
      fan.cells_outside = fan.cells_outside && cell.min_dist + 2 * c > r + cell.level;
    }
    return fan;
  }

  namespace detail {

    using Chain = std::map<std::pair<VertexId, Letter>, std::int64_t>;

    //! Signed edge counts of a loop, each edge keyed by its positive letter.
    inline void add_chain(CayleyBall const& b, Loop const& l, std::int64_t sign, Chain& ch) {
      VertexId v = l.base;
      for (Letter x : l.word) {
        VertexId u = b.neighbor(v, x);
        if (is_inverse_letter(x)) {
          ch[{u, inverse(x)}] -= sign;
        } else {
          ch[{v, x}] += sign;
        }
        v = u;
      }
    }

  }  // namespace detail

  //! Closes a fan level: P, the rays up to the level, f, the rays back, Q^-1
  //! and the edge qp.
  struct FanEdgeScan {
    std::optional<std::pair<VertexId, VertexId>> edge;
    std::size_t                                  edges_tried     = 0;
    std::size_t                                  window_failures = 0;
    //! Fans whose f_0 is empty because both rays meet at radius r.
    std::size_t                                  degenerate      = 0;
  };

  //! First edge p -> q with p on the sphere of radius r, in vertex and letter
  //! order, whose fan builds with a nonempty f_0.
  inline FanEdgeScan first_fan_edge(CayleyComplexBall const& c2, std::size_t r, std::size_t N,
                                    FanParams const& prm) {
    auto const& b = c2.ball();
    FanEdgeScan scan;
    for (VertexId p : b.sphere(r)) {
      for (std::size_t l = 0; l < b.num_letters(); ++l) {
        VertexId q = b.neighbor(p, static_cast<Letter>(l));
        if (q == kNoVertex) {
          continue;
        }
        ++scan.edges_tried;
        try {
          auto fan = build_fan(c2, p, q, N, prm);
          if (fan.levels.front().f.letters.empty()) {
            ++scan.degenerate;
            continue;
          }
        } catch (WindowError const&) {
          ++scan.window_failures;
          continue;
        }
        scan.edge = std::make_pair(p, q);
        return scan;
      }
    }
    return scan;
  }

  inline Loop fan_loop(CayleyBall const& b, Fan const& fan, std::size_t level) {
    Loop l = fan.phi(level);
    l.word.push_back(detail::edge_letter(b, fan.q, fan.p));
    return l;
  }

  struct FanVerification {
    FillResult              phi0;
    std::vector<FillResult> cells;
    //! The boundary chains of all pieces add up to that of the outer loop.
    bool                    chain_ok = false;
    //! "filled", "unknown" or "obstructed".
    std::string             verdict;
    std::size_t             inner = 0;
  };

  //! Fills the base loop and every sub-cell outside B(n) and checks that the
  //! pieces decompose the outermost fan loop.
  inline FanVerification verify_fan_filling(CayleyComplexBall const& c2, Fan const& fan, std::size_t n,
                                            FillBudget budget = {}, std::size_t threads = 1) {
    auto const& b = c2.ball();
    if (fan.levels.size() != fan.N + 1) {
      throw PreconditionError("fan is incomplete");
    }
    if (fan.r < n + 2 * fan.params.c) {
      throw PreconditionError("fan verification needs dist(p) >= n + 2c");
    }
    FanVerification v;
    v.inner     = n;
    Loop phi0   = fan_loop(b, fan, 0);
    Loop outer  = fan_loop(b, fan, fan.N);
    if (!is_closed(b, phi0) || !is_closed(b, outer)) {
      throw std::logic_error("fan loops do not close up");
    }
    detail::Chain sum;
    detail::add_chain(b, phi0, 1, sum);
    for (auto const& cell : fan.cells) {
      detail::add_chain(b, cell.loop, 1, sum);
    }
    detail::add_chain(b, outer, -1, sum);
    v.chain_ok = std::all_of(sum.begin(), sum.end(), [](auto const& e) { return e.second == 0; });
    if (!v.chain_ok) {
      throw std::logic_error("fan decomposition does not add up to the outer loop");
    }

    auto fill = [&](Loop const& l) {
      if (budget.max_states == 0) {
        return FillResult{};
      }
      return fill_outside(c2, l, n, budget);
    };
    v.phi0 = fill(phi0);
    v.cells.resize(fan.cells.size());
    parallel_for(fan.cells.size(), threads, [&](std::size_t i) { v.cells[i] = fill(fan.cells[i].loop); });
    bool obstructed = v.phi0.outcome == FillOutcome::obstructed;
    bool unknown    = v.phi0.outcome == FillOutcome::unknown;
    for (auto const& res : v.cells) {
      obstructed = obstructed || res.outcome == FillOutcome::obstructed;
      unknown    = unknown || res.outcome == FillOutcome::unknown;
    }
    v.verdict = obstructed ? "obstructed" : unknown ? "unknown" : "filled";
    return v;
  }

  inline nlohmann::json to_json(Fan const& fan, CayleyBall const& b, FanVerification const* v = nullptr) {
    auto const&    m = b.model();
    auto           nf = [&](VertexId x) {
      auto s = b.normal_form_string(x);
      return s.empty() ? std::string("1") : s;
    };
    auto word = [&](Word const& w) { return w.empty() ? std::string("1") : m.format(w); };
    nlohmann::json j;
    j["r"]      = fan.r;
    j["N"]      = fan.N;
    j["p"]      = nf(fan.p);
    j["q"]      = nf(fan.q);
    j["params"] = {{"M", fan.params.M}, {"c", fan.params.c}, {"L", fan.params.L}, {"delta", fan.params.delta}};
    auto rays   = nlohmann::json::array();
    for (auto const& ray : fan.rays) {
      rays.push_back(word(ray.letters));
    }
    j["rays"] = std::move(rays);
    j["P"]    = word(fan.P.letters);
    j["Q"]    = word(fan.Q.letters);
    auto lv   = nlohmann::json::array();
    for (auto const& level : fan.levels) {
      lv.push_back({{"radius", level.radius},
                    {"start", nf(level.f.front())},
                    {"f", word(level.f.letters)},
                    {"rays", level.rays},
                    {"marks", level.marks},
                    {"min_dist", level.min_dist},
                    {"max_mark_gap", level.max_mark_gap}});
    }
    j["levels"] = std::move(lv);
    auto cells  = nlohmann::json::array();
    for (std::size_t i = 0; i < fan.cells.size(); ++i) {
      auto const&    cell = fan.cells[i];
      nlohmann::json cj{{"level", cell.level},
                        {"j", cell.j},
                        {"k", cell.k},
                        {"loop", format_loop(b, cell.loop)},
                        {"length", cell.length},
                        {"min_dist", cell.min_dist}};
      if (v) {
        cj["outcome"] = to_string(v->cells[i].outcome);
      }
      cells.push_back(std::move(cj));
    }
    j["cells"]      = std::move(cells);
    j["invariants"] = {{"levels_outside", fan.levels_outside},
                       {"marks_close", fan.marks_close},
                       {"cells_short", fan.cells_short},
                       {"cells_outside", fan.cells_outside}};
    if (v) {
      j["verification"] = {{"inner", v->inner},
                           {"phi0", to_string(v->phi0.outcome)},
                           {"chain_ok", v->chain_ok},
                           {"verdict", v->verdict}};
    }
    return j;
  }

}  // namespace sciball
