#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "cayley.hpp"
#include "error.hpp"
#include "growth.hpp"
#include "model.hpp"

namespace sciball {

  //! Components of the subgraph induced on {v : r < dist(v) <= window}.
  struct ComponentSet {
    std::size_t                        window = 0;
    std::size_t                        inner  = 0;
    std::vector<std::vector<VertexId>> components;
    //! Meets the sphere of radius `window`.
    std::vector<bool>                  boundary_touching;

    std::size_t boundary_count() const {
      return static_cast<std::size_t>(
          std::count(boundary_touching.begin(), boundary_touching.end(), true));
    }
    std::size_t interior_count() const {
      return components.size() - boundary_count();
    }
  };

  //! Components ordered by least vertex index. `window` defaults to the ball
  //! radius; a smaller window treats the ball as B(window).
  inline ComponentSet complement_components(CayleyBall const&          b,
                                            std::size_t                r,
                                            std::optional<std::size_t> window = std::nullopt) {
    std::size_t const W = window.value_or(b.radius());
    if (W > b.radius()) {
      throw PreconditionError("window exceeds ball radius");
    }
    if (r >= W) {
      throw PreconditionError("complement_components: r must be smaller than the window");
    }
    ComponentSet cs;
    cs.window = W;
    cs.inner  = r;
    auto const first = b.layer(r + 1).first;
    auto const last  = b.layer(W).second;
    std::vector<std::int32_t> label(last - first, -1);
    auto in_range = [&](VertexId v) { return v >= first && v < last; };
    std::vector<VertexId> stack;
    for (VertexId s = first; s < last; ++s) {
      if (label[s - first] >= 0) {
        continue;
      }
      auto id = static_cast<std::int32_t>(cs.components.size());
      std::vector<VertexId> comp{s};
      bool                  touches = b.dist(s) == W;
      label[s - first]              = id;
      stack.push_back(s);
      while (!stack.empty()) {
        VertexId v = stack.back();
        stack.pop_back();
        for (std::size_t l = 0; l < b.num_letters(); ++l) {
          VertexId u = b.neighbor(v, static_cast<Letter>(l));
          if (u == kNoVertex || !in_range(u) || label[u - first] >= 0) {
            continue;
          }
          label[u - first] = id;
          touches          = touches || b.dist(u) == W;
          comp.push_back(u);
          stack.push_back(u);
        }
      }
      std::sort(comp.begin(), comp.end());
      cs.components.push_back(std::move(comp));
      cs.boundary_touching.push_back(touches);
    }
    return cs;
  }

  inline std::size_t end_depth_window(std::size_t r, Rational window_factor) {
    auto num = static_cast<std::int64_t>(r) * window_factor.num;
    return static_cast<std::size_t>((num + window_factor.den - 1) / window_factor.den) + 2;
  }

  //! V0(r) from one complement analysis with window ceil(f r) + 2. Exact when
  //! exactly one boundary-touching component exists.
  inline GrowthSample end_depth_sample(CayleyBall const& b, std::size_t r, Rational window_factor) {
    std::size_t const W = end_depth_window(r, window_factor);
    if (W > b.radius()) {
      throw PreconditionError("end-depth window " + std::to_string(W) + " exceeds ball radius "
                              + std::to_string(b.radius()));
    }
    auto         cs    = complement_components(b, r, W);
    std::int64_t value = static_cast<std::int64_t>(r);
    for (std::size_t i = 0; i < cs.components.size(); ++i) {
      if (cs.boundary_touching[i]) {
        continue;
      }
      for (auto v : cs.components[i]) {
        value = std::max(value, static_cast<std::int64_t>(b.dist(v)));
      }
    }
    GrowthSample s;
    s.r      = r;
    s.value  = value;
    s.lo     = value;
    s.mode   = cs.boundary_count() == 1 ? SampleMode::exact : SampleMode::lower_bound;
    s.window = W;
    return s;
  }

  //! V0 for r = 0..r_max from a single ball of radius ceil(f r_max) + 2.
  inline GrowthTable end_depth_table(ModelPtr    m,
                                     std::size_t r_max,
                                     Rational    window_factor = {2, 1},
                                     std::size_t max_vertices  = 10'000'000) {
    if (window_factor.den <= 0 || window_factor.num < 2 * window_factor.den) {
      throw PreconditionError("window factor must be at least 2");
    }
    auto        R    = end_depth_window(r_max, window_factor);
    auto        ball = CayleyBall::build(m, R, max_vertices);
    GrowthTable t;
    t.kind                        = GrowthKind::end_depth;
    t.model                       = m->name();
    t.metadata["window_factor"]   = window_factor.str();
    t.metadata["ball_radius"]     = R;
    t.metadata["ball_vertices"]   = ball->size();
    t.metadata["one_ended_model"] = m->traits().one_ended;
    for (std::size_t r = 0; r <= r_max; ++r) {
      t.add(end_depth_sample(*ball, r, window_factor));
    }
    return t;
  }

  struct DeadEnd {
    VertexId    vertex;
    std::size_t dist;
    std::size_t depth;
  };

  //! Vertices none of whose neighbours is farther from the identity, with the
  //! length of the shortest path to a farther vertex. Vertices on the outer
  //! sphere are not assessed. An escape path from v stays in B(dist(v) + 1)
  //! until its last step, so depths are exact for dist(v) <= R - 1.
  inline std::vector<DeadEnd> dead_ends(CayleyBall const& b) {
    std::vector<DeadEnd> out;
    BallSearch           search(b);
    std::size_t const    R = b.radius();
    if (R == 0) {
      return out;
    }
    auto const last = b.layer(R - 1).second;
    for (VertexId v = 0; v < last; ++v) {
      std::size_t const d    = b.dist(v);
      bool              dead = true;
      for (std::size_t l = 0; l < b.num_letters() && dead; ++l) {
        dead = b.dist(b.neighbor(v, static_cast<Letter>(l))) <= d;
      }
      if (!dead) {
        continue;
      }
      auto hit = search.run_until(
          {v}, [&](VertexId u) { return b.dist(u) <= d + 1; }, [&](VertexId u) { return b.dist(u) > d; });
      if (!hit) {
        continue;
      }
      out.push_back({v, d, static_cast<std::size_t>(search.dist(*hit))});
    }
    return out;
  }

}  // namespace sciball
