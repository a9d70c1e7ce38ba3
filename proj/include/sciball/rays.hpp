#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "cayley.hpp"
#include "error.hpp"

namespace sciball {

  //! Ball-graph distance from every vertex to the outer sphere.
  inline std::vector<std::int32_t> distance_to_outer_sphere(CayleyBall const& b) {
    auto sphere = b.sphere(b.radius());
    if (sphere.empty()) {
      throw PreconditionError("outer sphere is empty");
    }
    BallSearch s(b);
    s.run(sphere);
    std::vector<std::int32_t> d(b.size());
    for (VertexId v = 0; v < b.size(); ++v) {
      d[v] = s.dist(v);
    }
    return d;
  }

  //! Vertices on some geodesic from the identity to the outer sphere:
  //! dist(v) + d(v, S(R)) = R.
  struct RaySet {
    CayleyBall const*         ball = nullptr;
    std::vector<std::int32_t> to_sphere;

    explicit RaySet(CayleyBall const& b) : ball(&b), to_sphere(distance_to_outer_sphere(b)) {}

    bool contains(VertexId v) const {
      return to_sphere[v] >= 0
             && ball->dist(v) + static_cast<std::size_t>(to_sphere[v]) == ball->radius();
    }

    //! The shortlex-least geodesic from the identity to y followed by the
    //! greedy least-letter extension to the outer sphere.
    Path ray_through(VertexId y) const {
      if (!contains(y)) {
        throw PreconditionError("vertex lies on no geodesic to the outer sphere");
      }
      Path        p = ball->geodesic_from_identity(y);
      VertexId    v = y;
      std::size_t L = ball->num_letters();
      while (ball->dist(v) < ball->radius()) {
        VertexId next = kNoVertex;
        Letter   via  = 0;
        for (std::size_t l = 0; l < L && next == kNoVertex; ++l) {
          VertexId u = ball->neighbor(v, static_cast<Letter>(l));
          if (u != kNoVertex && ball->dist(u) == ball->dist(v) + 1 && contains(u)) {
            next = u;
            via  = static_cast<Letter>(l);
          }
        }
        p.vertices.push_back(next);
        p.letters.push_back(via);
        v = next;
      }
      return p;
    }
  };

  //! Multi-source search from the ray set: distance of every vertex to it.
  inline std::vector<std::int32_t> distance_to_ray_set(CayleyBall const& b, RaySet const& y) {
    std::vector<VertexId> sources;
    for (VertexId v = 0; v < b.size(); ++v) {
      if (y.contains(v)) {
        sources.push_back(v);
      }
    }
    BallSearch s(b);
    s.run(sources);
    std::vector<std::int32_t> d(b.size());
    for (VertexId v = 0; v < b.size(); ++v) {
      d[v] = s.dist(v);
    }
    return d;
  }

}  // namespace sciball
