#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cayley.hpp"
#include "loop.hpp"
#include "word.hpp"

namespace sciball {

  struct ReplayReport {
    bool        valid = false;
    std::string error;
    //! Index of the offending move, or the number of moves when valid.
    std::size_t moves_checked = 0;
    Loop        final_loop;
    //! Least dist over every loop seen during the replay.
    std::size_t min_dist_seen = 0;
    //! Greatest least-dist over the loops seen during the replay.
    std::size_t max_min_dist  = 0;
  };

  //! Re-executes a certificate from `start` without trusting the producer:
  //! every move must be well formed, every intermediate loop must stay in the
  //! ball with all vertices at distance > r, and each move's min_dist tag must
  //! match the vertices it touches. Slides are legal only along `ray`.
  inline ReplayReport replay_certificate(CayleyComplexBall const&             c,
                                         Loop const&                          start,
                                         std::vector<Move> const&             moves,
                                         std::size_t                          r,
                                         std::vector<VertexId> const*         ray = nullptr) {
    CayleyBall const& b = c.ball();
    ReplayReport      rep;
    Loop              cur = start;
    std::size_t       step = 0;

    auto fail = [&](std::string msg) {
      rep.valid         = false;
      rep.error         = "move " + std::to_string(step) + ": " + msg;
      rep.moves_checked = step;
      rep.final_loop    = cur;
      return rep;
    };
    // Vertices of the current loop, checked against the radius constraint.
    auto scan = [&](std::vector<VertexId>& vs) -> std::optional<std::string> {
      auto p = b.trace(cur.base, cur.word);
      if (!p) {
        return std::string("loop leaves the ball");
      }
      if (p->back() != cur.base) {
        return std::string("loop is not closed");
      }
      std::size_t lo = b.dist(cur.base);
      for (auto v : p->vertices) {
        lo = std::min(lo, b.dist(v));
      }
      if (lo <= r) {
        return "loop reaches dist " + std::to_string(lo) + " <= " + std::to_string(r);
      }
      rep.min_dist_seen = std::min(rep.min_dist_seen, lo);
      rep.max_min_dist  = std::max(rep.max_min_dist, lo);
      vs = std::move(p->vertices);
      return std::nullopt;
    };
    auto on_ray = [&](VertexId v) {
      return ray && std::find(ray->begin(), ray->end(), v) != ray->end();
    };

    rep.min_dist_seen = b.dist(start.base);
    std::vector<VertexId> vs;
    if (auto err = scan(vs)) {
      return fail("start: " + *err);
    }
    for (; step < moves.size(); ++step) {
      Move const& m = moves[step];
      std::size_t n = cur.word.size();
      std::size_t touched;
      switch (m.kind) {
        case MoveKind::insert: {
          if (m.pos > n) {
            return fail("insert position out of range");
          }
          VertexId v = vs[m.pos];
          VertexId u = b.neighbor(v, m.letter);
          if (u == kNoVertex) {
            return fail("insert leaves the ball");
          }
          touched = std::min(b.dist(v), b.dist(u));
          cur.word.insert(cur.word.begin() + static_cast<std::ptrdiff_t>(m.pos),
                          {m.letter, inverse(m.letter)});
          break;
        }
        case MoveKind::remove: {
          if (m.pos + 1 >= n || cur.word[m.pos + 1] != inverse(cur.word[m.pos])) {
            return fail("remove: no cancelling pair at position");
          }
          touched = std::min(b.dist(vs[m.pos]), b.dist(vs[m.pos + 1]));
          cur.word.erase(cur.word.begin() + static_cast<std::ptrdiff_t>(m.pos),
                         cur.word.begin() + static_cast<std::ptrdiff_t>(m.pos) + 2);
          break;
        }
        case MoveKind::cell: {
          if (m.relator >= c.relators().size()) {
            return fail("unknown relator");
          }
          Word rho = c.relators()[m.relator];
          if (m.inverted) {
            rho = inverse(rho);
          }
          if (rho.empty() || m.offset >= rho.size() || m.length > rho.size()
              || m.pos + m.length > n) {
            return fail("cell parameters out of range");
          }
          rho = rotate_left(rho, m.offset);
          if (!std::equal(rho.begin(), rho.begin() + m.length,
                          cur.word.begin() + static_cast<std::ptrdiff_t>(m.pos))) {
            return fail("cell does not match the loop");
          }
          auto boundary = b.trace(vs[m.pos], rho);
          if (!boundary || boundary->back() != vs[m.pos]) {
            return fail("cell boundary is not a closed path in the ball");
          }
          touched = b.dist(vs[m.pos]);
          for (auto v : boundary->vertices) {
            touched = std::min(touched, b.dist(v));
          }
          Word rest(rho.begin() + m.length, rho.end());
          Word repl = inverse(rest);
          cur.word.erase(cur.word.begin() + static_cast<std::ptrdiff_t>(m.pos),
                         cur.word.begin() + static_cast<std::ptrdiff_t>(m.pos + m.length));
          cur.word.insert(cur.word.begin() + static_cast<std::ptrdiff_t>(m.pos), repl.begin(),
                          repl.end());
          break;
        }
        case MoveKind::slide: {
          VertexId u = b.neighbor(cur.base, m.letter);
          if (u == kNoVertex) {
            return fail("slide leaves the ball");
          }
          if (!on_ray(cur.base) || !on_ray(u)) {
            return fail("slide off the ray");
          }
          touched = std::min(b.dist(cur.base), b.dist(u));
          cur.word.insert(cur.word.begin(), inverse(m.letter));
          cur.word.push_back(m.letter);
          cur.base = u;
          break;
        }
        default:
          return fail("unknown move kind");
      }
      if (touched != m.min_dist) {
        return fail("min_dist tag " + std::to_string(m.min_dist) + " but move touches dist "
                    + std::to_string(touched));
      }
      if (auto err = scan(vs)) {
        return fail(*err);
      }
    }
    rep.valid         = true;
    rep.moves_checked = moves.size();
    rep.final_loop    = cur;
    return rep;
  }

}  // namespace sciball
