#pragma once

#include <optional>
#include <random>

#include <sciball/cayley.hpp>
#include <sciball/loop.hpp>
#include <sciball/replay.hpp>

#include "generators.hpp"

namespace gen {

  using namespace sciball;

  inline Word power(Letter l, std::size_t n) {
    return Word(n, l);
  }

  // Counterclockwise square |x|, |y| <= k in Z^2, based at (k, 0).
  inline Word square_word(std::size_t k) {
    Word w = power(2, k);
    for (auto [l, n] : {std::pair<Letter, std::size_t>{1, 2 * k}, {3, 2 * k}, {0, 2 * k}, {2, k}}) {
      auto p = power(l, n);
      w.insert(w.end(), p.begin(), p.end());
    }
    return w;
  }

  inline Loop loop_at(CayleyBall const& b, Word const& base, Word const& w) {
    return Loop{*b.vertex_of(base), w};
  }

  inline std::size_t touched(CayleyBall const& b, std::vector<VertexId> const& vs, Move const& m,
                      Word const& rho) {
    switch (m.kind) {
      case MoveKind::insert: {
        VertexId v = vs[m.pos];
        VertexId u = b.neighbor(v, m.letter);
        return u == kNoVertex ? 0 : std::min(b.dist(v), b.dist(u));
      }
      case MoveKind::remove:
        return std::min(b.dist(vs[m.pos]), b.dist(vs[m.pos + 1]));
      default: {
        auto p = b.trace(vs[m.pos], rho);
        if (!p) {
          return 0;
        }
        std::size_t lo = b.dist(vs[m.pos]);
        for (auto v : p->vertices) {
          lo = std::min(lo, b.dist(v));
        }
        return lo;
      }
    }
  }

  // A random well-formed move on `l`, or nullopt when the draw is unusable.
  inline std::optional<Move> random_move(std::mt19937_64& rng, CayleyComplexBall const& c, Loop const& l) {
    auto const& b  = c.ball();
    auto        vs = *loop_vertices(b, l);
    std::size_t n  = l.word.size();
    Move        m;
    Word        rho;
    switch (gen::uniform(rng, 0, 2)) {
      case 0:
        m.kind   = MoveKind::insert;
        m.pos    = gen::uniform(rng, 0, n);
        m.letter = static_cast<Letter>(gen::uniform(rng, 0, b.num_letters() - 1));
        break;
      case 1: {
        std::vector<std::size_t> spots;
        for (std::size_t i = 0; i + 1 < n; ++i) {
          if (l.word[i + 1] == inverse(l.word[i])) {
            spots.push_back(i);
          }
        }
        if (spots.empty()) {
          return std::nullopt;
        }
        m.kind = MoveKind::remove;
        m.pos  = spots[gen::uniform(rng, 0, spots.size() - 1)];
        break;
      }
      default: {
        m.kind     = MoveKind::cell;
        m.relator  = static_cast<std::uint32_t>(gen::uniform(rng, 0, c.relators().size() - 1));
        m.inverted = gen::uniform(rng, 0, 1) == 1;
        rho        = m.inverted ? inverse(c.relators()[m.relator]) : c.relators()[m.relator];
        m.offset   = static_cast<std::uint32_t>(gen::uniform(rng, 0, rho.size() - 1));
        rho        = rotate_left(rho, m.offset);
        m.pos      = gen::uniform(rng, 0, n);
        std::size_t match = 0;
        while (match < rho.size() && m.pos + match < n && l.word[m.pos + match] == rho[match]) {
          ++match;
        }
        m.length = static_cast<std::uint32_t>(gen::uniform(rng, 0, match));
      }
    }
    m.min_dist = touched(b, vs, m, rho);
    return m;
  }

}  // namespace gen
