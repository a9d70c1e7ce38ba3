#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <initializer_list>
#include <limits>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cayley.hpp"
#include "error.hpp"
#include "growth.hpp"
#include "loop.hpp"
#include "model.hpp"
#include "parallel.hpp"
#include "replay.hpp"
#include "word.hpp"

namespace sciball {

  struct FillBudget {
    //! Loop states the local search may generate per fill.
    std::size_t max_states = 20'000;
    //! Longest intermediate loop in the local search; 0 means 2 n + 8.
    std::size_t max_length = 0;
  };

  enum class FillOutcome { filled, unknown, obstructed };

  inline std::string to_string(FillOutcome o) {
    switch (o) {
      case FillOutcome::filled:
        return "filled";
      case FillOutcome::unknown:
        return "unknown";
      case FillOutcome::obstructed:
        return "obstructed";
    }
    return "?";
  }

  struct Obstruction {
    std::string  id;
    std::int64_t value = 0;
  };

  struct FillResult {
    FillOutcome                outcome = FillOutcome::unknown;
    std::vector<Move>          certificate;
    std::optional<Obstruction> obstruction;
    std::size_t                states      = 0;
    std::size_t                length_cap  = 0;
    bool                       cap_binding = false;
    //! Set for filled results: the independent replay accepted the certificate.
    bool                       replayed    = false;
  };

  //! Winding number about (1/2, 1/2) of a loop in Z^2 with the standard
  //! generators, counted as signed crossings of the ray {y = 1/2, x > 1/2}.
  inline std::int64_t winding_number(CayleyBall const& b, Loop const& l) {
    if (!b.model().traits().planar_winding) {
      throw PreconditionError("winding number needs Z^2 with the standard generators");
    }
    auto c = b.solver().coordinates(b.key(l.base));
    if (!c || c->size() != 2) {
      throw PreconditionError("model has no planar coordinates");
    }
    std::int64_t x = (*c)[0];
    std::int64_t y = (*c)[1];
    std::int64_t w = 0;
    for (Letter l2 : l.word) {
      std::int64_t s = is_inverse_letter(l2) ? -1 : 1;
      if (generator_of(l2) == 0) {
        x += s;
        continue;
      }
      if (x >= 1 && ((s > 0 && y == 0) || (s < 0 && y == 1))) {
        w += s;
      }
      y += s;
    }
    return w;
  }

  namespace detail {

    //! A relator or its inverse, rotated.
    struct CellForm {
      std::uint32_t relator;
      std::uint32_t offset;
      bool          inverted;
      Word          rho;
    };

    inline std::vector<CellForm> cell_forms(CayleyComplexBall const& c) {
      std::vector<CellForm>           out;
      std::vector<Word>               seen;
      for (std::uint32_t i = 0; i < c.relators().size(); ++i) {
        for (bool inv : {false, true}) {
          Word base = inv ? inverse(c.relators()[i]) : c.relators()[i];
          for (std::uint32_t k = 0; k < base.size(); ++k) {
            Word rho = rotate_left(base, k);
            if (std::find(seen.begin(), seen.end(), rho) == seen.end()) {
              seen.push_back(rho);
              out.push_back({i, k, inv, std::move(rho)});
            }
          }
        }
      }
      return out;
    }

    struct Based {
      VertexId base = 0;
      Word     word;
    };

    //! Window-relative edits; `rot` makes position k the new start.
    struct Op {
      enum Kind { rot, rem, cell, ins } kind = rot;
      std::size_t   i      = 0;
      std::uint32_t form   = 0;
      std::size_t   m      = 0;
      Letter        letter = 0;
    };

    //! Searches for a filling of a loop outside B(r). The loop lives on a tape
    //! whose base never moves; sub-loops are windows on the tape. Rotating a
    //! window by q inserts q q^-1 after it, so the window can start at any of
    //! its vertices; the debt is cancelled once the window is empty.
    class Filler {
     public:
      Filler(CayleyComplexBall const& c, std::size_t r, FillBudget budget)
          : c_(c), b_(c.ball()), r_(r), budget_(budget), forms_(cell_forms(c)), search_(b_) {}

      bool run(Loop const& l) {
        cap_ = budget_.max_length ? budget_.max_length : 2 * l.word.size() + 8;
        Window w;
        w.start = 0;
        w.cur   = {l.base, l.word};
        return fill(w);
      }

      std::vector<Move> const& moves() const noexcept {
        return moves_;
      }
      std::size_t states() const noexcept {
        return states_;
      }
      std::size_t cap() const noexcept {
        return cap_;
      }
      bool cap_binding() const noexcept {
        return cap_hit_;
      }

     private:
      static constexpr int         kConeDepth      = 2;
      static constexpr std::size_t kConeCandidates = 3;

      struct Window {
        std::size_t         start = 0;
        Based               cur;
        std::vector<Letter> prefix;
      };

      bool allowed(VertexId v) const {
        return v != kNoVertex && b_.dist(v) > r_;
      }

      std::vector<VertexId> vertices(Based const& x) const {
        std::vector<VertexId> vs{x.base};
        VertexId              v = x.base;
        for (Letter l : x.word) {
          v = b_.neighbor(v, l);
          vs.push_back(v);
        }
        return vs;
      }

      Word replacement(CellForm const& f, std::size_t m) const {
        return inverse(Word(f.rho.begin() + static_cast<std::ptrdiff_t>(m), f.rho.end()));
      }

      //! Longest common prefix of the cyclic word read from i and rho.
      static std::size_t match(Word const& w, std::size_t i, Word const& rho) {
        std::size_t n = w.size();
        std::size_t m = 0;
        while (m < n && m < rho.size() && w[(i + m) % n] == rho[m]) {
          ++m;
        }
        return m;
      }

      //! True when the cell path from v stays in the ball and outside B(r).
      bool cell_ok(VertexId v, CellForm const& f) const {
        for (Letter l : f.rho) {
          v = b_.neighbor(v, l);
          if (!allowed(v)) {
            return false;
          }
        }
        return true;
      }

      void apply(Based& x, Op const& op) const {
        auto at = [&](std::size_t i) { return x.word.begin() + static_cast<std::ptrdiff_t>(i); };
        switch (op.kind) {
          case Op::rot: {
            VertexId v = x.base;
            for (std::size_t t = 0; t < op.i; ++t) {
              v = b_.neighbor(v, x.word[t]);
            }
            x.base = v;
            x.word = rotate_left(x.word, op.i);
            break;
          }
          case Op::rem:
            x.word.erase(at(op.i), at(op.i + 2));
            break;
          case Op::cell: {
            Word repl = replacement(forms_[op.form], op.m);
            x.word.erase(at(op.i), at(op.i + op.m));
            x.word.insert(at(op.i), repl.begin(), repl.end());
            break;
          }
          case Op::ins:
            x.word.insert(at(op.i), {op.letter, inverse(op.letter)});
            break;
        }
      }

      void reduce_ops(Based& x, std::vector<Op>& ops) const {
        std::size_t i = 0;
        while (i + 1 < x.word.size()) {
          if (x.word[i + 1] == inverse(x.word[i])) {
            Op op{Op::rem, i};
            apply(x, op);
            ops.push_back(op);
            i = i > 0 ? i - 1 : 0;
          } else {
            ++i;
          }
        }
        while (x.word.size() >= 2 && x.word.back() == inverse(x.word.front())) {
          Op rot{Op::rot, 1};
          apply(x, rot);
          ops.push_back(rot);
          Op rem{Op::rem, x.word.size() - 2};
          apply(x, rem);
          ops.push_back(rem);
        }
      }

      //! Cyclically reduces, then rotates to the least word, breaking ties by
      //! the least starting vertex.
      void canonical_ops(Based& x, std::vector<Op>& ops) const {
        reduce_ops(x, ops);
        std::size_t n = x.word.size();
        if (n == 0) {
          return;
        }
        std::size_t k0     = least_rotation(x.word);
        std::size_t period = cyclic_period(x.word);
        auto        vs     = vertices(x);
        std::size_t best   = k0 % n;
        for (std::size_t k = k0 % period; k < n; k += period) {
          if (vs[k] < vs[best]) {
            best = k;
          }
        }
        if (best != 0) {
          Op rot{Op::rot, best};
          apply(x, rot);
          ops.push_back(rot);
        }
      }

      std::size_t tag(std::initializer_list<VertexId> vs) const {
        std::size_t m = std::numeric_limits<std::size_t>::max();
        for (auto v : vs) {
          m = std::min(m, b_.dist(v));
        }
        return m;
      }

      void emit_insert(std::size_t pos, Letter l, VertexId v) {
        Move mv;
        mv.kind     = MoveKind::insert;
        mv.pos      = pos;
        mv.letter   = l;
        mv.min_dist = tag({v, b_.neighbor(v, l)});
        moves_.push_back(mv);
      }

      //! Applies an op to the window and records the tape moves.
      void exec(Window& w, Op const& op) {
        auto        vs = vertices(w.cur);
        std::size_t n  = w.cur.word.size();
        switch (op.kind) {
          case Op::rot:
            for (std::size_t t = 0; t < op.i; ++t) {
              emit_insert(w.start + n + t, w.cur.word[t], vs[t]);
              w.prefix.push_back(w.cur.word[t]);
            }
            w.start += op.i;
            break;
          case Op::rem: {
            Move mv;
            mv.kind     = MoveKind::remove;
            mv.pos      = w.start + op.i;
            mv.min_dist = tag({vs[op.i], vs[op.i + 1]});
            moves_.push_back(mv);
            break;
          }
          case Op::cell: {
            auto const& f = forms_[op.form];
            Move        mv;
            mv.kind         = MoveKind::cell;
            mv.pos          = w.start + op.i;
            mv.relator      = f.relator;
            mv.offset       = f.offset;
            mv.inverted     = f.inverted;
            mv.length       = static_cast<std::uint32_t>(op.m);
            std::size_t lo  = b_.dist(vs[op.i]);
            VertexId    v   = vs[op.i];
            for (Letter l : f.rho) {
              v  = b_.neighbor(v, l);
              lo = std::min(lo, b_.dist(v));
            }
            mv.min_dist = lo;
            moves_.push_back(mv);
            break;
          }
          case Op::ins:
            emit_insert(w.start + op.i, op.letter, vs[op.i]);
            break;
        }
        apply(w.cur, op);
      }

      void exec_all(Window& w, std::vector<Op> const& ops) {
        for (auto const& op : ops) {
          exec(w, op);
        }
      }

      bool fill(Window& w, int depth = 0) {
        for (;;) {
          if (states_ > budget_.max_states) {
            return false;
          }
          {
            Based           x = w.cur;
            std::vector<Op> ops;
            reduce_ops(x, ops);
            exec_all(w, ops);
          }
          std::size_t n = w.cur.word.size();
          if (n == 0) {
            break;
          }
          if (whole_cell(w) || shorten(w) || split(w, depth)) {
            continue;
          }
          if (depth < kConeDepth && n >= 6 && cone(w, depth)) {
            continue;
          }
          if (!local_search(w)) {
            return false;
          }
        }
        while (!w.prefix.empty()) {
          Letter   l = w.prefix.back();
          VertexId u = b_.neighbor(w.cur.base, inverse(l));
          Move     mv;
          mv.kind     = MoveKind::remove;
          mv.pos      = w.start - 1;
          mv.min_dist = tag({u, w.cur.base});
          moves_.push_back(mv);
          w.cur.base = u;
          w.start -= 1;
          w.prefix.pop_back();
        }
        return true;
      }

      bool whole_cell(Window& w) {
        std::size_t n = w.cur.word.size();
        for (std::uint32_t f = 0; f < forms_.size(); ++f) {
          if (forms_[f].rho == w.cur.word && cell_ok(w.cur.base, forms_[f])) {
            exec(w, Op{Op::cell, 0, f, n});
            return true;
          }
        }
        return false;
      }

      //! Applies the cell move that shortens the loop the most.
      bool shorten(Window& w) {
        auto const& word = w.cur.word;
        std::size_t n    = word.size();
        auto        vs   = vertices(w.cur);
        std::size_t best_gain = 0;
        std::size_t best_i = 0, best_m = 0;
        std::uint32_t best_f = 0;
        for (std::size_t i = 0; i < n; ++i) {
          for (std::uint32_t f = 0; f < forms_.size(); ++f) {
            auto const& rho = forms_[f].rho;
            std::size_t m   = match(word, i, rho);
            if (2 * m <= rho.size()) {
              continue;
            }
            std::size_t gain = 2 * m - rho.size();
            if (gain > best_gain && cell_ok(vs[i], forms_[f])) {
              best_gain = gain;
              best_i    = i;
              best_m    = m;
              best_f    = f;
            }
          }
        }
        if (best_gain == 0) {
          return false;
        }
        if (best_i + best_m > n) {
          exec(w, Op{Op::rot, best_i});
          best_i = 0;
        }
        exec(w, Op{Op::cell, best_i, best_f, best_m});
        return true;
      }

      //! Inserts p^-1 p at window position j, where p runs from vertex i to
      //! vertex j, and fills the closed part [i, j + |p|).
      bool split_at(Window& w, std::size_t i, std::size_t j, Word const& p, int depth) {
        VertexId    vi = vertices(w.cur)[i];
        std::size_t m  = p.size();
        for (std::size_t t = 0; t < m; ++t) {
          exec(w, Op{Op::ins, j + t, 0, 0, inverse(p[m - 1 - t])});
        }
        Window sub;
        sub.start    = w.start + i;
        sub.cur.base = vi;
        sub.cur.word.assign(w.cur.word.begin() + static_cast<std::ptrdiff_t>(i),
                            w.cur.word.begin() + static_cast<std::ptrdiff_t>(j + m));
        if (!fill(sub, depth)) {
          return false;
        }
        w.cur.word.erase(w.cur.word.begin() + static_cast<std::ptrdiff_t>(i),
                         w.cur.word.begin() + static_cast<std::ptrdiff_t>(j + m));
        return true;
      }

      struct Snapshot {
        std::size_t moves;
        Window      window;
      };
      Snapshot save(Window const& w) const {
        return {moves_.size(), w};
      }
      void restore(Window& w, Snapshot const& s) {
        moves_.resize(s.moves);
        w = s.window;
      }

      //! Splits along the chord saving the most length and fills the first
      //! part. On failure the window is left untouched.
      bool split(Window& w, int depth) {
        std::size_t n = w.cur.word.size();
        if (n < 4) {
          return false;
        }
        auto        vs        = vertices(w.cur);
        std::size_t best_gain = 0;
        std::size_t bi = 0, bj = 0;
        auto        ok = [&](VertexId v) { return allowed(v); };
        for (std::size_t i = 0; i + 1 < n; ++i) {
          search_.run({vs[i]}, ok, n / 2 - 1);
          for (std::size_t j = i + 1; j < n; ++j) {
            std::size_t arc = std::min(j - i, n - (j - i));
            if (!search_.reached(vs[j])) {
              continue;
            }
            auto d = static_cast<std::size_t>(search_.dist(vs[j]));
            if (d < arc && arc - d > best_gain) {
              best_gain = arc - d;
              bi        = i;
              bj        = j;
            }
          }
        }
        if (best_gain == 0) {
          return false;
        }
        search_.run({vs[bi]}, ok, n, vs[bj]);
        Word p    = search_.path_to(vs[bj]).letters;
        auto snap = save(w);
        if (!split_at(w, bi, bj, p, depth)) {
          restore(w, snap);
          return false;
        }
        return true;
      }

      //! Cones the loop off from an apex P: consecutive loop vertices are
      //! joined to P by a breadth-first tree and each thin triangle is filled
      //! on its own. Apexes are tried in order of eccentricity.
      bool cone(Window& w, int depth) {
        auto vs = vertices(w.cur);
        vs.pop_back();
        std::sort(vs.begin(), vs.end());
        vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
        auto                       ok = [&](VertexId v) { return allowed(v); };
        std::vector<std::uint32_t> ecc(b_.size(), 0);
        std::vector<std::uint32_t> hits(b_.size(), 0);
        for (auto v : vs) {
          search_.run({v}, ok);
          for (auto x : search_.visited()) {
            ecc[x] = std::max(ecc[x], static_cast<std::uint32_t>(search_.dist(x)));
            ++hits[x];
          }
        }
        std::vector<VertexId> cand;
        for (VertexId x = 0; x < b_.size(); ++x) {
          if (hits[x] == vs.size() && allowed(x)) {
            cand.push_back(x);
          }
        }
        std::size_t keep = std::min(cand.size(), kConeCandidates);
        std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(keep), cand.end(),
                          [&](VertexId a, VertexId b) {
                            return ecc[a] != ecc[b] ? ecc[a] < ecc[b] : a < b;
                          });
        for (std::size_t c = 0; c < keep; ++c) {
          auto snap = save(w);
          if (cone_from(w, cand[c], depth)) {
            return true;
          }
          restore(w, snap);
          if (states_ > budget_.max_states) {
            return false;
          }
        }
        return false;
      }

      bool cone_from(Window& w, VertexId apex, int depth) {
        auto              ok = [&](VertexId v) { return allowed(v); };
        auto              vs = vertices(w.cur);
        std::size_t const n  = w.cur.word.size();
        search_.run({apex}, ok);
        std::vector<Word> tree(n);
        for (std::size_t k = 0; k < n; ++k) {
          tree[k] = search_.path_to(vs[k]).letters;
        }
        std::size_t lq = 0;
        for (std::size_t k = 0; k + 1 < n; ++k) {
          Word p = free_reduce(concat(inverse(tree[k]), tree[k + 1]));
          if (!split_at(w, lq, lq + 1, p, depth + 1)) {
            return false;
          }
          std::size_t lp = p.size();
          while (lq > 0 && lp > 0 && w.cur.word[lq] == inverse(w.cur.word[lq - 1])) {
            exec(w, Op{Op::rem, lq - 1});
            --lq;
            --lp;
          }
          lq += lp;
        }
        return true;
      }

      static std::string key(Based const& x) {
        std::string k(sizeof(VertexId) + x.word.size(), '\0');
        std::memcpy(k.data(), &x.base, sizeof(VertexId));
        std::memcpy(k.data() + sizeof(VertexId), x.word.data(), x.word.size());
        return k;
      }

      //! Breadth-first search over cell moves for a strictly shorter loop.
      bool local_search(Window& w) {
        {
          Based           x = w.cur;
          std::vector<Op> ops;
          canonical_ops(x, ops);
          exec_all(w, ops);
        }
        std::size_t const n0 = w.cur.word.size();
        struct Node {
          Based           state;
          std::int64_t    parent;
          std::vector<Op> ops;
        };
        std::vector<Node>               nodes{{w.cur, -1, {}}};
        std::unordered_set<std::string> seen{key(w.cur)};
        for (std::size_t head = 0; head < nodes.size(); ++head) {
          Based const st = nodes[head].state;
          auto        vs = vertices(st);
          std::size_t n  = st.word.size();
          for (std::size_t i = 0; i < n; ++i) {
            for (std::uint32_t f = 0; f < forms_.size(); ++f) {
              auto const& rho = forms_[f].rho;
              std::size_t lcp = match(st.word, i, rho);
              if (lcp == 0 || !cell_ok(vs[i], forms_[f])) {
                continue;
              }
              for (std::size_t m = 1; m <= lcp; ++m) {
                if (n - m + rho.size() - m > cap_) {
                  cap_hit_ = true;
                  continue;
                }
                Based           child = st;
                std::vector<Op> ops;
                if (i > 0) {
                  ops.push_back({Op::rot, i});
                  apply(child, ops.back());
                }
                ops.push_back({Op::cell, 0, f, m});
                apply(child, ops.back());
                canonical_ops(child, ops);
                if (!seen.insert(key(child)).second) {
                  continue;
                }
                ++states_;
                if (child.word.size() < n0) {
                  std::vector<std::vector<Op> const*> chain{&ops};
                  for (auto p = static_cast<std::int64_t>(head); p > 0; p = nodes[p].parent) {
                    chain.push_back(&nodes[static_cast<std::size_t>(p)].ops);
                  }
                  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
                    exec_all(w, **it);
                  }
                  return true;
                }
                if (states_ > budget_.max_states) {
                  return false;
                }
                nodes.push_back({std::move(child), static_cast<std::int64_t>(head), std::move(ops)});
              }
            }
          }
        }
        return false;
      }

      CayleyComplexBall const& c_;
      CayleyBall const&        b_;
      std::size_t              r_;
      FillBudget               budget_;
      std::vector<CellForm>    forms_;
      BallSearch               search_;
      std::size_t              cap_     = 0;
      bool                     cap_hit_ = false;
      std::size_t              states_  = 0;
      std::vector<Move>        moves_;
    };

  }  // namespace detail

  //! Searches for a van Kampen filling of `l` outside B(r). Z^2 loops with
  //! nonzero winding number are obstructed before any search.
  inline FillResult fill_outside(CayleyComplexBall const& c,
                                 Loop const&              l,
                                 std::size_t              r,
                                 FillBudget               budget = {}) {
    auto const& b = c.ball();
    if (budget.max_states == 0) {
      throw PreconditionError("fill budget must be positive");
    }
    if (r + 1 >= b.radius()) {
      throw PreconditionError("fill_outside needs r + 1 < R");
    }
    if (l.base >= b.size() || !is_closed(b, l)) {
      throw PreconditionError("loop is not closed inside the ball");
    }
    if (loop_min_dist(b, l) <= r) {
      throw PreconditionError("loop meets B(" + std::to_string(r) + ")");
    }
    FillResult res;
    if (b.model().traits().planar_winding) {
      if (auto w = winding_number(b, l); w != 0) {
        res.outcome     = FillOutcome::obstructed;
        res.obstruction = Obstruction{"winding", w};
        return res;
      }
    }
    detail::Filler f(c, r, budget);
    bool           ok = f.run(l);
    res.states        = f.states();
    res.length_cap    = f.cap();
    res.cap_binding   = f.cap_binding();
    if (!ok) {
      res.outcome = FillOutcome::unknown;
      return res;
    }
    res.certificate = f.moves();
    auto rep        = replay_certificate(c, l, res.certificate, r);
    if (!rep.valid || !rep.final_loop.word.empty()) {
      throw std::logic_error("filling certificate failed replay: "
                             + (rep.valid ? std::string("loop not emptied") : rep.error));
    }
    res.outcome  = FillOutcome::filled;
    res.replayed = true;
    return res;
  }

  inline nlohmann::json to_json(FillResult const& r, Alphabet const& a) {
    nlohmann::json j;
    j["outcome"] = to_string(r.outcome);
    if (r.obstruction) {
      j["obstruction"] = {{"id", r.obstruction->id}, {"value", r.obstruction->value}};
    }
    j["states"]             = r.states;
    j["length_cap"]         = r.length_cap;
    j["length_cap_binding"] = r.cap_binding;
    j["replayed"]           = r.replayed;
    j["certificate"]        = certificate_json(r.certificate, a);
    return j;
  }

}  // namespace sciball
