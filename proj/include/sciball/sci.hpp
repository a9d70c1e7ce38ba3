#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "cayley.hpp"
#include "error.hpp"
#include "filling.hpp"
#include "growth.hpp"
#include "loop.hpp"
#include "model.hpp"
#include "parallel.hpp"
#include "rays.hpp"
#include "replay.hpp"
#include "word.hpp"

namespace sciball {

  struct ProbeLoop {
    //! "cell", "tracer" or "random".
    std::string kind;
    Loop        loop;
  };

  struct ProbeSettings {
    //! Cell boundaries taken from the innermost annulus layer, evenly sampled.
    std::size_t   max_cells     = 64;
    std::size_t   random_loops  = 8;
    //! Random loops walk half this many steps and return along a shortest path.
    std::size_t   random_length = 12;
    std::uint64_t seed          = 1;
  };

  //! (g_j G_i)^k (G_i G_j)^k (G_j g_i)^k (g_i g_j)^k based at g_i^k: the l1
  //! sphere of radius k in the plane of two generators when they commute.
  inline std::optional<Loop> plane_tracer(CayleyBall const& b, std::size_t i, std::size_t j, std::size_t k) {
    Letter gi = static_cast<Letter>(2 * i);
    Letter gj = static_cast<Letter>(2 * j);
    Word   w;
    auto   rep = [&](Letter x, Letter y) {
      for (std::size_t t = 0; t < k; ++t) {
        w.push_back(x);
        w.push_back(y);
      }
    };
    rep(gj, inverse(gi));
    rep(inverse(gi), inverse(gj));
    rep(inverse(gj), gi);
    rep(gi, gj);
    auto base = b.vertex_of(Word(k, gi));
    if (!base) {
      return std::nullopt;
    }
    Loop l{*base, std::move(w)};
    if (!is_closed(b, l)) {
      return std::nullopt;
    }
    return l;
  }

  namespace detail {

    inline std::optional<Loop> generic_tracer(CayleyBall const& b, std::size_t N) {
      auto pts = b.sphere(N + 1);
      if (pts.size() < 2) {
        return std::nullopt;
      }
      std::size_t const     count = std::min<std::size_t>(6, pts.size());
      std::vector<VertexId> picks;
      for (std::size_t t = 0; t < count; ++t) {
        picks.push_back(pts[t * pts.size() / count]);
      }
      BallSearch s(b);
      auto       ok = [&](VertexId v) { return b.dist(v) > N; };
      Loop       l{picks.front(), {}};
      for (std::size_t t = 0; t < count; ++t) {
        VertexId to = picks[(t + 1) % count];
        s.run({picks[t]}, ok, std::numeric_limits<std::size_t>::max(), to);
        if (!s.reached(to)) {
          return std::nullopt;
        }
        auto p = s.path_to(to).letters;
        l.word.insert(l.word.end(), p.begin(), p.end());
      }
      return l;
    }

  }  // namespace detail

  //! The probe family at radius N; every loop has all vertices at dist > N.
  //! Cells whose least vertex lies at dist N + 1, one plane tracer per
  //! generator pair at radius N + 1 (a generic sphere tracer when none
  //! closes), and seeded random loops starting on the sphere of radius N + 1.
  inline std::vector<ProbeLoop> probe_loops(CayleyComplexBall const& c, std::size_t N, ProbeSettings const& s) {
    auto const& b = c.ball();
    if (N + 2 > b.radius()) {
      throw PreconditionError("probe loops at N need N + 2 <= R");
    }
    std::vector<ProbeLoop> out;

    std::vector<Loop> cells;
    for (auto const& cell : c.cells()) {
      Loop l{cell.base, c.relators()[cell.relator]};
      if (loop_min_dist(b, l) == N + 1) {
        cells.push_back(std::move(l));
      }
    }
    std::size_t take = std::min(cells.size(), s.max_cells);
    for (std::size_t t = 0; t < take; ++t) {
      out.push_back({"cell", cells[t * cells.size() / take]});
    }

    std::size_t const gens    = b.num_letters() / 2;
    bool              tracers = false;
    for (std::size_t i = 0; i < gens; ++i) {
      for (std::size_t j = i + 1; j < gens; ++j) {
        auto l = plane_tracer(b, i, j, N + 1);
        if (l && loop_min_dist(b, *l) > N) {
          out.push_back({"tracer", std::move(*l)});
          tracers = true;
        }
      }
    }
    if (!tracers) {
      if (auto l = detail::generic_tracer(b, N)) {
        out.push_back({"tracer", std::move(*l)});
      }
    }

    std::mt19937_64 rng(s.seed + 0x9E3779B97F4A7C15ULL * (N + 1));
    auto            start_pts = b.sphere(N + 1);
    BallSearch      search(b);
    auto            ok = [&](VertexId v) { return b.dist(v) > N; };
    for (std::size_t q = 0; q < s.random_loops && !start_pts.empty(); ++q) {
      std::uniform_int_distribution<std::size_t> pick(0, start_pts.size() - 1);
      VertexId                                   start = start_pts[pick(rng)];
      VertexId                                   v     = start;
      Word                                       w;
      for (std::size_t t = 0; t < s.random_length / 2; ++t) {
        std::vector<Letter> opts;
        for (std::size_t l = 0; l < b.num_letters(); ++l) {
          auto     x = static_cast<Letter>(l);
          VertexId u = b.neighbor(v, x);
          if (u != kNoVertex && ok(u) && (w.empty() || x != inverse(w.back()))) {
            opts.push_back(x);
          }
        }
        if (opts.empty()) {
          break;
        }
        std::uniform_int_distribution<std::size_t> d(0, opts.size() - 1);
        Letter                                     x = opts[d(rng)];
        w.push_back(x);
        v = b.neighbor(v, x);
      }
      search.run({v}, ok, std::numeric_limits<std::size_t>::max(), start);
      if (!search.reached(start)) {
        continue;
      }
      auto back = search.path_to(start).letters;
      w.insert(w.end(), back.begin(), back.end());
      out.push_back({"random", Loop{start, std::move(w)}});
    }
    return out;
  }

  struct SciSettings {
    std::size_t   window = 8;
    ProbeSettings probes;
    FillBudget    budget;
    std::size_t   threads = 1;
  };

  namespace detail {

    struct LevelTally {
      std::size_t               probes     = 0;
      std::size_t               success    = 0;
      std::size_t               unknown    = 0;
      std::size_t               obstructed = 0;
      std::size_t               replayed   = 0;
      std::vector<std::int64_t> obstruction_values;

      bool all_succeeded() const {
        return success == probes;
      }
      nlohmann::json json(std::size_t N) const {
        nlohmann::json j;
        j["N"]          = N;
        j["probes"]     = probes;
        j["success"]    = success;
        j["unknown"]    = unknown;
        j["obstructed"] = obstructed;
        j["replayed"]   = replayed;
        if (!obstruction_values.empty()) {
          j["obstruction_values"] = obstruction_values;
        }
        return j;
      }
    };

    inline void check_sci_model(GroupModel const& m, std::size_t window) {
      if (!m.has_presentation()) {
        m.presentation();
      }
      if (!m.traits().sci_candidate) {
        throw PreconditionError("model '" + m.name() + "' is not flagged as an sci candidate");
      }
      if (window < 3) {
        throw PreconditionError("window must be at least 3");
      }
    }

    inline GrowthSample threshold_sample(std::size_t r, std::size_t window, std::optional<std::size_t> lo_fail,
                                         std::optional<std::size_t> hi) {
      GrowthSample s;
      s.r      = r;
      s.mode   = SampleMode::interval;
      s.lo     = static_cast<std::int64_t>(lo_fail.value_or(r));
      s.window = window;
      if (hi) {
        s.hi = static_cast<std::int64_t>(*hi);
      }
      s.value = s.hi.value_or(s.lo);
      return s;
    }

  }  // namespace detail

  //! Sci growth intervals. For each r the probe family is filled outside B(r)
  //! at N = r, r + 1, ... up to R - 2; hi is the first N at which every probe
  //! fills, lo the greatest N below it at which some probe did not.
  inline GrowthTable sci_growth_table(ModelPtr m, std::size_t r_max, SciSettings const& s, std::size_t r_min = 1) {
    detail::check_sci_model(*m, s.window);
    if (r_max + 2 > s.window) {
      throw PreconditionError("sci table needs r + 2 <= window");
    }
    auto        ball = CayleyBall::build(m, s.window);
    auto        c    = make_complex(ball);
    GrowthTable t;
    t.kind                      = GrowthKind::sci;
    t.model                     = m->name();
    t.metadata["window"]        = s.window;
    t.metadata["ball_vertices"] = ball->size();
    t.metadata["max_states"]    = s.budget.max_states;
    t.metadata["seed"]          = s.probes.seed;
    auto levels_json            = nlohmann::json::object();

    std::vector<std::optional<std::vector<ProbeLoop>>> cache(s.window);
    for (std::size_t r = r_min; r <= r_max; ++r) {
      std::optional<std::size_t> lo_fail;
      std::optional<std::size_t> hi;
      auto                       rows = nlohmann::json::array();
      for (std::size_t N = r; N + 2 <= s.window; ++N) {
        if (!cache[N]) {
          cache[N] = probe_loops(*c, N, s.probes);
        }
        auto const&              probes = *cache[N];
        std::vector<FillResult> results(probes.size());
        parallel_for(probes.size(), s.threads,
                     [&](std::size_t i) { results[i] = fill_outside(*c, probes[i].loop, r, s.budget); });
        detail::LevelTally tally;
        tally.probes = probes.size();
        for (auto const& res : results) {
          switch (res.outcome) {
            case FillOutcome::filled:
              ++tally.success;
              tally.replayed += res.replayed ? 1 : 0;
              break;
            case FillOutcome::unknown:
              ++tally.unknown;
              break;
            case FillOutcome::obstructed:
              ++tally.obstructed;
              tally.obstruction_values.push_back(res.obstruction->value);
              break;
          }
        }
        rows.push_back(tally.json(N));
        if (tally.all_succeeded()) {
          hi = N;
          break;
        }
        lo_fail = N;
      }
      levels_json[std::to_string(r)] = std::move(rows);
      t.add(detail::threshold_sample(r, s.window, lo_fail, hi));
    }
    t.metadata["levels"] = std::move(levels_json);
    return t;
  }

  //! A loop homotoped rel a ray: the base only slides along the ray.
  struct SemistabilityProbe {
    Path              ray;
    std::size_t       inner    = 0;
    std::size_t       target   = 0;
    bool              success  = false;
    //! Greatest least-dist over the loops of the certificate.
    std::size_t       achieved = 0;
    //! "trivial", "fill" (fill outside B(n), then slide) or "push".
    std::string       method;
    std::vector<Move> certificate;
    Loop              final_loop;
    bool              replayed = false;
    std::size_t       states   = 0;
  };

  namespace detail {

    //! Best-first search over loops based on the ray: cell moves, free
    //! reductions and slides of the base, preferring loops farther out.
    class Pusher {
     public:
      Pusher(CayleyComplexBall const& c, Path const& ray, std::size_t n, std::size_t target, FillBudget budget)
          : c_(c), b_(c.ball()), ray_(ray), n_(n), target_(target), budget_(budget), forms_(cell_forms(c)) {}

      //! Moves to the best loop found; `reached` tells whether it meets the target.
      std::vector<Move> run(Loop const& l, std::size_t k0, bool& reached) {
        cap_ = budget_.max_length ? budget_.max_length : 2 * l.word.size() + 8;
        nodes_.push_back({k0, l.word, -1, {}, loop_min_dist(b_, l)});
        seen_.insert(key(k0, l.word));
        std::priority_queue<Entry> open;
        open.push({nodes_[0].min_dist, l.word.size(), 0});
        std::size_t best = 0;
        reached          = nodes_[0].min_dist >= target_;
        while (!open.empty() && !reached && states_ < budget_.max_states) {
          auto e = open.top();
          open.pop();
          for (auto& child : expand(e.node)) {
            if (!seen_.insert(key(child.k, child.word)).second) {
              continue;
            }
            ++states_;
            std::size_t id = nodes_.size();
            nodes_.push_back(std::move(child));
            auto const& nd = nodes_.back();
            if (nd.min_dist > nodes_[best].min_dist) {
              best = id;
            }
            if (nd.min_dist >= target_) {
              best    = id;
              reached = true;
              break;
            }
            open.push({nd.min_dist, nd.word.size(), id});
          }
        }
        std::vector<std::vector<Move> const*> chain;
        for (auto p = static_cast<std::int64_t>(best); p > 0; p = nodes_[static_cast<std::size_t>(p)].parent) {
          chain.push_back(&nodes_[static_cast<std::size_t>(p)].moves);
        }
        std::vector<Move> out;
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
          out.insert(out.end(), (*it)->begin(), (*it)->end());
        }
        return out;
      }

      std::size_t states() const noexcept {
        return states_;
      }

     private:
      struct Node {
        std::size_t       k;
        Word              word;
        std::int64_t      parent;
        std::vector<Move> moves;
        std::size_t       min_dist;
      };
      struct Entry {
        std::size_t min_dist;
        std::size_t length;
        std::size_t node;
        bool        operator<(Entry const& o) const {
          if (min_dist != o.min_dist) {
            return min_dist < o.min_dist;
          }
          if (length != o.length) {
            return length > o.length;
          }
          return node > o.node;
        }
      };

      static std::string key(std::size_t k, Word const& w) {
        std::string s = std::to_string(k) + ":";
        s.append(w.begin(), w.end());
        return s;
      }

      std::vector<VertexId> vertices(std::size_t k, Word const& w) const {
        return b_.trace(ray_.vertices[k], w)->vertices;
      }

      std::size_t least(std::vector<VertexId> const& vs) const {
        std::size_t m = std::numeric_limits<std::size_t>::max();
        for (auto v : vs) {
          m = std::min(m, b_.dist(v));
        }
        return m;
      }

      void reduce(Node& x) const {
        std::size_t i = 0;
        while (i + 1 < x.word.size()) {
          if (x.word[i + 1] != inverse(x.word[i])) {
            ++i;
            continue;
          }
          auto vs = vertices(x.k, x.word);
          Move mv;
          mv.kind     = MoveKind::remove;
          mv.pos      = i;
          mv.min_dist = std::min(b_.dist(vs[i]), b_.dist(vs[i + 1]));
          x.moves.push_back(mv);
          x.word.erase(x.word.begin() + static_cast<std::ptrdiff_t>(i),
                       x.word.begin() + static_cast<std::ptrdiff_t>(i + 2));
          i = i > 0 ? i - 1 : 0;
        }
      }

      void finish(Node& x, std::vector<Node>& out) const {
        reduce(x);
        auto vs    = vertices(x.k, x.word);
        x.min_dist = least(vs);
        out.push_back(std::move(x));
      }

      std::vector<Node> expand(std::size_t id) const {
        Node const&       st = nodes_[id];
        std::vector<Node> out;
        auto              vs = vertices(st.k, st.word);
        for (int dir : {1, -1}) {
          if ((dir < 0 && st.k == 0) || (dir > 0 && st.k >= ray_.length())) {
            continue;
          }
          std::size_t k2 = dir > 0 ? st.k + 1 : st.k - 1;
          if (b_.dist(ray_.vertices[k2]) <= n_) {
            continue;
          }
          Letter x = dir > 0 ? ray_.letters[st.k] : inverse(ray_.letters[k2]);
          Node   child{k2, {}, static_cast<std::int64_t>(id), {}, 0};
          child.word.push_back(inverse(x));
          child.word.insert(child.word.end(), st.word.begin(), st.word.end());
          child.word.push_back(x);
          if (child.word.size() > cap_ + 2) {
            continue;
          }
          Move mv;
          mv.kind     = MoveKind::slide;
          mv.letter   = x;
          mv.min_dist = std::min(b_.dist(ray_.vertices[st.k]), b_.dist(ray_.vertices[k2]));
          child.moves.push_back(mv);
          finish(child, out);
        }
        std::size_t const len = st.word.size();
        for (std::size_t i = 0; i < len; ++i) {
          for (std::uint32_t f = 0; f < forms_.size(); ++f) {
            auto const& rho = forms_[f].rho;
            std::size_t lcp = 0;
            while (i + lcp < len && lcp < rho.size() && st.word[i + lcp] == rho[lcp]) {
              ++lcp;
            }
            if (lcp == 0) {
              continue;
            }
            auto path = b_.trace(vs[i], rho);
            if (!path) {
              continue;
            }
            std::size_t lo = least(path->vertices);
            if (lo <= n_) {
              continue;
            }
            for (std::size_t m = 1; m <= lcp; ++m) {
              if (len - m + rho.size() - m > cap_) {
                continue;
              }
              Node child{st.k, st.word, static_cast<std::int64_t>(id), {}, 0};
              Word repl = inverse(Word(rho.begin() + static_cast<std::ptrdiff_t>(m), rho.end()));
              child.word.erase(child.word.begin() + static_cast<std::ptrdiff_t>(i),
                               child.word.begin() + static_cast<std::ptrdiff_t>(i + m));
              child.word.insert(child.word.begin() + static_cast<std::ptrdiff_t>(i), repl.begin(), repl.end());
              Move mv;
              mv.kind     = MoveKind::cell;
              mv.pos      = i;
              mv.relator  = forms_[f].relator;
              mv.offset   = forms_[f].offset;
              mv.inverted = forms_[f].inverted;
              mv.length   = static_cast<std::uint32_t>(m);
              mv.min_dist = lo;
              child.moves.push_back(mv);
              finish(child, out);
            }
          }
        }
        return out;
      }

      CayleyComplexBall const&        c_;
      CayleyBall const&               b_;
      Path const&                     ray_;
      std::size_t                     n_;
      std::size_t                     target_;
      FillBudget                      budget_;
      std::vector<CellForm>           forms_;
      std::size_t                     cap_    = 0;
      std::size_t                     states_ = 0;
      std::vector<Node>               nodes_;
      std::unordered_set<std::string> seen_;
    };

  }  // namespace detail

  //! Homotopes `l`, based on the ray, to a loop with every vertex at dist
  //! >= target, never touching B(n). A constant loop just slides out. Otherwise
  //! the loop is first filled outside B(n) and the constant loop slid out;
  //! when that fails a best-first push search runs. The certificate is
  //! replayed against the ray before returning.
  inline SemistabilityProbe semistability_probe(CayleyComplexBall const& c,
                                                Path const&              ray,
                                                Loop const&              l,
                                                std::size_t              n,
                                                std::size_t              target,
                                                FillBudget               budget = {}) {
    auto const& b = c.ball();
    if (budget.max_states == 0) {
      throw PreconditionError("fill budget must be positive");
    }
    if (ray.vertices.empty() || ray.vertices.front() != CayleyBall::identity()) {
      throw PreconditionError("ray must start at the identity");
    }
    auto it = std::find(ray.vertices.begin(), ray.vertices.end(), l.base);
    if (it == ray.vertices.end()) {
      throw PreconditionError("loop base is not on the ray");
    }
    if (target >= b.radius() || target > b.dist(ray.vertices.back())) {
      throw PreconditionError("target radius must be below R and reachable along the ray");
    }
    if (!is_closed(b, l)) {
      throw PreconditionError("loop is not closed inside the ball");
    }
    if (loop_min_dist(b, l) <= n) {
      throw PreconditionError("loop meets B(" + std::to_string(n) + ")");
    }
    auto const         k0 = static_cast<std::size_t>(it - ray.vertices.begin());
    SemistabilityProbe res;
    res.ray    = ray;
    res.inner  = n;
    res.target = target;

    auto slide_out = [&](std::size_t k, std::vector<Move>& moves) {
      for (; b.dist(ray.vertices[k]) < target; ++k) {
        Letter      x = ray.letters[k];
        std::size_t d = std::min(b.dist(ray.vertices[k]), b.dist(ray.vertices[k + 1]));
        Move        s;
        s.kind     = MoveKind::slide;
        s.letter   = x;
        s.min_dist = d;
        moves.push_back(s);
        Move rm;
        rm.kind     = MoveKind::remove;
        rm.pos      = 0;
        rm.min_dist = d;
        moves.push_back(rm);
      }
    };

    bool done = false;
    if (l.word.empty()) {
      res.method = "trivial";
      slide_out(k0, res.certificate);
      done = true;
    } else if (n + 1 < b.radius()) {
      auto f     = fill_outside(c, l, n, budget);
      res.states = f.states;
      if (f.outcome == FillOutcome::filled) {
        res.method      = "fill";
        res.certificate = std::move(f.certificate);
        slide_out(k0, res.certificate);
        done = true;
      }
    }
    if (!done) {
      res.method = "push";
      detail::Pusher p(c, ray, n, target, budget);
      bool           reached = false;
      res.certificate        = p.run(l, k0, reached);
      res.states += p.states();
    }
    auto rep = replay_certificate(c, l, res.certificate, n, &ray.vertices);
    if (!rep.valid) {
      throw std::logic_error("semistability certificate failed replay: " + rep.error);
    }
    res.replayed   = true;
    res.final_loop = rep.final_loop;
    res.achieved   = rep.max_min_dist;
    res.success    = loop_min_dist(b, rep.final_loop) >= target;
    return res;
  }

  inline nlohmann::json to_json(SemistabilityProbe const& p, CayleyBall const& b) {
    auto const&    a = b.model().alphabet();
    nlohmann::json j;
    j["ray"]         = p.ray.letters.empty() ? std::string("1") : b.model().format(p.ray.letters);
    j["inner"]       = p.inner;
    j["target"]      = p.target;
    j["success"]     = p.success;
    j["achieved"]    = p.achieved;
    j["method"]      = p.method;
    j["states"]      = p.states;
    j["replayed"]    = p.replayed;
    j["final_loop"]  = format_loop(b, p.final_loop);
    j["certificate"] = certificate_json(p.certificate, a);
    return j;
  }

  //! Semistability thresholds: for each r, probe loops at N = r, r + 1, ...
  //! are rotated onto a vertex lying on a geodesic ray and pushed, outside
  //! B(r), to the window edge R - 1. hi is the first N at which every probe
  //! succeeds.
  inline GrowthTable semistability_table(ModelPtr m, std::size_t r_max, SciSettings const& s, std::size_t r_min = 1) {
    detail::check_sci_model(*m, s.window);
    if (r_max + 2 > s.window) {
      throw PreconditionError("semistability table needs r + 2 <= window");
    }
    auto        ball = CayleyBall::build(m, s.window);
    auto        c    = make_complex(ball);
    RaySet      rays(*ball);
    std::size_t target = s.window - 1;
    GrowthTable t;
    t.kind                      = GrowthKind::semistability;
    t.model                     = m->name();
    t.metadata["window"]        = s.window;
    t.metadata["target"]        = target;
    t.metadata["ball_vertices"] = ball->size();
    t.metadata["max_states"]    = s.budget.max_states;
    t.metadata["seed"]          = s.probes.seed;
    auto levels_json            = nlohmann::json::object();

    for (std::size_t r = r_min; r <= r_max; ++r) {
      std::optional<std::size_t> lo_fail;
      std::optional<std::size_t> hi;
      auto                       rows = nlohmann::json::array();
      for (std::size_t N = r; N + 2 <= s.window; ++N) {
        auto                    probes = probe_loops(*c, N, s.probes);
        std::vector<int>        ok(probes.size(), 0);
        std::vector<int>        replayed(probes.size(), 0);
        parallel_for(probes.size(), s.threads, [&](std::size_t i) {
          Loop        l  = probes[i].loop;
          std::size_t n  = l.word.size();
          auto        vs = *loop_vertices(*ball, l);
          for (std::size_t k = 0; k < std::max<std::size_t>(n, 1); ++k) {
            if (!rays.contains(vs[k])) {
              continue;
            }
            Loop rl  = rotate_loop(*ball, l, k);
            auto res = semistability_probe(*c, rays.ray_through(rl.base), rl, r, target, s.budget);
            ok[i]       = res.success ? 1 : 0;
            replayed[i] = res.replayed ? 1 : 0;
            return;
          }
        });
        detail::LevelTally tally;
        tally.probes   = probes.size();
        tally.success  = static_cast<std::size_t>(std::count(ok.begin(), ok.end(), 1));
        tally.unknown  = tally.probes - tally.success;
        tally.replayed = static_cast<std::size_t>(std::count(replayed.begin(), replayed.end(), 1));
        rows.push_back(tally.json(N));
        if (tally.all_succeeded()) {
          hi = N;
          break;
        }
        lo_fail = N;
      }
      levels_json[std::to_string(r)] = std::move(rows);
      t.add(detail::threshold_sample(r, s.window, lo_fail, hi));
    }
    t.metadata["levels"] = std::move(levels_json);
    return t;
  }

}  // namespace sciball
