#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "error.hpp"
#include "model.hpp"
#include "solver.hpp"
#include "word.hpp"

namespace sciball {

  using VertexId                  = std::uint32_t;
  constexpr VertexId kNoVertex    = std::numeric_limits<VertexId>::max();
  constexpr std::int32_t kUnreached = -1;

  //! An edge path in a ball: vertices[i] --letters[i]--> vertices[i+1].
  struct Path {
    std::vector<VertexId> vertices;
    Word                  letters;

    std::size_t length() const noexcept {
      return letters.size();
    }
    VertexId front() const {
      return vertices.front();
    }
    VertexId back() const {
      return vertices.back();
    }
    bool operator==(Path const&) const = default;
  };

  using GeodesicSegment = Path;

  //! The ball of radius R about the identity in the Cayley graph, with
  //! vertices indexed in shortlex order of their shortlex-least geodesics.
  class CayleyBall {
   public:
    //! With `truncate`, a budget overrun yields the largest complete ball that
    //! fits instead of an error.
    static std::shared_ptr<CayleyBall const> build(ModelPtr    model,
                                                   std::size_t R,
                                                   std::size_t max_vertices = 10'000'000,
                                                   bool        truncate     = false) {
      auto ball = std::shared_ptr<CayleyBall>(new CayleyBall(std::move(model)));
      ball->construct(R, max_vertices, truncate);
      return ball;
    }

    GroupModel const& model() const noexcept {
      return *model_;
    }
    ModelPtr const& model_ptr() const noexcept {
      return model_;
    }
    WordSolver const& solver() const noexcept {
      return model_->solver();
    }
    std::size_t radius() const noexcept {
      return radius_;
    }
    std::size_t size() const noexcept {
      return dist_.size();
    }
    std::size_t num_letters() const noexcept {
      return letters_;
    }
    static constexpr VertexId identity() noexcept {
      return 0;
    }

    Key const& key(VertexId v) const {
      return *keys_[v];
    }
    std::size_t dist(VertexId v) const {
      return dist_[v];
    }
    //! Neighbour along letter l, or kNoVertex when it lies outside the ball.
    VertexId neighbor(VertexId v, Letter l) const {
      return adj_[static_cast<std::size_t>(v) * letters_ + l];
    }
    VertexId parent(VertexId v) const {
      return parent_[v];
    }
    Letter parent_letter(VertexId v) const {
      return parent_letter_[v];
    }

    std::optional<VertexId> find(Key const& k) const {
      auto it = index_.find(k);
      if (it == index_.end()) {
        return std::nullopt;
      }
      return it->second;
    }
    //! Vertex of the element represented by w, if it lies in the ball.
    std::optional<VertexId> vertex_of(Word const& w) const {
      return find(solver().key_of(w));
    }
    //! Follows w from v along ball edges; nullopt when the path leaves the ball.
    std::optional<VertexId> walk(VertexId v, Word const& w) const {
      for (Letter l : w) {
        v = neighbor(v, l);
        if (v == kNoVertex) {
          return std::nullopt;
        }
      }
      return v;
    }
    std::optional<Path> trace(VertexId v, Word const& w) const {
      Path p;
      p.vertices.push_back(v);
      for (Letter l : w) {
        v = neighbor(v, l);
        if (v == kNoVertex) {
          return std::nullopt;
        }
        p.vertices.push_back(v);
        p.letters.push_back(l);
      }
      return p;
    }

    //! The shortlex-least geodesic word from the identity to v.
    Word geodesic_word(VertexId v) const {
      Word w;
      while (v != identity()) {
        w.push_back(parent_letter_[v]);
        v = parent_[v];
      }
      std::reverse(w.begin(), w.end());
      return w;
    }
    Path geodesic_from_identity(VertexId v) const {
      return *trace(identity(), geodesic_word(v));
    }

    //! Vertex range [first, last) of the sphere of radius r.
    std::pair<VertexId, VertexId> layer(std::size_t r) const {
      if (r > radius_) {
        throw PreconditionError("sphere radius " + std::to_string(r) + " exceeds ball radius "
                                + std::to_string(radius_));
      }
      return {layer_start_[r], layer_start_[r + 1]};
    }
    std::vector<VertexId> sphere(std::size_t r) const {
      auto [a, b] = layer(r);
      std::vector<VertexId> out(b - a);
      for (VertexId v = a; v < b; ++v) {
        out[v - a] = v;
      }
      return out;
    }

    std::string normal_form_string(VertexId v) const {
      return model_->format(solver().to_word(key(v)));
    }

    //! Index of the element v^-1, which lies in the ball with the same length.
    VertexId inverse_vertex(VertexId v) const {
      auto w = inverse(geodesic_word(v));
      return *walk(identity(), w);
    }

   private:
    explicit CayleyBall(ModelPtr model)
        : model_(std::move(model)), letters_(model_->num_letters()) {}

    VertexId insert(Key k, std::size_t d, VertexId parent, Letter l) {
      auto id               = static_cast<VertexId>(dist_.size());
      auto [it, fresh]      = index_.emplace(std::move(k), id);
      (void) fresh;
      keys_.push_back(&it->first);
      dist_.push_back(static_cast<std::uint16_t>(d));
      parent_.push_back(parent);
      parent_letter_.push_back(l);
      adj_.resize(adj_.size() + letters_, kNoVertex);
      return id;
    }

    void construct(std::size_t R, std::size_t max_vertices, bool truncate) {
      if (R > 60000) {
        throw PreconditionError("radius too large");
      }
      auto const& s = solver();
      insert(s.identity(), 0, kNoVertex, 0);
      layer_start_ = {0};
      std::size_t r = 0;
      for (; r <= R; ++r) {
        VertexId const first = layer_start_[r];
        VertexId const last  = static_cast<VertexId>(dist_.size());
        layer_start_.push_back(last);
        bool overflow = false;
        for (VertexId v = first; v < last; ++v) {
          for (std::size_t l = 0; l < letters_; ++l) {
            auto letter = static_cast<Letter>(l);
            Key  k      = s.multiply(*keys_[v], letter);
            auto it     = index_.find(k);
            VertexId u;
            if (it != index_.end()) {
              u = it->second;
            } else if (r < R && !overflow) {
              if (dist_.size() >= max_vertices) {
                overflow = true;
                if (!truncate) {
                  throw BudgetExceeded("ball vertex budget exceeded at radius "
                                           + std::to_string(r + 1) + " ("
                                           + std::to_string(dist_.size()) + " vertices)",
                                       dist_.size());
                }
                continue;
              }
              u = insert(std::move(k), r + 1, v, letter);
            } else {
              continue;
            }
            adj_[static_cast<std::size_t>(v) * letters_ + l] = u;
          }
        }
        if (overflow) {
          rollback(last);
          break;
        }
      }
      radius_ = std::min(r, R);
      layer_start_.resize(radius_ + 2);
      layer_start_[radius_ + 1] = static_cast<VertexId>(dist_.size());
    }

    //! Drops every vertex with index >= first and the edges into them; the ball
    //! then ends at radius dist(first - 1).
    void rollback(VertexId first) {
      for (VertexId v = first; v < dist_.size(); ++v) {
        index_.erase(*keys_[v]);
      }
      keys_.resize(first);
      dist_.resize(first);
      parent_.resize(first);
      parent_letter_.resize(first);
      adj_.resize(static_cast<std::size_t>(first) * letters_);
      for (auto& u : adj_) {
        if (u != kNoVertex && u >= first) {
          u = kNoVertex;
        }
      }
      // The last complete layer still needs its edges to same-layer vertices
      // discovered after the overflow.
      auto const& s = solver();
      std::size_t r = dist_.empty() ? 0 : dist_.back();
      for (VertexId v = layer_start_[r]; v < first; ++v) {
        for (std::size_t l = 0; l < letters_; ++l) {
          auto& slot = adj_[static_cast<std::size_t>(v) * letters_ + l];
          if (slot == kNoVertex) {
            if (auto it = index_.find(s.multiply(*keys_[v], static_cast<Letter>(l)));
                it != index_.end()) {
              slot = it->second;
            }
          }
        }
      }
    }

    ModelPtr                               model_;
    std::size_t                            letters_;
    std::size_t                            radius_ = 0;
    std::unordered_map<Key, VertexId>      index_;
    std::vector<Key const*>                keys_;
    std::vector<std::uint16_t>             dist_;
    std::vector<VertexId>                  parent_;
    std::vector<Letter>                    parent_letter_;
    std::vector<VertexId>                  adj_;
    std::vector<VertexId>                  layer_start_;
  };

  using BallPtr = std::shared_ptr<CayleyBall const>;

  //! Breadth-first search over a ball, restricted to vertices accepted by a
  //! predicate. Reusable: only touched entries are reset between searches.
  class BallSearch {
   public:
    explicit BallSearch(CayleyBall const& ball)
        : ball_(&ball), dist_(ball.size(), kUnreached), from_(ball.size(), kNoVertex),
          via_(ball.size(), 0) {}

    //! Searches from `sources` up to depth `max_depth`, visiting only vertices
    //! for which `allowed` holds (sources are always admitted). Stops early once
    //! `stop` is reached, if given.
    template <typename Allowed>
    void run(std::vector<VertexId> const& sources,
             Allowed&&                    allowed,
             std::size_t max_depth = std::numeric_limits<std::size_t>::max(),
             VertexId    stop      = kNoVertex) {
      reset();
      std::size_t head = 0;
      for (auto s : sources) {
        if (dist_[s] == kUnreached) {
          dist_[s] = 0;
          order_.push_back(s);
        }
      }
      std::size_t const L = ball_->num_letters();
      while (head < order_.size()) {
        VertexId v = order_[head++];
        if (v == stop) {
          return;
        }
        auto d = static_cast<std::size_t>(dist_[v]);
        if (d >= max_depth) {
          continue;
        }
        for (std::size_t l = 0; l < L; ++l) {
          VertexId u = ball_->neighbor(v, static_cast<Letter>(l));
          if (u == kNoVertex || dist_[u] != kUnreached || !allowed(u)) {
            continue;
          }
          dist_[u] = static_cast<std::int32_t>(d + 1);
          from_[u] = v;
          via_[u]  = static_cast<Letter>(l);
          order_.push_back(u);
        }
      }
    }

    void run(std::vector<VertexId> const& sources,
             std::size_t max_depth = std::numeric_limits<std::size_t>::max(),
             VertexId    stop      = kNoVertex) {
      run(sources, [](VertexId) { return true; }, max_depth, stop);
    }

    //! Searches until a vertex satisfying `goal` is reached and returns it.
    template <typename Allowed, typename Goal>
    std::optional<VertexId> run_until(std::vector<VertexId> const& sources,
                                      Allowed&&                    allowed,
                                      Goal&&                       goal) {
      reset();
      for (auto s : sources) {
        if (dist_[s] == kUnreached) {
          dist_[s] = 0;
          order_.push_back(s);
        }
      }
      std::size_t const L    = ball_->num_letters();
      std::size_t       head = 0;
      while (head < order_.size()) {
        VertexId v = order_[head++];
        if (goal(v)) {
          return v;
        }
        for (std::size_t l = 0; l < L; ++l) {
          VertexId u = ball_->neighbor(v, static_cast<Letter>(l));
          if (u == kNoVertex || dist_[u] != kUnreached || !allowed(u)) {
            continue;
          }
          dist_[u] = dist_[v] + 1;
          from_[u] = v;
          via_[u]  = static_cast<Letter>(l);
          order_.push_back(u);
        }
      }
      return std::nullopt;
    }

    std::int32_t dist(VertexId v) const {
      return dist_[v];
    }
    bool reached(VertexId v) const {
      return dist_[v] != kUnreached;
    }
    //! Vertices in visiting order.
    std::vector<VertexId> const& visited() const noexcept {
      return order_;
    }
    //! Path from the source that reached v to v.
    Path path_to(VertexId v) const {
      Path p;
      while (dist_[v] > 0) {
        p.vertices.push_back(v);
        p.letters.push_back(via_[v]);
        v = from_[v];
      }
      p.vertices.push_back(v);
      std::reverse(p.vertices.begin(), p.vertices.end());
      std::reverse(p.letters.begin(), p.letters.end());
      return p;
    }

   private:
    void reset() {
      for (auto v : order_) {
        dist_[v] = kUnreached;
      }
      order_.clear();
    }

    CayleyBall const*         ball_;
    std::vector<std::int32_t> dist_;
    std::vector<VertexId>     from_;
    std::vector<Letter>       via_;
    std::vector<VertexId>     order_;
  };

  struct PairDistance {
    std::size_t value;
    bool        exact;
  };

  //! Distance inside the ball graph; exact when a geodesic provably fits.
  inline PairDistance pair_distance(CayleyBall const& b, VertexId u, VertexId v) {
    if (u >= b.size() || v >= b.size()) {
      throw PreconditionError("vertex outside ball");
    }
    BallSearch s(b);
    s.run({u}, std::numeric_limits<std::size_t>::max(), v);
    if (!s.reached(v)) {
      throw PreconditionError("vertices lie in different components of the ball graph");
    }
    auto d = static_cast<std::size_t>(s.dist(v));
    return {d, std::min(b.dist(u), b.dist(v)) + d <= b.radius()};
  }

  //! Group distance d(u, v) = |u^-1 v| when the element u^-1 v lies in the
  //! ball; nullopt means the distance exceeds the radius.
  inline std::optional<std::size_t> group_distance(CayleyBall const& b, Key const& u, Key const& v) {
    auto const& s = b.solver();
    Key         x = s.multiply(s.key_of(inverse(s.to_word(u))), s.to_word(v));
    if (auto len = s.length(x)) {
      return *len;
    }
    if (auto id = b.find(x)) {
      return b.dist(*id);
    }
    return std::nullopt;
  }

  inline std::optional<std::size_t> group_distance(CayleyBall const& b, VertexId u, VertexId v) {
    return group_distance(b, b.key(u), b.key(v));
  }

  //! A geodesic of the ball graph u_n, ..., u_0 = v, ..., u_{-m} with m <= n
  //! as large as possible.
  inline GeodesicSegment geodesic_through(CayleyBall const& b, VertexId v, std::size_t n) {
    if (b.dist(v) + n > b.radius()) {
      throw PreconditionError("geodesic_through: dist(v) + n exceeds the ball radius");
    }
    if (n == 0) {
      return Path{{v}, {}};
    }
    BallSearch from_v(b);
    from_v.run({v}, n);
    BallSearch  from_x(b);
    std::size_t best_m = 0;
    VertexId    best_x = kNoVertex;
    VertexId    best_y = kNoVertex;
    std::vector<VertexId> xs;
    for (auto x : from_v.visited()) {
      if (static_cast<std::size_t>(from_v.dist(x)) == n) {
        xs.push_back(x);
      }
    }
    for (auto x : xs) {
      from_x.run({x}, 2 * n);
      for (auto y : from_v.visited()) {
        auto m = static_cast<std::size_t>(from_v.dist(y));
        if (from_x.reached(y) && static_cast<std::size_t>(from_x.dist(y)) == n + m
            && (best_x == kNoVertex || m > best_m)) {
          best_m = m;
          best_x = x;
          best_y = y;
        }
      }
      if (best_x != kNoVertex && best_m == n) {
        break;
      }
    }
    if (best_x == kNoVertex) {
      throw PreconditionError("no geodesic segment of positive length through the vertex");
    }
    Path to_x = from_v.path_to(best_x);
    Path to_y = from_v.path_to(best_y);
    Path seg;
    seg.vertices.assign(to_x.vertices.rbegin(), to_x.vertices.rend());
    seg.letters = inverse(to_x.letters);
    seg.vertices.insert(seg.vertices.end(), to_y.vertices.begin() + 1, to_y.vertices.end());
    seg.letters.insert(seg.letters.end(), to_y.letters.begin(), to_y.letters.end());
    return seg;
  }

  //! A relator translate g.r traced from base vertex g.
  struct Cell {
    std::uint32_t relator;
    VertexId      base;
  };

  //! A ball together with every relator translate whose boundary lies inside
  //! it, each listed once (periodic relators are based at their least vertex).
  class CayleyComplexBall {
   public:
    explicit CayleyComplexBall(BallPtr ball) : ball_(std::move(ball)) {
      auto const& p = ball_->model().presentation();
      for (auto const& r : p.relators) {
        relators_.push_back(cyclic_reduce(r));
      }
      for (std::uint32_t i = 0; i < relators_.size(); ++i) {
        auto const& r = relators_[i];
        if (r.empty()) {
          continue;
        }
        std::size_t period = cyclic_period(r);
        for (VertexId g = 0; g < ball_->size(); ++g) {
          auto path = ball_->trace(g, r);
          if (!path || path->back() != g) {
            continue;
          }
          bool least = true;
          for (std::size_t j = period; j < r.size() && least; j += period) {
            least = path->vertices[j] > g;
          }
          if (least) {
            cells_.push_back({i, g});
          }
        }
      }
    }

    CayleyBall const& ball() const noexcept {
      return *ball_;
    }
    BallPtr const& ball_ptr() const noexcept {
      return ball_;
    }
    std::vector<Word> const& relators() const noexcept {
      return relators_;
    }
    std::vector<Cell> const& cells() const noexcept {
      return cells_;
    }
    Path boundary(Cell const& c) const {
      return *ball_->trace(c.base, relators_[c.relator]);
    }

   private:
    BallPtr           ball_;
    std::vector<Word> relators_;
    std::vector<Cell> cells_;
  };

  using ComplexPtr = std::shared_ptr<CayleyComplexBall const>;

  inline ComplexPtr make_complex(BallPtr ball) {
    return std::make_shared<CayleyComplexBall const>(std::move(ball));
  }

  //! Plain-text adjacency export: a header line, then one line per vertex
  //! "index nf dist letter:neighbour ...".
  inline void write_ball_text(std::ostream& os, CayleyBall const& b) {
    os << "# model " << b.model().name() << " radius " << b.radius() << " vertices " << b.size()
       << '\n';
    auto const& alpha = b.model().alphabet();
    for (VertexId v = 0; v < b.size(); ++v) {
      auto nf = b.normal_form_string(v);
      os << v << ' ' << (nf.empty() ? "1" : nf) << ' ' << b.dist(v);
      for (std::size_t l = 0; l < b.num_letters(); ++l) {
        VertexId u = b.neighbor(v, static_cast<Letter>(l));
        if (u != kNoVertex) {
          os << ' ' << alpha.letter_name(static_cast<Letter>(l)) << ':' << u;
        }
      }
      os << '\n';
    }
  }

}  // namespace sciball
