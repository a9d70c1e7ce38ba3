#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "error.hpp"
#include "model.hpp"
#include "oracles.hpp"
#include "presentation.hpp"
#include "rewriting.hpp"

namespace sciball {

  namespace detail {
    inline std::vector<std::string> letter_names(std::size_t n) {
      std::vector<std::string> names;
      for (std::size_t i = 0; i < n; ++i) {
        if (n <= 26) {
          names.emplace_back(1, static_cast<char>('a' + i));
        } else {
          names.push_back("g" + std::to_string(i));
        }
      }
      return names;
    }

    inline Word commutator(std::size_t i, std::size_t j) {
      return {letter_of(i), letter_of(j), letter_of(i, true), letter_of(j, true)};
    }

    inline std::size_t parse_count(std::string_view s, std::string const& what) {
      if (s.empty()) {
        throw PreconditionError("missing parameter for " + what);
      }
      std::size_t v = 0;
      for (char c : s) {
        if (c < '0' || c > '9') {
          throw PreconditionError("bad parameter '" + std::string(s) + "' for " + what);
        }
        v = 10 * v + static_cast<std::size_t>(c - '0');
        if (v > 1000) {
          throw PreconditionError("parameter too large for " + what);
        }
      }
      return v;
    }

    //! Accepts "id:arg" and "id(arg)".
    inline std::pair<std::string, std::string> split_zoo_name(std::string_view name) {
      auto colon = name.find(':');
      auto paren = name.find('(');
      if (paren != std::string_view::npos && (colon == std::string_view::npos || paren < colon)) {
        if (name.back() != ')') {
          throw PreconditionError("unbalanced parenthesis in '" + std::string(name) + "'");
        }
        return {std::string(name.substr(0, paren)),
                std::string(name.substr(paren + 1, name.size() - paren - 2))};
      }
      if (colon != std::string_view::npos) {
        return {std::string(name.substr(0, colon)), std::string(name.substr(colon + 1))};
      }
      return {std::string(name), {}};
    }
  }  // namespace detail

  //! Undirected simple graph for right-angled Coxeter groups.
  struct CoxeterGraph {
    std::size_t                                      vertices = 0;
    std::vector<std::pair<std::size_t, std::size_t>> edges;

    static CoxeterGraph cycle(std::size_t n) {
      CoxeterGraph g{n, {}};
      for (std::size_t i = 0; i < n; ++i) {
        g.edges.emplace_back(i, (i + 1) % n);
      }
      return g;
    }

    //! "pentagon", "cycle:<n>" or "<n>:<i>-<j>,<i>-<j>,...".
    static CoxeterGraph parse(std::string_view spec) {
      if (spec.empty() || spec == "pentagon") {
        return cycle(5);
      }
      if (spec.substr(0, 6) == "cycle:") {
        auto n = detail::parse_count(spec.substr(6), "cycle length");
        if (n < 3) {
          throw PreconditionError("cycle graph needs at least 3 vertices");
        }
        return cycle(n);
      }
      auto colon = spec.find(':');
      if (colon == std::string_view::npos) {
        throw PreconditionError("unknown racg graph '" + std::string(spec) + "'");
      }
      CoxeterGraph g{detail::parse_count(spec.substr(0, colon), "vertex count"), {}};
      std::string_view rest = spec.substr(colon + 1);
      while (!rest.empty()) {
        auto comma = rest.find(',');
        auto item  = rest.substr(0, comma);
        auto dash  = item.find('-');
        if (dash == std::string_view::npos) {
          throw PreconditionError("bad edge '" + std::string(item) + "'");
        }
        auto i = detail::parse_count(item.substr(0, dash), "edge");
        auto j = detail::parse_count(item.substr(dash + 1), "edge");
        if (i >= g.vertices || j >= g.vertices || i == j) {
          throw PreconditionError("bad edge '" + std::string(item) + "'");
        }
        g.edges.emplace_back(i, j);
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      }
      return g;
    }

    std::vector<std::vector<bool>> adjacency() const {
      std::vector<std::vector<bool>> adj(vertices, std::vector<bool>(vertices, false));
      for (auto [i, j] : edges) {
        adj[i][j] = adj[j][i] = true;
      }
      return adj;
    }

    //! Connected, not complete, and no clique separates the graph.
    bool group_one_ended() const {
      auto const  adj = adjacency();
      std::size_t n   = vertices;
      if (n == 0 || n > 20) {
        return false;
      }
      bool complete = true;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          complete = complete && adj[i][j];
        }
      }
      if (complete) {
        return false;
      }
      for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        bool clique = true;
        for (std::size_t i = 0; i < n && clique; ++i) {
          for (std::size_t j = i + 1; j < n && clique; ++j) {
            if ((mask >> i & 1) && (mask >> j & 1)) {
              clique = adj[i][j];
            }
          }
        }
        if (!clique) {
          continue;
        }
        std::vector<std::size_t> rest;
        for (std::size_t i = 0; i < n; ++i) {
          if (!(mask >> i & 1)) {
            rest.push_back(i);
          }
        }
        if (rest.size() < 2) {
          continue;
        }
        std::vector<bool>        seen(n, false);
        std::vector<std::size_t> stack{rest.front()};
        seen[rest.front()] = true;
        std::size_t reached = 1;
        while (!stack.empty()) {
          auto v = stack.back();
          stack.pop_back();
          for (auto u : rest) {
            if (!seen[u] && adj[v][u]) {
              seen[u] = true;
              ++reached;
              stack.push_back(u);
            }
          }
        }
        if (reached != rest.size()) {
          return false;
        }
      }
      return true;
    }

    //! No induced 4-cycle.
    bool group_hyperbolic() const {
      auto const  adj = adjacency();
      std::size_t n   = vertices;
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t c = a + 1; c < n; ++c) {
          if (adj[a][c]) {
            continue;
          }
          std::vector<std::size_t> common;
          for (std::size_t b = 0; b < n; ++b) {
            if (adj[a][b] && adj[c][b]) {
              common.push_back(b);
            }
          }
          for (std::size_t i = 0; i < common.size(); ++i) {
            for (std::size_t j = i + 1; j < common.size(); ++j) {
              if (!adj[common[i]][common[j]]) {
                return false;
              }
            }
          }
        }
      }
      return true;
    }
  };

  inline ModelPtr zd_model(std::size_t d, bool diagonal = false) {
    if (d == 0) {
      throw PreconditionError("Zd needs d >= 1");
    }
    if (diagonal && d != 2) {
      throw PreconditionError("the diagonal generating set is defined for Z^2 only");
    }
    auto              names = detail::letter_names(diagonal ? 3 : d);
    GroupPresentation p;
    p.name     = diagonal ? "Zd(2,diag)" : "Zd(" + std::to_string(d) + ")";
    p.alphabet = Alphabet(names);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i + 1; j < d; ++j) {
        p.relators.push_back(detail::commutator(i, j));
      }
    }
    std::vector<std::vector<std::int32_t>> gens(d, std::vector<std::int32_t>(d, 0));
    for (std::size_t i = 0; i < d; ++i) {
      gens[i][i] = 1;
    }
    if (diagonal) {
      gens.push_back({1, 1});
      p.relators.push_back({letter_of(2), letter_of(1, true), letter_of(0, true)});
    }
    ModelTraits t;
    t.one_ended      = d >= 2;
    t.sci_candidate  = d >= 2;
    t.hyperbolic     = d == 1;
    t.planar_winding = d == 2 && !diagonal;
    auto name        = p.name;
    auto alpha       = p.alphabet;
    return std::make_shared<GroupModel>(
        name, alpha, std::move(p), std::make_shared<AbelianSolver>(d, gens), t);
  }

  inline ModelPtr free_model(std::size_t k) {
    if (k == 0) {
      throw PreconditionError("free(k) needs k >= 1");
    }
    GroupPresentation p;
    p.name     = "free(" + std::to_string(k) + ")";
    p.alphabet = Alphabet(detail::letter_names(k));
    ModelTraits t;
    t.hyperbolic = true;
    auto name    = p.name;
    auto alpha   = p.alphabet;
    return std::make_shared<GroupModel>(
        name, alpha, std::move(p), std::make_shared<FreeSolver>(), t);
  }

  //! Genus-2 surface group. The generator order a, c, b, d makes shortlex
  //! completion finite (16 rules); with a, b, c, d it does not terminate.
  inline GroupPresentation surface2_presentation() {
    return parse_presentation("name: surface2\ngens: a c b d\nrel: abABcdCD\n");
  }

  inline ModelPtr surface2_model() {
    ModelTraits t;
    t.one_ended     = true;
    t.hyperbolic    = true;
    t.sci_candidate = true;
    return model_from_presentation(surface2_presentation(), t);
  }

  inline ModelPtr racg_model(CoxeterGraph const& g, std::string const& label) {
    if (g.vertices == 0) {
      throw PreconditionError("racg needs a nonempty graph");
    }
    GroupPresentation p;
    p.name     = "racg(" + label + ")";
    p.alphabet = Alphabet(detail::letter_names(g.vertices));
    for (std::size_t i = 0; i < g.vertices; ++i) {
      p.relators.push_back({letter_of(i), letter_of(i)});
    }
    auto adj = g.adjacency();
    for (std::size_t i = 0; i < g.vertices; ++i) {
      for (std::size_t j = i + 1; j < g.vertices; ++j) {
        if (adj[i][j]) {
          p.relators.push_back({letter_of(i), letter_of(j), letter_of(i), letter_of(j)});
        }
      }
    }
    ModelTraits t;
    t.one_ended     = g.group_one_ended();
    t.hyperbolic    = g.group_hyperbolic();
    t.sci_candidate = t.one_ended;
    auto name       = p.name;
    auto alpha      = p.alphabet;
    return std::make_shared<GroupModel>(
        name, alpha, std::move(p), std::make_shared<RacgSolver>(adj), t);
  }

  inline GroupPresentation bs12_presentation() {
    return parse_presentation("name: bs12\ngens: a t\nrel: TatAA\n");
  }

  inline ModelPtr bs12_model() {
    ModelTraits t;
    t.one_ended     = true;
    t.sci_candidate = true;
    auto p          = bs12_presentation();
    auto alpha      = p.alphabet;
    return std::make_shared<GroupModel>(
        "bs12", alpha, std::move(p), std::make_shared<Bs12Solver>(), t);
  }

  inline ModelPtr lamplighter_model() {
    ModelTraits t;
    t.finitely_presented = false;
    t.one_ended          = true;
    return std::make_shared<GroupModel>("lamplighter",
                                        Alphabet({"a", "t"}),
                                        std::nullopt,
                                        std::make_shared<LamplighterSolver>(),
                                        t);
  }

  inline GroupPresentation trefoil_presentation() {
    return parse_presentation("name: trefoil_amalgam\ngens: x y\nrel: xxYYY\n");
  }

  inline ModelPtr trefoil_model() {
    ModelTraits t;
    t.one_ended     = true;
    t.sci_candidate = true;
    auto p          = trefoil_presentation();
    auto alpha      = p.alphabet;
    return std::make_shared<GroupModel>(
        "trefoil_amalgam", alpha, std::move(p), std::make_shared<TrefoilSolver>(), t);
  }

  //! Zoo lookup: Zd:<d> (or Zd(<d>)), Zd:2+diag, free:<k>, surface2,
  //! racg:<graph>, bs12, lamplighter, trefoil_amalgam.
  inline ModelPtr zoo_group(std::string_view name) {
    auto [id, arg] = detail::split_zoo_name(name);
    if (id == "Zd") {
      if (arg == "2+diag" || arg == "2,diag") {
        return zd_model(2, true);
      }
      return zd_model(detail::parse_count(arg, "Zd"));
    }
    if (id == "free") {
      return free_model(detail::parse_count(arg, "free"));
    }
    if (id == "surface2" && arg.empty()) {
      return surface2_model();
    }
    if (id == "racg" || id == "racg-pentagon") {
      if (id == "racg-pentagon") {
        arg = "pentagon";
      }
      auto label = arg.empty() ? std::string("pentagon") : arg;
      return racg_model(CoxeterGraph::parse(arg), label);
    }
    if (id == "bs12" && arg.empty()) {
      return bs12_model();
    }
    if (id == "lamplighter" && arg.empty()) {
      return lamplighter_model();
    }
    if ((id == "trefoil_amalgam" || id == "trefoil") && arg.empty()) {
      return trefoil_model();
    }
    throw PreconditionError("unknown zoo group '" + std::string(name) + "'");
  }

}  // namespace sciball
