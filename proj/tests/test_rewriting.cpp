#include <catch_amalgamated.hpp>

#include <random>

#include <sciball/dehn.hpp>
#include <sciball/model.hpp>
#include <sciball/oracles.hpp>
#include <sciball/rewriting.hpp>
#include <sciball/zoo.hpp>

#include "generators.hpp"

using namespace sciball;

namespace {

  bool contains_subword(Word const& w, Word const& u) {
    return std::search(w.begin(), w.end(), u.begin(), u.end()) != w.end();
  }

}  // namespace

TEST_CASE("completion of Z^2 agrees with exponent sums", "[rewriting]") {
  auto p  = parse_presentation("name: z2\ngens: a b\nrel: abAB\n");
  auto rs = knuth_bendix_complete(p);
  REQUIRE(rs.confluent());
  REQUIRE_FALSE(find_unresolved_critical_pair(rs));
  auto            ab = AbelianSolver::standard(2);
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    Word u = gen::random_word(rng, 4, gen::uniform(rng, 0, 12));
    Word v = gen::random_word(rng, 4, gen::uniform(rng, 0, 12));
    bool same_nf = rs.rewrite(u) == rs.rewrite(v);
    CHECK(same_nf == (ab.key_of(u) == ab.key_of(v)));
  }
}

TEST_CASE("normal forms are irreducible and idempotent", "[rewriting]") {
  auto            rs = knuth_bendix_complete(surface2_presentation());
  std::mt19937_64 rng(12);
  for (int i = 0; i < 500; ++i) {
    Word w  = gen::random_word(rng, 8, gen::uniform(rng, 0, 20));
    Word nf = rs.rewrite(w);
    CHECK(rs.rewrite(nf) == nf);
    CHECK(nf.size() <= free_reduce(w).size());
    for (auto const& r : rs.rules()) {
      CHECK_FALSE(contains_subword(nf, r.lhs));
    }
  }
}

TEST_CASE("completion leaves no unresolved critical pair", "[rewriting]") {
  for (auto const& p : {surface2_presentation(),
                        parse_presentation("name: z3\ngens: a b c\nrel: abAB\nrel: acAC\nrel: bcBC\n")}) {
    auto rs = knuth_bendix_complete(p);
    INFO(p.name);
    CHECK(rs.confluent());
    CHECK_FALSE(find_unresolved_critical_pair(rs));
    for (auto const& r : rs.rules()) {
      CHECK(shortlex_less(r.rhs, r.lhs));
    }
  }
}

TEST_CASE("rewriting in random order reaches the same normal form", "[rewriting][property]") {
  std::mt19937_64 rng(14);
  for (auto const& p : {surface2_presentation(),
                        parse_presentation("name: z3\ngens: a b c\nrel: abAB\nrel: acAC\nrel: bcBC\n")}) {
    auto rs = knuth_bendix_complete(p);
    REQUIRE(rs.confluent());
    for (int i = 0; i < 500; ++i) {
      Word w = gen::random_word(rng, p.alphabet.num_letters(), gen::uniform(rng, 0, 18));
      while (true) {
        std::vector<std::pair<std::size_t, Rule const*>> sites;
        for (auto const& r : rs.rules()) {
          for (std::size_t k = 0; k + r.lhs.size() <= w.size(); ++k) {
            if (std::equal(r.lhs.begin(), r.lhs.end(), w.begin() + static_cast<std::ptrdiff_t>(k))) {
              sites.emplace_back(k, &r);
            }
          }
        }
        if (sites.empty()) {
          break;
        }
        auto [k, r] = sites[gen::uniform(rng, 0, sites.size() - 1)];
        Word next(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(k));
        next.insert(next.end(), r->rhs.begin(), r->rhs.end());
        next.insert(next.end(), w.begin() + static_cast<std::ptrdiff_t>(k + r->lhs.size()), w.end());
        w = std::move(next);
      }
      CHECK(w == rs.rewrite(w));
    }
  }
}

TEST_CASE("surface2: Dehn reduction empties every trivial word of length <= 10", "[rewriting]") {
  auto p  = surface2_presentation();
  auto rs = knuth_bendix_complete(p);
  REQUIRE(rs.confluent());
  REQUIRE(rs.rules().size() == 16);
  // Shortlex normal forms are geodesic, so a prefix whose normal form is
  // longer than the letters left cannot start a trivial word; the pruned
  // search still meets every freely reduced trivial word of length <= 10.
  std::size_t const  max_len = 10;
  Word               w;
  std::vector<Word>  nf{Word{}};
  std::size_t        trivial = 0;
  std::size_t        failures = 0;
  auto dfs = [&](auto&& self) -> void {
    if (!w.empty() && nf.back().empty()) {
      ++trivial;
      failures += dehn_reduce(p, w).empty() ? 0 : 1;
    }
    if (w.size() == max_len) {
      return;
    }
    for (Letter l = 0; l < 8; ++l) {
      if (!w.empty() && w.back() == inverse(l)) {
        continue;
      }
      Word next = nf.back();
      rs.append(next, l);
      if (next.size() > max_len - w.size() - 1) {
        continue;
      }
      w.push_back(l);
      nf.push_back(std::move(next));
      self(self);
      nf.pop_back();
      w.pop_back();
    }
  };
  dfs(dfs);
  CHECK(failures == 0);
  // 16 cyclic conjugates of the relator and its inverse, none shorter.
  CHECK(trivial >= 16);

  // On any word the reduction is an equality in the group, so nontrivial
  // words never reduce to the empty word.
  std::mt19937_64 rng(13);
  for (int i = 0; i < 1000; ++i) {
    Word x = gen::random_word(rng, 8, gen::uniform(rng, 0, 16));
    Word d = dehn_reduce(p, x);
    CHECK(rs.rewrite(d) == rs.rewrite(x));
    CHECK(d.empty() == rs.rewrite(x).empty());
  }
  for (int i = 0; i < 1000; ++i) {
    Word w = gen::random_trivial_word(rng, p.relators, 8, gen::uniform(rng, 1, 4), 5);
    CHECK(rs.rewrite(w).empty());
    CHECK(dehn_reduce(p, w).empty());
  }
}

TEST_CASE("incomplete completion is refused", "[rewriting]") {
  CompletionBudget tight{200, 20};
  auto             rs = knuth_bendix_complete(bs12_presentation(), tight);
  CHECK_FALSE(rs.confluent());
  CHECK_THROWS_AS(model_from_presentation(bs12_presentation(), {}, tight), PreconditionError);
}

TEST_CASE("Dehn reduction needs small cancellation", "[rewriting]") {
  auto p = parse_presentation("name: z2\ngens: a b\nrel: abAB\n");
  CHECK_THROWS_AS(dehn_reduce(p, Word{0, 2}), PreconditionError);
}
