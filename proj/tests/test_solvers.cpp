#include <catch_amalgamated.hpp>

#include <array>
#include <map>
#include <random>
#include <set>

#include <sciball/oracles.hpp>
#include <sciball/zoo.hpp>

#include "generators.hpp"

using namespace sciball;

namespace {

  std::vector<std::string> const kZoo = {"Zd:2", "Zd:3", "Zd:2+diag", "free:2", "surface2",
                                         "racg:pentagon", "bs12", "trefoil_amalgam"};

  // Laurent polynomials in t, for the reduced Burau representation of B3.
  using Poly = std::map<int, std::int64_t>;
  using Mat  = std::array<Poly, 4>;

  Poly mono(int e, std::int64_t c) {
    return c == 0 ? Poly{} : Poly{{e, c}};
  }

  Poly add(Poly a, Poly const& b) {
    for (auto [e, c] : b) {
      if ((a[e] += c) == 0) {
        a.erase(e);
      }
    }
    return a;
  }

  Poly mul(Poly const& a, Poly const& b) {
    Poly out;
    for (auto [e, c] : a) {
      for (auto [f, d] : b) {
        out = add(out, mono(e + f, c * d));
      }
    }
    return out;
  }

  Mat mul(Mat const& x, Mat const& y) {
    return {add(mul(x[0], y[0]), mul(x[1], y[2])), add(mul(x[0], y[1]), mul(x[1], y[3])),
            add(mul(x[2], y[0]), mul(x[3], y[2])), add(mul(x[2], y[1]), mul(x[3], y[3]))};
  }

  Mat const kId{mono(0, 1), {}, {}, mono(0, 1)};
  Mat const kS1{mono(1, -1), mono(0, 1), {}, mono(0, 1)};
  Mat const kS1i{mono(-1, -1), mono(-1, 1), {}, mono(0, 1)};
  Mat const kS2{mono(0, 1), {}, mono(1, 1), mono(1, -1)};
  Mat const kS2i{mono(0, 1), {}, mono(0, 1), mono(-1, -1)};

  // x = s1 s2 s1, y = s1 s2.
  Mat burau(Word const& w) {
    Mat m = kId;
    for (Letter l : w) {
      switch (l) {
        case 0: m = mul(mul(mul(m, kS1), kS2), kS1); break;
        case 1: m = mul(mul(mul(m, kS1i), kS2i), kS1i); break;
        case 2: m = mul(mul(m, kS1), kS2); break;
        default: m = mul(mul(m, kS2i), kS1i);
      }
    }
    return m;
  }

  // Tits representation of a right-angled Coxeter group.
  using Vec = std::vector<std::int64_t>;
  using IMat = std::vector<Vec>;

  IMat tits(std::vector<std::vector<bool>> const& adj, Word const& w) {
    std::size_t n = adj.size();
    IMat        m(n, Vec(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
      m[i][i] = 1;
    }
    auto form = [&](std::size_t i, std::size_t j) -> std::int64_t {
      return i == j ? 1 : (adj[i][j] ? 0 : -1);
    };
    for (Letter l : w) {
      std::size_t s = generator_of(l);
      // m <- m * s, where s(e_j) = e_j - 2 B(e_s, e_j) e_s.
      IMat next = m;
      for (std::size_t j = 0; j < n; ++j) {
        std::int64_t c = -2 * form(s, j);
        for (std::size_t i = 0; i < n; ++i) {
          next[i][j] += c * m[i][s];
        }
      }
      m = std::move(next);
    }
    return m;
  }

  struct LampState {
    int           pos = 0;
    std::set<int> lit;
    bool operator==(LampState const&) const = default;
  };

  LampState simulate(Word const& w) {
    LampState s;
    for (Letter l : w) {
      if (generator_of(l) == 0) {
        if (!s.lit.erase(s.pos)) {
          s.lit.insert(s.pos);
        }
      } else {
        s.pos += is_inverse_letter(l) ? -1 : 1;
      }
    }
    return s;
  }

}  // namespace

TEST_CASE("relators and their conjugates are trivial", "[solver]") {
  std::mt19937_64 rng(21);
  for (auto const& name : kZoo) {
    auto        m = zoo_group(name);
    auto const& p = m->presentation();
    INFO(name);
    for (auto const& r : p.relators) {
      CHECK(m->solver().is_identity(r));
      CHECK(m->solver().is_identity(inverse(r)));
    }
    if (p.relators.empty()) {
      continue;
    }
    for (int i = 0; i < 200; ++i) {
      Word w = gen::random_trivial_word(rng, p.relators, m->num_letters(), gen::uniform(rng, 1, 3), 6);
      CHECK(m->solver().is_identity(w));
    }
  }
}

TEST_CASE("inserting a relator anywhere leaves the normal form unchanged", "[solver][property]") {
  std::mt19937_64 rng(20);
  for (auto const& name : kZoo) {
    auto        m = zoo_group(name);
    auto const& s = m->solver();
    INFO(name);
    for (int i = 0; i < 1000; ++i) {
      Word w  = gen::random_word(rng, m->num_letters(), gen::uniform(rng, 0, 12));
      Word nf = s.normal_form(w);
      for (auto const& r : m->presentation().relators) {
        for (std::size_t pos = 0; pos <= w.size(); ++pos) {
          Word x = w;
          x.insert(x.begin() + static_cast<std::ptrdiff_t>(pos), r.begin(), r.end());
          CHECK(s.normal_form(x) == nf);
        }
      }
    }
  }
}

TEST_CASE("normal forms are stable and represent their keys", "[solver]") {
  std::mt19937_64 rng(22);
  auto            zoo = kZoo;
  zoo.push_back("lamplighter");
  for (auto const& name : zoo) {
    auto        m = zoo_group(name);
    auto const& s = m->solver();
    INFO(name);
    for (int i = 0; i < 300; ++i) {
      Word w  = gen::random_word(rng, m->num_letters(), gen::uniform(rng, 0, 14));
      Key  k  = s.key_of(w);
      Word nf = s.to_word(k);
      CHECK(s.key_of(nf) == k);
      CHECK(s.to_word(s.key_of(nf)) == nf);
      CHECK(is_freely_reduced(nf));
      if (auto len = s.length(k)) {
        CHECK(*len <= nf.size());
      }
      CHECK(s.is_identity(concat(w, inverse(w))));
    }
  }
}

TEST_CASE("bs12 solver agrees with the affine action", "[solver][bs12]") {
  auto            m = bs12_model();
  std::mt19937_64 rng(23);
  for (int i = 0; i < 3000; ++i) {
    Word u = gen::random_word(rng, 4, gen::uniform(rng, 0, 14));
    Word v = gen::random_word(rng, 4, gen::uniform(rng, 0, 14));
    CHECK(m->solver().equal(u, v) == (gen::affine_of(u) == gen::affine_of(v)));
    Word z = gen::random_trivial_word(rng, m->presentation().relators, 4, 2, 4);
    REQUIRE(gen::affine_trivial(z));
    CHECK(m->solver().is_identity(z));
  }
}

TEST_CASE("lamplighter solver agrees with direct simulation", "[solver][lamplighter]") {
  auto            m = lamplighter_model();
  std::mt19937_64 rng(24);
  for (int i = 0; i < 3000; ++i) {
    Word u = gen::random_word(rng, 4, gen::uniform(rng, 0, 16));
    Word v = gen::random_word(rng, 4, gen::uniform(rng, 0, 16));
    CHECK(m->solver().equal(u, v) == (simulate(u) == simulate(v)));
  }
  CHECK(m->solver().is_identity(Word{0, 0}));
  CHECK_FALSE(m->has_presentation());
  CHECK_THROWS_AS(m->presentation(), PreconditionError);
}

TEST_CASE("trefoil solver agrees with the Burau representation", "[solver][trefoil]") {
  auto            m = trefoil_model();
  auto const&     s = m->solver();
  std::mt19937_64 rng(25);
  REQUIRE(burau(Word{0, 0}) == burau(Word{2, 2, 2}));
  for (int i = 0; i < 1500; ++i) {
    Word u = gen::random_word(rng, 4, gen::uniform(rng, 0, 12));
    Word v = gen::random_word(rng, 4, gen::uniform(rng, 0, 12));
    CHECK(s.equal(u, v) == (burau(u) == burau(v)));
    Word w = gen::random_word(rng, 4, gen::uniform(rng, 0, 12));
    CHECK(s.equal(concat(Word{0, 0}, w), concat(w, Word{0, 0})));
  }
  CHECK_FALSE(s.equal(Word{0, 2}, Word{2, 0}));
}

TEST_CASE("racg solver agrees with the Tits representation", "[solver][racg]") {
  auto            g   = CoxeterGraph::cycle(5);
  auto            adj = g.adjacency();
  auto            m   = racg_model(g, "pentagon");
  std::mt19937_64 rng(26);
  for (int i = 0; i < 3000; ++i) {
    Word u = gen::random_word(rng, 10, gen::uniform(rng, 0, 12));
    Word v = gen::random_word(rng, 10, gen::uniform(rng, 0, 12));
    CHECK(m->solver().equal(u, v) == (tits(adj, u) == tits(adj, v)));
  }
  CHECK(g.group_one_ended());
  CHECK(g.group_hyperbolic());
}

TEST_CASE("abelian coordinates are exponent sums", "[solver][abelian]") {
  auto            m = zd_model(3);
  std::mt19937_64 rng(27);
  for (int i = 0; i < 1000; ++i) {
    Word                      w = gen::random_word(rng, 6, gen::uniform(rng, 0, 20));
    std::vector<std::int64_t> sum(3, 0);
    for (Letter l : w) {
      sum[generator_of(l)] += is_inverse_letter(l) ? -1 : 1;
    }
    auto c = m->solver().coordinates(m->solver().key_of(w));
    REQUIRE(c);
    CHECK(*c == sum);
    std::size_t l1 = 0;
    for (auto x : sum) {
      l1 += static_cast<std::size_t>(std::abs(x));
    }
    CHECK(m->solver().normal_form(w).size() == l1);
  }
  auto diag = zd_model(2, true);
  CHECK(diag->solver().equal(Word{4}, Word{0, 2}));
  CHECK_THROWS_AS(AbelianSolver(2, {{1, 0}}), PreconditionError);
  CHECK_THROWS_AS(zd_model(3, true), PreconditionError);
}

TEST_CASE("free solver is free reduction", "[solver][free]") {
  auto            m = free_model(3);
  std::mt19937_64 rng(28);
  for (int i = 0; i < 1000; ++i) {
    Word w = gen::random_word(rng, 6, gen::uniform(rng, 0, 20));
    CHECK(m->solver().normal_form(w) == free_reduce(w));
  }
}

TEST_CASE("zoo lookup", "[solver][zoo]") {
  CHECK(zoo_group("Zd:4")->num_letters() == 8);
  CHECK(zoo_group("racg-pentagon")->num_letters() == 10);
  CHECK(zoo_group("trefoil")->name() == "trefoil_amalgam");
  CHECK_THROWS_AS(zoo_group("nonsense"), PreconditionError);
  CHECK_THROWS_AS(zoo_group("free:0"), PreconditionError);
}
