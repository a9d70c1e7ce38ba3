#include <catch_amalgamated.hpp>

#include <random>

#include <sciball/presentation.hpp>
#include <sciball/word.hpp>

#include "generators.hpp"

using namespace sciball;

namespace {

  std::size_t brute_least_rotation(Word const& w) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < w.size(); ++k) {
      if (rotate_left(w, k) < rotate_left(w, best)) {
        best = k;
      }
    }
    return best;
  }

  std::size_t brute_period(Word const& w) {
    for (std::size_t p = 1; p < w.size(); ++p) {
      if (rotate_left(w, p) == w) {
        return p;
      }
    }
    return w.size();
  }

}  // namespace

TEST_CASE("least rotation agrees with brute force", "[word]") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 3000; ++i) {
    auto letters = gen::uniform(rng, 1, 6);
    Word w       = gen::random_word(rng, letters, gen::uniform(rng, 0, 14));
    auto k       = least_rotation(w);
    REQUIRE(rotate_left(w, k) == rotate_left(w, brute_least_rotation(w)));
    REQUIRE(cyclic_period(w) == brute_period(w));
  }
}

TEST_CASE("free and cyclic reduction", "[word]") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    Word w = gen::random_word(rng, 4, gen::uniform(rng, 0, 16));
    Word r = free_reduce(w);
    for (std::size_t j = 0; j + 1 < r.size(); ++j) {
      REQUIRE(r[j + 1] != inverse(r[j]));
    }
    REQUIRE(free_reduce(r) == r);
    REQUIRE(inverse(inverse(w)) == w);
    REQUIRE(free_reduce(concat(w, inverse(w))).empty());
    Word c = cyclic_reduce(w);
    REQUIRE(cyclic_reduce(c) == c);
    if (c.size() >= 2) {
      REQUIRE(c.front() != inverse(c.back()));
    }
  }
}

TEST_CASE("letters encode generator and sign", "[word]") {
  CHECK(letter_of(3) == 6);
  CHECK(letter_of(3, true) == 7);
  CHECK(generator_of(7) == 3);
  CHECK(is_inverse_letter(7));
  CHECK(inverse(Letter{6}) == 7);
}

TEST_CASE("presentation parsing", "[presentation]") {
  auto p = parse_presentation("gens: a b\nrel: abAB");
  REQUIRE(p.alphabet.size() == 2);
  REQUIRE(p.relators.size() == 1);
  CHECK(p.alphabet.format(p.relators[0]) == "abAB");

  auto q = parse_presentation("# comment\nname: s\n\ngens: a c b d\nrel: abABcdCD # octagon\n");
  CHECK(q.name == "s");
  CHECK(q.alphabet.names() == std::vector<std::string>{"a", "c", "b", "d"});

  auto text = format_presentation(q);
  auto back = parse_presentation(text);
  CHECK(back.relators == q.relators);
  CHECK(back.alphabet == q.alphabet);
}

TEST_CASE("presentation parse errors carry positions", "[presentation]") {
  try {
    parse_presentation("gens: a b\nrel: abXB\n");
    FAIL("expected a parse error");
  } catch (ParseError const& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 8);
  }
  CHECK_THROWS_AS(parse_presentation("gens: a a\n"), ParseError);
  CHECK_THROWS_AS(parse_presentation("rel: ab\n"), ParseError);
  CHECK_THROWS_AS(parse_presentation("gens: a\nrel: aA\n"), ParseError);
  CHECK_THROWS_AS(parse_presentation("gens: a\nfoo: a\n"), ParseError);
}

TEST_CASE("multi-character generator names parse by longest match", "[presentation]") {
  Alphabet a({"x", "x1", "y"});
  auto     w = a.parse("x1X1xY");
  REQUIRE(w.size() == 4);
  CHECK(a.format(w) == "x1X1xY");
}
