#include <catch_amalgamated.hpp>

#include <random>

#include <sciball/filling.hpp>
#include <sciball/replay.hpp>
#include <sciball/zoo.hpp>

#include "generators.hpp"
#include "moves.hpp"

using namespace sciball;

using gen::loop_at;
using gen::random_move;
using gen::square_word;

TEST_CASE("Z^3 loops outside a ball fill with replayed certificates", "[filling]") {
  auto b = CayleyBall::build(zd_model(3), 8);
  auto c = make_complex(b);
  std::vector<Loop> loops = {
      loop_at(*b, {0, 0, 0}, {2, 4, 3, 5}),
      loop_at(*b, {0, 0, 0, 2}, {2, 0, 3, 1}),
      loop_at(*b, {0, 0, 0}, {2, 2, 4, 3, 3, 5}),
      loop_at(*b, {0, 0, 0}, square_word(1)),
      loop_at(*b, {0, 0, 0, 0}, {2, 2, 4, 4, 3, 3, 5, 5}),
  };
  for (auto const& l : loops) {
    INFO(format_loop(*b, l));
    REQUIRE(is_closed(*b, l));
    auto r   = loop_min_dist(*b, l) - 1;
    auto res = fill_outside(*c, l, r);
    REQUIRE(res.outcome == FillOutcome::filled);
    CHECK(res.replayed);
    auto rep = replay_certificate(*c, l, res.certificate, r);
    CHECK(rep.valid);
    CHECK(rep.final_loop.word.empty());
    CHECK(rep.min_dist_seen > r);
    for (auto const& m : res.certificate) {
      CHECK(m.min_dist > r);
    }
  }
}

TEST_CASE("surface2 relator translates fill outside the ball", "[filling]") {
  auto            b   = CayleyBall::build(surface2_model(), 6);
  auto            c   = make_complex(b);
  std::size_t     hit = 0;
  for (auto const& cell : c->cells()) {
    Loop l{cell.base, c->relators()[cell.relator]};
    if (loop_min_dist(*b, l) < 2 || hit >= 10) {
      continue;
    }
    ++hit;
    auto res = fill_outside(*c, l, 1);
    CHECK(res.outcome == FillOutcome::filled);
    CHECK(replay_certificate(*c, l, res.certificate, 1).valid);
  }
  CHECK(hit == 10);
}

TEST_CASE("tampered certificates are rejected", "[filling][replay]") {
  auto b   = CayleyBall::build(zd_model(3), 8);
  auto c   = make_complex(b);
  auto l   = loop_at(*b, {0, 0, 0}, {2, 2, 4, 3, 3, 5});
  auto res = fill_outside(*c, l, 2);
  REQUIRE(res.outcome == FillOutcome::filled);
  auto const& cert = res.certificate;
  REQUIRE(cert.size() >= 2);

  auto rejected = [&](std::vector<Move> const& moves) {
    auto rep = replay_certificate(*c, l, moves, 2);
    return !rep.valid || !rep.final_loop.word.empty();
  };
  CHECK_FALSE(rejected(cert));
  auto drop = cert;
  drop.pop_back();
  CHECK(rejected(drop));
  auto tag = cert;
  tag.front().min_dist += 1;
  CHECK(rejected(tag));
  auto pos = cert;
  pos.front().pos += 100;
  CHECK(rejected(pos));
  auto kind = cert;
  kind.front().kind = kind.front().kind == MoveKind::remove ? MoveKind::insert : MoveKind::remove;
  CHECK(rejected(kind));
  auto slide = cert;
  slide.insert(slide.begin(), Move{MoveKind::slide, 0, 0, 0, 0, false, 0, 3});
  CHECK(rejected(slide));
  // The same certificate is not valid under a larger excluded ball.
  CHECK_FALSE(replay_certificate(*c, l, cert, 3).valid);
}

TEST_CASE("winding number is invariant under valid moves", "[filling][property]") {
  auto            b = CayleyBall::build(zd_model(2), 10);
  auto            c = make_complex(b);
  std::size_t const r = 2;
  std::mt19937_64 rng(41);
  std::vector<std::pair<Loop, std::int64_t>> starts = {
      {loop_at(*b, {0, 0, 0}, square_word(3)), 1},
      {loop_at(*b, {0, 0, 0}, inverse(square_word(3))), -1},
      {loop_at(*b, {0, 0, 0}, concat(square_word(3), square_word(3))), 2},
      {loop_at(*b, {0, 0, 0, 0}, {0, 2, 1, 3}), 0},
  };
  std::size_t applied = 0;
  for (int trial = 0; trial < 500; ++trial) {
    auto [cur, w0] = starts[static_cast<std::size_t>(trial) % starts.size()];
    REQUIRE(winding_number(*b, cur) == w0);
    for (int step = 0; step < 12; ++step) {
      auto m = random_move(rng, *c, cur);
      if (!m) {
        continue;
      }
      auto rep = replay_certificate(*c, cur, {*m}, r);
      if (!rep.valid) {
        continue;
      }
      ++applied;
      cur = rep.final_loop;
      CHECK(winding_number(*b, cur) == w0);
    }
  }
  CHECK(applied > 2000);
}

TEST_CASE("Z^2 loops around the origin are obstructed", "[filling]") {
  auto b = CayleyBall::build(zd_model(2), 12);
  auto c = make_complex(b);
  for (std::size_t r = 1; r <= 4; ++r) {
    Word base(r + 1, 0);
    auto l   = loop_at(*b, base, square_word(r + 1));
    auto res = fill_outside(*c, l, r);
    CHECK(res.outcome == FillOutcome::obstructed);
    REQUIRE(res.obstruction);
    CHECK(res.obstruction->id == "winding");
    CHECK(res.obstruction->value == 1);
    CHECK(res.certificate.empty());
  }
  auto away = loop_at(*b, {0, 0, 0, 0}, {2, 0, 3, 1});
  CHECK(fill_outside(*c, away, 2).outcome == FillOutcome::filled);
}

TEST_CASE("filling preconditions", "[filling]") {
  auto b = CayleyBall::build(zd_model(3), 6);
  auto c = make_complex(b);
  auto l = loop_at(*b, {0, 0}, {2, 0, 3, 1});
  CHECK_THROWS_AS(fill_outside(*c, l, 2), PreconditionError);
  CHECK_THROWS_AS(fill_outside(*c, l, 5), PreconditionError);
  CHECK_THROWS_AS(fill_outside(*c, l, 1, {0, 0}), PreconditionError);
  CHECK_THROWS_AS(fill_outside(*c, Loop{l.base, {2, 0, 3}}, 1), PreconditionError);
  CHECK_THROWS_AS(winding_number(*b, l), PreconditionError);
  CHECK_THROWS_AS(parse_loop(*b, "base=aa; word=ab"), PreconditionError);
  CHECK_THROWS_AS(parse_loop(*b, "word=abAB"), PreconditionError);
  CHECK_THROWS_AS(parse_loop(*b, "base=aaaaaaa; word=abAB"), PreconditionError);
  CHECK_THROWS_AS(parse_loop(*b, "base=1; word=abAB; extra=1"), PreconditionError);
  auto p = parse_loop(*b, " base = aa ;word=abAB ");
  CHECK(p.word == Word{0, 2, 1, 3});
  CHECK(format_loop(*b, p) == "base=aa; word=abAB");
  CHECK(format_loop(*b, Loop{0, {}}) == "base=1; word=1");
}

TEST_CASE("moves round-trip through JSON", "[filling]") {
  auto            m = surface2_model();
  std::mt19937_64 rng(42);
  for (int i = 0; i < 200; ++i) {
    Move mv;
    mv.kind     = static_cast<MoveKind>(gen::uniform(rng, 0, 3));
    mv.min_dist = gen::uniform(rng, 0, 9);
    if (mv.kind != MoveKind::slide) {
      mv.pos = gen::uniform(rng, 0, 30);
    }
    if (mv.kind == MoveKind::insert || mv.kind == MoveKind::slide) {
      mv.letter = static_cast<Letter>(gen::uniform(rng, 0, 7));
    }
    if (mv.kind == MoveKind::cell) {
      mv.relator  = 0;
      mv.offset   = static_cast<std::uint32_t>(gen::uniform(rng, 0, 7));
      mv.inverted = gen::uniform(rng, 0, 1) == 1;
      mv.length   = static_cast<std::uint32_t>(gen::uniform(rng, 0, 8));
    }
    auto j = nlohmann::json::parse(to_json(mv, m->alphabet()).dump());
    CHECK(move_from_json(j, m->alphabet()) == mv);
  }
  CHECK_THROWS_AS(move_from_json({{"kind", "warp"}, {"min_dist", 1}}, m->alphabet()),
                  PreconditionError);
  CHECK_THROWS_AS(move_from_json({{"kind", "insert"}, {"pos", 0}, {"letter", "ab"}, {"min_dist", 1}},
                                 m->alphabet()),
                  PreconditionError);
}

TEST_CASE("fill result JSON", "[filling]") {
  auto b   = CayleyBall::build(zd_model(2), 8);
  auto c   = make_complex(b);
  auto res = fill_outside(*c, loop_at(*b, {0, 0, 0}, square_word(3)), 2);
  auto j   = to_json(res, b->model().alphabet());
  CHECK(j["outcome"] == "obstructed");
  CHECK(j["obstruction"]["id"] == "winding");
  CHECK(j["certificate"].empty());
}
