#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cayley.hpp"
#include "error.hpp"
#include "word.hpp"

namespace sciball {

  //! A closed edge path: a base vertex and the letters read along the path.
  struct Loop {
    VertexId base = 0;
    Word     word;

    bool operator==(Loop const&) const = default;
  };

  //! Vertices visited by the loop, base first and last; nullopt when the path
  //! leaves the ball.
  inline std::optional<std::vector<VertexId>> loop_vertices(CayleyBall const& b, Loop const& l) {
    auto p = b.trace(l.base, l.word);
    if (!p) {
      return std::nullopt;
    }
    return std::move(p->vertices);
  }

  inline bool is_closed(CayleyBall const& b, Loop const& l) {
    auto end = b.walk(l.base, l.word);
    return end && *end == l.base;
  }

  inline std::size_t loop_min_dist(CayleyBall const& b, Loop const& l) {
    auto vs = loop_vertices(b, l);
    if (!vs) {
      throw PreconditionError("loop leaves the ball");
    }
    std::size_t m = b.dist(l.base);
    for (auto v : *vs) {
      m = std::min(m, b.dist(v));
    }
    return m;
  }

  //! Rotation of a loop so that it starts after k letters.
  inline Loop rotate_loop(CayleyBall const& b, Loop const& l, std::size_t k) {
    if (l.word.empty()) {
      return l;
    }
    k %= l.word.size();
    Word prefix(l.word.begin(), l.word.begin() + static_cast<std::ptrdiff_t>(k));
    auto base = b.walk(l.base, prefix);
    if (!base) {
      throw PreconditionError("loop leaves the ball");
    }
    return {*base, rotate_left(l.word, k)};
  }

  //! Parses `base=<normal form>; word=<letters>`; the identity is written 1 or
  //! left empty.
  inline Loop parse_loop(CayleyBall const& b, std::string_view text) {
    auto const& m = b.model();
    auto        trim = [](std::string_view s) {
      while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
      }
      while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
        s.remove_suffix(1);
      }
      return s;
    };
    std::optional<std::string_view> base_text;
    std::optional<std::string_view> word_text;
    while (!text.empty()) {
      auto semi  = text.find(';');
      auto field = trim(text.substr(0, semi));
      text       = semi == std::string_view::npos ? std::string_view{} : text.substr(semi + 1);
      if (field.empty()) {
        continue;
      }
      auto eq = field.find('=');
      if (eq == std::string_view::npos) {
        throw PreconditionError("loop literal: expected key=value, got '" + std::string(field) + "'");
      }
      auto key   = trim(field.substr(0, eq));
      auto value = trim(field.substr(eq + 1));
      if (key == "base") {
        base_text = value;
      } else if (key == "word") {
        word_text = value;
      } else {
        throw PreconditionError("loop literal: unknown key '" + std::string(key) + "'");
      }
    }
    if (!base_text || !word_text) {
      throw PreconditionError("loop literal needs base= and word=");
    }
    Word base_word = (*base_text == "1" || base_text->empty()) ? Word{} : m.parse(*base_text);
    auto base      = b.vertex_of(base_word);
    if (!base) {
      throw PreconditionError("loop base lies outside the ball");
    }
    Loop l{*base, (*word_text == "1" || word_text->empty()) ? Word{} : m.parse(*word_text)};
    if (!is_closed(b, l)) {
      throw PreconditionError("loop is not closed inside the ball");
    }
    return l;
  }

  inline std::string format_loop(CayleyBall const& b, Loop const& l) {
    auto nf = b.normal_form_string(l.base);
    return "base=" + (nf.empty() ? std::string("1") : nf)
           + "; word=" + (l.word.empty() ? std::string("1") : b.model().format(l.word));
  }

  enum class MoveKind { insert, remove, cell, slide };

  inline std::string to_string(MoveKind k) {
    switch (k) {
      case MoveKind::insert:
        return "insert";
      case MoveKind::remove:
        return "remove";
      case MoveKind::cell:
        return "cell";
      case MoveKind::slide:
        return "slide";
    }
    return "?";
  }

  //! One elementary homotopy step on a based loop.
  //!
  //! insert: put `letter` and its inverse at `pos`.
  //! remove: delete the cancelling pair at `pos`, `pos + 1`.
  //! cell: with rho the relator `relator` (inverted if asked) rotated left by
  //!   `offset`, the letters [pos, pos + length) equal rho's prefix and are
  //!   replaced by the inverse of the rest of rho.
  //! slide: move the base along the edge `letter`, conjugating the word.
  //!
  //! `min_dist` is the least distance from the identity among the vertices the
  //! move touches.
  struct Move {
    MoveKind      kind     = MoveKind::insert;
    std::size_t   pos      = 0;
    Letter        letter   = 0;
    std::uint32_t relator  = 0;
    std::uint32_t offset   = 0;
    bool          inverted = false;
    std::uint32_t length   = 0;
    std::size_t   min_dist = 0;

    bool operator==(Move const&) const = default;
  };

  inline nlohmann::json to_json(Move const& m, Alphabet const& a) {
    nlohmann::json j;
    j["kind"] = to_string(m.kind);
    switch (m.kind) {
      case MoveKind::insert:
        j["pos"]    = m.pos;
        j["letter"] = a.letter_name(m.letter);
        break;
      case MoveKind::remove:
        j["pos"] = m.pos;
        break;
      case MoveKind::cell:
        j["pos"]      = m.pos;
        j["relator"]  = m.relator;
        j["offset"]   = m.offset;
        j["inverted"] = m.inverted;
        j["length"]   = m.length;
        break;
      case MoveKind::slide:
        j["letter"] = a.letter_name(m.letter);
        break;
    }
    j["min_dist"] = m.min_dist;
    return j;
  }

  inline Move move_from_json(nlohmann::json const& j, Alphabet const& a) {
    Move        m;
    auto        kind   = j.at("kind").get<std::string>();
    auto letter_of_name = [&](std::string const& s) {
      Word w = a.parse(s);
      if (w.size() != 1) {
        throw PreconditionError("move letter must be a single generator or inverse");
      }
      return w.front();
    };
    if (kind == "insert") {
      m.kind   = MoveKind::insert;
      m.pos    = j.at("pos").get<std::size_t>();
      m.letter = letter_of_name(j.at("letter").get<std::string>());
    } else if (kind == "remove") {
      m.kind = MoveKind::remove;
      m.pos  = j.at("pos").get<std::size_t>();
    } else if (kind == "cell") {
      m.kind     = MoveKind::cell;
      m.pos      = j.at("pos").get<std::size_t>();
      m.relator  = j.at("relator").get<std::uint32_t>();
      m.offset   = j.at("offset").get<std::uint32_t>();
      m.inverted = j.at("inverted").get<bool>();
      m.length   = j.at("length").get<std::uint32_t>();
    } else if (kind == "slide") {
      m.kind   = MoveKind::slide;
      m.letter = letter_of_name(j.at("letter").get<std::string>());
    } else {
      throw PreconditionError("unknown move kind '" + kind + "'");
    }
    m.min_dist = j.at("min_dist").get<std::size_t>();
    return m;
  }

  inline nlohmann::json certificate_json(std::vector<Move> const& moves, Alphabet const& a) {
    auto arr = nlohmann::json::array();
    for (auto const& m : moves) {
      arr.push_back(to_json(m, a));
    }
    return arr;
  }

}  // namespace sciball
