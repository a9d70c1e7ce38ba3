#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "word.hpp"

namespace sciball {

  //! A finite presentation < generators | relators >.
  struct GroupPresentation {
    std::string              name = "unnamed";
    Alphabet                 alphabet;
    std::vector<Word>        relators;
    //! When set, every trivial cyclically reduced word shorter than this bound
    //! has been adjoined to `relators`.
    std::optional<std::size_t> augmentation_bound;

    std::size_t num_generators() const noexcept {
      return alphabet.size();
    }
  };

  namespace detail {
    inline std::string_view trim(std::string_view s) {
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
      }
      while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
      }
      return s;
    }

    inline std::size_t column_of(std::string_view line, std::string_view part) {
      return static_cast<std::size_t>(part.data() - line.data()) + 1;
    }
  }  // namespace detail

  //! Parses the line-oriented `name:` / `gens:` / `rel:` format.
  inline GroupPresentation parse_presentation(std::string_view text) {
    GroupPresentation        p;
    std::vector<std::string> gens;
    bool                     have_gens = false;
    struct PendingRel {
      std::string_view body;
      std::string_view line;
      std::size_t      lineno;
    };
    std::vector<PendingRel> rels;

    std::size_t lineno = 0;
    std::size_t start  = 0;
    bool        last   = false;
    while (!last) {
      std::size_t end = text.find('\n', start);
      last            = end == std::string_view::npos;
      if (last) {
        end = text.size();
      }
      std::string_view line = text.substr(start, end - start);
      start                 = end + 1;
      ++lineno;
      if (!line.empty() && line.back() == '\r') {
        line.remove_suffix(1);
      }
      std::string_view content = line;
      if (auto hash = content.find('#'); hash != std::string_view::npos) {
        content = content.substr(0, hash);
      }
      if (detail::trim(content).empty()) {
        continue;
      }
      auto colon = content.find(':');
      if (colon == std::string_view::npos) {
        auto t = detail::trim(content);
        throw ParseError("expected '<key>:'", lineno, detail::column_of(line, t));
      }
      auto key  = detail::trim(content.substr(0, colon));
      auto body = content.substr(colon + 1);
      if (key == "name") {
        auto n = detail::trim(body);
        if (n.empty()) {
          throw ParseError("empty name", lineno, colon + 2);
        }
        p.name = std::string(n);
      } else if (key == "gens") {
        if (have_gens) {
          throw ParseError("generators declared twice", lineno, detail::column_of(line, key));
        }
        have_gens = true;
        std::size_t i = 0;
        while (i < body.size()) {
          if (std::isspace(static_cast<unsigned char>(body[i]))) {
            ++i;
            continue;
          }
          std::size_t j = i;
          while (j < body.size() && !std::isspace(static_cast<unsigned char>(body[j]))) {
            ++j;
          }
          std::string_view id  = body.substr(i, j - i);
          std::size_t      col = detail::column_of(line, id);
          if (!std::islower(static_cast<unsigned char>(id[0]))) {
            throw ParseError("generator id must start with a lowercase letter", lineno, col);
          }
          for (char c : id) {
            if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') {
              throw ParseError("invalid character in generator id", lineno, col);
            }
          }
          for (auto const& g : gens) {
            if (g == id) {
              throw ParseError("duplicate generator '" + std::string(id) + "'", lineno, col);
            }
          }
          gens.emplace_back(id);
          i = j;
        }
        if (gens.empty()) {
          throw ParseError("empty generator list", lineno, colon + 2);
        }
      } else if (key == "rel") {
        rels.push_back({body, line, lineno});
      } else {
        throw ParseError("unknown key '" + std::string(key) + "'",
                         lineno,
                         detail::column_of(line, key));
      }
    }
    if (!have_gens) {
      throw ParseError("empty generator list", lineno == 0 ? 1 : lineno, 1);
    }
    p.alphabet = Alphabet(gens);
    for (auto const& r : rels) {
      auto body = detail::trim(r.body);
      if (body.empty()) {
        continue;
      }
      Word        w;
      std::size_t pos = 0;
      if (!p.alphabet.try_parse(body, w, pos)) {
        throw ParseError("unknown generator symbol '" + std::string(1, body[pos]) + "'",
                         r.lineno,
                         detail::column_of(r.line, body) + pos);
      }
      w = free_reduce(w);
      if (w.empty()) {
        throw ParseError("relator freely reduces to empty", r.lineno, detail::column_of(r.line, body));
      }
      p.relators.push_back(std::move(w));
    }
    return p;
  }

  inline std::string format_presentation(GroupPresentation const& p) {
    std::ostringstream os;
    os << "name: " << p.name << "\ngens:";
    for (auto const& n : p.alphabet.names()) {
      os << ' ' << n;
    }
    os << '\n';
    for (auto const& r : p.relators) {
      os << "rel: " << p.alphabet.format(r) << '\n';
    }
    return os.str();
  }

  //! All cyclic permutations of the cyclically reduced relators and of their
  //! inverses, without repetition, in a deterministic order.
  inline std::vector<Word> symmetrized_relators(GroupPresentation const& p) {
    std::set<Word>    seen;
    std::vector<Word> out;
    for (auto const& r : p.relators) {
      Word c = cyclic_reduce(r);
      if (c.empty()) {
        continue;
      }
      for (Word const& base : {c, inverse(c)}) {
        for (std::size_t k = 0; k < base.size(); ++k) {
          Word rot = rotate_left(base, k);
          if (seen.insert(rot).second) {
            out.push_back(std::move(rot));
          }
        }
      }
    }
    return out;
  }

  //! A piece is a common prefix of two distinct members of the symmetrized
  //! relator set.
  struct PieceReport {
    std::size_t longest_piece = 0;
    bool        c_prime_sixth = true;
  };

  inline PieceReport small_cancellation_report(GroupPresentation const& p) {
    auto        sym = symmetrized_relators(p);
    PieceReport rep;
    for (std::size_t i = 0; i < sym.size(); ++i) {
      std::size_t longest_here = 0;
      for (std::size_t j = 0; j < sym.size(); ++j) {
        if (i == j) {
          continue;
        }
        auto const& u = sym[i];
        auto const& v = sym[j];
        std::size_t k = 0;
        while (k < u.size() && k < v.size() && u[k] == v[k]) {
          ++k;
        }
        longest_here = std::max(longest_here, k);
      }
      rep.longest_piece = std::max(rep.longest_piece, longest_here);
      if (6 * longest_here >= sym[i].size()) {
        rep.c_prime_sixth = false;
      }
    }
    return rep;
  }

  inline bool satisfies_c_prime_sixth(GroupPresentation const& p) {
    return small_cancellation_report(p).c_prime_sixth;
  }

}  // namespace sciball
