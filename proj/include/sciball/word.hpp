#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"

namespace sciball {

  //! A signed generator: generator g is letter 2g, its inverse is 2g + 1.
  using Letter = std::uint8_t;
  using Word   = std::vector<Letter>;

  constexpr Letter letter_of(std::size_t generator, bool inverse = false) {
    return static_cast<Letter>(2 * generator + (inverse ? 1 : 0));
  }
  constexpr std::size_t generator_of(Letter l) {
    return l >> 1;
  }
  constexpr bool is_inverse_letter(Letter l) {
    return (l & 1) != 0;
  }
  constexpr Letter inverse(Letter l) {
    return static_cast<Letter>(l ^ 1);
  }

  inline Word inverse(Word const& w) {
    Word out(w.rbegin(), w.rend());
    for (auto& l : out) {
      l = inverse(l);
    }
    return out;
  }

  inline Word concat(Word a, Word const& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  }

  inline bool is_freely_reduced(Word const& w) {
    for (std::size_t i = 1; i < w.size(); ++i) {
      if (w[i] == inverse(w[i - 1])) {
        return false;
      }
    }
    return true;
  }

  inline Word free_reduce(Word const& w) {
    Word out;
    out.reserve(w.size());
    for (Letter l : w) {
      if (!out.empty() && out.back() == inverse(l)) {
        out.pop_back();
      } else {
        out.push_back(l);
      }
    }
    return out;
  }

  //! Free reduction of a cyclic word; also cancels the last letter against the
  //! first.
  inline Word cyclic_reduce(Word const& w) {
    Word        out   = free_reduce(w);
    std::size_t first = 0;
    std::size_t last  = out.size();
    while (last - first >= 2 && out[first] == inverse(out[last - 1])) {
      ++first;
      --last;
    }
    return Word(out.begin() + first, out.begin() + last);
  }

  //! Shortlex order: shorter first, then lexicographic on letter values
  //! (a < A < b < B < ...).
  inline bool shortlex_less(Word const& u, Word const& v) {
    if (u.size() != v.size()) {
      return u.size() < v.size();
    }
    return u < v;
  }

  inline Word rotate_left(Word const& w, std::size_t k) {
    if (w.empty()) {
      return w;
    }
    k %= w.size();
    Word out(w.begin() + k, w.end());
    out.insert(out.end(), w.begin(), w.begin() + k);
    return out;
  }

  //! Smallest p > 0 with w equal to its rotation by p (w.size() if aperiodic).
  inline std::size_t cyclic_period(Word const& w) {
    std::size_t const n = w.size();
    for (std::size_t p = 1; p < n; ++p) {
      if (n % p != 0) {
        continue;
      }
      bool same = true;
      for (std::size_t i = 0; i < n && same; ++i) {
        same = w[i] == w[(i + p) % n];
      }
      if (same) {
        return p;
      }
    }
    return n;
  }

  //! Index of the lexicographically least rotation (Booth's algorithm).
  inline std::size_t least_rotation(Word const& w) {
    std::size_t const n = w.size();
    if (n == 0) {
      return 0;
    }
    std::vector<long> f(2 * n, -1);
    std::size_t       k = 0;
    for (std::size_t j = 1; j < 2 * n; ++j) {
      Letter sj = w[j % n];
      long   i  = f[j - k - 1];
      while (i != -1 && sj != w[(k + i + 1) % n]) {
        if (sj < w[(k + i + 1) % n]) {
          k = j - i - 1;
        }
        i = f[i];
      }
      if (i == -1 && sj != w[(k + i + 1) % n]) {
        if (sj < w[(k + i + 1) % n]) {
          k = j;
        }
        f[j - k] = -1;
      } else {
        f[j - k] = i + 1;
      }
    }
    return k;
  }

  //! Generator names with the inverse-by-capitalisation convention.
  class Alphabet {
   public:
    Alphabet() = default;

    explicit Alphabet(std::vector<std::string> names) : names_(std::move(names)) {
      for (std::size_t i = 0; i < names_.size(); ++i) {
        auto const& n = names_[i];
        if (n.empty() || !std::islower(static_cast<unsigned char>(n[0]))) {
          throw PreconditionError("generator name must start with a lowercase letter: '"
                                  + n + "'");
        }
        for (std::size_t j = 0; j < i; ++j) {
          if (names_[j] == n) {
            throw PreconditionError("duplicate generator '" + n + "'");
          }
        }
      }
      if (names_.size() > 120) {
        throw PreconditionError("too many generators");
      }
    }

    std::size_t size() const noexcept {
      return names_.size();
    }
    std::size_t num_letters() const noexcept {
      return 2 * names_.size();
    }
    std::vector<std::string> const& names() const noexcept {
      return names_;
    }

    std::string letter_name(Letter l) const {
      std::string s = names_.at(generator_of(l));
      if (is_inverse_letter(l)) {
        s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
      }
      return s;
    }

    std::string format(Word const& w) const {
      std::string out;
      for (Letter l : w) {
        out += letter_name(l);
      }
      return out;
    }

    //! Tokenises by longest match; whitespace is skipped. On failure, returns
    //! false and sets `error_pos` to the offending offset.
    bool try_parse(std::string_view text, Word& out, std::size_t& error_pos) const {
      out.clear();
      std::size_t i = 0;
      while (i < text.size()) {
        if (std::isspace(static_cast<unsigned char>(text[i]))) {
          ++i;
          continue;
        }
        std::size_t best_len = 0;
        Letter      best     = 0;
        for (std::size_t g = 0; g < names_.size(); ++g) {
          auto const& n = names_[g];
          if (n.size() <= best_len || i + n.size() > text.size()) {
            continue;
          }
          char c0 = text[i];
          if (std::tolower(static_cast<unsigned char>(c0)) != n[0]
              || text.substr(i + 1, n.size() - 1) != std::string_view(n).substr(1)) {
            continue;
          }
          best_len = n.size();
          best     = letter_of(g, std::isupper(static_cast<unsigned char>(c0)) != 0);
        }
        if (best_len == 0) {
          error_pos = i;
          return false;
        }
        out.push_back(best);
        i += best_len;
      }
      return true;
    }

    Word parse(std::string_view text) const {
      Word        w;
      std::size_t pos = 0;
      if (!try_parse(text, w, pos)) {
        throw ParseError("unknown generator symbol '" + std::string(1, text[pos]) + "'",
                         1,
                         pos + 1);
      }
      return w;
    }

    bool operator==(Alphabet const&) const = default;

   private:
    std::vector<std::string> names_;
  };

}  // namespace sciball
