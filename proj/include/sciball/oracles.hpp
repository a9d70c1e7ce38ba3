#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "solver.hpp"
#include "word.hpp"

namespace sciball {

  //! Free abelian group Z^d. The first d generators must be the standard basis;
  //! further generators are arbitrary integer vectors.
  class AbelianSolver final : public WordSolver {
   public:
    AbelianSolver(std::size_t dim, std::vector<std::vector<std::int32_t>> gens)
        : dim_(dim), gens_(std::move(gens)) {
      if (gens_.size() < dim_) {
        throw PreconditionError("abelian model needs the standard basis first");
      }
      for (std::size_t g = 0; g < gens_.size(); ++g) {
        if (gens_[g].size() != dim_) {
          throw PreconditionError("generator vector has wrong dimension");
        }
        for (std::size_t i = 0; i < dim_ && g < dim_; ++i) {
          if (gens_[g][i] != (i == g ? 1 : 0)) {
            throw PreconditionError("abelian model needs the standard basis first");
          }
        }
      }
    }

    static AbelianSolver standard(std::size_t dim) {
      std::vector<std::vector<std::int32_t>> g(dim, std::vector<std::int32_t>(dim, 0));
      for (std::size_t i = 0; i < dim; ++i) {
        g[i][i] = 1;
      }
      return AbelianSolver(dim, g);
    }

    std::string strategy() const override {
      return "oracle:abelian";
    }
    std::string normal_form_kind() const override {
      return "sorted exponent word over the standard basis";
    }
    Key identity() const override {
      Key k;
      for (std::size_t i = 0; i < dim_; ++i) {
        detail::put<std::int32_t>(k, 0);
      }
      return k;
    }
    Key multiply(Key const& k, Letter l) const override {
      Key  out  = k;
      auto g    = generator_of(l);
      int  sign = is_inverse_letter(l) ? -1 : 1;
      for (std::size_t i = 0; i < dim_; ++i) {
        auto v = detail::get<std::int32_t>(out, 4 * i) + sign * gens_[g][i];
        std::memcpy(out.data() + 4 * i, &v, 4);
      }
      return out;
    }
    Word to_word(Key const& k) const override {
      Word w;
      for (std::size_t i = 0; i < dim_; ++i) {
        auto v = detail::get<std::int32_t>(k, 4 * i);
        w.insert(w.end(), static_cast<std::size_t>(std::abs(v)), letter_of(i, v < 0));
      }
      return w;
    }
    std::optional<std::size_t> length(Key const& k) const override {
      auto c = coords(k);
      if (gens_.size() == dim_) {
        std::size_t s = 0;
        for (auto v : c) {
          s += static_cast<std::size_t>(std::abs(v));
        }
        return s;
      }
      if (dim_ == 2 && gens_.size() == 3 && gens_[2] == std::vector<std::int32_t>{1, 1}) {
        // Using k copies of the diagonal generator costs |k| + |x-k| + |y-k|.
        std::int64_t lo = std::min<std::int64_t>({0, c[0], c[1]});
        std::int64_t hi = std::max<std::int64_t>({0, c[0], c[1]});
        std::int64_t best = std::numeric_limits<std::int64_t>::max();
        for (std::int64_t t = lo; t <= hi; ++t) {
          best = std::min(best, std::abs(t) + std::abs(c[0] - t) + std::abs(c[1] - t));
        }
        return static_cast<std::size_t>(best);
      }
      return std::nullopt;
    }
    std::optional<std::vector<std::int64_t>> coordinates(Key const& k) const override {
      return coords(k);
    }
    std::size_t dimension() const noexcept {
      return dim_;
    }

   private:
    std::vector<std::int64_t> coords(Key const& k) const {
      std::vector<std::int64_t> c(dim_);
      for (std::size_t i = 0; i < dim_; ++i) {
        c[i] = detail::get<std::int32_t>(k, 4 * i);
      }
      return c;
    }

    std::size_t                             dim_;
    std::vector<std::vector<std::int32_t>> gens_;
  };

  //! Free group: the key is the freely reduced word.
  class FreeSolver final : public WordSolver {
   public:
    std::string strategy() const override {
      return "oracle:free";
    }
    std::string normal_form_kind() const override {
      return "freely reduced word";
    }
    Key identity() const override {
      return {};
    }
    Key multiply(Key const& k, Letter l) const override {
      Key out = k;
      if (!out.empty() && static_cast<Letter>(out.back()) == inverse(l)) {
        out.pop_back();
      } else {
        out.push_back(static_cast<char>(l));
      }
      return out;
    }
    Word to_word(Key const& k) const override {
      return detail::key_word(k);
    }
    std::optional<std::size_t> length(Key const& k) const override {
      return k.size();
    }
  };

  //! BS(1,2) = <a, t | t^-1 a t = a^2> acting by x -> 2^k x + b, with
  //! a = (0, 1) and t = (-1, 0) and composition (k1,b1)(k2,b2) =
  //! (k1 + k2, 2^k1 b2 + b1). b is stored as m / 2^e with m odd or zero.
  class Bs12Solver final : public WordSolver {
   public:
    struct Affine {
      std::int32_t k = 0;
      std::int64_t m = 0;
      std::int32_t e = 0;

      bool operator==(Affine const&) const = default;
    };

    static Affine decode(Key const& key) {
      return {detail::get<std::int32_t>(key, 0),
              detail::get<std::int64_t>(key, 4),
              detail::get<std::int32_t>(key, 12)};
    }
    static Key encode(Affine a) {
      Key k;
      detail::put(k, a.k);
      detail::put(k, a.m);
      detail::put(k, a.e);
      return k;
    }

    std::string strategy() const override {
      return "oracle:bs12";
    }
    std::string normal_form_kind() const override {
      return "t^u a^m T^v with u minimal";
    }
    Key identity() const override {
      return encode({});
    }
    Key multiply(Key const& key, Letter l) const override {
      Affine x = decode(key);
      switch (l) {
        case 0:  // a
        case 1:  // A
          x = add_power(x, l == 0 ? 1 : -1);
          break;
        case 2:  // t
          x.k -= 1;
          break;
        case 3:  // T
          x.k += 1;
          break;
        default:
          throw PreconditionError("bs12 has two generators");
      }
      if (std::abs(x.k) > 40) {
        throw PreconditionError("bs12 oracle: exponent out of range");
      }
      return encode(x);
    }
    Word to_word(Key const& key) const override {
      Affine       x = decode(key);
      std::int32_t u = std::max({0, -x.k, x.e});
      std::int32_t v = x.k + u;
      std::int64_t m = x.m << (u - x.e);
      Word         w(static_cast<std::size_t>(u), letter_of(1));
      w.insert(w.end(), static_cast<std::size_t>(std::llabs(m)), letter_of(0, m < 0));
      w.insert(w.end(), static_cast<std::size_t>(v), letter_of(1, true));
      return w;
    }

   private:
    //! b += sign * 2^k.
    static Affine add_power(Affine x, int sign) {
      std::int32_t e = std::max(x.e, -x.k);
      std::int64_t m = x.m << (e - x.e);
      std::int64_t add = std::int64_t{1} << (x.k + e);
      m += sign * add;
      while (e > 0 && m % 2 == 0) {
        m /= 2;
        --e;
      }
      if (m == 0) {
        e = 0;
      }
      if (std::llabs(m) > (std::int64_t{1} << 60)) {
        throw PreconditionError("bs12 oracle: translation out of range");
      }
      return {x.k, m, e};
    }
  };

  //! Lamplighter Z/2 wr Z with generators a (toggle, an involution) and t.
  class LamplighterSolver final : public WordSolver {
   public:
    struct State {
      std::int16_t              position = 0;
      std::vector<std::int16_t> lamps;
    };

    static State decode(Key const& k) {
      State s;
      s.position = detail::get<std::int16_t>(k, 0);
      for (std::size_t i = 2; i < k.size(); i += 2) {
        s.lamps.push_back(detail::get<std::int16_t>(k, i));
      }
      return s;
    }
    static Key encode(State const& s) {
      Key k;
      detail::put(k, s.position);
      for (auto l : s.lamps) {
        detail::put(k, l);
      }
      return k;
    }

    std::string strategy() const override {
      return "oracle:lamplighter";
    }
    std::string normal_form_kind() const override {
      return "shorter of the left-first and right-first sweeps";
    }
    Key identity() const override {
      return encode({});
    }
    Key multiply(Key const& k, Letter l) const override {
      State s = decode(k);
      if (generator_of(l) == 0) {
        auto it = std::lower_bound(s.lamps.begin(), s.lamps.end(), s.position);
        if (it != s.lamps.end() && *it == s.position) {
          s.lamps.erase(it);
        } else {
          s.lamps.insert(it, s.position);
        }
      } else {
        s.position = static_cast<std::int16_t>(s.position + (is_inverse_letter(l) ? -1 : 1));
      }
      return encode(s);
    }
    Word to_word(Key const& k) const override {
      State s = decode(k);
      auto [lo, hi] = span(s);
      int  p        = s.position;
      bool left     = left_first_cost(s) <= right_first_cost(s);
      Word w;
      int  pos = 0;
      auto lit = [&](int x) { return std::binary_search(s.lamps.begin(), s.lamps.end(), x); };
      std::vector<bool> done(static_cast<std::size_t>(hi - lo + 1), false);
      auto              toggle = [&] {
        if (lit(pos) && !done[static_cast<std::size_t>(pos - lo)]) {
          w.push_back(letter_of(0));
          done[static_cast<std::size_t>(pos - lo)] = true;
        }
      };
      auto walk = [&](int target) {
        while (pos != target) {
          toggle();
          int step = target > pos ? 1 : -1;
          w.push_back(letter_of(1, step < 0));
          pos += step;
        }
      };
      if (left) {
        walk(lo);
        walk(hi);
      } else {
        walk(hi);
        walk(lo);
      }
      toggle();
      walk(p);
      return w;
    }
    std::optional<std::size_t> length(Key const& k) const override {
      State s = decode(k);
      return s.lamps.size()
             + static_cast<std::size_t>(std::min(left_first_cost(s), right_first_cost(s)));
    }

   private:
    static std::pair<int, int> span(State const& s) {
      int lo = std::min(0, static_cast<int>(s.position));
      int hi = std::max(0, static_cast<int>(s.position));
      if (!s.lamps.empty()) {
        lo = std::min(lo, static_cast<int>(s.lamps.front()));
        hi = std::max(hi, static_cast<int>(s.lamps.back()));
      }
      return {lo, hi};
    }
    static int left_first_cost(State const& s) {
      auto [lo, hi] = span(s);
      return -lo + (hi - lo) + (hi - s.position);
    }
    static int right_first_cost(State const& s) {
      auto [lo, hi] = span(s);
      return hi + (hi - lo) + (s.position - lo);
    }
  };

  //! <x, y | x^2 = y^3> as z^k times alternating coset representatives from
  //! {x} and {y, y^2}, where z = x^2 = y^3 is central.
  class TrefoilSolver final : public WordSolver {
   public:
    // Syllable codes.
    static constexpr char X  = 1;
    static constexpr char Y  = 2;
    static constexpr char YY = 3;

    std::string strategy() const override {
      return "oracle:trefoil";
    }
    std::string normal_form_kind() const override {
      return "alternating coset representatives followed by a power of x^2, freely reduced";
    }
    Key identity() const override {
      Key k;
      detail::put<std::int32_t>(k, 0);
      return k;
    }
    Key multiply(Key const& key, Letter l) const override {
      auto        z    = detail::get<std::int32_t>(key, 0);
      std::string syl  = key.substr(4);
      char        last = syl.empty() ? 0 : syl.back();
      switch (l) {
        case 0:  // x
          if (last == X) {
            syl.pop_back();
            ++z;
          } else {
            syl.push_back(X);
          }
          break;
        case 1:  // X = x z^-1
          if (last == X) {
            syl.pop_back();
          } else {
            syl.push_back(X);
            --z;
          }
          break;
        case 2:  // y
          if (last == Y) {
            syl.back() = YY;
          } else if (last == YY) {
            syl.pop_back();
            ++z;
          } else {
            syl.push_back(Y);
          }
          break;
        case 3:  // Y = y^2 z^-1
          if (last == Y) {
            syl.pop_back();
          } else if (last == YY) {
            syl.back() = Y;
          } else {
            syl.push_back(YY);
            --z;
          }
          break;
        default:
          throw PreconditionError("trefoil model has two generators");
      }
      Key out;
      detail::put<std::int32_t>(out, z);
      return out + syl;
    }
    Word to_word(Key const& key) const override {
      auto z = detail::get<std::int32_t>(key, 0);
      Word w;
      for (std::size_t i = 4; i < key.size(); ++i) {
        switch (key[i]) {
          case X:
            w.push_back(letter_of(0));
            break;
          case Y:
            w.push_back(letter_of(1));
            break;
          default:
            w.push_back(letter_of(1));
            w.push_back(letter_of(1));
        }
      }
      w.insert(w.end(), static_cast<std::size_t>(2 * std::abs(z)), letter_of(0, z < 0));
      return free_reduce(w);
    }
  };

  //! Right-angled Coxeter group of a graph: involutions, adjacent vertices
  //! commute. The key is the lexicographically least reduced word, so the
  //! letters a and A act identically.
  class RacgSolver final : public WordSolver {
   public:
    explicit RacgSolver(std::vector<std::vector<bool>> commute)
        : commute_(std::move(commute)) {}

    std::string strategy() const override {
      return "oracle:racg";
    }
    std::string normal_form_kind() const override {
      return "lexicographically least reduced word";
    }
    Key identity() const override {
      return {};
    }
    Key multiply(Key const& k, Letter l) const override {
      std::string w = k;
      char        s = static_cast<char>(generator_of(l));
      auto        j = w.rfind(s);
      bool        descent = j != std::string::npos;
      for (std::size_t i = descent ? j + 1 : 0; descent && i < w.size(); ++i) {
        descent = commutes(w[i], s);
      }
      if (descent) {
        w.erase(j, 1);
      } else {
        w.push_back(s);
      }
      return lex_normal(w);
    }
    Word to_word(Key const& k) const override {
      Word w;
      for (char c : k) {
        w.push_back(letter_of(static_cast<std::size_t>(c)));
      }
      return w;
    }
    std::optional<std::size_t> length(Key const& k) const override {
      return k.size();
    }

   private:
    bool commutes(char a, char b) const {
      return commute_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
    }

    std::string lex_normal(std::string w) const {
      std::string out;
      out.reserve(w.size());
      while (!w.empty()) {
        std::size_t best = std::string::npos;
        for (std::size_t i = 0; i < w.size(); ++i) {
          bool front = true;
          for (std::size_t h = 0; h < i && front; ++h) {
            front = commutes(w[h], w[i]);
          }
          if (front && (best == std::string::npos || w[i] < w[best])) {
            best = i;
          }
        }
        out.push_back(w[best]);
        w.erase(best, 1);
      }
      return out;
    }

    std::vector<std::vector<bool>> commute_;
  };

}  // namespace sciball
