#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include <sciball/word.hpp>

namespace gen {

  using sciball::Letter;
  using sciball::Word;

  inline Word random_word(std::mt19937_64& rng, std::size_t num_letters, std::size_t length) {
    std::uniform_int_distribution<std::size_t> pick(0, num_letters - 1);
    Word                                       w(length);
    for (auto& l : w) {
      l = static_cast<Letter>(pick(rng));
    }
    return w;
  }

  inline Word random_reduced_word(std::mt19937_64& rng, std::size_t num_letters, std::size_t length) {
    std::uniform_int_distribution<std::size_t> pick(0, num_letters - 1);
    Word                                       w;
    while (w.size() < length) {
      auto l = static_cast<Letter>(pick(rng));
      if (!w.empty() && w.back() == sciball::inverse(l)) {
        continue;
      }
      w.push_back(l);
    }
    return w;
  }

  inline std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  }

  //! Product of conjugates u r^{+-1} u^-1 of the given relators.
  inline Word random_trivial_word(std::mt19937_64& rng, std::vector<Word> const& relators,
                                  std::size_t num_letters, std::size_t factors, std::size_t conj_length) {
    Word w;
    for (std::size_t i = 0; i < factors; ++i) {
      Word u = random_reduced_word(rng, num_letters, uniform(rng, 0, conj_length));
      Word r = relators[uniform(rng, 0, relators.size() - 1)];
      if (uniform(rng, 0, 1)) {
        r = sciball::inverse(r);
      }
      w.insert(w.end(), u.begin(), u.end());
      w.insert(w.end(), r.begin(), r.end());
      auto ui = sciball::inverse(u);
      w.insert(w.end(), ui.begin(), ui.end());
    }
    return w;
  }

  //! BS(1,2) as maps x -> 2^k x + b with a: x -> x + 1 and t: x -> x / 2; a
  //! word acts as the composite of its letters. b is kept scaled by 2^32.
  struct AffineMap {
    std::int64_t k = 0;
    std::int64_t b = 0;

    bool operator==(AffineMap const&) const = default;
  };

  inline AffineMap affine_of(Word const& w) {
    constexpr std::int64_t scale = 32;
    AffineMap              f;
    for (Letter l : w) {
      switch (l) {
        case 0:
          f.b += std::int64_t{1} << (f.k + scale);
          break;
        case 1:
          f.b -= std::int64_t{1} << (f.k + scale);
          break;
        case 2:
          f.k -= 1;
          break;
        default:
          f.k += 1;
      }
    }
    return f;
  }

  inline bool affine_trivial(Word const& w) {
    return affine_of(w) == AffineMap{};
  }

}  // namespace gen
