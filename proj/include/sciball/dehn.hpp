#pragma once

#include <cstddef>
#include <vector>

#include "error.hpp"
#include "presentation.hpp"
#include "word.hpp"

namespace sciball {

  //! Dehn's algorithm: while some subword is more than half of a cyclic
  //! conjugate of a relator (or its inverse), replace the leftmost such subword,
  //! choosing the longest match there, by the inverse of the complement.
  inline Word dehn_reduce(GroupPresentation const& p, Word const& w) {
    if (!p.augmentation_bound && !satisfies_c_prime_sixth(p)) {
      throw PreconditionError(
          "Dehn reduction needs a C'(1/6) presentation or an augmented one");
    }
    auto const sym = symmetrized_relators(p);
    Word       cur = free_reduce(w);
    while (true) {
      bool replaced = false;
      for (std::size_t i = 0; i < cur.size() && !replaced; ++i) {
        std::size_t best_k = 0;
        Word const* best   = nullptr;
        for (auto const& r : sym) {
          std::size_t k = 0;
          while (k < r.size() && i + k < cur.size() && cur[i + k] == r[k]) {
            ++k;
          }
          if (2 * k > r.size() && k > best_k) {
            best_k = k;
            best   = &r;
          }
        }
        if (best == nullptr) {
          continue;
        }
        Word tail(best->begin() + best_k, best->end());
        Word next(cur.begin(), cur.begin() + i);
        Word repl = inverse(tail);
        next.insert(next.end(), repl.begin(), repl.end());
        next.insert(next.end(), cur.begin() + i + best_k, cur.end());
        cur      = free_reduce(next);
        replaced = true;
      }
      if (!replaced) {
        return cur;
      }
    }
  }

}  // namespace sciball
