#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

#include "presentation.hpp"
#include "word.hpp"

namespace sciball {

  struct Rule {
    Word lhs;
    Word rhs;

    bool operator==(Rule const&) const = default;
  };

  struct CompletionBudget {
    std::size_t max_rules       = 2000;
    std::size_t max_rule_length = 48;
  };

  //! A length-reducing string rewriting system over the letters of a group
  //! alphabet, oriented by shortlex.
  class RewritingSystem {
   public:
    RewritingSystem() = default;

    RewritingSystem(std::size_t num_letters,
                    std::vector<Rule> rules,
                    bool confluent,
                    CompletionBudget budget)
        : num_letters_(num_letters),
          rules_(std::move(rules)),
          confluent_(confluent),
          budget_(budget) {
      rebuild_index();
    }

    std::vector<Rule> const& rules() const noexcept {
      return rules_;
    }
    bool confluent() const noexcept {
      return confluent_;
    }
    CompletionBudget const& budget() const noexcept {
      return budget_;
    }
    std::size_t num_letters() const noexcept {
      return num_letters_;
    }

    //! Pushes `l` onto an irreducible word and restores irreducibility. Only
    //! suffix matches can occur, so each step inspects at most one trie path.
    void append(Word& stack, Letter l) const {
      Word pending{l};
      while (!pending.empty()) {
        stack.push_back(pending.back());
        pending.pop_back();
        if (auto r = suffix_match(stack)) {
          auto const& rule = rules_[*r];
          stack.resize(stack.size() - rule.lhs.size());
          pending.insert(pending.end(), rule.rhs.rbegin(), rule.rhs.rend());
        }
      }
    }

    Word rewrite(Word const& w) const {
      Word out;
      out.reserve(w.size());
      for (Letter l : w) {
        append(out, l);
      }
      return out;
    }

    //! Index of a rule whose left side is a suffix of `w`, if any.
    std::optional<std::size_t> suffix_match(Word const& w) const {
      std::int32_t node = 0;
      for (std::size_t i = w.size(); i-- > 0;) {
        node = trie_[node * num_letters_ + w[i]];
        if (node < 0) {
          return std::nullopt;
        }
        if (terminal_[node] >= 0) {
          return static_cast<std::size_t>(terminal_[node]);
        }
      }
      return std::nullopt;
    }

   private:
    void rebuild_index() {
      trie_.assign(num_letters_, -1);
      terminal_.assign(1, -1);
      for (std::size_t r = 0; r < rules_.size(); ++r) {
        std::int32_t node = 0;
        auto const&  lhs  = rules_[r].lhs;
        for (std::size_t i = lhs.size(); i-- > 0;) {
          auto& next = trie_[node * num_letters_ + lhs[i]];
          if (next < 0) {
            next = static_cast<std::int32_t>(terminal_.size());
            terminal_.push_back(-1);
            trie_.resize(trie_.size() + num_letters_, -1);
          }
          node = trie_[node * num_letters_ + lhs[i]];
        }
        if (terminal_[node] < 0) {
          terminal_[node] = static_cast<std::int32_t>(r);
        }
      }
    }

    std::size_t               num_letters_ = 0;
    std::vector<Rule>         rules_;
    bool                      confluent_ = false;
    CompletionBudget          budget_;
    std::vector<std::int32_t> trie_;
    std::vector<std::int32_t> terminal_;
  };

  namespace detail {
    inline std::pair<Word, Word> orient(Word a, Word b) {
      if (shortlex_less(a, b)) {
        std::swap(a, b);
      }
      return {std::move(a), std::move(b)};
    }

    inline bool contains_subword(Word const& w, Word const& sub) {
      return std::search(w.begin(), w.end(), sub.begin(), sub.end()) != w.end();
    }

    //! Critical pairs between two rules: proper overlaps of a suffix of u.lhs
    //! with a prefix of v.lhs, and occurrences of v.lhs inside u.lhs.
    template <typename Fn>
    void for_each_critical_pair(Rule const& u, Rule const& v, Fn&& fn) {
      auto const& a = u.lhs;
      auto const& b = v.lhs;
      for (std::size_t k = 1; k < a.size() && k < b.size(); ++k) {
        if (std::equal(a.end() - k, a.end(), b.begin())) {
          Word left = u.rhs;
          left.insert(left.end(), b.begin() + k, b.end());
          Word right(a.begin(), a.end() - k);
          right.insert(right.end(), v.rhs.begin(), v.rhs.end());
          fn(std::move(left), std::move(right));
        }
      }
      if (b.size() <= a.size() && &u != &v) {
        for (std::size_t i = 0; i + b.size() <= a.size(); ++i) {
          if (std::equal(b.begin(), b.end(), a.begin() + i)) {
            Word right(a.begin(), a.begin() + i);
            right.insert(right.end(), v.rhs.begin(), v.rhs.end());
            right.insert(right.end(), a.begin() + i + b.size(), a.end());
            fn(u.rhs, std::move(right));
          }
        }
      }
    }
  }  // namespace detail

  //! Returns an unresolved critical pair (both reducts) if one exists.
  inline std::optional<std::pair<Word, Word>>
  find_unresolved_critical_pair(RewritingSystem const& rs) {
    auto const&                          rules = rs.rules();
    std::optional<std::pair<Word, Word>> bad;
    for (auto const& u : rules) {
      for (auto const& v : rules) {
        detail::for_each_critical_pair(u, v, [&](Word x, Word y) {
          if (!bad) {
            Word nx = rs.rewrite(x);
            Word ny = rs.rewrite(y);
            if (nx != ny) {
              bad.emplace(std::move(nx), std::move(ny));
            }
          }
        });
        if (bad) {
          return bad;
        }
      }
    }
    return bad;
  }

  //! Knuth-Bendix completion for the group given by `p`, with shortlex order
  //! induced by the generator order. Equations are processed shortest first.
  inline RewritingSystem knuth_bendix_complete(GroupPresentation const& p,
                                               CompletionBudget budget = {}) {
    std::size_t const L = p.alphabet.num_letters();

    struct Pending {
      std::size_t size;
      std::size_t seq;
      Word        a;
      Word        b;
      bool operator>(Pending const& o) const {
        return size != o.size ? size > o.size : seq > o.seq;
      }
    };
    std::priority_queue<Pending, std::vector<Pending>, std::greater<>> queue;
    std::size_t                                                        seq = 0;
    auto push = [&](Word a, Word b) {
      std::size_t s = std::max(a.size(), b.size());
      queue.push(Pending{s, seq++, std::move(a), std::move(b)});
    };

    for (std::size_t g = 0; g < p.num_generators(); ++g) {
      push(Word{letter_of(g), letter_of(g, true)}, Word{});
      push(Word{letter_of(g, true), letter_of(g)}, Word{});
    }
    for (auto const& r : p.relators) {
      push(r, Word{});
    }

    std::vector<Rule> rules;
    bool              incomplete = false;
    RewritingSystem   current(L, {}, false, budget);

    while (!queue.empty()) {
      Pending e = queue.top();
      queue.pop();
      Word a = current.rewrite(e.a);
      Word b = current.rewrite(e.b);
      if (a == b) {
        continue;
      }
      auto [lhs, rhs] = detail::orient(std::move(a), std::move(b));
      if (lhs.size() > budget.max_rule_length) {
        incomplete = true;
        continue;
      }
      if (rules.size() >= budget.max_rules) {
        incomplete = true;
        break;
      }
      Rule              fresh{lhs, rhs};
      std::vector<Rule> kept;
      for (auto& r : rules) {
        if (detail::contains_subword(r.lhs, fresh.lhs)) {
          push(std::move(r.lhs), std::move(r.rhs));
        } else {
          kept.push_back(std::move(r));
        }
      }
      kept.push_back(fresh);
      rules   = std::move(kept);
      current = RewritingSystem(L, rules, false, budget);
      for (auto& r : rules) {
        r.rhs = current.rewrite(r.rhs);
      }
      current = RewritingSystem(L, rules, false, budget);
      Rule const& nr = rules.back();
      for (auto const& r : rules) {
        detail::for_each_critical_pair(nr, r, [&](Word x, Word y) { push(x, y); });
        if (&r != &nr) {
          detail::for_each_critical_pair(r, nr, [&](Word x, Word y) { push(x, y); });
        }
      }
    }

    std::sort(rules.begin(), rules.end(), [](Rule const& x, Rule const& y) {
      return shortlex_less(x.lhs, y.lhs);
    });
    RewritingSystem draft(L, rules, false, budget);
    bool            confluent = !incomplete && !find_unresolved_critical_pair(draft).has_value();
    return RewritingSystem(L, std::move(rules), confluent, budget);
  }

}  // namespace sciball
