#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "presentation.hpp"
#include "rewriting.hpp"
#include "solver.hpp"
#include "word.hpp"

namespace sciball {

  //! Metadata the analyses rely on but cannot prove.
  struct ModelTraits {
    bool finitely_presented = true;
    bool one_ended          = false;
    bool hyperbolic         = false;
    bool sci_candidate      = false;
    //! Z^2 with the standard generators: loops have a winding number about
    //! the origin.
    bool planar_winding     = false;
  };

  //! A group given by generators, an optional presentation and a solver.
  class GroupModel {
   public:
    GroupModel(std::string                       name,
               Alphabet                          alphabet,
               std::optional<GroupPresentation>  presentation,
               std::shared_ptr<WordSolver const> solver,
               ModelTraits                       traits)
        : name_(std::move(name)),
          alphabet_(std::move(alphabet)),
          presentation_(std::move(presentation)),
          solver_(std::move(solver)),
          traits_(traits) {
      if (!solver_) {
        throw PreconditionError("model '" + name_ + "' has no solver");
      }
      if (presentation_ && !(presentation_->alphabet == alphabet_)) {
        throw PreconditionError("presentation alphabet differs from model alphabet");
      }
    }

    std::string const& name() const noexcept {
      return name_;
    }
    Alphabet const& alphabet() const noexcept {
      return alphabet_;
    }
    std::size_t num_letters() const noexcept {
      return alphabet_.num_letters();
    }
    bool has_presentation() const noexcept {
      return presentation_.has_value();
    }
    //! Throws for models that are only finitely generated.
    GroupPresentation const& presentation() const {
      if (!presentation_) {
        throw PreconditionError("model '" + name_
                                + "' is finitely generated only; 2-complex operations are "
                                  "unavailable");
      }
      return *presentation_;
    }
    WordSolver const& solver() const noexcept {
      return *solver_;
    }
    std::shared_ptr<WordSolver const> const& solver_ptr() const noexcept {
      return solver_;
    }
    ModelTraits const& traits() const noexcept {
      return traits_;
    }

    Word normal_form(Word const& w) const {
      return solver_->normal_form(w);
    }
    Word parse(std::string_view text) const {
      return alphabet_.parse(text);
    }
    std::string format(Word const& w) const {
      return alphabet_.format(w);
    }

   private:
    std::string                       name_;
    Alphabet                          alphabet_;
    std::optional<GroupPresentation>  presentation_;
    std::shared_ptr<WordSolver const> solver_;
    ModelTraits                       traits_;
  };

  using ModelPtr = std::shared_ptr<GroupModel const>;

  //! Model backed by Knuth-Bendix completion of `p`; fails when completion
  //! does not finish within the budget.
  inline ModelPtr model_from_presentation(GroupPresentation p,
                                          ModelTraits       traits = {},
                                          CompletionBudget  budget = {}) {
    auto rs = knuth_bendix_complete(p, budget);
    if (!rs.confluent()) {
      throw PreconditionError("presentation '" + p.name
                              + "': completion did not finish within budget ("
                              + std::to_string(rs.rules().size())
                              + " rules); no sound normal-form solver");
    }
    auto solver = std::make_shared<RewritingSolver>(std::move(rs));
    auto name   = p.name;
    auto alpha  = p.alphabet;
    return std::make_shared<GroupModel>(name, alpha, std::move(p), solver, traits);
  }

  //! Adjoins every trivial cyclically reduced word of length < bound. Throws
  //! BudgetExceeded when more than `max_words` words would be enumerated.
  inline GroupPresentation augment_presentation(GroupPresentation const& p,
                                                WordSolver const&        solver,
                                                std::size_t              bound,
                                                std::size_t max_words = 50'000'000) {
    std::size_t const L = p.alphabet.num_letters();
    // Number of freely reduced words of length < bound.
    double estimate = 1;
    double layer    = 1;
    for (std::size_t n = 1; n < bound; ++n) {
      layer *= (n == 1 ? static_cast<double>(L) : static_cast<double>(L - 1));
      estimate += layer;
    }
    if (estimate > static_cast<double>(max_words)) {
      throw BudgetExceeded("augmentation enumeration infeasible: about "
                               + std::to_string(static_cast<long long>(estimate)) + " words",
                           0);
    }
    GroupPresentation out = p;
    std::set<Word>    have(out.relators.begin(), out.relators.end());
    Word              w;
    std::vector<Key>  keys{solver.identity()};
    auto dfs = [&](auto&& self) -> void {
      if (!w.empty() && keys.back() == solver.identity() && w.front() != inverse(w.back())) {
        if (have.insert(w).second) {
          out.relators.push_back(w);
        }
      }
      if (w.size() + 1 >= bound) {
        return;
      }
      for (std::size_t l = 0; l < L; ++l) {
        auto letter = static_cast<Letter>(l);
        if (!w.empty() && w.back() == inverse(letter)) {
          continue;
        }
        w.push_back(letter);
        keys.push_back(solver.multiply(keys.back(), letter));
        self(self);
        keys.pop_back();
        w.pop_back();
      }
    };
    dfs(dfs);
    out.augmentation_bound = bound;
    return out;
  }

}  // namespace sciball
