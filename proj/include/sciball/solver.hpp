#pragma once

#include <cstddef>
#include <cstdint>
#include <cstring>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "rewriting.hpp"
#include "word.hpp"

namespace sciball {

  //! Canonical encoding of a group element. Two words represent the same
  //! element iff their keys are byte-identical.
  using Key = std::string;

  //! Word-problem solver with canonical normal forms.
  class WordSolver {
   public:
    virtual ~WordSolver() = default;

    //! One of "oracle:<id>", "rewriting".
    virtual std::string strategy() const = 0;
    virtual std::string normal_form_kind() const = 0;

    virtual Key  identity() const = 0;
    //! Key of (element of k) * l.
    virtual Key  multiply(Key const& k, Letter l) const = 0;
    //! The normal-form word of the element encoded by k.
    virtual Word to_word(Key const& k) const = 0;

    //! Exact word length when a closed formula is available.
    virtual std::optional<std::size_t> length(Key const&) const {
      return std::nullopt;
    }
    //! Integer coordinates for free abelian models.
    virtual std::optional<std::vector<std::int64_t>> coordinates(Key const&) const {
      return std::nullopt;
    }

    Key multiply(Key k, Word const& w) const {
      for (Letter l : w) {
        k = multiply(k, l);
      }
      return k;
    }
    Key key_of(Word const& w) const {
      return multiply(identity(), w);
    }
    Word normal_form(Word const& w) const {
      return to_word(key_of(w));
    }
    bool is_identity(Word const& w) const {
      return key_of(w) == identity();
    }
    bool equal(Word const& u, Word const& v) const {
      return key_of(u) == key_of(v);
    }
  };

  namespace detail {
    template <typename T>
    void put(std::string& s, T v) {
      char buf[sizeof(T)];
      std::memcpy(buf, &v, sizeof(T));
      s.append(buf, sizeof(T));
    }
    template <typename T>
    T get(std::string const& s, std::size_t offset) {
      T v;
      std::memcpy(&v, s.data() + offset, sizeof(T));
      return v;
    }
    inline Key word_key(Word const& w) {
      return Key(w.begin(), w.end());
    }
    inline Word key_word(Key const& k) {
      return Word(k.begin(), k.end());
    }
  }  // namespace detail

  //! Normal forms by a confluent rewriting system: the shortlex-least word.
  class RewritingSolver final : public WordSolver {
   public:
    explicit RewritingSolver(RewritingSystem rs) : rs_(std::move(rs)) {
      if (!rs_.confluent()) {
        throw PreconditionError("rewriting solver needs a confluent system");
      }
    }

    std::string strategy() const override {
      return "rewriting";
    }
    std::string normal_form_kind() const override {
      return "shortlex-least representative";
    }
    Key identity() const override {
      return {};
    }
    Key multiply(Key const& k, Letter l) const override {
      Word w = detail::key_word(k);
      rs_.append(w, l);
      return detail::word_key(w);
    }
    Word to_word(Key const& k) const override {
      return detail::key_word(k);
    }
    //! Shortlex-least words are geodesic.
    std::optional<std::size_t> length(Key const& k) const override {
      return k.size();
    }
    RewritingSystem const& system() const noexcept {
      return rs_;
    }

   private:
    RewritingSystem rs_;
  };

}  // namespace sciball
