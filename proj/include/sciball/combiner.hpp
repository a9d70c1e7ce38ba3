#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "cayley.hpp"
#include "error.hpp"
#include "filling.hpp"
#include "loop.hpp"
#include "model.hpp"
#include "oracles.hpp"
#include "presentation.hpp"
#include "replay.hpp"
#include "word.hpp"
#include "zoo.hpp"

namespace sciball {

  //! A finitely generated subgroup of `ambient`. Words over the subgroup
  //! generators use letter_of(j) for generator j.
  struct SubgroupEmbedding {
    ModelPtr                                        ambient;
    std::vector<Word>                               generators;
    std::function<bool(Word const&)>                membership;
    std::function<std::optional<Word>(Word const&)> expression;
    bool                                            one_ended = false;
    std::string                                     oracle;

    std::size_t rank() const noexcept {
      return generators.size();
    }
    bool contains(Word const& g) const {
      return membership(g);
    }
    //! Ambient word of a word over the subgroup generators.
    Word evaluate(Word const& expr) const {
      Word out;
      for (Letter l : expr) {
        if (generator_of(l) >= generators.size()) {
          throw PreconditionError("subgroup letter out of range");
        }
        Word const& g = generators[generator_of(l)];
        if (is_inverse_letter(l)) {
          auto gi = inverse(g);
          out.insert(out.end(), gi.begin(), gi.end());
        } else {
          out.insert(out.end(), g.begin(), g.end());
        }
      }
      return out;
    }
    //! Membership and expression consistency on the generators.
    void check() const {
      auto const& s = ambient->solver();
      for (std::size_t j = 0; j < generators.size(); ++j) {
        auto const& g = generators[j];
        if (!membership(g)) {
          throw PreconditionError("subgroup generator " + ambient->format(g)
                                  + " fails its own membership test");
        }
        auto e = expression(g);
        if (!e || !s.equal(evaluate(*e), g)) {
          throw PreconditionError("expression of subgroup generator " + ambient->format(g)
                                  + " does not evaluate back");
        }
      }
    }
  };

  namespace detail {
    inline bool is_free_cyclic(GroupModel const& m) {
      return m.alphabet().size() == 1 && m.has_presentation()
             && m.presentation().relators.empty();
    }
    inline std::int64_t exponent_sum(Word const& w) {
      std::int64_t s = 0;
      for (Letter l : w) {
        s += is_inverse_letter(l) ? -1 : 1;
      }
      return s;
    }
  }  // namespace detail

  //! <g> inside an infinite cyclic ambient <a>: g = a^n, so a^s is a member
  //! iff n divides s.
  inline SubgroupEmbedding cyclic_embedding(ModelPtr ambient, Word generator, bool one_ended = false) {
    if (!detail::is_free_cyclic(*ambient)) {
      throw PreconditionError("cyclic oracle needs an infinite cyclic ambient");
    }
    std::int64_t n = detail::exponent_sum(generator);
    if (n == 0) {
      throw PreconditionError("cyclic subgroup generator is trivial");
    }
    SubgroupEmbedding e;
    e.ambient    = std::move(ambient);
    e.generators = {std::move(generator)};
    e.membership = [n](Word const& w) { return detail::exponent_sum(w) % n == 0; };
    e.expression = [n](Word const& w) -> std::optional<Word> {
      std::int64_t s = detail::exponent_sum(w);
      if (s % n != 0) {
        return std::nullopt;
      }
      std::int64_t k = s / n;
      return Word(static_cast<std::size_t>(std::llabs(k)), letter_of(0, k < 0));
    };
    e.one_ended = one_ended;
    e.oracle    = "cyclic";
    return e;
  }

  //! Subgroup membership by enumerating products of at most `max_length`
  //! generators; elements beyond that length are reported as non-members.
  inline SubgroupEmbedding bounded_embedding(ModelPtr          ambient,
                                             std::vector<Word> generators,
                                             std::size_t       max_length,
                                             bool              one_ended   = false,
                                             std::size_t       max_entries = 2'000'000) {
    if (generators.empty()) {
      throw PreconditionError("subgroup needs at least one generator");
    }
    auto const& s     = ambient->solver();
    auto        table = std::make_shared<std::unordered_map<Key, Word>>();
    std::vector<std::pair<Key, Word>> frontier{{s.identity(), {}}};
    (*table)[s.identity()] = {};
    for (std::size_t d = 0; d < max_length && !frontier.empty(); ++d) {
      std::vector<std::pair<Key, Word>> next;
      for (auto const& [k, expr] : frontier) {
        for (std::size_t j = 0; j < 2 * generators.size(); ++j) {
          auto l = static_cast<Letter>(j);
          if (!expr.empty() && expr.back() == inverse(l)) {
            continue;
          }
          Word const& g = generators[generator_of(l)];
          Key nk = s.multiply(k, is_inverse_letter(l) ? inverse(g) : g);
          if (table->count(nk)) {
            continue;
          }
          Word ne = expr;
          ne.push_back(l);
          table->emplace(nk, ne);
          next.emplace_back(std::move(nk), std::move(ne));
          if (table->size() > max_entries) {
            throw BudgetExceeded("bounded subgroup enumeration exceeds its budget", table->size());
          }
        }
      }
      frontier = std::move(next);
    }
    SubgroupEmbedding e;
    e.ambient    = ambient;
    e.generators = std::move(generators);
    e.membership = [table, ambient](Word const& w) {
      return table->count(ambient->solver().key_of(w)) > 0;
    };
    e.expression = [table, ambient](Word const& w) -> std::optional<Word> {
      auto it = table->find(ambient->solver().key_of(w));
      if (it == table->end()) {
        return std::nullopt;
      }
      return it->second;
    };
    e.one_ended = one_ended;
    e.oracle    = "bounded:" + std::to_string(max_length);
    return e;
  }

  //! The exact cyclic oracle when it applies, the bounded one otherwise.
  inline SubgroupEmbedding make_embedding(ModelPtr          ambient,
                                          std::vector<Word> generators,
                                          bool              one_ended  = false,
                                          std::size_t       max_length = 8) {
    if (generators.size() == 1 && detail::is_free_cyclic(*ambient)) {
      return cyclic_embedding(std::move(ambient), std::move(generators[0]), one_ended);
    }
    return bounded_embedding(std::move(ambient), std::move(generators), max_length, one_ended);
  }

  //! G1 *_H G2. The alphabet of `group` is G1's generators followed by G2's,
  //! and subgroup[0].generators[j] is identified with subgroup[1].generators[j].
  struct AmalgamModel {
    std::string                      name;
    std::array<ModelPtr, 2>          factors;
    std::array<SubgroupEmbedding, 2> subgroup;
    ModelPtr                         group;

    std::size_t factor_of(Letter l) const {
      return generator_of(l) < factors[0]->alphabet().size() ? 0 : 1;
    }
    Letter local(Letter l) const {
      return factor_of(l) == 0 ? l
                               : static_cast<Letter>(l - factors[0]->num_letters());
    }
    Letter global(std::size_t f, Letter l) const {
      return f == 0 ? l : static_cast<Letter>(l + factors[0]->num_letters());
    }
    Word to_group(std::size_t f, Word const& w) const {
      Word out;
      for (Letter l : w) {
        out.push_back(global(f, l));
      }
      return out;
    }
    //! Image in the other factor of an element of H given in factor f.
    Word transfer(std::size_t f, Word const& h) const {
      auto e = subgroup[f].expression(h);
      if (!e) {
        throw PreconditionError("word is not in the amalgamated subgroup");
      }
      return subgroup[1 - f].evaluate(*e);
    }
    bool one_ended() const {
      return subgroup[0].one_ended && subgroup[1].one_ended;
    }
  };

  //! G1 *_H with stable letter t and t^-1 h_j t = k_j. The alphabet of
  //! `group` is G1's generators followed by t.
  struct HnnModel {
    std::string       name;
    ModelPtr          base;
    SubgroupEmbedding H;
    SubgroupEmbedding K;
    ModelPtr          group;

    Letter stable() const {
      return letter_of(base->alphabet().size());
    }
    bool is_stable(Letter l) const {
      return generator_of(l) == base->alphabet().size();
    }
    //! t^-1 h t for h in H.
    Word forward(Word const& h) const {
      auto e = H.expression(h);
      if (!e) {
        throw PreconditionError("word is not in the associated subgroup H");
      }
      return K.evaluate(*e);
    }
    //! t k t^-1 for k in K.
    Word backward(Word const& k) const {
      auto e = K.expression(k);
      if (!e) {
        throw PreconditionError("word is not in the associated subgroup K");
      }
      return H.evaluate(*e);
    }
    bool one_ended() const {
      return H.one_ended;
    }
  };

  inline AmalgamModel make_amalgam(std::string       name,
                                   SubgroupEmbedding h1,
                                   SubgroupEmbedding h2,
                                   ModelPtr          group = nullptr) {
    if (h1.rank() != h2.rank() || h1.rank() == 0) {
      throw PreconditionError("amalgamated subgroups need matching nonempty generator lists");
    }
    h1.check();
    h2.check();
    AmalgamModel m;
    m.name     = std::move(name);
    m.factors  = {h1.ambient, h2.ambient};
    auto names = h1.ambient->alphabet().names();
    for (auto const& n : h2.ambient->alphabet().names()) {
      names.push_back(n);
    }
    Alphabet alpha(names);
    m.subgroup = {std::move(h1), std::move(h2)};
    if (!group) {
      GroupPresentation p;
      p.name     = m.name;
      p.alphabet = alpha;
      for (std::size_t f = 0; f < 2; ++f) {
        if (m.factors[f]->has_presentation()) {
          for (auto const& r : m.factors[f]->presentation().relators) {
            p.relators.push_back(m.to_group(f, r));
          }
        }
      }
      for (std::size_t j = 0; j < m.subgroup[0].rank(); ++j) {
        p.relators.push_back(free_reduce(concat(m.to_group(0, m.subgroup[0].generators[j]),
                                                inverse(m.to_group(1, m.subgroup[1].generators[j])))));
      }
      ModelTraits t;
      t.one_ended = m.one_ended();
      group       = model_from_presentation(std::move(p), t);
    }
    if (!(group->alphabet() == alpha)) {
      throw PreconditionError("amalgam alphabet must list the first factor's generators, then the second's");
    }
    m.group = std::move(group);
    auto const& s = m.group->solver();
    for (std::size_t j = 0; j < m.subgroup[0].rank(); ++j) {
      if (!s.equal(m.to_group(0, m.subgroup[0].generators[j]),
                   m.to_group(1, m.subgroup[1].generators[j]))) {
        throw PreconditionError("identified subgroup generators differ in the amalgam");
      }
    }
    return m;
  }

  inline HnnModel make_hnn(std::string       name,
                           SubgroupEmbedding h,
                           SubgroupEmbedding k,
                           std::string const& stable = "t",
                           ModelPtr          group  = nullptr) {
    if (h.rank() != k.rank() || h.rank() == 0) {
      throw PreconditionError("associated subgroups need matching nonempty generator lists");
    }
    if (h.ambient != k.ambient) {
      throw PreconditionError("associated subgroups must share the base group");
    }
    h.check();
    k.check();
    HnnModel m;
    m.name     = std::move(name);
    m.base     = h.ambient;
    auto names = m.base->alphabet().names();
    names.push_back(stable);
    Alphabet alpha(names);
    m.H = std::move(h);
    m.K = std::move(k);
    if (!group) {
      GroupPresentation p;
      p.name     = m.name;
      p.alphabet = alpha;
      if (m.base->has_presentation()) {
        p.relators = m.base->presentation().relators;
      }
      Letter t = m.stable();
      for (std::size_t j = 0; j < m.H.rank(); ++j) {
        Word r{inverse(t)};
        r.insert(r.end(), m.H.generators[j].begin(), m.H.generators[j].end());
        r.push_back(t);
        auto ki = inverse(m.K.generators[j]);
        r.insert(r.end(), ki.begin(), ki.end());
        p.relators.push_back(free_reduce(r));
      }
      ModelTraits t_;
      t_.one_ended = m.one_ended();
      group        = model_from_presentation(std::move(p), t_);
    }
    if (!(group->alphabet() == alpha)) {
      throw PreconditionError("HNN alphabet must list the base generators, then the stable letter");
    }
    m.group = std::move(group);
    auto const& s = m.group->solver();
    Letter      t = m.stable();
    for (std::size_t j = 0; j < m.H.rank(); ++j) {
      Word lhs{inverse(t)};
      lhs.insert(lhs.end(), m.H.generators[j].begin(), m.H.generators[j].end());
      lhs.push_back(t);
      if (!s.equal(lhs, m.K.generators[j])) {
        throw PreconditionError("t^-1 h t = k fails for an associated generator pair");
      }
    }
    return m;
  }

  namespace detail {
    inline ModelPtr infinite_cyclic(std::string const& gen) {
      GroupPresentation p;
      p.name     = "Z<" + gen + ">";
      p.alphabet = Alphabet({gen});
      auto alpha = p.alphabet;
      auto name  = p.name;
      return std::make_shared<GroupModel>(
          name, alpha, std::move(p), std::make_shared<FreeSolver>(), ModelTraits{});
    }
  }  // namespace detail

  //! <x> *_{x^2 = y^3} <y>, with the zoo's exact solver for the amalgam.
  inline AmalgamModel trefoil_amalgam() {
    auto gx = detail::infinite_cyclic("x");
    auto gy = detail::infinite_cyclic("y");
    return make_amalgam("trefoil_amalgam",
                        cyclic_embedding(gx, gx->parse("xx")),
                        cyclic_embedding(gy, gy->parse("yyy")),
                        trefoil_model());
  }

  //! BS(1,2) as the HNN extension of <a> with t^-1 a t = a^2.
  inline HnnModel bs12_hnn() {
    auto ga = detail::infinite_cyclic("a");
    return make_hnn("bs12",
                    cyclic_embedding(ga, ga->parse("a")),
                    cyclic_embedding(ga, ga->parse("aa")),
                    "t",
                    bs12_model());
  }

  //! g[0] t^e[0] g[1] ... t^e[n-1] g[n] with every e nonzero; g words are in
  //! base letters.
  struct HnnSyllables {
    std::vector<Word>         g{Word{}};
    std::vector<std::int64_t> e;

    std::size_t syllable_length() const noexcept {
      return e.size();
    }
    std::int64_t t_weight() const {
      std::int64_t w = 0;
      for (auto x : e) {
        w += std::llabs(x);
      }
      return w;
    }
    bool operator==(HnnSyllables const&) const = default;
  };

  //! Consecutive syllables lie in different factors; syllables are in the
  //! factors' own letters.
  struct AmalgamSyllables {
    std::vector<Word>        a;
    std::vector<std::size_t> factor;

    std::size_t syllable_length() const noexcept {
      return a.size();
    }
    bool operator==(AmalgamSyllables const&) const = default;
  };

  namespace detail {
    //! Letter ranges [begin, end) of the t-blocks of a group word, with runs
    //! of equal t letters merged.
    struct TBlock {
      std::size_t  begin = 0;
      std::size_t  end   = 0;
      std::int64_t exponent = 0;
    };
    inline std::vector<TBlock> t_blocks(HnnModel const& m, Word const& w) {
      std::vector<TBlock> out;
      for (std::size_t i = 0; i < w.size(); ++i) {
        if (!m.is_stable(w[i])) {
          continue;
        }
        std::int64_t s = is_inverse_letter(w[i]) ? -1 : 1;
        if (!out.empty() && out.back().end == i && (out.back().exponent > 0) == (s > 0)) {
          out.back().end = i + 1;
          out.back().exponent += s;
        } else {
          out.push_back({i, i + 1, s});
        }
      }
      return out;
    }
    //! Maximal same-factor runs of an amalgam word as [begin, end).
    inline std::vector<std::pair<std::size_t, std::size_t>> factor_runs(AmalgamModel const& m,
                                                                        Word const& w) {
      std::vector<std::pair<std::size_t, std::size_t>> out;
      for (std::size_t i = 0; i < w.size(); ++i) {
        if (!out.empty() && out.back().second == i
            && m.factor_of(w[out.back().first]) == m.factor_of(w[i])) {
          out.back().second = i + 1;
        } else {
          out.emplace_back(i, i + 1);
        }
      }
      return out;
    }
  }  // namespace detail

  inline HnnSyllables hnn_syllables(HnnModel const& m, Word const& w) {
    HnnSyllables s;
    s.g.clear();
    std::size_t prev = 0;
    for (auto const& b : detail::t_blocks(m, w)) {
      s.g.emplace_back(w.begin() + static_cast<std::ptrdiff_t>(prev),
                       w.begin() + static_cast<std::ptrdiff_t>(b.begin));
      s.e.push_back(b.exponent);
      prev = b.end;
    }
    s.g.emplace_back(w.begin() + static_cast<std::ptrdiff_t>(prev), w.end());
    return s;
  }

  inline Word hnn_word(HnnModel const& m, HnnSyllables const& s) {
    Word out = s.g.at(0);
    for (std::size_t i = 0; i < s.e.size(); ++i) {
      Letter t = s.e[i] > 0 ? m.stable() : inverse(m.stable());
      out.insert(out.end(), static_cast<std::size_t>(std::llabs(s.e[i])), t);
      out.insert(out.end(), s.g.at(i + 1).begin(), s.g.at(i + 1).end());
    }
    return out;
  }

  inline AmalgamSyllables amalgam_syllables(AmalgamModel const& m, Word const& w) {
    AmalgamSyllables s;
    for (auto [b, e] : detail::factor_runs(m, w)) {
      std::size_t f = m.factor_of(w[b]);
      Word        a;
      for (std::size_t i = b; i < e; ++i) {
        a.push_back(m.local(w[i]));
      }
      s.a.push_back(std::move(a));
      s.factor.push_back(f);
    }
    return s;
  }

  inline Word amalgam_word(AmalgamModel const& m, AmalgamSyllables const& s) {
    Word out;
    for (std::size_t i = 0; i < s.a.size(); ++i) {
      auto g = m.to_group(s.factor[i], s.a[i]);
      out.insert(out.end(), g.begin(), g.end());
    }
    return out;
  }

  namespace detail {
    inline std::vector<std::string_view> split_bars(std::string_view text) {
      std::vector<std::string_view> out;
      std::size_t                   start = 0;
      while (true) {
        auto bar = text.find('|', start);
        out.push_back(trim(text.substr(start, bar == std::string_view::npos ? bar : bar - start)));
        if (bar == std::string_view::npos) {
          break;
        }
        start = bar + 1;
      }
      return out;
    }
    inline Word parse_token_word(Alphabet const& a, std::string_view tok) {
      if (tok == "1" || tok.empty()) {
        return {};
      }
      return a.parse(tok);
    }
  }  // namespace detail

  //! Parses `g0 | t^2 | g1 | t^-1 | g2`; empty or `1` base words denote the
  //! identity and adjacent base words or t powers are merged.
  inline HnnSyllables parse_hnn_syllables(HnnModel const& m, std::string_view text) {
    auto const& alpha = m.group->alphabet();
    auto const& tname = alpha.names().back();
    Word        w;
    for (auto tok : detail::split_bars(text)) {
      if (tok.substr(0, tname.size()) == tname && tok.size() > tname.size()
          && tok[tname.size()] == '^') {
        auto         num = std::string(tok.substr(tname.size() + 1));
        std::size_t  used = 0;
        std::int64_t k    = 0;
        try {
          k = std::stoll(num, &used);
        } catch (std::exception const&) {
          used = 0;
        }
        if (used != num.size() || num.empty()) {
          throw ParseError("bad stable-letter exponent '" + num + "'", 1, 1);
        }
        w.insert(w.end(), static_cast<std::size_t>(std::llabs(k)),
                 k > 0 ? m.stable() : inverse(m.stable()));
      } else {
        auto part = detail::parse_token_word(alpha, tok);
        w.insert(w.end(), part.begin(), part.end());
      }
    }
    return hnn_syllables(m, w);
  }

  inline std::string format_syllables(HnnModel const& m, HnnSyllables const& s) {
    auto const& alpha = m.base->alphabet();
    auto        base  = [&](Word const& g) { return g.empty() ? std::string("1") : alpha.format(g); };
    std::string out   = base(s.g.at(0));
    for (std::size_t i = 0; i < s.e.size(); ++i) {
      out += " | " + m.group->alphabet().names().back() + "^" + std::to_string(s.e[i]) + " | "
             + base(s.g.at(i + 1));
    }
    return out;
  }

  //! Parses `a0 | a1 | ...` where each syllable is a word in one factor.
  inline AmalgamSyllables parse_amalgam_syllables(AmalgamModel const& m, std::string_view text) {
    AmalgamSyllables s;
    for (auto tok : detail::split_bars(text)) {
      Word w = detail::parse_token_word(m.group->alphabet(), tok);
      if (w.empty()) {
        continue;
      }
      std::size_t f = m.factor_of(w[0]);
      Word        a;
      for (Letter l : w) {
        if (m.factor_of(l) != f) {
          throw ParseError("syllable '" + std::string(tok) + "' mixes both factors", 1, 1);
        }
        a.push_back(m.local(l));
      }
      if (!s.a.empty() && s.factor.back() == f) {
        s.a.back().insert(s.a.back().end(), a.begin(), a.end());
      } else {
        s.a.push_back(std::move(a));
        s.factor.push_back(f);
      }
    }
    return s;
  }

  inline std::string format_syllables(AmalgamModel const& m, AmalgamSyllables const& s) {
    if (s.a.empty()) {
      return "1";
    }
    std::string out;
    for (std::size_t i = 0; i < s.a.size(); ++i) {
      if (i) {
        out += " | ";
      }
      out += m.factors[s.factor[i]]->format(s.a[i]);
    }
    return out;
  }

  //! Least index of a syllable lying in the amalgamated subgroup. The word
  //! is checked to be trivial in the amalgam first.
  inline std::size_t amalgam_pinch(AmalgamModel const& m, AmalgamSyllables const& s) {
    if (s.a.empty()) {
      throw PreconditionError("amalgam pinch needs syllable length >= 1");
    }
    if (!m.group->solver().is_identity(amalgam_word(m, s))) {
      throw PreconditionError("word is not trivial in the amalgam");
    }
    for (std::size_t i = 0; i < s.a.size(); ++i) {
      if (m.subgroup[s.factor[i]].contains(s.a[i])) {
        return i;
      }
    }
    throw std::logic_error("trivial word without a pinch: a membership oracle is unsound");
  }

  //! Index k of the least middle word g[k] between opposite t powers lying
  //! in the matching associated subgroup.
  inline std::optional<std::size_t> britton_pinch(HnnModel const& m, HnnSyllables const& s) {
    for (std::size_t k = 1; k < s.e.size(); ++k) {
      bool up   = s.e[k - 1] > 0 && s.e[k] < 0;
      bool down = s.e[k - 1] < 0 && s.e[k] > 0;
      if ((up && m.K.contains(s.g[k])) || (down && m.H.contains(s.g[k]))) {
        return k;
      }
    }
    return std::nullopt;
  }

  struct BrittonStep {
    std::size_t  index = 0;
    //! True for t k t^-1 -> H, false for t^-1 h t -> K.
    bool         to_h  = false;
    Word         image;
    std::int64_t weight_before = 0;
    std::int64_t weight_after  = 0;
  };

  struct BrittonResult {
    HnnSyllables             input;
    HnnSyllables             output;
    std::vector<BrittonStep> steps;

    bool is_empty() const {
      return output.e.empty() && output.g.at(0).empty();
    }
  };

  //! Repeated pinch removal until no pinch is left; base words are kept in
  //! the base group's normal form.
  inline BrittonResult britton_reduce(HnnModel const& m, HnnSyllables s) {
    if (s.g.size() != s.e.size() + 1) {
      throw PreconditionError("malformed syllable word");
    }
    for (auto x : s.e) {
      if (x == 0) {
        throw PreconditionError("syllable exponents must be nonzero");
      }
    }
    BrittonResult res;
    res.input = s;
    auto const& bs = m.base->solver();
    for (auto& g : s.g) {
      g = bs.normal_form(g);
    }
    while (auto k = britton_pinch(m, s)) {
      BrittonStep st;
      st.index         = *k;
      st.weight_before = s.t_weight();
      st.to_h          = s.e[*k - 1] > 0;
      st.image         = bs.normal_form(st.to_h ? m.backward(s.g[*k]) : m.forward(s.g[*k]));
      if (!(st.to_h ? m.H : m.K).contains(st.image)) {
        throw std::logic_error("unsound oracle: pinch image fails re-membership");
      }
      std::int64_t sgn = st.to_h ? 1 : -1;
      s.g[*k]          = st.image;
      s.e[*k - 1] -= sgn;
      s.e[*k] += sgn;
      if (s.e[*k] == 0) {
        s.g[*k] = bs.normal_form(concat(s.g[*k], s.g[*k + 1]));
        s.g.erase(s.g.begin() + static_cast<std::ptrdiff_t>(*k) + 1);
        s.e.erase(s.e.begin() + static_cast<std::ptrdiff_t>(*k));
      }
      if (s.e[*k - 1] == 0) {
        s.g[*k - 1] = bs.normal_form(concat(s.g[*k - 1], s.g[*k]));
        s.g.erase(s.g.begin() + static_cast<std::ptrdiff_t>(*k));
        s.e.erase(s.e.begin() + static_cast<std::ptrdiff_t>(*k) - 1);
      }
      st.weight_after = s.t_weight();
      if (st.weight_after + 2 != st.weight_before) {
        throw std::logic_error("Britton step did not drop the t-weight by two");
      }
      res.steps.push_back(std::move(st));
    }
    res.output = std::move(s);
    return res;
  }

  struct ShortenParams {
    //! The connecting path avoids B(c r).
    std::size_t c  = 1;
    //! The input loop must avoid B(c1 r).
    std::size_t c1 = 1;
    FillBudget  fill;
  };

  struct ShortenStep {
    //! "syllable_length" or "t_weight".
    std::string measure;
    std::size_t before = 0;
    std::size_t after  = 0;
    bool        base_case = false;
    //! Set when the amalgamated or associated subgroup is not one-ended.
    bool        machinery_only = false;
    std::size_t radius = 0;
    Loop        input;
    Loop        output;
    //! The pinched subpath is input.word[sub_begin, sub_end).
    std::size_t sub_begin = 0;
    std::size_t sub_end   = 0;
    Word        connector;
    Path        connector_path;
    std::size_t connector_min_dist = 0;
    std::size_t connector_steps    = 0;
    Loop        subloop;
    FillResult  subfill;
    std::vector<Move> certificate;
    bool        replayed = false;
  };

  namespace detail {
    //! Shortest path from u to target in the coset u<steps>, moving by whole
    //! step words and staying at distance > avoid.
    inline std::optional<std::pair<Word, std::size_t>>
    copy_path(CayleyBall const& b, VertexId u, VertexId target,
              std::vector<Word> const& steps, std::size_t avoid) {
      std::vector<Word> moves;
      for (auto const& s : steps) {
        moves.push_back(s);
        moves.push_back(inverse(s));
      }
      struct Back {
        VertexId    from;
        std::size_t move;
      };
      std::unordered_map<VertexId, Back> seen{{u, {kNoVertex, 0}}};
      std::vector<VertexId>              order{u};
      for (std::size_t head = 0; head < order.size() && !seen.count(target); ++head) {
        VertexId v = order[head];
        for (std::size_t i = 0; i < moves.size(); ++i) {
          auto p = b.trace(v, moves[i]);
          if (!p) {
            continue;
          }
          bool ok = true;
          for (auto x : p->vertices) {
            ok = ok && b.dist(x) > avoid;
          }
          if (!ok || seen.count(p->back())) {
            continue;
          }
          seen.emplace(p->back(), Back{v, i});
          order.push_back(p->back());
        }
      }
      if (!seen.count(target)) {
        return std::nullopt;
      }
      std::vector<std::size_t> seq;
      for (VertexId v = target; v != u; v = seen.at(v).from) {
        seq.push_back(seen.at(v).move);
      }
      std::reverse(seq.begin(), seq.end());
      Word w;
      for (auto i : seq) {
        w.insert(w.end(), moves[i].begin(), moves[i].end());
      }
      return std::make_pair(w, seq.size());
    }

    //! Replaces l.word[s, e) by the connector p: inserts p^-1 p after the
    //! subpath, fills the subloop (subpath) p^-1 outside B(r) and replays
    //! the whole certificate.
    inline void splice(CayleyComplexBall const& c, ShortenStep& st, std::size_t r,
                       std::vector<Word> const& steps, std::size_t avoid, FillBudget budget) {
      auto const& b  = c.ball();
      auto const& w  = st.input.word;
      auto        vs = *loop_vertices(b, st.input);
      VertexId    u  = vs[st.sub_begin];
      VertexId    v  = vs[st.sub_end];
      auto        cp = copy_path(b, u, v, steps, avoid);
      if (!cp) {
        throw WindowError("no path inside the subgroup copy outside B(" + std::to_string(avoid)
                          + ") within the ball of radius " + std::to_string(b.radius())
                          + "; the end-depth bound suggests a window of at least "
                          + std::to_string(2 * avoid + 1) + " plus the copy's distortion");
      }
      st.connector       = cp->first;
      st.connector_steps = cp->second;
      st.connector_path  = *b.trace(u, st.connector);
      st.connector_min_dist = b.dist(u);
      for (auto x : st.connector_path.vertices) {
        st.connector_min_dist = std::min(st.connector_min_dist, b.dist(x));
      }

      Word     q   = inverse(st.connector);
      VertexId cur = v;
      for (std::size_t j = 0; j < q.size(); ++j) {
        VertexId nxt = b.neighbor(cur, q[j]);
        Move     m;
        m.kind     = MoveKind::insert;
        m.pos      = st.sub_end + j;
        m.letter   = q[j];
        m.min_dist = std::min(b.dist(cur), b.dist(nxt));
        st.certificate.push_back(m);
        cur = nxt;
      }
      Word sub(w.begin() + static_cast<std::ptrdiff_t>(st.sub_begin),
               w.begin() + static_cast<std::ptrdiff_t>(st.sub_end));
      sub.insert(sub.end(), q.begin(), q.end());
      st.subloop = Loop{u, sub};
      st.subfill = fill_outside(c, st.subloop, r, budget);
      if (st.subfill.outcome != FillOutcome::filled) {
        throw BudgetExceeded("subloop filling " + to_string(st.subfill.outcome)
                                 + " within the fill budget",
                             st.subfill.states);
      }
      for (auto m : st.subfill.certificate) {
        m.pos += st.sub_begin;
        st.certificate.push_back(m);
      }
      Word out(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(st.sub_begin));
      out.insert(out.end(), st.connector.begin(), st.connector.end());
      out.insert(out.end(), w.begin() + static_cast<std::ptrdiff_t>(st.sub_end), w.end());
      st.output = Loop{st.input.base, out};
      auto rep  = replay_certificate(c, st.input, st.certificate, r);
      if (!rep.valid || !(rep.final_loop == st.output)) {
        throw std::logic_error("shortening certificate failed replay: "
                               + (rep.valid ? std::string("unexpected final loop") : rep.error));
      }
      st.replayed = true;
    }

    inline void check_shorten_input(CayleyComplexBall const& c, Loop const& l, std::size_t r,
                                    ShortenParams const& p) {
      auto const& b = c.ball();
      if (p.c == 0 || p.c1 == 0) {
        throw PreconditionError("shortening constants must be positive");
      }
      if (l.base >= b.size() || !is_closed(b, l)) {
        throw PreconditionError("loop is not closed inside the ball");
      }
      if (loop_min_dist(b, l) <= p.c1 * r) {
        throw PreconditionError("loop meets B(" + std::to_string(p.c1 * r) + ")");
      }
    }
  }  // namespace detail

  //! One shortening step for a loop in the amalgam: the least pinched
  //! syllable is replaced by a path in the other factor's copy of H.
  inline ShortenStep shorten_loop(AmalgamModel const&      m,
                                  CayleyComplexBall const& c,
                                  Loop const&              l,
                                  std::size_t              r,
                                  ShortenParams const&     p = {}) {
    if (&c.ball().model() != m.group.get()) {
      throw PreconditionError("ball is not built over the amalgam's group model");
    }
    detail::check_shorten_input(c, l, r, p);
    ShortenStep st;
    st.measure        = "syllable_length";
    st.machinery_only = !m.one_ended();
    st.radius         = r;
    st.input          = l;
    st.output         = l;
    auto runs         = detail::factor_runs(m, l.word);
    st.before         = runs.size();
    st.after          = runs.size();
    if (runs.size() <= 1) {
      st.base_case = true;
      return st;
    }
    auto        syl = amalgam_syllables(m, l.word);
    std::size_t i   = amalgam_pinch(m, syl);
    std::size_t f   = syl.factor[i];
    st.sub_begin    = runs[i].first;
    st.sub_end      = runs[i].second;
    std::vector<Word> steps;
    for (auto const& g : m.subgroup[1 - f].generators) {
      steps.push_back(m.to_group(1 - f, g));
    }
    detail::splice(c, st, r, steps, p.c * r, p.fill);
    st.after = detail::factor_runs(m, st.output.word).size();
    if (st.after >= st.before) {
      throw std::logic_error("shortening step did not reduce the syllable length");
    }
    return st;
  }

  //! One shortening step for a loop in the HNN extension: the least pinch
  //! t g t^-1 or t^-1 g t is replaced by a path in the base group's copy of
  //! the image subgroup, dropping the t-weight by two.
  inline ShortenStep shorten_loop(HnnModel const&          m,
                                  CayleyComplexBall const& c,
                                  Loop const&              l,
                                  std::size_t              r,
                                  ShortenParams const&     p = {}) {
    if (&c.ball().model() != m.group.get()) {
      throw PreconditionError("ball is not built over the HNN group model");
    }
    detail::check_shorten_input(c, l, r, p);
    ShortenStep st;
    st.measure        = "t_weight";
    st.machinery_only = !m.one_ended();
    st.radius         = r;
    st.input          = l;
    st.output         = l;
    auto syl          = hnn_syllables(m, l.word);
    st.before         = static_cast<std::size_t>(syl.t_weight());
    st.after          = st.before;
    if (st.before == 0) {
      st.base_case = true;
      return st;
    }
    auto k = britton_pinch(m, syl);
    if (!k) {
      throw PreconditionError("no Britton pinch: the loop word is not trivial");
    }
    auto blocks  = detail::t_blocks(m, l.word);
    st.sub_begin = blocks[*k - 1].end - 1;
    st.sub_end   = blocks[*k].begin + 1;
    bool to_h    = syl.e[*k - 1] > 0;
    auto const& target = to_h ? m.H : m.K;
    detail::splice(c, st, r, target.generators, p.c * r, p.fill);
    st.after = static_cast<std::size_t>(hnn_syllables(m, st.output.word).t_weight());
    if (st.after + 2 != st.before) {
      throw std::logic_error("shortening step did not drop the t-weight by two");
    }
    return st;
  }

  //! Iterates shortening steps until the base case; returns every step.
  template <typename Model>
  std::vector<ShortenStep> shorten_to_base(Model const&             m,
                                           CayleyComplexBall const& c,
                                           Loop                     l,
                                           std::size_t              r,
                                           ShortenParams const&     p = {}) {
    std::vector<ShortenStep> out;
    while (true) {
      out.push_back(shorten_loop(m, c, l, r, p));
      if (out.back().base_case) {
        return out;
      }
      l = out.back().output;
    }
  }

  inline nlohmann::json to_json(BrittonResult const& r, HnnModel const& m) {
    nlohmann::json steps = nlohmann::json::array();
    for (auto const& s : r.steps) {
      steps.push_back({{"index", s.index},
                       {"direction", s.to_h ? "K->H" : "H->K"},
                       {"image", m.base->format(s.image)},
                       {"t_weight_before", s.weight_before},
                       {"t_weight_after", s.weight_after}});
    }
    return {{"model", m.name},
            {"input", format_syllables(m, r.input)},
            {"output", format_syllables(m, r.output)},
            {"input_t_weight", r.input.t_weight()},
            {"output_t_weight", r.output.t_weight()},
            {"empty", r.is_empty()},
            {"machinery_only", !m.one_ended()},
            {"steps", steps}};
  }

  inline nlohmann::json to_json(ShortenStep const& s, CayleyBall const& b) {
    auto const& a = b.model().alphabet();
    return {{"measure", s.measure},
            {"before", s.before},
            {"after", s.after},
            {"base_case", s.base_case},
            {"machinery_only", s.machinery_only},
            {"radius", s.radius},
            {"input", format_loop(b, s.input)},
            {"output", format_loop(b, s.output)},
            {"subpath", {s.sub_begin, s.sub_end}},
            {"connector", a.format(s.connector)},
            {"connector_steps", s.connector_steps},
            {"connector_min_dist", s.connector_min_dist},
            {"subloop", s.base_case ? std::string() : format_loop(b, s.subloop)},
            {"subfill", to_json(s.subfill, a)},
            {"certificate", certificate_json(s.certificate, a)},
            {"replayed", s.replayed}};
  }

  using CombinedModel = std::variant<AmalgamModel, HnnModel>;

  namespace detail {
    inline std::string read_text(std::filesystem::path const& p) {
      std::ifstream in(p);
      if (!in) {
        throw PreconditionError("cannot read '" + p.string() + "'");
      }
      std::ostringstream os;
      os << in.rdbuf();
      return os.str();
    }
    //! `zoo:<name>` or a presentation file relative to `dir`.
    inline ModelPtr load_factor(std::string_view ref, std::filesystem::path const& dir) {
      if (ref.substr(0, 4) == "zoo:") {
        return zoo_group(ref.substr(4));
      }
      auto p = parse_presentation(read_text(dir / std::string(ref)));
      if (p.relators.empty()) {
        auto alpha = p.alphabet;
        auto name  = p.name.empty() ? std::string(ref) : p.name;
        return std::make_shared<GroupModel>(
            name, alpha, std::move(p), std::make_shared<FreeSolver>(), ModelTraits{});
      }
      return model_from_presentation(std::move(p));
    }
  }  // namespace detail

  //! Reads an amalgam or HNN model file:
  //!   type: amalgam | hnn
  //!   name: <id>
  //!   factor: <file or zoo:name>   (twice, amalgam)
  //!   base: <file or zoo:name>     (hnn)
  //!   stable: t                    (hnn)
  //!   subgroup: <word> = <word>    (one line per generator pair)
  //!   group: zoo:<name>            (optional solver for the whole group)
  //!   one_ended: true | false
  //!   bound: <n>                   (bounded-oracle word length)
  inline CombinedModel load_combined_model(std::filesystem::path const& path) {
    auto        text = detail::read_text(path);
    auto        dir  = path.parent_path();
    std::string type, name, base, stable = "t", group;
    std::vector<std::string> factors;
    std::vector<std::pair<std::string, std::string>> pairs;
    bool        one_ended = false;
    std::size_t bound     = 8;
    std::istringstream in(text);
    std::string        line;
    std::size_t        lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::string_view content = line;
      if (auto h = content.find('#'); h != std::string_view::npos) {
        content = content.substr(0, h);
      }
      content = detail::trim(content);
      if (content.empty()) {
        continue;
      }
      auto colon = content.find(':');
      if (colon == std::string_view::npos) {
        throw ParseError("expected '<key>:'", lineno, 1);
      }
      auto key = std::string(detail::trim(content.substr(0, colon)));
      auto val = std::string(detail::trim(content.substr(colon + 1)));
      if (key == "type") {
        type = val;
      } else if (key == "name") {
        name = val;
      } else if (key == "factor") {
        factors.push_back(val);
      } else if (key == "base") {
        base = val;
      } else if (key == "stable") {
        stable = val;
      } else if (key == "group") {
        group = val;
      } else if (key == "one_ended") {
        one_ended = val == "true";
      } else if (key == "bound") {
        bound = static_cast<std::size_t>(std::stoul(val));
      } else if (key == "subgroup") {
        auto eq = val.find('=');
        if (eq == std::string::npos) {
          throw ParseError("subgroup line needs '<word> = <word>'", lineno, colon + 2);
        }
        pairs.emplace_back(std::string(detail::trim(std::string_view(val).substr(0, eq))),
                           std::string(detail::trim(std::string_view(val).substr(eq + 1))));
      } else {
        throw ParseError("unknown key '" + key + "'", lineno, 1);
      }
    }
    if (pairs.empty()) {
      throw ParseError("no subgroup lines", lineno, 1);
    }
    ModelPtr g = group.empty() ? nullptr : detail::load_factor(group, dir);
    auto embed = [&](ModelPtr amb, std::size_t side) {
      std::vector<Word> gens;
      for (auto const& pr : pairs) {
        gens.push_back(amb->parse(side == 0 ? pr.first : pr.second));
      }
      return make_embedding(amb, std::move(gens), one_ended, bound);
    };
    if (type == "amalgam") {
      if (factors.size() != 2) {
        throw ParseError("an amalgam needs exactly two factor lines", lineno, 1);
      }
      auto g1 = detail::load_factor(factors[0], dir);
      auto g2 = detail::load_factor(factors[1], dir);
      return make_amalgam(name.empty() ? "amalgam" : name, embed(g1, 0), embed(g2, 1), g);
    }
    if (type == "hnn") {
      if (base.empty()) {
        throw ParseError("an HNN extension needs a base line", lineno, 1);
      }
      auto g1 = detail::load_factor(base, dir);
      return make_hnn(name.empty() ? "hnn" : name, embed(g1, 0), embed(g1, 1), stable, g);
    }
    throw ParseError("type must be 'amalgam' or 'hnn'", 1, 1);
  }

}  // namespace sciball
