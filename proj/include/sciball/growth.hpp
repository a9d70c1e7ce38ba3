#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "error.hpp"

namespace sciball {

  enum class GrowthKind { end_depth, sci, semistability, delta, cp };
  enum class SampleMode { exact, lower_bound, interval };

  inline std::string to_string(GrowthKind k) {
    switch (k) {
      case GrowthKind::end_depth:
        return "end_depth";
      case GrowthKind::sci:
        return "sci";
      case GrowthKind::semistability:
        return "semistability";
      case GrowthKind::delta:
        return "delta";
      case GrowthKind::cp:
        return "cp";
    }
    return "?";
  }

  inline GrowthKind growth_kind_from_string(std::string const& s) {
    for (auto k : {GrowthKind::end_depth,
                   GrowthKind::sci,
                   GrowthKind::semistability,
                   GrowthKind::delta,
                   GrowthKind::cp}) {
      if (to_string(k) == s) {
        return k;
      }
    }
    throw PreconditionError("unknown growth kind '" + s + "'");
  }

  inline std::string to_string(SampleMode m) {
    switch (m) {
      case SampleMode::exact:
        return "exact";
      case SampleMode::lower_bound:
        return "lower_bound";
      case SampleMode::interval:
        return "interval";
    }
    return "?";
  }

  inline SampleMode sample_mode_from_string(std::string const& s) {
    for (auto m : {SampleMode::exact, SampleMode::lower_bound, SampleMode::interval}) {
      if (to_string(m) == s) {
        return m;
      }
    }
    throw PreconditionError("unknown sample mode '" + s + "'");
  }

  //! One sample r -> value. Intervals use lo and hi; hi is absent when no
  //! tested value was large enough.
  struct GrowthSample {
    std::size_t                r     = 0;
    std::int64_t               value = 0;
    SampleMode                 mode  = SampleMode::exact;
    std::int64_t               lo    = 0;
    std::optional<std::int64_t> hi;
    std::size_t                window = 0;

    bool operator==(GrowthSample const&) const = default;
  };

  struct GrowthTable {
    GrowthKind                kind = GrowthKind::end_depth;
    std::string               model;
    std::vector<GrowthSample> samples;
    nlohmann::json            metadata = nlohmann::json::object();

    void add(GrowthSample s) {
      if (s.mode == SampleMode::interval && s.hi && *s.hi < s.lo) {
        throw PreconditionError("interval sample with lo > hi");
      }
      auto it = std::upper_bound(samples.begin(), samples.end(), s.r, [](std::size_t r, auto const& x) {
        return r < x.r;
      });
      samples.insert(it, std::move(s));
    }

    std::optional<GrowthSample> at(std::size_t r) const {
      for (auto const& s : samples) {
        if (s.r == r) {
          return s;
        }
      }
      return std::nullopt;
    }
  };

  inline std::string sample_value_string(GrowthSample const& s) {
    if (s.mode != SampleMode::interval) {
      return std::to_string(s.value);
    }
    return std::to_string(s.lo) + ".." + (s.hi ? std::to_string(*s.hi) : std::string("inf"));
  }

  inline void write_csv(std::ostream& os, GrowthTable const& t) {
    os << "r,value,mode,window_R\n";
    for (auto const& s : t.samples) {
      os << s.r << ',' << sample_value_string(s) << ',' << to_string(s.mode) << ',' << s.window
         << '\n';
    }
  }

  inline GrowthTable read_csv(std::istream& is, GrowthKind kind) {
    GrowthTable t;
    t.kind = kind;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') {
        line.pop_back();
      }
      if (line.empty() || line[0] == '#' || line.rfind("r,", 0) == 0) {
        continue;
      }
      std::vector<std::string> cols;
      std::stringstream        ss(line);
      std::string              c;
      while (std::getline(ss, c, ',')) {
        cols.push_back(c);
      }
      if (cols.size() != 4) {
        throw ParseError("expected 4 columns", lineno, 1);
      }
      try {
        GrowthSample s;
        s.r      = std::stoul(cols[0]);
        s.mode   = sample_mode_from_string(cols[2]);
        s.window = std::stoul(cols[3]);
        if (s.mode == SampleMode::interval) {
          auto dots = cols[1].find("..");
          if (dots == std::string::npos) {
            throw ParseError("interval value must be lo..hi", lineno, 1);
          }
          s.lo     = std::stoll(cols[1].substr(0, dots));
          auto hi  = cols[1].substr(dots + 2);
          if (hi != "inf") {
            s.hi = std::stoll(hi);
          }
          s.value = s.lo;
        } else {
          s.value = std::stoll(cols[1]);
          s.lo    = s.value;
        }
        t.add(s);
      } catch (std::logic_error const&) {
        throw ParseError("malformed number", lineno, 1);
      }
    }
    return t;
  }

  inline nlohmann::json to_json(GrowthTable const& t) {
    nlohmann::json j;
    j["kind"]     = to_string(t.kind);
    j["model"]    = t.model;
    j["metadata"] = t.metadata;
    auto& arr     = j["samples"] = nlohmann::json::array();
    for (auto const& s : t.samples) {
      nlohmann::json x;
      x["r"]        = s.r;
      x["mode"]     = to_string(s.mode);
      x["window_R"] = s.window;
      if (s.mode == SampleMode::interval) {
        x["lo"] = s.lo;
        x["hi"] = s.hi ? nlohmann::json(*s.hi) : nlohmann::json(nullptr);
      } else {
        x["value"] = s.value;
      }
      arr.push_back(std::move(x));
    }
    return j;
  }

  //! A positive or signed rational with small numerator and denominator.
  struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    double value() const {
      return static_cast<double>(num) / static_cast<double>(den);
    }
    std::string str() const {
      return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
    }
    bool operator==(Rational const&) const = default;
  };

  //! Parses "p" or "p/q" with q > 0.
  inline Rational parse_rational(std::string const& text) {
    auto        slash = text.find('/');
    std::size_t used  = 0;
    Rational    q;
    try {
      q.num = std::stoll(text.substr(0, slash), &used);
      if (used != (slash == std::string::npos ? text.size() : slash)) {
        throw PreconditionError("bad rational '" + text + "'");
      }
      if (slash != std::string::npos) {
        auto den = text.substr(slash + 1);
        q.den    = std::stoll(den, &used);
        if (used != den.size()) {
          throw PreconditionError("bad rational '" + text + "'");
        }
      }
    } catch (std::logic_error const&) {
      throw PreconditionError("bad rational '" + text + "'");
    }
    if (q.den <= 0) {
      throw PreconditionError("rational needs a positive denominator");
    }
    return q;
  }

  struct RoughEquivWitness {
    Rational    c1, c2, c3, C1, C2, C3;
    std::size_t r_first = 0;
    std::size_t r_last  = 0;
  };

  namespace detail {
    //! Positive rationals p/q with p, q <= bound in lowest terms, ordered by
    //! denominator then numerator (so integers come first).
    inline std::vector<Rational> multiplicative_grid(std::int64_t bound) {
      std::vector<Rational> out;
      for (std::int64_t q = 1; q <= bound; ++q) {
        for (std::int64_t p = 1; p <= bound; ++p) {
          if (std::gcd(p, q) == 1) {
            out.push_back({p, q});
          }
        }
      }
      return out;
    }

    //! Zero, then +-p/q ordered by denominator, numerator, positive first.
    inline std::vector<Rational> additive_grid(std::int64_t bound) {
      std::vector<Rational> out{{0, 1}};
      for (std::int64_t q = 1; q <= bound; ++q) {
        for (std::int64_t p = 1; p <= bound; ++p) {
          if (std::gcd(p, q) == 1) {
            out.push_back({p, q});
            out.push_back({-p, q});
          }
        }
      }
      return out;
    }

    //! Piecewise-linear interpolation of exact samples; nullopt outside the
    //! sampled range.
    inline std::optional<double> interpolate(std::vector<std::pair<double, double>> const& pts,
                                             double                                         x) {
      constexpr double eps = 1e-9;
      if (pts.empty() || x < pts.front().first - eps || x > pts.back().first + eps) {
        return std::nullopt;
      }
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (std::abs(pts[i].first - x) < eps) {
          return pts[i].second;
        }
        if (i + 1 < pts.size() && x < pts[i + 1].first) {
          double t = (x - pts[i].first) / (pts[i + 1].first - pts[i].first);
          return pts[i].second + t * (pts[i + 1].second - pts[i].second);
        }
      }
      return std::nullopt;
    }

    inline std::vector<std::pair<double, double>> exact_points(GrowthTable const& t) {
      std::vector<std::pair<double, double>> pts;
      for (auto const& s : t.samples) {
        if (s.mode == SampleMode::exact) {
          pts.emplace_back(static_cast<double>(s.r), static_cast<double>(s.value));
        }
      }
      return pts;
    }
  }  // namespace detail

  //! Searches constants with c1 f(c2 x) + c3 <= g(x) <= C1 f(C2 x) + C3 at every
  //! common exact sample x, where f is interpolated linearly between its exact
  //! samples and every evaluation point must lie in f's sampled range. Each
  //! triple is the first feasible one in grid order.
  inline std::optional<RoughEquivWitness>
  rough_equiv(GrowthTable const& f, GrowthTable const& g, std::int64_t grid_bound = 8) {
    if (f.kind != g.kind) {
      throw PreconditionError("rough_equiv: tables have different kinds ("
                              + to_string(f.kind) + ", " + to_string(g.kind) + ")");
    }
    auto fp = detail::exact_points(f);
    auto gp = detail::exact_points(g);
    if (fp.size() < 3 || gp.size() < 3) {
      throw PreconditionError("rough_equiv needs at least 3 exact samples per table");
    }
    std::vector<std::pair<double, double>> common;
    for (auto const& [x, y] : gp) {
      if (detail::interpolate(fp, x) && std::any_of(fp.begin(), fp.end(), [&](auto const& q) {
            return q.first == x;
          })) {
        common.emplace_back(x, y);
      }
    }
    if (common.empty()) {
      return std::nullopt;
    }
    auto const mult = detail::multiplicative_grid(grid_bound);
    auto const add  = detail::additive_grid(grid_bound);

    constexpr double eps  = 1e-9;
    auto             find = [&](bool lower) -> std::optional<std::array<Rational, 3>> {
      for (auto const& a : mult) {
        for (auto const& b : mult) {
          std::vector<double> fx;
          bool                admissible = true;
          for (auto const& [x, y] : common) {
            auto v = detail::interpolate(fp, b.value() * x);
            if (!v) {
              admissible = false;
              break;
            }
            fx.push_back(a.value() * *v);
          }
          if (!admissible) {
            continue;
          }
          for (auto const& c : add) {
            bool ok = true;
            for (std::size_t i = 0; i < common.size() && ok; ++i) {
              double env = fx[i] + c.value();
              ok = lower ? env <= common[i].second + eps : common[i].second <= env + eps;
            }
            if (ok) {
              return std::array<Rational, 3>{a, b, c};
            }
          }
        }
      }
      return std::nullopt;
    };
    auto lo = find(true);
    auto hi = find(false);
    if (!lo || !hi) {
      return std::nullopt;
    }
    RoughEquivWitness w{(*lo)[0],
                        (*lo)[1],
                        (*lo)[2],
                        (*hi)[0],
                        (*hi)[1],
                        (*hi)[2],
                        static_cast<std::size_t>(common.front().first),
                        static_cast<std::size_t>(common.back().first)};
    return w;
  }

  inline nlohmann::json to_json(RoughEquivWitness const& w) {
    return {{"lower", {{"c1", w.c1.str()}, {"c2", w.c2.str()}, {"c3", w.c3.str()}}},
            {"upper", {{"C1", w.C1.str()}, {"C2", w.C2.str()}, {"C3", w.C3.str()}}},
            {"r_first", w.r_first},
            {"r_last", w.r_last}};
  }

}  // namespace sciball
