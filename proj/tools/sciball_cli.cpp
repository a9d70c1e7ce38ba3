#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <sciball.hpp>

namespace {

  using nlohmann::json;
  using namespace sciball;

  constexpr int kOk       = 0;
  constexpr int kConfig   = 2;
  constexpr int kUnknowns = 3;

  constexpr char const* kOutDirEnv = "SCIBALL_OUT_DIR";

  class OutputError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
  };

  struct RunConfig {
    std::string subcommand;
    std::string group;
    std::string presentation;
    bool        one_ended = false;
    std::string out;
    std::string format;
    std::size_t threads = 1;
    std::size_t max_vertices = 10'000'000;

    std::size_t   radius = 0;
    std::size_t   rmax   = 0;
    std::size_t   r      = 1;
    std::string   window_factor = "2";
    std::size_t   window = 8;
    std::size_t   states = 20'000;
    std::uint64_t seed   = 1;
    std::size_t   rho_min = 1;
    std::size_t   rho_max = 0;
    std::size_t   samples = 0;
    std::size_t   M = 0;
    std::size_t   c = 1;
    std::size_t   c1 = 1;
    std::size_t   level_min = 0;
    std::size_t   level_max = 0;
    std::size_t   N = 2;
    std::size_t   n = 1;
    std::size_t   margin = 1;
    std::size_t   rho = 3;
    bool          no_verify = false;
    std::string   p;
    std::string   q;
    std::string   loop;
    std::string   model;
    std::string   word;
    std::string   f_table;
    std::string   g_table;
    std::string   f_group;
    std::string   g_group;
    std::string   kind = "end_depth";
    std::int64_t  grid = 8;
    std::size_t   max_cells = 64;
    std::size_t   random_loops = 8;

    //! Every option of the chosen subcommand with its effective value.
    json values;
  };

  json option_values(CLI::App const& sub) {
    json j = json::object();
    for (auto const* o : sub.get_options()) {
      auto name = o->get_single_name();
      if (name == "help") {
        continue;
      }
      if (o->get_expected_max() == 0) {
        j[name] = o->count() > 0;
        continue;
      }
      auto const& res = o->results();
      if (!res.empty()) {
        j[name] = res.size() == 1 ? json(res.front()) : json(res);
      } else {
        j[name] = o->get_default_str();
      }
    }
    return j;
  }

  json provenance(RunConfig const& cfg) {
    return {{"toolkit", "sciball"},
            {"version", sciball::version},
            {"subcommand", cfg.subcommand},
            {"config", cfg.values}};
  }

  //! Writes to --out, else to $SCIBALL_OUT_DIR/<subcommand>.<ext>, else stdout.
  void emit(RunConfig const& cfg, std::string const& body, std::string const& ext) {
    std::string path = cfg.out;
    if (path.empty()) {
      if (char const* dir = std::getenv(kOutDirEnv); dir && *dir) {
        path = (std::filesystem::path(dir) / (cfg.subcommand + "." + ext)).string();
      }
    }
    if (path.empty()) {
      std::cout << body;
      std::cout.flush();
      return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) {
      throw OutputError("cannot open output '" + path + "'");
    }
    f << body;
    f.close();
    if (!f) {
      throw OutputError("cannot write output '" + path + "'");
    }
    std::cerr << "wrote " << path << '\n';
  }

  void emit_json(RunConfig const& cfg, json result) {
    json doc          = provenance(cfg);
    doc["result"]     = std::move(result);
    emit(cfg, doc.dump(2) + "\n", "json");
  }

  void emit_table(RunConfig const& cfg, GrowthTable const& t) {
    if (cfg.format == "json") {
      emit_json(cfg, to_json(t));
      return;
    }
    std::ostringstream os;
    os << "# sciball " << sciball::version << '\n';
    os << "# config " << provenance(cfg).dump() << '\n';
    os << "# metadata " << t.metadata.dump() << '\n';
    write_csv(os, t);
    emit(cfg, os.str(), "csv");
  }

  std::string read_file(std::string const& path) {
    std::ifstream in(path);
    if (!in) {
      throw PreconditionError("cannot read '" + path + "'");
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  }

  ModelPtr load_group(RunConfig const& cfg) {
    if (!cfg.group.empty() && !cfg.presentation.empty()) {
      throw PreconditionError("give either --group or --presentation, not both");
    }
    if (!cfg.group.empty()) {
      return zoo_group(cfg.group);
    }
    if (cfg.presentation.empty()) {
      throw PreconditionError("a group is required: --group <zoo name> or --presentation <file>");
    }
    ModelTraits t;
    t.one_ended     = cfg.one_ended;
    t.sci_candidate = cfg.one_ended;
    return model_from_presentation(parse_presentation(read_file(cfg.presentation)), t);
  }

  VertexId vertex_by_form(CayleyBall const& b, std::string const& text) {
    Word w = text == "1" ? Word{} : b.model().parse(text);
    auto v = b.vertex_of(w);
    if (!v) {
      throw PreconditionError("element '" + text + "' lies outside the ball");
    }
    return *v;
  }

  std::string summary_value(GrowthSample const& s) {
    return "r=" + std::to_string(s.r) + ": " + sample_value_string(s) + " (" + to_string(s.mode) + ")";
  }

  void print_table_summary(GrowthTable const& t) {
    std::cerr << to_string(t.kind) << " table for " << t.model << '\n';
    for (auto const& s : t.samples) {
      std::cerr << "  " << summary_value(s) << '\n';
    }
  }

  int run_ball(RunConfig const& cfg) {
    auto b = CayleyBall::build(load_group(cfg), cfg.radius, cfg.max_vertices);
    if (cfg.format == "json") {
      auto const& alpha = b->model().alphabet();
      json        verts = json::array();
      for (VertexId v = 0; v < b->size(); ++v) {
        json nb = json::object();
        for (std::size_t l = 0; l < b->num_letters(); ++l) {
          VertexId u = b->neighbor(v, static_cast<Letter>(l));
          if (u != kNoVertex) {
            nb[alpha.letter_name(static_cast<Letter>(l))] = u;
          }
        }
        auto nf = b->normal_form_string(v);
        verts.push_back({{"index", v}, {"normal_form", nf.empty() ? "1" : nf}, {"dist", b->dist(v)},
                         {"neighbors", std::move(nb)}});
      }
      emit_json(cfg, {{"model", b->model().name()}, {"R", b->radius()}, {"vertices", b->size()},
                      {"records", std::move(verts)}});
    } else {
      std::ostringstream os;
      os << "# sciball " << sciball::version << '\n';
      os << "# config " << provenance(cfg).dump() << '\n';
      write_ball_text(os, *b);
      emit(cfg, os.str(), "txt");
    }
    std::cerr << "ball of radius " << b->radius() << " in " << b->model().name() << ": " << b->size()
              << " vertices\n";
    return kOk;
  }

  int run_end_depth(RunConfig const& cfg) {
    auto t = end_depth_table(load_group(cfg), cfg.rmax, parse_rational(cfg.window_factor), cfg.max_vertices);
    emit_table(cfg, t);
    print_table_summary(t);
    return kOk;
  }

  int run_dead_ends(RunConfig const& cfg) {
    auto b    = CayleyBall::build(load_group(cfg), cfg.radius, cfg.max_vertices);
    auto list = dead_ends(*b);
    json arr  = json::array();
    for (auto const& d : list) {
      arr.push_back({{"element", b->normal_form_string(d.vertex)}, {"dist", d.dist}, {"depth", d.depth}});
    }
    emit_json(cfg, {{"model", b->model().name()}, {"R", b->radius()}, {"dead_ends", std::move(arr)}});
    std::cerr << list.size() << " dead ends in B(" << b->radius() << ") of " << b->model().name() << '\n';
    return kOk;
  }

  int run_delta(RunConfig const& cfg) {
    auto b = CayleyBall::build(load_group(cfg), cfg.radius, cfg.max_vertices);
    std::size_t rho_max = cfg.rho_max ? cfg.rho_max : cfg.radius;
    if (cfg.samples == 0) {
      auto t = delta_table(*b, cfg.rho_min, rho_max);
      emit_table(cfg, t);
      print_table_summary(t);
      return kOk;
    }
    json arr = json::array();
    for (std::size_t rho = cfg.rho_min; rho <= rho_max; ++rho) {
      auto e = estimate_delta_sampled(*b, rho, cfg.samples, cfg.seed);
      arr.push_back(to_json(e, *b));
      std::cerr << "  rho=" << rho << ": delta >= " << e.value << " (sampled)\n";
    }
    emit_json(cfg, {{"model", b->model().name()}, {"estimates", std::move(arr)}});
    return kOk;
  }

  int run_cpm(RunConfig const& cfg) {
    auto        b     = CayleyBall::build(load_group(cfg), cfg.radius, cfg.max_vertices);
    std::size_t M     = cfg.M;
    std::size_t lmin  = cfg.level_min ? cfg.level_min : cfg.c + 1;
    std::size_t lmax  = cfg.level_max ? cfg.level_max : cfg.radius - 1;
    if (M == 0) {
      auto delta = estimate_delta(*b, std::min<std::size_t>(3, cfg.radius)).value;
      M          = 6 * cfg.c + 2 * delta + 4;
    }
    auto t = cp_growth_table(*b, M, cfg.c, lmin, lmax, cfg.threads);
    emit_table(cfg, t);
    print_table_summary(t);
    return kOk;
  }

  SciSettings sci_settings(RunConfig const& cfg) {
    SciSettings s;
    s.window               = cfg.window;
    s.threads              = cfg.threads;
    s.budget.max_states    = cfg.states;
    s.probes.seed          = cfg.seed;
    s.probes.max_cells     = cfg.max_cells;
    s.probes.random_loops  = cfg.random_loops;
    return s;
  }

  //! Samples without an upper end whose failing probes were not all obstructed.
  bool has_unresolved(GrowthTable const& t) {
    for (auto const& s : t.samples) {
      if (s.hi) {
        continue;
      }
      auto const& rows = t.metadata["levels"][std::to_string(s.r)];
      for (auto const& row : rows) {
        if (row["unknown"].get<std::size_t>() > 0) {
          return true;
        }
      }
    }
    return false;
  }

  int run_sci_fill(RunConfig const& cfg) {
    auto m = load_group(cfg);
    if (!cfg.loop.empty()) {
      auto b   = CayleyBall::build(m, cfg.window, cfg.max_vertices);
      auto c   = make_complex(b);
      auto l   = parse_loop(*b, cfg.loop);
      auto res = fill_outside(*c, l, cfg.r, FillBudget{cfg.states, 0});
      auto j   = to_json(res, m->alphabet());
      j["loop"] = format_loop(*b, l);
      j["r"]    = cfg.r;
      emit_json(cfg, std::move(j));
      std::cerr << "fill outside B(" << cfg.r << "): " << to_string(res.outcome);
      if (res.obstruction) {
        std::cerr << " (" << res.obstruction->id << ", " << res.obstruction->value << ")";
      }
      std::cerr << '\n';
      return res.outcome == FillOutcome::unknown ? kUnknowns : kOk;
    }
    std::size_t rmax = std::max(cfg.rmax, cfg.r);
    auto        t    = sci_growth_table(m, rmax, sci_settings(cfg), cfg.r);
    emit_table(cfg, t);
    print_table_summary(t);
    for (auto const& [r, rows] : t.metadata["levels"].items()) {
      for (auto const& row : rows) {
        if (row.contains("obstruction_values")) {
          std::cerr << "  r=" << r << " N=" << row["N"] << ": obstructed (winding "
                    << row["obstruction_values"].dump() << ")\n";
        }
      }
    }
    return has_unresolved(t) ? kUnknowns : kOk;
  }

  int run_semistab(RunConfig const& cfg) {
    std::size_t rmax = std::max(cfg.rmax, cfg.r);
    auto        t    = semistability_table(load_group(cfg), rmax, sci_settings(cfg), cfg.r);
    emit_table(cfg, t);
    print_table_summary(t);
    return has_unresolved(t) ? kUnknowns : kOk;
  }

  int run_fan(RunConfig const& cfg) {
    auto b  = CayleyBall::build(load_group(cfg), cfg.radius, cfg.max_vertices);
    auto c2 = make_complex(b);
    auto mp = measure_fan_params(*b, cfg.margin, cfg.rho, cfg.r, cfg.threads);
    std::cerr << "measured c=" << mp.c_hat << " delta=" << mp.delta_hat << " L=" << mp.L_hat << " (M="
              << mp.params.M << ", " << mp.cp.pairs << " pairs)\n";
    json     scan_json;
    VertexId p = 0;
    VertexId q = 0;
    if (!cfg.p.empty() || !cfg.q.empty()) {
      if (cfg.p.empty() || cfg.q.empty()) {
        throw PreconditionError("give both --p and --q, or neither");
      }
      p = vertex_by_form(*b, cfg.p);
      q = vertex_by_form(*b, cfg.q);
    } else {
      auto scan = first_fan_edge(*c2, cfg.r, cfg.N, mp.params);
      scan_json = {{"edges_tried", scan.edges_tried},
                   {"window_failures", scan.window_failures},
                   {"degenerate", scan.degenerate}};
      if (!scan.edge) {
        throw WindowError("no edge from the sphere of radius " + std::to_string(cfg.r)
                          + " carries a non-degenerate fan in this window");
      }
      std::tie(p, q) = *scan.edge;
    }
    auto fan = build_fan(*c2, p, q, cfg.N, mp.params);
    std::optional<FanVerification> ver;
    if (!cfg.no_verify) {
      ver = verify_fan_filling(*c2, fan, cfg.n, FillBudget{cfg.states, 0}, cfg.threads);
    }
    auto j = to_json(fan, *b, ver ? &*ver : nullptr);
    j["measured"] = {{"c_hat", mp.c_hat}, {"delta_hat", mp.delta_hat}, {"L_hat", mp.L_hat},
                     {"cp", to_json(mp.cp, *b)}};
    if (!scan_json.is_null()) {
      j["edge_scan"] = std::move(scan_json);
    }
    emit_json(cfg, std::move(j));
    std::cerr << "fan " << b->normal_form_string(p) << " -> " << b->normal_form_string(q) << ", N=" << fan.N
              << ": levels_outside=" << fan.levels_outside << " marks_close=" << fan.marks_close
              << " cells_short=" << fan.cells_short << " cells_outside=" << fan.cells_outside;
    if (ver) {
      std::cerr << " verdict=" << ver->verdict;
    }
    std::cerr << '\n';
    return ver && ver->verdict == "unknown" ? kUnknowns : kOk;
  }

  CombinedModel load_combined(std::string const& ref) {
    if (ref == "zoo:trefoil_amalgam" || ref == "zoo:trefoil") {
      return trefoil_amalgam();
    }
    if (ref == "zoo:bs12") {
      return bs12_hnn();
    }
    return load_combined_model(ref);
  }

  int run_reduce(RunConfig const& cfg) {
    auto model = load_combined(cfg.model);
    if (!cfg.loop.empty()) {
      return std::visit(
          [&](auto const& m) {
            auto          b = CayleyBall::build(m.group, cfg.radius, cfg.max_vertices);
            auto          c = make_complex(b);
            ShortenParams prm;
            prm.c               = cfg.c;
            prm.c1              = cfg.c1;
            prm.fill.max_states = cfg.states;
            auto steps          = shorten_to_base(m, *c, parse_loop(*b, cfg.loop), cfg.r, prm);
            json arr            = json::array();
            for (auto const& s : steps) {
              arr.push_back(to_json(s, *b));
              std::cerr << "  " << s.measure << " " << s.before << " -> " << s.after
                        << (s.base_case ? " (base case)" : "") << '\n';
            }
            emit_json(cfg, {{"model", m.name}, {"machinery_only", !m.one_ended()}, {"steps", std::move(arr)}});
            return kOk;
          },
          model);
    }
    if (cfg.word.empty()) {
      throw PreconditionError("reduce needs --word or --loop");
    }
    if (auto const* h = std::get_if<HnnModel>(&model)) {
      auto res = britton_reduce(*h, parse_hnn_syllables(*h, cfg.word));
      emit_json(cfg, to_json(res, *h));
      std::cerr << format_syllables(*h, res.input) << "  ->  " << format_syllables(*h, res.output) << " ("
                << res.steps.size() << " steps)\n";
      return kOk;
    }
    auto const& a   = std::get<AmalgamModel>(model);
    auto        syl = parse_amalgam_syllables(a, cfg.word);
    bool        trivial = a.group->solver().is_identity(amalgam_word(a, syl));
    json        j{{"model", a.name},
                  {"word", format_syllables(a, syl)},
                  {"syllable_length", syl.syllable_length()},
                  {"trivial", trivial},
                  {"machinery_only", !a.one_ended()}};
    if (trivial && !syl.a.empty()) {
      auto i     = amalgam_pinch(a, syl);
      j["pinch"] = i;
      j["pinch_syllable"] = a.factors[syl.factor[i]]->format(syl.a[i]);
      std::cerr << "pinch at syllable " << i << '\n';
    } else {
      j["pinch"] = nullptr;
      std::cerr << (trivial ? "empty word\n" : "word is not trivial; no pinch is guaranteed\n");
    }
    emit_json(cfg, std::move(j));
    return kOk;
  }

  GrowthTable table_from(RunConfig const& cfg, std::string const& file, std::string const& group) {
    if (!file.empty() && !group.empty()) {
      throw PreconditionError("give a table file or a group for each side, not both");
    }
    if (!file.empty()) {
      std::ifstream in(file);
      if (!in) {
        throw PreconditionError("cannot read '" + file + "'");
      }
      auto t  = read_csv(in, growth_kind_from_string(cfg.kind));
      t.model = file;
      return t;
    }
    if (group.empty()) {
      throw PreconditionError("each side needs --f/--g table files or --f-group/--g-group");
    }
    if (cfg.kind != "end_depth") {
      throw PreconditionError("tables computed on the fly are end-depth tables");
    }
    return end_depth_table(zoo_group(group), cfg.rmax, parse_rational(cfg.window_factor), cfg.max_vertices);
  }

  int run_rough_equiv(RunConfig const& cfg) {
    auto f = table_from(cfg, cfg.f_table, cfg.f_group);
    auto g = table_from(cfg, cfg.g_table, cfg.g_group);
    auto w = rough_equiv(f, g, cfg.grid);
    json j{{"f", f.model}, {"g", g.model}, {"grid", cfg.grid}, {"kind", cfg.kind}};
    j["witness"] = w ? to_json(*w) : json(nullptr);
    emit_json(cfg, std::move(j));
    if (!w) {
      std::cerr << "no rough-equivalence witness within the grid\n";
      return kUnknowns;
    }
    std::cerr << "witness: " << w->c1.str() << " f(" << w->c2.str() << " x) + " << w->c3.str() << " <= g(x) <= "
              << w->C1.str() << " f(" << w->C2.str() << " x) + " << w->C3.str() << " on [" << w->r_first << ", "
              << w->r_last << "]\n";
    return kOk;
  }

  void add_group(CLI::App* s, RunConfig& cfg) {
    s->add_option("--group", cfg.group, "zoo group, e.g. Zd:2, free:2, surface2, racg-pentagon, bs12");
    s->add_option("--presentation", cfg.presentation, "presentation file");
    s->add_flag("--one-ended", cfg.one_ended, "mark a presentation-file group one-ended");
    s->add_option("--max-vertices", cfg.max_vertices, "ball size budget")->capture_default_str();
  }
  void add_output(CLI::App* s, RunConfig& cfg, std::string const& def, std::vector<std::string> formats) {
    s->add_option("--out", cfg.out, "output file (default: $SCIBALL_OUT_DIR/<subcommand>.<ext> or stdout)");
    s->add_option("--format", cfg.format, "output format")->default_str(def)->check(CLI::IsMember(formats));
  }
  void add_threads(CLI::App* s, RunConfig& cfg) {
    s->add_option("--threads", cfg.threads, "worker threads")->capture_default_str()->check(CLI::Range(1, 256));
  }
  void add_fill(CLI::App* s, RunConfig& cfg) {
    s->add_option("--states", cfg.states, "fill search budget per loop")
        ->capture_default_str()
        ->check(CLI::Range(std::size_t{1}, std::size_t{100'000'000}));
  }
  void add_probes(CLI::App* s, RunConfig& cfg) {
    s->add_option("--r", cfg.r, "inner radius (first r)")->capture_default_str()->check(CLI::Range(0, 64));
    s->add_option("--rmax", cfg.rmax, "last r (defaults to --r)")->capture_default_str();
    s->add_option("--window", cfg.window, "ball radius")->capture_default_str()->check(CLI::Range(3, 64));
    s->add_option("--seed", cfg.seed, "random probe seed")->capture_default_str();
    s->add_option("--max-cells", cfg.max_cells, "cell probes per level")->capture_default_str();
    s->add_option("--random-loops", cfg.random_loops, "random probes per level")->capture_default_str();
  }

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App  app{"Desk-scale growth functions at infinity for finitely presented groups", "sciball"};
  app.set_version_flag("--version", std::string(sciball::version));
  app.require_subcommand(1);

  auto* ball = app.add_subcommand("ball", "enumerate a ball of the Cayley graph");
  add_group(ball, cfg);
  add_output(ball, cfg, "text", {"text", "json"});
  ball->add_option("--radius", cfg.radius, "ball radius")->required()->check(CLI::Range(0, 64));

  auto* ed = app.add_subcommand("end-depth", "end-depth table V0(r)");
  add_group(ed, cfg);
  add_output(ed, cfg, "csv", {"csv", "json"});
  ed->add_option("--rmax", cfg.rmax, "largest r")->required()->check(CLI::Range(0, 64));
  ed->add_option("--window-factor", cfg.window_factor, "window is ceil(f r) + 2")->capture_default_str();

  auto* de = app.add_subcommand("dead-ends", "dead ends and their depths");
  add_group(de, cfg);
  add_output(de, cfg, "json", {"json"});
  de->add_option("--radius", cfg.radius, "ball radius")->required()->check(CLI::Range(1, 64));

  auto* dl = app.add_subcommand("delta", "slim-triangle constant by side bound");
  add_group(dl, cfg);
  add_output(dl, cfg, "csv", {"csv", "json"});
  dl->add_option("--radius", cfg.radius, "ball radius")->required()->check(CLI::Range(1, 64));
  dl->add_option("--rho-min", cfg.rho_min, "smallest side bound")->capture_default_str();
  dl->add_option("--rho-max", cfg.rho_max, "largest side bound (default: radius)");
  dl->add_option("--samples", cfg.samples, "random triangles per bound; 0 is exhaustive")->capture_default_str();
  dl->add_option("--seed", cfg.seed, "sampling seed")->capture_default_str();

  auto* cp = app.add_subcommand("cpm", "complement path lengths L(M) by level");
  add_group(cp, cfg);
  add_output(cp, cfg, "csv", {"csv", "json"});
  add_threads(cp, cfg);
  cp->add_option("--radius", cfg.radius, "ball radius")->required()->check(CLI::Range(2, 64));
  cp->add_option("--M", cfg.M, "pair distance bound (default 6c + 2 delta + 4)");
  cp->add_option("--c", cfg.c, "depth allowance")->capture_default_str();
  cp->add_option("--level-min", cfg.level_min, "first level (default c + 1)");
  cp->add_option("--level-max", cfg.level_max, "last level (default R - 1)");

  auto* sf = app.add_subcommand("sci-fill", "sci growth intervals, or fill one loop");
  add_group(sf, cfg);
  add_output(sf, cfg, "csv", {"csv", "json"});
  add_threads(sf, cfg);
  add_fill(sf, cfg);
  add_probes(sf, cfg);
  sf->add_option("--loop", cfg.loop, "fill this loop outside B(r): 'base=<nf>; word=<letters>'");

  auto* ss = app.add_subcommand("semistab", "semistability thresholds along geodesic rays");
  add_group(ss, cfg);
  add_output(ss, cfg, "csv", {"csv", "json"});
  add_threads(ss, cfg);
  add_fill(ss, cfg);
  add_probes(ss, cfg);

  auto* fa = app.add_subcommand("fan", "build and verify a fan of rays and complement paths");
  add_group(fa, cfg);
  add_output(fa, cfg, "json", {"json"});
  add_threads(fa, cfg);
  add_fill(fa, cfg);
  fa->add_option("--radius", cfg.radius, "ball radius")->required()->check(CLI::Range(3, 64));
  fa->add_option("--r", cfg.r, "radius of p")->capture_default_str();
  fa->add_option("--N", cfg.N, "number of levels above r")->capture_default_str();
  fa->add_option("--n", cfg.n, "fill sub-cells outside B(n)")->capture_default_str();
  fa->add_option("--margin", cfg.margin, "ray-constant margin")->capture_default_str();
  fa->add_option("--rho", cfg.rho, "side bound for delta")->capture_default_str();
  fa->add_option("--p", cfg.p, "normal form of p (default: first non-degenerate edge)");
  fa->add_option("--q", cfg.q, "normal form of q, a neighbour of p");
  fa->add_flag("--no-verify", cfg.no_verify, "skip filling the sub-cells");

  auto* rd = app.add_subcommand("reduce", "Britton reduction, amalgam pinches and loop shortening");
  add_output(rd, cfg, "json", {"json"});
  add_fill(rd, cfg);
  rd->add_option("--model", cfg.model, "amalgam/HNN model file, or zoo:trefoil_amalgam, zoo:bs12")->required();
  rd->add_option("--word", cfg.word, "syllable word, e.g. 'T | aa | t | AAAA'");
  rd->add_option("--loop", cfg.loop, "shorten this loop to the base case");
  rd->add_option("--radius", cfg.radius, "ball radius for --loop")->capture_default_str();
  rd->add_option("--r", cfg.r, "filling radius")->capture_default_str();
  rd->add_option("--c", cfg.c, "connector avoids B(c r)")->capture_default_str();
  rd->add_option("--c1", cfg.c1, "loop avoids B(c1 r)")->capture_default_str();
  rd->add_option("--max-vertices", cfg.max_vertices, "ball size budget")->capture_default_str();

  auto* re = app.add_subcommand("rough-equiv", "rough-equivalence witness between two growth tables");
  add_output(re, cfg, "json", {"json"});
  re->add_option("--f", cfg.f_table, "first table (CSV)");
  re->add_option("--g", cfg.g_table, "second table (CSV)");
  re->add_option("--f-group", cfg.f_group, "compute the first end-depth table for this zoo group");
  re->add_option("--g-group", cfg.g_group, "compute the second end-depth table for this zoo group");
  re->add_option("--kind", cfg.kind, "table kind")->capture_default_str();
  re->add_option("--grid", cfg.grid, "grid bound")->capture_default_str()->check(CLI::Range(1, 64));
  re->add_option("--rmax", cfg.rmax, "largest r for computed tables")->capture_default_str();
  re->add_option("--window-factor", cfg.window_factor, "window factor for computed tables")->capture_default_str();
  re->add_option("--max-vertices", cfg.max_vertices, "ball size budget")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (CLI::CallForHelp const& e) {
    return app.exit(e);
  } catch (CLI::CallForAllHelp const& e) {
    return app.exit(e);
  } catch (CLI::CallForVersion const& e) {
    return app.exit(e);
  } catch (CLI::ParseError const& e) {
    app.exit(e);
    return kConfig;
  }

  auto* sub      = app.get_subcommands().front();
  cfg.subcommand = sub->get_name();
  if (cfg.format.empty()) {
    cfg.format = sub->get_option("--format")->get_default_str();
  }
  cfg.values     = option_values(*sub);
  try {
    if (cfg.subcommand == "ball") return run_ball(cfg);
    if (cfg.subcommand == "end-depth") return run_end_depth(cfg);
    if (cfg.subcommand == "dead-ends") return run_dead_ends(cfg);
    if (cfg.subcommand == "delta") return run_delta(cfg);
    if (cfg.subcommand == "cpm") return run_cpm(cfg);
    if (cfg.subcommand == "sci-fill") return run_sci_fill(cfg);
    if (cfg.subcommand == "semistab") return run_semistab(cfg);
    if (cfg.subcommand == "fan") return run_fan(cfg);
    if (cfg.subcommand == "reduce") return run_reduce(cfg);
    if (cfg.subcommand == "rough-equiv") return run_rough_equiv(cfg);
  } catch (BudgetExceeded const& e) {
    std::cerr << "budget exhausted: " << e.what() << '\n';
    return kUnknowns;
  } catch (PreconditionError const& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (sciball::ParseError const& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kConfig;
  } catch (WindowError const& e) {
    std::cerr << "window too small: " << e.what() << '\n';
    return kConfig;
  } catch (OutputError const& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (std::exception const& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  std::cerr << "unknown subcommand '" << cfg.subcommand << "'\n";
  return kConfig;
}
