#include "gbs/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "gbs/borel.hpp"
#include "gbs/dsl.hpp"
#include "gbs/error.hpp"
#include "gbs/group.hpp"
#include "gbs/relations.hpp"
#include "gbs/workbench.hpp"

namespace gbs {

namespace {

using json = nlohmann::json;

struct Options {
  std::optional<std::string> lambda;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> samples;
  std::optional<std::uint64_t> grid_depth;
  std::optional<std::string> config;
  bool json = false;
};

class InputError : public Error {
 public:
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

WorkbenchSpec load_spec(const std::string& path) {
  const auto text = read_file(path);
  try {
    return parse_spec(text);
  } catch (const ParseError& e) {
    throw InputError(path + ":" + e.what());
  }
}

/// Defaults, then GBS_SEED, then the config file, then the spec's lambda,
/// then flags.
WorkbenchConfig resolve_config(const Options& o, const std::optional<Ordinal>& spec_lambda) {
  WorkbenchConfig cfg;
  if (const char* env = std::getenv("GBS_SEED"); env && *env) {
    try {
      cfg.seed = std::stoull(env);
    } catch (const std::exception&) {
      throw InputError(std::string("GBS_SEED is not a number: ") + env);
    }
  }
  if (o.config) {
    json j;
    try {
      j = json::parse(read_file(*o.config));
    } catch (const json::exception& e) {
      throw InputError(*o.config + ": " + e.what());
    }
    if (!j.is_object()) throw InputError(*o.config + ": expected a JSON object");
    try {
      for (const auto& [k, v] : j.items()) {
        if (k == "lambda") {
          cfg.lambda = parse_ordinal(v.get<std::string>());
        } else if (k == "seed") {
          cfg.seed = v.get<std::uint64_t>();
        } else if (k == "samples" || k == "sampleCount") {
          cfg.sample_count = v.get<std::uint64_t>();
        } else if (k == "gridDepth") {
          cfg.grid_depth = v.get<std::uint64_t>();
        } else if (k == "wordBound") {
          cfg.word_bound = v.get<std::uint32_t>();
        } else {
          throw InputError(*o.config + ": unknown key '" + k + "'");
        }
      }
    } catch (const json::exception& e) {
      throw InputError(*o.config + ": " + e.what());
    } catch (const ParseError& e) {
      throw InputError(*o.config + ": lambda: " + e.what());
    }
  }
  if (spec_lambda) cfg.lambda = *spec_lambda;
  if (o.lambda) {
    try {
      cfg.lambda = parse_ordinal(*o.lambda);
    } catch (const ParseError& e) {
      throw InputError(std::string("--lambda: ") + e.what());
    }
  }
  if (o.seed) cfg.seed = *o.seed;
  if (o.samples) cfg.sample_count = *o.samples;
  if (o.grid_depth) cfg.grid_depth = *o.grid_depth;
  try {
    cfg.validate();
  } catch (const DomainError& e) {
    throw InputError(e.what());
  }
  return cfg;
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

json report_json(const std::string& name, const Report& r) {
  json j{{"name", name},           {"verdict", verdict_name(r.verdict)}, {"checked", r.checked},
         {"failed", r.failed},     {"seed", r.seed},                     {"lambda", r.lambda.to_string()},
         {"elapsedMs", r.elapsed_ms}};
  if (r.counterexample) {
    j["counterexample"] = {{"x", print_point(r.counterexample->x)},
                           {"y", print_point(r.counterexample->y)},
                           {"sourceRelated", r.counterexample->source_related},
                           {"targetRelated", r.counterexample->target_related}};
  }
  if (!r.message.empty()) j["message"] = r.message;
  return j;
}

int check_reduction(const std::string& file, const Options& o, std::ostream& out) {
  const auto spec = load_spec(file);
  const auto cfg = resolve_config(o, spec.lambda());
  const auto reds = spec.all<ReductionStmt>();
  if (reds.empty()) throw InputError(file + ": no reduction statements");
  int code = kExitOk;
  for (const auto* r : reds) {
    const auto rep = verify_reduction(r->spec, cfg);
    if (o.json) {
      out << report_json(r->name, rep).dump() << "\n";
    } else {
      out << "reduction " << r->name << ": " << verdict_name(rep.verdict) << " (checked " << rep.checked << ", failed "
          << rep.failed << ", " << static_cast<long long>(rep.elapsed_ms) << " ms)\n";
      if (!rep.message.empty()) out << "  " << rep.message << "\n";
      if (rep.counterexample) {
        out << "  x = " << print_point(rep.counterexample->x) << "\n";
        out << "  y = " << print_point(rep.counterexample->y) << "\n";
        out << "  source related: " << (rep.counterexample->source_related ? "true" : "false")
            << ", target related: " << (rep.counterexample->target_related ? "true" : "false") << "\n";
      }
    }
    if (rep.verdict == Report::Verdict::InputError) {
      code = kExitInputError;
    } else if (rep.verdict == Report::Verdict::Fail && code == kExitOk) {
      code = kExitViolation;
    }
  }
  return code;
}

int eval_game(const std::string& file, const Options& o, std::ostream& out) {
  const auto spec = load_spec(file);
  resolve_config(o, spec.lambda());
  const auto evs = spec.all<EvalStmt>();
  if (evs.empty()) throw InputError(file + ": no eval statements");
  int code = kExitOk;
  std::size_t i = 0;
  for (const auto* e : evs) {
    const Point* y = e->args.size() > 1 ? &e->args[1] : nullptr;
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = game_member(e->code, e->args[0], y);
    const bool verified = strategy_wins(e->code, r, e->args[0], y);
    const double ms = ms_since(t0);
    if (!verified) code = kExitViolation;
    if (o.json) {
      out << json{{"eval", i}, {"member", r.member}, {"winner", r.strategy.player_two ? "II" : "I"},
                  {"strategyVerified", verified}, {"nodes", e->code.nodes().size()}, {"elapsedMs", ms}}
                 .dump()
          << "\n";
    } else {
      out << "eval " << i << ": " << (r.member ? "member" : "not a member") << ", player "
          << (r.strategy.player_two ? "II" : "I") << " wins, strategy " << (verified ? "verified" : "REFUTED") << "\n";
    }
    ++i;
  }
  return code;
}

int approx_lemma(const std::string& file, const Options& o, std::ostream& out) {
  const auto spec = load_spec(file);
  const auto cfg = resolve_config(o, spec.lambda());
  const auto aps = spec.all<ApproxStmt>();
  if (aps.empty()) throw InputError(file + ": no approx statements");
  int code = kExitOk;
  std::size_t i = 0;
  for (const auto* a : aps) {
    const Point* y = a->args.size() > 1 ? &a->args[1] : nullptr;
    const auto r = approx_lemma_check(a->code, a->args[0], y, cfg.grid_depth);
    if (!r.stable) code = kExitViolation;
    if (o.json) {
      json j{{"approx", i},          {"member", r.member}, {"closureBound", r.closure_bound.to_string()},
             {"stable", r.stable},   {"levelsChecked", r.levels_checked}, {"gridDepth", cfg.grid_depth}};
      if (r.first_unstable) j["firstUnstable"] = r.first_unstable->to_string();
      out << j.dump() << "\n";
    } else {
      out << "approx " << i << ": " << (r.member ? "member" : "not a member") << ", closure bound "
          << r.closure_bound.to_string() << ", " << r.levels_checked << " levels checked, "
          << (r.stable ? "stable" : "UNSTABLE at " + r.first_unstable->to_string()) << "\n";
    }
    ++i;
  }
  return code;
}

int orbit_e0(const std::string& file, const Options& o, std::ostream& out) {
  const auto spec = load_spec(file);
  const auto cfg = resolve_config(o, spec.lambda());
  const auto obs = spec.all<OrbitStmt>();
  if (obs.empty()) throw InputError(file + ": no orbit statements");
  int code = kExitOk;
  std::size_t i = 0;
  for (const auto* s : obs) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<Point> carrier;
    std::optional<GroupAction> act;
    std::optional<CylinderEnumeration> en;
    try {
      carrier = s->carrier.expand(cfg.lambda);
      act = s->action.build();
      act->verify_on(carrier);
      en.emplace(s->bound);
      en->require_separates(carrier);
    } catch (const DomainError& e) {
      throw InputError("orbit " + std::to_string(i) + ": " + e.what());
    }
    std::vector<OrdMap> reduced;
    std::vector<Trace> traces;
    for (const auto& x : carrier) {
      reduced.push_back(red_action_to_E0(*act, *en, x, cfg.lambda));
      traces.push_back(red_ac1(*act, *en, x));
    }
    std::uint64_t pairs = 0, related = 0, e0_mismatch = 0, ac1_mismatch = 0;
    std::optional<std::pair<std::size_t, std::size_t>> witness;
    for (std::size_t a = 0; a < carrier.size(); ++a) {
      for (std::size_t b = 0; b < carrier.size(); ++b) {
        ++pairs;
        const bool orb = orbit_decide(*act, carrier[a], carrier[b]).has_value();
        related += orb;
        const bool e0 = decide_E0(Point::ords(reduced[a]), Point::ords(reduced[b]));
        const bool ac1 = ac1_criterion(act->group(), traces[a], traces[b]).has_value();
        if (e0 != orb) ++e0_mismatch;
        if (ac1 != orb) ++ac1_mismatch;
        if ((e0 != orb || ac1 != orb) && !witness) witness = {a, b};
      }
    }
    const bool ok = e0_mismatch == 0 && ac1_mismatch == 0;
    if (!ok) code = kExitViolation;
    const double ms = ms_since(t0);
    if (o.json) {
      json j{{"orbit", i},
             {"verdict", ok ? "pass" : "fail"},
             {"action", print_action(s->action)},
             {"carrier", carrier.size()},
             {"checked", pairs},
             {"related", related},
             {"e0Mismatches", e0_mismatch},
             {"ac1Mismatches", ac1_mismatch},
             {"lambda", cfg.lambda.to_string()},
             {"elapsedMs", ms}};
      if (witness) j["counterexample"] = {{"x", print_point(carrier[witness->first])}, {"y", print_point(carrier[witness->second])}};
      out << j.dump() << "\n";
    } else {
      out << "orbit " << i << ": " << (ok ? "pass" : "fail") << " (" << carrier.size() << " points, " << pairs
          << " pairs, " << related << " related, " << e0_mismatch << " E0 mismatches, " << ac1_mismatch
          << " trace mismatches)\n";
      if (witness) {
        out << "  x = " << print_point(carrier[witness->first]) << "\n";
        out << "  y = " << print_point(carrier[witness->second]) << "\n";
      }
    }
    ++i;
  }
  return code;
}

int jump_tower(const std::string& level_text, const Options& o, std::ostream& out) {
  const auto cfg = resolve_config(o, std::nullopt);
  Ordinal level;
  try {
    level = parse_ordinal(level_text);
  } catch (const ParseError& e) {
    throw InputError(std::string("LEVEL: ") + e.what());
  }
  EqRelHandle tower = EqRelHandle::id(SpaceDescriptor::bits());
  try {
    tower = make_tower(EqRelHandle::id(SpaceDescriptor::bits()), level);
  } catch (const DomainError& e) {
    throw InputError(std::string("LEVEL: ") + e.what());
  }
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(cfg.seed);
  std::uint64_t checks = 0, violations = 0;
  std::string first;
  auto note = [&](bool ok, const char* what) {
    ++checks;
    if (ok) return;
    if (violations++ == 0) first = what;
  };
  for (std::uint64_t k = 0; k < cfg.sample_count; ++k) {
    const auto x = random_point(tower.space(), rng, cfg.lambda);
    note(decide(tower, x, x), "reflexivity");
    const auto y = k % 2 ? equivalent_edit(tower, x, rng) : random_point(tower.space(), rng, cfg.lambda);
    const bool xy = decide(tower, x, y);
    note(xy == decide(tower, y, x), "symmetry");
    if (k % 2) note(xy, "constructed equivalence");
    const auto z = equivalent_edit(tower, y, rng);
    if (xy) note(decide(tower, x, z), "transitivity");
  }
  const bool ok = violations == 0;
  const double ms = ms_since(t0);
  if (o.json) {
    json j{{"verdict", ok ? "pass" : "fail"}, {"relation", tower.to_string()}, {"level", level.to_string()},
           {"checked", checks},               {"failed", violations},          {"seed", cfg.seed},
           {"lambda", cfg.lambda.to_string()}, {"elapsedMs", ms}};
    if (!ok) j["message"] = first;
    out << j.dump() << "\n";
  } else {
    out << "tower level " << level.to_string() << " = " << tower.to_string() << "\n";
    out << (ok ? "pass" : "fail") << " (" << checks << " axiom checks, " << violations << " violations";
    if (!ok) out << ", first: " << first;
    out << ")\n";
  }
  return ok ? kExitOk : kExitViolation;
}

Point point_argument(const std::string& arg, const char* role) {
  std::string text = arg;
  std::string where = std::string(role);
  if (std::ifstream probe(arg); probe) {
    text = read_file(arg);
    where = arg;
  }
  try {
    return parse_point(text);
  } catch (const ParseError& e) {
    throw InputError(where + ":" + e.what());
  }
}

int decide_command(const std::string& rel_text, const std::string& xa, const std::string& ya, const Options& o,
                   std::ostream& out) {
  resolve_config(o, std::nullopt);
  Relation rel = Relation::handle(EqRelHandle::e0());
  try {
    rel = parse_relation(rel_text);
  } catch (const ParseError& e) {
    throw InputError(std::string("REL:") + e.what());
  }
  const auto x = point_argument(xa, "X");
  const auto y = point_argument(ya, "Y");
  bool related = false;
  try {
    related = rel.decide(x, y);
  } catch (const SpaceMismatch& e) {
    throw InputError(e.what());
  } catch (const DomainError& e) {
    throw InputError(e.what());
  }
  if (o.json) {
    out << json{{"relation", rel.to_string()}, {"related", related}}.dump() << "\n";
  } else {
    out << (related ? "true" : "false") << "\n";
  }
  return kExitOk;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Workbench for generalised Baire space reductions and Borel codes", "gbs"};
  app.require_subcommand(1);
  Options o;
  std::uint64_t seed = 0, samples = 0, grid = 0;
  std::string lambda, config;
  auto* lambda_opt = app.add_option("--lambda", lambda, "Space bound, a limit w^2*m")->type_name("ORD");
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed (falls back to GBS_SEED)");
  auto* samples_opt = app.add_option("--samples", samples, "Sample count");
  auto* grid_opt = app.add_option("--grid-depth", grid, "Limits w*q checked for q up to this depth");
  auto* config_opt = app.add_option("--config", config, "JSON config file")->type_name("FILE");
  app.add_flag("--json", o.json, "Emit JSON reports");
  app.fallthrough();

  std::string file, level, rel, xa, ya;
  auto* cr = app.add_subcommand("check-reduction", "Verify every reduction statement of a spec file");
  cr->add_option("FILE", file)->required();
  auto* eg = app.add_subcommand("eval-game", "Solve the membership game of every eval statement");
  eg->add_option("FILE", file)->required();
  auto* al = app.add_subcommand("approx-lemma", "Check restriction stability for every approx statement");
  al->add_option("FILE", file)->required();
  auto* oe = app.add_subcommand("orbit-e0", "Check the orbit reduction to E0 on every orbit statement");
  oe->add_option("FILE", file)->required();
  auto* jt = app.add_subcommand("jump-tower", "Build the iterated jump of id at LEVEL and test its axioms");
  jt->add_option("LEVEL", level)->required();
  auto* dc = app.add_subcommand("decide", "Decide REL on two points (files or inline point text)");
  dc->add_option("REL", rel)->required();
  dc->add_option("X", xa)->required();
  dc->add_option("Y", ya)->required();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitInputError;
  }
  if (*lambda_opt) o.lambda = lambda;
  if (*seed_opt) o.seed = seed;
  if (*samples_opt) o.samples = samples;
  if (*grid_opt) o.grid_depth = grid;
  if (*config_opt) o.config = config;

  try {
    if (cr->parsed()) return check_reduction(file, o, out);
    if (eg->parsed()) return eval_game(file, o, out);
    if (al->parsed()) return approx_lemma(file, o, out);
    if (oe->parsed()) return orbit_e0(file, o, out);
    if (jt->parsed()) return jump_tower(level, o, out);
    if (dc->parsed()) return decide_command(rel, xa, ya, o, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  err << app.help();
  return kExitInputError;
}

int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_command(args, out, err);
}

}  // namespace gbs
