#include "ncbkw/cli.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "ncbkw/version.hpp"

namespace ncbkw {

namespace {

bool log_enabled() {
  const char* v = std::getenv("NCBKW_LOG");
  return v && *v && std::string(v) != "0";
}

void log_line(const std::string& msg) {
  if (log_enabled()) std::cerr << "[" << kToolName << "] " << msg << "\n";
}

// Ordered results, unordered execution: work(i) fills slot i only.
void parallel_ordered(int jobs, int count,
                      const std::function<void(int)>& work) {
  if (jobs <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) work(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(count);
  auto worker = [&] {
    for (int i; (i = next.fetch_add(1)) < count;) {
      try {
        work(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < std::min(jobs, count); ++t) pool.emplace_back(worker);
  for (std::thread& th : pool) th.join();
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
}

int positive_int(const Json& j, const char* key, int fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  const Json& v = j[key];
  if (!v.is_number_integer() || v.get<int>() <= 0)
    throw ParseError(std::string("$.") + key + ": expected a positive integer");
  return v.get<int>();
}

Json report_choi(const Json& input, const RunConfig&) {
  CPMap m = parse_mapspec(input, "$");
  Json j;
  j["in_dim"] = m.in_dim();
  j["out_dim"] = m.out_dim();
  j["completely_positive"] = m.completely_positive();
  j["unital"] = m.unital_flag();
  j["choi_min_eig"] = m.choi_min_eig();
  j["choi"] = dump_cmat(m.choi());
  return j;
}

Json report_check_map(const Json& input, const RunConfig& cfg) {
  CPMap m = parse_mapspec(input, "$");
  int trials = positive_int(input, "trials", 500);
  log_line("falsifier battery, " + std::to_string(trials) + " trials");
  std::optional<CMat> schwarz = schwarz_falsify(m, trials, cfg.seed);
  std::optional<CMat> two_pos = two_positive_falsify(m, trials, cfg.seed);
  Json j = report_choi(input, cfg);
  j["trials"] = trials;
  j["schwarz_witness"] = schwarz ? dump_cmat(*schwarz) : Json(nullptr);
  j["two_positive_witness"] = two_pos ? dump_cmat(*two_pos) : Json(nullptr);
  return j;
}

Json report_algebra(const Json& input, const RunConfig&) {
  SystemSpec spec = parse_system(input, "$");
  OperatorSystem sys = make_operator_system(spec.generators, spec.ambient_dim);
  StarAlgebra alg = generate_star_algebra(sys.basis, spec.ambient_dim);
  return Json{{"ambient_dim", spec.ambient_dim},
              {"system", dump_system(sys)},
              {"algebra", dump_algebra(alg)}};
}

Json report_extend(const Json& input, const RunConfig& cfg) {
  ExtensionProblem p = parse_extension(input, "$");
  UniquenessReport r = analyze_uniqueness(p, cfg.tol, cfg.seed);
  return dump_extension_report(r, p);
}

Json report_bkw(const Json& input, const RunConfig& cfg) {
  if (!input.is_object() || !input.contains("system"))
    throw ParseError("$.system: missing required field");
  if (!input.contains("phi"))
    throw ParseError("$.phi: missing required field");
  SystemSpec spec = parse_system(input["system"], "$.system");
  CPMap phi = parse_mapspec(input["phi"], "$.phi");
  OperatorSystem sys = make_operator_system(spec.generators, spec.ambient_dim);
  StarAlgebra alg = generate_star_algebra(sys.basis, spec.ambient_dim);
  BkwReport r = bkw_check(phi, sys, alg, cfg.tol, cfg.seed);
  return dump_bkw_report(r);
}

Json report_spread(const Json& input, const RunConfig& cfg) {
  ExtensionProblem p = parse_extension(input, "$");
  if (!input.contains("probe"))
    throw ParseError("$.probe: missing required field");
  CMat probe = parse_cmat(input["probe"], "$.probe");
  int directions = positive_int(input, "directions", 8);
  SpreadReport r = extension_spread(p, probe, directions, cfg.tol, cfg.seed);
  return dump_spread_report(r);
}

Json report_popa(const Json& input, const RunConfig& cfg) {
  PopaProblem p = parse_popa(input, "$");
  PopaReport r = popa_verdict(p, cfg.tol);
  return dump_popa_report(r);
}

Json report_hyperrigid(const Json& input, const RunConfig& cfg) {
  HyperrigidityProblem p = parse_hyperrigid(input, "$");
  HyperrigidityReport rep;
  if (cfg.jobs > 1 && p.family.size() > 1) {
    std::vector<HyperrigidityReport> parts(p.family.size());
    parallel_ordered(cfg.jobs, int(p.family.size()), [&](int i) {
      HyperrigidityProblem single = p;
      single.family = {p.family[std::size_t(i)]};
      parts[std::size_t(i)] = hyperrigidity_check(single, cfg.tol, cfg.seed);
    });
    bool any_undecided = false;
    rep.hyperrigid_on_family = true;
    for (HyperrigidityReport& part : parts) {
      HyperrigidityMember& m = part.members.front();
      if (m.verdict == Uniqueness::NonUnique) rep.refuted = true;
      if (m.verdict != Uniqueness::Unique) rep.hyperrigid_on_family = false;
      if (m.verdict == Uniqueness::Undecided) any_undecided = true;
      rep.members.push_back(std::move(m));
    }
    rep.decided = rep.refuted || !any_undecided;
  } else {
    rep = hyperrigidity_check(p, cfg.tol, cfg.seed);
  }
  return dump_hyperrigidity_report(rep);
}

Json dispatch(const RunConfig& cfg, const Json& input) {
  if (cfg.command == "choi") return report_choi(input, cfg);
  if (cfg.command == "check-map") return report_check_map(input, cfg);
  if (cfg.command == "algebra") return report_algebra(input, cfg);
  if (cfg.command == "extend") return report_extend(input, cfg);
  if (cfg.command == "bkw") return report_bkw(input, cfg);
  if (cfg.command == "spread") return report_spread(input, cfg);
  if (cfg.command == "popa") return report_popa(input, cfg);
  if (cfg.command == "hyperrigid") return report_hyperrigid(input, cfg);
  throw InvalidArgument("unknown command: " + cfg.command);
}

int verdict_exit_code(const std::string& command, const Json& report) {
  auto undecided = [](const Json& v) {
    return v.is_string() &&
           (v == Json("UNDECIDED") || v == Json("STALLED"));
  };
  if (command == "extend") return undecided(report["status"]) ? 3 : 0;
  if (command == "bkw")
    return undecided(report["status"]) || undecided(report["algebra_status"])
               ? 3
               : 0;
  if (command == "spread" || command == "hyperrigid")
    return report["decided"] == Json(false) ? 3 : 0;
  return 0;
}

Json envelope(const RunConfig& cfg, Json report) {
  Json config;
  config["command"] = cfg.command;
  config["input"] = cfg.input_path ? Json(*cfg.input_path) : Json(nullptr);
  config["seed"] = cfg.seed;
  config["tol"] = cfg.tol;
  config["output"] = cfg.output ? Json(*cfg.output) : Json(nullptr);
  config["format"] = cfg.format;
  config["jobs"] = cfg.jobs;
  Json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["config"] = std::move(config);
  j["report"] = std::move(report);
  return j;
}

const Json* find_path(const Json& j, const std::string& dotted) {
  const Json* cur = &j;
  std::size_t pos = 0;
  while (true) {
    std::size_t dot = dotted.find('.', pos);
    std::string key = dot == std::string::npos
                          ? dotted.substr(pos)
                          : dotted.substr(pos, dot - pos);
    if (!cur->is_object() || !cur->contains(key)) return nullptr;
    cur = &(*cur)[key];
    if (dot == std::string::npos) return cur;
    pos = dot + 1;
  }
}

std::string scalar_text(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "null";
  if (v.is_object() || v.is_array()) return "present";
  return v.dump();
}

std::vector<std::string> text_keys(const std::string& command) {
  if (command == "choi")
    return {"in_dim", "out_dim", "completely_positive", "unital",
            "choi_min_eig"};
  if (command == "check-map")
    return {"in_dim",       "out_dim", "completely_positive",
            "unital",       "choi_min_eig", "trials",
            "schwarz_witness", "two_positive_witness"};
  if (command == "algebra") return {"ambient_dim", "system.dim",
                                    "algebra.dim"};
  if (command == "extend")
    return {"status", "null_dim", "support_rank", "second_distance",
            "detail"};
  if (command == "bkw")
    return {"status",           "bkw",
            "algebra_status",   "null_dim",
            "algebra_null_dim", "second_distance",
            "algebra_distance", "detail"};
  if (command == "spread") return {"spread", "decided"};
  if (command == "popa")
    return {"verdict",        "margin",          "residual_left",
            "residual_right", "kappa",           "kappa_inequality",
            "premise_slope",  "conclusion_slope"};
  if (command == "hyperrigid")
    return {"decided", "hyperrigid_on_family", "refuted"};
  return {};
}

std::string text_render(const RunConfig& cfg, const Json& env) {
  std::string out =
      std::string(kToolName) + " " + kToolVersion + " " + cfg.command + "\n";
  const Json& report = env["report"];
  for (const std::string& key : text_keys(cfg.command)) {
    const Json* v = find_path(report, key);
    if (v) out += key + ": " + scalar_text(*v) + "\n";
  }
  if (cfg.command == "hyperrigid" && report.contains("members"))
    for (const Json& m : report["members"])
      out += "member " + m["mults"].dump() + ": " +
             m["status"].get<std::string>() + " (null_dim " +
             m["null_dim"].dump() + ")\n";
  return out;
}

int write_payload(const RunConfig& cfg, const std::string& payload) {
  if (cfg.output) {
    std::ofstream out(*cfg.output, std::ios::binary);
    if (!out) {
      std::cerr << kToolName << ": cannot write " << *cfg.output << "\n";
      return 2;
    }
    out << payload;
    return 0;
  }
  std::cout << payload;
  return 0;
}

int run_examples(const RunConfig& config) {
  const std::vector<BundledExample>& corpus = bundled_examples();
  std::vector<const BundledExample*> chosen;
  if (config.example_name) {
    for (const BundledExample& ex : corpus)
      if (config.example_name == ex.name) chosen.push_back(&ex);
    if (chosen.empty()) {
      std::cerr << kToolName << ": unknown example: " << *config.example_name
                << "\n";
      return 2;
    }
  } else {
    for (const BundledExample& ex : corpus) chosen.push_back(&ex);
  }

  std::vector<std::string> lines(chosen.size());
  std::vector<char> ok(chosen.size(), 0);
  parallel_ordered(config.jobs, int(chosen.size()), [&](int i) {
    const BundledExample& ex = *chosen[std::size_t(i)];
    log_line(std::string("example ") + ex.name);
    RunConfig sub;  // stored verdicts assume the default seed and tol
    sub.command = ex.command;
    std::string line;
    try {
      Json report = dispatch(sub, Json::parse(ex.input));
      Json expected = Json::parse(ex.expected);
      for (auto it = expected.begin(); it != expected.end(); ++it) {
        const Json* got = find_path(report, it.key());
        if (!got || *got != it.value()) {
          line = std::string(ex.name) + ": field " + it.key() +
                 ": expected " + it.value().dump() + ", got " +
                 (got ? got->dump() : "(missing)");
          break;
        }
      }
      if (line.empty()) {
        ok[std::size_t(i)] = 1;
        line = std::string(ex.name) + ": ok";
      }
    } catch (const std::exception& e) {
      line = std::string(ex.name) + ": error: " + e.what();
    }
    lines[std::size_t(i)] = line;
  });

  bool all_ok = true;
  for (char c : ok) all_ok = all_ok && c;
  std::string payload;
  if (config.format == "text") {
    for (const std::string& line : lines) payload += line + "\n";
  } else {
    Json arr = Json::array();
    for (std::size_t i = 0; i < chosen.size(); ++i)
      arr.push_back(Json{{"name", chosen[i]->name},
                         {"ok", bool(ok[i])},
                         {"detail", lines[i]}});
    payload = envelope(config, Json{{"examples", arr}, {"all_ok", all_ok}})
                  .dump(2) +
              "\n";
  }
  int wcode = write_payload(config, payload);
  if (wcode != 0) return wcode;
  return all_ok ? 0 : 1;
}

}  // namespace

int run(const RunConfig& config) {
  try {
    if (config.command == "examples") return run_examples(config);
    if (!config.input_path) {
      std::cerr << kToolName << ": command '" << config.command
                << "' requires an input file\n";
      return 2;
    }
    log_line("loading " + *config.input_path);
    Json input = load_json_file(*config.input_path);
    log_line("running " + config.command);
    Json report = dispatch(config, input);
    int verdict_code = verdict_exit_code(config.command, report);
    Json env = envelope(config, std::move(report));
    std::string payload = config.format == "text"
                              ? text_render(config, env)
                              : env.dump(2) + "\n";
    int wcode = write_payload(config, payload);
    return wcode != 0 ? wcode : verdict_code;
  } catch (const Error& e) {
    std::cerr << kToolName << ": " << e.what() << "\n";
    return 2;
  }
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{std::string(kToolName) +
               " - CP-extension uniqueness and rigidity toolkit"};
  app.set_version_flag("--version",
                       std::string(kToolName) + " " + kToolVersion);
  app.require_subcommand(1);

  RunConfig cfg;
  std::string input;
  std::string name;
  std::string out;

  app.add_option("--seed", cfg.seed, "seed for randomized probes")
      ->capture_default_str();
  app.add_option("--tol", cfg.tol, "numerical tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--out", out, "write the report to this file");
  app.add_option("--format", cfg.format, "report format")
      ->check(CLI::IsMember({"json", "text"}))
      ->capture_default_str();
  app.add_option("--jobs", cfg.jobs,
                 "threads for independent sub-problems")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  struct Cmd {
    const char* name;
    const char* desc;
    bool needs_input;
  };
  const std::vector<Cmd> cmds = {
      {"choi", "Choi matrix and positivity flags of a map spec", true},
      {"check-map", "Schwarz and 2-positivity falsifier battery", true},
      {"algebra", "operator-system span and generated *-algebra", true},
      {"extend", "uniqueness geometry of the CP-extension set", true},
      {"bkw", "unique-extension verdict for phi over C*(S)", true},
      {"spread", "value range of the extension set on a probe", true},
      {"popa", "multiplicative-domain convergence pipeline", true},
      {"hyperrigid", "rigidity across a representation family", true},
      {"examples", "run the built-in corpus against expected verdicts",
       false},
  };
  for (const Cmd& c : cmds) {
    CLI::App* sub = app.add_subcommand(c.name, c.desc);
    sub->fallthrough();
    if (c.needs_input)
      sub->add_option("input", input, "problem JSON file")->required();
    else
      sub->add_option("name", name, "run a single named example");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  cfg.command = sub->get_name();
  if (!input.empty()) cfg.input_path = input;
  if (!out.empty()) cfg.output = out;
  if (cfg.command == "examples" && sub->count("name") > 0)
    cfg.example_name = name;
  return run(cfg);
}

// ---- built-in corpus ----------------------------------------------------

const std::vector<BundledExample>& bundled_examples() {
  static const std::vector<BundledExample> corpus = {
      {"m2-unique", "bkw",
       R"json({
  "system": {
    "ambient_dim": 2,
    "generators": [
      {"rows": 2, "cols": 2, "entries": [[1,0],[0,0],[0,0],[0,0]]},
      {"rows": 2, "cols": 2, "entries": [[1,0],[0,1],[0,-1],[1,0]]}
    ]
  },
  "phi": {
    "kraus": [
      {"rows": 2, "cols": 2, "entries": [[1,0],[0,0],[0,0],[0,0]]},
      {"rows": 2, "cols": 2, "entries": [[0,0],[0,0],[0,0],[1,0]]}
    ]
  }
})json",
       R"json({"status":"UNIQUE","bkw":true,"null_dim":0,"algebra_status":"UNIQUE"})json"},

      {"m2-swap", "bkw",
       R"json({
  "system": {
    "ambient_dim": 2,
    "generators": [
      {"rows": 2, "cols": 2, "entries": [[0,0],[1,0],[0,0],[0,0]]}
    ]
  },
  "phi": {
    "kraus": [
      {"rows": 2, "cols": 2, "entries": [[1,0],[0,0],[0,0],[0,0]]},
      {"rows": 2, "cols": 2, "entries": [[0,0],[0,0],[0,0],[1,0]]}
    ]
  }
})json",
       R"json({"status":"NON_UNIQUE","bkw":false,"null_dim":4,"algebra_status":"NON_UNIQUE"})json"},

      {"m2-full", "extend",
       R"json({
  "system": {
    "ambient_dim": 2,
    "generators": [
      {"rows": 2, "cols": 2, "entries": [[1,0],[0,0],[0,0],[0,0]]},
      {"rows": 2, "cols": 2, "entries": [[0,0],[1,0],[0,0],[0,0]]}
    ]
  },
  "targets": [
    {"rows": 2, "cols": 2, "entries": [[0,0],[0,0],[0,0],[1,0]]},
    {"rows": 2, "cols": 2, "entries": [[0,0],[0,0],[0,0],[0,0]]}
  ],
  "out_dim": 2,
  "unital": true
})json",
       R"json({"status":"UNIQUE","null_dim":0})json"},

      {"popa-conjugation", "popa",
       R"json({
  "ambient_dim": 2,
  "a": {"rows": 2, "cols": 2, "entries": [[0,0],[1,0],[0,0],[0,0]]},
  "phi": {
    "conjugation": {
      "T": {"rows": 2, "cols": 2, "entries": [[2,0],[0,0],[0,0],[1,0]]},
      "lambda": 1.0
    }
  },
  "sequence": [
    {"conjugation": {"T": {"rows": 2, "cols": 2, "entries": [[2.1,0],[0,0],[0,0],[1,0]]}}},
    {"conjugation": {"T": {"rows": 2, "cols": 2, "entries": [[2.01,0],[0,0],[0,0],[1,0]]}}},
    {"conjugation": {"T": {"rows": 2, "cols": 2, "entries": [[2.001,0],[0,0],[0,0],[1,0]]}}},
    {"conjugation": {"T": {"rows": 2, "cols": 2, "entries": [[2.0001,0],[0,0],[0,0],[1,0]]}}},
    {"conjugation": {"T": {"rows": 2, "cols": 2, "entries": [[2.00001,0],[0,0],[0,0],[1,0]]}}},
    {"conjugation": {"T": {"rows": 2, "cols": 2, "entries": [[2.000001,0],[0,0],[0,0],[1,0]]}}},
    {"conjugation": {"T": {"rows": 2, "cols": 2, "entries": [[2.0000001,0],[0,0],[0,0],[1,0]]}}},
    {"conjugation": {"T": {"rows": 2, "cols": 2, "entries": [[2.00000001,0],[0,0],[0,0],[1,0]]}}},
    {"conjugation": {"T": {"rows": 2, "cols": 2, "entries": [[2.000000001,0],[0,0],[0,0],[1,0]]}}},
    {"conjugation": {"T": {"rows": 2, "cols": 2, "entries": [[2.0000000001,0],[0,0],[0,0],[1,0]]}}},
    {"conjugation": {"T": {"rows": 2, "cols": 2, "entries": [[2.00000000001,0],[0,0],[0,0],[1,0]]}}},
    {"conjugation": {"T": {"rows": 2, "cols": 2, "entries": [[2.000000000001,0],[0,0],[0,0],[1,0]]}}}
  ]
})json",
       R"json({"verdict":"PASS","kappa_inequality":true})json"},

      {"hyperrigid-m2", "hyperrigid",
       R"json({
  "blocks": [2],
  "S": [
    {"rows": 2, "cols": 2, "entries": [[1,0],[0,0],[0,0],[0,0]]},
    {"rows": 2, "cols": 2, "entries": [[1,0],[0,1],[0,-1],[1,0]]}
  ],
  "family": [[1],[2]]
})json",
       R"json({"decided":true,"hyperrigid_on_family":true,"refuted":false})json"},

      {"hyperrigid-swap", "hyperrigid",
       R"json({
  "blocks": [2],
  "S": [
    {"rows": 2, "cols": 2, "entries": [[0,0],[1,0],[0,0],[0,0]]}
  ],
  "eta": {"kraus": [
    {"rows": 2, "cols": 2, "entries": [[1,0],[0,0],[0,0],[0,0]]},
    {"rows": 2, "cols": 2, "entries": [[0,0],[0,0],[0,0],[1,0]]}
  ]},
  "family": [[1]]
})json",
       R"json({"decided":true,"hyperrigid_on_family":false,"refuted":true})json"},
  };
  return corpus;
}

}  // namespace ncbkw
