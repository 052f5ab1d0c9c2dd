#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pgsos/continuity.hpp"
#include "pgsos/denotation.hpp"
#include "pgsos/metric.hpp"
#include "pgsos/oracle.hpp"
#include "pgsos/semantics.hpp"
#include "pgsos/spec.hpp"

namespace pgsos::cli {

using json = nlohmann::ordered_json;

std::string fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

constexpr const char* kSchema = "pgsos-report/1";

struct Globals {
  bool json = false;
  std::size_t max_states = 10000;
  std::size_t max_iter = 0;  // 0: library default
  std::uint64_t seed = 1;
};

/// Everything a command produces. `results` is the only part that differs
/// between commands.
struct Report {
  std::string command;
  json inputs = json::object();
  json results = json::object();
  bool widened = false;
  bool over_approximated = false;
  bool truncated = false;
  int exit = ok;
};

struct LoadedSpec {
  std::string path;
  std::string digest;
  SpecDocument doc;
  std::vector<Diagnostic> warnings;
};

LoadedSpec load(const std::string& path) {
  LoadedSpec s;
  s.path = path;
  const std::string text = read_file(path);
  s.digest = "fnv1a64:" + fnv1a64(text);
  s.doc = parse_spec(text, &s.warnings);
  return s;
}

// ---- serialization --------------------------------------------------------

std::string var_key(const Var& v) { return v.kind == VarKind::state ? v.name : v.name + "#dist"; }

json to_json(const Multiplicity& m) {
  json o = json::object();
  for (const auto& [v, c] : m.entries()) o[var_key(v)] = c.to_string();
  return o;
}

json to_json(const ProbMultiplicity& p) {
  json a = json::array();
  for (const auto& [m, q] : p.masses()) a.push_back({{"prob", q.to_string()}, {"multiplicity", to_json(m)}});
  return a;
}

json to_json(const GenSet& g) {
  json a = json::array();
  for (const auto& p : g.generators()) a.push_back(to_json(p));
  return a;
}

json to_json(const Weighting& w) {
  json o = json::object();
  for (const auto& [v, x] : w) o[var_key(v)] = x.to_string();
  return o;
}

json to_json(const FiniteDistribution& d) {
  json a = json::array();
  for (const auto& [t, q] : d.masses()) a.push_back({{"prob", q.to_string()}, {"state", t.to_string()}});
  return a;
}

json to_json(const std::vector<ExtRational>& xs) {
  json a = json::array();
  for (const auto& x : xs) a.push_back(x.to_string());
  return a;
}

json fragment_json(const ReachableFragment& frag) {
  json states = json::array();
  for (std::size_t i = 0; i < frag.size(); ++i) {
    json ts = json::array();
    for (const auto& tr : frag.transitions[i]) {
      json target = json::array();
      for (const auto& [t, q] : tr.target.masses()) {
        // A truncated fragment may point at states it never indexed.
        const auto id = frag.index_of(t);
        target.push_back({{"prob", q.to_string()}, {"state", id ? json(*id) : json(nullptr)}, {"term", t.to_string()}});
      }
      ts.push_back({{"action", tr.action}, {"target", target}});
    }
    states.push_back({{"id", i}, {"term", frag.states[i].to_string()}, {"transitions", ts}});
  }
  return {{"states", states},
          {"roots", frag.roots},
          {"depth", frag.depth},
          {"complete", frag.complete},
          {"cyclic", frag.has_cycle()}};
}

json document(const Report& r, const LoadedSpec* spec) {
  json d;
  d["schema"] = kSchema;
  d["command"] = r.command;
  if (spec) d["spec"] = {{"path", spec->path}, {"digest", spec->digest}};
  d["inputs"] = r.inputs;
  d["results"] = r.results;
  d["flags"] = {{"widened", r.widened}, {"over_approximated", r.over_approximated}, {"truncated", r.truncated}};
  return d;
}

// ---- human views of the same document --------------------------------------

std::string distribution_text(const json& target) {
  std::string s;
  for (const auto& e : target) {
    if (!s.empty()) s += " + ";
    const std::string term = e["state"].get<std::string>();
    s += e["prob"].get<std::string>() == "1" ? term : e["prob"].get<std::string>() + " " + term;
  }
  return s;
}

void render(const json& d, std::ostream& out) {
  const std::string cmd = d["command"];
  const json& r = d["results"];
  if (cmd == "check") {
    out << "ok: " << r["operators"].size() << " operators, " << r["actions"].size() << " actions, "
        << r["rules"].size() << " rules, " << r["terms"].size() << " named terms\n";
    for (const auto& w : r["warnings"]) out << "warning: " << w.get<std::string>() << "\n";
    if (r.contains("canonical")) out << r["canonical"].get<std::string>();
  } else if (cmd == "transitions") {
    if (r["transitions"].empty()) out << "(no transitions)\n";
    for (const auto& t : r["transitions"]) {
      out << r["term"].get<std::string>() << " --" << t["action"].get<std::string>() << "--> "
          << distribution_text(t["target"]) << "\n";
    }
  } else if (cmd == "explore") {
    const json& states = r["states"];
    std::size_t edges = 0;
    for (const auto& s : states) edges += s["transitions"].size();
    out << states.size() << " states, " << edges << " transitions, depth " << r["depth"].get<std::size_t>()
        << (r["complete"].get<bool>() ? "" : ", truncated") << "\n";
    for (const auto& s : states) out << "s" << s["id"].get<std::size_t>() << " = " << s["term"].get<std::string>() << "\n";
    for (const auto& s : states) {
      for (const auto& t : s["transitions"]) {
        std::string target;
        for (const auto& e : t["target"]) {
          if (!target.empty()) target += " + ";
          if (e["prob"].get<std::string>() != "1") target += e["prob"].get<std::string>() + " ";
          target += e["state"].is_null() ? e["term"].get<std::string>() : "s" + std::to_string(e["state"].get<std::size_t>());
        }
        out << "s" << s["id"].get<std::size_t>() << " --" << t["action"].get<std::string>() << "--> " << target
            << "\n";
      }
    }
  } else if (cmd == "distance") {
    out << r["distance"].get<std::string>();
    if (!r["exact"].get<bool>()) out << " (lower bound after " << r["iterations"].get<std::size_t>() << " iterations)";
    out << "\n";
  } else if (cmd == "denote") {
    out << "[[" << r["term"].get<std::string>() << "]] = " << r["text"].get<std::string>() << "\n";
    out << "weighting: " << r["weighting_text"].get<std::string>() << "\n";
  } else if (cmd == "bound") {
    out << r["bound"].get<std::string>() << "\n";
  } else if (cmd == "continuity") {
    for (const auto& rep : r["reports"]) {
      out << rep["op"].get<std::string>() << ": " << rep["verdict"].get<std::string>();
      if (rep["verdict"] == "uniformly-continuous") {
        out << ", z = " << rep["modulus"].get<std::string>() << ", n = " << rep["bound"].get<std::string>();
      } else {
        out << ", coefficients " << rep["coefficients"].dump();
      }
      out << "\n";
      if (rep["verdict"] != "uniformly-continuous") out << "  " << rep["reason"].get<std::string>() << "\n";
    }
  } else if (cmd == "check-modulus") {
    if (r["satisfied"].get<bool>()) {
      out << "satisfied: " << r["modulus"].get<std::string>() << " bounds " << r["op"].get<std::string>() << "\n";
    } else {
      out << "not satisfied:";
      for (const auto& f : r["failing"]) {
        const std::size_t i = f.get<std::size_t>();
        out << " e" << i + 1 << " needs " << r["required"][i].get<std::string>() << ", z gives "
            << r["allowed"][i].get<std::string>() << ";";
      }
      out << "\n";
    }
  } else if (cmd == "oracle") {
    out << r["samples"].size() << " samples, " << r["violations"].get<std::size_t>() << " violations, skipped "
        << r["skipped_distance_one"].get<std::size_t>() << " at distance 1 and "
        << r["skipped_truncated"].get<std::size_t>() << " truncated; gap in [" << r["min_gap"].get<std::string>()
        << ", " << r["max_gap"].get<std::string>() << "]\n";
    for (const auto& s : r["samples"]) {
      if (s["violation"].get<bool>()) {
        out << "VIOLATION " << s["term"].get<std::string>() << ": distance " << s["distance"].get<std::string>()
            << " > bound " << s["bound"].get<std::string>() << "\n";
      }
    }
  }
  const json& f = d["flags"];
  if (f["widened"].get<bool>()) out << "note: widened (some entry jumped to inf)\n";
  if (f["over_approximated"].get<bool>()) out << "note: over-approximated sup\n";
  if (f["truncated"].get<bool>()) out << "note: truncated fragment\n";
}

// ---- commands ---------------------------------------------------------------

FixpointConfig fixpoint(const Globals& g) {
  FixpointConfig cfg;
  if (g.max_iter) {
    if (g.max_iter < 2) throw Error(ErrorKind::invalid_argument, "--max-iter must be at least 2 for denotations");
    cfg.max_iterations = g.max_iter;
    cfg.widening_window = std::min(cfg.widening_window, g.max_iter - 1);
  }
  return cfg;
}

ExplorationLimits limits(const Globals& g) { return {g.max_states, ExplorationLimits{}.max_depth}; }

ProcessDistance parse_dist(const std::string& text) {
  ProcessDistance e;
  if (text.empty()) return e;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(',', start), text.size());
    const std::string item = text.substr(start, end - start);
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::invalid_argument, "expected var=value in --dist, got '" + item + "'");
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(' '));
      s.erase(s.find_last_not_of(' ') + 1);
      return s;
    };
    const auto value = Rational::parse(trim(item.substr(eq + 1)));
    if (!value) throw Error(ErrorKind::invalid_argument, "malformed distance in '" + item + "'");
    e.set(Var::state(trim(item.substr(0, eq))), *value);
    start = end + 1;
  }
  return e;
}

Report cmd_check(const LoadedSpec& s, bool print) {
  Report r{"check"};
  json ops = json::array();
  for (const auto& [op, n] : s.doc.sig.operators()) ops.push_back({{"name", op}, {"arity", n}});
  json rules = json::array();
  for (const auto& rule : s.doc.rules) rules.push_back(rule.name);
  json terms = json::array();
  for (const auto& t : s.doc.terms) terms.push_back({{"name", t.name}, {"term", t.term.to_string()}});
  json warnings = json::array();
  for (const auto& w : s.warnings) {
    warnings.push_back(std::to_string(w.where.line) + ":" + std::to_string(w.where.column) + ": " + w.message);
  }
  r.results = {{"operators", ops}, {"actions", s.doc.sig.actions()}, {"rules", rules}, {"terms", terms},
               {"warnings", warnings}};
  if (print) r.results["canonical"] = print_spec(s.doc);
  return r;
}

Report cmd_transitions(const LoadedSpec& s, const std::string& text) {
  Report r{"transitions"};
  r.inputs = {{"term", text}};
  const StateTerm t = s.doc.parse_term(text);
  json ts = json::array();
  for (const auto& tr : derive_transitions(s.doc, t)) {
    ts.push_back({{"action", tr.action}, {"target", to_json(tr.target)}});
  }
  r.results = {{"term", t.to_string()}, {"transitions", ts}};
  return r;
}

Report cmd_explore(const LoadedSpec& s, const std::vector<std::string>& texts, const Globals& g) {
  Report r{"explore"};
  r.inputs = {{"terms", texts}, {"max_states", g.max_states}};
  std::vector<StateTerm> roots;
  for (const auto& t : texts) roots.push_back(s.doc.parse_term(t));
  try {
    r.results = fragment_json(explore_fragment(s.doc, roots, limits(g)));
  } catch (const ExplorationError& err) {
    r.results = fragment_json(err.partial());
    r.results["refusal"] = {{"kind", to_string(err.kind())}, {"message", err.what()}};
    r.truncated = true;
    r.exit = refused;
  }
  return r;
}

Report cmd_distance(const LoadedSpec& s, const std::string& t1, const std::string& t2,
                    std::optional<std::size_t> iterate, const Globals& g) {
  Report r{"distance"};
  r.inputs = {{"t1", t1}, {"t2", t2}, {"max_states", g.max_states}};
  if (iterate) r.inputs["iterate"] = *iterate;
  const StateTerm a = s.doc.parse_term(t1);
  const StateTerm b = s.doc.parse_term(t2);
  const auto frag = explore_fragment(s.doc, {a, b}, limits(g));
  MetricOptions opts;
  if (g.max_iter) opts.max_iterations = g.max_iter;
  if (iterate) {
    opts.iterate = true;
    opts.max_iterations = *iterate;
  }
  const auto m = bisim_metric_lfp(frag, opts);
  json table = json::array();
  for (std::size_t i = 0; i < m.table.size(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.table.size(); ++j) row.push_back(m.table.at(i, j).to_string());
    table.push_back(row);
  }
  json states = json::array();
  for (const auto& st : frag.states) states.push_back(st.to_string());
  r.results = {{"distance", m.table.at(*frag.index_of(a), *frag.index_of(b)).to_string()},
               {"exact", m.exact},
               {"iterations", m.iterations},
               {"cyclic", m.cyclic},
               {"states", states},
               {"table", table}};
  return r;
}

std::string weighting_text(const Weighting& w) {
  std::string s;
  for (const auto& [v, x] : w) s += (s.empty() ? "" : ", ") + var_key(v) + ":" + x.to_string();
  return "{" + s + "}";
}

Report cmd_denote(const LoadedSpec& s, const std::string& text, const Globals& g) {
  Report r{"denote"};
  r.inputs = {{"term", text}};
  const StateTerm t = s.doc.parse_term(text);
  const auto res = lfp_denotations(s.doc, {t}, fixpoint(g));
  const GenSet& den = res.denotation(t);
  bool exact = true;
  const Weighting w = weighting(sup_approx(den.generators(), &exact));
  r.widened = res.widened(t);
  r.over_approximated = res.over_approximated(t) || !exact;
  r.results = {{"term", t.to_string()},
               {"denotation", to_json(den)},
               {"text", den.to_string()},
               {"weighting", to_json(w)},
               {"weighting_text", weighting_text(w)},
               {"rounds", res.rounds}};
  return r;
}

Report cmd_bound(const LoadedSpec& s, const std::string& text, const std::string& dist, const Globals& g) {
  Report r{"bound"};
  r.inputs = {{"term", text}, {"dist", dist}};
  const StateTerm t = s.doc.parse_term(text);
  const ProcessDistance e = parse_dist(dist);
  const auto res = lfp_denotations(s.doc, {t}, fixpoint(g));
  r.widened = res.widened(t);
  r.over_approximated = res.over_approximated(t);
  r.results = {{"term", t.to_string()},
               {"distance", e.to_string()},
               {"denotation", res.denotation(t).to_string()},
               {"bound", bound_distance(res, t, e).to_string()}};
  return r;
}

json report_json(const ContinuityReport& c) {
  return {{"op", c.op},
          {"arity", c.arity},
          {"verdict", std::string(to_string(c.verdict))},
          {"coefficients", to_json(c.coefficients)},
          {"modulus", c.modulus.to_string()},
          {"bound", c.bound ? c.bound->to_string() : "inf"},
          {"denotation", c.denotation.to_string()},
          {"widened", c.widened},
          {"over_approximated", c.over_approximated},
          {"unbounded_replication", c.unbounded_replication},
          {"reason", c.reason}};
}

Report cmd_continuity(const LoadedSpec& s, const std::string& op, const Globals& g) {
  Report r{"continuity"};
  if (!op.empty()) r.inputs = {{"op", op}};
  const ContinuityAnalyzer ca(s.doc, fixpoint(g));
  std::vector<ContinuityReport> reps;
  if (op.empty()) {
    reps = ca.reports();
  } else {
    reps.push_back(ca.is_uniformly_continuous(op));
  }
  json a = json::array();
  for (const auto& c : reps) {
    r.widened = r.widened || c.widened;
    r.over_approximated = r.over_approximated || c.over_approximated;
    a.push_back(report_json(c));
  }
  r.results = {{"reports", a}};
  return r;
}

Report cmd_check_modulus(const LoadedSpec& s, const std::string& op, const std::string& z_text, const Globals& g) {
  Report r{"check-modulus"};
  r.inputs = {{"op", op}, {"z", z_text}};
  const auto arity = s.doc.sig.arity(op);
  if (!arity) throw Error(ErrorKind::undeclared_symbol, "undeclared operator '" + op + "'");
  const ModulusSpec z = parse_modulus(z_text, *arity);
  const ContinuityAnalyzer ca(s.doc, fixpoint(g));
  const auto check = ca.check_modulus(op, z);
  const StateTerm t = operator_term(op, *arity);
  r.widened = ca.denotations().widened(t);
  r.over_approximated = ca.denotations().over_approximated(t);
  r.results = {{"op", op},
               {"modulus", z.to_string()},
               {"satisfied", check.satisfied},
               {"required", to_json(check.required)},
               {"allowed", to_json(check.allowed)},
               {"failing", check.failing}};
  return r;
}

json substitution_json(const ClosedSubstitution& s) {
  json o = json::object();
  for (const auto& [v, t] : s) o[v] = t.to_string();
  return o;
}

Report cmd_oracle(const LoadedSpec& s, const std::string& term, std::size_t samples, std::size_t depth,
                  const Globals& g) {
  Report r{"oracle"};
  r.inputs = {{"seed", g.seed}, {"samples", samples}, {"depth", depth}, {"max_states", g.max_states}};
  if (!term.empty()) r.inputs["term"] = term;
  OracleConfig cfg;
  cfg.seed = g.seed;
  cfg.samples = samples;
  cfg.max_depth = depth;
  cfg.limits = limits(g);
  cfg.fixpoint = fixpoint(g);
  const OracleSummary sum = term.empty() ? oracle_compare(s.doc, cfg) : oracle_compare(s.doc, s.doc.parse_term(term), cfg);
  json a = json::array();
  for (const auto& x : sum.samples) {
    a.push_back({{"term", x.term.to_string()},
                 {"sigma1", substitution_json(x.sigma1)},
                 {"sigma2", substitution_json(x.sigma2)},
                 {"e", x.e.to_string()},
                 {"distance", x.distance.to_string()},
                 {"bound", x.bound.to_string()},
                 {"gap", x.gap().to_string()},
                 {"violation", x.violation()}});
  }
  // Samples are generated in seed order, which already makes the report
  // reproducible; sorting keeps it independent of that order too.
  std::sort(a.begin(), a.end(), [](const json& x, const json& y) { return x.dump() < y.dump(); });
  r.results = {{"attempts", sum.attempts},
               {"violations", sum.violations},
               {"skipped_distance_one", sum.skipped_distance_one},
               {"skipped_truncated", sum.skipped_truncated},
               {"min_gap", sum.min_gap->to_string()},
               {"max_gap", sum.max_gap->to_string()},
               {"samples", a}};
  if (sum.violations) r.exit = refused;
  return r;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::state_limit_exceeded:
    case ErrorKind::depth_limit_exceeded:
    case ErrorKind::truncated_fragment:
    case ErrorKind::no_convergence:
    case ErrorKind::iteration_limit_exceeded:
    case ErrorKind::all_samples_skipped:
      return refused;
    default:
      return usage;
  }
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compositional bounds for probabilistic GSOS specifications", "pgsos"};
  app.require_subcommand(1);
  Globals g;
  app.add_flag("--json", g.json, "Emit the JSON report");
  app.add_option("--max-states", g.max_states, "State limit for exploration")->check(CLI::PositiveNumber);
  app.add_option("--max-iter", g.max_iter, "Iteration cap for metrics and denotations")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "Seed for the oracle");

  std::string spec_path, t1, t2, op, dist, z, term;
  std::vector<std::string> terms;
  std::optional<std::size_t> iterate;
  bool print = false;
  std::size_t samples = 200, depth = 3;

  auto add = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help)->fallthrough();
    sub->add_option("spec", spec_path, "Specification file")->required();
    return sub;
  };
  auto* check = add("check", "Parse and validate a specification");
  check->add_flag("--print", print, "Print the canonical form");
  auto* transitions = add("transitions", "Transitions of a closed term");
  transitions->add_option("term", t1)->required();
  auto* explore = add("explore", "Reachable fragment of closed terms");
  explore->add_option("terms", terms)->required();
  auto* distance = add("distance", "Bisimilarity distance of two closed terms");
  distance->add_option("t1", t1)->required();
  distance->add_option("t2", t2)->required();
  distance->add_option("--iterate", iterate, "Stop after K steps with a lower bound")->check(CLI::NonNegativeNumber);
  auto* denote = add("denote", "Nondeterministic probabilistic multiplicity of a term");
  denote->add_option("term", t1)->required();
  auto* bound = add("bound", "Denotational upper bound on the distance of a composed term");
  bound->add_option("term", t1)->required();
  bound->add_option("--dist", dist, "Variable distances, e.g. x=1/10,y=1/5");
  auto* continuity = add("continuity", "Uniform continuity of operators");
  continuity->add_option("op", op);
  auto* modulus = add("check-modulus", "Check a modulus of continuity for an operator");
  modulus->add_option("op", op)->required();
  modulus->add_option("--z", z, "Linear modulus, e.g. \"1/2*e1 + e2\"")->required();
  auto* oracle = add("oracle", "Compare exact distances with denotational bounds on random samples");
  oracle->add_option("term", term, "Fixed open term (random terms otherwise)");
  oracle->add_option("--samples", samples)->check(CLI::PositiveNumber);
  oracle->add_option("--depth", depth);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : usage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  std::optional<LoadedSpec> spec;
  try {
    spec = load(spec_path);
    Report r;
    if (command == "check") r = cmd_check(*spec, print);
    else if (command == "transitions") r = cmd_transitions(*spec, t1);
    else if (command == "explore") r = cmd_explore(*spec, terms, g);
    else if (command == "distance") r = cmd_distance(*spec, t1, t2, iterate, g);
    else if (command == "denote") r = cmd_denote(*spec, t1, g);
    else if (command == "bound") r = cmd_bound(*spec, t1, dist, g);
    else if (command == "continuity") r = cmd_continuity(*spec, op, g);
    else if (command == "check-modulus") r = cmd_check_modulus(*spec, op, z, g);
    else r = cmd_oracle(*spec, term, samples, depth, g);

    const json d = document(r, &*spec);
    if (g.json) {
      out << d.dump(2) << "\n";
    } else {
      render(d, out);
    }
    if (r.exit == refused && r.truncated) err << "pgsos: " << r.results["refusal"]["message"].get<std::string>() << "\n";
    return r.exit;
  } catch (const Error& e) {
    const int code = exit_code_for(e.kind());
    err << "pgsos " << command << ": " << to_string(e.kind()) << ": " << e.what() << "\n";
    if (g.json) {
      Report r{command};
      r.results = {{"error", {{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}}}};
      r.truncated = e.kind() == ErrorKind::state_limit_exceeded || e.kind() == ErrorKind::depth_limit_exceeded ||
                    e.kind() == ErrorKind::truncated_fragment;
      out << document(r, spec ? &*spec : nullptr).dump(2) << "\n";
    }
    return code;
  }
}

}  // namespace pgsos::cli
