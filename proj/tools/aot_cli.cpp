// Command-line front door: parse/classify formulas, evaluate and check
// validity against model specs, search countermodels, build comprehension
// witnesses, run the axiom and paradox suites, prove tautologies, and replay
// proof traces.
//
// Exit codes: 0 success / valid / found; 1 invalid / not found / check
// failure; 2 usage or budget errors. Errors print one line to stderr:
//   error: <category>: <detail>

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "aot/ast.hpp"
#include "aot/axiom_suite.hpp"
#include "aot/countermodel.hpp"
#include "aot/kernel.hpp"
#include "aot/model.hpp"
#include "aot/naive_eval.hpp"
#include "aot/paradox.hpp"
#include "aot/parser.hpp"
#include "aot/printer.hpp"
#include "aot/semantics.hpp"
#include "aot/syntax_ops.hpp"
#include "aot/trace.hpp"

using nlohmann::json;
using namespace aot;

namespace {

struct Options {
  std::string model_path;
  int ordinary = 1, special = 1, states = 1, worlds = 1;
  bool inline_model = false;
  std::string mode = "legacy";
  bool vary_state_interp = false;
  int max_ordinary = 1, max_special = 1, max_states = 1, max_worlds = 1;
  uint64_t budget_properties = 1u << 16;
  uint64_t budget_objects = 1u << 20;
  uint64_t budget_cells = 8;
  std::string format = "text";
  bool enable_unsound_beta = false;
  std::vector<std::string> binds;
  std::string route = "semantic";
  std::string formula;
  std::string file;
  int depth = 6;
};

Budget make_budget(const Options& o) {
  Budget b;
  b.max_cells = o.budget_cells;
  b.max_properties = o.budget_properties;
  b.max_objects = o.budget_objects;
  return b;
}

AczelModel load_model(const Options& o) {
  Budget b = make_budget(o);
  if (!o.model_path.empty()) return load_model_spec_file(o.model_path, b);
  ModelConfig cfg{o.ordinary, o.special, o.states, o.worlds, {}, {}};
  return AczelModel::build(cfg, b);
}

// --bind entries: x=ord:0 | x=abs:5 | F=prop:3 | p=bits:1 | R=rel2:7
Assignment parse_binds(const std::vector<std::string>& binds) {
  Assignment asg;
  for (const std::string& s : binds) {
    size_t eq = s.find('=');
    size_t colon = s.find(':');
    if (eq == std::string::npos || colon == std::string::npos || colon < eq)
      throw std::runtime_error("bad --bind '" + s + "' (want name=kind:value)");
    std::string name = s.substr(0, eq);
    std::string kind = s.substr(eq + 1, colon - eq - 1);
    uint64_t value = std::stoull(s.substr(colon + 1));
    if (kind == "ord") asg.set_ind(name, Individual::make_ordinary((int)value));
    else if (kind == "abs") asg.set_ind(name, Individual::make_abstract(value));
    else if (kind == "prop") asg.set_rel1(name, value);
    else if (kind == "bits") asg.set_prop(name, value);
    else if (kind == "rel2") asg.set_rel2(name, value);
    else throw std::runtime_error("bad --bind kind '" + kind + "'");
  }
  return asg;
}

json model_json(const ModelConfig& cfg) {
  json j{{"ordinary", cfg.n_ordinary},
         {"special", cfg.n_special},
         {"states", cfg.n_states},
         {"worlds", cfg.n_worlds}};
  if (!cfg.state_interp.empty()) {
    json si = json::object();
    for (auto& [s, t] : cfg.state_interp) {
      si[std::to_string(s)] = {{"not", t.not_t},
                               {"impl", t.impl_t},
                               {"box", t.box_t},
                               {"forall_ind", t.forall_ind_t},
                               {"forall_rel", t.forall_rel_t}};
    }
    j["state_interp"] = si;
  }
  return j;
}

json witness_json(const Assignment& asg) {
  json j = json::object();
  for (auto& [ref, val] : asg.values()) {
    if (val.kind == SlotVal::Ind)
      j[ref.name] = val.ind.ordinary ? json{{"kind", "ordinary"}, {"index", val.ind.ord_index}}
                                     : json{{"kind", "abstract"}, {"mask", val.ind.mask}};
    else
      j[ref.name] = {{"kind", ref.arity == 0 ? "proposition" : ref.arity == 1 ? "property" : "rel2"},
                     {"code", val.code}};
  }
  return j;
}

std::string witness_text(const Assignment& asg) {
  std::ostringstream os;
  for (auto& [ref, val] : asg.values()) {
    os << "  " << ref.name << " := ";
    if (val.kind == SlotVal::Ind)
      os << (val.ind.ordinary ? "ordinary " + std::to_string(val.ind.ord_index)
                              : "abstract mask " + std::to_string(val.ind.mask));
    else
      os << (ref.arity == 0 ? "proposition bits " : ref.arity == 1 ? "property code " : "rel2 code ")
         << val.code;
    os << "\n";
  }
  return os.str();
}

void emit(const Options& o, const json& j, const std::string& text) {
  if (o.format == "json") std::cout << j.dump(2) << "\n";
  else std::cout << text;
}

int cmd_parse(const Options& o) {
  FormulaPtr f;
  TermPtr t;
  std::string printed, kind;
  try {
    f = parse_formula(o.formula);
    printed = print(f);
    kind = "formula";
  } catch (const ParseError&) {
    t = parse_term(o.formula);
    printed = print(t);
    kind = "term";
  }
  json j{{"command", "parse"}, {"kind", kind}, {"input", o.formula}, {"printed", printed}};
  emit(o, j, kind + ": " + printed + "\n");
  return 0;
}

int cmd_classify(const Options& o) {
  FormulaPtr f = parse_formula(o.formula);
  bool legacy = classify_propositional(f, ClassifyMode::Legacy);
  bool strict = classify_propositional(f, ClassifyMode::Strict);
  bool selected = o.mode == "strict" ? strict : legacy;
  json j{{"command", "classify"},
         {"formula", print(f)},
         {"legacy", legacy},
         {"strict", strict},
         {"mode", o.mode},
         {"propositional", selected}};
  std::ostringstream os;
  os << "legacy: " << (legacy ? "propositional" : "not-propositional") << "\n"
     << "strict: " << (strict ? "propositional" : "not-propositional") << "\n";
  emit(o, j, os.str());
  return selected ? 0 : 1;
}

int cmd_eval(const Options& o) {
  AczelModel m = load_model(o);
  Evaluator ev(m);
  FormulaPtr f = parse_formula(o.formula);
  Assignment asg = parse_binds(o.binds);
  FormulaPtr closed = ev.universal_closure(asg, f);
  uint64_t bits = ev.eval_formula(asg, closed);
  json worlds = json::array();
  std::ostringstream os;
  os << "formula: " << print(f) << "\n";
  if (!struct_equal(closed, f)) os << "closure: " << print(closed) << "\n";
  os << "actual-state truth per world:";
  for (int w = 0; w < m.n_worlds(); ++w) {
    bool v = (bits >> w) & 1;
    worlds.push_back(v);
    os << " w" << w << "=" << (v ? "1" : "0");
  }
  os << "\n";
  json j{{"command", "eval"},
         {"formula", print(f)},
         {"closure", print(closed)},
         {"model", model_json(m.config())},
         {"actual_state_truth", worlds}};
  emit(o, j, os.str());
  return 0;
}

int cmd_valid(const Options& o) {
  AczelModel m = load_model(o);
  Evaluator ev(m);
  FormulaPtr f = parse_formula(o.formula);
  Assignment asg = parse_binds(o.binds);
  bool ok = ev.valid_under(asg, f);
  json j{{"command", "valid"},
         {"formula", print(f)},
         {"model", model_json(m.config())},
         {"valid", ok}};
  emit(o, j, std::string(ok ? "valid" : "not valid") + "\n");
  return ok ? 0 : 1;
}

int cmd_countermodel(const Options& o) {
  FormulaPtr f = parse_formula(o.formula);
  SearchBounds b;
  b.max_ordinary = o.max_ordinary;
  b.max_special = o.max_special;
  b.max_states = o.max_states;
  b.max_worlds = o.max_worlds;
  b.vary_state_interp = o.vary_state_interp;
  b.budget = make_budget(o);
  auto cm = countermodel_search(f, b);
  if (!cm) {
    json j{{"command", "countermodel"}, {"formula", print(f)}, {"found", false}};
    emit(o, j, "no countermodel within bounds\n");
    return 1;
  }
  json j{{"command", "countermodel"},
         {"formula", print(f)},
         {"found", true},
         {"model", model_json(cm->config)},
         {"world", cm->world},
         {"witness", witness_json(cm->witness)},
         {"candidates_tried", cm->candidates_tried},
         {"skipped_budget", cm->skipped_budget}};
  std::ostringstream os;
  os << "countermodel found (candidates tried: " << cm->candidates_tried << ")\n";
  os << "model:\n" << AczelModel::build(cm->config, b.budget).spec_text();
  os << "fails at world " << cm->world << " of the actual state\n";
  os << "witness:\n" << witness_text(cm->witness);
  emit(o, j, os.str());
  return 0;
}

int cmd_comprehend(const Options& o) {
  AczelModel m = load_model(o);
  Evaluator ev(m);
  FormulaPtr cond = parse_formula(o.formula);
  Assignment asg = parse_binds(o.binds);
  // The condition variable: the unique free 1-place relation variable that
  // is not bound by --bind.
  std::string var;
  for (auto& v : free_vars(cond)) {
    if (!v.is_rel || v.arity != 1 || asg.find(v)) continue;
    if (!var.empty()) throw std::runtime_error("ambiguous condition variable: " + var + " and " + v.name);
    var = v.name;
  }
  if (var.empty()) throw std::runtime_error("no free 1-place relation variable in the condition");
  CompiledQuery query(ev, cond);
  Individual witness = m.comprehension_witness([&](uint64_t code) {
    Assignment a2 = asg;
    a2.set_rel1(var, code);
    return query.truth_at_actual(a2);
  });
  json codes = json::array();
  std::ostringstream os;
  os << "witness: abstract mask " << witness.mask << "\nencodes:";
  for (uint64_t c = 0; c < m.n_properties(); ++c)
    if ((witness.mask >> c) & 1) {
      codes.push_back(c);
      os << " " << c;
    }
  os << "\n";
  json j{{"command", "comprehend"},
         {"condition", print(cond)},
         {"condition_var", var},
         {"model", model_json(m.config())},
         {"witness_mask", witness.mask},
         {"encoded_codes", codes}};
  emit(o, j, os.str());
  return 0;
}

int cmd_axioms(const Options& o) {
  Budget b = make_budget(o);
  std::vector<ModelConfig> family =
      model_family(o.max_ordinary, o.max_special, o.max_states, o.max_worlds, b);
  auto instances = axiom_suite_instances();
  bool all_ok = true;
  json results = json::array();
  std::ostringstream os;
  for (auto& inst : instances) {
    json per_model = json::array();
    bool ok = true;
    for (auto& cfg : family) {
      AczelModel m = AczelModel::build(cfg, b);
      Evaluator ev(m);
      bool v = ev.valid(inst.theorem.formula());
      ok = ok && v;
      per_model.push_back(v);
    }
    all_ok = all_ok && ok;
    results.push_back({{"name", inst.name}, {"formula", print(inst.theorem.formula())}, {"valid", ok}});
    os << (ok ? "[pass] " : "[FAIL] ") << inst.name << "\n";
  }
  os << (all_ok ? "all axiom instances valid" : "axiom suite FAILED") << " over "
     << family.size() << " models\n";
  json j{{"command", "axioms"},
         {"models", (int)family.size()},
         {"instances", results},
         {"all_valid", all_ok}};
  emit(o, j, os.str());
  return all_ok ? 0 : 1;
}

int cmd_barcan(const Options& o) {
  kernel::Theorem t = kernel::derive_barcan_diamond();
  AczelModel m1 = AczelModel::build({1, 1, 1, 2, {}, {}}, make_budget(o));
  kernel::AuditReport audit = kernel::soundness_audit(t, {&m1});
  json j{{"command", "barcan"},
         {"formula", print(t.formula())},
         {"trace_steps", (int)t.trace().size()},
         {"valid_in_m1", audit.all_pass}};
  std::ostringstream os;
  os << "derived: " << print(t.formula()) << "\n"
     << "trace steps: " << t.trace().size() << "\n"
     << "valid in (1,1,1,2): " << (audit.all_pass ? "yes" : "NO") << "\n";
  emit(o, j, os.str());
  return audit.all_pass ? 0 : 1;
}

int cmd_paradox(const Options& o) {
  ParadoxReport rep;
  if (o.route == "syntactic") {
    rep = run_clark_boolos_syntactic(o.enable_unsound_beta);
  } else if (o.route == "semantic") {
    AczelModel m = load_model(o);
    rep = run_clark_boolos_semantic(m);
  } else {
    throw std::runtime_error("unknown --route '" + o.route + "' (semantic|syntactic)");
  }
  json j{{"command", "paradox"},
         {"route", rep.route == ParadoxRoute::Direct ? "direct" : "description"},
         {"verdict", rep.verdict == ParadoxVerdict::ContradictionDerived
                         ? "contradiction-derived"
                         : "beta-countermodel-found"},
         {"witness", rep.witness},
         {"summary", rep.summary}};
  std::ostringstream os;
  os << "route: " << (rep.route == ParadoxRoute::Direct ? "direct" : "description") << "\n";
  if (!rep.model_spec.empty()) {
    os << "model:\n" << rep.model_spec;
    j["model_spec"] = rep.model_spec;
  }
  for (auto& line : rep.ledger) os << line << "\n";
  if (!rep.ledger.empty()) j["ledger"] = rep.ledger;
  if (!rep.trace.empty()) {
    std::string tr = kernel::serialize_trace(rep.trace);
    os << "trace:\n" << tr;
    j["trace"] = tr;
  }
  os << "witness: " << rep.witness << "\n";
  os << "verdict: "
     << (rep.verdict == ParadoxVerdict::ContradictionDerived ? "contradiction-derived"
                                                             : "beta-countermodel-found")
     << "\n"
     << rep.summary << "\n";
  emit(o, j, os.str());
  return 0;
}

int cmd_prove_taut(const Options& o) {
  FormulaPtr f = parse_formula(o.formula);
  try {
    kernel::Theorem t = kernel::taut_prove(f);
    json j{{"command", "prove-taut"},
           {"formula", print(f)},
           {"theorem", true},
           {"trace_steps", (int)t.trace().size()}};
    std::ostringstream os;
    os << "theorem: " << print(t.formula()) << "\ntrace steps: " << t.trace().size() << "\n";
    if (!o.file.empty()) {
      std::ofstream out(o.file);
      out << kernel::serialize_trace(t.trace());
      os << "trace written to " << o.file << "\n";
    }
    emit(o, j, os.str());
    return 0;
  } catch (const kernel::NotATautology& e) {
    json fal = json::object();
    std::ostringstream os;
    os << "not a tautology; falsifying valuation:";
    for (auto& [atom, v] : e.failure.falsifying) {
      fal[atom] = v;
      os << " " << atom << "=" << (v ? "1" : "0");
    }
    os << "\n";
    json j{{"command", "prove-taut"}, {"formula", print(f)}, {"theorem", false}, {"falsifying", fal}};
    emit(o, j, os.str());
    return 1;
  }
}

int cmd_check_trace(const Options& o) {
  std::ifstream in(o.file);
  if (!in) throw std::runtime_error("cannot open trace file '" + o.file + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  kernel::Trace t = kernel::parse_trace(ss.str());
  kernel::ReplayOptions ro;
  ro.allow_extended = true;
  ro.enable_unsound = o.enable_unsound_beta;
  kernel::ReplayResult r = kernel::replay_trace(t, ro);
  json j{{"command", "check-trace"},
         {"steps", (int)t.size()},
         {"ok", r.ok},
         {"kernel_only", r.kernel_only}};
  std::ostringstream os;
  if (r.ok) {
    j["conclusion"] = print(r.conclusion);
    j["open_hypotheses"] = r.open_hypotheses.size();
    os << "ok: " << t.size() << " steps, conclusion: " << print(r.conclusion) << "\n";
    if (!r.open_hypotheses.empty())
      os << "warning: conclusion depends on " << r.open_hypotheses.size() << " open hypotheses\n";
  } else {
    j["error"] = r.error;
    os << "replay failed: " << r.error << "\n";
  }
  emit(o, j, os.str());
  return r.ok && r.open_hypotheses.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite hyperintensional Aczel models for second-order modal AOT: "
               "evaluator, proof kernel, and paradox reconstructions"};
  app.require_subcommand(1);
  Options o;

  auto add_model_flags = [&](CLI::App* c) {
    c->add_option("--model", o.model_path, "model spec file");
    c->add_option("--ordinary", o.ordinary, "inline model: ordinary urelements");
    c->add_option("--special", o.special, "inline model: special urelements");
    c->add_option("--states", o.states, "inline model: states");
    c->add_option("--worlds", o.worlds, "inline model: worlds");
  };
  auto add_budget_flags = [&](CLI::App* c) {
    c->add_option("--budget-properties", o.budget_properties, "property enumeration cap");
    c->add_option("--budget-objects", o.budget_objects, "abstract-object enumeration cap");
    c->add_option("--budget-cells", o.budget_cells, "|U|*|S|*|W| cap");
  };
  auto add_format = [&](CLI::App* c) {
    c->add_option("--format", o.format, "text|json")->check(CLI::IsMember({"text", "json"}));
  };
  auto add_binds = [&](CLI::App* c) {
    c->add_option("--bind", o.binds, "free-variable binding name=kind:value "
                                     "(kind: ord|abs|prop|bits|rel2)");
  };

  CLI::App* c_parse = app.add_subcommand("parse", "parse a formula or term and print it back");
  c_parse->add_option("formula", o.formula, "input text")->required();
  add_format(c_parse);

  CLI::App* c_classify = app.add_subcommand("classify", "propositional-formula classifier");
  c_classify->add_option("formula", o.formula)->required();
  c_classify->add_option("--mode", o.mode, "legacy|strict")->check(CLI::IsMember({"legacy", "strict"}));
  add_format(c_classify);

  CLI::App* c_eval = app.add_subcommand("eval", "evaluate the universal closure at the actual state");
  c_eval->add_option("formula", o.formula)->required();
  add_model_flags(c_eval);
  add_budget_flags(c_eval);
  add_binds(c_eval);
  add_format(c_eval);

  CLI::App* c_valid = app.add_subcommand("valid", "validity in one model");
  c_valid->add_option("formula", o.formula)->required();
  add_model_flags(c_valid);
  add_budget_flags(c_valid);
  add_binds(c_valid);
  add_format(c_valid);

  CLI::App* c_cm = app.add_subcommand("countermodel", "bounded countermodel search");
  c_cm->add_option("formula", o.formula)->required();
  c_cm->add_option("--max-ordinary", o.max_ordinary);
  c_cm->add_option("--max-special", o.max_special);
  c_cm->add_option("--max-states", o.max_states);
  c_cm->add_option("--max-worlds", o.max_worlds);
  c_cm->add_flag("--vary-state-interp", o.vary_state_interp,
                 "search non-classical operator tables at non-actual states");
  add_budget_flags(c_cm);
  add_format(c_cm);

  CLI::App* c_comp = app.add_subcommand("comprehend", "comprehension witness for a condition on F");
  c_comp->add_option("formula", o.formula, "condition with one free 1-place relation variable")
      ->required();
  add_model_flags(c_comp);
  add_budget_flags(c_comp);
  add_binds(c_comp);
  add_format(c_comp);

  CLI::App* c_ax = app.add_subcommand("axioms", "validate the kernel catalog over the model family");
  c_ax->add_option("--max-ordinary", o.max_ordinary)->default_val(2);
  c_ax->add_option("--max-special", o.max_special)->default_val(2);
  c_ax->add_option("--max-states", o.max_states)->default_val(2);
  c_ax->add_option("--max-worlds", o.max_worlds)->default_val(2);
  add_budget_flags(c_ax);
  add_format(c_ax);

  CLI::App* c_barcan = app.add_subcommand("barcan", "derive the diamond Barcan formula");
  add_budget_flags(c_barcan);
  add_format(c_barcan);

  CLI::App* c_par = app.add_subcommand("paradox", "Clark-Boolos paradox reconstructions");
  c_par->add_option("--route", o.route, "semantic|syntactic")
      ->check(CLI::IsMember({"semantic", "syntactic"}));
  c_par->add_flag("--enable-unsound-beta", o.enable_unsound_beta,
                  "allow the gated naive beta rule (syntactic route)");
  add_model_flags(c_par);
  add_budget_flags(c_par);
  add_format(c_par);

  CLI::App* c_taut = app.add_subcommand("prove-taut", "derive a propositional tautology");
  c_taut->add_option("formula", o.formula)->required();
  c_taut->add_option("--trace-out", o.file, "write the trace to a file");
  add_format(c_taut);

  CLI::App* c_check = app.add_subcommand("check-trace", "replay a serialized proof trace");
  c_check->add_option("file", o.file, "trace file")->required();
  c_check->add_flag("--enable-unsound-beta", o.enable_unsound_beta);
  add_format(c_check);

  CLI11_PARSE(app, argc, argv);

  // The identity axioms quantify over pairs of individuals, which is
  // quadratic in the object count; the axiom family therefore defaults to a
  // smaller object budget than the point queries do.
  if (*c_ax && c_ax->get_option("--budget-objects")->count() == 0)
    o.budget_objects = 1u << 12;

  try {
    if (*c_parse) return cmd_parse(o);
    if (*c_classify) return cmd_classify(o);
    if (*c_eval) return cmd_eval(o);
    if (*c_valid) return cmd_valid(o);
    if (*c_cm) return cmd_countermodel(o);
    if (*c_comp) return cmd_comprehend(o);
    if (*c_ax) return cmd_axioms(o);
    if (*c_barcan) return cmd_barcan(o);
    if (*c_par) return cmd_paradox(o);
    if (*c_taut) return cmd_prove_taut(o);
    if (*c_check) return cmd_check_trace(o);
  } catch (const ParseError& e) {
    std::cerr << "error: syntax: " << e.what() << "\n";
    return 2;
  } catch (const SortError& e) {
    std::cerr << "error: sort: " << e.what() << "\n";
    return 2;
  } catch (const BudgetError& e) {
    std::cerr << "error: budget: " << e.what() << "\n";
    return 2;
  } catch (const ModelError& e) {
    std::cerr << "error: model: " << e.what() << "\n";
    return 2;
  } catch (const GateError& e) {
    std::cerr << "error: gated: " << e.what() << "\n";
    return 2;
  } catch (const UnsupportedArityError& e) {
    std::cerr << "error: arity: " << e.what() << "\n";
    return 2;
  } catch (const kernel::KernelError& e) {
    std::cerr << "error: kernel: " << e.what() << "\n";
    return 1;
  } catch (const EvalError& e) {
    std::cerr << "error: eval: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
