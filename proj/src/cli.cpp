#include "kbox/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "kbox/generators.hpp"
#include "kbox/json_io.hpp"
#include "kbox/prover.hpp"
#include "kbox/unification.hpp"

namespace kbox::cli {

namespace {

using nlohmann::json;

constexpr int kPositive = 0;
constexpr int kNegative = 1;
constexpr int kUsage = 2;
constexpr int kResource = 3;

json refutation_json(const Refuted& r) {
  json j = tree_to_json(r.countermodel);
  j["refuted_at"] = r.refuted_at();
  return j;
}

json verdict_json(const ProverVerdict& v) {
  if (const Refuted* r = refutation(v))
    return json{{"proved", false}, {"countermodel", refutation_json(*r)}};
  return json{{"proved", true}, {"nodes_explored", std::get<Proved>(v).nodes_explored}};
}

json consequence_json(const ConsequenceVerdict& v) {
  if (const NotDerivable* nd = std::get_if<NotDerivable>(&v)) {
    json m = model_to_json(nd->countermodel);
    m["refuted_at"] = nd->refuted_at;
    return json{{"derivable", false}, {"countermodel", std::move(m)}};
  }
  const Derivable& d = std::get<Derivable>(v);
  json j{{"derivable", true}};
  if (d.deduction_depth) j["deduction_depth"] = *d.deduction_depth;
  return j;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot read file '" + path + "'");
  return json::parse(in);
}

KripkeModel load_model(const std::string& path) { return model_from_json(load_json_file(path)); }

TreeModel load_tree(const std::string& path) { return tree_from_json(load_json_file(path)); }

std::set<Formula> parse_set(const std::vector<std::string>& texts) {
  std::set<Formula> out;
  for (const auto& t : texts) out.insert(Formula::parse(t));
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"kbox: a reasoning workbench for the basic modal logic K"};
  app.require_subcommand(1);

  bool quiet = false;
  ProverOptions base_opts;
  app.add_flag("-q,--quiet", quiet, "suppress JSON bodies (exit codes still reported)");
  app.add_option("--max-nodes", base_opts.max_nodes, "prover work budget per query");
  app.add_option("--max-closure", base_opts.max_closure,
                 "subformula-closure cap for global consequence");

  int code = kPositive;
  auto emit = [&](const json& j) {
    if (!quiet) out << j.dump(2) << '\n';
  };
  auto consequence_opts = [&] {
    ConsequenceOptions opts;
    static_cast<ProverOptions&>(opts) = base_opts;
    return opts;
  };

  // --- prove -------------------------------------------------------------
  auto* prove_cmd = app.add_subcommand("prove", "decide provability of a formula in K");
  auto prove_text = std::make_shared<std::string>();
  prove_cmd->add_option("formula", *prove_text, "formula to prove")->required();
  prove_cmd->callback([&, prove_text] {
    ProverVerdict v = prove(Formula::parse(*prove_text), base_opts);
    emit(verdict_json(v));
    code = proved(v) ? kPositive : kNegative;
  });

  // --- conseq ------------------------------------------------------------
  auto* conseq_cmd =
      app.add_subcommand("conseq", "decide global consequence from finitely many premises");
  auto conseq_premises = std::make_shared<std::vector<std::string>>();
  auto conseq_goal = std::make_shared<std::string>();
  conseq_cmd->add_option("--premise", *conseq_premises, "premise formula (repeatable)")->allow_extra_args(false);
  conseq_cmd->add_option("goal", *conseq_goal, "goal formula")->required();
  conseq_cmd->callback([&, conseq_premises, conseq_goal] {
    ConsequenceVerdict v = global_consequence(parse_set(*conseq_premises),
                                              Formula::parse(*conseq_goal), consequence_opts());
    emit(consequence_json(v));
    code = derivable(v) ? kPositive : kNegative;
  });

  // --- rule --------------------------------------------------------------
  auto* rule_cmd =
      app.add_subcommand("rule", "decide derivability of a multiple-conclusion rule");
  auto rule_premises = std::make_shared<std::vector<std::string>>();
  auto rule_conclusions = std::make_shared<std::vector<std::string>>();
  rule_cmd->add_option("--premise", *rule_premises, "premise formula (repeatable)")->allow_extra_args(false);
  rule_cmd->add_option("--conclusion", *rule_conclusions, "conclusion formula (repeatable)")->allow_extra_args(false)
      ->required();
  rule_cmd->callback([&, rule_premises, rule_conclusions] {
    RuleVerdict v = derivable_rule(parse_set(*rule_premises), parse_set(*rule_conclusions),
                                   consequence_opts());
    json j{{"derivable", v.derivable()}};
    if (v.witness) {
      j["witness"] = v.witness->to_string();
    } else {
      json details = json::array();
      for (const auto& [conclusion, verdict] : v.details) {
        json d = consequence_json(verdict);
        d["conclusion"] = conclusion.to_string();
        details.push_back(std::move(d));
      }
      j["conclusions"] = std::move(details);
    }
    emit(j);
    code = v.derivable() ? kPositive : kNegative;
  });

  // --- classify ----------------------------------------------------------
  auto* classify_cmd =
      app.add_subcommand("classify", "classify a substitution against p0 -> [] p0");
  auto classify_subst = std::make_shared<std::string>();
  classify_cmd->add_option("--subst", *classify_subst, "substitution text")->required();
  classify_cmd->callback([&, classify_subst] {
    UnifierClassification v =
        classify_unifier(Substitution::parse(*classify_subst), base_opts);
    if (const NotUnifier* nu = std::get_if<NotUnifier>(&v)) {
      json counter = tree_to_json(nu->countermodel);
      counter["refuted_at"] = nu->countermodel.root();
      emit(json{{"unifier", false},
                {"image", nu->image.to_string()},
                {"countermodel", std::move(counter)}});
      code = kNegative;
      return;
    }
    const Unifier& u = std::get<Unifier>(v);
    json dominators = json::array();
    for (const SigmaIndex& a : u.dominators) dominators.push_back(a.to_string());
    json j{{"unifier", true}, {"top", u.top()}, {"dominators", std::move(dominators)}};
    if (u.min_n) j["min_n"] = *u.min_n;
    emit(j);
    code = kPositive;
  });

  // --- margins -----------------------------------------------------------
  auto* margins_cmd = app.add_subcommand(
      "margins", "apply the weak rule of margins to a formula with f -> []f provable");
  auto margins_text = std::make_shared<std::string>();
  margins_cmd->add_option("formula", *margins_text, "formula f")->required();
  margins_cmd->callback([&, margins_text] {
    MarginsVerdict v = weak_margins(Formula::parse(*margins_text), base_opts);
    if (const ImpliesBoxBot* b = std::get_if<ImpliesBoxBot>(&v))
      emit(json{{"verdict", "implies_box_bot"}, {"n", b->n}});
    else
      emit(json{{"verdict", "provable"}});
    code = kPositive;
  });

  // --- chain -------------------------------------------------------------
  auto* chain_cmd =
      app.add_subcommand("chain", "verify the sigma chain certificates for levels 0..N");
  auto chain_levels = std::make_shared<unsigned>(0);
  chain_cmd->add_option("levels", *chain_levels, "top level N")->required();
  chain_cmd->callback([&, chain_levels] {
    json levels = json::array();
    bool all_passed = true;
    for (unsigned n = 0; n <= *chain_levels; ++n) {
      ChainReport report = chain_check(n, base_opts);
      all_passed = all_passed && report.passed();
      levels.push_back(json{{"level", report.level},
                            {"passed", report.passed()},
                            {"certificates",
                             json{{"strict_step", verdict_json(report.strict_step)},
                                  {"no_collapse", verdict_json(report.no_collapse)},
                                  {"sigma_provable", verdict_json(report.sigma_provable)},
                                  {"box_bot_provable", verdict_json(report.box_bot_provable)}}},
                            {"narrative", report.narrative()}});
    }
    emit(json{{"passed", all_passed}, {"levels", std::move(levels)}});
    code = all_passed ? kPositive : kNegative;
  });

  // --- projective ----------------------------------------------------------
  auto* projective_cmd =
      app.add_subcommand("projective", "check projectivity of a unifier of gamma");
  auto projective_gamma = std::make_shared<std::vector<std::string>>();
  auto projective_subst = std::make_shared<std::string>();
  projective_cmd->add_option("--gamma", *projective_gamma, "member of gamma (repeatable)")->allow_extra_args(false)
      ->required();
  projective_cmd->add_option("--subst", *projective_subst, "substitution text")->required();
  projective_cmd->callback([&, projective_gamma, projective_subst] {
    ProjectivityReport report = is_projective(
        parse_set(*projective_gamma), Substitution::parse(*projective_subst), consequence_opts());
    json checks = json::array();
    for (const auto& [atom, verdict] : report.checks) {
      json c = consequence_json(verdict);
      c["atom"] = atom;
      checks.push_back(std::move(c));
    }
    emit(json{{"projective", report.projective}, {"checks", std::move(checks)}});
    code = report.projective ? kPositive : kNegative;
  });

  // --- exactness -----------------------------------------------------------
  auto* exactness_cmd =
      app.add_subcommand("exactness", "search for a witness refuting exactness of a unifier");
  auto exactness_gamma = std::make_shared<std::vector<std::string>>();
  auto exactness_subst = std::make_shared<std::string>();
  auto exactness_bound = std::make_shared<int>(-1);
  auto exactness_extras = std::make_shared<std::vector<std::string>>();
  exactness_cmd->add_option("--gamma", *exactness_gamma, "member of gamma (repeatable)")->allow_extra_args(false)
      ->required();
  exactness_cmd->add_option("--subst", *exactness_subst, "substitution text")->required();
  exactness_cmd->add_option("--bound", *exactness_bound,
                            "probe bound K (default: modal degree of s(p0) plus one)");
  exactness_cmd->add_option("--probe", *exactness_extras, "extra probe formula (repeatable)")->allow_extra_args(false);
  exactness_cmd->callback([&, exactness_gamma, exactness_subst, exactness_bound,
                           exactness_extras] {
    std::optional<unsigned> bound;
    if (*exactness_bound >= 0) bound = static_cast<unsigned>(*exactness_bound);
    std::vector<Formula> extras;
    for (const auto& t : *exactness_extras) extras.push_back(Formula::parse(t));
    std::optional<Formula> witness =
        exactness_refute(parse_set(*exactness_gamma), Substitution::parse(*exactness_subst),
                         bound, extras, consequence_opts());
    if (witness) {
      emit(json{{"refuted", true}, {"witness", witness->to_string()}});
      code = kNegative;
    } else {
      emit(json{{"refuted", false}});
      code = kPositive;
    }
  });

  // --- admissible-margin ---------------------------------------------------
  auto* adm_cmd = app.add_subcommand(
      "admissible-margin", "decide admissibility of p0 -> []p0 / conclusions, dual evidence");
  auto adm_conclusions = std::make_shared<std::vector<std::string>>();
  adm_cmd->add_option("--conclusion", *adm_conclusions, "conclusion formula (repeatable)")->allow_extra_args(false)
      ->required();
  adm_cmd->callback([&, adm_conclusions] {
    AdmissibilityReport report =
        margin_rule_admissible(parse_set(*adm_conclusions), consequence_opts());
    json alphas = json::array();
    for (const auto& check : report.alpha_checks) {
      json a{{"alpha", check.alpha.to_string()}};
      if (check.unified) a["unifies"] = check.unified->to_string();
      alphas.push_back(std::move(a));
    }
    json derivability{{"holds", report.derivability_evidence}};
    if (report.derivability_witness)
      derivability["witness"] = report.derivability_witness->to_string();
    emit(json{{"admissible", report.admissible()},
              {"consistent", report.consistent()},
              {"derivability", std::move(derivability)},
              {"stabilization", json{{"holds", report.semantic_evidence},
                                     {"bound", report.stabilization_bound},
                                     {"alpha_checks", std::move(alphas)}}}});
    if (!report.consistent()) {
      err << "internal consistency failure: derivability and stabilization disagree\n";
      code = kUsage;
    } else {
      code = report.admissible() ? kPositive : kNegative;
    }
  });

  // --- model ---------------------------------------------------------------
  auto* model_cmd = app.add_subcommand("model", "operations on Kripke model files");
  model_cmd->require_subcommand(1);

  auto* eval_cmd = model_cmd->add_subcommand("eval", "evaluate a formula at a world");
  auto eval_args = std::make_shared<std::vector<std::string>>();
  eval_cmd->add_option("args", *eval_args, "MODEL_FILE WORLD FORMULA")->expected(3);
  eval_cmd->callback([&, eval_args] {
    KripkeModel m = load_model((*eval_args)[0]);
    const bool value = eval(m, (*eval_args)[1], Formula::parse((*eval_args)[2]));
    emit(json{{"world", (*eval_args)[1]}, {"value", value}});
    code = value ? kPositive : kNegative;
  });

  auto* unravel_cmd =
      model_cmd->add_subcommand("unravel", "unravel a model from a world to a depth");
  auto unravel_args = std::make_shared<std::vector<std::string>>();
  auto unravel_depth = std::make_shared<unsigned>(0);
  unravel_cmd->add_option("args", *unravel_args, "MODEL_FILE WORLD")->expected(2);
  unravel_cmd->add_option("--depth", *unravel_depth, "path length bound")->required();
  unravel_cmd->callback([&, unravel_args, unravel_depth] {
    KripkeModel m = load_model((*unravel_args)[0]);
    Unraveling u = unravel(m, (*unravel_args)[1], *unravel_depth);
    json back = json::object();
    for (const auto& [from, to] : u.back.mapping) back[from] = to;
    emit(json{{"tree", tree_to_json(u.tree)}, {"back", std::move(back)}});
    code = kPositive;
  });

  auto* truncate_cmd =
      model_cmd->add_subcommand("truncate", "keep worlds at root distance below N");
  auto truncate_args = std::make_shared<std::string>();
  auto truncate_at = std::make_shared<unsigned>(0);
  truncate_cmd->add_option("tree_file", *truncate_args, "TREE_FILE (model JSON with root)")
      ->required();
  truncate_cmd->add_option("at", *truncate_at, "cut depth N (must be positive)")->required();
  truncate_cmd->callback([&, truncate_args, truncate_at] {
    TreeModel t = truncate(load_tree(*truncate_args), *truncate_at);
    emit(tree_to_json(t));
    code = kPositive;
  });

  auto* graft_cmd =
      model_cmd->add_subcommand("graft", "disjoint union plus one edge from F into G");
  auto graft_args = std::make_shared<std::vector<std::string>>();
  graft_cmd->add_option("args", *graft_args, "F_FILE G_FILE FROM TO")->expected(4);
  graft_cmd->callback([&, graft_args] {
    KripkeModel f = load_model((*graft_args)[0]);
    KripkeModel g = load_model((*graft_args)[1]);
    emit(model_to_json(graft(f, g, (*graft_args)[2], (*graft_args)[3])));
    code = kPositive;
  });

  auto* pmorph_cmd = model_cmd->add_subcommand("pmorphism", "check the p-morphism conditions");
  auto pmorph_args = std::make_shared<std::vector<std::string>>();
  pmorph_cmd->add_option("args", *pmorph_args, "SRC_FILE DST_FILE MAP_FILE")->expected(3);
  pmorph_cmd->callback([&, pmorph_args] {
    KripkeModel src = load_model((*pmorph_args)[0]);
    KripkeModel dst = load_model((*pmorph_args)[1]);
    json map_json = load_json_file((*pmorph_args)[2]);
    if (!map_json.is_object()) throw ModelError("world map must be a JSON object");
    WorldMap map;
    for (const auto& [from, to] : map_json.items()) {
      if (!to.is_string()) throw ModelError("world map values must be world identifiers");
      map.mapping[from] = to.get<std::string>();
    }
    const bool ok = is_p_morphism(map, src, dst);
    emit(json{{"p_morphism", ok}});
    code = ok ? kPositive : kNegative;
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kPositive;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kUsage;
  } catch (const ModelError& e) {
    err << "model error: " << e.what() << '\n';
    return kUsage;
  } catch (const NotAUnifierError& e) {
    err << "precondition violated: " << e.what() << '\n';
    json counter = tree_to_json(e.countermodel());
    counter["refuted_at"] = e.countermodel().root();
    emit(json{{"error", "not_a_unifier"},
              {"failed_on", e.failed_on().to_string()},
              {"countermodel", std::move(counter)}});
    return kUsage;
  } catch (const MarginPreconditionError& e) {
    err << "precondition violated: " << e.what() << '\n';
    json counter = tree_to_json(e.countermodel());
    counter["refuted_at"] = e.countermodel().root();
    emit(json{{"error", "margins_precondition"}, {"countermodel", std::move(counter)}});
    return kUsage;
  } catch (const ResourceLimitError& e) {
    err << "resource limit: " << e.what() << '\n';
    return kResource;
  } catch (const nlohmann::json::exception& e) {
    err << "json error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "invalid argument: " << e.what() << '\n';
    return kUsage;
  }
  return code;
}

}  // namespace kbox::cli
