#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include <json.hpp>

#include "kbox/cli.hpp"
#include "kbox/formula.hpp"
#include "kbox/json_io.hpp"
#include "kbox/kripke.hpp"
#include "support/oracle.hpp"

using namespace kbox;
using nlohmann::json;
using kbox::testing::slow_eval;

namespace {

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;

  json body() const { return json::parse(out); }
};

CliResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  CliResult r;
  r.code = kbox::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

// Writes JSON to a unique temp file, removed on destruction.
class TempJson {
public:
  explicit TempJson(const json& j) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("kbox_cli_test_" + std::to_string(counter++) + "_" +
             std::to_string(::getpid()) + ".json");
    std::ofstream(path_) << j.dump();
  }
  explicit TempJson(const char* raw) {
    static int counter = 1000000;
    path_ = std::filesystem::temp_directory_path() /
            ("kbox_cli_test_" + std::to_string(counter++) + "_" +
             std::to_string(::getpid()) + ".json");
    std::ofstream(path_) << raw;
  }
  ~TempJson() { std::filesystem::remove(path_); }
  std::string str() const { return path_.string(); }

private:
  std::filesystem::path path_;
};

const json kChainModel = {
    {"worlds", {"x", "y", "z"}},
    {"edges", json::array({json::array({"x", "y"}), json::array({"y", "z"})})},
    {"val", {{"z", {0}}}}};

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("prove: verdicts, certificates, exit codes") {
  const CliResult ok = run_cli({"prove", "[] (p0 -> p1) -> ([] p0 -> [] p1)"});
  CHECK(ok.code == 0);
  CHECK(ok.err.empty());
  const json j = ok.body();
  CHECK(j["proved"] == true);
  CHECK(j["nodes_explored"].get<int>() > 0);

  const CliResult no = run_cli({"prove", "p0 -> [] p0"});
  CHECK(no.code == 1);
  const json nj = no.body();
  CHECK(nj["proved"] == false);
  const TreeModel counter = tree_from_json(nj["countermodel"]);
  CHECK(nj["countermodel"]["refuted_at"] == counter.root());
  CHECK_FALSE(slow_eval(counter.model(), counter.root(), Formula::parse("p0 -> [] p0")));
}

TEST_CASE("conseq: depths and countermodels") {
  const CliResult ok =
      run_cli({"conseq", "--premise", "p0 -> [] p0", "p0 -> [2] p0"});
  CHECK(ok.code == 0);
  CHECK(ok.body()["derivable"] == true);
  CHECK(ok.body()["deduction_depth"] == 2);

  const CliResult theorem = run_cli({"conseq", "[] (p0 -> p0)"});
  CHECK(theorem.code == 0);
  CHECK(theorem.body()["deduction_depth"] == 0);

  const CliResult no =
      run_cli({"conseq", "--premise", "p0 -> [] p0", "p0 -> [2] false"});
  CHECK(no.code == 1);
  const json nj = no.body();
  CHECK(nj["derivable"] == false);
  const KripkeModel counter = model_from_json(nj["countermodel"]);
  const std::string at = nj["countermodel"]["refuted_at"].get<std::string>();
  for (const auto& w : counter.worlds())
    CHECK(slow_eval(counter, w, Formula::parse("p0 -> [] p0")));
  CHECK_FALSE(slow_eval(counter, at, Formula::parse("p0 -> [2] false")));

  // Multiple premises each take exactly one value.
  const CliResult multi =
      run_cli({"conseq", "--premise", "p0", "--premise", "p1", "p0 & p1"});
  CHECK(multi.code == 0);
}

TEST_CASE("rule: witness or per-conclusion certificates") {
  const CliResult margins = run_cli({"rule", "--premise", "p0 -> [] p0",
                                     "--conclusion", "p0", "--conclusion",
                                     "p0 -> [] false"});
  CHECK(margins.code == 1);
  const json mj = margins.body();
  CHECK(mj["derivable"] == false);
  REQUIRE(mj["conclusions"].size() == 2);
  for (const auto& detail : mj["conclusions"]) {
    CHECK(detail["derivable"] == false);
    const KripkeModel counter = model_from_json(detail["countermodel"]);
    const Formula conclusion = Formula::parse(detail["conclusion"].get<std::string>());
    const std::string at = detail["countermodel"]["refuted_at"].get<std::string>();
    CHECK_FALSE(slow_eval(counter, at, conclusion));
    for (const auto& w : counter.worlds())
      CHECK(slow_eval(counter, w, Formula::parse("p0 -> [] p0")));
  }

  const CliResult ok = run_cli({"rule", "--conclusion", "[] (p0 -> p0)"});
  CHECK(ok.code == 0);
  CHECK(ok.body()["derivable"] == true);
  CHECK(ok.body()["witness"] == "[] (p0 -> p0)");
}

TEST_CASE("classify: unifier levels and rejections") {
  const CliResult level1 = run_cli({"classify", "--subst", "p0 := [] false"});
  CHECK(level1.code == 0);
  const json lj = level1.body();
  CHECK(lj["unifier"] == true);
  CHECK(lj["top"] == false);
  CHECK(lj["min_n"] == 1);
  CHECK(lj["dominators"] == json::array({"1"}));

  const CliResult top = run_cli({"classify", "--subst", "p0 := true"});
  CHECK(top.code == 0);
  CHECK(top.body()["top"] == true);
  CHECK(top.body()["dominators"] == json::array({"top"}));
  CHECK_FALSE(top.body().contains("min_n"));

  const CliResult no = run_cli({"classify", "--subst", ""});
  CHECK(no.code == 1);
  const json nj = no.body();
  CHECK(nj["unifier"] == false);
  CHECK(nj["image"] == "p0 -> [] p0");
  const TreeModel counter = tree_from_json(nj["countermodel"]);
  CHECK_FALSE(slow_eval(counter.model(), counter.root(), Formula::parse("p0 -> [] p0")));
}

TEST_CASE("margins: both disjuncts succeed, precondition fails loudly") {
  const CliResult bot = run_cli({"margins", "p0 & [] false"});
  CHECK(bot.code == 0);
  CHECK(bot.body()["verdict"] == "implies_box_bot");
  CHECK(bot.body()["n"] == 1);

  const CliResult sigma2 = run_cli({"margins", "p0 & [] p0 & [2] false"});
  CHECK(sigma2.code == 0);
  CHECK(sigma2.body()["n"] == 2);

  const CliResult prov = run_cli({"margins", "true"});
  CHECK(prov.code == 0);
  CHECK(prov.body()["verdict"] == "provable");
  CHECK_FALSE(prov.body().contains("n"));

  const CliResult bad = run_cli({"margins", "p0"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("precondition") != std::string::npos);
  const json bj = bad.body();
  CHECK(bj["error"] == "margins_precondition");
  const TreeModel counter = tree_from_json(bj["countermodel"]);
  CHECK_FALSE(slow_eval(counter.model(), counter.root(), Formula::parse("p0 -> [] p0")));
}

TEST_CASE("chain: levels and certificates") {
  const CliResult r = run_cli({"chain", "2"});
  CHECK(r.code == 0);
  const json j = r.body();
  CHECK(j["passed"] == true);
  REQUIRE(j["levels"].size() == 3);
  for (unsigned n = 0; n <= 2; ++n) {
    const json& level = j["levels"][n];
    CHECK(level["level"] == n);
    CHECK(level["passed"] == true);
    CHECK(level["certificates"]["strict_step"]["proved"] == true);
    CHECK(level["certificates"]["no_collapse"]["proved"] == false);
    CHECK(level["certificates"]["sigma_provable"]["proved"] == false);
    CHECK(level["certificates"]["box_bot_provable"]["proved"] == false);
    CHECK_FALSE(level["narrative"].get<std::string>().empty());
  }
}

TEST_CASE("projective: reports and precondition") {
  const CliResult ok = run_cli({"projective", "--gamma", "p0 -> [] p0 & [] false",
                                "--subst", "p0 := p0 & [] false"});
  CHECK(ok.code == 0);
  CHECK(ok.body()["projective"] == true);
  REQUIRE(ok.body()["checks"].size() == 1);
  CHECK(ok.body()["checks"][0]["atom"] == 0);
  CHECK(ok.body()["checks"][0]["derivable"] == true);

  const CliResult no = run_cli({"projective", "--gamma", "p0 -> [] p0",
                                "--subst", "p0 := p0 & [] false"});
  CHECK(no.code == 1);
  CHECK(no.body()["projective"] == false);
  const json last = no.body()["checks"].back();
  CHECK(last["derivable"] == false);
  CHECK(model_from_json(last["countermodel"]).size() >= 1);

  const CliResult bad =
      run_cli({"projective", "--gamma", "p0 -> [] p0", "--subst", ""});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("precondition") != std::string::npos);
  const json bj = bad.body();
  CHECK(bj["error"] == "not_a_unifier");
  CHECK(bj["failed_on"] == "p0 -> [] p0");
  CHECK(tree_from_json(bj["countermodel"]).model().size() >= 2);
}

TEST_CASE("exactness: witnesses, bounds, extra probes") {
  const CliResult sigma1 = run_cli({"exactness", "--gamma", "p0 -> [] p0",
                                    "--subst", "p0 := p0 & [] false"});
  CHECK(sigma1.code == 1);
  CHECK(sigma1.body()["refuted"] == true);
  CHECK(sigma1.body()["witness"] == "p0 -> [] false");

  const CliResult top = run_cli({"exactness", "--gamma", "p0 -> [] p0",
                                 "--subst", "p0 := true"});
  CHECK(top.code == 1);
  CHECK(top.body()["witness"] == "p0");

  const CliResult exact =
      run_cli({"exactness", "--gamma", "p0", "--subst", "p0 := true"});
  CHECK(exact.code == 0);
  CHECK(exact.body()["refuted"] == false);
  CHECK_FALSE(exact.body().contains("witness"));

  const CliResult probed = run_cli(
      {"exactness", "--gamma", "p0 -> [] p0", "--subst",
       "p0 := p0 & [] p0 & [2] false", "--bound", "1", "--probe", "p0 -> [2] false"});
  CHECK(probed.code == 1);
  CHECK(probed.body()["witness"] == "p0 -> [2] false");

  const CliResult unprobed =
      run_cli({"exactness", "--gamma", "p0 -> [] p0", "--subst",
               "p0 := p0 & [] p0 & [2] false", "--bound", "1"});
  CHECK(unprobed.code == 0);
}

TEST_CASE("admissible-margin: dual evidence") {
  const CliResult ok = run_cli({"admissible-margin", "--conclusion", "true"});
  CHECK(ok.code == 0);
  const json j = ok.body();
  CHECK(j["admissible"] == true);
  CHECK(j["consistent"] == true);
  CHECK(j["derivability"]["holds"] == true);
  CHECK(j["derivability"]["witness"] == "true");
  CHECK(j["stabilization"]["holds"] == true);
  CHECK(j["stabilization"]["bound"] == 1);
  REQUIRE(j["stabilization"]["alpha_checks"].size() == 3);
  CHECK(j["stabilization"]["alpha_checks"][2]["alpha"] == "top");

  const CliResult no =
      run_cli({"admissible-margin", "--conclusion", "p0", "--conclusion", "~p0"});
  CHECK(no.code == 1);
  const json nj = no.body();
  CHECK(nj["admissible"] == false);
  CHECK(nj["consistent"] == true);
  CHECK(nj["derivability"]["holds"] == false);
  CHECK_FALSE(nj["derivability"].contains("witness"));
  const json& checks = nj["stabilization"]["alpha_checks"];
  REQUIRE(checks.size() == 3);
  CHECK(checks[0].contains("unifies"));
  CHECK_FALSE(checks[1].contains("unifies"));
  CHECK(checks[2]["unifies"] == "p0");
}

TEST_CASE("model eval") {
  TempJson model(kChainModel);
  const CliResult yes = run_cli({"model", "eval", model.str(), "y", "[] p0"});
  CHECK(yes.code == 0);
  CHECK(yes.body()["value"] == true);
  CHECK(yes.body()["world"] == "y");

  const CliResult no = run_cli({"model", "eval", model.str(), "y", "p0"});
  CHECK(no.code == 1);
  CHECK(no.body()["value"] == false);

  const CliResult missing = run_cli({"model", "eval", model.str(), "q", "p0"});
  CHECK(missing.code == 2);
  CHECK(missing.err.find("model error") != std::string::npos);
}

TEST_CASE("model unravel, truncate, graft, pmorphism") {
  const json loop = {{"worlds", {"x"}},
                     {"edges", json::array({json::array({"x", "x"})})},
                     {"val", {{"x", {0}}}}};
  TempJson loop_file(loop);

  const CliResult unraveled =
      run_cli({"model", "unravel", loop_file.str(), "x", "--depth", "2"});
  CHECK(unraveled.code == 0);
  const json uj = unraveled.body();
  CHECK(uj["tree"]["root"] == "x");
  CHECK(uj["back"]["x/x"] == "x");
  const TreeModel tree = tree_from_json(uj["tree"]);
  CHECK(tree.model().size() == 3);
  CHECK(tree.height() == 2);

  TempJson tree_file(uj["tree"]);
  const CliResult cut = run_cli({"model", "truncate", tree_file.str(), "2"});
  CHECK(cut.code == 0);
  CHECK(tree_from_json(cut.body()).model().size() == 2);
  CHECK(run_cli({"model", "truncate", tree_file.str(), "0"}).code == 2);

  TempJson f_file(kChainModel);
  TempJson g_file(loop);
  const CliResult grafted =
      run_cli({"model", "graft", f_file.str(), g_file.str(), "z", "x"});
  CHECK(grafted.code == 0);
  const KripkeModel joined = model_from_json(grafted.body());
  CHECK(joined.has_world("g:x"));
  CHECK(joined.size() == 4);
  CHECK(eval(joined, "z", Formula::parse("<> p0")));
  CHECK(run_cli({"model", "graft", f_file.str(), g_file.str(), "nope", "x"}).code == 2);

  // The complete unraveling of a finite chain folds back p-morphically.
  const CliResult chain_unravel =
      run_cli({"model", "unravel", f_file.str(), "x", "--depth", "3"});
  REQUIRE(chain_unravel.code == 0);
  TempJson src_file(chain_unravel.body()["tree"]);
  TempJson map_file(chain_unravel.body()["back"]);
  const CliResult morph =
      run_cli({"model", "pmorphism", src_file.str(), f_file.str(), map_file.str()});
  CHECK(morph.code == 0);
  CHECK(morph.body()["p_morphism"] == true);

  // A map that misses the atom valuation is rejected as a p-morphism.
  const TreeModel unraveled_tree = tree_from_json(chain_unravel.body()["tree"]);
  json bad_map = json::object();
  for (const auto& w : unraveled_tree.model().worlds()) bad_map[w] = "x";
  TempJson bad_map_file(bad_map);
  const CliResult not_morph =
      run_cli({"model", "pmorphism", src_file.str(), f_file.str(), bad_map_file.str()});
  CHECK(not_morph.code == 1);
  CHECK(not_morph.body()["p_morphism"] == false);

  // Non-total maps are usage errors, not negative verdicts.
  TempJson empty_map(json::object());
  CHECK(run_cli({"model", "pmorphism", src_file.str(), f_file.str(), empty_map.str()})
            .code == 2);
}

TEST_CASE("usage and parse failures exit with 2") {
  CHECK(run_cli({}).code == 2);
  CHECK(run_cli({"frobnicate"}).code == 2);
  CHECK(run_cli({"prove"}).code == 2);

  const CliResult bad_formula = run_cli({"prove", "p0 &"});
  CHECK(bad_formula.code == 2);
  CHECK(bad_formula.err.find("parse error") != std::string::npos);
  CHECK(bad_formula.err.find("position") != std::string::npos);

  const CliResult bad_subst = run_cli({"classify", "--subst", "q0 := p0"});
  CHECK(bad_subst.code == 2);

  TempJson junk("this is not json");
  CHECK(run_cli({"model", "eval", junk.str(), "x", "p0"}).code == 2);
  CHECK(run_cli({"model", "eval", "/no/such/file.json", "x", "p0"}).code == 2);

  TempJson bad_model(R"({"worlds": ["x","x"]})");
  CHECK(run_cli({"model", "eval", bad_model.str(), "x", "p0"}).code == 2);

  TempJson tree(kChainModel);  // missing "root"
  CHECK(run_cli({"model", "truncate", tree.str(), "1"}).code == 2);

  CHECK(run_cli({"rule", "--premise", "p0"}).code == 2);  // conclusions required
  CHECK(run_cli({"admissible-margin"}).code == 2);
  CHECK(run_cli({"model"}).code == 2);
}

TEST_CASE("help exits cleanly") {
  const CliResult top = run_cli({"--help"});
  CHECK(top.code == 0);
  CHECK(top.out.find("kbox") != std::string::npos);
  CHECK(top.out.find("prove") != std::string::npos);

  const CliResult sub = run_cli({"prove", "--help"});
  CHECK(sub.code == 0);
  CHECK(sub.out.find("formula") != std::string::npos);
}

TEST_CASE("quiet mode and budgets") {
  const CliResult quiet = run_cli({"-q", "prove", "true"});
  CHECK(quiet.code == 0);
  CHECK(quiet.out.empty());

  const CliResult quiet_neg = run_cli({"--quiet", "classify", "--subst", ""});
  CHECK(quiet_neg.code == 1);
  CHECK(quiet_neg.out.empty());

  const CliResult quiet_usage = run_cli({"-q", "margins", "p0"});
  CHECK(quiet_usage.code == 2);
  CHECK(quiet_usage.out.empty());
  CHECK_FALSE(quiet_usage.err.empty());

  const CliResult starved =
      run_cli({"--max-nodes", "5", "prove", "[] (p0 -> p1) -> ([] p0 -> [] p1)"});
  CHECK(starved.code == 3);
  CHECK(starved.err.find("resource limit") != std::string::npos);

  const CliResult narrow = run_cli({"--max-closure", "4", "conseq", "--premise",
                                    "p0 -> [] p0", "p0 -> [2] p0"});
  CHECK(narrow.code == 3);
}

}  // TEST_SUITE("cli")
