/*
 * tools/explan.cpp
 *
 * Copyright 2026 The explan authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "explan/io.hpp"
#include "explan/manifest.hpp"
#include "explan/model_io.hpp"
#include "explan/parser.hpp"
#include "explan/pipeline.hpp"
#include "explan/reconciliation.hpp"
#include "explan/rules.hpp"
#include "explan/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNoSolution = 2;
constexpr int kExitResourceLimit = 3;

namespace fs = std::filesystem;
using namespace explan;

struct GlobalOpts {
  std::uint64_t seed = 0;
  long long budget = 1000000;
  bool quiet = false;
};

std::ostream& info(const GlobalOpts& g) {
  static std::ostream null_stream(nullptr);
  return g.quiet ? null_stream : std::cerr;
}

GroundTask load_task(const std::string& domain_path,
                     const std::string& problem_path) {
  DomainModel d = parse_domain(read_file(domain_path));
  ProblemInstance p = parse_problem(read_file(problem_path), d);
  return ground(d, p);
}

LinkMode mode_opt(const std::string& s) { return link_mode_from_string(s); }

CompositeKind composite_opt(const std::string& s) {
  if (s == "squared-sum") return CompositeKind::kSquaredSum;
  if (s == "squared-norm") return CompositeKind::kSquaredNorm;
  throw DataError("unknown composite kind: " + s);
}

int cmd_plan(const GlobalOpts& g, const std::string& domain,
             const std::string& problem, const std::string& out,
             const std::string& heuristic) {
  RunManifest manifest("plan");
  manifest.add_input(domain);
  manifest.add_input(problem);
  GroundTask task = load_task(domain, problem);
  SearchLimits limits;
  limits.node_budget = g.budget;
  Plan plan = optimal_plan(task,
                           heuristic == "blind" ? SearchHeuristic::kBlind
                                                : SearchHeuristic::kHMax,
                           limits);
  write_plan_file(task, plan, out);
  manifest.add_output(out);
  manifest.write(out + ".manifest.json");
  info(g) << "plan: cost " << plan.cost << ", " << plan.actions.size()
          << " actions -> " << out << "\n";
  return kExitOk;
}

int cmd_validate(const GlobalOpts& g, const std::string& domain,
                 const std::string& problem, const std::string& plan_path) {
  GroundTask task = load_task(domain, problem);
  Plan plan = read_plan_file(task, plan_path);
  ValidationResult r = validate_plan(task, plan);
  info(g) << "valid: cost " << r.cost << ", trace length "
          << r.trace.states.size() << "\n";
  std::cout << "valid cost=" << r.cost << "\n";
  return kExitOk;
}

int cmd_score(const GlobalOpts& g, const std::string& domain,
              const std::string& problem, const std::string& plan_path,
              const std::string& rules_path) {
  GroundTask task = load_task(domain, problem);
  Plan plan = read_plan_file(task, plan_path);
  validate_plan(task, plan);
  ExpectationRules rules = ExpectationRules::load(rules_path);
  const double s = plan_score_synthetic(task, plan, rules);
  (void)g;
  std::cout << fmt_double(s) << "\n";
  return kExitOk;
}

int cmd_distances(const GlobalOpts& g, const std::string& robot,
                  const std::string& human, const std::string& problem,
                  const std::string& map_path, const std::string& plan_r_path,
                  const std::string& plan_h_path, const std::string& mode,
                  const std::string& composite, const std::string& out) {
  DomainModel rd = parse_domain(read_file(robot));
  DomainModel hd = parse_domain(read_file(human));
  const std::string ptext = read_file(problem);
  GroundTask rt = ground(rd, parse_problem(ptext, rd));
  GroundTask ht = ground(hd, parse_problem(ptext, hd));
  ActionMapping mapping =
      map_path.empty() ? ActionMapping{} : ActionMapping::load(map_path);
  Plan plan_r = read_plan_file(rt, plan_r_path);
  Plan plan_h = read_plan_file(ht, plan_h_path);
  DistanceVector dv =
      distance_vector(rt, plan_r, ht, plan_h, mapping, mode_opt(mode));
  const double comp = composite_distance(dv, composite_opt(composite));
  std::ostringstream csv;
  csv << "plan_r,plan_h,delta_a,delta_c,delta_s,composite\n"
      << plan_r_path << "," << plan_h_path << "," << fmt_double(dv.action_d)
      << "," << fmt_double(dv.causal_d) << "," << fmt_double(dv.state_d) << ","
      << fmt_double(comp) << "\n";
  std::cout << csv.str();
  if (!out.empty()) {
    write_file(out, csv.str());
    RunManifest manifest("distances");
    manifest.add_input(robot);
    manifest.add_input(human);
    manifest.add_input(problem);
    manifest.add_input(plan_r_path);
    manifest.add_input(plan_h_path);
    if (!map_path.empty()) manifest.add_input(map_path);
    manifest.add_output(out);
    manifest.write(out + ".manifest.json");
  }
  (void)g;
  return kExitOk;
}

int cmd_gen_expected(const GlobalOpts& g, const std::string& domain,
                     const std::string& problem, int k,
                     const std::string& out_dir) {
  RunManifest manifest("gen-expected");
  manifest.add_input(domain);
  manifest.add_input(problem);
  GroundTask task = load_task(domain, problem);
  SearchLimits limits;
  limits.node_budget = g.budget;
  ExpectedPlanSet set = generate_expected_set(task, k, limits);
  fs::create_directories(out_dir);
  nlohmann::ordered_json meta;
  meta["optimal_cost"] = set.optimal_cost;
  meta["count"] = set.plans.size();
  meta["truncated"] = set.meta.truncated;
  meta["expansions"] = set.meta.expansions;
  meta["plans"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < set.plans.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "member-%03zu.plan", i);
    const std::string path = (fs::path(out_dir) / name).string();
    write_plan_file(task, set.plans[i], path);
    meta["plans"].push_back(name);
    manifest.add_output(path);
  }
  const std::string meta_path = (fs::path(out_dir) / "expected-manifest.json").string();
  write_file(meta_path, meta.dump(2) + "\n");
  manifest.add_output(meta_path);
  manifest.write((fs::path(out_dir) / "run-manifest.json").string());
  info(g) << "gen-expected: " << set.plans.size() << " plans at optimal cost "
          << set.optimal_cost << (set.meta.truncated ? " (truncated)" : "")
          << " -> " << out_dir << "\n";
  return kExitOk;
}

int cmd_featurize(const GlobalOpts& g, const std::string& robot,
                  const std::string& human, const std::string& problem,
                  const std::string& map_path, const std::string& plans_dir,
                  const std::string& rules_path, const std::string& scores_path,
                  const std::string& out, const std::string& mode,
                  int k_expected) {
  if (rules_path.empty() == scores_path.empty())
    throw DataError("featurize needs exactly one of --rules / --scores");
  RunManifest manifest("featurize");
  manifest.add_input(robot);
  manifest.add_input(human);
  manifest.add_input(problem);
  DomainModel rd = parse_domain(read_file(robot));
  DomainModel hd = parse_domain(read_file(human));
  const std::string ptext = read_file(problem);
  GroundTask rt = ground(rd, parse_problem(ptext, rd));
  GroundTask ht = ground(hd, parse_problem(ptext, hd));
  ActionMapping mapping =
      map_path.empty() ? ActionMapping{} : ActionMapping::load(map_path);

  std::vector<Plan> plans;
  std::vector<std::string> names;
  for (const std::string& pf : sorted_files(plans_dir, ".plan")) {
    plans.push_back(read_plan_file(rt, pf));
    names.push_back(fs::path(pf).filename().string());
    manifest.add_input(pf);
  }
  std::vector<double> scores;
  if (!rules_path.empty()) {
    ExpectationRules rules = ExpectationRules::load(rules_path);
    manifest.add_input(rules_path);
    for (const Plan& p : plans) scores.push_back(rules.score(rt, p));
  } else {
    manifest.add_input(scores_path);
    std::map<std::string, double> by_name;
    int lineno = 0;
    for (const std::string& raw : split(read_file(scores_path), '\n')) {
      ++lineno;
      std::string line = trim(raw);
      if (line.empty() || line[0] == '#') continue;
      std::istringstream is(line);
      std::string name;
      double score;
      if (!(is >> name >> score))
        throw DataError("scores line " + std::to_string(lineno) +
                        ": expected <plan-file> <score>");
      by_name[name] = score;
    }
    for (const std::string& n : names) {
      auto it = by_name.find(n);
      if (it == by_name.end()) throw DataError("no score for plan " + n);
      scores.push_back(it->second);
    }
  }
  auto samples = featurize_dataset(rt, plans, ht, mapping, mode_opt(mode),
                                   scores, k_expected,
                                   CompositeKind::kSquaredSum, &names);
  write_file(out, write_samples_csv(samples));
  manifest.add_output(out);
  manifest.write(out + ".manifest.json");
  info(g) << "featurize: " << samples.size() << " samples -> " << out << "\n";
  return kExitOk;
}

int cmd_train(const GlobalOpts& g, const std::string& csv_path,
              const std::string& kind, const std::string& grid_path, int folds,
              const std::string& out) {
  RunManifest manifest("train");
  manifest.set_seed(g.seed);
  manifest.add_input(csv_path);
  manifest.add_input(grid_path);
  auto samples = parse_samples_csv(read_file(csv_path));
  auto grid = parse_grid_file(read_file(grid_path), kind);
  GridSearchReport report = grid_search(samples, grid, folds, g.seed);
  std::cout << report.table();
  const GridEntry& win = report.entries[report.winner];
  RegressionModel model = train(samples, win.point, g.seed);
  model.cv_r2 = win.mean_r2;
  save_model(model, out);
  manifest.add_output(out);
  manifest.write(out + ".manifest.json");
  info(g) << "train: winner " << win.point.describe() << " -> " << out << "\n";
  return kExitOk;
}

int cmd_explicate(const GlobalOpts& g, const std::string& robot,
                  const std::string& human, const std::string& problem,
                  const std::string& map_path, const std::string& model_path,
                  long long max_cost, int k_expected,
                  const std::string& anytime_csv, const std::string& mode,
                  const std::string& composite) {
  DomainModel rd = parse_domain(read_file(robot));
  DomainModel hd = parse_domain(read_file(human));
  const std::string ptext = read_file(problem);
  GroundTask rt = ground(rd, parse_problem(ptext, rd));
  GroundTask ht = ground(hd, parse_problem(ptext, hd));
  ActionMapping mapping =
      map_path.empty() ? ActionMapping{} : ActionMapping::load(map_path);
  ExplicablePlanningProblem epp =
      make_explicable_problem(rt, ht, std::move(mapping));
  RegressionModel model = load_model(model_path);

  ReconciliationParams params;
  params.max_cost = max_cost;
  params.k_expected = k_expected;
  params.node_budget = g.budget;
  params.mode = mode_opt(mode);
  params.composite = composite_opt(composite);

  auto emit = [&](const Solution& s) {
    std::cout << "; solution " << s.index << "\n";
    for (int aid : s.plan.actions)
      std::cout << "(" << epp.robot.actions[aid].name << ")\n";
    std::cout << "; cost = " << s.cost << "\n";
    std::cout << "; score = " << fmt_double(s.predicted_score) << "\n\n";
  };

  SolutionStream stream;
  try {
    stream = reconciliation_search(epp, params, model, emit);
  } catch (const NoSolutionWithinBound& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoSolution;
  }
  if (!anytime_csv.empty()) {
    write_file(anytime_csv, write_anytime_csv(stream));
    RunManifest manifest("explicate");
    manifest.set_seed(g.seed);
    manifest.add_input(robot);
    manifest.add_input(human);
    manifest.add_input(problem);
    manifest.add_input(model_path);
    if (!map_path.empty()) manifest.add_input(map_path);
    manifest.add_output(anytime_csv);
    manifest.write(anytime_csv + ".manifest.json");
  }
  const Solution* best = stream.best_solution();
  info(g) << "explicate: " << stream.solutions.size() << " solutions, best"
          << " score " << fmt_double(best->predicted_score) << " at cost "
          << best->cost << (stream.complete ? "" : " (budget hit)") << "\n";
  return stream.complete ? kExitOk : kExitResourceLimit;
}

int cmd_eval(const GlobalOpts& g, const std::string& robot,
             const std::string& human, const std::string& problems_dir,
             const std::string& map_path, const std::string& model_path,
             const std::string& rules_path, const std::string& out,
             double factor, int k_expected, const std::string& mode) {
  RunManifest manifest("eval");
  manifest.set_seed(g.seed);
  manifest.add_input(robot);
  manifest.add_input(human);
  manifest.add_input(model_path);
  manifest.add_input(rules_path);
  if (!map_path.empty()) manifest.add_input(map_path);
  DomainModel rd = parse_domain(read_file(robot));
  DomainModel hd = parse_domain(read_file(human));
  ActionMapping mapping =
      map_path.empty() ? ActionMapping{} : ActionMapping::load(map_path);
  RegressionModel model = load_model(model_path);
  ExpectationRules rules = ExpectationRules::load(rules_path);

  EvalParams params;
  params.cost_bound_factor = factor;
  params.k_expected = k_expected;
  params.node_budget = g.budget;
  params.mode = mode_opt(mode);

  std::vector<EvalRow> rows;
  bool failures = false;
  for (const std::string& ppath : sorted_files(problems_dir, ".pddl")) {
    EvalOutcome outcome =
        evaluate_problem(rd, hd, ppath, mapping, model, rules, params);
    if (!outcome.row.error.empty()) failures = true;
    rows.push_back(outcome.row);
    info(g) << "eval: " << outcome.row.problem
            << (outcome.row.error.empty() ? "" : " FAILED") << "\n";
  }
  write_file(out, write_eval_csv(rows));
  manifest.add_output(out);
  manifest.write(out + ".manifest.json");
  std::cout << write_eval_csv(rows);
  return failures ? kExitError : kExitOk;
}

int cmd_pipeline(const GlobalOpts& g, const std::string& config) {
  static std::ostream null_stream(nullptr);
  PipelineResult result =
      run_pipeline(config, g.quiet ? null_stream : std::cerr);
  info(g) << "pipeline: eval table -> " << result.out_dir << "/eval.csv\n";
  return result.eval_failures ? kExitError : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"explicable planning toolkit"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--seed", g.seed, "seed for all stochastic procedures");
  app.add_option("--budget", g.budget, "search node budget");
  app.add_flag("--quiet", g.quiet, "suppress progress output");
  app.set_version_flag("--version", std::string(explan::kVersion));

  std::string domain, problem, robot, human, map_path, plan_path, plan_r,
      plan_h, rules_path, scores_path, model_path, grid_path, csv_path, out,
      out_dir, plans_dir, problems_dir, config_path, anytime_csv;
  std::string heuristic = "hmax";
  std::string mode = "literal-adjacent";
  std::string composite = "squared-sum";
  std::string kind = "all";
  int k = 64;
  int k_expected = 16;
  int folds = 5;
  long long max_cost = 0;
  double factor = 2.0;

  auto* plan_cmd = app.add_subcommand("plan", "cost-optimal plan");
  plan_cmd->add_option("--domain", domain)->required();
  plan_cmd->add_option("--problem", problem)->required();
  plan_cmd->add_option("--out", out)->required();
  plan_cmd->add_option("--heuristic", heuristic, "hmax | blind");

  auto* validate_cmd = app.add_subcommand("validate", "replay a plan file");
  validate_cmd->add_option("--domain", domain)->required();
  validate_cmd->add_option("--problem", problem)->required();
  validate_cmd->add_option("--plan", plan_path)->required();

  auto* score_cmd = app.add_subcommand("score", "rule-based plan score");
  score_cmd->add_option("--domain", domain)->required();
  score_cmd->add_option("--problem", problem)->required();
  score_cmd->add_option("--plan", plan_path)->required();
  score_cmd->add_option("--rules", rules_path)->required();

  auto* dist_cmd = app.add_subcommand("distances", "plan distance CSV row");
  dist_cmd->add_option("--robot", robot)->required();
  dist_cmd->add_option("--human", human)->required();
  dist_cmd->add_option("--problem", problem)->required();
  dist_cmd->add_option("--map", map_path);
  dist_cmd->add_option("--plan-r", plan_r)->required();
  dist_cmd->add_option("--plan-h", plan_h)->required();
  dist_cmd->add_option("--mode", mode, "literal-adjacent | producer-consumer");
  dist_cmd->add_option("--composite", composite, "squared-sum | squared-norm");
  dist_cmd->add_option("--out", out);

  auto* gen_cmd = app.add_subcommand("gen-expected", "optimal plan set");
  gen_cmd->add_option("--domain", domain)->required();
  gen_cmd->add_option("--problem", problem)->required();
  gen_cmd->add_option("--k", k, "cap on set size");
  gen_cmd->add_option("--out", out_dir)->required();

  auto* feat_cmd = app.add_subcommand("featurize", "plans -> training CSV");
  feat_cmd->add_option("--robot", robot)->required();
  feat_cmd->add_option("--human", human)->required();
  feat_cmd->add_option("--problem", problem)->required();
  feat_cmd->add_option("--map", map_path);
  feat_cmd->add_option("--plans", plans_dir)->required();
  feat_cmd->add_option("--rules", rules_path);
  feat_cmd->add_option("--scores", scores_path);
  feat_cmd->add_option("--out", out)->required();
  feat_cmd->add_option("--mode", mode);
  feat_cmd->add_option("--k-expected", k_expected);

  auto* train_cmd = app.add_subcommand("train", "grid search + fit");
  train_cmd->add_option("--csv", csv_path)->required();
  train_cmd->add_option("--kind", kind, "ridge | tree | forest | all");
  train_cmd->add_option("--grid", grid_path)->required();
  train_cmd->add_option("--folds", folds);
  train_cmd->add_option("--out", out)->required();

  auto* expl_cmd = app.add_subcommand("explicate", "anytime explicable search");
  expl_cmd->add_option("--robot", robot)->required();
  expl_cmd->add_option("--human", human)->required();
  expl_cmd->add_option("--problem", problem)->required();
  expl_cmd->add_option("--map", map_path);
  expl_cmd->add_option("--model", model_path)->required();
  expl_cmd->add_option("--max-cost", max_cost)->required();
  expl_cmd->add_option("--k-expected", k_expected);
  expl_cmd->add_option("--anytime-csv", anytime_csv);
  expl_cmd->add_option("--mode", mode);
  expl_cmd->add_option("--composite", composite);

  auto* eval_cmd = app.add_subcommand("eval", "optimal vs explicable table");
  eval_cmd->add_option("--robot", robot)->required();
  eval_cmd->add_option("--human", human)->required();
  eval_cmd->add_option("--problems", problems_dir)->required();
  eval_cmd->add_option("--map", map_path);
  eval_cmd->add_option("--model", model_path)->required();
  eval_cmd->add_option("--rules", rules_path)->required();
  eval_cmd->add_option("--out", out)->required();
  eval_cmd->add_option("--factor", factor, "cost bound = factor * optimal");
  eval_cmd->add_option("--k-expected", k_expected);
  eval_cmd->add_option("--mode", mode);

  auto* pipe_cmd = app.add_subcommand("pipeline", "end-to-end run from config");
  pipe_cmd->add_option("config", config_path)->required();

  for (CLI::App* sub : app.get_subcommands(nullptr)) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(plan_cmd))
      return cmd_plan(g, domain, problem, out, heuristic);
    if (app.got_subcommand(validate_cmd))
      return cmd_validate(g, domain, problem, plan_path);
    if (app.got_subcommand(score_cmd))
      return cmd_score(g, domain, problem, plan_path, rules_path);
    if (app.got_subcommand(dist_cmd))
      return cmd_distances(g, robot, human, problem, map_path, plan_r, plan_h,
                           mode, composite, out);
    if (app.got_subcommand(gen_cmd))
      return cmd_gen_expected(g, domain, problem, k, out_dir);
    if (app.got_subcommand(feat_cmd))
      return cmd_featurize(g, robot, human, problem, map_path, plans_dir,
                           rules_path, scores_path, out, mode, k_expected);
    if (app.got_subcommand(train_cmd))
      return cmd_train(g, csv_path, kind, grid_path, folds, out);
    if (app.got_subcommand(expl_cmd))
      return cmd_explicate(g, robot, human, problem, map_path, model_path,
                           max_cost, k_expected, anytime_csv, mode, composite);
    if (app.got_subcommand(eval_cmd))
      return cmd_eval(g, robot, human, problems_dir, map_path, model_path,
                      rules_path, out, factor, k_expected, mode);
    if (app.got_subcommand(pipe_cmd)) return cmd_pipeline(g, config_path);
  } catch (const Unsolvable& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoSolution;
  } catch (const NoSolutionWithinBound& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoSolution;
  } catch (const ResourceLimit& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitResourceLimit;
  } catch (const explan::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
