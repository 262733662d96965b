/*
 * include/explan/pipeline.hpp
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

#pragma once

#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "explan/errors.hpp"
#include "explan/io.hpp"
#include "explan/manifest.hpp"
#include "explan/model_io.hpp"
#include "explan/parser.hpp"
#include "explan/reconciliation.hpp"
#include "explan/rules.hpp"
#include "explan/text.hpp"

namespace explan {

struct PipelineError : Error {
  PipelineError(const std::string& stage, const std::string& what)
      : Error("pipeline stage '" + stage + "' failed: " + what), stage(stage) {}
  std::string stage;
};

// `key = value` lines, '#' comments. Relative path values resolve against the
// config file's directory.
class KVConfig {
 public:
  static KVConfig parse(const std::string& text, const std::string& base_dir) {
    KVConfig c;
    c.base_dir_ = base_dir;
    int lineno = 0;
    for (const std::string& raw : split(text, '\n')) {
      ++lineno;
      std::string line = trim(raw);
      if (line.empty() || line[0] == '#') continue;
      auto eq = line.find('=');
      if (eq == std::string::npos)
        throw DataError("config line " + std::to_string(lineno) +
                        ": expected key = value");
      std::string key = trim(line.substr(0, eq));
      std::string value = trim(line.substr(eq + 1));
      if (key.empty() || c.values_.count(key))
        throw DataError("config line " + std::to_string(lineno) +
                        ": bad or duplicate key '" + key + "'");
      c.values_[key] = value;
    }
    return c;
  }

  static KVConfig load(const std::string& path) {
    return parse(read_file(path),
                 std::filesystem::path(path).parent_path().string());
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw DataError("config is missing key '" + key + "'");
    return it->second;
  }

  std::string get_or(const std::string& key, const std::string& dflt) const {
    auto it = values_.find(key);
    return it == values_.end() ? dflt : it->second;
  }

  std::string path(const std::string& key) const { return resolve(get(key)); }

  std::string resolve(const std::string& p) const {
    std::filesystem::path fp(p);
    if (fp.is_absolute() || base_dir_.empty()) return p;
    return (std::filesystem::path(base_dir_) / fp).string();
  }

  long long get_int(const std::string& key, long long dflt) const {
    auto it = values_.find(key);
    return it == values_.end() ? dflt : std::stoll(it->second);
  }

  double get_double(const std::string& key, double dflt) const {
    auto it = values_.find(key);
    return it == values_.end() ? dflt : std::stod(it->second);
  }

 private:
  std::map<std::string, std::string> values_;
  std::string base_dir_;
};

// Hyperparameter grid file: one [kind] section per regressor, each key a
// space-separated value list; tuples are the per-section cartesian products
// in declaration order of the fixed key sets.
inline std::vector<GridPoint> parse_grid_file(const std::string& text,
                                              const std::string& kind_filter) {
  std::map<std::string, std::map<std::string, std::vector<std::string>>> sections;
  std::vector<std::string> section_order;
  std::string current;
  int lineno = 0;
  for (const std::string& raw : split(text, '\n')) {
    ++lineno;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[' && line.back() == ']') {
      current = trim(line.substr(1, line.size() - 2));
      if (current != "ridge" && current != "tree" && current != "forest")
        throw DataError("grid line " + std::to_string(lineno) +
                        ": unknown section [" + current + "]");
      if (!sections.count(current)) section_order.push_back(current);
      sections[current];
      continue;
    }
    if (current.empty())
      throw DataError("grid line " + std::to_string(lineno) +
                      ": value outside a [section]");
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw DataError("grid line " + std::to_string(lineno) +
                      ": expected key = values");
    std::string key = trim(line.substr(0, eq));
    std::vector<std::string> vals;
    std::istringstream is(line.substr(eq + 1));
    std::string tok;
    while (is >> tok) vals.push_back(tok);
    if (vals.empty())
      throw DataError("grid line " + std::to_string(lineno) + ": empty values");
    sections[current][key] = vals;
  }

  auto values_of = [&](const std::string& sec, const std::string& key,
                       const std::string& dflt) {
    auto& m = sections[sec];
    auto it = m.find(key);
    if (it == m.end()) return std::vector<std::string>{dflt};
    return it->second;
  };

  std::vector<GridPoint> grid;
  for (const std::string& sec : section_order) {
    if (kind_filter != "all" && kind_filter != sec) continue;
    if (sec == "ridge") {
      for (const std::string& l : values_of(sec, "lambda", "0.1")) {
        GridPoint p;
        p.kind = ModelKind::kRidge;
        p.lambda = std::stod(l);
        grid.push_back(p);
      }
    } else if (sec == "tree") {
      for (const std::string& d : values_of(sec, "max_depth", "8"))
        for (const std::string& ms : values_of(sec, "min_split", "2")) {
          GridPoint p;
          p.kind = ModelKind::kTree;
          p.max_depth = std::stoi(d);
          p.min_split = std::stoi(ms);
          grid.push_back(p);
        }
    } else {
      for (const std::string& nt : values_of(sec, "n_trees", "50"))
        for (const std::string& d : values_of(sec, "max_depth", "8"))
          for (const std::string& ms : values_of(sec, "min_split", "2"))
            for (const std::string& fs : values_of(sec, "feature_subset", "1")) {
              GridPoint p;
              p.kind = ModelKind::kForest;
              p.n_trees = std::stoi(nt);
              p.max_depth = std::stoi(d);
              p.min_split = std::stoi(ms);
              p.feature_subset = std::stoi(fs);
              grid.push_back(p);
            }
    }
  }
  if (grid.empty()) throw DataError("grid file yields no tuples for kind '" +
                                    kind_filter + "'");
  return grid;
}

struct EvalRow {
  std::string problem;
  long long opt_cost = 0;
  long long expl_cost = 0;
  double opt_score = 0.0;
  double expl_score = 0.0;
  std::string error;
};

inline std::string write_eval_csv(const std::vector<EvalRow>& rows) {
  std::ostringstream os;
  os << "# scores are synthetic: declarative expectation rules stand in for "
        "human raters\n";
  os << "problem,opt_cost,expl_cost,opt_score,expl_score,error\n";
  for (const EvalRow& r : rows) {
    std::string err = r.error;
    for (char& c : err)
      if (c == ',' || c == '\n') c = ';';
    if (r.error.empty()) {
      os << r.problem << "," << r.opt_cost << "," << r.expl_cost << ","
         << fmt_double(r.opt_score) << "," << fmt_double(r.expl_score) << ",\n";
    } else {
      os << r.problem << ",,,,," << err << "\n";
    }
  }
  return os.str();
}

inline std::vector<std::string> sorted_files(const std::string& dir,
                                             const std::string& ext) {
  std::vector<std::string> out;
  if (!std::filesystem::is_directory(dir))
    throw DataError("not a directory: " + dir);
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ext)
      out.push_back(e.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

struct LoadedProblem {
  std::string stem;
  GroundTask robot;
  GroundTask human;
};

inline LoadedProblem load_problem_pair(const DomainModel& robot_dom,
                                       const DomainModel& human_dom,
                                       const std::string& problem_path) {
  LoadedProblem lp;
  lp.stem = std::filesystem::path(problem_path).stem().string();
  const std::string text = read_file(problem_path);
  lp.robot = ground(robot_dom, parse_problem(text, robot_dom));
  lp.human = ground(human_dom, parse_problem(text, human_dom));
  return lp;
}

struct EvalParams {
  double cost_bound_factor = 2.0;
  int k_expected = 16;
  long long node_budget = 1000000;
  LinkMode mode = LinkMode::kLiteralAdjacent;
  CompositeKind composite = CompositeKind::kSquaredSum;
};

struct EvalOutcome {
  EvalRow row;
  std::optional<SolutionStream> stream;
  std::optional<Plan> best_plan;
};

// One problem: cost-optimal plan vs best explicable plan, both scored by the
// expectation rules.
inline EvalOutcome evaluate_problem(const DomainModel& robot_dom,
                                    const DomainModel& human_dom,
                                    const std::string& problem_path,
                                    const ActionMapping& mapping,
                                    const RegressionModel& model,
                                    const ExpectationRules& rules,
                                    const EvalParams& params) {
  EvalOutcome out;
  out.row.problem = std::filesystem::path(problem_path).stem().string();
  try {
    LoadedProblem lp = load_problem_pair(robot_dom, human_dom, problem_path);
    ExplicablePlanningProblem epp =
        make_explicable_problem(lp.robot, lp.human, mapping);

    const Plan opt = optimal_plan(epp.robot);
    out.row.opt_cost = opt.cost;
    out.row.opt_score = rules.score(epp.robot, opt);

    ReconciliationParams rp;
    rp.max_cost = static_cast<long long>(
        std::ceil(static_cast<double>(opt.cost) * params.cost_bound_factor));
    if (rp.max_cost < opt.cost) rp.max_cost = opt.cost;
    rp.k_expected = params.k_expected;
    rp.node_budget = params.node_budget;
    rp.mode = params.mode;
    rp.composite = params.composite;

    SolutionStream stream = reconciliation_search(epp, rp, model);
    const Solution* best = stream.best_solution();
    out.row.expl_cost = best->cost;
    out.row.expl_score = rules.score(epp.robot, best->plan);
    out.best_plan = best->plan;
    out.stream = std::move(stream);
  } catch (const Error& e) {
    out.row.error = e.what();
  }
  return out;
}

inline std::string write_anytime_csv(const SolutionStream& stream) {
  std::ostringstream os;
  os << "solution_index,cost,predicted_score,best_so_far\n";
  double best = -1.0;
  for (const Solution& s : stream.solutions) {
    best = std::max(best, s.predicted_score);
    os << s.index << "," << s.cost << "," << fmt_double(s.predicted_score)
       << "," << fmt_double(best) << "\n";
  }
  return os.str();
}

struct PipelineResult {
  std::string out_dir;
  std::vector<EvalRow> rows;
  GridSearchReport report;
  bool eval_failures = false;
};

// featurize -> grid_search -> train -> explicate -> eval, with every
// intermediate artifact persisted under out_dir. The first failing stage
// aborts with its name.
inline PipelineResult run_pipeline(const std::string& config_path,
                                   std::ostream& log) {
  namespace fs = std::filesystem;
  KVConfig cfg = KVConfig::load(config_path);

  // --- config validation before any work ---
  DomainModel robot_dom, human_dom;
  ActionMapping mapping;
  ExpectationRules rules;
  std::vector<std::string> problem_files;
  std::string train_dir;
  bool have_training_csv = false;
  std::string training_csv_path;
  std::vector<GridPoint> grid;
  std::uint64_t seed = 0;
  int folds = 5;
  EvalParams eparams;
  std::string out_dir;
  try {
    robot_dom = parse_domain(read_file(cfg.path("robot_domain")));
    human_dom = parse_domain(read_file(cfg.path("human_domain")));
    mapping = ActionMapping::load(cfg.path("mapping"));
    rules = ExpectationRules::load(cfg.path("rules"));
    problem_files = sorted_files(cfg.path("problems_dir"), ".pddl");
    if (problem_files.empty()) throw DataError("problems_dir has no .pddl files");
    if (cfg.has("training_csv")) {
      have_training_csv = true;
      training_csv_path = cfg.path("training_csv");
    } else if (cfg.has("train_dir")) {
      train_dir = cfg.path("train_dir");
      if (!fs::is_directory(train_dir))
        throw DataError("train_dir is not a directory: " + train_dir);
    } else {
      throw DataError(
          "config needs a score source: train_dir (+rules) or training_csv");
    }
    grid = parse_grid_file(read_file(cfg.path("grid")),
                           cfg.get_or("kind", "all"));
    seed = static_cast<std::uint64_t>(cfg.get_int("seed", 0));
    folds = static_cast<int>(cfg.get_int("folds", 5));
    eparams.cost_bound_factor = cfg.get_double("cost_bound_factor", 2.0);
    if (eparams.cost_bound_factor < 1.0)
      throw DataError("cost_bound_factor must be >= 1");
    eparams.k_expected = static_cast<int>(cfg.get_int("k_expected", 16));
    eparams.node_budget = cfg.get_int("budget", 1000000);
    eparams.mode = link_mode_from_string(
        cfg.get_or("link_mode", "literal-adjacent"));
    eparams.composite = cfg.get_or("composite", "squared-sum") == "squared-norm"
                            ? CompositeKind::kSquaredNorm
                            : CompositeKind::kSquaredSum;
    out_dir = cfg.get("out_dir");  // relative to the invocation directory
  } catch (const Error& e) {
    throw PipelineError("config", e.what());
  }

  RunManifest manifest("pipeline");
  manifest.set_seed(seed);
  manifest.add_input(config_path);

  fs::create_directories(out_dir);
  fs::create_directories(fs::path(out_dir) / "anytime");
  fs::create_directories(fs::path(out_dir) / "plans");

  PipelineResult result;
  result.out_dir = out_dir;

  // --- featurize ---
  std::vector<LabeledSample> samples;
  try {
    if (have_training_csv) {
      samples = parse_samples_csv(read_file(training_csv_path));
      log << "featurize: loaded " << samples.size() << " samples from "
          << training_csv_path << "\n";
    } else {
      std::vector<std::string> groups;
      for (const auto& e : fs::directory_iterator(train_dir))
        if (e.is_directory()) groups.push_back(e.path().string());
      std::sort(groups.begin(), groups.end());
      if (groups.empty()) throw DataError("train_dir has no problem subdirectories");
      for (const std::string& group : groups) {
        const std::string stem = fs::path(group).filename().string();
        const std::string ppath =
            (fs::path(cfg.path("problems_dir")) / (stem + ".pddl")).string();
        if (!fs::exists(ppath))
          throw DataError("train group '" + stem + "' has no matching problem " +
                          ppath);
        LoadedProblem lp = load_problem_pair(robot_dom, human_dom, ppath);
        std::vector<Plan> plans;
        std::vector<double> scores;
        std::vector<std::string> provenance;
        for (const std::string& pf : sorted_files(group, ".plan")) {
          Plan plan = read_plan_file(lp.robot, pf);
          scores.push_back(rules.score(lp.robot, plan));
          plans.push_back(std::move(plan));
          provenance.push_back(pf);
        }
        if (plans.empty()) continue;
        auto group_samples = featurize_dataset(
            lp.robot, plans, lp.human, mapping, eparams.mode, scores,
            eparams.k_expected, eparams.composite, &provenance);
        samples.insert(samples.end(), group_samples.begin(),
                       group_samples.end());
      }
      log << "featurize: " << samples.size() << " samples from " << train_dir
          << "\n";
    }
    write_file((fs::path(out_dir) / "training-data.csv").string(),
               write_samples_csv(samples));
    manifest.add_output((fs::path(out_dir) / "training-data.csv").string());
  } catch (const Error& e) {
    throw PipelineError("featurize", e.what());
  }

  // --- grid search ---
  try {
    result.report = grid_search(samples, grid, folds, seed);
    write_file((fs::path(out_dir) / "grid-report.txt").string(),
               result.report.table());
    manifest.add_output((fs::path(out_dir) / "grid-report.txt").string());
    log << result.report.table();
  } catch (const Error& e) {
    throw PipelineError("grid_search", e.what());
  }

  // --- train winner on all samples ---
  RegressionModel model;
  try {
    const GridEntry& win = result.report.entries[result.report.winner];
    model = train(samples, win.point, seed);
    model.cv_r2 = win.mean_r2;
    save_model(model, (fs::path(out_dir) / "model.json").string());
    manifest.add_output((fs::path(out_dir) / "model.json").string());
    log << "train: " << win.point.describe()
        << " cv_r2=" << fmt_double(win.mean_r2) << "\n";
  } catch (const Error& e) {
    throw PipelineError("train", e.what());
  }

  // --- explicate + eval per problem ---
  for (const std::string& ppath : problem_files) {
    EvalOutcome outcome = evaluate_problem(robot_dom, human_dom, ppath,
                                           mapping, model, rules, eparams);
    if (!outcome.row.error.empty()) {
      result.eval_failures = true;
      result.rows.push_back(outcome.row);
      log << "explicate: " << outcome.row.problem << " FAILED: "
          << outcome.row.error << "\n";
      continue;
    }
    const std::string stem = outcome.row.problem;
    try {
      write_file((fs::path(out_dir) / "anytime" / (stem + ".csv")).string(),
                 write_anytime_csv(*outcome.stream));
      manifest.add_output(
          (fs::path(out_dir) / "anytime" / (stem + ".csv")).string());
      LoadedProblem lp = load_problem_pair(robot_dom, human_dom, ppath);
      write_plan_file(lp.robot, *outcome.best_plan,
                      (fs::path(out_dir) / "plans" / (stem + "-best.plan")).string());
      manifest.add_output(
          (fs::path(out_dir) / "plans" / (stem + "-best.plan")).string());
    } catch (const Error& e) {
      throw PipelineError("explicate", e.what());
    }
    result.rows.push_back(outcome.row);
    log << "explicate: " << stem << " opt_cost=" << outcome.row.opt_cost
        << " expl_cost=" << outcome.row.expl_cost
        << " opt_score=" << fmt_double(outcome.row.opt_score)
        << " expl_score=" << fmt_double(outcome.row.expl_score) << "\n";
  }

  try {
    write_file((fs::path(out_dir) / "eval.csv").string(),
               write_eval_csv(result.rows));
    manifest.add_output((fs::path(out_dir) / "eval.csv").string());
  } catch (const Error& e) {
    throw PipelineError("eval", e.what());
  }
  manifest.write((fs::path(out_dir) / "run-manifest.json").string());
  return result;
}

}  // namespace explan
