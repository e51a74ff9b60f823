#include "oarc_cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "oarc/content_mod.hpp"
#include "oarc/fluid.hpp"
#include "oarc/markov_tree.hpp"
#include "oarc/schedulers.hpp"
#include "oarc/simulator.hpp"
#include "oarc/ski_rental.hpp"
#include "oarc/version.hpp"

namespace oarc::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Expands --config (a JSON config, or a manifest written by a previous run
// with its options under "options") into command-line arguments for every
// option the user did not pass explicitly. Runs before parsing so required
// options can be satisfied from the file.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("--config: cannot open " + path);
  json doc = json::parse(in);
  if (doc.contains("options")) doc = doc["options"];

  auto user_passed = [&args](const std::string& key) {
    const std::string flag = "--" + key;
    for (const auto& a : args)
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
  };

  std::vector<std::string> out = args;
  for (const auto& [key, value] : doc.items()) {
    if (key == "config" || user_passed(key)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) out.push_back("--" + key);
      continue;
    }
    auto push_one = [&out, &key](const json& v) {
      out.push_back("--" + key);
      out.push_back(v.is_string() ? v.get<std::string>() : v.dump());
    };
    if (value.is_array())
      for (const auto& v : value) push_one(v);
    else
      push_one(value);
  }
  return out;
}

// Collects the effective value of every named option for the manifest.
json manifest_options(const CLI::App* cmd) {
  json out;
  for (const CLI::Option* opt : cmd->get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name == "config") continue;
    if (opt->get_expected_max() == 0) {  // flag
      out[name] = opt->count() > 0;
      continue;
    }
    const auto& results = opt->results();
    if (results.empty()) continue;
    if (results.size() == 1) out[name] = results.front();
    else out[name] = results;
  }
  return out;
}

void write_manifest(const CLI::App* cmd, const std::string& subcommand,
                    const fs::path& next_to) {
  json doc;
  doc["tool"] = "oarc";
  doc["version"] = kVersion;
  doc["subcommand"] = subcommand;
  doc["options"] = manifest_options(cmd);
  fs::path path = next_to;
  path += ".manifest.json";
  std::ofstream out(path);
  out << doc.dump(2) << "\n";
}

std::string manifest_comment(const CLI::App* cmd, const std::string& subcommand) {
  json doc;
  doc["tool"] = "oarc";
  doc["version"] = kVersion;
  doc["subcommand"] = subcommand;
  doc["options"] = manifest_options(cmd);
  return doc.dump();
}

std::vector<double> parse_ratios(const std::string& spec) {
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    double start = 0.0, step = 0.0, stop = 0.0;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &start, &step, &stop) != 3 || step <= 0.0)
      throw CLI::ValidationError("--ratios", "expected start:step:stop");
    for (double r = start; r <= stop + 1e-12; r += step) out.push_back(r);
    return out;
  }
  std::istringstream in(spec);
  std::string tok;
  while (std::getline(in, tok, ',')) out.push_back(std::stod(tok));
  if (out.empty()) throw CLI::ValidationError("--ratios", "empty list");
  return out;
}

std::optional<PolicyKind> tree_policy_from_string(const std::string& name) {
  if (name == "oarc") return PolicyKind::OaRC;
  if (name == "cmu") return PolicyKind::InstantaneousCost;
  if (name == "cmutheta") return PolicyKind::ExpectedRemainingCost;
  if (name == "fifo") return PolicyKind::Fifo;
  if (name == "random") return PolicyKind::Random;
  return std::nullopt;
}

Policy make_tree_policy(const std::string& name, const MarkovTree& tree,
                        double lambda, double mu) {
  const auto kind = tree_policy_from_string(name);
  if (!kind) {
    throw CLI::ValidationError(
        "--policy", name + " is not a tree policy (use oarc|cmu|cmutheta|fifo|random; "
                           "content policies run under `sweep`)");
  }
  if (*kind == PolicyKind::OaRC) {
    const auto gamma = optimal_gamma(tree, lambda, mu);
    return builtin(PolicyKind::OaRC, tree, &gamma.table);
  }
  return builtin(*kind, tree);
}

struct OutStream {
  std::ofstream file;
  std::ostream* out = &std::cout;
  explicit OutStream(const std::string& path) {
    if (!path.empty()) {
      file.open(path);
      if (!file) throw CLI::ValidationError("--out", "cannot write " + path);
      out = &file;
    }
  }
  std::ostream& get() { return *out; }
};

// --- subcommand bodies ----------------------------------------------------

int run_fluid_solve(CLI::App* cmd, const std::string& tree_path, double lambda,
                    double mu, const std::vector<StateId>& ordering_ids,
                    const std::string& out_path) {
  const auto tree = load_tree(tree_path);
  const auto issues = validate(tree);
  for (const auto& issue : issues.issues)
    std::cerr << "warning: state " << issue.state << ": " << issue.message << "\n";

  const auto gamma = optimal_gamma(tree, lambda, mu);
  const double dual = mu * gamma.gamma_star +
                      lambda * (future_cost(tree)[static_cast<std::size_t>(tree.root())] -
                                gamma.table.value[static_cast<std::size_t>(tree.root())]);

  PriorityOrdering ordering;
  if (!ordering_ids.empty()) {
    ordering.order = ordering_ids;
  } else {
    ordering.order = index_order(gamma.table.index);
  }
  const auto eq = water_fill(tree, lambda, mu, ordering);
  const double cost = fluid_cost(tree, eq);

  OutStream os(out_path);
  auto& out = os.get();
  out << "# manifest: " << manifest_comment(cmd, "fluid-solve") << "\n";
  out << "# gamma_star=" << fmt(gamma.gamma_star) << " dual=" << fmt(dual)
      << " objective=" << fmt(gamma.objective) << " segment=[" << fmt(gamma.segment_lo)
      << "," << fmt(gamma.segment_hi) << "]\n";
  out << "state,cost,Vf,index,beta\n";
  for (StateId i = 0; i < tree.size(); ++i) {
    const auto ii = static_cast<std::size_t>(i);
    out << i << ',' << fmt(tree.cost(i)) << ',' << fmt(gamma.table.future[ii]) << ','
        << fmt(gamma.table.index[ii]) << ',' << fmt(gamma.table.beta[ii]) << "\n";
  }
  out << "\nstate,label,q,nu\n";
  for (StateId i = 0; i < tree.size(); ++i) {
    const auto ii = static_cast<std::size_t>(i);
    out << i << ',' << to_string(eq.label[ii]) << ',' << fmt(eq.q[ii]) << ','
        << fmt(eq.nu[ii]) << "\n";
  }
  out << "# m=" << eq.m << " partial="
      << (eq.partial == kNoState ? std::string("-") : std::to_string(eq.partial))
      << " kappa=" << (eq.partial == kNoState ? std::string("inf") : fmt(eq.kappa))
      << " cost=" << fmt(cost) << " gamma_star=" << fmt(gamma.gamma_star) << "\n";
  if (!out_path.empty()) write_manifest(cmd, "fluid-solve", out_path);
  return 0;
}

int run_simulate(CLI::App* cmd, const std::string& tree_path, const std::string& policy_name,
                 const SimConfig& config, bool with_regret, const std::string& out_path,
                 const std::string& trace_path) {
  const auto tree = load_tree(tree_path);
  const auto policy = make_tree_policy(policy_name, tree, config.lambda, config.mu);
  SimConfig c = config;
  c.record_trace = !trace_path.empty();
  const auto metrics = run(tree, c, policy);

  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw CLI::ValidationError("--out", "cannot write " + out_path);
    out << "# manifest: " << manifest_comment(cmd, "simulate") << "\n";
    out << "replication,period,total_cost,served,queue_len\n";
    for (const auto& row : metrics.periods)
      out << row.replication << ',' << row.period << ',' << fmt(row.total_cost) << ','
          << row.served << ',' << row.queue_len << "\n";
    write_manifest(cmd, "simulate", out_path);
  }
  if (!trace_path.empty()) {
    std::ofstream out(trace_path);
    if (!out) throw CLI::ValidationError("--trace", "cannot write " + trace_path);
    out << "# manifest: " << manifest_comment(cmd, "simulate") << "\n";
    out << "replication,period,state,queue,served\n";
    for (const auto& row : metrics.trace)
      out << row.replication << ',' << row.period << ',' << row.state << ','
          << row.queue << ',' << row.served << "\n";
  }

  std::cout << "avg_cost," << fmt(metrics.avg_cost) << "\n";
  std::cout << "avg_cost_se," << fmt(metrics.avg_cost_se) << "\n";
  if (metrics.theta == 0.0)
    std::cerr << "note: theta = 0; long-run averages may depend on the initial state\n";
  if (with_regret) {
    const auto cs = c_star(tree, config.lambda, config.mu);
    const auto r = regret(metrics, config.n, cs.value);
    std::cout << "c_star," << fmt(cs.value) << "\n";
    std::cout << "regret," << fmt(r.value) << "\n";
    std::cout << "regret_se," << fmt(r.se) << "\n";
  }
  return 0;
}

int run_gen_data(CLI::App* cmd, const std::string& kind, const std::string& out_path,
                 std::uint64_t seed, int campaigns, int ads_per_campaign, int count,
                 int horizon, const std::string& train_out, const std::string& test_out,
                 std::uint64_t split_seed) {
  TrajectoryDataset ds;
  if (kind == "ads") {
    AdsConfig c;
    c.campaigns = campaigns;
    c.ads_per_campaign = ads_per_campaign;
    if (horizon > 0) c.horizon = horizon;
    else c.horizon = 100;
    ds = gen_ads(c, seed);
  } else if (kind == "ugc") {
    UgcConfig c;
    c.count = count;
    if (horizon > 0) c.horizon = horizon;
    else c.horizon = 200;
    ds = gen_ugc(c, seed);
  } else {
    throw CLI::ValidationError("kind", "expected ads or ugc");
  }
  const auto comment = manifest_comment(cmd, "gen-data");
  save_dataset(ds, out_path, comment);
  write_manifest(cmd, "gen-data", out_path);
  if (!train_out.empty() || !test_out.empty()) {
    if (train_out.empty() || test_out.empty())
      throw CLI::ValidationError("--train-out", "need both --train-out and --test-out");
    auto [train, test] = split_dataset(ds, split_seed);
    save_dataset(train, train_out, comment);
    save_dataset(test, test_out, comment);
  }
  std::cout << "records," << ds.records.size() << "\n";
  return 0;
}

int run_train(CLI::App* cmd, const std::string& data_path, double gamma_percentile_pct,
              const std::string& model_path, int trees, int depth, double learning_rate,
              int min_leaf) {
  const auto train = load_dataset(data_path, /*zero_fill=*/true);
  ForestConfig fc;
  fc.trees = trees;
  fc.max_depth = depth;
  fc.learning_rate = learning_rate;
  fc.min_samples_leaf = min_leaf;
  const auto bundle = train_models(train, gamma_percentile_pct, fc);
  bundle.save(model_path);
  write_manifest(cmd, "train", model_path);
  std::cout << "gamma_star," << fmt(bundle.gamma_star) << "\n";
  std::cout << "capped_mse," << fmt(bundle.capped.training_mse()) << "\n";
  std::cout << "uncapped_mse," << fmt(bundle.uncapped.training_mse()) << "\n";
  return 0;
}

int run_sweep(CLI::App* cmd, const std::string& data_path, const std::string& model_path,
              const std::string& policies_arg, const std::string& ratios_arg,
              const ContentSimConfig& config, double epsilon, std::uint64_t perturb_seed,
              std::uint64_t seed, const std::string& out_path) {
  auto test = load_dataset(data_path, /*zero_fill=*/true);
  if (epsilon > 0.0) test = perturb_pviolating(test, epsilon, perturb_seed);

  std::vector<ContentPolicy> policies;
  {
    std::istringstream in(policies_arg);
    std::string tok;
    while (std::getline(in, tok, ',')) {
      const auto p = content_policy_from_string(tok);
      if (!p)
        throw CLI::ValidationError("--policies",
                                   tok + " is not a content policy "
                                         "(pviolating|velocity|piv|oarch)");
      policies.push_back(*p);
    }
  }
  if (policies.empty()) throw CLI::ValidationError("--policies", "empty list");
  const auto ratios = parse_ratios(ratios_arg);

  std::optional<ModelBundle> models;
  const bool needs_models =
      std::any_of(policies.begin(), policies.end(), [](ContentPolicy p) {
        return p == ContentPolicy::PIv || p == ContentPolicy::OarcH;
      });
  if (needs_models) {
    if (model_path.empty())
      throw CLI::ValidationError("--model", "piv/oarch policies need a trained model");
    models = ModelBundle::load(model_path);
  }

  const auto points =
      sweep(config, test, policies, ratios, models ? &*models : nullptr, seed);

  OutStream os(out_path);
  auto& out = os.get();
  out << "# manifest: " << manifest_comment(cmd, "sweep") << "\n";
  out << "policy,ratio,vioviews,pvioviews,iv,reviews\n";
  for (const auto& p : points)
    out << to_string(p.policy) << ',' << fmt(p.ratio) << ',' << fmt(p.vioviews) << ','
        << fmt(p.pvioviews) << ',' << fmt(p.iv) << ',' << fmt(p.reviews) << "\n";
  if (!out_path.empty()) write_manifest(cmd, "sweep", out_path);
  return 0;
}

int run_report(CLI::App* cmd, const std::string& sweep_path, const std::string& better_name,
               const std::string& out_path) {
  std::ifstream in(sweep_path);
  if (!in) throw CLI::ValidationError("--sweep", "cannot open " + sweep_path);
  std::vector<SweepPoint> points;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::istringstream ls(line);
    std::string policy, cell;
    SweepPoint p;
    std::getline(ls, policy, ',');
    const auto kind = content_policy_from_string(policy);
    if (!kind) throw CLI::ValidationError("--sweep", "unknown policy " + policy);
    p.policy = *kind;
    std::getline(ls, cell, ',');
    p.ratio = std::stod(cell);
    std::getline(ls, cell, ',');
    p.vioviews = std::stod(cell);
    points.push_back(p);
  }
  const auto better = content_policy_from_string(better_name);
  if (!better) throw CLI::ValidationError("--better", "unknown policy " + better_name);
  const auto rows = reviewer_hour_savings(points, *better);

  OutStream os(out_path);
  auto& out = os.get();
  out << "# manifest: " << manifest_comment(cmd, "report") << "\n";
  out << "policy,ratio,savings\n";
  for (const auto& row : rows) {
    out << to_string(row.policy) << ',' << fmt(row.ratio) << ',';
    if (row.savings) out << fmt(*row.savings);
    else out << "none";
    out << "\n";
  }
  if (!out_path.empty()) write_manifest(cmd, "report", out_path);
  return 0;
}

int run_regret_scaling(CLI::App* cmd, const std::string& tree_path,
                       const std::string& sizes_arg, double lambda, double mu, int horizon,
                       int reps, std::uint64_t seed, int threads,
                       const std::string& out_path) {
  const auto tree = load_tree(tree_path);
  std::vector<int> sizes;
  {
    std::istringstream in(sizes_arg);
    std::string tok;
    while (std::getline(in, tok, ',')) sizes.push_back(std::stoi(tok));
  }
  if (sizes.empty()) throw CLI::ValidationError("--n", "empty list");

  const auto cs = c_star(tree, lambda, mu);
  const auto gamma = optimal_gamma(tree, lambda, mu);
  const auto policy = builtin(PolicyKind::OaRC, tree, &gamma.table);

  std::vector<double> log_n, log_regret;
  OutStream os(out_path);
  auto& out = os.get();
  out << "# manifest: " << manifest_comment(cmd, "regret-scaling") << "\n";
  out << "n,regret,se,regret_per_n\n";
  for (int n : sizes) {
    SimConfig c;
    c.n = n;
    c.lambda = lambda;
    c.mu = mu;
    c.horizon = horizon;
    c.seed = seed;
    c.replications = reps;
    c.threads = threads;
    const auto metrics = run(tree, c, policy);
    const auto r = regret(metrics, n, cs.value);
    out << n << ',' << fmt(r.value) << ',' << fmt(r.se) << ','
        << fmt(r.value / static_cast<double>(n)) << "\n";
    if (r.value > 0.0) {
      log_n.push_back(std::log(static_cast<double>(n)));
      log_regret.push_back(std::log(r.value));
    }
  }
  double slope = std::numeric_limits<double>::quiet_NaN();
  if (log_n.size() >= 2) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < log_n.size(); ++i) {
      mx += log_n[i];
      my += log_regret[i];
    }
    mx /= static_cast<double>(log_n.size());
    my /= static_cast<double>(log_n.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < log_n.size(); ++i) {
      sxy += (log_n[i] - mx) * (log_regret[i] - my);
      sxx += (log_n[i] - mx) * (log_n[i] - mx);
    }
    slope = sxy / sxx;
  }
  out << "# loglog_slope=" << fmt(slope) << "\n";
  if (!out_path.empty()) write_manifest(cmd, "regret-scaling", out_path);
  return 0;
}

}  // namespace

int dispatch(int argc, const char* const* argv) {
  CLI::App app{"Scheduling with uncertain Markovian holding costs: index "
               "policies, fluid bounds, a queueing simulator and a content "
               "review experiment layer"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  // Shared storage; only the active subcommand reads them.
  std::string tree_path, out_path, trace_path, data_path, model_path, sweep_path;
  std::string policy_name = "oarc", policies_arg = "oarch,velocity,piv,pviolating";
  std::string ratios_arg = "0.01:0.005:0.20", sizes_arg = "50,100,200,400";
  std::string better_name = "oarch", config_path, ordering_arg, train_out, test_out;
  double lambda = 0.5, mu = 0.5, gamma_pct = 99.0, epsilon = 0.0;
  double sweep_lambda = 0.1;
  std::uint64_t seed = 1, split_seed = 1, perturb_seed = 1;
  int n = 1000, horizon = 1000, warmup = -1, reps = 10, threads = 0;
  int sweep_horizon = 500;
  int campaigns = 5000, ads_per_campaign = 5, count = 20000, data_horizon = 0;
  int trees = 100, depth = 10, min_leaf = 8;
  double learning_rate = 0.2;
  bool with_regret = false;

  auto add_config = [&config_path](CLI::App* cmd) {
    cmd->add_option("--config", config_path,
                    "JSON config or a manifest written by a previous run; "
                    "explicit flags override it");
  };

  CLI::App* fluid_cmd = app.add_subcommand(
      "fluid-solve", "Capacity price, index table and water-filled equilibrium");
  fluid_cmd->add_option("--tree", tree_path, "tree file (text or .json)")->required();
  fluid_cmd->add_option("--lambda", lambda, "arrival rate in (0,1)")->required();
  fluid_cmd->add_option("--mu", mu, "service rate in [0,1]")->required();
  fluid_cmd->add_option("--ordering", ordering_arg,
                        "comma-separated state ids, highest priority first "
                        "(default: the price-based index order)");
  fluid_cmd->add_option("--out", out_path, "write CSV here instead of stdout");
  add_config(fluid_cmd);

  CLI::App* sim_cmd = app.add_subcommand("simulate", "Run the queueing simulator");
  sim_cmd->add_option("--tree", tree_path)->required();
  sim_cmd->add_option("--policy", policy_name, "oarc|cmu|cmutheta|fifo|random");
  sim_cmd->add_option("--n", n, "system size");
  sim_cmd->add_option("--lambda", lambda)->required();
  sim_cmd->add_option("--mu", mu)->required();
  sim_cmd->add_option("--t", horizon, "periods per replication");
  sim_cmd->add_option("--warmup", warmup, "periods excluded from averages (default t/5)");
  sim_cmd->add_option("--reps", reps, "replications");
  sim_cmd->add_option("--seed", seed);
  sim_cmd->add_option("--threads", threads, "0 = logical cores");
  sim_cmd->add_option("--out", out_path, "per-period metrics CSV");
  sim_cmd->add_option("--trace", trace_path, "per-state trace CSV");
  sim_cmd->add_flag("--regret", with_regret, "also print N*C* regret");
  add_config(sim_cmd);

  CLI::App* gen_cmd = app.add_subcommand("gen-data", "Generate a synthetic dataset");
  std::string gen_kind;
  gen_cmd->add_option("kind", gen_kind, "ads | ugc")->required();
  gen_cmd->add_option("--out", out_path, "dataset CSV")->required();
  gen_cmd->add_option("--seed", seed);
  gen_cmd->add_option("--campaigns", campaigns, "ads: campaign count");
  gen_cmd->add_option("--ads", ads_per_campaign, "ads: ads per campaign");
  gen_cmd->add_option("--count", count, "ugc: content count");
  gen_cmd->add_option("--horizon", data_horizon, "trajectory length (default 100/200)");
  gen_cmd->add_option("--train-out", train_out, "also write a split: training half");
  gen_cmd->add_option("--test-out", test_out, "also write a split: test half");
  gen_cmd->add_option("--split-seed", split_seed);
  add_config(gen_cmd);

  CLI::App* train_cmd = app.add_subcommand("train", "Fit the view regressors");
  train_cmd->add_option("--data", data_path, "training CSV")->required();
  train_cmd->add_option("--gamma-percentile", gamma_pct, "cap percentile of total views");
  train_cmd->add_option("--model", model_path, "output model container")->required();
  train_cmd->add_option("--trees", trees);
  train_cmd->add_option("--depth", depth);
  train_cmd->add_option("--learning-rate", learning_rate);
  train_cmd->add_option("--min-leaf", min_leaf, "minimum samples per leaf");
  add_config(train_cmd);

  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "Review-ratio sweep of content policies");
  sweep_cmd->add_option("--data", data_path, "test CSV")->required();
  sweep_cmd->add_option("--model", model_path, "model container (piv/oarch)");
  sweep_cmd->add_option("--policies", policies_arg, "comma list");
  sweep_cmd->add_option("--ratios", ratios_arg, "start:step:stop or comma list");
  sweep_cmd->add_option("--n", n);
  sweep_cmd->add_option("--lambda", sweep_lambda);
  sweep_cmd->add_option("--t", sweep_horizon);
  sweep_cmd->add_option("--reps", reps);
  sweep_cmd->add_option("--seed", seed);
  sweep_cmd->add_option("--threads", threads);
  sweep_cmd->add_option("--epsilon", epsilon, "calibration noise on pviolating");
  sweep_cmd->add_option("--perturb-seed", perturb_seed);
  sweep_cmd->add_option("--out", out_path, "sweep CSV");
  add_config(sweep_cmd);

  CLI::App* report_cmd =
      app.add_subcommand("report", "Reviewer-hour savings from a sweep CSV");
  report_cmd->add_option("--sweep", sweep_path, "sweep CSV")->required();
  report_cmd->add_option("--better", better_name, "policy credited with the savings");
  report_cmd->add_option("--out", out_path);
  add_config(report_cmd);

  CLI::App* scaling_cmd =
      app.add_subcommand("regret-scaling", "OaRC regret across system sizes");
  scaling_cmd->add_option("--tree", tree_path)->required();
  scaling_cmd->add_option("--n", sizes_arg, "comma list of system sizes");
  scaling_cmd->add_option("--lambda", lambda)->required();
  scaling_cmd->add_option("--mu", mu)->required();
  scaling_cmd->add_option("--t", horizon);
  scaling_cmd->add_option("--reps", reps);
  scaling_cmd->add_option("--seed", seed);
  scaling_cmd->add_option("--threads", threads);
  scaling_cmd->add_option("--out", out_path);
  add_config(scaling_cmd);

  try {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    args = expand_config(args);
    // CLI11 consumes arguments in reverse order.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    CLI::App* cmd = app.get_subcommands().front();

    if (cmd == fluid_cmd) {
      std::vector<StateId> ordering;
      if (!ordering_arg.empty()) {
        std::istringstream in(ordering_arg);
        std::string tok;
        while (std::getline(in, tok, ',')) ordering.push_back(std::stoi(tok));
      }
      return run_fluid_solve(cmd, tree_path, lambda, mu, ordering, out_path);
    }
    if (cmd == sim_cmd) {
      SimConfig c;
      c.n = n;
      c.lambda = lambda;
      c.mu = mu;
      c.horizon = horizon;
      c.warmup = warmup;
      c.seed = seed;
      c.replications = reps;
      c.threads = threads;
      return run_simulate(cmd, tree_path, policy_name, c, with_regret, out_path,
                          trace_path);
    }
    if (cmd == gen_cmd)
      return run_gen_data(cmd, gen_kind, out_path, seed, campaigns, ads_per_campaign,
                          count, data_horizon, train_out, test_out, split_seed);
    if (cmd == train_cmd)
      return run_train(cmd, data_path, gamma_pct, model_path, trees, depth,
                       learning_rate, min_leaf);
    if (cmd == sweep_cmd) {
      ContentSimConfig c;
      c.n = n;
      c.lambda = sweep_lambda;
      c.horizon = sweep_horizon;
      c.replications = reps;
      c.threads = threads;
      return run_sweep(cmd, data_path, model_path, policies_arg, ratios_arg, c, epsilon,
                       perturb_seed, seed, out_path);
    }
    if (cmd == report_cmd) return run_report(cmd, sweep_path, better_name, out_path);
    if (cmd == scaling_cmd)
      return run_regret_scaling(cmd, tree_path, sizes_arg, lambda, mu, horizon, reps,
                                seed, threads, out_path);
    return 2;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace oarc::cli
