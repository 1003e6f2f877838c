// qmsvm command-line front end: train / predict / evaluate / benchmark /
// solve-qubo. Exit codes: 0 ok, 2 config error, 3 data error, 4 sampler or
// transport error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qmsvm/data.hpp"
#include "qmsvm/eval.hpp"
#include "qmsvm/model.hpp"
#include "qmsvm/pipeline.hpp"
#include "qmsvm/qubo.hpp"
#include "qmsvm/sampler.hpp"

namespace {

using namespace qmsvm;

struct PipelineFlags {
  int classes = 3;
  int bits = 2;
  double beta = 1.0;
  double mu = 1.0;
  double gamma = 1.0;
  std::size_t subset_size = 60;
  std::uint64_t num_reads = 1000;
  std::size_t solutions = 100;
  double multiplier = 10.0;
  double max_min_ratio = 15.0;  // <= 0 disables pruning
  std::string selection = "random";
  int kmeans_max_iter = 100;
  double kmeans_tol = 1e-6;
  std::string sampler = "sa";
  int sweeps = 100;
  double beta_hot = 0.0;   // 0 = tune per instance
  double beta_cold = 0.0;
  std::string remote_endpoint;
  double remote_timeout = 30.0;
  std::vector<std::string> remote_passthrough;
  std::uint64_t seed = 0;
  bool dedup = false;
};

void add_pipeline_flags(CLI::App& cmd, PipelineFlags& f) {
  cmd.add_option("--classes", f.classes, "Class count C");
  cmd.add_option("--bits", f.bits, "Bits per encoded variable B");
  cmd.add_option("--beta", f.beta, "Margin reward weight");
  cmd.add_option("--mu", f.mu, "Constraint penalty weight");
  cmd.add_option("--gamma", f.gamma, "Gaussian kernel parameter");
  cmd.add_option("--m,--subset-size", f.subset_size,
                 "Selected training examples M");
  cmd.add_option("--num-reads", f.num_reads, "Sampler reads");
  cmd.add_option("--s,--solutions", f.solutions,
                 "Solutions S kept for combination");
  cmd.add_option("--multiplier", f.multiplier, "Softmax accuracy multiplier");
  cmd.add_option("--max-min-ratio", f.max_min_ratio,
                 "Coefficient pruning ratio (<= 0 disables)");
  cmd.add_option("--selection", f.selection, "random|kmeans")
      ->check(CLI::IsMember({"random", "kmeans"}));
  cmd.add_option("--kmeans-max-iter", f.kmeans_max_iter, "k-means pass limit");
  cmd.add_option("--kmeans-tol", f.kmeans_tol,
                 "k-means centroid movement tolerance");
  cmd.add_option("--sampler", f.sampler, "exact|sa|remote|auto")
      ->check(CLI::IsMember({"exact", "sa", "remote", "auto"}));
  cmd.add_option("--sweeps", f.sweeps, "Annealing sweeps per read");
  cmd.add_option("--beta-hot", f.beta_hot,
                 "Initial inverse temperature (0 = auto)");
  cmd.add_option("--beta-cold", f.beta_cold,
                 "Final inverse temperature (0 = auto)");
  cmd.add_option("--remote-endpoint", f.remote_endpoint, "Solver service URL");
  cmd.add_option("--remote-timeout", f.remote_timeout, "Request timeout (s)");
  cmd.add_option("--remote-passthrough", f.remote_passthrough,
                 "key=value forwarded to the service (repeatable)");
  cmd.add_option("--seed", f.seed, "Master seed");
  cmd.add_flag("--dedup", f.dedup, "Count repeated reads once when ranking");
}

PipelineConfig to_pipeline_config(const PipelineFlags& f) {
  PipelineConfig cfg;
  cfg.selection.method = f.selection == "kmeans" ? SelectionMethod::kmeans
                                                 : SelectionMethod::random;
  cfg.selection.subset_size = f.subset_size;
  cfg.selection.kmeans_max_iter = f.kmeans_max_iter;
  cfg.selection.kmeans_tol = f.kmeans_tol;
  cfg.kernel.gamma = f.gamma;
  cfg.qubo.bits_per_var = f.bits;
  cfg.qubo.beta = f.beta;
  cfg.qubo.mu = f.mu;
  cfg.qubo.max_min_ratio =
      f.max_min_ratio > 0.0 ? std::optional<double>(f.max_min_ratio)
                            : std::nullopt;
  cfg.num_reads = f.num_reads;
  cfg.sweeps = f.sweeps;
  if (f.beta_hot > 0.0) cfg.beta_hot = f.beta_hot;
  if (f.beta_cold > 0.0) cfg.beta_cold = f.beta_cold;
  cfg.combine.max_solutions = f.solutions;
  cfg.combine.multiplier = f.multiplier;
  cfg.combine.dedup = f.dedup;
  cfg.seed = f.seed;

  const std::size_t dim = f.subset_size * static_cast<std::size_t>(f.classes) *
                          static_cast<std::size_t>(f.bits);
  if (f.sampler == "exact") {
    if (dim > kExactDimLimit)
      throw ConfigError("exact sampler capacity exceeded: M*C*B = " +
                        std::to_string(dim) + " > " +
                        std::to_string(kExactDimLimit));
    cfg.sampler = SamplerKind::exact;
  } else if (f.sampler == "auto") {
    cfg.sampler = dim <= 20 ? SamplerKind::exact : SamplerKind::sa;
  } else if (f.sampler == "remote") {
    cfg.sampler = SamplerKind::remote;
  } else {
    cfg.sampler = SamplerKind::sa;
  }

  if (cfg.sampler == SamplerKind::remote) {
    if (f.remote_endpoint.empty())
      throw ConfigError("remote sampler needs --remote-endpoint");
    cfg.remote.endpoint = f.remote_endpoint;
    cfg.remote.timeout_seconds = f.remote_timeout;
    for (const auto& kv : f.remote_passthrough) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0)
        throw ConfigError("bad --remote-passthrough '" + kv +
                          "', expected key=value");
      cfg.remote.passthrough[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
  }

  if (cfg.selection.method == SelectionMethod::kmeans &&
      f.subset_size % static_cast<std::size_t>(f.classes) != 0)
    throw ConfigError("M not divisible by C (M=" +
                      std::to_string(f.subset_size) +
                      ", C=" + std::to_string(f.classes) + ")");
  return cfg;
}

int resolve_label_column(const std::string& s) {
  if (s == "last") return kLastColumn;
  try {
    return std::stoi(s);
  } catch (const std::exception&) {
    throw ConfigError("bad label column '" + s + "', expected 'last' or index");
  }
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  PipelineFlags pipe;
  std::string data_path;
  std::string label_column = "last";
  std::string validation_path;
  std::string model_path = "qmsvm.model";
  std::size_t n_cap = 0;
  bool normalize = false;
};

Dataset cap_rows(const Dataset& d, std::size_t cap) {
  if (cap == 0 || cap >= d.size()) return d;
  Dataset out;
  out.num_classes = d.num_classes;
  out.class_names = d.class_names;
  out.features = Matrix(cap, d.num_features());
  out.labels.assign(d.labels.begin(), d.labels.begin() + cap);
  for (std::size_t r = 0; r < cap; ++r) {
    const auto src = d.features.row(r);
    std::copy(src.begin(), src.end(), out.features.row(r).begin());
  }
  return out;
}

int cmd_train(const TrainArgs& a) {
  const PipelineConfig cfg = to_pipeline_config(a.pipe);
  Dataset train = load_csv(a.data_path, resolve_label_column(a.label_column),
                           a.pipe.classes);
  train = cap_rows(train, a.n_cap);
  if (a.normalize) train = normalize_minmax(train);

  std::optional<Dataset> val;
  if (!a.validation_path.empty()) {
    val = load_csv(a.validation_path, resolve_label_column(a.label_column),
                   a.pipe.classes);
    if (a.normalize) val = normalize_minmax(*val);
  }

  const TrainOutcome out =
      train_pipeline(train, cfg, val ? &*val : nullptr);
  save_model(out.model, a.model_path);

  const auto phase = [](const char* name, const PhaseStats& s) {
    std::cout << name << ": " << format_double(s.seconds) << " s, "
              << s.kernel_evals << " kernel evals\n";
  };
  phase("selection", out.timing.selection);
  phase("sampling", out.timing.sampling);
  phase("combination", out.timing.combination);
  std::cout << "lowest energy: " << format_double(out.ground_energy) << '\n'
            << "best single accuracy: "
            << format_double(out.best_single_accuracy) << '\n'
            << "combined accuracy: " << format_double(out.combined_accuracy)
            << '\n'
            << "threshold: " << format_double(out.threshold) << " ("
            << out.survivors << " of " << out.solutions_ranked
            << " solutions kept)\n"
            << "model: " << a.model_path << '\n';
  return 0;
}

// ---------------------------------------------------------------- predict

struct PredictArgs {
  std::string model_path;
  std::string data_path;
  std::string label_column = "none";
  std::string output = "-";
  std::string raster;  // "WxH"
  std::string raster_out = "map.ppm";
  std::vector<std::string> palette;
};

Rgb default_color(int cls) {
  // Okabe-Ito colors, cycled
  static constexpr Rgb table[] = {
      {230, 159, 0}, {86, 180, 233}, {0, 158, 115},  {240, 228, 66},
      {0, 114, 178}, {213, 94, 0},   {204, 121, 167}, {153, 153, 153}};
  return table[static_cast<std::size_t>(cls) % std::size(table)];
}

int cmd_predict(const PredictArgs& a) {
  const TrainedModel model = load_model(a.model_path);
  Matrix X;
  if (a.label_column == "none") {
    X = load_features(a.data_path);
  } else {
    X = load_features(a.data_path, resolve_label_column(a.label_column));
  }
  const auto pred = predict(model, X);

  if (a.output == "-") {
    for (const int p : pred) std::cout << p << '\n';
  } else {
    write_predictions(pred, a.output);
  }

  if (!a.raster.empty()) {
    RasterSpec spec;
    const auto x = a.raster.find('x');
    try {
      if (x == std::string::npos) throw std::invalid_argument("no x");
      spec.width = std::stoi(a.raster.substr(0, x));
      spec.height = std::stoi(a.raster.substr(x + 1));
    } catch (const std::exception&) {
      throw ConfigError("bad --raster '" + a.raster + "', expected WxH");
    }
    for (int c = 0; c < model.num_classes; ++c)
      spec.palette[c] = default_color(c);
    for (const auto& p : a.palette) {
      int cls = 0, r = 0, g = 0, b = 0;
      if (std::sscanf(p.c_str(), "%d=%d,%d,%d", &cls, &r, &g, &b) != 4 ||
          r < 0 || r > 255 || g < 0 || g > 255 || b < 0 || b > 255)
        throw ConfigError("bad --palette '" + p + "', expected c=r,g,b");
      spec.palette[cls] = {static_cast<std::uint8_t>(r),
                           static_cast<std::uint8_t>(g),
                           static_cast<std::uint8_t>(b)};
    }
    export_map(pred, spec, a.raster_out);
    std::cerr << "raster: " << a.raster_out << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string pred_path;
  std::string truth_path;
  int classes = 0;  // 0 = infer
  std::string dataset_name = "data";
  std::size_t m = 0;
  std::string output = "-";
};

int cmd_evaluate(const EvaluateArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto pred = read_predictions(a.pred_path);
  const auto truth = read_predictions(a.truth_path);
  if (pred.size() != truth.size())
    throw DataError("evaluate: " + std::to_string(pred.size()) +
                    " predictions vs " + std::to_string(truth.size()) +
                    " truth labels");
  int c = a.classes;
  if (c == 0) {
    for (const int v : pred) c = std::max(c, v + 1);
    for (const int v : truth) c = std::max(c, v + 1);
  }
  const Confusion conf(pred, truth, c);
  MetricsRow row;
  row.dataset = a.dataset_name;
  row.n = pred.size();
  row.m = a.m;
  row.accuracy = conf.accuracy();
  row.f1 = conf.macro_f1();
  row.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  if (a.output == "-") {
    write_metrics_csv(std::cout, {&row, 1});
  } else {
    std::ofstream out(a.output);
    if (!out) throw DataError("evaluate: cannot write '" + a.output + "'");
    write_metrics_csv(out, {&row, 1});
  }
  return 0;
}

// ---------------------------------------------------------------- benchmark

struct BenchmarkArgs {
  PipelineFlags pipe;
  std::vector<std::size_t> sizes{1000, 2000, 4000};
  std::size_t test_size = 500;
  int reps = 3;
  int features = 2;
  double separation = 5.0;
  double stddev = 1.0;
  std::uint64_t data_seed = 1;
  std::string output = "-";
};

int cmd_benchmark(const BenchmarkArgs& a) {
  BenchmarkConfig cfg;
  cfg.pipeline = to_pipeline_config(a.pipe);
  cfg.sizes = a.sizes;
  cfg.test_size = a.test_size;
  cfg.repetitions = a.reps;
  cfg.blob_classes = a.pipe.classes;
  cfg.blob_features = a.features;
  cfg.blob_separation = a.separation;
  cfg.blob_stddev = a.stddev;
  cfg.data_seed = a.data_seed;
  const auto reports = run_benchmark(cfg);
  if (a.output == "-") {
    write_timing_csv(std::cout, reports);
  } else {
    std::ofstream out(a.output);
    if (!out) throw DataError("benchmark: cannot write '" + a.output + "'");
    write_timing_csv(out, reports);
  }
  return 0;
}

// ---------------------------------------------------------------- solve-qubo

struct SolveArgs {
  PipelineFlags pipe;
  std::string qubo_path;
  std::string output = "-";
};

int cmd_solve_qubo(const SolveArgs& a) {
  const QuboProblem q = load_qubo(a.qubo_path);
  SampleSet ss;
  if (a.pipe.sampler == "exact") {
    ss = solve_exact(q);
  } else if (a.pipe.sampler == "remote") {
    RemoteConfig rc;
    if (a.pipe.remote_endpoint.empty())
      throw ConfigError("remote sampler needs --remote-endpoint");
    rc.endpoint = a.pipe.remote_endpoint;
    rc.timeout_seconds = a.pipe.remote_timeout;
    for (const auto& kv : a.pipe.remote_passthrough) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0)
        throw ConfigError("bad --remote-passthrough '" + kv + "'");
      rc.passthrough[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    ss = solve_remote(q, rc, a.pipe.num_reads);
  } else {
    AnnealConfig cfg = tuned_anneal_config(q, a.pipe.num_reads, a.pipe.sweeps,
                                           a.pipe.seed);
    if (a.pipe.beta_hot > 0.0) cfg.beta_hot = a.pipe.beta_hot;
    if (a.pipe.beta_cold > 0.0) cfg.beta_cold = a.pipe.beta_cold;
    ss = solve_sa(q, cfg);
  }

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (a.output != "-") {
    file.open(a.output);
    if (!file) throw DataError("solve-qubo: cannot write '" + a.output + "'");
    out = &file;
  }
  for (const auto& s : ss.samples) {
    *out << format_double(s.energy) << ' ' << s.occurrences << ' ';
    for (const auto b : s.bits) *out << int(b);
    *out << '\n';
  }
  return 0;
}

// ------------------------------------------------------- config injection

std::string find_config_path(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  if (const char* env = std::getenv("QMSVM_CONFIG")) return env;
  return {};
}

// Flat `key = value` file; keys matching an option of the invoked subcommand
// are injected before the command-line flags, so explicit flags win.
std::vector<std::pair<std::string, std::string>> read_config_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  std::size_t line_no = 0;
  const auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return std::string();
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(line_no) +
                        ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config: line " + std::to_string(line_no) +
                        ": empty key");
    kv.emplace_back(key, value);
  }
  return kv;
}

std::vector<std::string> merge_config(CLI::App& app,
                                      std::vector<std::string> args) {
  const std::string path = find_config_path(args);

  // handled here, not by the parser
  for (std::size_t i = 0; i < args.size();) {
    if (args[i] == "--config") {
      args.erase(args.begin() + i,
                 args.begin() + std::min(i + 2, args.size()));
    } else if (args[i].rfind("--config=", 0) == 0) {
      args.erase(args.begin() + i);
    } else {
      ++i;
    }
  }
  if (path.empty()) return args;
  const auto kv = read_config_file(path);

  // locate the subcommand token
  std::size_t sub_at = args.size();
  CLI::App* sub = nullptr;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (!args[i].empty() && args[i][0] != '-') {
      sub = app.get_subcommand_no_throw(args[i]);
      if (sub) sub_at = i;
      break;
    }
  }
  if (!sub) return args;

  std::vector<std::string> inject;
  for (const auto& [key, value] : kv) {
    const std::string flag = "--" + key;
    const CLI::Option* opt = sub->get_option_no_throw(flag);
    if (!opt) continue;  // not for this command
    bool overridden = false;
    // any spelling of the option on the command line wins over the file
    for (const auto& lname : opt->get_lnames()) {
      const std::string spelled = "--" + lname;
      for (const auto& a : args)
        if (a == spelled || a.rfind(spelled + "=", 0) == 0) {
          overridden = true;
          break;
        }
      if (overridden) break;
    }
    if (!overridden) inject.push_back(flag + "=" + value);
  }
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(sub_at) + 1,
              inject.begin(), inject.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiclass SVM trained as a QUBO via pluggable samplers"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path,
                 "Flat key=value config file (env: QMSVM_CONFIG)");

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand(
      "train", "Select a subset, build and sample the QUBO, combine, save");
  add_pipeline_flags(*train_cmd, train_args.pipe);
  train_cmd->add_option("--data", train_args.data_path, "Training CSV")
      ->required();
  train_cmd->add_option("--label-column", train_args.label_column,
                        "'last' or 0-based index");
  train_cmd->add_option("--validation", train_args.validation_path,
                        "Validation CSV (default: training set)");
  train_cmd->add_option("--model", train_args.model_path, "Model output path");
  train_cmd->add_option("--n-cap", train_args.n_cap,
                        "Use only the first N rows (0 = all)");
  train_cmd->add_flag("--normalize", train_args.normalize,
                      "Min-max scale features to [0,1]");

  PredictArgs predict_args;
  auto* predict_cmd =
      app.add_subcommand("predict", "Classify feature rows with a model");
  predict_cmd->add_option("--model", predict_args.model_path, "Model path")
      ->required();
  predict_cmd->add_option("--data", predict_args.data_path, "Feature CSV")
      ->required();
  predict_cmd->add_option("--label-column", predict_args.label_column,
                          "'none', 'last', or index of a column to drop");
  predict_cmd->add_option("--output", predict_args.output,
                          "Predictions path ('-' = stdout)");
  predict_cmd->add_option("--raster", predict_args.raster,
                          "Also draw a WxH class map");
  predict_cmd->add_option("--raster-out", predict_args.raster_out,
                          "PPM output path");
  predict_cmd->add_option("--palette", predict_args.palette,
                          "c=r,g,b color override (repeatable)");

  EvaluateArgs eval_args;
  auto* eval_cmd =
      app.add_subcommand("evaluate", "Accuracy and macro-F1 of predictions");
  eval_cmd->add_option("--pred", eval_args.pred_path, "Predictions file")
      ->required();
  eval_cmd->add_option("--truth", eval_args.truth_path, "Truth labels file")
      ->required();
  eval_cmd->add_option("--classes", eval_args.classes,
                       "Class count (0 = infer)");
  eval_cmd->add_option("--dataset-name", eval_args.dataset_name,
                       "Name echoed in the CSV");
  eval_cmd->add_option("--m", eval_args.m, "Subset size echoed in the CSV");
  eval_cmd->add_option("--output", eval_args.output,
                       "Metrics CSV path ('-' = stdout)");

  BenchmarkArgs bench_args;
  auto* bench_cmd = app.add_subcommand(
      "benchmark", "Phase timing and kernel counters over training sizes");
  add_pipeline_flags(*bench_cmd, bench_args.pipe);
  bench_cmd->add_option("--sizes", bench_args.sizes, "Training sizes")
      ->delimiter(',');
  bench_cmd->add_option("--test-size", bench_args.test_size,
                        "Held-out example count");
  bench_cmd->add_option("--reps", bench_args.reps,
                        "Repetitions per size (median reported)");
  bench_cmd->add_option("--features", bench_args.features, "Blob features");
  bench_cmd->add_option("--separation", bench_args.separation,
                        "Blob mean separation");
  bench_cmd->add_option("--stddev", bench_args.stddev, "Blob spread");
  bench_cmd->add_option("--data-seed", bench_args.data_seed,
                        "Synthetic data seed");
  bench_cmd->add_option("--output", bench_args.output,
                        "Timing CSV path ('-' = stdout)");

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand(
      "solve-qubo", "Run a sampler on a QUBO text file");
  add_pipeline_flags(*solve_cmd, solve_args.pipe);
  solve_cmd->add_option("--qubo", solve_args.qubo_path, "QUBO text file")
      ->required();
  solve_cmd->add_option("--output", solve_args.output,
                        "Samples path ('-' = stdout)");

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = merge_config(app, args);
    // CLI11 consumes arguments in reverse
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints message/usage; help gives 0
    return code == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "qmsvm: " << e.what() << '\n';
    return 2;
  }

  try {
    if (train_cmd->parsed()) return cmd_train(train_args);
    if (predict_cmd->parsed()) return cmd_predict(predict_args);
    if (eval_cmd->parsed()) return cmd_evaluate(eval_args);
    if (bench_cmd->parsed()) return cmd_benchmark(bench_args);
    if (solve_cmd->parsed()) return cmd_solve_qubo(solve_args);
  } catch (const ConfigError& e) {
    std::cerr << "qmsvm: " << e.what() << '\n';
    return 2;
  } catch (const DataError& e) {
    std::cerr << "qmsvm: " << e.what() << '\n';
    return 3;
  } catch (const SamplerError& e) {
    std::cerr << "qmsvm: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "qmsvm: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
