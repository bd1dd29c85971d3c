// pdmp: learn movement primitives from demonstration CSVs, roll them out
// with uncertainty, and monitor executions for failures. Links the C API
// only; JSON/CLI parsing here is plumbing around it.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pdmp/pdmp.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitIncomplete = 3;

struct CliError {
  int code;
  std::string message;
};

[[noreturn]] void fail(int code, const std::string& message) {
  throw CliError{code, message};
}

void check(pdmp_status st, const std::string& context) {
  if (st == PDMP_OK) return;
  fail(kExitInput, context + ": " + pdmp_last_error());
}

// ----- RAII wrappers over the C handles -----

struct TrajDeleter {
  void operator()(pdmp_trajectory* p) const { pdmp_trajectory_free(p); }
};
struct ModelDeleter {
  void operator()(pdmp_model* p) const { pdmp_model_free(p); }
};
struct RolloutDeleter {
  void operator()(pdmp_rollout* p) const { pdmp_rollout_free(p); }
};
struct ReportDeleter {
  void operator()(pdmp_report* p) const { pdmp_report_free(p); }
};
struct InfoDeleter {
  void operator()(pdmp_training_info* p) const { pdmp_training_info_free(p); }
};

using TrajPtr = std::unique_ptr<pdmp_trajectory, TrajDeleter>;
using ModelPtr = std::unique_ptr<pdmp_model, ModelDeleter>;
using RolloutPtr = std::unique_ptr<pdmp_rollout, RolloutDeleter>;
using ReportPtr = std::unique_ptr<pdmp_report, ReportDeleter>;
using InfoPtr = std::unique_ptr<pdmp_training_info, InfoDeleter>;

TrajPtr read_trajectory(const std::string& path) {
  pdmp_trajectory* raw = nullptr;
  check(pdmp_trajectory_read_csv(path.c_str(), &raw), path);
  return TrajPtr(raw);
}

// ----- config file support: flags > config JSON > defaults -----

json load_config_file(const std::vector<std::string>& args) {
  for (size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] == "--config") {
      std::ifstream in(args[i + 1]);
      if (!in) fail(kExitInput, "cannot open config file: " + args[i + 1]);
      json j;
      try {
        in >> j;
      } catch (const json::exception& e) {
        fail(kExitInput, args[i + 1] + ": " + e.what());
      }
      if (!j.is_object()) fail(kExitInput, "config file must be a JSON object");
      return j;
    }
  }
  return json::object();
}

template <typename T>
void config_default(const json& cfg, const std::string& key, T& value) {
  if (cfg.contains(key)) {
    try {
      value = cfg.at(key).get<T>();
    } catch (const json::exception&) {
      fail(kExitInput, "config key '" + key + "' has the wrong type");
    }
  }
}

// FNV-1a over the canonical dump of the effective options.
std::string hash_of(const json& canonical) {
  const std::string s = canonical.dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

// ----- training options shared by train and eval -----

struct TrainFlags {
  int n_basis = 25;
  double alpha_z = 25.0;
  double beta_z = -1.0;
  double alpha_x = 2.0;
  double tau = 1.0;
  double prior_precision = 1e-6;
  bool fixed_noise = false;
  double noise_var = 1e-4;
  bool printed_a = false;
  int em_iters = 30;
  double em_tol = 1e-8;
  double threshold_multiplier = 2.0;
  int window = 1;
  std::uint64_t seed = 0;

  void add_options(CLI::App* cmd, const json& cfg) {
    config_default(cfg, "n_basis", n_basis);
    config_default(cfg, "alpha_z", alpha_z);
    config_default(cfg, "beta_z", beta_z);
    config_default(cfg, "alpha_x", alpha_x);
    config_default(cfg, "tau", tau);
    config_default(cfg, "prior_precision", prior_precision);
    config_default(cfg, "fixed_noise", fixed_noise);
    config_default(cfg, "noise_var", noise_var);
    config_default(cfg, "printed_a", printed_a);
    config_default(cfg, "em_iters", em_iters);
    config_default(cfg, "em_tol", em_tol);
    config_default(cfg, "threshold_multiplier", threshold_multiplier);
    config_default(cfg, "window", window);
    config_default(cfg, "seed", seed);
    cmd->add_option("--n-basis", n_basis, "RBF basis count")
        ->capture_default_str();
    cmd->add_option("--alpha-z", alpha_z, "attractor stiffness gain")
        ->capture_default_str();
    cmd->add_option("--beta-z", beta_z,
                    "attractor damping gain (negative: alpha_z/4)")
        ->capture_default_str();
    cmd->add_option("--alpha-x", alpha_x, "phase decay rate")
        ->capture_default_str();
    cmd->add_option("--tau", tau, "speed factor at fit time")
        ->capture_default_str();
    cmd->add_option("--prior-precision", prior_precision,
                    "weight prior precision (ridge lambda)")
        ->capture_default_str();
    cmd->add_flag("--fixed-noise", fixed_noise,
                  "use --noise-var as-is instead of evidence maximization");
    cmd->add_option("--noise-var", noise_var,
                    "forcing noise variance (initial or fixed)")
        ->capture_default_str();
    cmd->add_flag("--printed-a", printed_a,
                  "use the lagged-row discretization matrix");
    cmd->add_option("--em-iters", em_iters, "EM iteration cap")
        ->capture_default_str();
    cmd->add_option("--em-tol", em_tol, "EM loglik convergence tolerance")
        ->capture_default_str();
    cmd->add_option("--threshold-multiplier", threshold_multiplier,
                    "failure threshold = multiplier * training minimum")
        ->capture_default_str();
    cmd->add_option("--window", window, "loglik moving-average window")
        ->capture_default_str();
    cmd->add_option("--seed", seed, "seed recorded in artifacts")
        ->capture_default_str();
  }

  json canonical() const {
    json j;
    j["n_basis"] = n_basis;
    j["alpha_z"] = alpha_z;
    j["beta_z"] = beta_z;
    j["alpha_x"] = alpha_x;
    j["tau"] = tau;
    j["prior_precision"] = prior_precision;
    j["fixed_noise"] = fixed_noise;
    j["noise_var"] = noise_var;
    j["printed_a"] = printed_a;
    j["em_iters"] = em_iters;
    j["em_tol"] = em_tol;
    j["threshold_multiplier"] = threshold_multiplier;
    j["window"] = window;
    j["seed"] = seed;
    return j;
  }

  pdmp_train_options to_options(const std::string& label,
                                const std::string& config_hash) const {
    pdmp_train_options opts;
    pdmp_train_options_init(&opts);
    opts.n_basis = n_basis;
    opts.alpha_z = alpha_z;
    opts.beta_z = beta_z;
    opts.alpha_x = alpha_x;
    opts.tau = tau;
    opts.prior_precision = prior_precision;
    opts.evidence_noise = fixed_noise ? 0 : 1;
    opts.noise_var = noise_var;
    opts.printed_discretization = printed_a ? 1 : 0;
    opts.em_max_iters = em_iters;
    opts.em_tol = em_tol;
    opts.threshold_multiplier = threshold_multiplier;
    opts.smooth_window = window;
    opts.seed = seed;
    opts.label = label.c_str();
    opts.config_hash = config_hash.c_str();
    return opts;
  }
};

std::vector<std::string> list_csvs(const std::string& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) fail(kExitInput, "not a directory: " + dir);
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv")
      out.push_back(entry.path().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

void write_json_file(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(kExitInput, "cannot open for writing: " + path);
  out << j.dump(2) << "\n";
  if (!out) fail(kExitInput, "failed writing: " + path);
}

std::vector<double> parse_values(const std::string& csv, const char* what) {
  std::vector<double> out;
  if (csv.empty()) return out;
  std::stringstream ss(csv);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      fail(kExitInput, std::string(what) + ": not a number: '" + cell + "'");
    }
  }
  return out;
}

// ----- training core shared by cmd_train and cmd_eval -----

struct TrainOutcome {
  ModelPtr model;
  InfoPtr info;
};

TrainOutcome train_from_dir(const std::string& demo_dir,
                            const TrainFlags& flags, const std::string& label,
                            const std::string& config_hash) {
  const std::vector<std::string> files = list_csvs(demo_dir);
  if (files.empty()) fail(kExitInput, "no demo CSVs in " + demo_dir);
  std::vector<TrajPtr> demos;
  demos.reserve(files.size());
  std::vector<const pdmp_trajectory*> raw;
  for (const std::string& f : files) {
    demos.push_back(read_trajectory(f));
    raw.push_back(demos.back().get());
  }
  const pdmp_train_options opts = flags.to_options(label, config_hash);
  pdmp_model* model = nullptr;
  pdmp_training_info* info = nullptr;
  check(pdmp_train(raw.data(), static_cast<int>(raw.size()), &opts, &model,
                   &info),
        "training on " + demo_dir);
  return TrainOutcome{ModelPtr(model), InfoPtr(info)};
}

json training_report_json(const pdmp_model* model,
                          const pdmp_training_info* info,
                          const TrainFlags& flags,
                          const std::string& config_hash) {
  json rep;
  rep["format_version"] = 1;
  rep["kind"] = "pdmp_training_report";
  rep["seed"] = flags.seed;
  rep["config_hash"] = config_hash;
  rep["n_dofs"] = pdmp_model_dofs(model);
  rep["threshold"] = pdmp_model_threshold(model);
  rep["train_loglik_min"] = pdmp_model_train_loglik_min(model);
  std::vector<double> fit_rmse;
  std::vector<double> obs_noise;
  for (int k = 0; k < pdmp_model_dofs(model); ++k) {
    fit_rmse.push_back(pdmp_training_info_fit_rmse(info, k));
    obs_noise.push_back(pdmp_model_obs_noise(model, k));
  }
  rep["fit_rmse"] = fit_rmse;
  rep["obs_noise"] = obs_noise;
  rep["rollout_rmse"] = pdmp_training_info_rollout_rmse(info);
  rep["stroke_amplitude"] = pdmp_training_info_stroke_amplitude(info);
  int n = 0;
  pdmp_training_info_em_trace(info, nullptr, 0, &n);
  std::vector<double> trace(static_cast<size_t>(n));
  pdmp_training_info_em_trace(info, trace.data(), n, &n);
  rep["em_loglik_trace"] = trace;
  rep["em_iters"] = pdmp_training_info_em_iters(info);
  return rep;
}

// ----- commands -----

int cmd_gen_dataset(const std::string& templates, const std::string& out_root,
                    std::uint64_t seed, int n_train, int n_test) {
  json canonical;
  canonical["command"] = "gen-dataset";
  canonical["seed"] = seed;
  canonical["n_train"] = n_train;
  canonical["n_test"] = n_test;
  const std::string config_hash = hash_of(canonical);
  check(pdmp_dataset_generate(templates.c_str(), out_root.c_str(), seed,
                              n_train, n_test, config_hash.c_str()),
        "dataset generation");
  std::cout << "dataset written to " << out_root << " (seed " << seed
            << ", hash " << config_hash << ")\n";
  return kExitOk;
}

int cmd_train(const std::string& demo_dir, const std::string& model_path,
              const std::string& report_path, const std::string& label,
              const TrainFlags& flags) {
  json canonical = flags.canonical();
  canonical["command"] = "train";
  canonical["label"] = label;
  const std::string config_hash = hash_of(canonical);

  TrainOutcome out = train_from_dir(demo_dir, flags, label, config_hash);
  check(pdmp_model_save(out.model.get(), model_path.c_str()), model_path);
  if (!report_path.empty()) {
    write_json_file(
        training_report_json(out.model.get(), out.info.get(), flags,
                             config_hash),
        report_path);
  }
  std::cout << "model written to " << model_path << " (threshold "
            << pdmp_model_threshold(out.model.get()) << ")\n";
  return kExitOk;
}

int cmd_rollout(const std::string& model_path, const std::string& out_csv,
                int steps, double tau, const std::string& start_csv,
                const std::string& goal_csv) {
  pdmp_model* raw_model = nullptr;
  check(pdmp_model_load(model_path.c_str(), &raw_model), model_path);
  ModelPtr model(raw_model);

  const std::vector<double> start = parse_values(start_csv, "--start");
  const std::vector<double> goal = parse_values(goal_csv, "--goal");
  const int d = pdmp_model_dofs(model.get());
  if (!start.empty() && static_cast<int>(start.size()) != d)
    fail(kExitInput, "--start needs one value per DOF (" + std::to_string(d) +
                         ")");
  if (!goal.empty() && static_cast<int>(goal.size()) != d)
    fail(kExitInput, "--goal needs one value per DOF (" + std::to_string(d) +
                         ")");

  pdmp_rollout* raw_roll = nullptr;
  check(pdmp_rollout_run(model.get(), steps, tau,
                         start.empty() ? nullptr : start.data(),
                         goal.empty() ? nullptr : goal.data(), &raw_roll),
        "rollout");
  RolloutPtr roll(raw_roll);
  check(pdmp_rollout_write_csv(roll.get(), out_csv.c_str()), out_csv);
  std::cout << "rollout (" << pdmp_rollout_steps(roll.get())
            << " steps) written to " << out_csv << "\n";
  return kExitOk;
}

int cmd_monitor(const std::string& model_path, const std::string& obs_path,
                const std::string& report_path, const std::string& trace_path,
                int window) {
  pdmp_model* raw_model = nullptr;
  check(pdmp_model_load(model_path.c_str(), &raw_model), model_path);
  ModelPtr model(raw_model);
  TrajPtr obs = read_trajectory(obs_path);

  pdmp_report* raw_report = nullptr;
  check(pdmp_monitor_run(model.get(), obs.get(), window, &raw_report),
        "monitoring " + obs_path);
  ReportPtr report(raw_report);

  if (!report_path.empty())
    check(pdmp_report_save(report.get(), report_path.c_str()), report_path);
  if (!trace_path.empty()) {
    int n = 0;
    pdmp_report_loglik_trace(report.get(), nullptr, 0, &n);
    std::vector<double> trace(static_cast<size_t>(n));
    pdmp_report_loglik_trace(report.get(), trace.data(), n, &n);
    std::ofstream out(trace_path);
    if (!out) fail(kExitInput, "cannot open for writing: " + trace_path);
    out << "t,loglik\n";
    const double dt = pdmp_model_dt(model.get());
    out.precision(17);
    for (int j = 0; j < n; ++j)
      out << j * dt << "," << trace[static_cast<size_t>(j)] << "\n";
  }

  const bool failed = pdmp_report_failed(report.get()) != 0;
  std::cout << (failed ? "Failed" : "Nominal");
  if (failed)
    std::cout << " at step " << pdmp_report_failure_step(report.get());
  std::cout << " (min loglik " << pdmp_report_min_loglik(report.get())
            << ", threshold " << pdmp_report_threshold(report.get()) << ")\n";
  return kExitOk;
}

struct LetterStats {
  std::string letter;
  int n_test = 0;
  int false_positives = 0;
  int detections = 0;
  std::string error;  // non-empty: this letter failed
  int error_code = kExitInput;
};

LetterStats eval_letter(const std::string& root, const std::string& letter,
                        const std::string& models_dir, bool no_train,
                        const TrainFlags& flags, const std::string& config_hash,
                        double onset, double hold) {
  LetterStats stats;
  stats.letter = letter;

  const fs::path model_path = fs::path(models_dir) / (letter + ".json");
  ModelPtr model;
  if (fs::exists(model_path)) {
    pdmp_model* raw = nullptr;
    check(pdmp_model_load(model_path.string().c_str(), &raw),
          model_path.string());
    model.reset(raw);
  } else if (no_train) {
    fail(kExitIncomplete, "missing model for letter '" + letter + "'");
  } else {
    const fs::path train_dir = fs::path(root) / "letters" / letter / "train";
    TrainOutcome out =
        train_from_dir(train_dir.string(), flags, letter, config_hash);
    model = std::move(out.model);
    check(pdmp_model_save(model.get(), model_path.string().c_str()),
          model_path.string());
  }

  const fs::path test_dir = fs::path(root) / "letters" / letter / "test";
  for (const std::string& f : list_csvs(test_dir.string())) {
    TrajPtr obs = read_trajectory(f);
    ++stats.n_test;

    pdmp_report* raw_report = nullptr;
    check(pdmp_monitor_run(model.get(), obs.get(), flags.window, &raw_report),
          "monitoring " + f);
    ReportPtr nominal_report(raw_report);
    if (pdmp_report_failed(nominal_report.get())) ++stats.false_positives;

    pdmp_trajectory* raw_held = nullptr;
    check(pdmp_trajectory_hold(obs.get(), onset, hold, &raw_held), f);
    TrajPtr held(raw_held);
    raw_report = nullptr;
    check(pdmp_monitor_run(model.get(), held.get(), flags.window, &raw_report),
          "monitoring held " + f);
    ReportPtr held_report(raw_report);
    if (pdmp_report_failed(held_report.get())) ++stats.detections;
  }
  return stats;
}

int cmd_eval(const std::string& root, const std::string& out_path,
             std::string models_dir, bool no_train, const TrainFlags& flags,
             double onset, double hold, int jobs) {
  const auto t0 = std::chrono::steady_clock::now();

  const fs::path manifest_path = fs::path(root) / "manifest.json";
  std::ifstream min(manifest_path);
  if (!min) fail(kExitInput, "no dataset manifest at " + manifest_path.string());
  json manifest;
  try {
    min >> manifest;
  } catch (const json::exception& e) {
    fail(kExitInput, manifest_path.string() + ": " + e.what());
  }
  std::vector<std::string> letters;
  try {
    letters = manifest.at("letters").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    fail(kExitInput, manifest_path.string() + ": " + e.what());
  }
  std::sort(letters.begin(), letters.end());

  if (models_dir.empty()) models_dir = (fs::path(root) / "models").string();
  std::error_code ec;
  fs::create_directories(models_dir, ec);
  if (ec) fail(kExitInput, "cannot create " + models_dir + ": " + ec.message());

  json canonical = flags.canonical();
  canonical["command"] = "eval";
  canonical["onset"] = onset;
  canonical["hold"] = hold;
  const std::string config_hash = hash_of(canonical);

  if (jobs < 1)
    jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  std::vector<LetterStats> results(letters.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= letters.size()) return;
      try {
        results[i] = eval_letter(root, letters[i], models_dir, no_train, flags,
                                 config_hash, onset, hold);
      } catch (const CliError& e) {
        results[i].letter = letters[i];
        results[i].error = e.message;
        results[i].error_code = e.code;
      }
    }
  };
  std::vector<std::thread> pool;
  const int n_workers = std::min<int>(jobs, static_cast<int>(letters.size()));
  pool.reserve(static_cast<size_t>(n_workers));
  for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
  for (std::thread& th : pool) th.join();

  std::vector<std::string> missing;
  for (const LetterStats& st : results) {
    if (!st.error.empty()) {
      if (st.error_code == kExitIncomplete) {
        missing.push_back(st.letter);
      } else {
        fail(st.error_code, st.error);
      }
    }
  }
  if (!missing.empty()) {
    std::string joined;
    for (const std::string& l : missing) joined += (joined.empty() ? "" : ", ") + l;
    fail(kExitIncomplete, "missing models for: " + joined);
  }

  int total_tests = 0, total_fp = 0, total_det = 0;
  json per_letter = json::object();
  for (const LetterStats& st : results) {
    total_tests += st.n_test;
    total_fp += st.false_positives;
    total_det += st.detections;
    per_letter[st.letter] = {{"n_test", st.n_test},
                             {"false_positives", st.false_positives},
                             {"detections", st.detections}};
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  json summary;
  summary["format_version"] = 1;
  summary["kind"] = "pdmp_eval_summary";
  summary["seed"] = flags.seed;
  summary["config_hash"] = config_hash;
  summary["threshold_multiplier"] = flags.threshold_multiplier;
  summary["onset_fraction"] = onset;
  summary["hold_fraction"] = hold;
  summary["letters"] = per_letter;
  summary["n_letters"] = letters.size();
  summary["n_test_total"] = total_tests;
  summary["false_positives"] = total_fp;
  summary["detections"] = total_det;
  summary["false_positive_rate"] =
      total_tests > 0 ? static_cast<double>(total_fp) / total_tests : 0.0;
  summary["detection_rate"] =
      total_tests > 0 ? static_cast<double>(total_det) / total_tests : 0.0;
  summary["wall_clock_seconds"] = wall;
  write_json_file(summary, out_path);

  std::cout << "eval: " << total_det << "/" << total_tests << " detections, "
            << total_fp << "/" << total_tests << " false positives ("
            << wall << " s), summary in " << out_path << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);

  try {
    const json cfg = load_config_file(args);

    CLI::App app{"Probabilistic movement primitives: learn, roll out, monitor"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path,
                   "JSON config file (flags take precedence)");

    // gen-dataset
    auto* gen = app.add_subcommand("gen-dataset",
                                   "generate the synthetic letter dataset");
    gen->fallthrough();
    std::string templates = "data/letter_templates.json";
    std::string gen_out = "dataset";
    std::uint64_t gen_seed = 1;
    int n_train = 10, n_test = 10;
    config_default(cfg, "templates", templates);
    config_default(cfg, "out", gen_out);
    config_default(cfg, "seed", gen_seed);
    config_default(cfg, "n_train", n_train);
    config_default(cfg, "n_test", n_test);
    gen->add_option("--templates", templates, "letter templates JSON")
        ->capture_default_str();
    gen->add_option("--out", gen_out, "dataset root directory")
        ->capture_default_str();
    gen->add_option("--seed", gen_seed, "dataset seed")->capture_default_str();
    gen->add_option("--n-train", n_train, "training demos per letter")
        ->capture_default_str();
    gen->add_option("--n-test", n_test, "test demos per letter")
        ->capture_default_str();

    // train
    auto* train = app.add_subcommand("train", "learn a primitive from demos");
    train->fallthrough();
    std::string demo_dir, model_out = "model.json", train_report, label;
    TrainFlags train_flags;
    config_default(cfg, "demos", demo_dir);
    config_default(cfg, "model", model_out);
    config_default(cfg, "report", train_report);
    config_default(cfg, "label", label);
    train->add_option("--demos", demo_dir, "directory of demo CSVs")
        ->required();
    train->add_option("--model", model_out, "output model JSON")
        ->capture_default_str();
    train->add_option("--report", train_report, "training report JSON");
    train->add_option("--label", label, "label stored in the model");
    train_flags.add_options(train, cfg);

    // rollout
    auto* roll = app.add_subcommand("rollout", "open-loop rollout to CSV");
    roll->fallthrough();
    std::string roll_model, roll_out = "rollout.csv", start_csv, goal_csv;
    int roll_steps = -1;
    double roll_tau = -1.0;
    config_default(cfg, "model", roll_model);
    config_default(cfg, "out", roll_out);
    roll->add_option("--model", roll_model, "model JSON")->required();
    roll->add_option("--out", roll_out, "output CSV")->capture_default_str();
    roll->add_option("--steps", roll_steps,
                     "step count (default: duration-matched)");
    roll->add_option("--tau", roll_tau, "speed factor (default: model)");
    roll->add_option("--start", start_csv, "comma-separated start override");
    roll->add_option("--goal", goal_csv, "comma-separated goal override");

    // monitor
    auto* mon = app.add_subcommand("monitor", "classify one execution");
    mon->fallthrough();
    std::string mon_model, mon_obs, mon_report, mon_trace;
    int mon_window = 1;
    config_default(cfg, "model", mon_model);
    config_default(cfg, "window", mon_window);
    mon->add_option("--model", mon_model, "model JSON")->required();
    mon->add_option("--obs", mon_obs, "observed trajectory CSV")->required();
    mon->add_option("--report", mon_report, "report JSON output");
    mon->add_option("--trace", mon_trace, "per-step loglik CSV output");
    mon->add_option("--window", mon_window, "loglik moving-average window")
        ->capture_default_str();

    // eval
    auto* ev = app.add_subcommand("eval",
                                  "dataset-scale failure-detection experiment");
    ev->fallthrough();
    std::string eval_root = "dataset", eval_out = "eval_summary.json";
    std::string eval_models;
    bool no_train = false;
    double onset = 0.5, hold_frac = 0.5;
    int jobs = 0;
    TrainFlags eval_flags;
    config_default(cfg, "dataset", eval_root);
    config_default(cfg, "out", eval_out);
    config_default(cfg, "models", eval_models);
    config_default(cfg, "onset", onset);
    config_default(cfg, "hold", hold_frac);
    config_default(cfg, "jobs", jobs);
    ev->add_option("--dataset", eval_root, "dataset root (from gen-dataset)")
        ->capture_default_str();
    ev->add_option("--out", eval_out, "summary JSON output")
        ->capture_default_str();
    ev->add_option("--models", eval_models,
                   "model cache directory (default: <dataset>/models)");
    ev->add_flag("--no-train", no_train,
                 "never train; require cached models (exit 3 if missing)");
    ev->add_option("--onset", onset, "hold onset fraction")
        ->capture_default_str();
    ev->add_option("--hold", hold_frac, "hold duration fraction")
        ->capture_default_str();
    ev->add_option("--jobs", jobs, "parallel letter workers (0: hardware)");
    eval_flags.add_options(ev, cfg);

    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      if (e.get_exit_code() == 0) return app.exit(e);  // --help
      app.exit(e);
      return kExitInput;
    }

    if (gen->parsed())
      return cmd_gen_dataset(templates, gen_out, gen_seed, n_train, n_test);
    if (train->parsed())
      return cmd_train(demo_dir, model_out, train_report, label, train_flags);
    if (roll->parsed())
      return cmd_rollout(roll_model, roll_out, roll_steps, roll_tau, start_csv,
                         goal_csv);
    if (mon->parsed())
      return cmd_monitor(mon_model, mon_obs, mon_report, mon_trace, mon_window);
    if (ev->parsed())
      return cmd_eval(eval_root, eval_out, eval_models, no_train, eval_flags,
                      onset, hold_frac, jobs);
    return kExitInput;
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
