#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "stol/datagen.hpp"
#include "stol/error.hpp"
#include "stol/inference.hpp"
#include "stol/io.hpp"
#include "stol/trainer.hpp"

namespace stol::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

void configure_logging() {
  static bool done = false;
  if (done) return;
  done = true;
  auto logger = spdlog::stderr_logger_st("stol");
  logger->set_pattern("[%l] %v");
  const char* env = std::getenv("STOL_LOG");
  logger->set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
  spdlog::set_default_logger(logger);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << content;
  out.flush();
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

void require_writable_parent(const fs::path& file) {
  const fs::path parent = file.has_parent_path() ? file.parent_path() : fs::path(".");
  if (!fs::is_directory(parent))
    throw Error("output directory '" + parent.string() + "' does not exist");
}

void require_distinct(const fs::path& out, std::initializer_list<const fs::path*> inputs) {
  for (const fs::path* in : inputs) {
    if (in == nullptr || in->empty()) continue;
    if (fs::weakly_canonical(*in) == fs::weakly_canonical(out))
      throw Error("output '" + out.string() + "' would overwrite input '" + in->string() + "'");
  }
}

fs::path default_report_path(const fs::path& model) {
  fs::path p = model;
  p.replace_extension(".report.json");
  return p;
}

struct TrainFlags {
  TrainConfig cfg;
  std::string in;
  std::string out;
  std::string report;

  void attach(CLI::App* app) {
    app->add_option("--in", in, "Training dataset (JSONL)")->required()->check(CLI::ExistingFile);
    app->add_option("--out", out, "Output model file (JSON)")->required();
    app->add_option("--report", report, "Training report (default: <out>.report.json)");
    app->add_option("--c", cfg.C, "Regularization constant C")->capture_default_str();
    app->add_option("--eps-cp", cfg.eps_cp, "Cutting-plane termination threshold")
        ->capture_default_str();
    app->add_option("--eps-qp", cfg.eps_qp, "Inner QP KKT tolerance")->capture_default_str();
    app->add_option("--max-iters", cfg.max_cp_iters, "Cutting-plane iteration cap")
        ->capture_default_str();
  }

  fs::path report_path() const {
    return report.empty() ? default_report_path(out) : fs::path(report);
  }
};

int finish_training(const TrainFlags& flags, const json& model, const TrainReport& report) {
  write_file(flags.out, model.dump() + "\n");
  write_file(flags.report_path(), io::report_to_json(report, flags.cfg).dump(2) + "\n");
  spdlog::info("{} after {} iterations, working set {}, objective {}",
               to_string(report.terminated_by), report.iterations, report.working_set_size,
               report.final_primal_objective);
  if (report.terminated_by == Termination::iteration_cap) {
    std::cerr << "stol: warning: iteration cap reached before convergence\n";
    return kExitIterationCap;
  }
  return kExitOk;
}

int cmd_train_source(const TrainFlags& flags) {
  flags.cfg.validate();
  require_writable_parent(flags.out);
  require_writable_parent(flags.report_path());
  const fs::path in = flags.in;
  require_distinct(flags.out, {&in});
  const Dataset data = io::load_dataset(flags.in);
  for (std::size_t i = 0; i < data.samples.size(); ++i)
    if (!data.samples[i].labeled())
      throw Error(flags.in + ": sample " + std::to_string(i) +
                  " is unlabeled; train-source needs a fully labeled dataset");
  const SourceResult fit = train_source(data, flags.cfg);
  return finish_training(flags, io::model_to_json(fit.model), fit.report);
}

int cmd_adapt(const TrainFlags& flags, const std::string& source_model) {
  flags.cfg.validate();
  require_writable_parent(flags.out);
  require_writable_parent(flags.report_path());
  const fs::path in = flags.in;
  const fs::path src = source_model;
  require_distinct(flags.out, {&in, &src});
  const io::Model model = io::load_model(source_model);
  const auto* source = std::get_if<LinearScorer>(&model);
  if (source == nullptr) throw Error(source_model + ": source model must have kind 'linear'");
  const Dataset data = io::load_dataset(flags.in);
  if (data.d != source->map.d() || data.K != source->map.K())
    throw Error("dimension mismatch: " + flags.in + " has d=" + std::to_string(data.d) +
                ", K=" + std::to_string(data.K) + " but " + source_model + " has d=" +
                std::to_string(source->map.d()) + ", K=" + std::to_string(source->map.K()));
  const AdaptResult fit = adapt(*source, data, flags.cfg);
  return finish_training(flags, io::model_to_json(fit.model), fit.report);
}

std::vector<Labels> predict_all(const io::Model& model, const Dataset& data,
                                const std::string& data_name) {
  const ChainFeatureMap& map = io::model_map(model);
  if (data.d != map.d() || data.K != map.K())
    throw Error("dimension mismatch: " + data_name + " has d=" + std::to_string(data.d) +
                ", K=" + std::to_string(data.K) + " but the model has d=" +
                std::to_string(map.d()) + ", K=" + std::to_string(map.K()));
  const Vector weights = io::decoding_weights(model);
  std::vector<Labels> out;
  out.reserve(data.samples.size());
  for (const auto& s : data.samples) out.push_back(decode(weights, map, s.x).labels);
  return out;
}

struct SynthFlags {
  std::uint64_t seed = 0;
  std::size_t n_source = 200;
  std::size_t n_target = 240;
  std::size_t l = 10;
  std::string out;
  std::string params;
  double rotation = kDefaultShiftDegrees;
  std::vector<double> translation{kDefaultShiftTranslation[0], kDefaultShiftTranslation[1]};
  std::optional<double> sigma;
};

int cmd_synth(const SynthFlags& f) {
  if (!fs::is_directory(f.out)) throw Error("output directory '" + f.out + "' does not exist");
  DomainParams source_params =
      f.params.empty() ? DomainParams::defaults() : io::params_from_json(io::parse_json_file(f.params));
  if (f.sigma) source_params.noise_sigma = *f.sigma;
  source_params.validate();
  if (f.l > f.n_target)
    throw Error("--l " + std::to_string(f.l) + " exceeds --n-target " + std::to_string(f.n_target));
  const DomainParams target_params =
      source_params.d == 2 || f.rotation != 0.0
          ? shift(source_params, f.rotation, f.translation)
          : shift(source_params, Matrix::identity(source_params.d), f.translation);

  const Dataset source = generate(source_params, f.n_source, derive_seed(f.seed, 10), DomainTag::source);
  const Dataset target_full =
      generate(target_params, f.n_target, derive_seed(f.seed, 11), DomainTag::target);
  const MaskedDataset target = mask_labels(target_full, f.l, derive_seed(f.seed, 12));

  const json meta = {{"seed", f.seed},
                     {"n_source", f.n_source},
                     {"n_target", f.n_target},
                     {"l", f.l},
                     {"shift", {{"rotation_degrees", f.rotation}, {"translation", f.translation}}},
                     {"source", io::params_to_json(source_params)},
                     {"target", io::params_to_json(target_params)}};

  const fs::path dir = f.out;
  const std::string files[4][2] = {
      {"source.jsonl", io::dataset_to_jsonl(source)},
      {"target.jsonl", io::dataset_to_jsonl(target.data)},
      {"target_truth.jsonl", io::dataset_to_jsonl(target.truth)},
      {"params.json", meta.dump(2) + "\n"},
  };
  for (const auto& [name, content] : files) write_file(dir / name, content);
  spdlog::info("wrote {} source and {} target samples ({} labeled) to {}", f.n_source, f.n_target,
               f.l, f.out);
  return kExitOk;
}

struct EvalFlags {
  std::string in;
  std::string model;
  std::string predictions;
  std::string truth;
  std::string out;
  bool unlabeled_only = false;
};

int cmd_eval(const EvalFlags& f) {
  if (f.model.empty() == f.predictions.empty())
    throw Error("eval needs exactly one of --model or --predictions");
  if (!f.out.empty()) {
    require_writable_parent(f.out);
    const fs::path in = f.in, model = f.model, preds = f.predictions, truth = f.truth;
    require_distinct(f.out, {&in, &model, &preds, &truth});
  }
  const Dataset data = io::load_dataset(f.in);

  std::vector<std::optional<Labels>> truth(data.samples.size());
  if (!f.truth.empty()) {
    const Dataset sealed = io::load_dataset(f.truth);
    if (sealed.samples.size() != data.samples.size())
      throw Error(f.truth + ": has " + std::to_string(sealed.samples.size()) +
                  " samples but " + f.in + " has " + std::to_string(data.samples.size()));
    for (std::size_t i = 0; i < sealed.samples.size(); ++i) {
      if (sealed.samples[i].x != data.samples[i].x)
        throw Error(f.truth + ": sample " + std::to_string(i) + " does not match " + f.in);
      truth[i] = sealed.samples[i].y;
    }
  } else {
    for (std::size_t i = 0; i < data.samples.size(); ++i) truth[i] = data.samples[i].y;
  }

  std::vector<Labels> predicted;
  if (!f.model.empty()) {
    predicted = predict_all(io::load_model(f.model), data, f.in);
  } else {
    std::istringstream in(io::read_file(f.predictions));
    predicted = io::predictions_from_jsonl(in, f.predictions);
    if (predicted.size() != data.samples.size())
      throw Error(f.predictions + ": has " + std::to_string(predicted.size()) +
                  " predictions but " + f.in + " has " + std::to_string(data.samples.size()) +
                  " samples");
  }

  json per_sample = json::array();
  double total = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    if (f.unlabeled_only && data.samples[i].labeled()) continue;
    if (!truth[i])
      throw Error("no truth labels for sample " + std::to_string(i) +
                  " (pass the sealed sidecar with --truth)");
    const double err = hamming_loss(*truth[i], predicted[i]);
    per_sample.push_back(err);
    total += err;
    ++n;
  }
  require(n > 0, "eval: no samples to score");
  const json metrics = {{"mean_hamming", total / static_cast<double>(n)},
                        {"n", n},
                        {"per_sample", per_sample}};
  if (f.out.empty())
    std::cout << metrics.dump() << "\n";
  else
    write_file(f.out, metrics.dump(2) + "\n");
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  configure_logging();

  CLI::App app{"Structured-output domain transfer: source training and cutting-plane adaptation",
               "stol"};
  app.require_subcommand(1);

  SynthFlags synth_flags;
  auto* synth = app.add_subcommand("synth", "Generate source/target datasets with covariate shift");
  synth->add_option("--seed", synth_flags.seed, "Base seed")->capture_default_str();
  synth->add_option("--n-source", synth_flags.n_source, "Source samples")->capture_default_str();
  synth->add_option("--n-target", synth_flags.n_target, "Target samples")->capture_default_str();
  synth->add_option("--l", synth_flags.l, "Labeled target samples")->capture_default_str();
  synth->add_option("--out", synth_flags.out, "Output directory (must exist)")->required();
  synth->add_option("--params", synth_flags.params, "Source DomainParams JSON (default built-in)")
      ->check(CLI::ExistingFile);
  synth->add_option("--rotation", synth_flags.rotation, "Target rotation in degrees")
      ->capture_default_str();
  synth->add_option("--translation", synth_flags.translation, "Target translation")
      ->delimiter(',')
      ->capture_default_str();
  synth->add_option("--sigma", synth_flags.sigma, "Override emission noise sigma");

  TrainFlags source_flags;
  auto* train = app.add_subcommand("train-source", "Train the source model (zero-base cutting plane)");
  source_flags.attach(train);

  TrainFlags adapt_flags;
  std::string source_model;
  auto* adapt_cmd = app.add_subcommand("adapt", "Learn the delta weights on labeled target samples");
  adapt_flags.attach(adapt_cmd);
  adapt_cmd->add_option("--source-model", source_model, "Frozen source model (kind=linear)")
      ->required()
      ->check(CLI::ExistingFile);

  std::string predict_model, predict_in, predict_out;
  auto* predict = app.add_subcommand("predict", "Decode label sequences");
  predict->add_option("--model", predict_model, "Model file")->required()->check(CLI::ExistingFile);
  predict->add_option("--in", predict_in, "Dataset (JSONL)")->required()->check(CLI::ExistingFile);
  predict->add_option("--out", predict_out, "Predictions (JSONL)")->required();

  EvalFlags eval_flags;
  auto* eval = app.add_subcommand("eval", "Mean normalized Hamming error");
  eval->add_option("--in", eval_flags.in, "Dataset (JSONL)")->required()->check(CLI::ExistingFile);
  eval->add_option("--model", eval_flags.model, "Model to decode with")->check(CLI::ExistingFile);
  eval->add_option("--predictions", eval_flags.predictions, "Predictions file instead of a model")
      ->check(CLI::ExistingFile);
  eval->add_option("--truth", eval_flags.truth, "Sealed truth sidecar")->check(CLI::ExistingFile);
  eval->add_flag("--unlabeled-only", eval_flags.unlabeled_only,
                 "Score only samples without labels in --in");
  eval->add_option("--out", eval_flags.out, "Metrics JSON (default: stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e);
      return kExitOk;
    }
    std::cerr << "stol: error: " << e.what() << "\n";
    return kExitDataError;
  }

  try {
    if (*synth) return cmd_synth(synth_flags);
    if (*train) return cmd_train_source(source_flags);
    if (*adapt_cmd) return cmd_adapt(adapt_flags, source_model);
    if (*predict) {
      require_writable_parent(predict_out);
      const fs::path in = predict_in, model = predict_model;
      require_distinct(predict_out, {&in, &model});
      const Dataset data = io::load_dataset(predict_in);
      const auto labels = predict_all(io::load_model(predict_model), data, predict_in);
      write_file(predict_out, io::predictions_to_jsonl(labels));
      return kExitOk;
    }
    if (*eval) return cmd_eval(eval_flags);
  } catch (const Error& e) {
    std::cerr << "stol: error: " << e.what() << "\n";
    return kExitDataError;
  }
  return kExitDataError;
}

}  // namespace stol::cli
