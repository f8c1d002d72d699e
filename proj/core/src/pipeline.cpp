// Copyright 2026 The hsreg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hsreg/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "hsreg/csv.hpp"
#include "hsreg/error.hpp"
#include "hsreg/features.hpp"
#include "json_io.hpp"

namespace hsreg {

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["format"] = "hsreg.manifest";
  j["subcommand"] = subcommand;
  j["config_path"] = config_path;
  j["seeds"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : seeds) j["seeds"][k] = v;
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  j["tool_version"] = tool_version;
  j["schema_hash"] = schema_hash;
  j["details"] = nlohmann::ordered_json::parse(details_json);
  return j.dump(2) + "\n";
}

void RunManifest::write(const std::filesystem::path& dir) const {
  write_text_file(dir / "manifest.json", to_json());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("write failed: " + path.string());
}

std::filesystem::path corpus_file(const std::filesystem::path& path) {
  if (std::filesystem::is_directory(path)) return path / "surgeries.csv";
  return path;
}

PreparedCorpus prepare_corpus(const std::filesystem::path& path, std::uint64_t split_seed) {
  const auto records = read_corpus_csv(corpus_file(path));
  FilterResult filtered = filter_records(records);
  const Split s = split(filtered.kept.size(), split_seed);
  PreparedCorpus pc;
  pc.n_raw = records.size();
  pc.dropped = filtered.tally();
  pc.train = select(filtered.kept, s.train);
  pc.valid = select(filtered.kept, s.valid);
  pc.test = select(filtered.kept, s.test);
  return pc;
}

namespace {

nlohmann::ordered_json corpus_details(const PreparedCorpus& pc) {
  nlohmann::ordered_json j;
  j["n_raw"] = pc.n_raw;
  j["dropped"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : pc.dropped) j["dropped"][k] = v;
  j["n_train"] = pc.train.size();
  j["n_valid"] = pc.valid.size();
  j["n_test"] = pc.test.size();
  return j;
}

void write_training_log(const std::filesystem::path& path, const TrainedModel& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_csv_row(out, {"epoch", "lr", "train_loss", "valid_nll"});
  for (const auto& e : m.log) {
    write_csv_row(out, {std::to_string(e.epoch), format_double(e.learning_rate),
                        format_double(e.train_loss), format_double(e.valid_nll)});
  }
}

struct LoadedModel {
  ModelBundle bundle;
  Dataset valid;
  Dataset test;
};

std::vector<LoadedModel> load_models(const std::vector<std::filesystem::path>& paths,
                                     std::uint64_t* split_seed) {
  if (paths.empty()) throw ConfigError("model", "at least one model bundle is required");
  std::vector<LoadedModel> out;
  for (const auto& p : paths) {
    const auto file = std::filesystem::is_directory(p) ? p / "model.json" : p;
    LoadedModel lm;
    lm.bundle = bundle_from_json(read_text_file(file));
    if (!out.empty() && lm.bundle.split_seed != out.front().bundle.split_seed) {
      throw ConfigError("model", "bundles were trained on different splits");
    }
    out.push_back(std::move(lm));
  }
  *split_seed = out.front().bundle.split_seed;
  return out;
}

std::vector<std::string> path_strings(const std::vector<std::filesystem::path>& paths) {
  std::vector<std::string> out;
  for (const auto& p : paths) out.push_back(p.string());
  return out;
}

}  // namespace

void run_generate(const GenerateOptions& options) {
  const Corpus corpus = generate(options.config);
  std::filesystem::create_directories(options.out);
  write_corpus_csv(options.out / "surgeries.csv", corpus.records);
  write_ground_truth_csv(options.out / "ground_truth.csv", corpus.truth);

  RunManifest m;
  m.subcommand = "generate";
  m.config_path = options.config_path;
  m.seeds["generator"] = options.config.seed;
  m.outputs = {"surgeries.csv", "ground_truth.csv"};
  nlohmann::ordered_json details;
  details["generator_config"] = nlohmann::ordered_json::parse(options.config.to_json());
  details["n_records"] = corpus.records.size();
  m.details_json = details.dump();
  m.write(options.out);
}

ModelBundle run_train(const TrainOptions& options) {
  const PreparedCorpus pc = prepare_corpus(options.corpus, options.split_seed);
  ModelBundle bundle;
  bundle.schema = fit_schema(pc.train);
  bundle.split_seed = options.split_seed;
  const Dataset train = make_dataset(bundle.schema, pc.train);
  const Dataset valid = make_dataset(bundle.schema, pc.valid);

  std::filesystem::create_directories(options.out);
  RunManifest m;
  m.subcommand = "train";
  m.config_path = options.config_path;
  m.inputs = {corpus_file(options.corpus).string()};
  m.outputs = {"model.json", "training_log.csv"};

  std::optional<GridSearchResult> grid;
  switch (options.model) {
    case ModelKind::kProcedureMeans:
      bundle.model = train_procedure_means(train, valid);
      break;
    case ModelKind::kLinear:
      bundle.model = train_linear(train, valid, options.config);
      break;
    case ModelKind::kMlp:
      if (options.grid) {
        const auto configs = default_grid(options.config);
        grid = grid_search(configs, train, valid);
        bundle.model = grid->best_model;
      } else {
        bundle.model = train_mlp(options.config, train, valid);
      }
      break;
    case ModelKind::kCurrentMethod:
      bundle.model = make_current_method(valid);
      break;
  }
  if (bundle.model.network) bundle.model.network->schema_hash = bundle.schema.hash();

  write_text_file(options.out / "model.json", bundle_to_json(bundle));
  write_training_log(options.out / "training_log.csv", bundle.model);
  if (grid) {
    std::ofstream out(options.out / "grid_results.csv", std::ios::binary);
    if (!out) throw DataError("cannot write grid_results.csv");
    write_csv_row(out, {"hidden_layers", "hidden_width", "valid_nll", "best_epoch", "selected"});
    for (std::size_t i = 0; i < grid->results.size(); ++i) {
      const auto& r = grid->results[i];
      write_csv_row(out, {std::to_string(r.config.hidden_layers),
                          std::to_string(r.config.hidden_width), format_double(r.valid_nll),
                          std::to_string(r.best_epoch), i == grid->best_index ? "1" : "0"});
    }
    m.outputs.push_back("grid_results.csv");
  }

  m.seeds["split"] = options.split_seed;
  if (bundle.model.config) m.seeds["train"] = bundle.model.config->seed;
  m.schema_hash = bundle.schema.hash();
  auto details = corpus_details(pc);
  details["model"] = bundle.model.name();
  details["best_valid_nll"] = bundle.model.best_valid_nll;
  details["best_epoch"] = bundle.model.best_epoch;
  if (bundle.model.config) {
    details["train_config"] = nlohmann::ordered_json::parse(bundle.model.config->to_json());
  }
  m.details_json = details.dump();
  m.write(options.out);
  return bundle;
}

EvalReport run_eval(const EvalOptions& options) {
  std::uint64_t split_seed = 0;
  auto models = load_models(options.models, &split_seed);
  const PreparedCorpus pc = prepare_corpus(options.corpus, split_seed);
  for (auto& lm : models) {
    lm.valid = make_dataset(lm.bundle.schema, pc.valid);
    lm.test = make_dataset(lm.bundle.schema, pc.test);
  }

  EvalReport report;
  report.n_test = pc.test.size();
  const TrainedModel current = make_current_method(models.front().valid);
  report.models.push_back(evaluate_model(current, models.front().test, options.booking));
  for (const auto& lm : models) {
    ModelReport r = evaluate_model(lm.bundle.model, lm.test, options.booking);
    std::size_t dup = 1;
    const std::string base = r.name;
    while (std::any_of(report.models.begin(), report.models.end(),
                       [&](const ModelReport& o) { return o.name == r.name; })) {
      r.name = base + "#" + std::to_string(++dup);
    }
    report.models.push_back(std::move(r));
  }
  report.set_baseline(current.name());

  if (options.ablate) {
    auto it = std::find_if(models.begin(), models.end(), [](const LoadedModel& lm) {
      return lm.bundle.model.kind == ModelKind::kMlp && lm.bundle.model.config.has_value();
    });
    if (it == models.end()) throw ConfigError("ablate", "needs at least one MLP bundle");
    const Dataset train = make_dataset(it->bundle.schema, pc.train);
    const auto groups = it->bundle.schema.feature_groups();
    report.ablation = ablation(*it->bundle.model.config, train, it->valid, it->test, groups);
  }

  std::filesystem::create_directories(options.out);
  write_text_file(options.out / "report.json", report.to_json());
  report.write_csvs(options.out);

  RunManifest m;
  m.subcommand = "eval";
  m.config_path = options.config_path;
  m.seeds["split"] = split_seed;
  m.inputs = path_strings(options.models);
  m.inputs.insert(m.inputs.begin(), corpus_file(options.corpus).string());
  m.outputs = {"report.json", "calibration.csv", "qq.csv", "booking_curve.csv", "cases.csv"};
  if (report.ablation) m.outputs.push_back("ablation.csv");
  m.schema_hash = models.front().bundle.schema.hash();
  m.details_json = corpus_details(pc).dump();
  m.write(options.out);
  return report;
}

AblationResult run_ablate(const AblateOptions& options) {
  const PreparedCorpus pc = prepare_corpus(options.corpus, options.split_seed);
  const FeatureSchema schema = fit_schema(pc.train);
  const Dataset train = make_dataset(schema, pc.train);
  const Dataset valid = make_dataset(schema, pc.valid);
  const Dataset test = make_dataset(schema, pc.test);
  const auto groups = schema.feature_groups();
  EvalReport report;
  report.n_test = test.size();
  report.ablation = ablation(options.config, train, valid, test, groups);

  std::filesystem::create_directories(options.out);
  write_ablation_csv(options.out / "ablation.csv", *report.ablation);
  write_text_file(options.out / "ablation.json", report.to_json());

  RunManifest m;
  m.subcommand = "ablate";
  m.config_path = options.config_path;
  m.seeds["split"] = options.split_seed;
  m.seeds["train"] = options.config.seed;
  m.inputs = {corpus_file(options.corpus).string()};
  m.outputs = {"ablation.csv", "ablation.json"};
  m.schema_hash = schema.hash();
  auto details = corpus_details(pc);
  details["train_config"] = nlohmann::ordered_json::parse(options.config.to_json());
  m.details_json = details.dump();
  m.write(options.out);
  return *report.ablation;
}

void run_booking(const BookingOptions& options) {
  if (!(options.cost_over >= 0.0) || !(options.cost_under >= 0.0) ||
      options.cost_over + options.cost_under <= 0.0) {
    throw ConfigError("cost", "costs must be non-negative and not both zero");
  }
  std::uint64_t split_seed = 0;
  auto models = load_models(options.models, &split_seed);
  const PreparedCorpus pc = prepare_corpus(options.corpus, split_seed);

  std::filesystem::create_directories(options.out);
  std::ofstream csv(options.out / "booking_curve.csv", std::ios::binary);
  if (!csv) throw DataError("cannot write booking_curve.csv");
  write_csv_row(csv, {"model", "strategy", "knob", "overbooked_minutes", "underbooked_minutes"});
  nlohmann::ordered_json summary;
  summary["strategy"] = to_string(options.strategy);
  summary["cost_over"] = options.cost_over;
  summary["cost_under"] = options.cost_under;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& lm : models) {
    const Dataset test = make_dataset(lm.bundle.schema, pc.test);
    const auto knobs = default_knob_grid(options.strategy);
    const BookingCurve curve =
        booking_curve(booking_inputs(lm.bundle.model, test), test.y, options.strategy, knobs);
    const std::string name = lm.bundle.model.name();
    for (const auto& p : curve.points) {
      write_csv_row(csv, {name, to_string(curve.strategy), format_double(p.knob),
                          format_double(p.overbooked_minutes),
                          format_double(p.underbooked_minutes)});
    }
    const auto best = curve.points[curve.optimum(options.cost_over, options.cost_under)];
    rows.push_back({{"model", name},
                    {"optimal_knob", best.knob},
                    {"overbooked_minutes", best.overbooked_minutes},
                    {"underbooked_minutes", best.underbooked_minutes}});
  }
  summary["models"] = std::move(rows);
  write_text_file(options.out / "booking.json", summary.dump(2) + "\n");

  RunManifest m;
  m.subcommand = "booking";
  m.config_path = options.config_path;
  m.seeds["split"] = split_seed;
  m.inputs = path_strings(options.models);
  m.inputs.insert(m.inputs.begin(), corpus_file(options.corpus).string());
  m.outputs = {"booking_curve.csv", "booking.json"};
  m.schema_hash = models.front().bundle.schema.hash();
  m.details_json = corpus_details(pc).dump();
  m.write(options.out);
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const DataError*>(&e) || dynamic_cast<const SchemaError*>(&e)) return 3;
  if (dynamic_cast<const TrainingError*>(&e) || dynamic_cast<const DomainError*>(&e)) return 4;
  return 1;
}

}  // namespace hsreg
