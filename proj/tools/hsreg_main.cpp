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

// hsreg command-line entry point: generate, train, eval, ablate, booking.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hsreg/error.hpp"
#include "hsreg/pipeline.hpp"

namespace {

struct Common {
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Random seed");
  cmd->add_option("--config", c.config, "JSON settings file")->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out, "Output directory")->required();
}

hsreg::TrainConfig load_train_config(const Common& c) {
  return c.config.empty() ? hsreg::TrainConfig{}
                          : hsreg::TrainConfig::from_json(hsreg::read_text_file(c.config));
}

struct TrainOverrides {
  std::string head;
  bool homoscedastic = false;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> hidden_layers;
  std::optional<std::size_t> hidden_width;
  std::optional<double> lr;
};

void add_train_overrides(CLI::App* cmd, TrainOverrides& o) {
  cmd->add_option("--head", o.head, "gaussian | laplace | gamma");
  cmd->add_flag("--homoscedastic", o.homoscedastic, "Single-output head with a fitted constant scale");
  cmd->add_option("--epochs", o.epochs);
  cmd->add_option("--hidden-layers", o.hidden_layers);
  cmd->add_option("--hidden-width", o.hidden_width);
  cmd->add_option("--lr", o.lr, "Initial learning rate");
}

void apply(const TrainOverrides& o, const Common& c, hsreg::TrainConfig& cfg) {
  if (!o.head.empty()) cfg.head.family = hsreg::family_from_string(o.head);
  if (o.homoscedastic) cfg.head.heteroscedastic = false;
  if (o.epochs) cfg.epochs = *o.epochs;
  if (o.hidden_layers) cfg.hidden_layers = *o.hidden_layers;
  if (o.hidden_width) cfg.hidden_width = *o.hidden_width;
  if (o.lr) cfg.initial_lr = *o.lr;
  if (c.seed) cfg.seed = *c.seed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heteroscedastic surgery-duration regression"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(hsreg::kToolVersion));

  // generate
  Common gen_c;
  std::optional<std::size_t> gen_n;
  std::optional<double> gen_strength;
  auto* gen = app.add_subcommand("generate", "Write a synthetic surgery log");
  add_common(gen, gen_c);
  gen->add_option("--n", gen_n, "Number of records");
  gen->add_option("--hetero-strength", gen_strength, "Ratio of largest to smallest sigma");

  // train
  Common tr_c;
  TrainOverrides tr_o;
  std::string tr_corpus, tr_model = "mlp";
  std::uint64_t tr_split = 1;
  bool tr_grid = false;
  auto* tr = app.add_subcommand("train", "Fit a model on the training split");
  add_common(tr, tr_c);
  add_train_overrides(tr, tr_o);
  tr->add_option("--corpus", tr_corpus, "Corpus CSV or directory")->required();
  tr->add_option("--model", tr_model, "mlp | linear | procedure-means");
  tr->add_option("--split-seed", tr_split, "Seed of the train/valid/test split");
  tr->add_flag("--grid", tr_grid, "Search hidden layers 1-3 x widths 128-512");

  // eval
  Common ev_c;
  std::string ev_corpus;
  std::vector<std::string> ev_models, ev_booking;
  bool ev_ablate = false;
  auto* ev = app.add_subcommand("eval", "Evaluate bundles on the test split");
  add_common(ev, ev_c);
  ev->add_option("--corpus", ev_corpus, "Corpus CSV or directory")->required();
  ev->add_option("--model", ev_models, "Model bundle (repeatable)")->required();
  ev->add_option("--booking", ev_booking, "additive | multiplicative | percentile (repeatable)");
  ev->add_flag("--ablate", ev_ablate, "Retrain the first MLP with each feature group zeroed");

  // ablate
  Common ab_c;
  TrainOverrides ab_o;
  std::string ab_corpus;
  std::uint64_t ab_split = 1;
  auto* ab = app.add_subcommand("ablate", "Feature-group ablation for one MLP config");
  add_common(ab, ab_c);
  add_train_overrides(ab, ab_o);
  ab->add_option("--corpus", ab_corpus, "Corpus CSV or directory")->required();
  ab->add_option("--split-seed", ab_split, "Seed of the train/valid/test split");

  // booking
  Common bk_c;
  std::string bk_corpus, bk_strategy = "percentile";
  std::vector<std::string> bk_models;
  double bk_over = 1.0, bk_under = 1.0;
  auto* bk = app.add_subcommand("booking", "Over/under-booking curves and optimal knob");
  add_common(bk, bk_c);
  bk->add_option("--corpus", bk_corpus, "Corpus CSV or directory")->required();
  bk->add_option("--model", bk_models, "Model bundle (repeatable)")->required();
  bk->add_option("--strategy", bk_strategy, "additive | multiplicative | percentile");
  bk->add_option("--cost-over", bk_over, "Cost per overbooked minute");
  bk->add_option("--cost-under", bk_under, "Cost per underbooked minute");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) {
      hsreg::GenerateOptions o;
      if (!gen_c.config.empty()) {
        o.config = hsreg::GeneratorConfig::from_json(hsreg::read_text_file(gen_c.config));
      }
      if (gen_c.seed) o.config.seed = *gen_c.seed;
      if (gen_n) o.config.n_records = *gen_n;
      if (gen_strength) o.config.hetero_strength = *gen_strength;
      o.out = gen_c.out;
      o.config_path = gen_c.config;
      hsreg::run_generate(o);
    } else if (*tr) {
      hsreg::TrainOptions o;
      o.config = load_train_config(tr_c);
      apply(tr_o, tr_c, o.config);
      o.model = hsreg::model_kind_from_string(tr_model);
      if (o.model == hsreg::ModelKind::kCurrentMethod) {
        throw hsreg::ConfigError("model", "the current method is not trained");
      }
      if (o.model == hsreg::ModelKind::kMlp) o.config.validate();
      o.corpus = tr_corpus;
      o.out = tr_c.out;
      o.split_seed = tr_split;
      o.grid = tr_grid;
      o.config_path = tr_c.config;
      const auto bundle = hsreg::run_train(o);
      std::cout << bundle.model.name() << ": best validation NLL "
                << bundle.model.best_valid_nll << " after " << bundle.model.best_epoch
                << " epochs\n";
    } else if (*ev) {
      hsreg::EvalOptions o;
      o.corpus = ev_corpus;
      for (const auto& m : ev_models) o.models.emplace_back(m);
      if (!ev_booking.empty()) {
        o.booking.clear();
        for (const auto& b : ev_booking) o.booking.push_back(hsreg::booking_strategy_from_string(b));
      }
      o.ablate = ev_ablate;
      o.out = ev_c.out;
      o.config_path = ev_c.config;
      const auto report = hsreg::run_eval(o);
      for (const auto& m : report.models) {
        std::cout << m.name << ": RMSE " << m.metrics.rmse_minutes << " min, MAE "
                  << m.metrics.mae_minutes << " min, NLL " << m.metrics.nll_nats << ", delta "
                  << m.nll_delta_vs_baseline << "\n";
      }
    } else if (*ab) {
      hsreg::AblateOptions o;
      o.config = load_train_config(ab_c);
      apply(ab_o, ab_c, o.config);
      o.corpus = ab_corpus;
      o.out = ab_c.out;
      o.split_seed = ab_split;
      o.config_path = ab_c.config;
      const auto result = hsreg::run_ablate(o);
      for (const auto& r : result.rows) {
        std::cout << r.group << ": delta RMSE " << r.delta_rmse_minutes << " min, delta NLL "
                  << r.delta_nll << "\n";
      }
    } else if (*bk) {
      hsreg::BookingOptions o;
      o.corpus = bk_corpus;
      for (const auto& m : bk_models) o.models.emplace_back(m);
      o.strategy = hsreg::booking_strategy_from_string(bk_strategy);
      o.cost_over = bk_over;
      o.cost_under = bk_under;
      o.out = bk_c.out;
      o.config_path = bk_c.config;
      hsreg::run_booking(o);
    }
  } catch (const std::exception& e) {
    std::cerr << "hsreg: " << e.what() << "\n";
    return hsreg::exit_code_for(e);
  }
  return 0;
}
