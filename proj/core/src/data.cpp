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

#include "hsreg/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <unordered_map>

#include "hsreg/csv.hpp"
#include "hsreg/error.hpp"
#include "json_io.hpp"

namespace hsreg {

double GroundTruth::sigma_hours() const { return std::sqrt(shape) * scale_hours; }

const char* to_string(DropReason reason) {
  switch (reason) {
    case DropReason::kTooShort:
      return "too-short";
    case DropReason::kTooLong:
      return "too-long";
    case DropReason::kInvalid:
      return "invalid";
  }
  return "?";
}

std::map<std::string, std::size_t> FilterResult::tally() const {
  std::map<std::string, std::size_t> counts;
  for (const auto& d : dropped) ++counts[to_string(d.reason)];
  return counts;
}

FilterResult filter_records(std::span<const SurgeryRecord> records) {
  FilterResult result;
  for (const auto& r : records) {
    const double d = r.duration_minutes;
    if (!std::isfinite(d)) {
      result.dropped.push_back({r, DropReason::kInvalid});
    } else if (d < kMinDurationMinutes) {
      result.dropped.push_back({r, DropReason::kTooShort});
    } else if (d > kMaxDurationMinutes) {
      result.dropped.push_back({r, DropReason::kTooLong});
    } else {
      result.kept.push_back(r);
    }
  }
  return result;
}

Split split(std::size_t n_records, std::uint64_t seed) {
  if (n_records < 10) {
    throw DataError("split: need at least 10 records, got " + std::to_string(n_records));
  }
  const auto n = static_cast<double>(n_records);
  const auto n_train = static_cast<std::size_t>(std::llround(kTrainFraction * n));
  const auto n_valid = static_cast<std::size_t>(std::llround(kValidFraction * n));

  std::vector<std::size_t> order(n_records);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  Split s;
  s.seed = seed;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.valid.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                 order.begin() + static_cast<std::ptrdiff_t>(n_train + n_valid));
  s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_valid), order.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.valid.begin(), s.valid.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

std::vector<SurgeryRecord> select(std::span<const SurgeryRecord> records,
                                  std::span<const std::size_t> indices) {
  std::vector<SurgeryRecord> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= records.size()) throw DataError("select: index out of range");
    out.push_back(records[i]);
  }
  return out;
}

void GeneratorConfig::validate() const {
  auto check = [](bool ok, const char* field, const char* what) {
    if (!ok) throw ConfigError(field, what);
  };
  check(n_records >= 1, "n_records", "must be positive");
  check(n_procedures >= 1, "n_procedures", "must be positive");
  check(n_surgeons >= 1, "n_surgeons", "must be positive");
  check(n_locations >= 1, "n_locations", "must be positive");
  check(std::isfinite(hetero_strength) && hetero_strength >= 1.0, "hetero_strength",
        "must be >= 1");
  check(std::isfinite(base_sigma_hours) && base_sigma_hours > 0.0, "base_sigma_hours",
        "must be positive");
  check(min_procedure_hours > 0.0, "min_procedure_hours", "must be positive");
  check(max_procedure_hours > min_procedure_hours, "max_procedure_hours",
        "must exceed min_procedure_hours");
  check(surgeon_speed_sd >= 0.0, "surgeon_speed_sd", "must be non-negative");
  check(nonlinearity >= 0.0, "nonlinearity", "must be non-negative");
  check(zipf_exponent >= 0.0, "zipf_exponent", "must be non-negative");
  check(missing_rate >= 0.0 && missing_rate < 1.0, "missing_rate", "must lie in [0, 1)");
  check(clerical_error_rate >= 0.0 && clerical_error_rate < 1.0, "clerical_error_rate",
        "must lie in [0, 1)");
  check(history_cases >= 1, "history_cases", "must be positive");
}

std::string GeneratorConfig::to_json() const {
  nlohmann::ordered_json j;
  j["n_records"] = n_records;
  j["n_procedures"] = n_procedures;
  j["n_surgeons"] = n_surgeons;
  j["n_locations"] = n_locations;
  j["seed"] = seed;
  j["hetero_strength"] = hetero_strength;
  j["base_sigma_hours"] = base_sigma_hours;
  j["min_procedure_hours"] = min_procedure_hours;
  j["max_procedure_hours"] = max_procedure_hours;
  j["surgeon_speed_sd"] = surgeon_speed_sd;
  j["nonlinearity"] = nonlinearity;
  j["zipf_exponent"] = zipf_exponent;
  j["missing_rate"] = missing_rate;
  j["clerical_error_rate"] = clerical_error_rate;
  j["history_cases"] = history_cases;
  return j.dump(2);
}

GeneratorConfig GeneratorConfig::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config", "expected a JSON object");
  GeneratorConfig c;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "n_records") c.n_records = value.get<std::size_t>();
      else if (key == "n_procedures") c.n_procedures = value.get<std::size_t>();
      else if (key == "n_surgeons") c.n_surgeons = value.get<std::size_t>();
      else if (key == "n_locations") c.n_locations = value.get<std::size_t>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "hetero_strength") c.hetero_strength = value.get<double>();
      else if (key == "base_sigma_hours") c.base_sigma_hours = value.get<double>();
      else if (key == "min_procedure_hours") c.min_procedure_hours = value.get<double>();
      else if (key == "max_procedure_hours") c.max_procedure_hours = value.get<double>();
      else if (key == "surgeon_speed_sd") c.surgeon_speed_sd = value.get<double>();
      else if (key == "nonlinearity") c.nonlinearity = value.get<double>();
      else if (key == "zipf_exponent") c.zipf_exponent = value.get<double>();
      else if (key == "missing_rate") c.missing_rate = value.get<double>();
      else if (key == "clerical_error_rate") c.clerical_error_rate = value.get<double>();
      else if (key == "history_cases") c.history_cases = value.get<std::size_t>();
      else throw ConfigError(key, "unknown setting");
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(key, std::string("wrong type: ") + e.what());
    }
  }
  c.validate();
  return c;
}

namespace {

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string padded(const char* prefix, std::size_t i, int width) {
  std::string digits = std::to_string(i);
  if (static_cast<int>(digits.size()) < width) {
    digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
  }
  return prefix + digits;
}

constexpr const char* kDays[] = {"Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"};
constexpr double kDayWeights[] = {0.18, 0.18, 0.18, 0.18, 0.18, 0.06, 0.04};

constexpr const char* kClasses[] = {
    "Hospital Outpatient Procedure", "Hospital Outpatient Surgery",
    "Hospital Inpatient Surgery",    "Inpatient Admission",
    "Emergency Department Encounter", "Trauma Inpatient Admission",
    "Trauma Outpatient",
};
constexpr double kClassWeights[] = {0.30, 0.25, 0.20, 0.10, 0.08, 0.04, 0.03};
// ED and trauma classes.
constexpr bool kUrgentClass[] = {false, false, false, false, true, true, true};

constexpr const char* kAsa[] = {"I", "II", "III", "IV", "V", "VI"};
constexpr double kAsaYounger[] = {0.15, 0.45, 0.30, 0.08, 0.015, 0.005};
constexpr double kAsaOlder[] = {0.05, 0.35, 0.43, 0.14, 0.025, 0.005};

constexpr const char* kAnesthesia[] = {"General", "MAC", "Neuraxial", "No Anesthesiologist",
                                       "Other"};
constexpr double kAnesthesiaEffect[] = {0.08, -0.08, 0.0, -0.12, 0.0};

constexpr double kComorbidityBase[kComorbidityCount] = {0.15, 0.06, 0.07, 0.05, 0.10,
                                                        0.12, 0.35, 0.02, 0.08, 0.04,
                                                        0.03, 0.08, 0.03, 0.03};

struct ProcedureLatent {
  double log_mean;
  double u;  // position of the log mean in [0, 1]
  std::size_t specialty;
  std::size_t preferred_location;
};

struct World {
  std::vector<ProcedureLatent> procedures;
  std::vector<double> procedure_weights;
  std::vector<double> surgeon_log_speed;
  std::vector<std::vector<std::size_t>> surgeons_by_specialty;
  std::vector<double> location_effect;
  std::vector<double> scheduled_minutes;
};

struct SampledCase {
  SurgeryRecord record;
  double shape;
  double scale_hours;
};

template <std::size_t N>
std::size_t draw(std::mt19937_64& rng, const double (&weights)[N]) {
  std::discrete_distribution<std::size_t> d(std::begin(weights), std::end(weights));
  return d(rng);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

bool bernoulli(std::mt19937_64& rng, double p) {
  return std::bernoulli_distribution(std::clamp(p, 0.0, 1.0))(rng);
}

World build_world(const GeneratorConfig& c) {
  std::mt19937_64 rng(stream_seed(c.seed, 1));
  World w;
  const std::size_t n_specialties = std::min<std::size_t>(8, c.n_surgeons);

  std::vector<double> raw(c.n_procedures);
  for (double& v : raw) v = uniform(rng, 0.0, 1.0);
  const auto [lo_it, hi_it] = std::minmax_element(raw.begin(), raw.end());
  const double lo = *lo_it, hi = *hi_it;
  const double log_min = std::log(c.min_procedure_hours);
  const double log_max = std::log(c.max_procedure_hours);
  for (std::size_t p = 0; p < c.n_procedures; ++p) {
    const double u = hi > lo ? (raw[p] - lo) / (hi - lo) : 0.0;
    ProcedureLatent latent;
    latent.u = u;
    latent.log_mean = log_min + u * (log_max - log_min);
    latent.specialty = static_cast<std::size_t>(uniform(rng, 0.0, 1.0) * n_specialties) %
                       n_specialties;
    latent.preferred_location =
        static_cast<std::size_t>(uniform(rng, 0.0, 1.0) * c.n_locations) % c.n_locations;
    w.procedures.push_back(latent);
  }

  // Zipf popularity over a random ranking of procedures.
  std::vector<std::size_t> rank(c.n_procedures);
  std::iota(rank.begin(), rank.end(), std::size_t{0});
  std::shuffle(rank.begin(), rank.end(), rng);
  w.procedure_weights.resize(c.n_procedures);
  for (std::size_t p = 0; p < c.n_procedures; ++p) {
    w.procedure_weights[p] = 1.0 / std::pow(static_cast<double>(rank[p] + 1), c.zipf_exponent);
  }

  std::normal_distribution<double> speed(0.0, c.surgeon_speed_sd);
  w.surgeons_by_specialty.resize(n_specialties);
  for (std::size_t s = 0; s < c.n_surgeons; ++s) {
    w.surgeon_log_speed.push_back(c.surgeon_speed_sd > 0.0 ? speed(rng) : 0.0);
    w.surgeons_by_specialty[s % n_specialties].push_back(s);
  }

  std::normal_distribution<double> loc(0.0, 0.04);
  for (std::size_t l = 0; l < c.n_locations; ++l) w.location_effect.push_back(loc(rng));
  return w;
}

SampledCase sample_case(const GeneratorConfig& c, const World& w, std::size_t procedure,
                        std::mt19937_64& rng) {
  const ProcedureLatent& proc = w.procedures[procedure];
  SurgeryRecord r;
  r.procedure_id = padded("P", procedure + 1, 3);

  std::normal_distribution<double> std_normal(0.0, 1.0);
  r.age_years = static_cast<int>(std::clamp(std::round(55.0 + 18.0 * std_normal(rng)), 1.0, 99.0));
  const bool male = !bernoulli(rng, 0.55);
  r.sex = male ? "M" : "F";
  const double weight = std::clamp((male ? 84.0 : 72.0) + 16.0 * std_normal(rng), 35.0, 200.0);
  const double height = std::clamp((male ? 176.0 : 163.0) + 7.0 * std_normal(rng), 130.0, 210.0);
  const double bmi = weight / ((height / 100.0) * (height / 100.0));
  const double bmi_z = (bmi - 27.0) / 5.0;

  const std::size_t cls = draw(rng, kClassWeights);
  r.patient_class = kClasses[cls];
  const bool urgent = kUrgentClass[cls];
  const std::size_t asa = r.age_years > 65 ? draw(rng, kAsaOlder) : draw(rng, kAsaYounger);
  r.asa = kAsa[asa];

  const double p_general = 0.2 + 0.7 * proc.u;
  const double rest = 1.0 - p_general;
  const double anesthesia_weights[] = {p_general, 0.55 * rest, 0.20 * rest, 0.15 * rest,
                                       0.10 * rest};
  const std::size_t anesthesia = draw(rng, anesthesia_weights);
  r.anesthesia = kAnesthesia[anesthesia];

  int n_comorbid = 0;
  for (std::size_t i = 0; i < kComorbidityCount; ++i) {
    const double p = std::min(0.9, kComorbidityBase[i] * (0.5 + r.age_years / 55.0));
    r.comorbidities[i] = bernoulli(rng, p);
    n_comorbid += r.comorbidities[i] ? 1 : 0;
  }

  double hour = bernoulli(rng, 0.75) ? std::clamp(10.0 + 2.5 * std_normal(rng), 6.0, 20.0)
                                     : uniform(rng, 0.0, 24.0);
  // Five-minute resolution, stored as whole minutes / 60 so it survives HH:MM.
  const double start_minutes = std::fmod(5.0 * std::round(hour * 12.0), 1440.0);
  hour = start_minutes / 60.0;
  r.day_of_week = kDays[draw(rng, kDayWeights)];
  r.month = 1 + static_cast<int>(uniform(rng, 0.0, 12.0)) % 12;

  const auto& pool = w.surgeons_by_specialty[proc.specialty % w.surgeons_by_specialty.size()];
  const std::size_t surgeon =
      pool[static_cast<std::size_t>(uniform(rng, 0.0, 1.0) * pool.size()) % pool.size()];
  r.surgeon_id = padded("S", surgeon + 1, 3);
  const std::size_t location =
      bernoulli(rng, 0.7)
          ? proc.preferred_location
          : static_cast<std::size_t>(uniform(rng, 0.0, 1.0) * c.n_locations) % c.n_locations;
  r.location = padded("L", location + 1, 2);

  const double age_term = (r.age_years - 55.0) / 25.0;
  double log_mean = proc.log_mean + w.surgeon_log_speed[surgeon] + w.location_effect[location] +
                    0.06 * (static_cast<double>(asa) - 1.0) + kAnesthesiaEffect[anesthesia] +
                    (urgent ? 0.12 : 0.0) + (male ? 0.04 : 0.0) + (hour >= 15.0 ? 0.05 : 0.0) +
                    0.015 * n_comorbid;
  log_mean += c.nonlinearity *
              (0.25 * std::tanh(bmi_z) * (2.0 * proc.u - 1.0) + 0.2 * age_term * age_term * proc.u);
  const double mean_hours = std::exp(log_mean);

  const double u_context = 0.5 * static_cast<double>(asa) / 5.0 + 0.5 * (urgent ? 1.0 : 0.0);
  const double u = std::clamp(0.7 * proc.u + 0.3 * u_context, 0.0, 1.0);
  const double sigma = c.base_sigma_hours * std::pow(c.hetero_strength, u - 0.5);
  const double shape = (mean_hours / sigma) * (mean_hours / sigma);
  const double scale = sigma * sigma / mean_hours;

  const double hours = std::gamma_distribution<double>(shape, scale)(rng);
  r.duration_minutes = std::max(1.0, std::round(hours * 60.0));

  if (bernoulli(rng, c.missing_rate)) r.weight_kg.reset(); else r.weight_kg = std::round(weight * 10.0) / 10.0;
  if (bernoulli(rng, c.missing_rate)) r.height_cm.reset(); else r.height_cm = std::round(height * 10.0) / 10.0;
  if (!bernoulli(rng, c.missing_rate)) r.hour_of_day = hour;
  return {std::move(r), shape, scale};
}

}  // namespace

Corpus generate(const GeneratorConfig& config) {
  config.validate();
  World world = build_world(config);

  // Booked time: historical mean per procedure, rounded to 15-minute blocks.
  {
    std::mt19937_64 rng(stream_seed(config.seed, 2));
    for (std::size_t p = 0; p < config.n_procedures; ++p) {
      double total = 0.0;
      for (std::size_t h = 0; h < config.history_cases; ++h) {
        total += sample_case(config, world, p, rng).record.duration_minutes;
      }
      const double mean = total / static_cast<double>(config.history_cases);
      world.scheduled_minutes.push_back(std::max(15.0, 15.0 * std::round(mean / 15.0)));
    }
  }

  Corpus corpus;
  corpus.provenance.source = "generator";
  corpus.provenance.seed = config.seed;
  corpus.provenance.config_json = config.to_json();
  corpus.records.reserve(config.n_records);
  corpus.truth.reserve(config.n_records);

  std::mt19937_64 rng(stream_seed(config.seed, 3));
  std::discrete_distribution<std::size_t> pick_procedure(world.procedure_weights.begin(),
                                                         world.procedure_weights.end());
  for (std::size_t i = 0; i < config.n_records; ++i) {
    const std::size_t p = pick_procedure(rng);
    SampledCase sc = sample_case(config, world, p, rng);
    sc.record.record_id = static_cast<std::int64_t>(i + 1);
    sc.record.scheduled_minutes = world.scheduled_minutes[p];
    if (bernoulli(rng, config.clerical_error_rate)) {
      sc.record.duration_minutes = bernoulli(rng, 0.5) ? std::round(uniform(rng, 1.0, 4.0))
                                                       : std::round(uniform(rng, 1441.0, 3000.0));
    }
    corpus.truth.push_back({sc.record.record_id, sc.shape, sc.scale_hours});
    corpus.records.push_back(std::move(sc.record));
  }
  return corpus;
}

void write_corpus_csv(const std::filesystem::path& path, std::span<const SurgeryRecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_csv_row(out, surgery_csv_header());
  for (const auto& r : records) write_csv_row(out, to_csv_row(r));
  if (!out) throw DataError("write failed: " + path.string());
}

std::vector<SurgeryRecord> read_corpus_csv(const std::filesystem::path& path) {
  const CsvTable table = read_csv_file(path);
  (void)table.column("duration_minutes");
  std::vector<SurgeryRecord> records;
  records.reserve(table.rows.size());
  for (const auto& row : table.rows) records.push_back(from_csv_row(table.header, row));
  return records;
}

void write_ground_truth_csv(const std::filesystem::path& path, std::span<const GroundTruth> truth) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_csv_row(out, {"record_id", "true_shape", "true_scale_hours", "true_mean_hours",
                      "true_sigma_hours"});
  for (const auto& t : truth) {
    write_csv_row(out, {std::to_string(t.record_id), format_double(t.shape),
                        format_double(t.scale_hours), format_double(t.mean_hours()),
                        format_double(t.sigma_hours())});
  }
  if (!out) throw DataError("write failed: " + path.string());
}

std::vector<GroundTruth> read_ground_truth_csv(const std::filesystem::path& path) {
  const CsvTable table = read_csv_file(path);
  const std::size_t id = table.column("record_id");
  const std::size_t shape = table.column("true_shape");
  const std::size_t scale = table.column("true_scale_hours");
  std::vector<GroundTruth> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    try {
      out.push_back({std::stoll(row[id]), std::stod(row[shape]), std::stod(row[scale])});
    } catch (const std::exception&) {
      throw DataError("ground truth: unparsable row for record " + row[id]);
    }
  }
  return out;
}

std::vector<GroundTruth> truth_for(std::span<const SurgeryRecord> records,
                                   std::span<const GroundTruth> truth) {
  std::unordered_map<std::int64_t, const GroundTruth*> by_id;
  for (const auto& t : truth) by_id[t.record_id] = &t;
  std::vector<GroundTruth> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    auto it = by_id.find(r.record_id);
    if (it == by_id.end()) {
      throw DataError("no ground truth for record " + std::to_string(r.record_id));
    }
    out.push_back(*it->second);
  }
  return out;
}

}  // namespace hsreg
