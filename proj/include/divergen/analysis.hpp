// Copyright 2026 The divergen Authors. All Rights Reserved.
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
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "divergen/dataset.hpp"

namespace divergen {

struct LogitRecord {
  std::string instance_id;
  std::vector<double> logits;
};

struct EnergyConfig {
  double tau = 0.9;
};

/// F = -tau * log(sum_c exp(h_c / tau)), evaluated with the maximum logit
/// factored out. Throws ValidationError for an empty vector, a non-finite
/// logit or tau <= 0.
double energy(const std::vector<double>& logits, const EnergyConfig& config);
double energy(const LogitRecord& record, const EnergyConfig& config);

/// OpenMP-parallel over records; output order follows input order.
std::vector<double> energy_batch(const std::vector<LogitRecord>& records, const EnergyConfig& config);

struct GaussianFit {
  double mu = 0.0;
  double sigma = 1.0;
  std::size_t sample_count = 0;
};

/// Maximum-likelihood fit: sample mean and population standard deviation.
/// Throws ValidationError for fewer than two samples or zero variance.
GaussianFit fit_gaussian(const std::vector<double>& samples);

/// KL(p || q) between two normal distributions, closed form.
double gaussian_kl(const GaussianFit& p, const GaussianFit& q);

enum class ApTask { box, mask };
enum class ApSplit { minitrain, val };

std::string_view to_string(ApTask t);
std::string_view to_string(ApSplit s);
ApTask parse_ap_task(std::string_view s);
ApSplit parse_ap_split(std::string_view s);

struct ApRecord {
  FrequencyGroup group = FrequencyGroup::frequent;
  ApTask task = ApTask::box;
  ApSplit split = ApSplit::val;
  double value = 0.0;  // percentage in [0, 100]
};

struct TvgResult {
  FrequencyGroup group = FrequencyGroup::frequent;
  ApTask task = ApTask::box;
  double value = 0.0;
};

/// A (group, task) pair for which only one split was supplied.
struct IncompleteTvgPair {
  FrequencyGroup group = FrequencyGroup::frequent;
  ApTask task = ApTask::box;
  ApSplit missing = ApSplit::val;
};

struct TvgOutcome {
  std::vector<TvgResult> results;  // ordered f, c, r then box, mask
  std::vector<IncompleteTvgPair> incomplete;
};

/// TVG = AP(minitrain) - AP(val) per (group, task). Throws ValidationError
/// on duplicate (group, task, split) rows or values outside [0, 100].
TvgOutcome compute_tvg(const std::vector<ApRecord>& records);

struct SigmaRow {
  std::string label;
  double mu = 0.0;
  double sigma = 0.0;
};

struct SigmaBounds {
  std::string label;
  double upper = 0.0;  // mu + k sigma
  double lower = 0.0;  // mu - k sigma
};

/// Throws ValidationError unless k > 0.
std::vector<SigmaBounds> sigma_bounds(const std::vector<SigmaRow>& rows, double k);

/// JSON lines of {"instance_id": ..., "logits": [...]}. Numeric ids are kept
/// in their decimal form. Throws FormatError naming the offending line.
std::vector<LogitRecord> read_logit_jsonl(const std::filesystem::path& path);

/// A JSON array of {"group", "task", "split", "value"} objects.
std::vector<ApRecord> read_ap_records(const std::filesystem::path& path);

/// Reads {"label", "mu", "sigma"} rows from a JSON array.
std::vector<SigmaRow> read_sigma_rows(const std::filesystem::path& path);

// TSV reports. Energies keep full precision; TVG, fits and bounds are
// printed with 2 decimals, KL with 4.
void write_energy_tsv(std::ostream& out, const std::vector<LogitRecord>& records,
                      const std::vector<double>& energies);
void write_fit_tsv(std::ostream& out, const std::vector<std::pair<std::string, GaussianFit>>& fits);
void write_kl_tsv(std::ostream& out, const GaussianFit& p, const GaussianFit& q, double kl);
void write_tvg_tsv(std::ostream& out, const TvgOutcome& outcome);
void write_sigma_tsv(std::ostream& out, const std::vector<SigmaRow>& rows,
                     const std::vector<SigmaBounds>& bounds);

/// Fixed-point rendering used by the reports.
std::string format_fixed(double value, int decimals);

}  // namespace divergen
