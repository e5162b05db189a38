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
#include "divergen/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <tuple>

#include <json.hpp>

#include "divergen/error.hpp"

namespace divergen {

using nlohmann::json;

double energy(const std::vector<double>& logits, const EnergyConfig& config) {
  if (!(config.tau > 0.0) || !std::isfinite(config.tau)) throw ValidationError("energy: tau must be positive");
  if (logits.empty()) throw ValidationError("energy: empty logit vector");
  double m = logits.front();
  for (double h : logits) {
    if (!std::isfinite(h)) throw ValidationError("energy: non-finite logit");
    m = std::max(m, h);
  }
  double s = 0.0;
  for (double h : logits) s += std::exp((h - m) / config.tau);
  return -m - config.tau * std::log(s);
}

double energy(const LogitRecord& record, const EnergyConfig& config) {
  try {
    return energy(record.logits, config);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(e.what()) + " (instance " + record.instance_id + ")");
  }
}

std::vector<double> energy_batch(const std::vector<LogitRecord>& records, const EnergyConfig& config) {
  std::vector<double> out(records.size());
  std::vector<std::string> errors(records.size());
  const auto n = static_cast<std::ptrdiff_t>(records.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[i] = energy(records[i], config);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw ValidationError(e);
  }
  return out;
}

GaussianFit fit_gaussian(const std::vector<double>& samples) {
  if (samples.size() < 2) throw ValidationError("fit_gaussian: need at least two samples");
  double sum = 0.0;
  for (double x : samples) {
    if (!std::isfinite(x)) throw ValidationError("fit_gaussian: non-finite sample");
    sum += x;
  }
  const double mu = sum / static_cast<double>(samples.size());
  double ss = 0.0;
  for (double x : samples) ss += (x - mu) * (x - mu);
  const double sigma = std::sqrt(ss / static_cast<double>(samples.size()));
  if (!(sigma > 0.0)) throw ValidationError("fit_gaussian: zero variance");
  return {mu, sigma, samples.size()};
}

double gaussian_kl(const GaussianFit& p, const GaussianFit& q) {
  if (!(p.sigma > 0.0) || !(q.sigma > 0.0)) throw ValidationError("gaussian_kl: sigma must be positive");
  const double d = p.mu - q.mu;
  const double kl = std::log(q.sigma / p.sigma) + (p.sigma * p.sigma + d * d) / (2.0 * q.sigma * q.sigma) - 0.5;
  return std::max(kl, 0.0);
}

std::string_view to_string(ApTask t) { return t == ApTask::box ? "box" : "mask"; }
std::string_view to_string(ApSplit s) { return s == ApSplit::minitrain ? "minitrain" : "val"; }

ApTask parse_ap_task(std::string_view s) {
  if (s == "box" || s == "bbox") return ApTask::box;
  if (s == "mask" || s == "segm") return ApTask::mask;
  throw FormatError("unknown AP task '" + std::string(s) + "'");
}

ApSplit parse_ap_split(std::string_view s) {
  if (s == "minitrain") return ApSplit::minitrain;
  if (s == "val") return ApSplit::val;
  throw FormatError("unknown AP split '" + std::string(s) + "'");
}

TvgOutcome compute_tvg(const std::vector<ApRecord>& records) {
  using Key = std::tuple<int, int>;
  std::map<Key, std::array<std::optional<double>, 2>> table;
  for (const auto& r : records) {
    if (!(r.value >= 0.0 && r.value <= 100.0)) {
      throw ValidationError("AP value out of [0, 100]: " + std::to_string(r.value));
    }
    auto& slot = table[{static_cast<int>(r.group), static_cast<int>(r.task)}][static_cast<int>(r.split)];
    if (slot) {
      throw ValidationError("duplicate AP row for (" + std::string(to_string(r.group)) + ", " +
                            std::string(to_string(r.task)) + ", " + std::string(to_string(r.split)) + ")");
    }
    slot = r.value;
  }
  TvgOutcome out;
  for (const auto& [key, splits] : table) {
    const auto group = static_cast<FrequencyGroup>(std::get<0>(key));
    const auto task = static_cast<ApTask>(std::get<1>(key));
    const auto& mini = splits[static_cast<int>(ApSplit::minitrain)];
    const auto& val = splits[static_cast<int>(ApSplit::val)];
    if (mini && val) {
      out.results.push_back({group, task, *mini - *val});
    } else {
      out.incomplete.push_back({group, task, mini ? ApSplit::val : ApSplit::minitrain});
    }
  }
  return out;
}

std::vector<SigmaBounds> sigma_bounds(const std::vector<SigmaRow>& rows, double k) {
  if (!(k > 0.0)) throw ValidationError("sigma_bounds: k must be positive");
  std::vector<SigmaBounds> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back({r.label, r.mu + k * r.sigma, r.mu - k * r.sigma});
  return out;
}

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  return in;
}

json parse_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace

std::vector<LogitRecord> read_logit_jsonl(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<LogitRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    try {
      const json j = json::parse(line);
      LogitRecord r;
      const json& id = j.at("instance_id");
      r.instance_id = id.is_string() ? id.get<std::string>() : id.dump();
      for (const auto& v : j.at("logits")) {
        if (!v.is_number()) throw FormatError(where + ": logits must be numbers");
        r.logits.push_back(v.get<double>());
      }
      if (r.logits.empty()) throw FormatError(where + ": empty logit vector");
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw FormatError(where + ": " + e.what());
    }
  }
  return out;
}

std::vector<ApRecord> read_ap_records(const std::filesystem::path& path) {
  const json j = parse_file(path);
  if (!j.is_array()) throw FormatError(path.string() + ": expected a JSON array");
  std::vector<ApRecord> out;
  try {
    for (const auto& row : j) {
      out.push_back({parse_frequency_group(row.at("group").get<std::string>()),
                     parse_ap_task(row.at("task").get<std::string>()),
                     parse_ap_split(row.at("split").get<std::string>()), row.at("value").get<double>()});
    }
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return out;
}

std::vector<SigmaRow> read_sigma_rows(const std::filesystem::path& path) {
  const json j = parse_file(path);
  if (!j.is_array()) throw FormatError(path.string() + ": expected a JSON array");
  std::vector<SigmaRow> out;
  try {
    for (const auto& row : j) {
      out.push_back({row.value("label", std::string()), row.at("mu").get<double>(), row.at("sigma").get<double>()});
    }
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return out;
}

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  std::string s(buf);
  // Avoid printing "-0.00".
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}

namespace {

std::string full_precision(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_energy_tsv(std::ostream& out, const std::vector<LogitRecord>& records,
                      const std::vector<double>& energies) {
  if (records.size() != energies.size()) throw ValidationError("energy report: length mismatch");
  out << "instance_id\tenergy\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    out << records[i].instance_id << '\t' << full_precision(energies[i]) << '\n';
  }
}

void write_fit_tsv(std::ostream& out, const std::vector<std::pair<std::string, GaussianFit>>& fits) {
  out << "label\tmu\tsigma\tsamples\n";
  for (const auto& [label, f] : fits) {
    out << label << '\t' << format_fixed(f.mu, 2) << '\t' << format_fixed(f.sigma, 2) << '\t' << f.sample_count
        << '\n';
  }
}

void write_kl_tsv(std::ostream& out, const GaussianFit& p, const GaussianFit& q, double kl) {
  out << "mu_p\tsigma_p\tmu_q\tsigma_q\tkl\n";
  out << format_fixed(p.mu, 2) << '\t' << format_fixed(p.sigma, 2) << '\t' << format_fixed(q.mu, 2) << '\t'
      << format_fixed(q.sigma, 2) << '\t' << format_fixed(kl, 4) << '\n';
}

void write_tvg_tsv(std::ostream& out, const TvgOutcome& outcome) {
  out << "group\ttask\ttvg\n";
  for (const auto& r : outcome.results) {
    out << to_string(r.group) << '\t' << to_string(r.task) << '\t' << format_fixed(r.value, 2) << '\n';
  }
}

void write_sigma_tsv(std::ostream& out, const std::vector<SigmaRow>& rows, const std::vector<SigmaBounds>& bounds) {
  if (rows.size() != bounds.size()) throw ValidationError("sigma report: length mismatch");
  out << "label\tmu\tsigma\tupper\tlower\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << rows[i].label << '\t' << format_fixed(rows[i].mu, 2) << '\t' << format_fixed(rows[i].sigma, 2) << '\t'
        << format_fixed(bounds[i].upper, 2) << '\t' << format_fixed(bounds[i].lower, 2) << '\n';
  }
}

}  // namespace divergen
