// Copyright 2026 The radialab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "radialab/config.hpp"

namespace radialab {

struct ReportRow {
  std::string experiment;
  std::string shape_id;
  double d = 0.0;
  std::size_t n = 0;
  std::size_t replicate = 0;
  std::string statistic;
  double value = 0.0;
};

/// Rows of one run plus the config that produced them. Rows are kept in
/// canonical order: (shape_id, d, replicate, statistic).
struct ExperimentReport {
  ExperimentConfig config;
  std::vector<ReportRow> rows;

  /// Rows whose statistic is `name`, in canonical order.
  std::vector<ReportRow> select(const std::string& name) const;
};

// Statistic names.
inline constexpr const char* kMeanRatio = "mean_ratio";
inline constexpr const char* kSdRatio = "sd_ratio";
inline constexpr const char* kExceed001 = "p_exceed_0.01";
inline constexpr const char* kExceed005 = "p_exceed_0.05";
inline constexpr const char* kExceed010 = "p_exceed_0.1";
inline constexpr const char* kKsSampled = "ks_sampled";
inline constexpr const char* kKsDeterministic = "ks_deterministic";
inline constexpr const char* kLogInvCd = "log_inv_cd";
inline constexpr const char* kAsymLogInvCd = "asym_log_inv_cd";
inline constexpr const char* kDelta = "delta";
inline constexpr const char* kModeRadius = "mode_radius";
inline constexpr const char* kUdAsymptotic = "ud_asymptotic";
inline constexpr const char* kRatio = "ratio";
inline constexpr const char* kKsTwoSample = "ks_two_sample";
inline constexpr const char* kReject = "reject";
inline constexpr const char* kPower = "power";

/// Worker count: RADIALAB_THREADS if set and positive, else the hardware
/// concurrency. Results never depend on it.
std::size_t worker_count();

/// Per (d, replicate): mean and sd of U/u_ref and the fractions with
/// |U/u_ref - 1| > 0.01, 0.05, 0.1; u_ref is u_star or u_d.
ExperimentReport run_concentration_sweep(const ExperimentConfig& config);
/// Per (d, replicate): KS of the standardized sample against the limit CDF,
/// and the deterministic KS of the exact standardized law (the same on
/// every replicate).
ExperimentReport run_limit_ks(const ExperimentConfig& config);
/// Per d: quadrature log(1/c_d), its asymptotic form and the difference.
ExperimentReport run_constant_check(const ExperimentConfig& config);
/// Per d (LogPoly only): the root u_d, the closed-form approximation and
/// their ratio.
ExperimentReport run_ud_asymptotic_check(const ExperimentConfig& config);
/// Per (d, replicate): two-sample KS between the two shapes at level 0.05
/// and its rejection indicator; per d: rejection rate over replicates.
ExperimentReport run_indistinguishability(const ExperimentConfig& config);

/// Validates the config and dispatches on config.experiment.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// CSV: '#' lines echoing the config, the header
/// `experiment,shape_id,d,n,replicate,statistic,value`, then one row per
/// statistic with numbers in "%.17g".
std::string to_csv(const ExperimentReport& report);
std::string to_json(const ExperimentReport& report);

/// Writes the report in config.format through a temporary file and rename.
void write_report(const ExperimentReport& report, const std::filesystem::path& path);

/// Name of the dumped batch for one (shape, d, replicate) cell.
std::string sample_file_name(std::size_t shape_index, double d, std::size_t replicate);

}  // namespace radialab
