// Copyright 2026 The Unlearn-DP Authors.
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

#include "unlearn/experiments.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "Eigen/Dense"
#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "json.hpp"
#include "unlearn/audit.h"
#include "unlearn/dataset.h"
#include "unlearn/errors.h"
#include "unlearn/hard_instance.h"
#include "unlearn/parallel.h"
#include "unlearn/random.h"
#include "unlearn/status_macros.h"
#include "unlearn/trainer.h"

namespace unlearn {
namespace {

using json = nlohmann::json;

absl::Status Invalid(absl::string_view message) {
  return MakeError(ErrorKind::kInvalidParameter, message);
}

template <typename T>
absl::StatusOr<std::vector<T>> ParseList(absl::string_view key,
                                         absl::string_view value) {
  std::vector<T> out;
  for (absl::string_view item : absl::StrSplit(value, ',')) {
    item = absl::StripAsciiWhitespace(item);
    T parsed;
    bool ok;
    if constexpr (std::is_same_v<T, double>) {
      ok = absl::SimpleAtod(item, &parsed);
    } else {
      ok = absl::SimpleAtoi(item, &parsed);
    }
    if (!ok) {
      return Invalid(absl::StrCat("bad value '", item, "' for key ", key));
    }
    out.push_back(parsed);
  }
  return out;
}

template <typename T>
absl::StatusOr<T> ParseScalar(absl::string_view key, absl::string_view value) {
  UNLEARN_ASSIGN_OR_RETURN(std::vector<T> list, ParseList<T>(key, value));
  if (list.size() != 1) {
    return Invalid(absl::StrCat("key ", key, " takes a single value"));
  }
  return list[0];
}

std::string JoinDoubles(const std::vector<double>& values) {
  std::vector<std::string> parts;
  for (double v : values) parts.push_back(FormatDouble(v));
  return absl::StrJoin(parts, ",");
}

// One training run, summarized.
struct Outcome {
  double risk = 0.0;
  double excess = 0.0;
  absl::Status status;
};

struct PointSpec {
  int64_t n = 0;
  int64_t d = 0;
  int64_t m = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  double alpha = 0.0;
};

uint64_t DatasetSeed(const ExperimentConfig& config, int64_t n, int64_t d,
                     int64_t s) {
  return DeriveSeed(DeriveSeed(DeriveSeed(config.seed, n), d), s);
}

// Datasets and training noise depend only on (n, d, seed index), so runs
// at different m and epsilon share them.
absl::StatusOr<Dataset> MakeDataset(const ExperimentConfig& config, int64_t n,
                                    int64_t d, int64_t s) {
  return GenerateHardDataset(
      n, d, DatasetSeed(config, n, d, s),
      std::vector<double>(static_cast<size_t>(d), config.bias));
}

absl::StatusOr<Outcome> RunOnce(const ExperimentConfig& config,
                                const PointSpec& p, int64_t s) {
  const LossSpec loss = LinearHardInstanceLoss();
  UNLEARN_ASSIGN_OR_RETURN(Dataset dataset, MakeDataset(config, p.n, p.d, s));
  UNLEARN_ASSIGN_OR_RETURN(
      ProductDistribution dist,
      ProductDistribution::Uniform(static_cast<size_t>(p.d), config.bias));
  const uint64_t train_seed = DeriveSeed(DatasetSeed(config, p.n, p.d, s), 1);
  Vector theta;
  Dataset remaining = dataset;
  if (p.m == 0) {
    TrainerConfig trainer;
    trainer.steps = StepsFor(config, p.n);
    trainer.seed = train_seed;
    UNLEARN_ASSIGN_OR_RETURN(Model model,
                             NoisyGradientDescent(dataset, loss, trainer));
    theta = std::move(model.params);
  } else {
    LearnOptions options;
    options.steps = StepsFor(config, p.n);
    options.seed = train_seed;
    options.regime = config.regime;
    options.capacity_constant = config.capacity_constant;
    UNLEARN_ASSIGN_OR_RETURN(
        LearnResult learned,
        Learn(dataset, loss, {p.epsilon, p.delta}, p.m, p.alpha, options));
    UNLEARN_ASSIGN_OR_RETURN(DeletionRequest request,
                             AlignedDeletion(dataset, p.m));
    CertificateLedger ledger(learned.certificate);
    UNLEARN_ASSIGN_OR_RETURN(
        Model model, UnlearnLazy(request, learned.model,
                                 ComputeSideInformation(dataset), ledger));
    theta = std::move(model.params);
    UNLEARN_ASSIGN_OR_RETURN(remaining, RemoveIndices(dataset, request.indices));
  }
  Outcome out;
  UNLEARN_ASSIGN_OR_RETURN(out.risk, PopulationExcessRisk(theta, dist));
  UNLEARN_ASSIGN_OR_RETURN(out.excess,
                           ExcessEmpiricalLoss(theta, remaining, loss));
  return out;
}

void MeanAndStandardError(const std::vector<double>& values, double& mean,
                          double& se) {
  const double k = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  mean = sum / k;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  se = values.size() > 1 ? std::sqrt(ss / (k - 1.0) / k) : 0.0;
}

// Runs `points`, each over config.seeds seeds, in one parallel pass. When
// `paired` is set every (n, d) also gets the m = 0 baseline and the records
// carry the paired privacy term.
std::vector<SweepRecord> RunPoints(const ExperimentConfig& config,
                                   const std::vector<PointSpec>& points,
                                   bool paired) {
  const int64_t seeds = config.seeds;
  std::map<std::pair<int64_t, int64_t>, size_t> baseline_index;
  std::vector<PointSpec> jobs_points;
  for (const PointSpec& p : points) {
    if (p.m == 0 || paired) {
      auto [it, inserted] =
          baseline_index.emplace(std::make_pair(p.n, p.d), jobs_points.size());
      if (inserted) jobs_points.push_back({p.n, p.d, 0, 0.0, 0.0, 0.0});
    }
  }
  const size_t baselines = jobs_points.size();
  for (const PointSpec& p : points) {
    if (p.m > 0) jobs_points.push_back(p);
  }
  std::vector<Outcome> outcomes(jobs_points.size() *
                                static_cast<size_t>(seeds));
  ParallelFor(static_cast<int64_t>(outcomes.size()),
              [&](int64_t job) -> absl::Status {
                const PointSpec& p = jobs_points[static_cast<size_t>(job / seeds)];
                absl::StatusOr<Outcome> out = RunOnce(config, p, job % seeds);
                Outcome& slot = outcomes[static_cast<size_t>(job)];
                if (out.ok()) {
                  slot = *out;
                } else {
                  slot.status = out.status();
                }
                return absl::OkStatus();
              })
      .IgnoreError();  // errors are kept per outcome

  auto outcomes_of = [&](size_t job_point) {
    return std::vector<Outcome>(
        outcomes.begin() + static_cast<ptrdiff_t>(job_point * seeds),
        outcomes.begin() + static_cast<ptrdiff_t>((job_point + 1) * seeds));
  };
  auto first_error = [](const std::vector<Outcome>& runs) -> std::string {
    for (size_t s = 0; s < runs.size(); ++s) {
      if (!runs[s].status.ok()) {
        return absl::StrCat("seed ", s, ": ", runs[s].status.ToString());
      }
    }
    return "";
  };

  std::vector<SweepRecord> records;
  size_t next_private = baselines;
  for (const PointSpec& p : points) {
    SweepRecord r;
    r.n = p.n;
    r.d = p.d;
    r.m = p.m;
    r.epsilon = p.epsilon;
    r.delta = p.delta;
    r.alpha = p.alpha;
    r.seeds = seeds;
    r.steps = StepsFor(config, p.n);
    CapacityQuery query;
    query.regime = config.regime;
    query.n = p.n;
    query.d = p.d;
    query.alpha = p.alpha;
    query.budget = {p.epsilon, p.delta};
    query.constant = config.capacity_constant;
    if (auto capacity = DeletionCapacity(query); capacity.ok()) {
      r.predicted_capacity = *capacity;
    } else {
      r.error = capacity.status().ToString();
    }

    std::vector<Outcome> base;
    if (p.m == 0 || paired) {
      base = outcomes_of(baseline_index.at({p.n, p.d}));
    }
    const std::vector<Outcome> runs =
        p.m == 0 ? base : outcomes_of(next_private++);
    if (r.error.empty()) r.error = first_error(runs);
    if (r.error.empty() && paired) r.error = first_error(base);
    if (!r.error.empty()) {
      records.push_back(std::move(r));
      continue;
    }
    std::vector<double> risk, excess, diff;
    for (size_t s = 0; s < runs.size(); ++s) {
      risk.push_back(runs[s].risk);
      excess.push_back(runs[s].excess);
      if (!base.empty()) diff.push_back(runs[s].risk - base[s].risk);
    }
    MeanAndStandardError(risk, r.mean_population_risk, r.se_population_risk);
    MeanAndStandardError(excess, r.mean_excess_empirical,
                         r.se_excess_empirical);
    if (!diff.empty()) {
      double mean, se;
      MeanAndStandardError(diff, mean, se);
      r.privacy_term = mean;
      r.se_privacy_term = se;
    }
    r.within_alpha = r.mean_population_risk <= r.alpha;
    records.push_back(std::move(r));
  }
  return records;
}

std::string CsvField(const std::optional<double>& v) {
  return v.has_value() ? FormatDouble(*v) : "";
}

std::string CsvQuote(const std::string& s) {
  if (s.empty()) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += (c == '\n' ? ' ' : c);
  }
  return out + "\"";
}

json ConstantFitJson(const ConstantFit& fit) {
  return json{{"constant", fit.constant},
              {"envelope", fit.envelope},
              {"relative_rms", fit.relative_rms},
              {"points", fit.points},
              {"residuals", fit.residuals}};
}

}  // namespace

int64_t StepsFor(const ExperimentConfig& config, int64_t n) {
  if (config.steps > 0) return config.steps;
  const double nd = static_cast<double>(n);
  return std::max<int64_t>(1, std::llround(config.steps_factor * nd * nd));
}

absl::Status ValidateExperimentConfig(const ExperimentConfig& c) {
  if (c.n.empty() || c.d.empty() || c.m.empty() || c.epsilon.empty() ||
      c.delta.empty() || c.alpha.empty()) {
    return Invalid("every grid axis needs at least one value");
  }
  for (int64_t n : c.n) {
    if (n < 2) return Invalid(absl::StrCat("n must be >= 2, got ", n));
  }
  for (int64_t d : c.d) {
    if (d < 1) return Invalid(absl::StrCat("d must be >= 1, got ", d));
  }
  const int64_t n_min = *std::min_element(c.n.begin(), c.n.end());
  for (int64_t m : c.m) {
    if (m < 0 || m >= n_min) {
      return Invalid(absl::StrCat("m must lie in [0, n), got ", m));
    }
  }
  for (double e : c.epsilon) {
    if (!(e > 0.0) || !std::isfinite(e)) {
      return Invalid(absl::StrCat("epsilon must be finite and > 0, got ", e));
    }
  }
  for (double delta : c.delta) {
    if (!(delta > 0.0 && delta < 1.0)) {
      return Invalid(absl::StrCat("delta must lie in (0, 1), got ", delta));
    }
  }
  for (double a : c.alpha) {
    if (!(a >= 0.0 && a <= 1.0)) {
      return Invalid(absl::StrCat("alpha must lie in [0, 1], got ", a));
    }
  }
  if (c.seeds < 1) return Invalid("seeds must be >= 1");
  if (c.steps < 0) return Invalid("steps must be >= 0");
  if (!(c.steps_factor > 0.0) || !std::isfinite(c.steps_factor)) {
    return Invalid("steps_factor must be finite and > 0");
  }
  if (!(c.bias >= 0.0 && c.bias <= 1.0) || c.bias == 0.5) {
    return Invalid("bias must lie in [0, 1] and differ from 1/2");
  }
  if (!(c.capacity_constant > 0.0) || !std::isfinite(c.capacity_constant)) {
    return Invalid("capacity_constant must be finite and > 0");
  }
  if (IsPureRegime(c.regime)) {
    return MakeError(ErrorKind::kRegimeMismatch,
                     "sweeps train under zCDP, which certifies only "
                     "approximate-DP regimes");
  }
  if (c.audit_trials != 0 && c.audit_trials < 1000) {
    return Invalid("audit_trials must be 0 or >= 1000");
  }
  return absl::OkStatus();
}

absl::StatusOr<ExperimentConfig> ParseExperimentConfig(absl::string_view text) {
  ExperimentConfig c;
  std::set<std::string> seen;
  int line_number = 0;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    ++line_number;
    if (size_t hash = line.find('#'); hash != absl::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = absl::StripAsciiWhitespace(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == absl::string_view::npos) {
      return Invalid(absl::StrCat("line ", line_number, ": expected key = value"));
    }
    std::string key(absl::StripAsciiWhitespace(line.substr(0, eq)));
    const absl::string_view value = absl::StripAsciiWhitespace(line.substr(eq + 1));
    if (key == "eps") key = "epsilon";
    if (!seen.insert(key).second) {
      return Invalid(absl::StrCat("line ", line_number, ": duplicate key ", key));
    }
    if (key == "n") {
      UNLEARN_ASSIGN_OR_RETURN(c.n, ParseList<int64_t>(key, value));
    } else if (key == "d") {
      UNLEARN_ASSIGN_OR_RETURN(c.d, ParseList<int64_t>(key, value));
    } else if (key == "m") {
      UNLEARN_ASSIGN_OR_RETURN(c.m, ParseList<int64_t>(key, value));
    } else if (key == "epsilon") {
      UNLEARN_ASSIGN_OR_RETURN(c.epsilon, ParseList<double>(key, value));
    } else if (key == "delta") {
      UNLEARN_ASSIGN_OR_RETURN(c.delta, ParseList<double>(key, value));
    } else if (key == "alpha") {
      UNLEARN_ASSIGN_OR_RETURN(c.alpha, ParseList<double>(key, value));
    } else if (key == "seeds") {
      UNLEARN_ASSIGN_OR_RETURN(c.seeds, ParseScalar<int64_t>(key, value));
    } else if (key == "seed") {
      UNLEARN_ASSIGN_OR_RETURN(c.seed, ParseScalar<uint64_t>(key, value));
    } else if (key == "regime") {
      UNLEARN_ASSIGN_OR_RETURN(c.regime, ParseCapacityRegime(value));
    } else if (key == "steps") {
      UNLEARN_ASSIGN_OR_RETURN(c.steps, ParseScalar<int64_t>(key, value));
    } else if (key == "steps_factor") {
      UNLEARN_ASSIGN_OR_RETURN(c.steps_factor, ParseScalar<double>(key, value));
    } else if (key == "bias") {
      UNLEARN_ASSIGN_OR_RETURN(c.bias, ParseScalar<double>(key, value));
    } else if (key == "capacity_constant") {
      UNLEARN_ASSIGN_OR_RETURN(c.capacity_constant,
                               ParseScalar<double>(key, value));
    } else if (key == "audit_trials") {
      UNLEARN_ASSIGN_OR_RETURN(c.audit_trials, ParseScalar<int64_t>(key, value));
    } else if (key == "output_dir") {
      c.output_dir = std::string(value);
    } else {
      return Invalid(absl::StrCat("line ", line_number, ": unknown key ", key));
    }
  }
  UNLEARN_RETURN_IF_ERROR(ValidateExperimentConfig(c));
  return c;
}

absl::StatusOr<ExperimentConfig> ReadExperimentConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) return Invalid(absl::StrCat("cannot open config ", path));
  std::stringstream text;
  text << in.rdbuf();
  return ParseExperimentConfig(text.str());
}

std::string ExperimentConfigToText(const ExperimentConfig& c) {
  std::string out;
  absl::StrAppend(&out, "n = ", absl::StrJoin(c.n, ","), "\n");
  absl::StrAppend(&out, "d = ", absl::StrJoin(c.d, ","), "\n");
  absl::StrAppend(&out, "m = ", absl::StrJoin(c.m, ","), "\n");
  absl::StrAppend(&out, "epsilon = ", JoinDoubles(c.epsilon), "\n");
  absl::StrAppend(&out, "delta = ", JoinDoubles(c.delta), "\n");
  absl::StrAppend(&out, "alpha = ", JoinDoubles(c.alpha), "\n");
  absl::StrAppend(&out, "seeds = ", c.seeds, "\n");
  absl::StrAppend(&out, "seed = ", c.seed, "\n");
  absl::StrAppend(&out, "regime = ", RegimeName(c.regime), "\n");
  absl::StrAppend(&out, "steps = ", c.steps, "\n");
  absl::StrAppend(&out, "steps_factor = ", FormatDouble(c.steps_factor), "\n");
  absl::StrAppend(&out, "bias = ", FormatDouble(c.bias), "\n");
  absl::StrAppend(&out, "capacity_constant = ",
                  FormatDouble(c.capacity_constant), "\n");
  absl::StrAppend(&out, "audit_trials = ", c.audit_trials, "\n");
  if (!c.output_dir.empty()) {
    absl::StrAppend(&out, "output_dir = ", c.output_dir, "\n");
  }
  return out;
}

absl::StatusOr<SweepResult> RunCapacitySweep(const ExperimentConfig& config) {
  UNLEARN_RETURN_IF_ERROR(ValidateExperimentConfig(config));
  std::vector<PointSpec> points;
  for (int64_t n : config.n) {
    for (int64_t d : config.d) {
      for (int64_t m : config.m) {
        for (double e : config.epsilon) {
          for (double delta : config.delta) {
            for (double a : config.alpha) points.push_back({n, d, m, e, delta, a});
          }
        }
      }
    }
  }
  const bool paired = std::find(config.m.begin(), config.m.end(), 0) !=
                      config.m.end();
  SweepResult result;
  result.config = config;
  result.records = RunPoints(config, points, paired);

  if (config.audit_trials > 0) {
    for (SweepRecord& r : result.records) {
      if (r.m == 0 || !r.ok()) continue;
      absl::StatusOr<AuditReport> report = [&]() -> absl::StatusOr<AuditReport> {
        UNLEARN_ASSIGN_OR_RETURN(Dataset dataset,
                                 MakeDataset(config, r.n, r.d, 0));
        UNLEARN_ASSIGN_OR_RETURN(DeletionRequest request,
                                 AlignedDeletion(dataset, r.m));
        AuditOptions options;
        options.trials = config.audit_trials;
        options.seed = DeriveSeed(DatasetSeed(config, r.n, r.d, 0), 2);
        options.alpha = r.alpha;
        options.learn.steps = r.steps;
        options.learn.regime = config.regime;
        return AuditUnlearning(dataset, request, LinearHardInstanceLoss(),
                               {r.epsilon, r.delta}, r.m, options);
      }();
      if (report.ok()) {
        r.audit_epsilon = report->epsilon_hat;
      } else {
        r.error = absl::StrCat("audit: ", report.status().ToString());
      }
    }
  }
  return result;
}

absl::StatusOr<double> CapacityFeature(CapacityRegime regime,
                                       const SweepRecord& r) {
  if (r.n < 1 || r.d < 1 || !(r.epsilon > 0.0)) {
    return Invalid("feature needs n >= 1, d >= 1 and epsilon > 0");
  }
  const double base = static_cast<double>(r.m) / (r.n * r.epsilon);
  if (IsPureRegime(regime)) return base * static_cast<double>(r.d);
  if (!(r.delta > 0.0 && r.delta < 1.0)) {
    return Invalid("approximate regimes need delta in (0, 1)");
  }
  return base * std::sqrt(static_cast<double>(r.d) * -std::log(r.delta));
}

bool PrivacyDominated(const SweepRecord& r) {
  if (!r.ok() || r.m < 1 || !r.privacy_term.has_value()) return false;
  const double baseline = r.mean_population_risk - *r.privacy_term;
  return *r.privacy_term > 0.0 && *r.privacy_term >= 2.0 * baseline &&
         r.mean_population_risk <= 0.1;
}

absl::StatusOr<ConstantFit> FitCapacityConstant(
    const std::vector<SweepRecord>& records, CapacityRegime regime) {
  std::vector<double> xs, ys, totals;
  for (const SweepRecord& r : records) {
    if (!r.ok() || r.m < 1) continue;
    if (r.privacy_term.has_value() && !PrivacyDominated(r)) continue;
    UNLEARN_ASSIGN_OR_RETURN(const double x, CapacityFeature(regime, r));
    xs.push_back(x);
    ys.push_back(r.privacy_term.value_or(r.mean_population_risk));
    totals.push_back(r.mean_population_risk);
  }
  if (xs.size() < 6) {
    return MakeError(ErrorKind::kInsufficientData,
                     absl::StrCat("need >= 6 privacy-dominated points, have ",
                                  xs.size()));
  }
  double sxy = 0.0, sxx = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxy += xs[i] * ys[i];
    sxx += xs[i] * xs[i];
  }
  if (!(sxx > 0.0) || !(sxy > 0.0)) {
    return MakeError(ErrorKind::kInsufficientData,
                     "degenerate design for the constant fit");
  }
  ConstantFit fit;
  fit.constant = sxy / sxx;
  fit.points = static_cast<int64_t>(xs.size());
  double ss = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    const double predicted = fit.constant * xs[i];
    const double rel = (ys[i] - predicted) / predicted;
    fit.residuals.push_back(rel);
    ss += rel * rel;
    fit.envelope = std::max(fit.envelope, totals[i] / xs[i]);
  }
  fit.relative_rms = std::sqrt(ss / xs.size());
  return fit;
}

absl::StatusOr<SlopeFit> FitRiskSlopes(const std::vector<SweepRecord>& records) {
  std::vector<const SweepRecord*> used;
  for (const SweepRecord& r : records) {
    if (PrivacyDominated(r)) used.push_back(&r);
  }
  constexpr int kColumns = 5;
  if (used.size() <= kColumns) {
    return MakeError(ErrorKind::kInsufficientData,
                     absl::StrCat("need > 5 privacy-dominated points, have ",
                                  used.size()));
  }
  const Eigen::Index rows = static_cast<Eigen::Index>(used.size());
  Eigen::MatrixXd x(rows, kColumns);
  Eigen::VectorXd y(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const SweepRecord& r = *used[static_cast<size_t>(i)];
    x(i, 0) = std::log(static_cast<double>(r.m));
    x(i, 1) = -std::log(static_cast<double>(r.n));
    x(i, 2) = 0.5 * std::log(static_cast<double>(r.d));
    x(i, 3) = -std::log(r.epsilon);
    x(i, 4) = 1.0;
    y(i) = std::log(*r.privacy_term);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < kColumns) {
    return MakeError(ErrorKind::kInsufficientData,
                     "the grid does not vary every factor");
  }
  const Eigen::VectorXd beta = qr.solve(y);
  const Eigen::VectorXd residual = y - x * beta;
  const double rss = residual.squaredNorm();
  const double tss = (y.array() - y.mean()).square().sum();
  const Eigen::MatrixXd cov =
      (x.transpose() * x).inverse() * (rss / static_cast<double>(rows - kColumns));
  SlopeFit fit;
  fit.m = beta(0);
  fit.inv_n = beta(1);
  fit.sqrt_d = beta(2);
  fit.inv_epsilon = beta(3);
  fit.intercept = beta(4);
  for (int k = 0; k < kColumns; ++k) {
    fit.standard_errors.push_back(std::sqrt(std::max(0.0, cov(k, k))));
  }
  fit.r_squared = tss > 0.0 ? 1.0 - rss / tss : 1.0;
  fit.points = rows;
  return fit;
}

absl::StatusOr<TightnessReport> CheckTightness(const SweepResult& sweep) {
  TightnessReport report;
  UNLEARN_ASSIGN_OR_RETURN(report.slopes, FitRiskSlopes(sweep.records));
  UNLEARN_ASSIGN_OR_RETURN(
      report.pooled, FitCapacityConstant(sweep.records, sweep.config.regime));
  report.slopes_ok = true;
  for (double s : {report.slopes.m, report.slopes.inv_n, report.slopes.sqrt_d,
                   report.slopes.inv_epsilon}) {
    report.slopes_ok = report.slopes_ok && std::abs(s - 1.0) <= 0.2;
  }
  report.constant_ok = true;
  for (int64_t n : sweep.config.n) {
    std::vector<SweepRecord> subset;
    for (const SweepRecord& r : sweep.records) {
      if (r.n == n) subset.push_back(r);
    }
    absl::StatusOr<ConstantFit> fit =
        FitCapacityConstant(subset, sweep.config.regime);
    if (!fit.ok()) {
      report.constant_ok = false;
      continue;
    }
    report.constant_ok =
        report.constant_ok &&
        std::abs(fit->constant / report.pooled.constant - 1.0) <= 0.25;
    report.by_n.emplace_back(n, *fit);
  }
  return report;
}

absl::StatusOr<ContractResult> EvaluateCapacityContract(
    const ExperimentConfig& config, double fitted_constant) {
  UNLEARN_RETURN_IF_ERROR(ValidateExperimentConfig(config));
  if (!(fitted_constant > 0.0) || !std::isfinite(fitted_constant)) {
    return Invalid("fitted constant must be finite and > 0");
  }
  ContractResult result;
  result.constant = fitted_constant;
  std::vector<PointSpec> runnable;
  for (int64_t n : config.n) {
    for (int64_t d : config.d) {
      for (double e : config.epsilon) {
        for (double delta : config.delta) {
          for (double a : config.alpha) {
            CapacityQuery query;
            query.regime = config.regime;
            query.n = n;
            query.d = d;
            query.alpha = a;
            query.budget = {e, delta};
            query.constant = 1.0 / fitted_constant;
            UNLEARN_ASSIGN_OR_RETURN(const int64_t m, DeletionCapacity(query));
            ContractPoint point;
            point.record.n = n;
            point.record.d = d;
            point.record.m = m;
            point.record.epsilon = e;
            point.record.delta = delta;
            point.record.alpha = a;
            point.record.predicted_capacity = m;
            point.evaluated = m > 0;
            if (point.evaluated) runnable.push_back({n, d, m, e, delta, a});
            result.points.push_back(std::move(point));
          }
        }
      }
    }
  }
  std::vector<SweepRecord> records = RunPoints(config, runnable, false);
  size_t next = 0;
  for (ContractPoint& point : result.points) {
    if (!point.evaluated) continue;
    const int64_t m = point.record.m;
    point.record = std::move(records[next++]);
    point.record.predicted_capacity = m;
    if (!point.record.ok()) {
      return absl::InternalError(
          absl::StrCat("contract point failed: ", point.record.error));
    }
    point.satisfied = point.record.within_alpha;
    ++result.evaluated;
    result.satisfied += point.satisfied;
  }
  return result;
}

std::string SweepCsv(const SweepResult& sweep) {
  std::string out =
      "n,d,m,epsilon,delta,alpha,seeds,steps,mean_excess_empirical,"
      "se_excess_empirical,mean_population_risk,se_population_risk,"
      "privacy_term,se_privacy_term,predicted_capacity,within_alpha,"
      "audit_epsilon,error\n";
  for (const SweepRecord& r : sweep.records) {
    absl::StrAppend(
        &out, r.n, ",", r.d, ",", r.m, ",", FormatDouble(r.epsilon), ",",
        FormatDouble(r.delta), ",", FormatDouble(r.alpha), ",", r.seeds, ",",
        r.steps, ",", FormatDouble(r.mean_excess_empirical), ",",
        FormatDouble(r.se_excess_empirical), ",",
        FormatDouble(r.mean_population_risk), ",",
        FormatDouble(r.se_population_risk), ",", CsvField(r.privacy_term), ",",
        CsvField(r.se_privacy_term), ",", r.predicted_capacity, ",",
        r.within_alpha ? 1 : 0, ",", CsvField(r.audit_epsilon), ",",
        CsvQuote(r.error), "\n");
  }
  return out;
}

std::string SweepSummaryJson(const SweepResult& sweep,
                             const absl::StatusOr<TightnessReport>& tightness) {
  json j;
  j["config"] = ExperimentConfigToText(sweep.config);
  j["records"] = sweep.records.size();
  int64_t failed = 0;
  for (const SweepRecord& r : sweep.records) failed += !r.ok();
  j["failed_points"] = failed;
  if (tightness.ok()) {
    const TightnessReport& t = *tightness;
    j["fitted_constant"] = ConstantFitJson(t.pooled);
    json by_n = json::array();
    for (const auto& [n, fit] : t.by_n) {
      json entry = ConstantFitJson(fit);
      entry["n"] = n;
      by_n.push_back(entry);
    }
    j["constant_by_n"] = by_n;
    j["slopes"] = {{"m", t.slopes.m},
                   {"inv_n", t.slopes.inv_n},
                   {"sqrt_d", t.slopes.sqrt_d},
                   {"inv_epsilon", t.slopes.inv_epsilon},
                   {"intercept", t.slopes.intercept},
                   {"standard_errors", t.slopes.standard_errors},
                   {"r_squared", t.slopes.r_squared},
                   {"points", t.slopes.points}};
    j["slopes_pass"] = t.slopes_ok;
    j["constant_pass"] = t.constant_ok;
    j["pass"] = t.ok();
  } else {
    j["tightness_error"] = tightness.status().ToString();
    j["pass"] = false;
  }
  return j.dump(2);
}

absl::Status WriteSweep(const SweepResult& sweep,
                        const absl::StatusOr<TightnessReport>& tightness) {
  const std::string& dir = sweep.config.output_dir;
  if (dir.empty()) return Invalid("output_dir is not set");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    return absl::UnavailableError(
        absl::StrCat("cannot create ", dir, ": ", ec.message()));
  }
  for (const auto& [name, body] :
       {std::make_pair(std::string("sweep.csv"), SweepCsv(sweep)),
        std::make_pair(std::string("summary.json"),
                       SweepSummaryJson(sweep, tightness) + "\n")}) {
    const std::string path = dir + "/" + name;
    std::ofstream out(path);
    out << body;
    if (!out) return absl::UnavailableError(absl::StrCat("write failed: ", path));
  }
  return absl::OkStatus();
}

}  // namespace unlearn
