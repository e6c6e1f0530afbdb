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


#include "cli.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iterator>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/string_view.h"
#include "unlearn/accountant.h"
#include "unlearn/audit.h"
#include "unlearn/dataset.h"
#include "unlearn/errors.h"
#include "unlearn/experiments.h"
#include "unlearn/hard_instance.h"
#include "unlearn/random.h"
#include "unlearn/status_macros.h"
#include "unlearn/trainer.h"
#include "unlearn/unlearning.h"
#include "unlearn/vector_ops.h"

namespace unlearn {
namespace {

// Bad flag values are usage errors; everything else that stops a command
// (refused deletions, I/O, degenerate data) is a failure.
int ExitFor(const absl::Status& status, std::ostream& err) {
  const std::optional<ErrorKind> kind = GetErrorKind(status);
  err << "error: " << status.message() << "\n";
  if (kind == ErrorKind::kInvalidParameter ||
      kind == ErrorKind::kRegimeMismatch) {
    return kExitUsage;
  }
  return kExitVerificationFailure;
}

absl::StatusOr<DeletionRequest> ParseIndices(const std::string& text) {
  DeletionRequest request;
  if (text.empty()) return request;
  for (absl::string_view field : absl::StrSplit(text, ',')) {
    uint64_t index = 0;
    if (!absl::SimpleAtoi(field, &index)) {
      return MakeError(ErrorKind::kInvalidParameter,
                       absl::StrCat("bad index '", field, "'"));
    }
    request.indices.push_back(static_cast<size_t>(index));
  }
  return request;
}

LossSpec LossFor(const std::string& name, const Dataset& data, double radius) {
  if (name == "squared") {
    double data_radius = 0.0;
    for (const Vector& x : data.points()) {
      data_radius = std::max(data_radius, Norm(x));
    }
    return SquaredDistanceLoss(radius, data_radius);
  }
  return LinearHardInstanceLoss();
}

struct CommonFlags {
  uint64_t seed = 0;
  std::string out;
  std::string config;
};

// ---------------------------------------------------------------- capacity

struct CapacityFlags {
  std::string regime;
  int64_t n = 0;
  int64_t d = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  double alpha = 0.1;
  double constant = 1.0;
  double lipschitz = 1.0;
  std::optional<double> strong_convexity;
};

int RunCapacity(const CapacityFlags& f, std::ostream& out, std::ostream& err) {
  const absl::StatusOr<CapacityRegime> regime = ParseCapacityRegime(f.regime);
  if (!regime.ok()) return ExitFor(regime.status(), err);
  CapacityQuery query;
  query.regime = *regime;
  query.n = f.n;
  query.d = f.d;
  query.alpha = f.alpha;
  query.budget = {f.epsilon, f.delta};
  query.constant = f.constant;
  query.lipschitz = f.lipschitz;
  query.strong_convexity = f.strong_convexity;
  const absl::StatusOr<int64_t> m = DeletionCapacity(query);
  if (!m.ok()) return ExitFor(m.status(), err);
  out << *m << "\n";
  return kExitOk;
}

// ----------------------------------------------------------------- account

struct AccountFlags {
  bool chain = false;
  bool grouposition = false;
  int64_t k = 0;
  int64_t k_max = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  double delta_prime = 0.0;
};

int RunAccount(const AccountFlags& f, std::ostream& out, std::ostream& err) {
  if (f.chain == f.grouposition) {
    err << "error: exactly one of --chain and --grouposition is required\n";
    return kExitUsage;
  }
  if ((f.k > 0) == (f.k_max > 0)) {
    err << "error: exactly one of --k and --k-max is required\n";
    return kExitUsage;
  }
  const int64_t first = f.k > 0 ? f.k : 1;
  const int64_t last = f.k > 0 ? f.k : f.k_max;
  const ApproxDpBudget per_step{f.epsilon, f.delta};
  out << "k,epsilon,delta\n";
  for (int64_t k = first; k <= last; ++k) {
    const absl::StatusOr<ApproxDpBudget> budget =
        f.chain ? ChainBudget(k, per_step)
                : GroupositionBudget(k, per_step, f.delta_prime);
    if (!budget.ok()) return ExitFor(budget.status(), err);
    out << k << "," << FormatDouble(budget->epsilon) << ","
        << FormatDouble(budget->delta) << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- generate

struct GenerateFlags {
  int64_t n = 0;
  int64_t d = 0;
  double bias = kDefaultBias;
  std::string manifest;
};

int RunGenerate(const GenerateFlags& f, const CommonFlags& common,
                std::ostream& out, std::ostream& err) {
  const std::vector<double> bias(f.d > 0 ? static_cast<size_t>(f.d) : 0,
                                 f.bias);
  const absl::StatusOr<Dataset> data =
      GenerateHardDataset(f.n, f.d, common.seed, bias);
  if (!data.ok()) return ExitFor(data.status(), err);
  absl::Status status = WriteDatasetCsv(*data, common.out);
  if (!status.ok()) return ExitFor(status, err);
  const std::string manifest =
      f.manifest.empty() ? common.out + ".manifest.json" : f.manifest;
  status = WriteManifest({f.n, f.d, common.seed, bias}, manifest);
  if (!status.ok()) return ExitFor(status, err);
  out << "wrote " << common.out << " and " << manifest << "\n";
  return kExitOk;
}

// ------------------------------------------------------------------- train

struct TrainFlags {
  std::string data;
  std::string loss = "linear";
  double radius = 1.0;
  std::string learner = "noisy_gd";
  double epsilon = 1.0;
  double delta = 1e-5;
  int64_t m = 1;
  double alpha = 0.1;
  int64_t steps = 0;
  std::string regime = "approx_convex_floor";
  double constant = 1.0;
  std::string certificate;
};

int RunTrain(const TrainFlags& f, const CommonFlags& common, std::ostream& out,
             std::ostream& err) {
  const absl::StatusOr<Dataset> data = ReadDatasetCsv(f.data);
  if (!data.ok()) return ExitFor(data.status(), err);
  LearnOptions options;
  options.seed = common.seed;
  options.steps = f.steps;
  options.capacity_constant = f.constant;
  absl::StatusOr<LearnerKind> learner = ParseLearnerKind(f.learner);
  if (!learner.ok()) return ExitFor(learner.status(), err);
  options.learner = *learner;
  absl::StatusOr<CapacityRegime> regime = ParseCapacityRegime(f.regime);
  if (!regime.ok()) return ExitFor(regime.status(), err);
  options.regime = *regime;
  const absl::StatusOr<LearnResult> result =
      Learn(*data, LossFor(f.loss, *data, f.radius), {f.epsilon, f.delta}, f.m,
            f.alpha, options);
  if (!result.ok()) return ExitFor(result.status(), err);
  absl::Status status = WriteModel(result->model, common.out);
  if (!status.ok()) return ExitFor(status, err);
  const std::string certificate_path =
      f.certificate.empty() ? common.out + ".certificate.json" : f.certificate;
  std::ofstream cert(certificate_path);
  cert << CertificateToJson(result->certificate) << "\n";
  if (!cert) {
    return ExitFor(absl::DataLossError(absl::StrCat(
                       "failed writing certificate ", certificate_path)),
                   err);
  }
  out << CertificateToJson(result->certificate) << "\n";
  return kExitOk;
}

// ----------------------------------------------------------------- unlearn

struct UnlearnFlags {
  std::string model;
  std::string certificate;
  std::string indices;
  std::string ledger;
};

int RunUnlearn(const UnlearnFlags& f, const CommonFlags& common,
               std::ostream& out, std::ostream& err) {
  const absl::StatusOr<Model> model = ReadModel(f.model);
  if (!model.ok()) return ExitFor(model.status(), err);
  std::ifstream cert_in(f.certificate);
  if (!cert_in) {
    return ExitFor(absl::NotFoundError(
                       absl::StrCat("cannot read certificate ", f.certificate)),
                   err);
  }
  const std::string cert_text((std::istreambuf_iterator<char>(cert_in)),
                              std::istreambuf_iterator<char>());
  const absl::StatusOr<UnlearningCertificate> certificate =
      CertificateFromJson(cert_text);
  if (!certificate.ok()) return ExitFor(certificate.status(), err);
  absl::StatusOr<DeletionRequest> request = ParseIndices(f.indices);
  if (!request.ok()) return ExitFor(request.status(), err);
  absl::StatusOr<CertificateLedger> ledger =
      CertificateLedger::Open(*certificate, f.ledger);
  if (!ledger.ok()) return ExitFor(ledger.status(), err);
  const absl::StatusOr<Model> unlearned =
      UnlearnLazy(*request, *model, SideInformation{}, *ledger);
  if (!unlearned.ok()) return ExitFor(unlearned.status(), err);
  if (!common.out.empty()) {
    const absl::Status status = WriteModel(*unlearned, common.out);
    if (!status.ok()) return ExitFor(status, err);
  }
  out << "deleted " << request->size() << ", remaining capacity "
      << ledger->remaining() << "\n";
  return kExitOk;
}

// ------------------------------------------------------------------- audit

struct AuditFlags {
  std::string data;
  int64_t n = 20;
  int64_t d = 1;
  double bias = kDefaultBias;
  double epsilon = 1.0;
  double delta = 1e-5;
  int64_t m = 1;
  double alpha = 0.1;
  std::string indices;
  int64_t deletions = -1;
  int64_t trials = 100000;
  std::string learner = "gaussian_mean";
  int64_t steps = 0;
  int64_t bins = 64;
  int64_t bootstrap = 1000;
  double tolerance = 0.3;
  bool allow_over_capacity = false;
  bool independent_seeds = false;
};

int RunAudit(const AuditFlags& f, const CommonFlags& common, std::ostream& out,
             std::ostream& err) {
  absl::StatusOr<Dataset> data =
      f.data.empty() ? GenerateHardDataset(f.n, f.d, common.seed,
                                           std::vector<double>(
                                               f.d > 0 ? f.d : 0, f.bias))
                     : ReadDatasetCsv(f.data);
  if (!data.ok()) return ExitFor(data.status(), err);
  absl::StatusOr<DeletionRequest> request =
      f.indices.empty()
          ? AlignedDeletion(*data, f.deletions >= 0 ? f.deletions : f.m)
          : ParseIndices(f.indices);
  if (!request.ok()) return ExitFor(request.status(), err);
  AuditOptions options;
  options.trials = f.trials;
  options.seed = common.seed;
  options.shared_seeds = !f.independent_seeds;
  options.enforce_capacity = !f.allow_over_capacity;
  options.alpha = f.alpha;
  options.learn.steps = f.steps;
  absl::StatusOr<LearnerKind> learner = ParseLearnerKind(f.learner);
  if (!learner.ok()) return ExitFor(learner.status(), err);
  options.learn.learner = *learner;
  options.estimate.bins = static_cast<int>(f.bins);
  options.estimate.bootstrap = static_cast<int>(f.bootstrap);
  options.estimate.seed = common.seed;
  options.estimate.tolerance = f.tolerance;
  const absl::StatusOr<AuditReport> report =
      AuditUnlearning(*data, *request, LinearHardInstanceLoss(),
                      {f.epsilon, f.delta}, f.m, options);
  if (!report.ok()) return ExitFor(report.status(), err);
  if (!common.out.empty()) {
    const absl::Status status = WriteReport(*report, common.out);
    if (!status.ok()) return ExitFor(status, err);
  }
  out << ReportToJson(*report) << "\n";
  if (report->verdict == Verdict::kInconclusive) {
    err << "audit inconclusive: output batch concentrated in one cell\n";
  }
  return report->verdict == Verdict::kFail ? kExitVerificationFailure
                                           : kExitOk;
}

// ------------------------------------------------------------------- sweep

struct SweepFlags {
  bool check = false;
  std::optional<int64_t> seeds;
};

int RunSweep(const SweepFlags& f, const CommonFlags& common,
             bool seed_given, std::ostream& out, std::ostream& err) {
  absl::StatusOr<ExperimentConfig> config =
      common.config.empty() ? absl::StatusOr<ExperimentConfig>(ExperimentConfig{})
                            : ReadExperimentConfig(common.config);
  if (!config.ok()) return ExitFor(config.status(), err);
  if (seed_given) config->seed = common.seed;
  if (f.seeds.has_value()) config->seeds = *f.seeds;
  if (!common.out.empty()) config->output_dir = common.out;
  const absl::StatusOr<SweepResult> sweep = RunCapacitySweep(*config);
  if (!sweep.ok()) return ExitFor(sweep.status(), err);
  const absl::StatusOr<TightnessReport> tightness = CheckTightness(*sweep);
  if (!config->output_dir.empty()) {
    const absl::Status status = WriteSweep(*sweep, tightness);
    if (!status.ok()) return ExitFor(status, err);
  }
  int64_t failed = 0;
  for (const SweepRecord& r : sweep->records) failed += r.ok() ? 0 : 1;
  out << "records " << sweep->records.size() << ", failed " << failed << "\n";
  if (tightness.ok()) {
    const SlopeFit& s = tightness->slopes;
    out << "constant " << FormatDouble(tightness->pooled.constant)
        << ", envelope " << FormatDouble(tightness->pooled.envelope) << "\n"
        << "slopes m " << FormatDouble(s.m) << ", 1/n "
        << FormatDouble(s.inv_n) << ", sqrt(d) " << FormatDouble(s.sqrt_d)
        << ", 1/eps " << FormatDouble(s.inv_epsilon) << "\n"
        << "tightness " << (tightness->ok() ? "pass" : "fail") << "\n";
  } else {
    out << "tightness unavailable: " << tightness.status().message() << "\n";
  }
  if (failed > 0) return kExitVerificationFailure;
  if (f.check && !(tightness.ok() && tightness->ok())) {
    return kExitVerificationFailure;
  }
  return kExitOk;
}

// ---------------------------------------------------------- identity-check

struct IdentityFlags {
  int64_t n = 64;
  int64_t d = 8;
  double bias = kDefaultBias;
  int64_t samples = 1000;
};

absl::StatusOr<bool> IdentityInvariants(
    const IdentityFlags& f, uint64_t seed,
    const std::function<void(absl::string_view, bool)>& report) {
  const std::vector<double> bias(f.d > 0 ? static_cast<size_t>(f.d) : 0,
                                 f.bias);
  UNLEARN_ASSIGN_OR_RETURN(const Dataset s,
                           GenerateHardDataset(f.n, f.d, seed, bias));
  bool all = true;
  auto check = [&](absl::string_view name, bool ok) {
    report(name, ok);
    all = all && ok;
  };
  check("hard_instance_support", IsHardInstance(s));

  UNLEARN_ASSIGN_OR_RETURN(const Vector q, OneWayMarginal(s));
  UNLEARN_ASSIGN_OR_RETURN(const Vector star, MinimizerThetaStar(s));
  check("marginal_norm_at_most_one", Norm(q) <= 1.0 + 1e-15);
  check("minimizer_unit_norm", std::abs(Norm(star) - 1.0) <= 1e-12);

  UNLEARN_ASSIGN_OR_RETURN(const double at_star, LinearLoss(star, s));
  check("minimum_equals_minus_marginal_norm",
        std::abs(at_star + Norm(q)) <= 1e-12);

  Rng rng = MakeRng(DeriveSeed(seed, 1));
  std::normal_distribution<double> normal;
  bool identity = true;
  bool minimal = true;
  for (int64_t t = 0; t < f.samples; ++t) {
    Vector theta(static_cast<size_t>(f.d));
    for (double& v : theta) v = normal(rng);
    theta = Scaled(theta, 1.0 / Norm(theta));
    UNLEARN_ASSIGN_OR_RETURN(const double loss, LinearLoss(theta, s));
    const double lhs = loss - at_star;
    const double rhs = 0.5 * Norm(q) * SquaredDistance(theta, star);
    identity = identity && std::abs(lhs - rhs) <= 1e-9;
    minimal = minimal && lhs >= -1e-12;
  }
  check("excess_loss_identity", identity);
  check("minimizer_is_minimal", minimal);

  UNLEARN_ASSIGN_OR_RETURN(const Dataset replicated, ReplicateDataset(s, 3));
  UNLEARN_ASSIGN_OR_RETURN(const Vector q_replicated,
                           OneWayMarginal(replicated));
  check("replication_preserves_marginal", q_replicated == q);

  const int64_t n_target = f.n + 2 * ((f.n + 1) / 2);
  UNLEARN_ASSIGN_OR_RETURN(const Dataset padded,
                           PadDataset(s, n_target, s.point(0)));
  UNLEARN_ASSIGN_OR_RETURN(const Vector q_padded, OneWayMarginal(padded));
  bool scaled = padded.size() == static_cast<size_t>(n_target);
  for (size_t j = 0; j < q.size(); ++j) {
    scaled = scaled && std::abs(q_padded[j] - q[j] * f.n / n_target) <= 1e-15;
  }
  check("even_padding_scales_marginal", scaled);

  UNLEARN_ASSIGN_OR_RETURN(const Dataset cube, RescaleToSignCube(s));
  UNLEARN_ASSIGN_OR_RETURN(const Dataset back, RescaleToHardInstance(cube));
  check("rescale_round_trip", back == s);

  UNLEARN_ASSIGN_OR_RETURN(const ProductDistribution dist,
                           ProductDistribution::Create(bias));
  UNLEARN_ASSIGN_OR_RETURN(const Vector mu_direction,
                           UnitDirection(dist.Mean()));
  UNLEARN_ASSIGN_OR_RETURN(const double risk_at_best,
                           PopulationExcessRisk(mu_direction, dist));
  UNLEARN_ASSIGN_OR_RETURN(const double risk_at_star,
                           PopulationExcessRisk(star, dist));
  check("population_risk_zero_at_mean_direction",
        std::abs(risk_at_best) <= 1e-12);
  check("population_risk_nonnegative", risk_at_star >= -1e-12);
  return all;
}

int RunIdentityCheck(const IdentityFlags& f, const CommonFlags& common,
                     std::ostream& out, std::ostream& err) {
  const absl::StatusOr<bool> all = IdentityInvariants(
      f, common.seed, [&](absl::string_view name, bool ok) {
        out << (ok ? "PASS " : "FAIL ") << name << "\n";
      });
  if (!all.ok()) return ExitFor(all.status(), err);
  return *all ? kExitOk : kExitVerificationFailure;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Certified machine unlearning through differential privacy",
               "unlearn_dp"};
  app.require_subcommand(1);
  CommonFlags common;

  auto add_seed = [&](CLI::App* sub) {
    return sub->add_option("--seed", common.seed, "Base random seed");
  };

  CapacityFlags cap;
  CLI::App* capacity =
      app.add_subcommand("capacity", "Print the deletion capacity");
  capacity->add_option("--regime", cap.regime, "Capacity regime")->required();
  capacity->add_option("--n", cap.n, "Dataset size")->required();
  capacity->add_option("--d", cap.d, "Dimension")->required();
  capacity->add_option("--eps,--epsilon", cap.epsilon)->required();
  capacity->add_option("--delta", cap.delta);
  capacity->add_option("--alpha", cap.alpha, "Excess-risk budget");
  capacity->add_option("--constant", cap.constant);
  capacity->add_option("--lipschitz", cap.lipschitz);
  capacity->add_option("--strong-convexity", cap.strong_convexity);

  AccountFlags acc;
  CLI::App* account =
      app.add_subcommand("account", "Tabulate chaining or grouposition budgets");
  account->add_flag("--chain", acc.chain, "Sequential unlearning");
  account->add_flag("--grouposition", acc.grouposition,
                    "Unlearners merged by an arbitrary function");
  account->add_option("--k", acc.k, "Single k");
  account->add_option("--k-max", acc.k_max, "Tabulate k = 1..k-max");
  account->add_option("--eps,--epsilon", acc.epsilon)->required();
  account->add_option("--delta", acc.delta)->required();
  account->add_option("--delta-prime", acc.delta_prime);

  GenerateFlags gen;
  CLI::App* generate =
      app.add_subcommand("generate", "Write a hard-instance dataset as CSV");
  generate->add_option("--n", gen.n)->required();
  generate->add_option("--d", gen.d)->required();
  generate->add_option("--bias", gen.bias, "Coordinate bias");
  generate->add_option("--manifest", gen.manifest,
                       "Manifest path (default <out>.manifest.json)");
  add_seed(generate);
  generate->add_option("--out", common.out, "CSV path")->required();

  TrainFlags tr;
  CLI::App* train = app.add_subcommand("train", "Train with a certificate");
  train->add_option("--data", tr.data, "Dataset CSV")->required();
  train->add_option("--loss", tr.loss)
      ->check(CLI::IsMember({"linear", "squared"}));
  train->add_option("--radius", tr.radius, "Parameter ball (squared loss)");
  train->add_option("--learner", tr.learner);
  train->add_option("--eps,--epsilon", tr.epsilon);
  train->add_option("--delta", tr.delta);
  train->add_option("--m", tr.m, "Deletion capacity to certify");
  train->add_option("--alpha", tr.alpha);
  train->add_option("--steps", tr.steps, "Gradient steps (0: n^2)");
  train->add_option("--regime", tr.regime);
  train->add_option("--constant", tr.constant);
  train->add_option("--certificate", tr.certificate,
                    "Certificate path (default <out>.certificate.json)");
  add_seed(train);
  train->add_option("--out", common.out, "Model JSON path")->required();

  UnlearnFlags un;
  CLI::App* unlearn =
      app.add_subcommand("unlearn", "Lazily unlearn a deletion request");
  unlearn->add_option("--model", un.model)->required();
  unlearn->add_option("--certificate", un.certificate)->required();
  unlearn->add_option("--indices", un.indices, "Comma-separated indices");
  unlearn->add_option("--ledger", un.ledger, "JSON-lines ledger")->required();
  unlearn->add_option("--out", common.out, "Unlearned model path");

  AuditFlags au;
  CLI::App* audit =
      app.add_subcommand("audit", "Estimate the unlearning epsilon");
  audit->add_option("--data", au.data, "Dataset CSV (default: generated)");
  audit->add_option("--n", au.n);
  audit->add_option("--d", au.d);
  audit->add_option("--bias", au.bias);
  audit->add_option("--eps,--epsilon", au.epsilon);
  audit->add_option("--delta", au.delta);
  audit->add_option("--m", au.m, "Certified capacity");
  audit->add_option("--alpha", au.alpha);
  audit->add_option("--indices", au.indices, "Deleted indices");
  audit->add_option("--deletions", au.deletions,
                    "Aligned deletions (default m)");
  audit->add_option("--trials", au.trials);
  audit->add_option("--learner", au.learner);
  audit->add_option("--steps", au.steps);
  audit->add_option("--bins", au.bins);
  audit->add_option("--bootstrap", au.bootstrap);
  audit->add_option("--tolerance", au.tolerance);
  audit->add_flag("--allow-over-capacity", au.allow_over_capacity);
  audit->add_flag("--independent-seeds", au.independent_seeds);
  add_seed(audit);
  audit->add_option("--out", common.out, "Report JSON path");

  SweepFlags sw;
  CLI::App* sweep = app.add_subcommand("sweep", "Run a deletion-capacity sweep");
  sweep->add_option("--config", common.config, "Experiment config file");
  CLI::Option* sweep_seed = add_seed(sweep);
  sweep->add_option("--seeds", sw.seeds, "Override seeds per point");
  sweep->add_option("--out", common.out, "Output directory");
  sweep->add_flag("--check", sw.check, "Exit 1 unless the tightness check passes");

  IdentityFlags id;
  CLI::App* identity = app.add_subcommand(
      "identity-check", "Check the hard-instance invariants");
  identity->add_option("--n", id.n);
  identity->add_option("--d", id.d);
  identity->add_option("--bias", id.bias);
  identity->add_option("--samples", id.samples, "Random unit directions");
  add_seed(identity);

  if (!args.empty() && !args[0].empty() && args[0][0] != '-' &&
      app.get_subcommand_no_throw(args[0]) == nullptr) {
    err << "unknown subcommand '" << args[0] << "'\n" << app.help();
    return kExitUsage;
  }

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.push_back("unlearn_dp");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (std::string& a : argv_storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    app.exit(e, out, err);
    err << app.help();
    return kExitUsage;
  }

  if (capacity->parsed()) return RunCapacity(cap, out, err);
  if (account->parsed()) return RunAccount(acc, out, err);
  if (generate->parsed()) return RunGenerate(gen, common, out, err);
  if (train->parsed()) return RunTrain(tr, common, out, err);
  if (unlearn->parsed()) return RunUnlearn(un, common, out, err);
  if (audit->parsed()) return RunAudit(au, common, out, err);
  if (sweep->parsed()) {
    return RunSweep(sw, common, sweep_seed->count() > 0, out, err);
  }
  if (identity->parsed()) return RunIdentityCheck(id, common, out, err);
  err << app.help();
  return kExitUsage;
}

}  // namespace unlearn
