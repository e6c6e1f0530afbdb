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

#include "unlearn/audit.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <utility>

#include "absl/strings/str_cat.h"
#include "boost/math/distributions/normal.hpp"
#include "json.hpp"
#include "unlearn/errors.h"
#include "unlearn/hard_instance.h"
#include "unlearn/parallel.h"
#include "unlearn/random.h"
#include "unlearn/status_macros.h"

namespace unlearn {
namespace {

using json = nlohmann::json;

constexpr double kMaxSearchEpsilon = 512.0;
constexpr int kBisectionIterations = 200;

double Phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Mass of [lo, hi] under N(mean, sd^2), accurate in both tails.
double NormalMass(double lo, double hi, double mean, double sd) {
  if (!(hi > lo)) return 0.0;
  const double z1 = (lo - mean) / sd;
  const double z2 = (hi - mean) / sd;
  if (z1 >= 0.0) return Phi(-z1) - Phi(-z2);
  if (z2 <= 0.0) return Phi(z2) - Phi(z1);
  return 1.0 - Phi(z1) - Phi(-z2);
}

absl::Status Annotate(const absl::Status& status, int64_t trial) {
  const std::string message = absl::StrCat("trial ", trial, ": ",
                                           status.message());
  if (auto kind = GetErrorKind(status)) return MakeError(*kind, message);
  return absl::Status(status.code(), message);
}

struct Histogram {
  std::vector<int64_t> p;
  std::vector<int64_t> q;
  int64_t np = 0;
  int64_t nq = 0;
};

Histogram BuildHistogram(const std::vector<double>& p,
                         const std::vector<double>& q, int bins) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : p) lo = std::min(lo, v), hi = std::max(hi, v);
  for (double v : q) lo = std::min(lo, v), hi = std::max(hi, v);
  const double width = (hi - lo) / bins;
  auto cell = [&](double v) -> size_t {
    if (!(width > 0.0)) return 0;
    const double k = std::floor((v - lo) / width);
    return static_cast<size_t>(std::clamp(k, 0.0, bins - 1.0));
  };
  Histogram h;
  h.p.assign(static_cast<size_t>(bins), 0);
  h.q.assign(static_cast<size_t>(bins), 0);
  for (double v : p) ++h.p[cell(v)];
  for (double v : q) ++h.q[cell(v)];
  h.np = static_cast<int64_t>(p.size());
  h.nq = static_cast<int64_t>(q.size());
  return h;
}

bool Concentrated(const std::vector<int64_t>& counts, int64_t total) {
  return std::any_of(counts.begin(), counts.end(),
                     [&](int64_t c) { return c == total; });
}

// Smoothed frequency of a set holding `count` of `total` samples.
double Smoothed(int64_t count, int64_t total) {
  return (static_cast<double>(count) + 1.0) /
         (static_cast<double>(total) + 2.0);
}

double LogRatio(int64_t cp, int64_t np, int64_t cq, int64_t nq, double delta) {
  const double p = Smoothed(cp, np) - delta;
  if (!(p > 0.0)) return 0.0;
  return std::max(0.0, std::log(p / Smoothed(cq, nq)));
}

double SmoothingCap(int64_t np, int64_t nq, double delta) {
  return std::max(LogRatio(np, np, 0, nq, delta),
                  LogRatio(nq, nq, 0, np, delta));
}

// Max over single cells and upper/lower tails, both directions.
double HistogramEstimate(const Histogram& h, double delta) {
  const size_t bins = h.p.size();
  double best = 0.0;
  auto consider = [&](int64_t cp, int64_t cq) {
    best = std::max(best, LogRatio(cp, h.np, cq, h.nq, delta));
    best = std::max(best, LogRatio(cq, h.nq, cp, h.np, delta));
  };
  int64_t tail_p = 0;
  int64_t tail_q = 0;
  for (size_t i = bins; i-- > 0;) {
    consider(h.p[i], h.q[i]);
    tail_p += h.p[i];
    tail_q += h.q[i];
    if (i > 0) {
      consider(tail_p, tail_q);
      consider(h.np - tail_p, h.nq - tail_q);
    }
  }
  return best;
}

// Fits z_P = a + b z_Q over the bin edges. Returns nullopt when the fit is
// unusable.
std::optional<double> BinormalEstimate(const Histogram& h, double delta,
                                       int64_t min_tail) {
  const boost::math::normal standard;
  const size_t bins = h.p.size();
  std::vector<double> xs, ys, ws;
  int64_t tail_p = 0;
  int64_t tail_q = 0;
  for (size_t k = bins; k-- > 1;) {
    tail_p += h.p[k];
    tail_q += h.q[k];
    if (std::min({tail_p, h.np - tail_p, tail_q, h.nq - tail_q}) < min_tail) {
      continue;
    }
    const double pp = static_cast<double>(tail_p) / h.np;
    const double pq = static_cast<double>(tail_q) / h.nq;
    const double zp = boost::math::quantile(standard, pp);
    const double zq = boost::math::quantile(standard, pq);
    const double dp = boost::math::pdf(standard, zp);
    const double dq = boost::math::pdf(standard, zq);
    const double vp = pp * (1.0 - pp) / (h.np * dp * dp);
    const double vq = pq * (1.0 - pq) / (h.nq * dq * dq);
    xs.push_back(zq);
    ys.push_back(zp);
    ws.push_back(1.0 / (vp + vq));
  }
  if (xs.size() < 3) return std::nullopt;
  double w = 0.0, mx = 0.0, my = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    w += ws[i];
    mx += ws[i] * xs[i];
    my += ws[i] * ys[i];
  }
  mx /= w;
  my /= w;
  double sxy = 0.0, sxx = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxy += ws[i] * (xs[i] - mx) * (ys[i] - my);
    sxx += ws[i] * (xs[i] - mx) * (xs[i] - mx);
  }
  if (!(sxx > 0.0)) return std::nullopt;
  const double b = sxy / sxx;
  const double a = my - b * mx;
  if (!(b > 0.0) || !std::isfinite(a)) return std::nullopt;
  // Upper tails: P(X > t) = Phi(a + b z_Q(t)) with Q standardized, so the
  // fitted pair is P ~ N(a/b, 1/b^2) against Q ~ N(0, 1).
  const double mean_p = a / b;
  const double sd_p = 1.0 / b;
  auto forward = GaussianPairEpsilon(mean_p, sd_p, 0.0, 1.0, delta);
  auto backward = GaussianPairEpsilon(0.0, 1.0, mean_p, sd_p, delta);
  if (!forward.ok() || !backward.ok()) return std::nullopt;
  return std::min(std::max(*forward, *backward),
                  SmoothingCap(h.np, h.nq, delta));
}

struct PointEstimate {
  double epsilon = 0.0;
  EstimatorKind method = EstimatorKind::kHistogram;
};

PointEstimate Estimate(const Histogram& h, double delta,
                       const EstimateOptions& options) {
  if (options.estimator == EstimatorKind::kBinormal) {
    if (auto e = BinormalEstimate(h, delta, options.min_tail_count)) {
      return {*e, EstimatorKind::kBinormal};
    }
  }
  return {HistogramEstimate(h, delta), EstimatorKind::kHistogram};
}

std::vector<int64_t> Multinomial(const std::vector<int64_t>& counts,
                                 int64_t total, Rng& rng) {
  std::vector<int64_t> out(counts.size(), 0);
  int64_t remaining = total;
  int64_t remaining_mass = total;
  for (size_t i = 0; i < counts.size() && remaining > 0; ++i) {
    if (counts[i] == 0) continue;
    if (counts[i] == remaining_mass) {
      out[i] = remaining;
      break;
    }
    std::binomial_distribution<int64_t> draw(
        remaining, static_cast<double>(counts[i]) / remaining_mass);
    out[i] = draw(rng);
    remaining -= out[i];
    remaining_mass -= counts[i];
  }
  return out;
}

// Type-7 sample quantile of sorted values.
double Quantile(const std::vector<double>& sorted, double level) {
  const double pos = level * (sorted.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - lo) * (sorted[hi] - sorted[lo]);
}

Verdict VerdictFromName(absl::string_view name) {
  if (name == "pass") return Verdict::kPass;
  if (name == "fail") return Verdict::kFail;
  return Verdict::kInconclusive;
}

}  // namespace

absl::StatusOr<SampleBatch> SampleOutputs(const Mechanism& mechanism,
                                          const Dataset& dataset,
                                          const Vector& direction,
                                          int64_t trials, uint64_t seed,
                                          absl::string_view source) {
  if (trials < 1) {
    return MakeError(ErrorKind::kInvalidParameter,
                     absl::StrCat("trials must be >= 1, got ", trials));
  }
  SampleBatch batch;
  batch.source = std::string(source);
  batch.base_seed = seed;
  batch.values.assign(static_cast<size_t>(trials), 0.0);
  UNLEARN_RETURN_IF_ERROR(ParallelFor(trials, [&](int64_t t) -> absl::Status {
    absl::StatusOr<Vector> out =
        mechanism(dataset, DeriveSeed(seed, static_cast<uint64_t>(t)));
    if (!out.ok()) return Annotate(out.status(), t);
    if (out->size() != direction.size()) {
      return Annotate(
          MakeError(ErrorKind::kDimensionMismatch,
                    absl::StrCat("output has dimension ", out->size(),
                                 ", direction has ", direction.size())),
          t);
    }
    batch.values[static_cast<size_t>(t)] = Dot(*out, direction);
    return absl::OkStatus();
  }));
  return batch;
}

absl::Status WriteBatchCsv(const SampleBatch& batch, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    return absl::UnavailableError(absl::StrCat("cannot open ", path));
  }
  for (double v : batch.values) out << FormatDouble(v) << '\n';
  if (!out) return absl::UnavailableError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

absl::string_view VerdictName(Verdict verdict) {
  switch (verdict) {
    case Verdict::kPass:
      return "pass";
    case Verdict::kFail:
      return "fail";
    case Verdict::kInconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

absl::string_view EstimatorName(EstimatorKind kind) {
  return kind == EstimatorKind::kBinormal ? "binormal" : "histogram";
}

std::string ReportToJson(const AuditReport& r) {
  json j;
  j["epsilon_hat"] = r.epsilon_hat;
  j["lower"] = r.lower;
  j["upper"] = r.upper;
  j["delta"] = r.delta;
  j["trials_p"] = r.trials_p;
  j["trials_q"] = r.trials_q;
  j["bins"] = r.bins;
  j["verdict"] = std::string(VerdictName(r.verdict));
  // Infinity has no JSON form; null stands for "no certified bound".
  j["certified_epsilon"] = std::isfinite(r.certified_epsilon)
                               ? json(r.certified_epsilon)
                               : json(nullptr);
  j["tolerance"] = r.tolerance;
  j["method"] = r.method;
  j["smoothing_cap"] = r.smoothing_cap;
  j["over_capacity"] = r.over_capacity;
  return j.dump(2);
}

absl::StatusOr<AuditReport> ReportFromJson(const std::string& text) {
  try {
    const json j = json::parse(text);
    AuditReport r;
    r.epsilon_hat = j.at("epsilon_hat").get<double>();
    r.lower = j.at("lower").get<double>();
    r.upper = j.at("upper").get<double>();
    r.delta = j.at("delta").get<double>();
    r.trials_p = j.at("trials_p").get<int64_t>();
    r.trials_q = j.at("trials_q").get<int64_t>();
    r.bins = j.at("bins").get<int>();
    r.verdict = VerdictFromName(j.at("verdict").get<std::string>());
    const json& cert = j.at("certified_epsilon");
    r.certified_epsilon = cert.is_null()
                              ? std::numeric_limits<double>::infinity()
                              : cert.get<double>();
    r.tolerance = j.at("tolerance").get<double>();
    r.method = j.value("method", std::string());
    r.smoothing_cap = j.value("smoothing_cap", 0.0);
    r.over_capacity = j.value("over_capacity", false);
    return r;
  } catch (const json::exception& e) {
    return MakeError(ErrorKind::kInvalidParameter,
                     absl::StrCat("malformed audit report: ", e.what()));
  }
}

absl::Status WriteReport(const AuditReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    return absl::UnavailableError(absl::StrCat("cannot open ", path));
  }
  out << ReportToJson(report) << '\n';
  if (!out) return absl::UnavailableError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

absl::StatusOr<AuditReport> EstimateEpsilon(const SampleBatch& p,
                                            const SampleBatch& q, double delta,
                                            const EstimateOptions& options) {
  if (p.values.empty() || q.values.empty()) {
    return MakeError(ErrorKind::kEmptyDataset, "both batches must be nonempty");
  }
  if (options.bins < 2) {
    return MakeError(ErrorKind::kInvalidParameter,
                     absl::StrCat("bins must be >= 2, got ", options.bins));
  }
  if (!(delta >= 0.0 && delta < 1.0)) {
    return MakeError(ErrorKind::kInvalidParameter,
                     absl::StrCat("delta must be in [0, 1), got ", delta));
  }
  if (options.bootstrap < 0 || options.min_tail_count < 1 ||
      !(options.tolerance >= 0.0) || std::isnan(options.certified_epsilon)) {
    return MakeError(ErrorKind::kInvalidParameter,
                     "invalid bootstrap, tail count, tolerance or certified "
                     "epsilon");
  }
  for (const auto* batch : {&p, &q}) {
    for (double v : batch->values) {
      if (!std::isfinite(v)) {
        return MakeError(ErrorKind::kInvalidParameter,
                         "batches must hold finite values");
      }
    }
  }

  const Histogram h = BuildHistogram(p.values, q.values, options.bins);
  const PointEstimate point = Estimate(h, delta, options);

  AuditReport report;
  report.epsilon_hat = point.epsilon;
  report.method = std::string(EstimatorName(point.method));
  report.delta = delta;
  report.trials_p = p.trials();
  report.trials_q = q.trials();
  report.bins = options.bins;
  report.certified_epsilon = options.certified_epsilon;
  report.tolerance = options.tolerance;
  report.smoothing_cap = SmoothingCap(h.np, h.nq, delta);

  std::vector<double> resampled(static_cast<size_t>(options.bootstrap), 0.0);
  UNLEARN_RETURN_IF_ERROR(
      ParallelFor(options.bootstrap, [&](int64_t b) -> absl::Status {
        Rng rng = MakeRng(DeriveSeed(options.seed, static_cast<uint64_t>(b)));
        Histogram r = h;
        r.p = Multinomial(h.p, h.np, rng);
        r.q = Multinomial(h.q, h.nq, rng);
        resampled[static_cast<size_t>(b)] = Estimate(r, delta, options).epsilon;
        return absl::OkStatus();
      }));
  report.lower = report.upper = report.epsilon_hat;
  if (!resampled.empty()) {
    std::sort(resampled.begin(), resampled.end());
    report.lower = std::min(Quantile(resampled, 0.025), report.epsilon_hat);
    report.upper = std::max(Quantile(resampled, 0.975), report.epsilon_hat);
  }

  if (Concentrated(h.p, h.np) || Concentrated(h.q, h.nq)) {
    report.verdict = Verdict::kInconclusive;
  } else if (report.upper <= options.certified_epsilon + options.tolerance) {
    report.verdict = Verdict::kPass;
  } else {
    report.verdict = Verdict::kFail;
  }
  return report;
}

absl::StatusOr<double> GaussianHockeyStick(double mean_p, double sd_p,
                                           double mean_q, double sd_q,
                                           double epsilon) {
  if (!(sd_p > 0.0) || !(sd_q > 0.0) || !std::isfinite(sd_p) ||
      !std::isfinite(sd_q) || !std::isfinite(mean_p) ||
      !std::isfinite(mean_q) || !(epsilon >= 0.0) ||
      !(epsilon <= kMaxSearchEpsilon)) {
    return MakeError(ErrorKind::kInvalidParameter,
                     "Gaussian pair needs finite means, positive standard "
                     "deviations and epsilon in [0, 512]");
  }
  // {x : ln p(x) - ln q(x) > epsilon} is {A x^2 + B x + C > 0}.
  const double ip = 1.0 / (sd_p * sd_p);
  const double iq = 1.0 / (sd_q * sd_q);
  const double a = 0.5 * (iq - ip);
  const double b = mean_p * ip - mean_q * iq;
  const double c = 0.5 * (mean_q * mean_q * iq - mean_p * mean_p * ip) +
                   std::log(sd_q / sd_p) - epsilon;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, double>> region;
  if (a == 0.0) {
    if (b > 0.0) {
      region.emplace_back(-c / b, inf);
    } else if (b < 0.0) {
      region.emplace_back(-inf, -c / b);
    } else if (c > 0.0) {
      region.emplace_back(-inf, inf);
    }
  } else {
    const double disc = b * b - 4.0 * a * c;
    if (disc <= 0.0) {
      if (a > 0.0) region.emplace_back(-inf, inf);
    } else {
      const double root = std::sqrt(disc);
      const double t = -0.5 * (b + std::copysign(root, b));
      double r1 = t / a;
      double r2 = t != 0.0 ? c / t : -r1;
      if (r1 > r2) std::swap(r1, r2);
      if (a > 0.0) {
        region.emplace_back(-inf, r1);
        region.emplace_back(r2, inf);
      } else {
        region.emplace_back(r1, r2);
      }
    }
  }
  double mass_p = 0.0;
  double mass_q = 0.0;
  for (const auto& [lo, hi] : region) {
    mass_p += NormalMass(lo, hi, mean_p, sd_p);
    mass_q += NormalMass(lo, hi, mean_q, sd_q);
  }
  return std::max(0.0, mass_p - std::exp(epsilon) * mass_q);
}

absl::StatusOr<double> GaussianPairEpsilon(double mean_p, double sd_p,
                                           double mean_q, double sd_q,
                                           double delta) {
  if (!(delta >= 0.0 && delta < 1.0)) {
    return MakeError(ErrorKind::kInvalidParameter,
                     absl::StrCat("delta must be in [0, 1), got ", delta));
  }
  auto excess = [&](double e) -> absl::StatusOr<double> {
    UNLEARN_ASSIGN_OR_RETURN(const double hs,
                             GaussianHockeyStick(mean_p, sd_p, mean_q, sd_q, e));
    return hs - delta;
  };
  UNLEARN_ASSIGN_OR_RETURN(const double at_zero, excess(0.0));
  if (at_zero <= 0.0) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  for (;;) {
    UNLEARN_ASSIGN_OR_RETURN(const double v, excess(hi));
    if (v <= 0.0) break;
    lo = hi;
    hi *= 2.0;
    if (hi > kMaxSearchEpsilon) {
      return MakeError(ErrorKind::kInvalidParameter,
                       "no epsilon below 512 reaches the target delta");
    }
  }
  for (int i = 0; i < kBisectionIterations && hi - lo > 1e-13; ++i) {
    const double mid = 0.5 * (lo + hi);
    UNLEARN_ASSIGN_OR_RETURN(const double v, excess(mid));
    (v > 0.0 ? lo : hi) = mid;
  }
  return hi;
}

absl::StatusOr<double> AnalyticGaussianEpsilon(double sensitivity,
                                               double sigma, double delta) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    return MakeError(ErrorKind::kInvalidParameter,
                     absl::StrCat("sigma must be > 0, got ", sigma));
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    return MakeError(ErrorKind::kInvalidParameter,
                     absl::StrCat("delta must be in (0, 1), got ", delta));
  }
  if (!std::isfinite(sensitivity)) {
    return MakeError(ErrorKind::kInvalidParameter,
                     "sensitivity must be finite");
  }
  const double d = std::abs(sensitivity);
  if (d == 0.0) return 0.0;
  auto excess = [&](double e) {
    const double u = d / (2.0 * sigma);
    const double v = e * sigma / d;
    const double tail = Phi(-u - v);
    const double scaled = tail > 0.0 ? std::exp(e + std::log(tail)) : 0.0;
    return Phi(u - v) - scaled - delta;
  };
  if (excess(0.0) <= 0.0) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (excess(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > kMaxSearchEpsilon) {
      return MakeError(ErrorKind::kInvalidParameter,
                       "no epsilon below 512 reaches the target delta");
    }
  }
  for (int i = 0; i < kBisectionIterations && hi - lo > 1e-14; ++i) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

absl::StatusOr<double> GaussianRenyiDivergence(double shift, double sigma,
                                               double order) {
  if (!(sigma > 0.0) || !(order > 0.0) || !(shift >= 0.0) ||
      !std::isfinite(shift) || !std::isfinite(order)) {
    return MakeError(ErrorKind::kInvalidParameter,
                     "need shift >= 0, sigma > 0 and order > 0");
  }
  return order * shift * shift / (2.0 * sigma * sigma);
}

absl::StatusOr<AuditReport> AuditUnlearning(const Dataset& dataset,
                                            const DeletionRequest& request,
                                            const LossSpec& loss,
                                            const ApproxDpBudget& target,
                                            int64_t m,
                                            const AuditOptions& options) {
  UNLEARN_RETURN_IF_ERROR(ValidateApproxDp(target));
  if (options.trials < 1000) {
    return MakeError(ErrorKind::kInvalidParameter,
                     absl::StrCat("audits need >= 1000 trials, got ",
                                  options.trials));
  }
  UNLEARN_RETURN_IF_ERROR(ValidateRequest(request, dataset.size()));
  const bool over_capacity = static_cast<int64_t>(request.size()) > m;
  if (over_capacity && options.enforce_capacity) {
    return MakeError(ErrorKind::kCapacityExceeded,
                     absl::StrCat("request of ", request.size(),
                                  " points exceeds capacity ", m));
  }
  Vector direction;
  if (options.direction) {
    direction = *options.direction;
  } else {
    UNLEARN_ASSIGN_OR_RETURN(direction, MinimizerThetaStar(dataset));
  }
  if (direction.size() != dataset.dimension()) {
    return MakeError(ErrorKind::kDimensionMismatch,
                     "projection direction does not match the dataset");
  }

  const SideInformation side = ComputeSideInformation(dataset);
  Mechanism unlearned = [&](const Dataset& s,
                            uint64_t seed) -> absl::StatusOr<Vector> {
    LearnOptions learn = options.learn;
    learn.seed = seed;
    UNLEARN_ASSIGN_OR_RETURN(LearnResult result,
                             Learn(s, loss, target, m, options.alpha, learn));
    UnlearningCertificate certificate = result.certificate;
    // Over-capacity audits run the m-certified pair past its capacity.
    if (over_capacity) {
      certificate.capacity = static_cast<int64_t>(request.size());
    }
    CertificateLedger ledger(certificate);
    UNLEARN_ASSIGN_OR_RETURN(Model model,
                             UnlearnLazy(request, result.model, side, ledger));
    return model.params;
  };
  Mechanism retrained = [&](const Dataset& s,
                            uint64_t seed) -> absl::StatusOr<Vector> {
    UNLEARN_ASSIGN_OR_RETURN(
        Model model,
        RetrainBaseline(s, request, loss, target, m, seed, options.learn));
    return model.params;
  };

  const uint64_t seed_q =
      options.shared_seeds ? options.seed : DeriveSeed(~options.seed, 1);
  UNLEARN_ASSIGN_OR_RETURN(
      SampleBatch p, SampleOutputs(unlearned, dataset, direction,
                                   options.trials, options.seed, "unlearned"));
  UNLEARN_ASSIGN_OR_RETURN(
      SampleBatch q, SampleOutputs(retrained, dataset, direction,
                                   options.trials, seed_q, "retrained"));
  EstimateOptions estimate = options.estimate;
  estimate.certified_epsilon = target.epsilon;
  UNLEARN_ASSIGN_OR_RETURN(AuditReport report,
                           EstimateEpsilon(p, q, target.delta, estimate));
  report.over_capacity = over_capacity;
  return report;
}

}  // namespace unlearn
