// Copyright 2026 The nodedp Authors.
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

#include "nodedp/experiments.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <thread>
#include <tuple>
#include <type_traits>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "nlohmann/json.hpp"
#include "nodedp/info_quantities.h"
#include "nodedp/privacy_audit.h"

namespace nodedp {
namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMleRestarts = 3;

absl::Status Invalid(const std::string& message) {
  return absl::InvalidArgumentError(absl::StrCat("sweep config: ", message));
}

template <typename T>
absl::Status ReadGrid(const json& doc, const char* key, bool required,
                      std::vector<T>& out) {
  if (!doc.contains(key)) {
    if (required) return Invalid(absl::StrCat("missing \"", key, "\""));
    return absl::OkStatus();
  }
  const json& value = doc.at(key);
  if (value.is_number() &&
      (!std::is_integral_v<T> || value.is_number_integer())) {
    out = {value.get<T>()};
    return absl::OkStatus();
  }
  if (!value.is_array() || value.empty()) {
    return Invalid(
        absl::StrCat("\"", key, "\" must be a number or a nonempty array"));
  }
  out.clear();
  for (const json& item : value) {
    if (!item.is_number() ||
        (std::is_integral_v<T> && !item.is_number_integer())) {
      return Invalid(absl::StrCat("\"", key, "\" entries must be numbers"));
    }
    out.push_back(item.get<T>());
  }
  return absl::OkStatus();
}

std::string Real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

struct CellSpec {
  int n;
  int k;
  double a;
  double b;
  double beta;
  double epsilon;
  double c;
};

std::vector<CellSpec> ExpandGrid(const SweepConfig& cfg) {
  std::vector<CellSpec> cells;
  for (int n : cfg.n_values)
    for (int k : cfg.k_values)
      for (double a : cfg.a_values)
        for (double b : cfg.b_values)
          for (double beta : cfg.beta_values)
            for (double epsilon : cfg.epsilons)
              for (double c : cfg.c_values)
                cells.push_back({n, k, a, b, beta, epsilon, c});
  return cells;
}

absl::StatusOr<MechanismConfig> CellMechanism(const SweepConfig& cfg,
                                              const SbmParams& params,
                                              double epsilon, double c) {
  absl::StatusOr<DegreeEnvelope> env = DegreeEnvelope::ForParams(params, c);
  if (!env.ok()) return env.status();
  MechanismConfig mech(epsilon, *env);
  mech.sampler = cfg.sampler;
  mech.chain_steps = cfg.chain_steps;
  mech.fallback = cfg.fallback;
  if (params.num_communities() >= 3) mech.w = cfg.w;
  if (absl::Status st = ValidateConfig(mech); !st.ok()) return st;
  return mech;
}

// Best balanced single relabel or swap from `sigma`, applied in place.
bool ImproveOnce(const ScoreContext& ctx, const BalanceSpec& spec,
                 Labeling& sigma, std::vector<int>& counts) {
  const int n = sigma.size();
  const int k = sigma.num_communities();
  double best = 1e-12;
  int best_u = -1, best_v = -1, best_label = -1;
  for (int u = 0; u < n; ++u) {
    const int from = sigma[u];
    for (int label = 0; label < k; ++label) {
      if (label == from || !spec.AdmitsCount(counts[from] - 1) ||
          !spec.AdmitsCount(counts[label] + 1)) {
        continue;
      }
      const double delta = ScoreDelta(ctx, sigma, u, label);
      if (delta > best) {
        best = delta;
        best_u = u;
        best_v = -1;
        best_label = label;
      }
    }
  }
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (sigma[u] == sigma[v]) continue;
      const Labeling moved = sigma.WithLabel(u, sigma[v]);
      const double delta = ScoreDelta(ctx, sigma, u, sigma[v]) +
                           ScoreDelta(ctx, moved, v, sigma[u]);
      if (delta > best) {
        best = delta;
        best_u = u;
        best_v = v;
      }
    }
  }
  if (best_u < 0) return false;
  if (best_v < 0) {
    --counts[sigma[best_u]];
    ++counts[best_label];
    sigma = sigma.WithLabel(best_u, best_label);
  } else {
    const int lu = sigma[best_u];
    sigma = sigma.WithLabel(best_u, sigma[best_v]).WithLabel(best_v, lu);
  }
  return true;
}

}  // namespace

absl::Status ValidateSweepConfig(const SweepConfig& cfg) {
  if (cfg.n_values.empty() || cfg.k_values.empty() || cfg.a_values.empty() ||
      cfg.b_values.empty() || cfg.beta_values.empty() || cfg.epsilons.empty() ||
      cfg.c_values.empty()) {
    return Invalid("every grid must be nonempty");
  }
  if (cfg.replicates < 1) return Invalid("replicates must be >= 1");
  if (cfg.threads < 1) return Invalid("threads must be >= 1");
  for (const CellSpec& cell : ExpandGrid(cfg)) {
    absl::StatusOr<SbmParams> params =
        SbmParams::Create(cell.n, cell.k, cell.a, cell.b, cell.beta);
    if (!params.ok()) return params.status();
    absl::StatusOr<MechanismConfig> mech =
        CellMechanism(cfg, *params, cell.epsilon, cell.c);
    if (!mech.ok()) return mech.status();
    if (absl::Status st = EstimatorLambda(*mech, *params).status(); !st.ok()) {
      return st;
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<SweepConfig> ParseSweepConfig(std::string_view text) {
  const json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    return Invalid("not a JSON object");
  }
  static const std::set<std::string> kKeys = {
      "schema_version", "n",        "K", "a",          "b",
      "beta",           "epsilon",  "C", "replicates", "sampler",
      "chain_steps",    "fallback", "w", "truth",      "seed",
      "threads",        "constants"};
  for (const auto& [key, value] : doc.items()) {
    if (!kKeys.count(key))
      return Invalid(absl::StrCat("unknown key \"", key, "\""));
  }
  if (!doc.contains("schema_version") ||
      !doc["schema_version"].is_number_integer() ||
      doc["schema_version"].get<int>() != kSweepSchemaVersion) {
    return Invalid(
        absl::StrCat("schema_version must be ", kSweepSchemaVersion));
  }
  SweepConfig cfg;
  for (absl::Status st : {ReadGrid(doc, "n", true, cfg.n_values),
                          ReadGrid(doc, "K", false, cfg.k_values),
                          ReadGrid(doc, "a", true, cfg.a_values),
                          ReadGrid(doc, "b", true, cfg.b_values),
                          ReadGrid(doc, "beta", false, cfg.beta_values),
                          ReadGrid(doc, "epsilon", true, cfg.epsilons),
                          ReadGrid(doc, "C", false, cfg.c_values)}) {
    if (!st.ok()) return st;
  }
  auto integer = [&](const char* key, auto& field) -> absl::Status {
    if (!doc.contains(key)) return absl::OkStatus();
    if (!doc[key].is_number_integer()) {
      return Invalid(absl::StrCat("\"", key, "\" must be an integer"));
    }
    field = doc[key].get<std::remove_reference_t<decltype(field)>>();
    return absl::OkStatus();
  };
  for (absl::Status st :
       {integer("replicates", cfg.replicates),
        integer("chain_steps", cfg.chain_steps), integer("seed", cfg.seed),
        integer("threads", cfg.threads)}) {
    if (!st.ok()) return st;
  }
  if (doc.contains("sampler")) {
    if (!doc["sampler"].is_string())
      return Invalid("\"sampler\" must be a string");
    absl::StatusOr<Sampler> s = ParseSampler(doc["sampler"].get<std::string>());
    if (!s.ok()) return s.status();
    cfg.sampler = *s;
  }
  if (doc.contains("fallback")) {
    if (!doc["fallback"].is_string())
      return Invalid("\"fallback\" must be a string");
    absl::StatusOr<FallbackPolicy> f =
        ParseFallback(doc["fallback"].get<std::string>());
    if (!f.ok()) return f.status();
    cfg.fallback = *f;
  }
  if (doc.contains("w") && !doc["w"].is_null()) {
    if (!doc["w"].is_number()) return Invalid("\"w\" must be a number or null");
    cfg.w = doc["w"].get<double>();
  }
  if (doc.contains("truth")) {
    const std::string truth =
        doc["truth"].is_string() ? doc["truth"].get<std::string>() : "";
    if (truth == "fixed") {
      cfg.truth = TruthMode::kFixedBalanced;
    } else if (truth == "uniform") {
      cfg.truth = TruthMode::kUniform;
    } else {
      return Invalid("\"truth\" must be \"fixed\" or \"uniform\"");
    }
  }
  if (doc.contains("constants")) {
    const json& c = doc["constants"];
    if (!c.is_object()) return Invalid("\"constants\" must be an object");
    static const std::map<std::string, double TargetConstants::*> kFields = {
        {"C_s", &TargetConstants::c_s},
        {"C_mg", &TargetConstants::c_mg},
        {"C0", &TargetConstants::c0},
        {"C1", &TargetConstants::c1},
        {"c3", &TargetConstants::c3}};
    for (const auto& [key, value] : c.items()) {
      if (key == "alpha") {
        if (value.is_null()) continue;
        if (!value.is_number() || value.get<double>() <= 0 ||
            value.get<double>() >= 1) {
          return Invalid("\"alpha\" must be in (0, 1) or null");
        }
        cfg.constants.alpha = value.get<double>();
        continue;
      }
      auto it = kFields.find(key);
      if (it == kFields.end()) {
        return Invalid(absl::StrCat("unknown constant \"", key, "\""));
      }
      if (!value.is_number() || value.get<double>() <= 0) {
        return Invalid(absl::StrCat("constant \"", key, "\" must be positive"));
      }
      cfg.constants.*(it->second) = value.get<double>();
    }
  }
  if (absl::Status st = ValidateSweepConfig(cfg); !st.ok()) return st;
  return cfg;
}

FeasibilityReport ComputeFeasibility(const SbmParams& params, double epsilon,
                                     const DegreeEnvelope& envelope,
                                     const TargetConstants& constants) {
  const int n = params.n();
  const int k = params.num_communities();
  const double log_nk = std::log(static_cast<double>(n) * k);
  const double n_i = n * RenyiHalf(params);
  FeasibilityReport r;
  r.b = n_i > 0 ? constants.c0 * k * log_nk / n_i : kInf;
  r.eta = epsilon / (4.0 * envelope.delta_a());
  r.gamma0 = r.eta - r.b;
  // log alpha is kept separately since the derived alpha underflows at
  // large budgets.
  double log_alpha;
  if (constants.alpha.has_value()) {
    log_alpha = std::log(*constants.alpha);
  } else if (r.eta >= 2.0 * r.b) {
    log_alpha = -constants.c3 * epsilon / 2.0 - log_nk;
  } else {
    log_alpha = std::log(0.05);
  }
  r.alpha = std::exp(log_alpha);
  r.feasible = r.gamma0 > 0;
  r.s_star = r.feasible ? (constants.c1 * log_nk + std::log(4.0) - log_alpha) /
                              r.gamma0
                        : kInf;
  return r;
}

double MinFeasibleEpsilon(const SbmParams& params,
                          const DegreeEnvelope& envelope,
                          const TargetConstants& constants) {
  return 4.0 * envelope.delta_a() *
         ComputeFeasibility(params, 0.0, envelope, constants).b;
}

absl::StatusOr<double> UniformGuessRisk(const SbmParams& params,
                                        const Labeling& truth) {
  absl::StatusOr<std::vector<Labeling>> support =
      EnumerateBalanced(params.balance());
  if (!support.ok()) return support.status();
  if (support->empty())
    return absl::FailedPreconditionError("empty Sigma_beta");
  double total = 0.0;
  for (const Labeling& sigma : *support) total += MismatchRatio(truth, sigma);
  return total / support->size();
}

MleResult NonPrivateMle(const ScoreContext& ctx, const EmSampler& sampler,
                        Rng& rng) {
  const std::vector<Labeling>& support = sampler.support();
  if (!support.empty()) {
    return {support[ArgmaxIndex(ScoreAll(ctx, support))], false};
  }
  const BalanceSpec& spec = sampler.params().balance();
  MleResult best{Labeling(), true};
  double best_score = -kInf;
  for (int restart = 0; restart < kMleRestarts; ++restart) {
    absl::StatusOr<Labeling> start = sampler.SampleUniform(rng);
    if (!start.ok()) break;
    Labeling sigma = *std::move(start);
    std::vector<int> counts = sigma.ClassCounts();
    while (ImproveOnce(ctx, spec, sigma, counts)) {
    }
    const double score = Score(ctx, sigma);
    if (score > best_score) {
      best_score = score;
      best.labeling = std::move(sigma);
    }
  }
  return best;
}

absl::StatusOr<RiskReport> RunRiskSweep(const SweepConfig& cfg) {
  if (absl::Status st = ValidateSweepConfig(cfg); !st.ok()) return st;
  RiskReport report;
  const std::vector<CellSpec> grid = ExpandGrid(cfg);
  for (size_t cell_index = 0; cell_index < grid.size(); ++cell_index) {
    const CellSpec& spec = grid[cell_index];
    absl::StatusOr<SbmParams> params =
        SbmParams::Create(spec.n, spec.k, spec.a, spec.b, spec.beta);
    if (!params.ok()) return params.status();
    absl::StatusOr<MechanismConfig> mech =
        CellMechanism(cfg, *params, spec.epsilon, spec.c);
    if (!mech.ok()) return mech.status();
    absl::StatusOr<EmSampler> sampler = EmSampler::Create(*mech, *params);
    if (!sampler.ok()) return sampler.status();
    absl::StatusOr<double> lambda = EstimatorLambda(*mech, *params);
    if (!lambda.ok()) return lambda.status();
    const Labeling fixed_truth = MostBalancedLabeling(spec.n, spec.k);

    const int64_t reps = cfg.replicates;
    std::vector<double> risk(reps), mle(reps);
    std::vector<char> exited(reps), approx(reps), mle_approx(reps);
    std::vector<absl::Status> errors(reps);
    std::atomic<int64_t> next{0};
    auto worker = [&]() {
      for (int64_t r = next++; r < reps; r = next++) {
        Rng rng(cfg.seed, StreamId(cell_index, r));
        Labeling truth = fixed_truth;
        if (cfg.truth == TruthMode::kUniform) {
          absl::StatusOr<Labeling> drawn = sampler->SampleUniform(rng);
          if (!drawn.ok()) {
            errors[r] = drawn.status();
            continue;
          }
          truth = *std::move(drawn);
        }
        const Graph g = SampleSbmWith(*params, truth, rng);
        absl::StatusOr<EstimatorOutput> out =
            RunPrivateEstimator(g, *sampler, rng);
        if (!out.ok()) {
          errors[r] = out.status();
          continue;
        }
        risk[r] = out->labeling ? MismatchRatio(truth, *out->labeling) : 1.0;
        exited[r] = !out->envelope_member;
        approx[r] = out->approximate;
        const MleResult m =
            NonPrivateMle(ScoreContext(g, *lambda), *sampler, rng);
        mle[r] = MismatchRatio(truth, m.labeling);
        mle_approx[r] = m.approximate;
      }
    };
    const int threads =
        static_cast<int>(std::min<int64_t>(std::max(1, cfg.threads), reps));
    if (threads == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
      for (std::thread& t : pool) t.join();
    }
    for (const absl::Status& st : errors) {
      if (!st.ok()) return st;
    }

    CellResult cell;
    cell.n = spec.n;
    cell.k = spec.k;
    cell.a = spec.a;
    cell.b = spec.b;
    cell.beta = spec.beta;
    cell.epsilon = spec.epsilon;
    cell.c = spec.c;
    cell.sampler = cfg.sampler;
    cell.replicates = reps;
    cell.eta = mech->eta();
    cell.risk = SummarizeMean(risk);
    cell.failures =
        std::count_if(risk.begin(), risk.end(), [](double x) { return x > 0; });
    cell.fail_frac = static_cast<double>(cell.failures) / reps;
    cell.fail_ci = WilsonInterval(cell.failures, reps);
    cell.envelope_exit_frac =
        static_cast<double>(std::count(exited.begin(), exited.end(), 1)) / reps;
    cell.mle_risk = SummarizeMean(mle);
    cell.floor_lb = RiskFloor(spec.n, spec.epsilon);
    const double n_i = spec.n * RenyiHalf(*params);
    cell.n_i = n_i;
    cell.signal = SignalFromNI(spec.k, spec.beta, n_i);
    cell.feasible =
        ComputeFeasibility(*params, spec.epsilon, mech->envelope, cfg.constants)
            .feasible;
    cell.approximate = std::count(approx.begin(), approx.end(), 1) > 0;
    cell.mle_approximate =
        std::count(mle_approx.begin(), mle_approx.end(), 1) > 0;
    report.cells.push_back(cell);
  }
  return report;
}

void WriteRiskCsv(const RiskReport& report, std::ostream& out) {
  out << kRiskCsvHeader << '\n';
  for (const CellResult& c : report.cells) {
    out << c.n << ',' << c.k << ',' << Real(c.a) << ',' << Real(c.b) << ','
        << Real(c.beta) << ',' << Real(c.epsilon) << ',' << Real(c.c) << ','
        << SamplerName(c.sampler) << ',' << c.replicates << ','
        << Real(c.risk.mean) << ',' << Real(c.risk.ci.lo) << ','
        << Real(c.risk.ci.hi) << ',' << Real(c.fail_frac) << ','
        << Real(c.fail_ci.lo) << ',' << Real(c.fail_ci.hi) << ','
        << Real(c.envelope_exit_frac) << ',' << Real(c.mle_risk.mean) << ','
        << Real(c.floor_lb) << ',' << Real(c.signal) << ',' << Real(c.n_i)
        << ',' << (c.feasible ? "true" : "false") << '\n';
  }
}

void WriteLowerBoundOverlayCsv(const RiskReport& report, std::ostream& out) {
  out << kOverlayCsvHeader << '\n';
  for (const CellResult& c : report.cells) {
    out << c.n << ',' << c.k << ',' << Real(c.a) << ',' << Real(c.b) << ','
        << Real(c.beta) << ',' << Real(c.epsilon) << ',' << Real(c.risk.mean)
        << ',' << Real(c.risk.ci.lo) << ',' << Real(c.risk.ci.hi) << ','
        << Real(c.floor_lb) << ',' << Real(std::exp(-c.signal)) << ','
        << (c.risk.ci.hi >= c.floor_lb ? "true" : "false") << '\n';
  }
}

std::string RiskReportJson(const RiskReport& report) {
  nlohmann::ordered_json doc;
  doc["cells"] = nlohmann::ordered_json::array();
  for (const CellResult& c : report.cells) {
    nlohmann::ordered_json cell;
    cell["n"] = c.n;
    cell["K"] = c.k;
    cell["a"] = c.a;
    cell["b"] = c.b;
    cell["beta"] = c.beta;
    cell["epsilon"] = c.epsilon;
    cell["C"] = c.c;
    cell["sampler"] = std::string(SamplerName(c.sampler));
    cell["replicates"] = c.replicates;
    cell["eta"] = c.eta;
    cell["mean_r"] = c.risk.mean;
    cell["sd_r"] = c.risk.sd;
    cell["ci"] = {c.risk.ci.lo, c.risk.ci.hi};
    cell["failures"] = c.failures;
    cell["fail_frac"] = c.fail_frac;
    cell["fail_ci"] = {c.fail_ci.lo, c.fail_ci.hi};
    cell["envelope_exit_frac"] = c.envelope_exit_frac;
    cell["mle_mean_r"] = c.mle_risk.mean;
    cell["mle_ci"] = {c.mle_risk.ci.lo, c.mle_risk.ci.hi};
    cell["floor_lb"] = c.floor_lb;
    cell["signal"] = c.signal;
    cell["nI"] = c.n_i;
    cell["feasible"] = c.feasible;
    cell["approximate"] = c.approximate;
    cell["mle_approximate"] = c.mle_approximate;
    doc["cells"].push_back(std::move(cell));
  }
  return doc.dump(2);
}

std::vector<double> IsotonicDecreasing(const std::vector<double>& values,
                                       const std::vector<double>& weights) {
  struct Block {
    double sum;
    double weight;
    size_t length;
  };
  std::vector<Block> blocks;
  for (size_t i = 0; i < values.size(); ++i) {
    blocks.push_back({values[i] * weights[i], weights[i], 1});
    while (blocks.size() > 1) {
      const Block& last = blocks.back();
      const Block& prev = blocks[blocks.size() - 2];
      if (prev.sum / prev.weight >= last.sum / last.weight) break;
      Block merged{prev.sum + last.sum, prev.weight + last.weight,
                   prev.length + last.length};
      blocks.pop_back();
      blocks.back() = merged;
    }
  }
  std::vector<double> fit;
  fit.reserve(values.size());
  for (const Block& b : blocks)
    fit.insert(fit.end(), b.length, b.sum / b.weight);
  return fit;
}

TrendReport CheckRiskTrends(const RiskReport& report, double huge_eta) {
  TrendReport t;
  t.floor_pass = t.markov_pass = t.baseline_pass = t.huge_pass = true;
  using Key = std::tuple<int, int, double, double, double, double>;
  std::map<Key, std::vector<const CellResult*>> series;
  for (const CellResult& c : report.cells) {
    series[{c.n, c.k, c.a, c.b, c.beta, c.c}].push_back(&c);
    t.floor_pass &= c.risk.ci.hi >= c.floor_lb;
    t.markov_pass &= c.fail_frac <= c.n * c.risk.mean + 1e-12;
    t.baseline_pass &=
        c.mle_risk.mean <= c.risk.ci.hi + (c.mle_risk.ci.hi - c.mle_risk.mean);
    if (c.eta >= huge_eta) {
      ++t.huge_cells;
      t.huge_pass &= c.risk.ci.Contains(c.mle_risk.mean);
    }
  }
  for (auto& [key, cells] : series) {
    std::sort(cells.begin(), cells.end(),
              [](const CellResult* x, const CellResult* y) {
                return x->epsilon < y->epsilon;
              });
    std::vector<double> means, weights;
    for (const CellResult* c : cells) {
      means.push_back(c->risk.mean);
      weights.push_back(static_cast<double>(c->replicates));
    }
    const std::vector<double> fit = IsotonicDecreasing(means, weights);
    for (size_t i = 0; i < cells.size(); ++i) {
      const double residual = std::abs(means[i] - fit[i]);
      if (residual == 0.0) continue;
      const double width = cells[i]->risk.ci.hi - cells[i]->risk.ci.lo;
      t.max_isotonic_ratio =
          std::max(t.max_isotonic_ratio, width > 0 ? residual / width : kInf);
    }
  }
  t.monotone_pass = t.max_isotonic_ratio < 1.0;
  return t;
}

}  // namespace nodedp
