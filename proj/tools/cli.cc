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

#include "cli.h"

#include <openssl/evp.h>

#include <cctype>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "nlohmann/json.hpp"
#include "nodedp/experiments.h"
#include "nodedp/graph_model.h"
#include "nodedp/mechanism.h"
#include "nodedp/privacy_audit.h"
#include "nodedp/rng.h"
#include "nodedp/score_engine.h"
#include "nodedp/status_macros.h"
#include "nodedp/theory_verify.h"
#include "spdlog/sinks/ostream_sink.h"
#include "spdlog/spdlog.h"

#ifndef NODEDP_VERSION
#define NODEDP_VERSION "unknown"
#endif

namespace nodedp::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr int kMaxLoggedFailures = 10;

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::optional<uint64_t> seed;
  std::optional<int> threads;
  std::string log_level = "warn";
};

// What a command hands back to the dispatcher besides the files it wrote.
struct RunResult {
  uint64_t seed = 0;
  int threads = 1;
  bool checks_pass = true;
  std::string summary;
};

absl::Status Invalid(const std::string& message) {
  return absl::InvalidArgumentError(message);
}

std::string Sha256Hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(),
             nullptr);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xf]);
  }
  return hex;
}

absl::StatusOr<std::string> ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    return absl::NotFoundError(absl::StrCat("cannot read ", path.string()));
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

// Writes `name` directly inside `out_dir`; names never contain separators.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(fs::path out_dir) : out_dir_(std::move(out_dir)) {}

  absl::Status Write(const std::string& name, const std::string& contents) {
    std::ofstream out(out_dir_ / name, std::ios::binary | std::ios::trunc);
    out << contents;
    out.close();
    if (!out) {
      return absl::InternalError(absl::StrCat("failed to write ", name));
    }
    written_.push_back(name);
    return absl::OkStatus();
  }

  const std::vector<std::string>& written() const { return written_; }
  const fs::path& dir() const { return out_dir_; }

 private:
  fs::path out_dir_;
  std::vector<std::string> written_;
};

// Typed access to a flat JSON config with a closed key set.
class ConfigDoc {
 public:
  static absl::StatusOr<ConfigDoc> Parse(const std::string& text,
                                         std::set<std::string> allowed) {
    Json doc = Json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded()) return Invalid("config is not valid JSON");
    if (!doc.is_object()) return Invalid("config is not a JSON object");
    allowed.insert("schema_version");
    for (const auto& [key, value] : doc.items()) {
      if (!allowed.count(key)) {
        return Invalid(absl::StrCat("unknown key \"", key, "\""));
      }
    }
    if (!doc.contains("schema_version") ||
        !doc["schema_version"].is_number_integer() ||
        doc["schema_version"].get<int64_t>() != kConfigSchemaVersion) {
      return Invalid(
          absl::StrCat("schema_version must be ", kConfigSchemaVersion));
    }
    return ConfigDoc(std::move(doc));
  }

  const Json& json() const { return doc_; }
  bool Has(const std::string& key) const {
    return doc_.contains(key) && !doc_[key].is_null();
  }

  absl::StatusOr<double> Number(const std::string& key,
                                std::optional<double> fallback = {}) const {
    if (!Has(key)) {
      if (fallback) return *fallback;
      return Invalid(absl::StrCat("missing \"", key, "\""));
    }
    if (!doc_[key].is_number()) {
      return Invalid(absl::StrCat("\"", key, "\" must be a number"));
    }
    return doc_[key].get<double>();
  }

  absl::StatusOr<std::optional<double>> OptionalNumber(
      const std::string& key) const {
    if (!Has(key)) return std::optional<double>();
    ASSIGN_OR_RETURN(double value, Number(key));
    return std::optional<double>(value);
  }

  absl::StatusOr<int64_t> Integer(const std::string& key,
                                  std::optional<int64_t> fallback = {}) const {
    if (!Has(key)) {
      if (fallback) return *fallback;
      return Invalid(absl::StrCat("missing \"", key, "\""));
    }
    if (!doc_[key].is_number_integer()) {
      return Invalid(absl::StrCat("\"", key, "\" must be an integer"));
    }
    return doc_[key].get<int64_t>();
  }

  absl::StatusOr<std::string> String(
      const std::string& key, std::optional<std::string> fallback = {}) const {
    if (!Has(key)) {
      if (fallback) return *fallback;
      return Invalid(absl::StrCat("missing \"", key, "\""));
    }
    if (!doc_[key].is_string()) {
      return Invalid(absl::StrCat("\"", key, "\" must be a string"));
    }
    return doc_[key].get<std::string>();
  }

  // A number or an array of numbers.
  absl::StatusOr<std::vector<double>> Numbers(
      const std::string& key,
      std::optional<std::vector<double>> fallback = {}) const {
    if (!Has(key)) {
      if (fallback) return *fallback;
      return Invalid(absl::StrCat("missing \"", key, "\""));
    }
    const Json& value = doc_[key];
    if (value.is_number()) return std::vector<double>{value.get<double>()};
    if (!value.is_array() || value.empty()) {
      return Invalid(
          absl::StrCat("\"", key, "\" must be a number or a nonempty array"));
    }
    std::vector<double> out;
    for (const Json& item : value) {
      if (!item.is_number()) {
        return Invalid(absl::StrCat("\"", key, "\" must hold numbers"));
      }
      out.push_back(item.get<double>());
    }
    return out;
  }

 private:
  explicit ConfigDoc(Json doc) : doc_(std::move(doc)) {}
  Json doc_;
};

const std::set<std::string> kInstanceKeys = {"n", "K",    "a",
                                             "b", "beta", "seed"};
const std::set<std::string> kMechanismKeys = {
    "epsilon", "C", "sampler", "chain_steps", "fallback", "w"};

std::set<std::string> KeySet(
    std::initializer_list<const std::set<std::string>*> groups,
    std::initializer_list<std::string> extra) {
  std::set<std::string> keys(extra);
  for (const auto* group : groups) keys.insert(group->begin(), group->end());
  return keys;
}

absl::StatusOr<SbmParams> ParseParams(const ConfigDoc& doc) {
  ASSIGN_OR_RETURN(int64_t n, doc.Integer("n"));
  ASSIGN_OR_RETURN(int64_t k, doc.Integer("K", 2));
  ASSIGN_OR_RETURN(double a, doc.Number("a"));
  ASSIGN_OR_RETURN(double b, doc.Number("b"));
  ASSIGN_OR_RETURN(double beta, doc.Number("beta", 1.0));
  if (n < 2 || n > 1'000'000 || k < 2 || k > n) {
    return Invalid("n and K out of range");
  }
  return SbmParams::Create(static_cast<int>(n), static_cast<int>(k), a, b,
                           beta);
}

absl::StatusOr<uint64_t> ParseSeed(const ConfigDoc& doc,
                                   const CommonFlags& flags) {
  if (flags.seed) return *flags.seed;
  ASSIGN_OR_RETURN(int64_t seed, doc.Integer("seed", 0));
  if (seed < 0) return Invalid("\"seed\" must be nonnegative");
  return static_cast<uint64_t>(seed);
}

// The mechanism block at a given epsilon.
absl::StatusOr<MechanismConfig> ParseMechanism(const ConfigDoc& doc,
                                               const SbmParams& params,
                                               double epsilon) {
  ASSIGN_OR_RETURN(double c, doc.Number("C", kDefaultEnvelopeC));
  ASSIGN_OR_RETURN(DegreeEnvelope envelope,
                   DegreeEnvelope::ForParams(params, c));
  MechanismConfig cfg(epsilon, envelope);
  ASSIGN_OR_RETURN(std::string sampler, doc.String("sampler", "exact"));
  ASSIGN_OR_RETURN(cfg.sampler, ParseSampler(sampler));
  ASSIGN_OR_RETURN(cfg.chain_steps,
                   doc.Integer("chain_steps", kDefaultChainSteps));
  ASSIGN_OR_RETURN(std::string fallback,
                   doc.String("fallback", "uniform_balanced"));
  ASSIGN_OR_RETURN(cfg.fallback, ParseFallback(fallback));
  ASSIGN_OR_RETURN(cfg.w, doc.OptionalNumber("w"));
  RETURN_IF_ERROR(ValidateConfig(cfg));
  return cfg;
}

std::string JsonText(const Json& j) { return j.dump(2) + "\n"; }

std::string LabelsText(const Labeling& sigma) {
  std::string text = FormatLabeling(sigma);
  while (!text.empty() &&
         std::isspace(static_cast<unsigned char>(text.back()))) {
    text.pop_back();
  }
  return text;
}

Json FiniteOrString(double x) {
  if (std::isfinite(x)) return x;
  return x > 0 ? "inf" : (x < 0 ? "-inf" : "nan");
}

// ---------------------------------------------------------------- commands

absl::StatusOr<RunResult> RunSample(const ConfigDoc& doc,
                                    const CommonFlags& flags,
                                    ArtifactWriter& writer) {
  ASSIGN_OR_RETURN(SbmParams params, ParseParams(doc));
  ASSIGN_OR_RETURN(uint64_t seed, ParseSeed(doc, flags));
  ASSIGN_OR_RETURN(std::string truth_mode, doc.String("truth", "fixed"));
  Labeling truth;
  if (truth_mode == "fixed") {
    truth = MostBalancedLabeling(params.n(), params.num_communities());
  } else if (truth_mode == "uniform") {
    ASSIGN_OR_RETURN(std::vector<Labeling> support,
                     EnumerateBalanced(params.balance()));
    Rng rng(seed, StreamId(0));
    truth = support[rng.UniformInt(support.size())];
  } else {
    return Invalid("\"truth\" must be \"fixed\" or \"uniform\"");
  }
  ASSIGN_OR_RETURN(Graph graph, SampleSbm(params, truth, seed, StreamId(1)));
  RETURN_IF_ERROR(writer.Write("graph.txt", FormatGraph(graph)));
  RETURN_IF_ERROR(writer.Write("truth.txt", FormatLabeling(truth)));
  RunResult result;
  result.seed = seed;
  result.summary = absl::StrCat("sampled n=", params.n(), " with ",
                                graph.NumEdges(), " edges");
  return result;
}

absl::StatusOr<RunResult> RunEstimate(const ConfigDoc& doc,
                                      const CommonFlags& flags,
                                      ArtifactWriter& writer) {
  ASSIGN_OR_RETURN(SbmParams params, ParseParams(doc));
  ASSIGN_OR_RETURN(uint64_t seed, ParseSeed(doc, flags));
  ASSIGN_OR_RETURN(double epsilon, doc.Number("epsilon"));
  ASSIGN_OR_RETURN(MechanismConfig cfg, ParseMechanism(doc, params, epsilon));
  ASSIGN_OR_RETURN(std::string graph_file, doc.String("graph_file"));
  fs::path graph_path(graph_file);
  if (graph_path.is_relative()) {
    graph_path = fs::path(flags.config_path).parent_path() / graph_path;
  }
  ASSIGN_OR_RETURN(std::string graph_text, ReadFile(graph_path));
  ASSIGN_OR_RETURN(Graph graph, ParseGraph(graph_text));
  if (graph.num_vertices() != params.n()) {
    return Invalid(absl::StrCat("graph has ", graph.num_vertices(),
                                " vertices, config says n=", params.n()));
  }
  ASSIGN_OR_RETURN(EstimatorOutput estimate,
                   RunPrivateEstimator(graph, cfg, params, seed));
  RETURN_IF_ERROR(
      writer.Write("estimate.json",
                   EstimatorRecordJson(estimate, cfg, params, seed) + "\n"));
  RunResult result;
  result.seed = seed;
  result.summary =
      estimate.abstained ? "estimator abstained" : "estimate written";
  return result;
}

absl::StatusOr<RunResult> RunAudit(const ConfigDoc& doc,
                                   const CommonFlags& flags,
                                   ArtifactWriter& writer) {
  ASSIGN_OR_RETURN(SbmParams params, ParseParams(doc));
  ASSIGN_OR_RETURN(double epsilon, doc.Number("epsilon"));
  ASSIGN_OR_RETURN(MechanismConfig cfg, ParseMechanism(doc, params, epsilon));
  ASSIGN_OR_RETURN(cfg.calibration_scale, doc.Number("calibration_scale", 1.0));
  ASSIGN_OR_RETURN(int64_t max_n, doc.Integer("max_n", kDefaultAuditMaxN));
  std::vector<int> distances;
  if (doc.Has("group_distances")) {
    const Json& list = doc.json()["group_distances"];
    if (!list.is_array())
      return Invalid("\"group_distances\" must be an array");
    for (const Json& d : list) {
      if (!d.is_number_integer() || d.get<int64_t>() < 1) {
        return Invalid("\"group_distances\" must hold positive integers");
      }
      distances.push_back(d.get<int>());
    }
  }

  spdlog::info("auditing n={} over every node-adjacent pair", params.n());
  ASSIGN_OR_RETURN(AuditReport report,
                   AuditRestrictedDp(params, cfg, static_cast<int>(max_n)));
  Json j;
  j["restricted"] = Json::parse(AuditReportJson(report));
  bool pass = report.pass && report.partition_sandwich_pass;
  Json groups = Json::array();
  for (int distance : distances) {
    spdlog::info("group audit at node distance {}", distance);
    ASSIGN_OR_RETURN(
        GroupPrivacyReport group,
        GroupPrivacyAudit(params, cfg, distance, static_cast<int>(max_n)));
    groups.push_back({{"distance", group.distance},
                      {"max_gap", FiniteOrString(group.max_gap)},
                      {"bound", group.bound},
                      {"pairs_checked", group.pairs_checked},
                      {"pass", group.pass}});
    pass = pass && group.pass;
  }
  j["group"] = std::move(groups);
  j["pass"] = pass;
  RETURN_IF_ERROR(writer.Write("audit.json", JsonText(j)));

  RunResult result;
  result.checks_pass = pass;
  result.summary =
      absl::StrCat("audit ", pass ? "passed" : "FAILED", ": max log ratio ",
                   report.max_log_ratio, " vs ", report.epsilon_claimed);
  return result;
}

absl::StatusOr<RunResult> RunLowerBound(const ConfigDoc& doc,
                                        const CommonFlags& flags,
                                        ArtifactWriter& writer) {
  ASSIGN_OR_RETURN(SbmParams params, ParseParams(doc));
  ASSIGN_OR_RETURN(uint64_t seed, ParseSeed(doc, flags));
  ASSIGN_OR_RETURN(std::vector<double> epsilons, doc.Numbers("epsilon"));
  ASSIGN_OR_RETURN(std::string mode, doc.String("mode", "exact"));
  if (mode != "exact" && mode != "monte_carlo") {
    return Invalid("\"mode\" must be \"exact\" or \"monte_carlo\"");
  }
  ASSIGN_OR_RETURN(int64_t replicates, doc.Integer("replicates", 10'000));
  if (replicates < 1) return Invalid("\"replicates\" must be positive");
  ASSIGN_OR_RETURN(int64_t max_n, doc.Integer("max_n", kDefaultAuditMaxN));
  ASSIGN_OR_RETURN(double epsilon_audited, doc.Number("epsilon_audited", 0.0));

  const Labeling sigma =
      MostBalancedLabeling(params.n(), params.num_communities());
  ASSIGN_OR_RETURN(TwoPointInstance instance,
                   MakeTwoPointInstance(params, sigma, seed));
  Json rows = Json::array();
  bool pass = true;
  for (double epsilon : epsilons) {
    ASSIGN_OR_RETURN(MechanismConfig cfg, ParseMechanism(doc, params, epsilon));
    spdlog::info("two-point experiment at epsilon={} ({})", epsilon, mode);
    absl::StatusOr<TwoPointResult> run =
        mode == "exact"
            ? TwoPointExact(params, cfg, instance, static_cast<int>(max_n))
            : TwoPointMonteCarlo(params, cfg, instance, replicates,
                                 epsilon_audited);
    RETURN_IF_ERROR(run.status());
    const TwoPointResult& r = *run;
    Json row = {{"epsilon", r.epsilon_nominal},
                {"epsilon_audited", r.epsilon_audited},
                {"delta_sigma", r.delta_sigma},
                {"delta_sigma_prime", r.delta_sigma_prime},
                {"max_failure", r.max_failure},
                {"floor_nominal", r.floor_nominal},
                {"floor_audited", r.floor_audited},
                {"pass", r.pass}};
    if (mode == "monte_carlo") {
      row["replicates"] = r.replicates;
      row["delta_sigma_ci"] = {r.delta_sigma_ci.lo, r.delta_sigma_ci.hi};
      row["delta_sigma_prime_ci"] = {r.delta_sigma_prime_ci.lo,
                                     r.delta_sigma_prime_ci.hi};
    }
    rows.push_back(std::move(row));
    pass = pass && r.pass;
  }
  Json j = {{"mode", mode},
            {"sigma", LabelsText(instance.sigma)},
            {"sigma_prime", LabelsText(instance.sigma_prime)},
            {"u", instance.u + 1},
            {"v", instance.v + 1},
            {"results", std::move(rows)},
            {"pass", pass}};
  RETURN_IF_ERROR(writer.Write("lower_bound.json", JsonText(j)));

  RunResult result;
  result.seed = seed;
  result.checks_pass = pass;
  result.summary = absl::StrCat("two-point floor ", pass ? "held" : "VIOLATED",
                                " at ", epsilons.size(), " budgets");
  return result;
}

absl::StatusOr<RunResult> RunVerify(const ConfigDoc& doc,
                                    const CommonFlags& flags,
                                    ArtifactWriter& writer) {
  ASSIGN_OR_RETURN(SbmParams params, ParseParams(doc));
  VerifySuiteConfig cfg(params);
  ASSIGN_OR_RETURN(cfg.seed, ParseSeed(doc, flags));
  ASSIGN_OR_RETURN(cfg.s_grid, doc.Numbers("s_grid", cfg.s_grid));
  ASSIGN_OR_RETURN(cfg.w, doc.OptionalNumber("w"));
  ASSIGN_OR_RETURN(cfg.lambda_override, doc.OptionalNumber("lambda_override"));
  ASSIGN_OR_RETURN(cfg.envelope_c, doc.Number("C", cfg.envelope_c));
  ASSIGN_OR_RETURN(cfg.epsilons, doc.Numbers("epsilons", cfg.epsilons));
  ASSIGN_OR_RETURN(int64_t graphs, doc.Integer("peeling_graphs", 4));
  ASSIGN_OR_RETURN(int64_t points, doc.Integer("peeling_grid_points", 10));
  if (graphs < 0 || points < 1) {
    return Invalid("peeling_graphs >= 0 and peeling_grid_points >= 1");
  }
  cfg.peeling_graphs = static_cast<int>(graphs);
  cfg.peeling_grid_points = static_cast<int>(points);

  VerificationLog log;
  RETURN_IF_ERROR(RunVerificationSuite(cfg, log));
  std::ostringstream csv, xml;
  log.WriteCsv(csv);
  log.WriteJUnitXml(xml);
  RETURN_IF_ERROR(writer.Write("verify.csv", csv.str()));
  RETURN_IF_ERROR(writer.Write("verify.xml", xml.str()));

  int shown = 0;
  for (const VerificationRecord& record : log.records()) {
    if (record.pass || shown == kMaxLoggedFailures) continue;
    ++shown;
    spdlog::warn("{} failed on {}: lhs={} rhs={}", record.lemma,
                 record.instance, record.lhs, record.rhs);
  }
  RunResult result;
  result.seed = cfg.seed;
  result.checks_pass = log.pass();
  result.summary = absl::StrCat(log.records().size(), " checks, ",
                                log.failures(), " failures");
  return result;
}

absl::StatusOr<RunResult> RunSweep(const std::string& text,
                                   const CommonFlags& flags,
                                   ArtifactWriter& writer) {
  ASSIGN_OR_RETURN(SweepConfig cfg, ParseSweepConfig(text));
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.threads) cfg.threads = *flags.threads;
  RETURN_IF_ERROR(ValidateSweepConfig(cfg));
  spdlog::info("sweep with {} replicates per cell on {} threads",
               cfg.replicates, cfg.threads);
  ASSIGN_OR_RETURN(RiskReport report, RunRiskSweep(cfg));

  std::ostringstream risk, overlay;
  WriteRiskCsv(report, risk);
  WriteLowerBoundOverlayCsv(report, overlay);
  RETURN_IF_ERROR(writer.Write("risk.csv", risk.str()));
  RETURN_IF_ERROR(writer.Write("risk.json", RiskReportJson(report) + "\n"));
  RETURN_IF_ERROR(writer.Write("overlay.csv", overlay.str()));

  const TrendReport trends = CheckRiskTrends(report);
  Json t = {{"max_isotonic_ratio", trends.max_isotonic_ratio},
            {"monotone_pass", trends.monotone_pass},
            {"huge_cells", trends.huge_cells},
            {"huge_pass", trends.huge_pass},
            {"floor_pass", trends.floor_pass},
            {"markov_pass", trends.markov_pass},
            {"baseline_pass", trends.baseline_pass}};
  RETURN_IF_ERROR(writer.Write("trends.json", JsonText(t)));

  RunResult result;
  result.seed = cfg.seed;
  result.threads = cfg.threads;
  result.summary = absl::StrCat(report.cells.size(), " cells written");
  return result;
}

// ---------------------------------------------------------------- dispatch

int ExitCodeFor(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kFailedPrecondition:
    case absl::StatusCode::kResourceExhausted:
    case absl::StatusCode::kOutOfRange:
    case absl::StatusCode::kNotFound:
      return kExitValidation;
    default:
      return kExitRuntime;
  }
}

absl::StatusOr<spdlog::level::level_enum> ParseLogLevel(
    const std::string& name) {
  const auto level = spdlog::level::from_str(name);
  if (level == spdlog::level::off && name != "off") {
    return Invalid(absl::StrCat("unknown log level \"", name, "\""));
  }
  return level;
}

absl::StatusOr<RunResult> RunCommand(const std::string& command,
                                     const std::string& text,
                                     const CommonFlags& flags,
                                     ArtifactWriter& writer) {
  if (command == "sweep") return RunSweep(text, flags, writer);

  using Runner = std::function<absl::StatusOr<RunResult>(
      const ConfigDoc&, const CommonFlags&, ArtifactWriter&)>;
  struct Entry {
    std::set<std::string> keys;
    Runner run;
  };
  const std::map<std::string, Entry> table = {
      {"sample", {KeySet({&kInstanceKeys}, {"truth"}), RunSample}},
      {"estimate",
       {KeySet({&kInstanceKeys, &kMechanismKeys}, {"graph_file"}),
        RunEstimate}},
      {"audit",
       {KeySet({&kInstanceKeys, &kMechanismKeys},
               {"max_n", "group_distances", "calibration_scale"}),
        RunAudit}},
      {"lower-bound",
       {KeySet({&kInstanceKeys, &kMechanismKeys},
               {"mode", "replicates", "max_n", "epsilon_audited"}),
        RunLowerBound}},
      {"verify",
       {KeySet({&kInstanceKeys},
               {"s_grid", "w", "lambda_override", "C", "epsilons",
                "peeling_graphs", "peeling_grid_points"}),
        RunVerify}},
  };
  const Entry& entry = table.at(command);
  ASSIGN_OR_RETURN(ConfigDoc doc, ConfigDoc::Parse(text, entry.keys));
  return entry.run(doc, flags, writer);
}

Json ManifestJson(const std::string& command, const std::string& config_text,
                  const RunResult& result, const ArtifactWriter& writer) {
  Json artifacts = Json::array();
  for (const std::string& name : writer.written()) {
    absl::StatusOr<std::string> bytes = ReadFile(writer.dir() / name);
    artifacts.push_back(
        {{"name", name}, {"sha256", bytes.ok() ? Sha256Hex(*bytes) : ""}});
  }
  Json config = Json::parse(config_text, nullptr, false);
  return {{"tool", "nodedp"},
          {"version", NODEDP_VERSION},
          {"command", command},
          {"schema_version", kConfigSchemaVersion},
          {"config_sha256", Sha256Hex(config_text)},
          {"config", std::move(config)},
          {"seed", result.seed},
          {"threads", result.threads},
          {"checks_pass", result.checks_pass},
          {"artifacts", std::move(artifacts)}};
}

}  // namespace

int Dispatch(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"Node-private community detection in stochastic block models",
               "nodedp"};
  app.set_version_flag("--version", NODEDP_VERSION);
  app.require_subcommand(1);

  CommonFlags flags;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"sample", "Draw a graph and its planted labeling"},
      {"estimate", "Run the private estimator on a graph file"},
      {"audit", "Exhaustive privacy audit at small n"},
      {"lower-bound", "Two-point lower-bound experiment"},
      {"verify", "Brute-force checks of the supporting inequalities"},
      {"sweep", "Monte-Carlo risk sweep over a parameter grid"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", flags.config_path, "JSON config file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", flags.out_dir, "Output directory")->required();
    sub->add_option("--seed", flags.seed, "Overrides the config seed");
    sub->add_option("--threads", flags.threads, "Worker thread cap")
        ->check(CLI::PositiveNumber);
    sub->add_option("--log-level", flags.log_level,
                    "trace, debug, info, warn, error or off");
  }

  if (argc <= 1) {
    err << app.help();
    return kExitValidation;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << NODEDP_VERSION << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitValidation;
  }

  std::string command;
  for (const CLI::App* sub : app.get_subcommands()) command = sub->get_name();

  auto sink = std::make_shared<spdlog::sinks::ostream_sink_st>(err);
  auto logger = std::make_shared<spdlog::logger>("nodedp", sink);
  logger->set_pattern("[%l] %v");
  absl::StatusOr<spdlog::level::level_enum> level =
      ParseLogLevel(flags.log_level);
  if (!level.ok()) {
    err << "error: " << level.status().message() << "\n";
    return kExitValidation;
  }
  logger->set_level(*level);
  const auto previous = spdlog::default_logger();
  spdlog::set_default_logger(logger);
  struct Restore {
    std::shared_ptr<spdlog::logger> logger;
    ~Restore() { spdlog::set_default_logger(logger); }
  } restore{previous};

  absl::StatusOr<std::string> text = ReadFile(flags.config_path);
  if (!text.ok()) {
    err << "error: " << text.status().message() << "\n";
    return kExitValidation;
  }

  try {
    const fs::path out_dir(flags.out_dir);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir)) {
      err << "error: cannot create output directory " << out_dir << "\n";
      return kExitRuntime;
    }
    ArtifactWriter writer(out_dir);
    absl::StatusOr<RunResult> result =
        RunCommand(command, *text, flags, writer);
    if (!result.ok()) {
      err << "error: " << result.status() << "\n";
      return ExitCodeFor(result.status());
    }
    if (command != "sweep") result->threads = 1;
    const Json manifest = ManifestJson(command, *text, *result, writer);
    std::ofstream manifest_out(out_dir / "manifest.json", std::ios::trunc);
    manifest_out << JsonText(manifest);
    if (!manifest_out) {
      err << "error: failed to write manifest.json\n";
      return kExitRuntime;
    }
    out << command << ": " << result->summary << "\n";
    return result->checks_pass ? kExitOk : kExitCheckFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace nodedp::cli
