#include "vcd/experiment.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>

#include "parallel.hpp"
#include "vcd/error.hpp"
#include "vcd/io.hpp"
#include "vcd/random.hpp"
#include "vcd/theory.hpp"

namespace vcd {

namespace {

constexpr std::uint64_t kPresentStream = 0;
constexpr std::uint64_t kAbsentStream = 1;
constexpr std::uint64_t kGeometryStream = 2;

ExperimentConfig make_preset(const std::string& name, Index n, Index d1, Index d2,
                             std::size_t trials, std::size_t max_samples) {
  ExperimentConfig cfg;
  cfg.name = name;
  cfg.scenario.ambient_dim = n;
  cfg.scenario.clutter_dim = d1;
  cfg.scenario.target_dim = d2;
  cfg.scenario.snr_db = -10.0;
  cfg.scenario.seed = 1;
  cfg.detector.use_noise_hint = true;
  cfg.trials = trials;
  cfg.max_samples = max_samples;
  cfg.output_path = name + ".csv";
  return cfg;
}

}  // namespace

void ExperimentConfig::validate() const {
  ScenarioConfig probe = scenario;
  probe.validate();
  if (trials < 1) throw InputError("experiment: trials must be >= 1");
  if (parallelism < 1) throw InputError("experiment: parallelism must be >= 1");
  if (output_path.empty()) throw InputError("experiment: output path is empty");
}

std::size_t ExperimentConfig::sample_budget() const {
  if (max_samples > 0) return max_samples;
  return static_cast<std::size_t>(4 * (scenario.clutter_dim + scenario.target_dim));
}

void to_json(nlohmann::json& j, const ExperimentConfig& cfg) {
  nlohmann::json sc = cfg.scenario;
  sc.erase("hypothesis");
  sc.erase("seed");
  j = nlohmann::json{{"name", cfg.name},
                     {"scenario", sc},
                     {"seed", cfg.scenario.seed},
                     {"detector",
                      {{"use_noise_hint", cfg.detector.use_noise_hint},
                       {"rank_gap_factor", cfg.detector.rank_gap_factor},
                       {"divergence_threshold", cfg.detector.divergence_threshold},
                       {"stall_epsilon", cfg.detector.stall_epsilon},
                       {"stall_patience", cfg.detector.stall_patience},
                       {"zero_volume_tol", cfg.detector.zero_volume_tol}}},
                     {"trials", cfg.trials},
                     {"max_samples", cfg.sample_budget()},
                     {"output", cfg.output_path},
                     {"parallelism", cfg.parallelism}};
}

void from_json(const nlohmann::json& j, ExperimentConfig& cfg) {
  try {
    cfg = ExperimentConfig{};
    cfg.name = j.value("name", std::string("custom"));
    nlohmann::json sc = j.at("scenario");
    sc["seed"] = j.value("seed", std::uint64_t{0});
    sc["hypothesis"] = "present";
    cfg.scenario = sc.get<ScenarioConfig>();
    if (j.contains("detector")) {
      const auto& d = j.at("detector");
      DetectorSettings s;
      s.use_noise_hint = d.value("use_noise_hint", s.use_noise_hint);
      s.rank_gap_factor = d.value("rank_gap_factor", s.rank_gap_factor);
      s.divergence_threshold = d.value("divergence_threshold", s.divergence_threshold);
      s.stall_epsilon = d.value("stall_epsilon", s.stall_epsilon);
      s.stall_patience = d.value("stall_patience", s.stall_patience);
      s.zero_volume_tol = d.value("zero_volume_tol", s.zero_volume_tol);
      cfg.detector = s;
    }
    cfg.trials = j.value("trials", std::size_t{1});
    cfg.max_samples = j.value("max_samples", std::size_t{0});
    cfg.output_path = j.value("output", std::string("trajectories.csv"));
    cfg.parallelism = j.value("parallelism", std::size_t{1});
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("experiment config: ") + e.what());
  }
  cfg.validate();
}

std::vector<std::string> preset_names() { return {"fig1_desk", "fig1_full"}; }

ExperimentConfig preset_config(const std::string& name) {
  if (name == "fig1_full") return make_preset(name, 1024, 40, 10, 100, 200);
  if (name == "fig1_desk") return make_preset(name, 256, 20, 5, 50, 100);
  throw InputError("unknown preset \"" + name + "\"");
}

ExperimentConfig load_experiment_config(const std::string& path_or_preset) {
  const std::filesystem::path path(path_or_preset);
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) {
    for (const auto& p : preset_names()) {
      if (p == path_or_preset) return preset_config(p);
    }
    throw IoError("config file " + path_or_preset + " does not exist");
  }
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return j.get<ExperimentConfig>();
}

ScenarioConfig trial_scenario_config(const ExperimentConfig& cfg, std::size_t trial,
                                     bool target_present) {
  ScenarioConfig sc = cfg.scenario;
  sc.seed = derive_seed(cfg.scenario.seed, trial, kGeometryStream);
  sc.target_present = target_present;
  return sc;
}

std::uint64_t trial_sample_seed(const ExperimentConfig& cfg, std::size_t trial,
                                bool target_present) {
  return derive_seed(cfg.scenario.seed, trial, target_present ? kPresentStream : kAbsentStream);
}

DetectorConfig trial_detector_config(const ExperimentConfig& cfg, const Scenario& sc) {
  DetectorConfig d;
  d.target_basis = sc.target_basis;
  if (cfg.detector.use_noise_hint) d.noise_variance_hint = sc.noise_std * sc.noise_std;
  d.rank_gap_factor = cfg.detector.rank_gap_factor;
  d.divergence_threshold = cfg.detector.divergence_threshold;
  d.stall_epsilon = cfg.detector.stall_epsilon;
  d.stall_patience = cfg.detector.stall_patience;
  d.zero_volume_tol = cfg.detector.zero_volume_tol;
  d.max_samples = cfg.sample_budget();
  return d;
}

std::vector<Vector> trial_samples(const ExperimentConfig& cfg, std::size_t trial,
                                  bool target_present, std::size_t count) {
  const Scenario sc = make_scenario(trial_scenario_config(cfg, trial, target_present));
  RandomStream rng(trial_sample_seed(cfg, trial, target_present));
  std::vector<Vector> out;
  out.reserve(count);
  for (std::size_t i = 1; i <= count; ++i) out.push_back(draw_sample(sc, i, rng).y);
  return out;
}

TrialResult run_trial(const ExperimentConfig& cfg, std::size_t trial, bool target_present) {
  const Scenario sc = make_scenario(trial_scenario_config(cfg, trial, target_present));
  RandomStream rng(trial_sample_seed(cfg, trial, target_present));
  std::size_t index = 0;
  StreamResult res = run_stream(trial_detector_config(cfg, sc), [&]() -> std::optional<Vector> {
    return draw_sample(sc, ++index, rng).y;
  });
  return {trial, target_present, res.decision, std::move(res.trajectory)};
}

std::vector<TrialResult> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<TrialResult> results(2 * cfg.trials);
  detail::parallel_for(results.size(), cfg.parallelism, [&](std::size_t slot) {
    results[slot] = run_trial(cfg, slot / 2, slot % 2 == 0);
  });
  return results;
}

void write_records_csv(std::ostream& os, const std::vector<TrialResult>& results) {
  os << "trial_id,hypothesis,i,T,inv_T,k_i,decision\n";
  for (const TrialResult& r : results) {
    const char* hyp = r.target_present ? "present" : "absent";
    for (const TrajectoryPoint& p : r.trajectory) {
      os << r.trial_id << ',' << hyp << ',' << p.index << ',' << format_double(p.t) << ','
         << format_double(p.inv_t) << ',' << p.rank << ',';
      if (r.decision.decided() && r.decision.decided_at == p.index) {
        os << to_string(r.decision.verdict);
      }
      os << '\n';
    }
  }
}

nlohmann::json summarize_experiment(const ExperimentConfig& cfg,
                                    const std::vector<TrialResult>& results) {
  std::size_t longest = 0;
  for (const auto& r : results) longest = std::max(longest, r.trajectory.size());

  auto quantiles_json = [](const std::vector<double>& v) {
    const Quantiles q = summarize_values(v);
    if (q.count == 0) return nlohmann::json{{"count", 0}};
    return nlohmann::json{{"count", q.count}, {"q10", q.q10}, {"median", q.median}, {"q90", q.q90}};
  };

  nlohmann::json per_m = nlohmann::json::array();
  for (std::size_t m = 0; m < longest; ++m) {
    std::vector<double> p;
    std::vector<double> a;
    for (const auto& r : results) {
      if (m < r.trajectory.size()) (r.target_present ? p : a).push_back(r.trajectory[m].inv_t);
    }
    per_m.push_back({{"m", m + 1}, {"present", quantiles_json(p)}, {"absent", quantiles_json(a)}});
  }

  nlohmann::json decisions;
  nlohmann::json finals;
  for (bool present : {true, false}) {
    std::size_t counts[3] = {0, 0, 0};
    std::vector<double> final_inv_t;
    for (const auto& r : results) {
      if (r.target_present != present) continue;
      ++counts[static_cast<int>(r.decision.verdict)];
      if (!r.trajectory.empty()) final_inv_t.push_back(r.trajectory.back().inv_t);
    }
    const char* key = present ? "present" : "absent";
    decisions[key] = {{"Undecided", counts[0]},
                      {"TargetPresent", counts[1]},
                      {"TargetAbsent", counts[2]}};
    finals[key] = final_inv_t.empty() ? nlohmann::json(nullptr)
                                      : nlohmann::json(quantile(final_inv_t, 0.5));
  }

  return {{"config", cfg}, {"decisions", decisions}, {"final_inv_T_median", finals},
          {"per_m", per_m}};
}

}  // namespace vcd
