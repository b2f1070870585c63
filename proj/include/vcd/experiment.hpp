#ifndef VCD_EXPERIMENT_HPP
#define VCD_EXPERIMENT_HPP

// Monte Carlo experiments: seeded detector runs under both hypotheses,
// trajectory records, and per-m summaries.
//
// Seeding. Every trial draws its own scenario (target and clutter bases)
// from derive_seed(master, trial, 2); the two hypotheses of a trial share
// that geometry. Sample streams use derive_seed(master, trial, 0) (target
// present) and derive_seed(master, trial, 1) (target absent). Each trial is
// therefore reproducible on its own, independent of parallelism.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vcd/detector.hpp"
#include "vcd/scenario.hpp"

namespace vcd {

struct DetectorSettings {
  // Pass the scenario's noise variance to the rank rule.
  bool use_noise_hint = true;
  double rank_gap_factor = 2.0;
  double divergence_threshold = 1e6;
  double stall_epsilon = 1e-3;
  std::size_t stall_patience = 5;
  double zero_volume_tol = 1e-8;
};

struct ExperimentConfig {
  std::string name = "custom";
  // target_present is ignored (both hypotheses run); seed is the master
  // seed.
  ScenarioConfig scenario;
  DetectorSettings detector;
  std::size_t trials = 1;
  // 0 selects 4 (d1 + d2).
  std::size_t max_samples = 0;
  std::string output_path = "trajectories.csv";
  std::size_t parallelism = 1;

  void validate() const;
  std::size_t sample_budget() const;
};

void to_json(nlohmann::json& j, const ExperimentConfig& cfg);
void from_json(const nlohmann::json& j, ExperimentConfig& cfg);

// Bundled presets: "fig1_full" (n=1024, d1=40, d2=10, -10 dB, 100 trials)
// and "fig1_desk" (n=256, d1=20, d2=5, -10 dB, 50 trials, 100 samples).
// Throws InputError for unknown names.
ExperimentConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

// Loads a JSON config file, or a preset when `path_or_preset` names one and
// no such file exists.
ExperimentConfig load_experiment_config(const std::string& path_or_preset);

struct TrialResult {
  std::size_t trial_id = 0;
  bool target_present = true;
  Decision decision;
  std::vector<TrajectoryPoint> trajectory;
};

ScenarioConfig trial_scenario_config(const ExperimentConfig& cfg, std::size_t trial,
                                     bool target_present);
std::uint64_t trial_sample_seed(const ExperimentConfig& cfg, std::size_t trial,
                                bool target_present);
DetectorConfig trial_detector_config(const ExperimentConfig& cfg, const Scenario& sc);

// The first `count` samples of a trial's stream, identical to what
// run_experiment feeds the detector.
std::vector<Vector> trial_samples(const ExperimentConfig& cfg, std::size_t trial,
                                  bool target_present, std::size_t count);

TrialResult run_trial(const ExperimentConfig& cfg, std::size_t trial, bool target_present);

// Results ordered by trial id, target-present run first within a trial.
std::vector<TrialResult> run_experiment(const ExperimentConfig& cfg);

// CSV header: trial_id,hypothesis,i,T,inv_T,k_i,decision
void write_records_csv(std::ostream& os, const std::vector<TrialResult>& results);

// Per-m quantiles of inv_T, decision counts and medians of the final inv_T
// per hypothesis. Computed only from values that appear in the CSV.
nlohmann::json summarize_experiment(const ExperimentConfig& cfg,
                                    const std::vector<TrialResult>& results);

}  // namespace vcd

#endif  // VCD_EXPERIMENT_HPP
