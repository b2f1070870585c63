// vcdet: command line front end for the volume-correlation subspace detector.
//
//   vcdet simulate --config <path|preset> [--seed N] [--out <csv>]
//   vcdet detect   --samples <csv> --target-basis <csv> [--sigma2 X] [--trace <csv>]
//   vcdet bound    --hypothesis {present|absent} --eigs l1,l2,... --sigma2 X --n N
//                  --delta D --eps E
//   vcdet generate --config <path|preset> --trial N --hypothesis {present|absent}
//                  --samples <csv> --target-basis <csv>
//
// Exit codes: 0 success, 2 invalid input, 3 I/O failure.

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "vcd/detector.hpp"
#include "vcd/error.hpp"
#include "vcd/experiment.hpp"
#include "vcd/io.hpp"
#include "vcd/theory.hpp"

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitIo = 3;

struct SimulateArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> trials;
  std::optional<std::size_t> parallelism;
};

struct DetectArgs {
  std::string samples;
  std::string target_basis;
  std::optional<double> sigma2;
  std::optional<std::string> trace;
  double gamma = 2.0;
  double divergence_threshold = 1e6;
  double stall_epsilon = 1e-3;
  std::size_t stall_patience = 5;
  std::optional<std::size_t> max_samples;
  double zero_volume_tol = 1e-8;
};

struct BoundArgs {
  std::string hypothesis;
  std::vector<double> eigs;
  double sigma2 = 0.0;
  std::size_t n = 0;
  double delta = 0.0;
  double eps = 0.0;
  std::optional<std::size_t> k;
  std::optional<std::size_t> d2;
};

struct GenerateArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::size_t trial = 0;
  std::string hypothesis = "present";
  std::string samples;
  std::string target_basis;
  std::optional<std::size_t> count;
};

int run_simulate(const SimulateArgs& args) {
  vcd::ExperimentConfig cfg = vcd::load_experiment_config(args.config);
  if (args.seed) cfg.scenario.seed = *args.seed;
  if (args.out) cfg.output_path = *args.out;
  if (args.trials) cfg.trials = *args.trials;
  if (args.parallelism) cfg.parallelism = *args.parallelism;
  cfg.validate();

  const auto results = vcd::run_experiment(cfg);
  std::ostringstream csv;
  vcd::write_records_csv(csv, results);
  vcd::write_text_file(cfg.output_path, csv.str());
  const nlohmann::json summary = vcd::summarize_experiment(cfg, results);
  vcd::write_text_file(cfg.output_path + ".summary.json", summary.dump(2) + "\n");

  std::cout << nlohmann::json{{"records", cfg.output_path},
                              {"summary", cfg.output_path + ".summary.json"},
                              {"decisions", summary["decisions"]},
                              {"final_inv_T_median", summary["final_inv_T_median"]}}
                   .dump()
            << "\n";
  return 0;
}

int run_detect(const DetectArgs& args) {
  const vcd::SubspaceBasis basis = vcd::read_basis_csv(args.target_basis);
  const std::vector<vcd::Vector> samples = vcd::read_vectors_csv(args.samples);
  for (std::size_t r = 0; r < samples.size(); ++r) {
    if (samples[r].size() != basis.ambient_dim()) {
      throw vcd::InputError(args.samples + ": row " + std::to_string(r + 1) + " has " +
                            std::to_string(samples[r].size()) + " entries but the target basis has " +
                            std::to_string(basis.ambient_dim()) + " rows");
    }
  }

  vcd::DetectorConfig cfg;
  cfg.target_basis = basis;
  cfg.noise_variance_hint = args.sigma2;
  cfg.rank_gap_factor = args.gamma;
  cfg.divergence_threshold = args.divergence_threshold;
  cfg.stall_epsilon = args.stall_epsilon;
  cfg.stall_patience = args.stall_patience;
  cfg.zero_volume_tol = args.zero_volume_tol;
  cfg.max_samples = args.max_samples.value_or(std::max<std::size_t>(samples.size(), 1));

  const vcd::StreamResult res = vcd::run_stream(cfg, samples);
  if (args.trace) {
    std::ostringstream os;
    vcd::write_trajectory_csv(os, res.trajectory, res.decision);
    vcd::write_text_file(*args.trace, os.str());
  }

  nlohmann::json out{{"decision", vcd::to_string(res.decision.verdict)},
                     {"samples_used", res.trajectory.size()}};
  out["decided_at"] =
      res.decision.decided_at ? nlohmann::json(*res.decision.decided_at) : nlohmann::json(nullptr);
  out["final_inv_T"] =
      res.trajectory.empty() ? nlohmann::json(nullptr) : nlohmann::json(res.trajectory.back().inv_t);
  std::cout << out.dump() << "\n";
  return 0;
}

int run_bound(const BoundArgs& args) {
  vcd::BoundInputs in;
  in.eigenvalues = args.eigs;
  in.noise_variance = args.sigma2;
  in.ambient_dim = args.n;
  in.signal_rank = args.k.value_or(0);
  in.delta = args.delta;
  in.epsilon = args.eps;
  in.target_dim = args.d2;
  const vcd::BoundReport report = args.hypothesis == "present"
                                      ? vcd::sample_bound_target_present(in)
                                      : vcd::sample_bound_target_absent(in);
  nlohmann::json j = report;
  j["hypothesis"] = args.hypothesis;
  std::cout << j.dump() << "\n";
  return 0;
}

int run_generate(const GenerateArgs& args) {
  vcd::ExperimentConfig cfg = vcd::load_experiment_config(args.config);
  if (args.seed) cfg.scenario.seed = *args.seed;
  if (args.trial >= cfg.trials) {
    throw vcd::InputError("trial " + std::to_string(args.trial) + " is outside the configured " +
                          std::to_string(cfg.trials) + " trials");
  }
  const bool present = args.hypothesis == "present";
  const std::size_t count = args.count.value_or(cfg.sample_budget());
  const vcd::Scenario sc =
      vcd::make_scenario(vcd::trial_scenario_config(cfg, args.trial, present));
  vcd::write_vectors_csv(args.samples, vcd::trial_samples(cfg, args.trial, present, count));
  vcd::write_matrix_csv(args.target_basis, sc.target_basis.matrix());
  std::cout << nlohmann::json{{"samples", args.samples},
                              {"target_basis", args.target_basis},
                              {"rows", count},
                              {"noise_variance", sc.noise_std * sc.noise_std}}
                   .dump()
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Volume-correlation subspace detector"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo runs under both hypotheses");
  simulate->add_option("--config", sim.config, "JSON config file or preset name")->required();
  simulate->add_option("--seed", sim.seed, "Master seed override");
  simulate->add_option("--out", sim.out, "Trajectory CSV path");
  simulate->add_option("--trials", sim.trials, "Number of trials override");
  simulate->add_option("--parallelism", sim.parallelism, "Worker threads");

  DetectArgs det;
  auto* detect = app.add_subcommand("detect", "Run the detector over a samples file");
  detect->add_option("--samples", det.samples, "CSV, one sample per row")->required();
  detect->add_option("--target-basis", det.target_basis, "CSV, n rows x d2 columns")->required();
  detect->add_option("--sigma2", det.sigma2, "Known noise variance");
  detect->add_option("--trace", det.trace, "Write the trajectory CSV here");
  detect->add_option("--gamma", det.gamma, "Rank threshold factor on sigma2");
  detect->add_option("--tdiv", det.divergence_threshold, "Threshold on 1/T");
  detect->add_option("--stall-eps", det.stall_epsilon, "Relative stall threshold on 1/T");
  detect->add_option("--patience", det.stall_patience, "Consecutive stalled steps");
  detect->add_option("--max-samples", det.max_samples, "Sample budget");
  detect->add_option("--zero-tol", det.zero_volume_tol, "Zero-volume tolerance on T");

  BoundArgs bnd;
  auto* bound = app.add_subcommand("bound", "Sample-size bound for the noisy detector");
  bound->add_option("--hypothesis", bnd.hypothesis)
      ->required()
      ->check(CLI::IsMember({"present", "absent"}));
  bound->add_option("--eigs", bnd.eigs, "Descending eigenvalues")->required()->delimiter(',');
  bound->add_option("--sigma2", bnd.sigma2)->required();
  bound->add_option("--n", bnd.n)->required();
  bound->add_option("--delta", bnd.delta)->required();
  bound->add_option("--eps", bnd.eps)->required();
  bound->add_option("--k", bnd.k, "Signal rank (defaults to #eigs above sigma2)");
  bound->add_option("--d2", bnd.d2, "Target dimension, for the deviation bound");

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write one trial's samples and target basis");
  generate->add_option("--config", gen.config, "JSON config file or preset name")->required();
  generate->add_option("--seed", gen.seed, "Master seed override");
  generate->add_option("--trial", gen.trial);
  generate->add_option("--hypothesis", gen.hypothesis)->check(CLI::IsMember({"present", "absent"}));
  generate->add_option("--samples", gen.samples)->required();
  generate->add_option("--target-basis", gen.target_basis)->required();
  generate->add_option("--count", gen.count, "Rows to write (default: sample budget)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInvalid;
  }

  try {
    if (*simulate) return run_simulate(sim);
    if (*detect) return run_detect(det);
    if (*bound) return run_bound(bnd);
    if (*generate) return run_generate(gen);
  } catch (const vcd::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}
