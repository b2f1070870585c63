#ifndef VCD_SCENARIO_HPP
#define VCD_SCENARIO_HPP

// Synthetic problem instances: a known target subspace, an unknown clutter
// subspace with trivial intersection, and the sampling law
//
//   target present:  y = Q_S a + Q_C b + w
//   target absent:   y =         Q_C b + w
//
// with a ~ N(0, I_d2), b ~ N(0, I_d1), w ~ N(0, sigma^2 I_n).
//
// SNR convention: SNR_dB = 10 log10(E||x||^2 / E||w||^2) evaluated for the
// target-present signal x = Q_S a + Q_C b, i.e.
//
//   sigma^2 = (d1 + d2) * 10^(-SNR_dB / 10) / n.
//
// The same sigma is used under both hypotheses. snr_db = +infinity selects
// the noiseless regime (sigma = 0).

#include <cstdint>
#include <limits>
#include <vector>

#include <nlohmann/json.hpp>

#include "vcd/geometry.hpp"
#include "vcd/random.hpp"

namespace vcd {

inline constexpr double kNoiseless = std::numeric_limits<double>::infinity();

struct ScenarioConfig {
  Index ambient_dim = 0;
  Index clutter_dim = 0;
  Index target_dim = 0;
  double snr_db = kNoiseless;
  bool target_present = true;
  std::uint64_t seed = 0;

  void validate() const;
  double noise_variance() const;
};

struct Scenario {
  SubspaceBasis target_basis;
  SubspaceBasis clutter_basis;
  double noise_std = 0.0;
  ScenarioConfig config;

  // Same geometry and noise level, other hypothesis.
  Scenario with_hypothesis(bool target_present) const;
};

struct Sample {
  Vector y;
  std::size_t index = 0;
};

// Orthonormalized d i.i.d. standard Gaussian vectors in R^n.
SubspaceBasis random_subspace(Index n, Index d, RandomStream& rng);

// Draws Q_S then Q_C from a stream seeded with cfg.seed, redrawing Q_C while
// the smallest principal angle is <= 1e-6.
Scenario make_scenario(const ScenarioConfig& cfg);

Sample draw_sample(const Scenario& sc, std::size_t index, RandomStream& rng);

// Eigenvalues (descending) of the population covariance
// E{y y^T} = [Q_S Q_S^T] + Q_C Q_C^T + sigma^2 I.
std::vector<double> population_eigenvalues(const Scenario& sc);

// JSON form {n, d1, d2, snr_db, seed, hypothesis}; snr_db is null for the
// noiseless regime. Bases are regenerated from the seed.
void to_json(nlohmann::json& j, const ScenarioConfig& cfg);
void from_json(const nlohmann::json& j, ScenarioConfig& cfg);

}  // namespace vcd

#endif  // VCD_SCENARIO_HPP
