#include "vcd/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vcd/error.hpp"

namespace vcd {

namespace {
constexpr double kMinSeparationAngle = 1e-6;
constexpr int kMaxRedraws = 64;
}  // namespace

void ScenarioConfig::validate() const {
  if (ambient_dim < 1) throw InputError("scenario: n must be positive");
  if (clutter_dim < 1) throw InputError("scenario: d1 must be >= 1");
  if (target_dim < 1) throw InputError("scenario: d2 must be >= 1");
  if (clutter_dim + target_dim > ambient_dim) {
    throw InputError("scenario: d1 + d2 = " + std::to_string(clutter_dim + target_dim) +
                     " exceeds n = " + std::to_string(ambient_dim));
  }
  if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity()) {
    throw InputError("scenario: snr_db must be a number or +infinity");
  }
}

double ScenarioConfig::noise_variance() const {
  if (std::isinf(snr_db)) return 0.0;
  return static_cast<double>(clutter_dim + target_dim) * std::pow(10.0, -snr_db / 10.0) /
         static_cast<double>(ambient_dim);
}

Scenario Scenario::with_hypothesis(bool target_present) const {
  Scenario out = *this;
  out.config.target_present = target_present;
  return out;
}

SubspaceBasis random_subspace(Index n, Index d, RandomStream& rng) {
  if (n < 1 || d < 0 || d > n) {
    throw InputError("random_subspace: need 0 <= d <= n (n=" + std::to_string(n) +
                     ", d=" + std::to_string(d) + ")");
  }
  if (d == 0) return SubspaceBasis::zero(n);
  for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
    SubspaceBasis b = orthonormalize(rng.normal_matrix(n, d), 1e-10);
    if (b.dim() == d) return b;
  }
  throw DegenerateGeometryError("random_subspace: could not draw a full-rank basis");
}

Scenario make_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  RandomStream rng(cfg.seed);
  Scenario sc;
  sc.config = cfg;
  sc.noise_std = std::sqrt(cfg.noise_variance());
  sc.target_basis = random_subspace(cfg.ambient_dim, cfg.target_dim, rng);
  for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
    sc.clutter_basis = random_subspace(cfg.ambient_dim, cfg.clutter_dim, rng);
    const auto angles = principal_angles(sc.target_basis, sc.clutter_basis).angles;
    if (angles.front() > kMinSeparationAngle) return sc;
  }
  throw DegenerateGeometryError("make_scenario: target and clutter subspaces keep intersecting");
}

Sample draw_sample(const Scenario& sc, std::size_t index, RandomStream& rng) {
  const Index n = sc.config.ambient_dim;
  Sample s;
  s.index = index;
  s.y = Vector::Zero(n);
  if (sc.config.target_present) {
    s.y.noalias() += sc.target_basis.matrix() * rng.normal_vector(sc.target_basis.dim());
  }
  s.y.noalias() += sc.clutter_basis.matrix() * rng.normal_vector(sc.clutter_basis.dim());
  if (sc.noise_std > 0.0) s.y += sc.noise_std * rng.normal_vector(n);
  return s;
}

std::vector<double> population_eigenvalues(const Scenario& sc) {
  const Index n = sc.config.ambient_dim;
  Matrix cov = sc.noise_std * sc.noise_std * Matrix::Identity(n, n);
  cov.noalias() += sc.clutter_basis.matrix() * sc.clutter_basis.matrix().transpose();
  if (sc.config.target_present) {
    cov.noalias() += sc.target_basis.matrix() * sc.target_basis.matrix().transpose();
  }
  const Matrix sym = 0.5 * (cov + cov.transpose());
  const EigenPairs eig = symmetric_eig(sym);
  return {eig.values.data(), eig.values.data() + eig.values.size()};
}

void to_json(nlohmann::json& j, const ScenarioConfig& cfg) {
  j = nlohmann::json{{"n", cfg.ambient_dim},
                     {"d1", cfg.clutter_dim},
                     {"d2", cfg.target_dim},
                     {"seed", cfg.seed},
                     {"hypothesis", cfg.target_present ? "present" : "absent"}};
  if (std::isinf(cfg.snr_db)) {
    j["snr_db"] = nullptr;
  } else {
    j["snr_db"] = cfg.snr_db;
  }
}

void from_json(const nlohmann::json& j, ScenarioConfig& cfg) {
  try {
    cfg.ambient_dim = j.at("n").get<Index>();
    cfg.clutter_dim = j.at("d1").get<Index>();
    cfg.target_dim = j.at("d2").get<Index>();
    const auto& snr = j.at("snr_db");
    cfg.snr_db = snr.is_null() ? kNoiseless : snr.get<double>();
    cfg.seed = j.value("seed", std::uint64_t{0});
    const std::string hyp = j.value("hypothesis", std::string("present"));
    if (hyp != "present" && hyp != "absent") {
      throw InputError("scenario: hypothesis must be \"present\" or \"absent\", got \"" + hyp + "\"");
    }
    cfg.target_present = hyp == "present";
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("scenario: ") + e.what());
  }
}

}  // namespace vcd
