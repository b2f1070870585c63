#include "vcd/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "parallel.hpp"
#include "vcd/error.hpp"
#include "vcd/random.hpp"

namespace vcd {

namespace {

struct CheckedInputs {
  std::vector<double> signal;  // the k eigenvalues above the noise level
  double s2;
  double n;
};

CheckedInputs check(const BoundInputs& in) {
  if (in.eigenvalues.empty()) throw InputError("bound: eigenvalue list is empty");
  if (!(in.noise_variance > 0.0) || !std::isfinite(in.noise_variance)) {
    throw InputError("bound: noise variance must be positive and finite");
  }
  if (in.ambient_dim < 1) throw InputError("bound: n must be positive");
  if (!(in.delta > 0.0) || !std::isfinite(in.delta)) throw InputError("bound: delta must be > 0");
  if (!(in.epsilon > 0.0 && in.epsilon < 1.0)) throw InputError("bound: eps must lie in (0, 1)");
  if (in.eigenvalues.size() > in.ambient_dim) {
    throw InputError("bound: more eigenvalues than the ambient dimension");
  }

  CheckedInputs out{{}, in.noise_variance, static_cast<double>(in.ambient_dim)};
  for (std::size_t j = 0; j < in.eigenvalues.size(); ++j) {
    const double l = in.eigenvalues[j];
    if (!std::isfinite(l)) throw InputError("bound: non-finite eigenvalue");
    if (j > 0 && l > in.eigenvalues[j - 1]) {
      throw InputError("bound: eigenvalues must be listed in descending order");
    }
    if (l > in.noise_variance) {
      out.signal.push_back(l);
    } else if (l < in.noise_variance) {
      throw InputError("bound: eigenvalue " + std::to_string(l) +
                       " lies below the noise variance");
    }
  }
  if (out.signal.empty()) throw InputError("bound: no eigenvalue exceeds the noise variance");
  if (in.signal_rank != 0 && in.signal_rank != out.signal.size()) {
    throw InputError("bound: " + std::to_string(out.signal.size()) +
                     " eigenvalues exceed the noise variance but k = " +
                     std::to_string(in.signal_rank));
  }
  for (std::size_t i = 1; i < out.signal.size(); ++i) {
    if (out.signal[i] == out.signal[i - 1]) {
      throw SingularInputError("bound: repeated signal eigenvalue " +
                               std::to_string(out.signal[i]) + "; the bound is undefined");
    }
  }
  return out;
}

std::uint64_t to_sample_count(double m) {
  if (std::isnan(m)) throw SingularInputError("bound: sample requirement is undefined");
  const double c = std::max(1.0, std::ceil(m));
  if (c >= 18446744073709551615.0) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(c);
}

double sample_multiplier(const BoundInputs& in) {
  // sqrt(delta + 1) - 1 written without cancellation.
  const double root_gap = in.delta / (std::sqrt(in.delta + 1.0) + 1.0);
  return (1.0 + in.epsilon) / (root_gap * root_gap);
}

double spectral_sum(const CheckedInputs& c) {
  const std::size_t k = c.signal.size();
  double pair_sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      const double d = c.signal[i] - c.signal[j];
      pair_sum += c.signal[i] * c.signal[j] / (d * d);
    }
  }
  double noise_sum = 0.0;
  for (double l : c.signal) {
    const double d = c.s2 - l;
    noise_sum += l * c.s2 / (d * d);
  }
  return pair_sum + (c.n - static_cast<double>(k)) * noise_sum;
}

BoundReport common_report(const BoundInputs& in, const CheckedInputs& c) {
  BoundReport r;
  r.m_required = to_sample_count(sample_multiplier(in) * spectral_sum(c));
  r.exponent_argument = static_cast<double>(c.signal.size()) * c.n * in.epsilon * in.epsilon;
  return r;
}

}  // namespace

double bound_spectral_sum(const BoundInputs& in) { return spectral_sum(check(in)); }

BoundReport sample_bound_target_present(const BoundInputs& in) {
  const CheckedInputs c = check(in);
  BoundReport r = common_report(in, c);
  if (in.target_dim) {
    if (*in.target_dim < 1 || *in.target_dim > c.signal.size()) {
      throw InputError("bound: d2 must lie in [1, k]");
    }
    r.deviation_bound = std::pow(in.delta, static_cast<double>(*in.target_dim));
  }
  return r;
}

BoundReport sample_bound_target_absent(const BoundInputs& in) {
  const CheckedInputs c = check(in);
  return common_report(in, c);
}

BoundReport sample_bound_target_absent(const BoundInputs& in, const SubspaceBasis& target,
                                       const SubspaceBasis& clutter) {
  const CheckedInputs c = check(in);
  if (target.ambient_dim() != clutter.ambient_dim()) {
    throw InputError("bound: target and clutter bases live in different spaces");
  }
  if (static_cast<std::size_t>(clutter.dim()) != c.signal.size()) {
    throw InputError("bound: clutter dimension does not match the signal rank");
  }
  BoundReport r = common_report(in, c);
  const Matrix& qc = clutter.matrix();
  const Matrix cross = target.matrix().transpose() * qc;
  const Matrix reduced = qc.transpose() * qc - cross.transpose() * cross;
  const Vector sv = singular_values(reduced);
  const std::vector<double> values(sv.data(), sv.data() + sv.size());
  r.deviation_bound = elementary_symmetric(values, values.size() - 1) * in.delta;
  return r;
}

double tau(const SubspaceBasis& target, const SubspaceBasis& clutter) {
  const double t = volume_correlation(target, clutter);
  if (!(t >= 1e-12)) {
    throw DegenerateGeometryError("tau: target and clutter subspaces (nearly) intersect");
  }
  return t;
}

void to_json(nlohmann::json& j, const BoundReport& r) {
  j = nlohmann::json{{"m_required", r.m_required},
                     {"exponent_argument", r.exponent_argument},
                     {"order", "leading"}};
  if (r.deviation_bound) {
    j["deviation_bound"] = *r.deviation_bound;
  } else {
    j["deviation_bound"] = nullptr;
  }
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw InputError("quantile: empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * std::clamp(p, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

Quantiles summarize_values(const std::vector<double>& values) {
  Quantiles q;
  q.count = values.size();
  if (values.empty()) return q;
  q.q10 = quantile(values, 0.1);
  q.median = quantile(values, 0.5);
  q.q90 = quantile(values, 0.9);
  return q;
}

ConvergenceSummary validate_convergence(const Scenario& sc, const DetectorConfig& cfg,
                                        const ConvergenceOptions& opts) {
  if (opts.trials < 1) throw InputError("validate_convergence: trials must be >= 1");
  if (opts.samples < 1) throw InputError("validate_convergence: samples must be >= 1");

  DetectorConfig run_cfg = cfg;
  run_cfg.decisions_enabled = false;
  run_cfg.max_samples = opts.samples;

  ConvergenceSummary out;
  out.tau = tau(sc.target_basis, sc.clutter_basis);

  // slot 2t = present, 2t+1 = absent
  std::vector<std::vector<TrajectoryPoint>> runs(2 * opts.trials);
  detail::parallel_for(runs.size(), opts.parallelism, [&](std::size_t slot) {
    const bool present = slot % 2 == 0;
    const Scenario hyp = sc.with_hypothesis(present);
    RandomStream rng(derive_seed(opts.seed, slot / 2, present ? 0 : 1));
    std::size_t idx = 0;
    runs[slot] = run_stream(run_cfg, [&]() -> std::optional<Vector> {
                   return draw_sample(hyp, ++idx, rng).y;
                 }).trajectory;
  });

  std::size_t longest = 0;
  for (const auto& r : runs) longest = std::max(longest, r.size());
  out.present.resize(longest);
  out.absent.resize(longest);
  for (std::size_t m = 0; m < longest; ++m) {
    std::vector<double> p;
    std::vector<double> a;
    for (std::size_t slot = 0; slot < runs.size(); ++slot) {
      if (m < runs[slot].size()) (slot % 2 == 0 ? p : a).push_back(runs[slot][m].inv_t);
    }
    out.present[m] = summarize_values(p);
    out.absent[m] = summarize_values(a);
  }

  auto absent_gap = [&](bool first) {
    std::vector<double> gaps;
    for (std::size_t slot = 1; slot < runs.size(); slot += 2) {
      if (runs[slot].empty()) continue;
      const double v = first ? runs[slot].front().inv_t : runs[slot].back().inv_t;
      gaps.push_back(std::abs(v - 1.0 / out.tau));
    }
    return gaps.empty() ? 0.0 : quantile(gaps, 0.5);
  };
  out.absent_gap_first = absent_gap(true);
  out.absent_gap_last = absent_gap(false);
  out.absent_converging = out.absent_gap_last <= out.absent_gap_first;

  std::vector<double> present_final;
  std::vector<double> absent_final;
  for (std::size_t slot = 0; slot < runs.size(); ++slot) {
    if (runs[slot].empty()) continue;
    (slot % 2 == 0 ? present_final : absent_final).push_back(runs[slot].back().inv_t);
  }
  const double pm = quantile(present_final, 0.5);
  const double am = quantile(absent_final, 0.5);
  out.present_ratio = pm / am;
  out.present_diverging = out.present_ratio >= opts.divergence_factor;
  return out;
}

}  // namespace vcd
