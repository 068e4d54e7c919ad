#pragma once

// Deterministic synthetic evaluation runs: known-class features sit near
// fixed unit class directions with large norms, unknown features point in
// uniform random directions with smaller norms. Logits are raw dot products
// with the class directions (no bias), so the max-logit / max-softmax /
// feature-norm scoring rules are all exercised by construction.

#include <cstdint>
#include <vector>

#include "osr/error.hpp"
#include "osr/runio.hpp"

namespace osr {

struct SynthConfig {
  int num_classes = 6;        // C >= 2
  int feature_dim = 128;      // D >= 2
  int samples_per_class = 100;  // known samples per class, n >= 1
  int unknown_samples = 400;    // m >= 1
  double known_norm_mean = 4.5;    // mu_k > 0
  double unknown_norm_mean = 3.0;  // mu_u > 0
  double angular_noise = 0.5;      // sigma >= 0, direction perturbation scale
  double norm_noise = 0.5;         // tau >= 0, radial noise scale
  std::uint64_t seed = 0;

  void validate() const;  // throws DataError on violation
};

struct SynthResult {
  EvaluationRun run;
  // Number of samples whose norm mu + tau*nu fell below the 1e-6 floor and
  // was clamped there.
  int clamped_norms = 0;
};

// Generates a run deterministically from the config. Class directions are
// fixed first (evenly spaced angles for D == 2, orthonormalized PRNG draws
// for D >= C, normalized PRNG draws otherwise); every sample then derives
// from its own PRNG substream keyed by sample index, so the output is
// byte-identical for a given config regardless of platform or threading.
//
// Sample i of known class k: feature = r * normalize(dir_k + sigma * g),
// r = max(mu_k + tau * nu, 1e-6), with g a D-vector of standard Gaussians
// and nu a standard Gaussian. Unknown sample j: feature = r * normalize(g),
// r = max(mu_u + tau * nu, 1e-6). logits_j = feature . dir_j.
SynthResult generate_run(const SynthConfig& cfg);

// The C unit class directions used by generate_run for this config.
std::vector<std::vector<double>> class_directions(const SynthConfig& cfg);

}  // namespace osr
