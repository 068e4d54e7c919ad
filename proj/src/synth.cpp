#include "osr/synth.hpp"

#include <cmath>
#include <string>

#include "osr/rng.hpp"

namespace osr {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw DataError(msg); }

constexpr std::uint64_t kTagDirections = 0x64697265637473ull;
constexpr std::uint64_t kTagSample = 0x73616d706c6573ull;
constexpr double kNormFloor = 1e-6;

double norm2(const std::vector<double>& v) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  return std::sqrt(sq);
}

void scale(std::vector<double>& v, double s) {
  for (double& x : v) x *= s;
}

std::vector<double> draw_gaussians(SplitMix64& rng, int dim) {
  std::vector<double> v(static_cast<std::size_t>(dim));
  for (double& x : v) x = rng.gaussian();
  return v;
}

}  // namespace

void SynthConfig::validate() const {
  if (num_classes < 2) fail("num_classes must be >= 2");
  if (feature_dim < 2) fail("feature_dim must be >= 2");
  if (samples_per_class < 1) fail("samples_per_class must be >= 1");
  if (unknown_samples < 1) fail("unknown_samples must be >= 1");
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      fail(std::string(name) + " must be positive and finite");
    }
  };
  positive(known_norm_mean, "known_norm_mean");
  positive(unknown_norm_mean, "unknown_norm_mean");
  auto nonneg = [](double v, const char* name) {
    if (v < 0.0 || !std::isfinite(v)) {
      fail(std::string(name) + " must be nonnegative and finite");
    }
  };
  nonneg(angular_noise, "angular_noise");
  nonneg(norm_noise, "norm_noise");
}

std::vector<std::vector<double>> class_directions(const SynthConfig& cfg) {
  cfg.validate();
  const int c = cfg.num_classes;
  const int d = cfg.feature_dim;
  std::vector<std::vector<double>> dirs;
  dirs.reserve(static_cast<std::size_t>(c));

  if (d == 2) {
    // Evenly spaced angles around the unit circle.
    const double step = 2.0 * 3.141592653589793238462643383279502884 / c;
    for (int k = 0; k < c; ++k) {
      const double a = step * k;
      dirs.push_back({std::cos(a), std::sin(a)});
    }
    return dirs;
  }

  SplitMix64 rng = substream(cfg.seed, kTagDirections, 0);
  const bool orthonormalize = d >= c;
  for (int k = 0; k < c; ++k) {
    std::vector<double> v;
    for (;;) {
      v = draw_gaussians(rng, d);
      if (orthonormalize) {
        // Modified Gram-Schmidt against the accepted directions.
        for (const auto& u : dirs) {
          double dot = 0.0;
          for (int i = 0; i < d; ++i) dot += v[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(i)];
          for (int i = 0; i < d; ++i) v[static_cast<std::size_t>(i)] -= dot * u[static_cast<std::size_t>(i)];
        }
      }
      const double n = norm2(v);
      if (n > 1e-8) {  // redraw deterministically on a degenerate residual
        scale(v, 1.0 / n);
        break;
      }
    }
    dirs.push_back(std::move(v));
  }
  return dirs;
}

SynthResult generate_run(const SynthConfig& cfg) {
  cfg.validate();
  const int c = cfg.num_classes;
  const int d = cfg.feature_dim;
  const auto dirs = class_directions(cfg);

  SynthResult result;
  result.run.num_classes = c;
  result.run.feature_dim = d;
  result.run.samples.reserve(static_cast<std::size_t>(c) * cfg.samples_per_class +
                             static_cast<std::size_t>(cfg.unknown_samples));

  auto finish_sample = [&](Sample& s, std::vector<double> direction, double mean,
                           SplitMix64& rng) {
    const double nu = rng.gaussian();
    double r = mean + cfg.norm_noise * nu;
    if (r < kNormFloor) {
      r = kNormFloor;
      ++result.clamped_norms;
    }
    scale(direction, r);
    s.logits.reserve(static_cast<std::size_t>(c));
    for (int j = 0; j < c; ++j) {
      double dot = 0.0;
      for (int i = 0; i < d; ++i) {
        dot += direction[static_cast<std::size_t>(i)] * dirs[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
      }
      s.logits.push_back(dot);
    }
    s.features = std::move(direction);
  };

  // Known samples: class-major order, each from its own substream.
  for (int k = 0; k < c; ++k) {
    for (int i = 0; i < cfg.samples_per_class; ++i) {
      const std::uint64_t index =
          static_cast<std::uint64_t>(k) * static_cast<std::uint64_t>(cfg.samples_per_class) +
          static_cast<std::uint64_t>(i);
      SplitMix64 rng = substream(cfg.seed, kTagSample, index);
      std::vector<double> g = draw_gaussians(rng, d);
      std::vector<double> w(static_cast<std::size_t>(d));
      for (int t = 0; t < d; ++t) {
        w[static_cast<std::size_t>(t)] = dirs[static_cast<std::size_t>(k)][static_cast<std::size_t>(t)] +
                                         cfg.angular_noise * g[static_cast<std::size_t>(t)];
      }
      const double n = norm2(w);
      // A perturbed direction can only vanish on a measure-zero draw; guard
      // by falling back to the clean class direction.
      if (n > 1e-12) {
        scale(w, 1.0 / n);
      } else {
        w = dirs[static_cast<std::size_t>(k)];
      }
      Sample s;
      s.id = "k" + std::to_string(k) + "_" + std::to_string(i);
      s.label = k;
      finish_sample(s, std::move(w), cfg.known_norm_mean, rng);
      result.run.samples.push_back(std::move(s));
    }
  }

  // Unknown samples: uniform random unit directions via normalized Gaussians.
  const std::uint64_t unknown_base =
      static_cast<std::uint64_t>(c) * static_cast<std::uint64_t>(cfg.samples_per_class);
  for (int j = 0; j < cfg.unknown_samples; ++j) {
    SplitMix64 rng = substream(cfg.seed, kTagSample, unknown_base + static_cast<std::uint64_t>(j));
    std::vector<double> w;
    for (;;) {
      w = draw_gaussians(rng, d);
      const double n = norm2(w);
      if (n > 1e-12) {
        scale(w, 1.0 / n);
        break;
      }
    }
    Sample s;
    s.id = "u_" + std::to_string(j);
    s.label = kUnknownLabel;
    finish_sample(s, std::move(w), cfg.unknown_norm_mean, rng);
    result.run.samples.push_back(std::move(s));
  }

  result.run.validate();
  return result;
}

}  // namespace osr
