#include "osr/scoring.hpp"

#include <algorithm>
#include <cmath>

namespace osr {

std::string_view to_string(ScoreRule rule) {
  switch (rule) {
    case ScoreRule::msp:
      return "msp";
    case ScoreRule::mls:
      return "mls";
    case ScoreRule::feature_norm:
      return "feature_norm";
  }
  return "msp";
}

ScoreRule score_rule_from_string(std::string_view name) {
  if (name == "msp") return ScoreRule::msp;
  if (name == "mls") return ScoreRule::mls;
  if (name == "norm" || name == "feature_norm") return ScoreRule::feature_norm;
  throw DataError("unknown score rule '" + std::string(name) + "' (expected msp, mls or norm)");
}

namespace {

int argmax_lowest(std::span<const double> v) {
  int best = 0;
  for (int j = 1; j < static_cast<int>(v.size()); ++j) {
    if (v[static_cast<std::size_t>(j)] > v[static_cast<std::size_t>(best)]) best = j;
  }
  return best;
}

std::vector<int> all_predictions(const EvaluationRun& run) {
  std::vector<int> out;
  out.reserve(run.samples.size());
  for (const Sample& s : run.samples) out.push_back(argmax_lowest(s.logits));
  return out;
}

}  // namespace

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out(logits.size());
  const double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t j = 0; j < logits.size(); ++j) {
    out[j] = std::exp(logits[j] - m);
    sum += out[j];
  }
  for (double& p : out) p /= sum;
  return out;
}

ScoreVector msp_scores(const EvaluationRun& run) {
  ScoreVector sv;
  sv.rule = ScoreRule::msp;
  sv.predictions = all_predictions(run);
  sv.scores.reserve(run.samples.size());
  for (const Sample& s : run.samples) {
    // max softmax = exp(0) / sum exp(logit - max) = 1 / sum: one division,
    // and monotonicity of rounding keeps the score >= fl(1/C).
    const double m = s.logits[static_cast<std::size_t>(argmax_lowest(s.logits))];
    double sum = 0.0;
    for (double v : s.logits) sum += std::exp(v - m);
    sv.scores.push_back(1.0 / sum);
  }
  return sv;
}

ScoreVector mls_scores(const EvaluationRun& run) {
  ScoreVector sv;
  sv.rule = ScoreRule::mls;
  sv.predictions = all_predictions(run);
  sv.scores.reserve(run.samples.size());
  for (const Sample& s : run.samples) {
    sv.scores.push_back(*std::max_element(s.logits.begin(), s.logits.end()));
  }
  return sv;
}

ScoreVector feature_norm_scores(const EvaluationRun& run) {
  if (!run.has_features()) {
    throw DataError("feature-norm rule requires feature vectors");
  }
  ScoreVector sv;
  sv.rule = ScoreRule::feature_norm;
  sv.predictions = all_predictions(run);
  sv.scores.reserve(run.samples.size());
  for (const Sample& s : run.samples) {
    double sq = 0.0;
    for (double v : s.features) sq += v * v;
    sv.scores.push_back(std::sqrt(sq));
  }
  return sv;
}

std::vector<int> predictions(const EvaluationRun& run) { return all_predictions(run); }

}  // namespace osr
