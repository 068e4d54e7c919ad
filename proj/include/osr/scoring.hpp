#pragma once

// Per-sample open-set scores S(y in C | x) under the three rules — maximum
// softmax probability (msp), maximum logit (mls), Euclidean feature norm —
// plus closed-set argmax predictions. All pure per-sample maps computed in
// double precision (rank statistics downstream are sensitive to
// rounding-induced ties).

#include <span>
#include <string_view>
#include <vector>

#include "osr/runio.hpp"

namespace osr {

enum class ScoreRule { msp, mls, feature_norm };

std::string_view to_string(ScoreRule rule);
// Accepts the CLI spellings: msp, mls, norm (also feature_norm).
ScoreRule score_rule_from_string(std::string_view name);

struct ScoreVector {
  ScoreRule rule = ScoreRule::msp;
  std::vector<double> scores;       // aligned with the run's sample order
  std::vector<int> predictions;     // logits argmax, lowest-index tie-break

  friend bool operator==(const ScoreVector&, const ScoreVector&) = default;
};

// Shift-stable softmax: subtracts the max before exponentiation, then divides
// by the sum. Entries sum to 1 within 1e-12; entries can underflow to exact 0
// only when logit gaps exceed ~745.
std::vector<double> softmax(std::span<const double> logits);

// score = max softmax probability; lies in [1/C, 1], hitting 1/C iff all of
// the sample's logits are equal.
ScoreVector msp_scores(const EvaluationRun& run);

// score = max raw logit; keeps the magnitude information softmax normalizes
// away.
ScoreVector mls_scores(const EvaluationRun& run);

// score = Euclidean norm of the feature vector; predictions still come from
// the logits. Throws DataError when the run carries no features.
ScoreVector feature_norm_scores(const EvaluationRun& run);

// Argmax class index per sample, ties broken by lowest index.
std::vector<int> predictions(const EvaluationRun& run);

}  // namespace osr
