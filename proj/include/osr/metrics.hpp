#pragma once

// Evaluation metrics over scored runs.
//
// Conventions (fixed): AUROC treats known samples as the positive class
// (scores measure "knownness"); average precision treats unknown samples as
// the positive class and retrieves by ascending score. Ties are handled
// exactly everywhere (average ranks / tie-aware precision), so no result
// depends on sort stability or input order.

#include <span>
#include <vector>

#include "osr/runio.hpp"
#include "osr/scoring.hpp"

namespace osr {

struct CurvePoints {
  enum class Kind { roc, oscr };
  Kind kind = Kind::roc;
  Points points;  // sorted nondecreasing in x; includes x=0 and x=1

  friend bool operator==(const CurvePoints&, const CurvePoints&) = default;
};

// Fraction of known-label samples whose prediction equals the label; unknown
// samples are excluded. Throws DataError when the run has no known samples.
double accuracy(const EvaluationRun& run, std::span<const int> predictions);

// Mann-Whitney AUROC with average-rank tie handling: probability that a
// random known sample outscores a random unknown one, ties counting 1/2.
// The numerator is accumulated as an exact integer, and the final division
// is arranged so that auroc(a,b) + auroc(b,a) == 1.0 holds bit-exactly.
double auroc(std::span<const double> known_scores, std::span<const double> unknown_scores);

// (FPR, TPR) staircase at every distinct score threshold, descending from
// +inf; starts at (0,0), ends at (1,1). Trapezoidal area equals auroc()
// within 1e-10.
CurvePoints roc_curve(std::span<const double> known_scores,
                      std::span<const double> unknown_scores);

struct OscrResult {
  double area = 0.0;
  CurvePoints curve;
};

// Open-set classification rate: sweeps a threshold over all distinct scores
// (plus +inf); CCR = fraction of knowns predicted correctly with score >=
// threshold, FPR = fraction of unknowns with score >= threshold. Returns the
// trapezoidal area under CCR-vs-FPR and the curve (one point per distinct
// FPR, carrying the best CCR reached there). Requires at least one known and
// one unknown sample.
OscrResult oscr(const EvaluationRun& run, const ScoreVector& sv);

// Non-interpolated average precision of retrieving unknowns by ascending
// score; tied blocks use the closed-form average over all orderings.
double average_precision(std::span<const double> known_scores,
                         std::span<const double> unknown_scores);

// 1 - sqrt(2K / (2K + U)) for K known and U unknown classes; 0 when U = 0.
double openness(int num_known_classes, int num_unknown_classes);

// Area under a piecewise-linear curve by the trapezoid rule.
double trapezoid_area(const Points& points);

// Splits run-aligned scores into known-sample and unknown-sample vectors.
void split_scores(const EvaluationRun& run, std::span<const double> scores,
                  std::vector<double>& known, std::vector<double>& unknown);

}  // namespace osr
