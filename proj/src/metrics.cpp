#include "osr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace osr {

double accuracy(const EvaluationRun& run, std::span<const int> predictions) {
  if (predictions.size() != run.samples.size()) {
    throw DataError("accuracy: predictions length does not match the run");
  }
  std::size_t known = 0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < run.samples.size(); ++i) {
    if (run.samples[i].label == kUnknownLabel) continue;
    ++known;
    if (predictions[i] == run.samples[i].label) ++correct;
  }
  if (known == 0) throw DataError("accuracy undefined without known samples");
  return static_cast<double>(correct) / static_cast<double>(known);
}

double auroc(std::span<const double> known_scores, std::span<const double> unknown_scores) {
  if (known_scores.empty() || unknown_scores.empty()) {
    throw DataError("AUROC undefined: needs at least one known and one unknown score");
  }
  const std::size_t n = known_scores.size();
  const std::size_t m = unknown_scores.size();

  std::vector<std::pair<double, bool>> pool;  // (score, is_known)
  pool.reserve(n + m);
  for (double s : known_scores) pool.emplace_back(s, true);
  for (double s : unknown_scores) pool.emplace_back(s, false);
  std::sort(pool.begin(), pool.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  // Twice the rank sum of the positive (known) class, kept integral: a tied
  // block occupying 1-based ranks lo..hi contributes (lo + hi) per positive.
  std::uint64_t two_r = 0;
  std::size_t i = 0;
  const std::size_t total = pool.size();
  while (i < total) {
    std::size_t k = i;
    std::uint64_t positives = 0;
    while (k < total && pool[k].first == pool[i].first) {
      positives += pool[k].second ? 1u : 0u;
      ++k;
    }
    two_r += static_cast<std::uint64_t>(i + k + 1) * positives;  // lo + hi = i+1 + k
    i = k;
  }

  // 2U = 2R - n(n+1) with U in [0, nm]; the swap-symmetric division below
  // makes auroc(a,b) + auroc(b,a) == 1.0 exact (fl(x + fl(1-x)) == 1 for
  // x <= 1/2 in round-to-nearest).
  const std::uint64_t two_u = two_r - static_cast<std::uint64_t>(n) * (n + 1);
  const std::uint64_t denom = 2 * static_cast<std::uint64_t>(n) * m;
  if (2 * two_u <= denom) {
    return static_cast<double>(two_u) / static_cast<double>(denom);
  }
  return 1.0 - static_cast<double>(denom - two_u) / static_cast<double>(denom);
}

namespace {

// Distinct scores of both sides, descending; the implicit +inf threshold is
// handled by the callers' initial (0, ...) point.
std::vector<double> descending_thresholds(std::span<const double> a, std::span<const double> b) {
  std::vector<double> t(a.begin(), a.end());
  t.insert(t.end(), b.begin(), b.end());
  std::sort(t.begin(), t.end(), std::greater<>());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

}  // namespace

CurvePoints roc_curve(std::span<const double> known_scores,
                      std::span<const double> unknown_scores) {
  if (known_scores.empty() || unknown_scores.empty()) {
    throw DataError("AUROC undefined: needs at least one known and one unknown score");
  }
  std::vector<double> known(known_scores.begin(), known_scores.end());
  std::vector<double> unknown(unknown_scores.begin(), unknown_scores.end());
  std::sort(known.begin(), known.end(), std::greater<>());
  std::sort(unknown.begin(), unknown.end(), std::greater<>());
  const double n = static_cast<double>(known.size());
  const double m = static_cast<double>(unknown.size());

  CurvePoints curve;
  curve.kind = CurvePoints::Kind::roc;
  curve.points.emplace_back(0.0, 0.0);  // threshold +inf
  std::size_t ki = 0;
  std::size_t ui = 0;
  for (double theta : descending_thresholds(known, unknown)) {
    while (ki < known.size() && known[ki] >= theta) ++ki;
    while (ui < unknown.size() && unknown[ui] >= theta) ++ui;
    curve.points.emplace_back(static_cast<double>(ui) / m, static_cast<double>(ki) / n);
  }
  return curve;
}

OscrResult oscr(const EvaluationRun& run, const ScoreVector& sv) {
  if (sv.scores.size() != run.samples.size() || sv.predictions.size() != run.samples.size()) {
    throw DataError("OSCR: score vector does not match the run");
  }
  std::vector<std::pair<double, bool>> known;  // (score, predicted correctly)
  std::vector<double> unknown;
  for (std::size_t i = 0; i < run.samples.size(); ++i) {
    const int label = run.samples[i].label;
    if (label == kUnknownLabel) {
      unknown.push_back(sv.scores[i]);
    } else {
      known.emplace_back(sv.scores[i], sv.predictions[i] == label);
    }
  }
  if (known.empty() || unknown.empty()) {
    throw DataError("OSCR undefined: needs at least one known and one unknown sample");
  }
  std::sort(known.begin(), known.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  std::sort(unknown.begin(), unknown.end(), std::greater<>());
  const double n = static_cast<double>(known.size());
  const double m = static_cast<double>(unknown.size());

  std::vector<double> known_scores(known.size());
  for (std::size_t i = 0; i < known.size(); ++i) known_scores[i] = known[i].first;

  // Raw sweep, threshold descending from +inf; CCR and FPR both nondecrease.
  Points raw;
  raw.emplace_back(0.0, 0.0);
  std::size_t ki = 0;
  std::size_t ui = 0;
  std::size_t correct = 0;
  for (double theta : descending_thresholds(known_scores, unknown)) {
    while (ki < known.size() && known[ki].first >= theta) {
      correct += known[ki].second ? 1u : 0u;
      ++ki;
    }
    while (ui < unknown.size() && unknown[ui] >= theta) ++ui;
    raw.emplace_back(static_cast<double>(ui) / m, static_cast<double>(correct) / n);
  }

  // One point per distinct FPR carrying the best CCR reached there (zero
  // width segments do not contribute area; the x=0 survivor is the CCR at
  // the largest threshold with FPR 0).
  OscrResult result;
  result.curve.kind = CurvePoints::Kind::oscr;
  for (const auto& p : raw) {
    if (!result.curve.points.empty() && result.curve.points.back().first == p.first) {
      result.curve.points.back().second = p.second;
    } else {
      result.curve.points.push_back(p);
    }
  }
  result.area = trapezoid_area(result.curve.points);
  return result;
}

double average_precision(std::span<const double> known_scores,
                         std::span<const double> unknown_scores) {
  if (known_scores.empty() || unknown_scores.empty()) {
    throw DataError("AP undefined: needs at least one known and one unknown score");
  }
  std::vector<std::pair<double, bool>> pool;  // (score, is_unknown = positive)
  pool.reserve(known_scores.size() + unknown_scores.size());
  for (double s : unknown_scores) pool.emplace_back(s, true);
  for (double s : known_scores) pool.emplace_back(s, false);
  std::sort(pool.begin(), pool.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  // Tie-aware AP: within a tied block of g items holding p positives, with A
  // positives and N items already retrieved, the expected precision summed
  // over the block's positives is
  //   sum_{t=1..g} (p/g) * (A + 1 + (t-1)(p-1)/(g-1)) / (N + t),
  // the closed form of averaging over all orderings of the block.
  double sum = 0.0;
  std::size_t retrieved = 0;  // N
  std::size_t positives_before = 0;  // A
  std::size_t i = 0;
  while (i < pool.size()) {
    std::size_t k = i;
    std::size_t p = 0;
    while (k < pool.size() && pool[k].first == pool[i].first) {
      p += pool[k].second ? 1u : 0u;
      ++k;
    }
    const std::size_t g = k - i;
    if (p > 0) {
      if (g == 1) {
        sum += static_cast<double>(positives_before + 1) / static_cast<double>(retrieved + 1);
      } else {
        const double frac = static_cast<double>(p) / static_cast<double>(g);
        const double slope = static_cast<double>(p - 1) / static_cast<double>(g - 1);
        for (std::size_t t = 1; t <= g; ++t) {
          const double expected_hits =
              static_cast<double>(positives_before) + 1.0 + static_cast<double>(t - 1) * slope;
          sum += frac * expected_hits / static_cast<double>(retrieved + t);
        }
      }
    }
    positives_before += p;
    retrieved += g;
    i = k;
  }
  return sum / static_cast<double>(unknown_scores.size());
}

double openness(int num_known_classes, int num_unknown_classes) {
  if (num_known_classes < 1) throw DataError("openness requires at least one known class");
  if (num_unknown_classes < 0) throw DataError("openness requires a nonnegative unknown-class count");
  const double k2 = 2.0 * static_cast<double>(num_known_classes);
  return 1.0 - std::sqrt(k2 / (k2 + static_cast<double>(num_unknown_classes)));
}

double trapezoid_area(const Points& points) {
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    area += (points[i].first - points[i - 1].first) *
            (points[i].second + points[i - 1].second) * 0.5;
  }
  return area;
}

void split_scores(const EvaluationRun& run, std::span<const double> scores,
                  std::vector<double>& known, std::vector<double>& unknown) {
  if (scores.size() != run.samples.size()) {
    throw DataError("split_scores: scores length does not match the run");
  }
  known.clear();
  unknown.clear();
  for (std::size_t i = 0; i < run.samples.size(); ++i) {
    (run.samples[i].label == kUnknownLabel ? unknown : known).push_back(scores[i]);
  }
}

}  // namespace osr
