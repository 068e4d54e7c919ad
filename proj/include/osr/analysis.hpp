#pragma once

// Cross-run analysis: Pearson correlation between closed-set accuracy and
// open-set AUROC, plus per-group aggregation of run summaries.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "osr/error.hpp"

namespace osr {

// One evaluated run, as exchanged through the summary CSV
// (header: run_id,method,dataset,accuracy,auroc,oscr,ap).
struct RunSummary {
  std::string run_id;   // unique within a collection
  std::string method;
  std::string dataset;
  double accuracy = 0.0;
  double auroc = 0.0;
  double oscr = 0.0;
  double ap = 0.0;
};

// Parses a summary CSV. Enforces the exact header, unique nonempty run ids,
// nonempty method/dataset fields, and finite metric values in [0,1].
std::vector<RunSummary> parse_run_summaries(std::istream& in);
std::vector<RunSummary> parse_run_summaries_text(std::string_view text);

// Pearson product-moment correlation coefficient, clamped to [-1, 1].
// Exactly +1.0 when y == x elementwise and exactly -1.0 when y == -x.
// Throws DataError for mismatched lengths, fewer than 2 points, or a
// constant series ("correlation undefined for constant series").
double pearson(std::span<const double> x, std::span<const double> y);

// Per-group mean and population (divide-by-n) standard deviation of each
// metric. Values are summed in ascending order within each group, so the
// result is exactly invariant under permutation of the input list.
struct AggregateRow {
  std::string group;
  std::size_t count = 0;
  double accuracy_mean = 0.0, accuracy_std = 0.0;
  double auroc_mean = 0.0, auroc_std = 0.0;
  double oscr_mean = 0.0, oscr_std = 0.0;
  double ap_mean = 0.0, ap_std = 0.0;
};

// group_by selects the grouping field: "method" or "dataset".
// Rows come back sorted lexicographically by group name.
std::vector<AggregateRow> aggregate(const std::vector<RunSummary>& summaries,
                                    std::string_view group_by);

// rho(accuracy, auroc) over all runs plus per-method breakdown.
// Groups with fewer than 2 runs, or with a constant accuracy or AUROC
// series, carry no coefficient (rendered "n/a" / null).
struct CorrelationGroup {
  std::string method;
  std::size_t count = 0;
  std::optional<double> rho;
};

struct CorrelationReport {
  std::size_t count = 0;   // total number of runs
  double overall = 0.0;    // rho over all runs
  std::vector<CorrelationGroup> per_method;  // sorted by method name
};

CorrelationReport correlation_report(const std::vector<RunSummary>& summaries);

// JSON rendering (2-space indent, trailing newline):
// {"count": N, "overall": rho, "per_method": [{"method","count","rho"}...]}.
std::string correlation_report_json(const CorrelationReport& report);

// Aligned plain-text table with an "(overall)" first row; absent
// coefficients render as "n/a".
std::string correlation_report_table(const CorrelationReport& report);

// Aligned plain-text table for aggregate rows (group, count, then
// mean/std pairs for each metric).
std::string aggregate_table(const std::vector<AggregateRow>& rows,
                            std::string_view group_by);

}  // namespace osr
