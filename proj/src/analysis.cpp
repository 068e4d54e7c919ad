#include "osr/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "osr/text.hpp"

namespace osr {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw DataError(msg); }

constexpr std::string_view kHeader = "run_id,method,dataset,accuracy,auroc,oscr,ap";

double checked_metric(const std::string& ctx, std::size_t row, std::size_t col,
                      std::string_view token) {
  double v = 0.0;
  switch (parse_double_status(token, v)) {
    case NumParse::ok:
      break;
    case NumParse::nonfinite:
      fail(ctx + ": non-finite value at row " + std::to_string(row) + ", column " +
           std::to_string(col));
    case NumParse::malformed:
      fail(ctx + ": malformed number '" + std::string(token) + "' at row " +
           std::to_string(row) + ", column " + std::to_string(col));
  }
  if (v < 0.0 || v > 1.0) {
    fail(ctx + ": row " + std::to_string(row) + ", column " + std::to_string(col) +
         ": metric " + format_double(v) + " outside [0,1]");
  }
  return v;
}

// Mean and population standard deviation with values summed in ascending
// order, so results do not depend on input permutation.
void sorted_mean_std(std::vector<double>& values, double& mean, double& std_out) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) {
    const double d = v - mean;
    sq += d * d;
  }
  std_out = std::sqrt(sq / static_cast<double>(values.size()));
}

std::optional<double> group_rho(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 2) return std::nullopt;
  try {
    return pearson(x, y);
  } catch (const DataError&) {
    return std::nullopt;  // constant series within the group
  }
}

// Right-pads to the column width with spaces.
void append_cell(std::string& out, std::string_view text, std::size_t width, bool last) {
  out += text;
  if (!last) out.append(width - text.size() + 2, ' ');
}

}  // namespace

std::vector<RunSummary> parse_run_summaries(std::istream& in) {
  const std::string ctx = "summary file";
  auto lines = read_lines(in);
  if (lines.empty()) fail(ctx + ": empty input (missing header)");
  if (lines[0] != kHeader) {
    fail(ctx + ": malformed header (expected '" + std::string(kHeader) + "')");
  }
  std::vector<RunSummary> out;
  std::unordered_set<std::string_view> ids;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::size_t row = li;  // 1-based data row
    if (lines[li].empty()) fail(ctx + ": empty line at row " + std::to_string(row));
    auto fields = split_fields(lines[li]);
    if (fields.size() != 7) {
      fail(ctx + ": row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
           " fields, expected 7");
    }
    RunSummary s;
    s.run_id = fields[0];
    s.method = fields[1];
    s.dataset = fields[2];
    if (s.run_id.empty()) fail(ctx + ": empty run_id at row " + std::to_string(row));
    if (s.method.empty()) fail(ctx + ": empty method at row " + std::to_string(row));
    if (s.dataset.empty()) fail(ctx + ": empty dataset at row " + std::to_string(row));
    s.accuracy = checked_metric(ctx, row, 4, fields[3]);
    s.auroc = checked_metric(ctx, row, 5, fields[4]);
    s.oscr = checked_metric(ctx, row, 6, fields[5]);
    s.ap = checked_metric(ctx, row, 7, fields[6]);
    out.push_back(std::move(s));
  }
  if (out.empty()) fail(ctx + ": no data rows");
  for (const RunSummary& s : out) {
    if (!ids.insert(s.run_id).second) fail(ctx + ": duplicate run_id '" + s.run_id + "'");
  }
  return out;
}

std::vector<RunSummary> parse_run_summaries_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_run_summaries(in);
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    fail("correlation requires equal-length series (got " + std::to_string(x.size()) +
         " and " + std::to_string(y.size()) + ")");
  }
  if (x.size() < 2) fail("correlation requires at least 2 points");
  const double n = static_cast<double>(x.size());
  double sx = 0.0;
  double sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) fail("correlation undefined for constant series");
  // Single square root of the product: when y == +/-x the quotient reduces to
  // +/-sxx / sqrt(sxx * sxx), which rounds to exactly +/-1.
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

std::vector<AggregateRow> aggregate(const std::vector<RunSummary>& summaries,
                                    std::string_view group_by) {
  if (summaries.empty()) fail("aggregate requires at least one summary");
  const bool by_method = group_by == "method";
  if (!by_method && group_by != "dataset") {
    fail("unknown group_by field '" + std::string(group_by) + "' (expected 'method' or 'dataset')");
  }
  struct Columns {
    std::vector<double> accuracy, auroc, oscr, ap;
  };
  std::map<std::string, Columns> groups;  // lexicographic group order
  for (const RunSummary& s : summaries) {
    Columns& c = groups[by_method ? s.method : s.dataset];
    c.accuracy.push_back(s.accuracy);
    c.auroc.push_back(s.auroc);
    c.oscr.push_back(s.oscr);
    c.ap.push_back(s.ap);
  }
  std::vector<AggregateRow> rows;
  rows.reserve(groups.size());
  for (auto& [name, cols] : groups) {
    AggregateRow row;
    row.group = name;
    row.count = cols.accuracy.size();
    sorted_mean_std(cols.accuracy, row.accuracy_mean, row.accuracy_std);
    sorted_mean_std(cols.auroc, row.auroc_mean, row.auroc_std);
    sorted_mean_std(cols.oscr, row.oscr_mean, row.oscr_std);
    sorted_mean_std(cols.ap, row.ap_mean, row.ap_std);
    rows.push_back(std::move(row));
  }
  return rows;
}

CorrelationReport correlation_report(const std::vector<RunSummary>& summaries) {
  if (summaries.size() < 2) fail("correlation requires at least 2 points");
  CorrelationReport report;
  report.count = summaries.size();

  std::vector<double> acc;
  std::vector<double> auc;
  acc.reserve(summaries.size());
  auc.reserve(summaries.size());
  for (const RunSummary& s : summaries) {
    acc.push_back(s.accuracy);
    auc.push_back(s.auroc);
  }
  report.overall = pearson(acc, auc);

  struct Pair {
    std::vector<double> acc, auc;
  };
  std::map<std::string, Pair> groups;
  for (const RunSummary& s : summaries) {
    Pair& p = groups[s.method];
    p.acc.push_back(s.accuracy);
    p.auc.push_back(s.auroc);
  }
  for (const auto& [method, p] : groups) {
    CorrelationGroup g;
    g.method = method;
    g.count = p.acc.size();
    g.rho = group_rho(p.acc, p.auc);
    report.per_method.push_back(std::move(g));
  }
  return report;
}

std::string correlation_report_json(const CorrelationReport& report) {
  nlohmann::ordered_json j;
  j["count"] = report.count;
  j["overall"] = report.overall;
  auto methods = nlohmann::ordered_json::array();
  for (const CorrelationGroup& g : report.per_method) {
    nlohmann::ordered_json m;
    m["method"] = g.method;
    m["count"] = g.count;
    if (g.rho) {
      m["rho"] = *g.rho;
    } else {
      m["rho"] = nullptr;
    }
    methods.push_back(std::move(m));
  }
  j["per_method"] = std::move(methods);
  return j.dump(2) + "\n";
}

std::string correlation_report_table(const CorrelationReport& report) {
  std::vector<std::array<std::string, 3>> rows;
  rows.push_back({"group", "runs", "rho(accuracy,auroc)"});
  rows.push_back({"(overall)", std::to_string(report.count), format_double(report.overall)});
  for (const CorrelationGroup& g : report.per_method) {
    rows.push_back({g.method, std::to_string(g.count),
                    g.rho ? format_double(*g.rho) : std::string("n/a")});
  }
  std::array<std::size_t, 3> width = {0, 0, 0};
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < 3; ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::string out;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < 3; ++c) append_cell(out, row[c], width[c], c == 2);
    out += '\n';
  }
  return out;
}

std::string aggregate_table(const std::vector<AggregateRow>& rows, std::string_view group_by) {
  std::vector<std::array<std::string, 10>> table;
  table.push_back({std::string(group_by), "runs", "accuracy", "+/-", "auroc", "+/-", "oscr",
                   "+/-", "ap", "+/-"});
  for (const AggregateRow& r : rows) {
    table.push_back({r.group, std::to_string(r.count), format_double(r.accuracy_mean),
                     format_double(r.accuracy_std), format_double(r.auroc_mean),
                     format_double(r.auroc_std), format_double(r.oscr_mean),
                     format_double(r.oscr_std), format_double(r.ap_mean),
                     format_double(r.ap_std)});
  }
  std::array<std::size_t, 10> width{};
  for (const auto& row : table) {
    for (std::size_t c = 0; c < 10; ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::string out;
  for (const auto& row : table) {
    for (std::size_t c = 0; c < 10; ++c) append_cell(out, row[c], width[c], c == 9);
    out += '\n';
  }
  return out;
}

}  // namespace osr
