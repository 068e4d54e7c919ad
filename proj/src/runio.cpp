#include "osr/runio.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

#include "osr/text.hpp"

namespace osr {

namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& msg) { throw DataError(msg); }

bool writable_name(std::string_view s) {
  return !s.empty() && s.find_first_of(",\r\n") == std::string_view::npos;
}

void check_writable_name(const std::string& ctx, std::string_view what, std::string_view s) {
  if (!writable_name(s)) {
    fail(ctx + ": " + std::string(what) + " '" + std::string(s) +
         "' must be nonempty and free of commas and line breaks");
  }
}

// Parses one numeric CSV cell; row is the 1-based data row, col the 1-based
// column within the file (id column = 1).
double checked_cell(const std::string& ctx, std::size_t row, std::size_t col,
                    std::string_view token) {
  double v = 0.0;
  switch (parse_double_status(token, v)) {
    case NumParse::ok:
      return v;
    case NumParse::nonfinite:
      fail(ctx + ": non-finite value at row " + std::to_string(row) + ", column " +
           std::to_string(col));
    case NumParse::malformed:
      fail(ctx + ": malformed number '" + std::string(token) + "' at row " +
           std::to_string(row) + ", column " + std::to_string(col));
  }
  fail(ctx + ": unreachable");
}

std::string row_str(std::size_t row) { return std::to_string(row); }

}  // namespace

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

void EvaluationRun::validate() const {
  const std::string ctx = "run";
  if (num_classes < 2) fail(ctx + ": num_classes must be at least 2");
  if (feature_dim < 0) fail(ctx + ": feature_dim must be nonnegative");
  if (samples.empty()) fail(ctx + ": at least one sample required");
  std::unordered_set<std::string_view> ids;
  ids.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Sample& s = samples[i];
    const std::string where = ctx + ": sample " + std::to_string(i + 1);
    check_writable_name(where, "sample_id", s.id);
    if (!ids.insert(s.id).second) fail(where + ": duplicate sample_id '" + s.id + "'");
    if (s.label != kUnknownLabel && (s.label < 0 || s.label >= num_classes)) {
      fail(where + ": label " + std::to_string(s.label) + " out of range (-1 or 0.." +
           std::to_string(num_classes - 1) + ")");
    }
    if (s.logits.size() != static_cast<std::size_t>(num_classes)) {
      fail(where + ": expected " + std::to_string(num_classes) + " logits, got " +
           std::to_string(s.logits.size()));
    }
    for (double v : s.logits) {
      if (!std::isfinite(v)) fail(where + ": non-finite logit");
    }
    if (feature_dim == 0) {
      if (!s.features.empty()) fail(where + ": carries features but the run has feature_dim 0");
    } else {
      if (s.features.size() != static_cast<std::size_t>(feature_dim)) {
        fail(where + ": expected " + std::to_string(feature_dim) + " features, got " +
             std::to_string(s.features.size()));
      }
      for (double v : s.features) {
        if (!std::isfinite(v)) fail(where + ": non-finite feature");
      }
    }
  }
}

void AttributeMatrix::validate() const {
  const std::string ctx = "attribute matrix";
  if (class_names.empty()) fail(ctx + ": at least one class required");
  if (class_names.size() != values.size()) {
    fail(ctx + ": " + std::to_string(class_names.size()) + " class names but " +
         std::to_string(values.size()) + " value rows");
  }
  const std::size_t width = values[0].size();
  if (width == 0) fail(ctx + ": at least one attribute column required");
  std::unordered_set<std::string_view> seen;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::string where = ctx + ": row " + row_str(i + 1);
    check_writable_name(where, "class name", class_names[i]);
    if (!seen.insert(class_names[i]).second) {
      fail(where + ": duplicate class name '" + class_names[i] + "'");
    }
    if (values[i].size() != width) {
      fail(where + ": expected " + std::to_string(width) + " attribute values, got " +
           std::to_string(values[i].size()));
    }
    bool any_positive = false;
    for (double v : values[i]) {
      if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
        fail(where + ": entry " + format_double(v) + " outside [0,1] (class '" +
             class_names[i] + "')");
      }
      any_positive = any_positive || v > 0.0;
    }
    if (!any_positive) {
      fail(where + ": class '" + class_names[i] +
           "' has no attributes — similarity undefined");
    }
  }
}

std::string_view to_string(HierarchyScheme scheme) {
  return scheme == HierarchyScheme::cars ? "cars" : "aircraft";
}

HierarchyScheme hierarchy_scheme_from_string(std::string_view name) {
  if (name == "cars") return HierarchyScheme::cars;
  if (name == "aircraft") return HierarchyScheme::aircraft;
  fail("unknown hierarchy scheme '" + std::string(name) + "' (expected cars or aircraft)");
}

std::size_t level_count(HierarchyScheme scheme) {
  return scheme == HierarchyScheme::cars ? 4u : 3u;
}

namespace {
const std::vector<std::string>& level_names(HierarchyScheme scheme) {
  static const std::vector<std::string> cars = {"make", "model", "type", "year"};
  static const std::vector<std::string> aircraft = {"manufacturer", "family", "variant"};
  return scheme == HierarchyScheme::cars ? cars : aircraft;
}
}  // namespace

void HierarchyTable::validate() const {
  const std::string ctx = "hierarchy table";
  if (rows.empty()) fail(ctx + ": at least one row required");
  const std::size_t arity = rows[0].levels.size();
  if (arity != 3 && arity != 4) {
    fail(ctx + ": unsupported level arity " + std::to_string(arity) + " (expected 3 or 4)");
  }
  std::unordered_set<std::string_view> seen;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string where = ctx + ": row " + row_str(i + 1);
    check_writable_name(where, "class name", rows[i].class_name);
    if (!seen.insert(rows[i].class_name).second) {
      fail(where + ": duplicate class name '" + rows[i].class_name + "'");
    }
    if (rows[i].levels.size() != arity) {
      fail(where + ": expected " + std::to_string(arity) + " level values, got " +
           std::to_string(rows[i].levels.size()));
    }
    for (std::size_t k = 0; k < arity; ++k) {
      if (rows[i].levels[k].empty()) {
        fail(where + ": empty level value in column " + std::to_string(k + 2));
      }
      check_writable_name(where, "level value", rows[i].levels[k]);
    }
  }
}

int SemanticTree::node_index(std::string_view id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

int SemanticTree::class_node(std::string_view class_name) const {
  if (class_name.empty()) return -1;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].class_name == class_name) return static_cast<int>(i);
  }
  return -1;
}

std::vector<std::string> SemanticTree::class_names() const {
  std::vector<std::string> out;
  for (const TreeNode& n : nodes) {
    if (!n.class_name.empty()) out.push_back(n.class_name);
  }
  return out;
}

void SemanticTree::validate_and_index() {
  const std::string ctx = "semantic tree";
  const int n = static_cast<int>(nodes.size());
  if (n == 0) fail(ctx + ": empty node list");
  std::unordered_set<std::string_view> ids;
  std::unordered_set<std::string_view> classes;
  root = -1;
  for (int i = 0; i < n; ++i) {
    const TreeNode& node = nodes[static_cast<std::size_t>(i)];
    if (node.id.empty()) fail(ctx + ": node " + std::to_string(i + 1) + " has an empty id");
    if (!ids.insert(node.id).second) fail(ctx + ": duplicate node id '" + node.id + "'");
    if (node.parent < -1 || node.parent >= n) {
      fail(ctx + ": parent index out of range at node '" + node.id + "'");
    }
    if (node.parent == -1) {
      if (root != -1) {
        fail(ctx + ": multiple roots ('" + nodes[static_cast<std::size_t>(root)].id + "', '" +
             node.id + "')");
      }
      root = i;
    }
    if (!node.class_name.empty() && !classes.insert(node.class_name).second) {
      fail(ctx + ": duplicate class name '" + node.class_name + "'");
    }
  }

  // Depth computation with cycle detection: walk each unresolved chain up to
  // a resolved node (or past the root), then unwind. Runs before the root
  // check because a rootless node list always contains a cycle, and the
  // cycle is the actionable diagnosis.
  // state: 0 = unvisited, 1 = on the current chain, 2 = resolved.
  depths.assign(static_cast<std::size_t>(n), 0);
  std::vector<unsigned char> state(static_cast<std::size_t>(n), 0);
  std::vector<int> chain;
  for (int i = 0; i < n; ++i) {
    if (state[static_cast<std::size_t>(i)] == 2) continue;
    chain.clear();
    int cur = i;
    while (cur != -1 && state[static_cast<std::size_t>(cur)] != 2) {
      if (state[static_cast<std::size_t>(cur)] == 1) {
        fail(ctx + ": cycle detected at node '" + nodes[static_cast<std::size_t>(cur)].id + "'");
      }
      state[static_cast<std::size_t>(cur)] = 1;
      chain.push_back(cur);
      cur = nodes[static_cast<std::size_t>(cur)].parent;
    }
    int d = (cur == -1) ? -1 : depths[static_cast<std::size_t>(cur)];
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      depths[static_cast<std::size_t>(*it)] = ++d;
      state[static_cast<std::size_t>(*it)] = 2;
    }
  }
  if (root == -1) fail(ctx + ": no root node (every node has a parent)");
}

void SplitSpec::validate() const {
  const std::string ctx = "split spec";
  static const std::set<std::string, std::less<>> kSchemes = {
      "attribute", "hierarchy-cars", "hierarchy-aircraft", "tree"};
  if (!kSchemes.count(scheme)) fail(ctx + ": unknown scheme '" + scheme + "'");
  std::unordered_set<std::string_view> seen;
  auto check_list = [&](std::string_view list_name, const std::vector<std::string>& list) {
    for (const std::string& name : list) {
      check_writable_name(ctx + ": " + std::string(list_name) + " list", "class name", name);
      if (!seen.insert(name).second) {
        fail(ctx + ": class '" + name + "' appears in more than one list");
      }
    }
  };
  check_list("known", known);
  check_list("easy", easy);
  check_list("medium", medium);
  check_list("hard", hard);
  if (known.empty()) fail(ctx + ": known class list is empty");
  for (const auto& [name, value] : difficulty) {
    if (!std::isfinite(value)) fail(ctx + ": non-finite difficulty for class '" + name + "'");
  }
  auto check_difficulty = [&](const std::vector<std::string>& list) {
    for (const std::string& name : list) {
      if (!difficulty.count(name)) {
        fail(ctx + ": missing difficulty entry for class '" + name + "'");
      }
    }
  };
  check_difficulty(easy);
  check_difficulty(medium);
  check_difficulty(hard);
}

void MetricsReport::validate() const {
  const std::string ctx = "metrics report";
  if (rule.empty()) fail(ctx + ": empty rule");
  auto check_unit = [&](std::string_view name, double v) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      fail(ctx + ": " + std::string(name) + " " + format_double(v) + " outside [0,1]");
    }
  };
  check_unit("accuracy", accuracy);
  check_unit("openness", openness);
  if (auroc) check_unit("auroc", *auroc);
  if (oscr) check_unit("oscr", *oscr);
  if (ap) check_unit("ap", *ap);
  auto check_curve = [&](std::string_view name, const std::optional<Points>& pts) {
    if (!pts) return;
    double prev_x = 0.0;
    bool first = true;
    for (const auto& [x, y] : *pts) {
      check_unit(std::string(name) + " x", x);
      check_unit(std::string(name) + " y", y);
      if (!first && x < prev_x) {
        fail(ctx + ": " + std::string(name) + " not sorted nondecreasing in x");
      }
      prev_x = x;
      first = false;
    }
  };
  check_curve("roc_points", roc_points);
  check_curve("oscr_points", oscr_points);
}

// ---------------------------------------------------------------------------
// Run CSV
// ---------------------------------------------------------------------------

EvaluationRun parse_run(std::istream& in) {
  const std::string ctx = "run file";
  auto lines = read_lines(in);
  if (lines.empty()) fail(ctx + ": empty input (missing header)");

  auto head = split_fields(lines[0]);
  if (head.size() < 2 || head[0] != "sample_id" || head[1] != "label") {
    fail(ctx + ": malformed header (expected 'sample_id,label,logit_0,...')");
  }
  std::size_t pos = 2;
  int num_logits = 0;
  while (pos < head.size() && head[pos] == "logit_" + std::to_string(num_logits)) {
    ++num_logits;
    ++pos;
  }
  if (num_logits < 2) fail(ctx + ": malformed header (at least 2 logit columns required)");
  int num_feats = 0;
  while (pos < head.size() && head[pos] == "feat_" + std::to_string(num_feats)) {
    ++num_feats;
    ++pos;
  }
  if (pos != head.size()) {
    fail(ctx + ": malformed header (unexpected column '" + std::string(head[pos]) + "')");
  }

  EvaluationRun run;
  run.num_classes = num_logits;
  run.feature_dim = num_feats;
  const std::size_t width = 2 + static_cast<std::size_t>(num_logits + num_feats);
  std::unordered_set<std::string> seen_ids;

  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::size_t row = li;  // 1-based data row
    auto fields = split_fields(lines[li]);
    if (fields.size() != width) {
      fail(ctx + ": row " + row_str(row) + ": expected " + std::to_string(width) +
           " fields, got " + std::to_string(fields.size()));
    }
    Sample s;
    s.id = std::string(fields[0]);
    if (s.id.empty()) fail(ctx + ": row " + row_str(row) + ": empty sample_id");
    if (!seen_ids.insert(s.id).second) {
      fail(ctx + ": row " + row_str(row) + ": duplicate sample_id '" + s.id + "'");
    }
    auto label = parse_int(fields[1]);
    if (!label) {
      fail(ctx + ": row " + row_str(row) + ", column 2: malformed label '" +
           std::string(fields[1]) + "'");
    }
    if (*label != kUnknownLabel && (*label < 0 || *label >= num_logits)) {
      fail(ctx + ": row " + row_str(row) + ": label " + std::to_string(*label) +
           " out of range (-1 or 0.." + std::to_string(num_logits - 1) + ")");
    }
    s.label = static_cast<int>(*label);
    s.logits.reserve(static_cast<std::size_t>(num_logits));
    for (int j = 0; j < num_logits; ++j) {
      const std::size_t col = 3 + static_cast<std::size_t>(j);
      s.logits.push_back(checked_cell(ctx, row, col, fields[col - 1]));
    }
    s.features.reserve(static_cast<std::size_t>(num_feats));
    for (int j = 0; j < num_feats; ++j) {
      const std::size_t col = 3 + static_cast<std::size_t>(num_logits + j);
      s.features.push_back(checked_cell(ctx, row, col, fields[col - 1]));
    }
    run.samples.push_back(std::move(s));
  }
  if (run.samples.empty()) fail(ctx + ": no samples");
  run.validate();
  return run;
}

std::string write_run_text(const EvaluationRun& run) {
  run.validate();
  std::string out = "sample_id,label";
  for (int j = 0; j < run.num_classes; ++j) out += ",logit_" + std::to_string(j);
  for (int j = 0; j < run.feature_dim; ++j) out += ",feat_" + std::to_string(j);
  out += '\n';
  for (const Sample& s : run.samples) {
    out += s.id;
    out += ',';
    out += std::to_string(s.label);
    for (double v : s.logits) {
      out += ',';
      out += format_double(v);
    }
    for (double v : s.features) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Attribute matrix CSV
// ---------------------------------------------------------------------------

AttributeMatrix parse_attribute_matrix(std::istream& in) {
  const std::string ctx = "attribute matrix";
  auto lines = read_lines(in);
  if (lines.empty()) fail(ctx + ": empty input (missing header)");

  auto head = split_fields(lines[0]);
  if (head.size() < 2 || head[0] != "class") {
    fail(ctx + ": malformed header (expected 'class,attr_0,...')");
  }
  for (std::size_t k = 1; k < head.size(); ++k) {
    if (head[k] != "attr_" + std::to_string(k - 1)) {
      fail(ctx + ": malformed header (unexpected column '" + std::string(head[k]) + "')");
    }
  }
  const std::size_t num_attrs = head.size() - 1;

  AttributeMatrix m;
  std::unordered_set<std::string> seen;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::size_t row = li;
    auto fields = split_fields(lines[li]);
    if (fields.size() != head.size()) {
      fail(ctx + ": row " + row_str(row) + ": expected " + std::to_string(head.size()) +
           " fields, got " + std::to_string(fields.size()));
    }
    std::string name(fields[0]);
    if (name.empty()) fail(ctx + ": row " + row_str(row) + ": empty class name");
    if (!seen.insert(name).second) {
      fail(ctx + ": row " + row_str(row) + ": duplicate class name '" + name + "'");
    }
    std::vector<double> vals;
    vals.reserve(num_attrs);
    bool any_positive = false;
    for (std::size_t k = 0; k < num_attrs; ++k) {
      double v = checked_cell(ctx, row, k + 2, fields[k + 1]);
      if (v < 0.0 || v > 1.0) {
        fail(ctx + ": row " + row_str(row) + ", column " + std::to_string(k + 2) + ": entry " +
             format_double(v) + " outside [0,1] (class '" + name + "')");
      }
      any_positive = any_positive || v > 0.0;
      vals.push_back(v);
    }
    if (!any_positive) {
      fail(ctx + ": row " + row_str(row) + ": class '" + name +
           "' has no attributes — similarity undefined");
    }
    m.class_names.push_back(std::move(name));
    m.values.push_back(std::move(vals));
  }
  if (m.class_names.empty()) fail(ctx + ": no rows");
  m.validate();
  return m;
}

std::string write_attribute_matrix_text(const AttributeMatrix& m) {
  m.validate();
  std::string out = "class";
  for (std::size_t k = 0; k < m.num_attributes(); ++k) out += ",attr_" + std::to_string(k);
  out += '\n';
  for (std::size_t i = 0; i < m.values.size(); ++i) {
    out += m.class_names[i];
    for (double v : m.values[i]) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hierarchy table CSV
// ---------------------------------------------------------------------------

HierarchyTable parse_hierarchy_table(std::istream& in, HierarchyScheme scheme) {
  const std::string ctx = "hierarchy table";
  auto lines = read_lines(in);
  if (lines.empty()) fail(ctx + ": empty input (missing header)");

  const auto& names = level_names(scheme);
  auto head = split_fields(lines[0]);
  bool head_ok = head.size() == names.size() + 1 && head[0] == "class";
  for (std::size_t k = 0; head_ok && k < names.size(); ++k) head_ok = head[k + 1] == names[k];
  if (!head_ok) {
    std::string expected = "class";
    for (const auto& n : names) expected += "," + n;
    fail(ctx + ": malformed header for scheme '" + std::string(to_string(scheme)) +
         "' (expected '" + expected + "')");
  }

  HierarchyTable t;
  std::unordered_set<std::string> seen;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::size_t row = li;
    auto fields = split_fields(lines[li]);
    if (fields.size() != names.size() + 1) {
      fail(ctx + ": wrong column count for scheme '" + std::string(to_string(scheme)) +
           "' at row " + row_str(row) + ": expected " + std::to_string(names.size() + 1) +
           " fields, got " + std::to_string(fields.size()));
    }
    HierarchyRow r;
    r.class_name = std::string(fields[0]);
    if (r.class_name.empty()) fail(ctx + ": row " + row_str(row) + ": empty class name");
    if (!seen.insert(r.class_name).second) {
      fail(ctx + ": row " + row_str(row) + ": duplicate class name '" + r.class_name + "'");
    }
    for (std::size_t k = 1; k < fields.size(); ++k) {
      if (fields[k].empty()) {
        fail(ctx + ": row " + row_str(row) + ": empty level value in column " +
             std::to_string(k + 1));
      }
      r.levels.emplace_back(fields[k]);
    }
    t.rows.push_back(std::move(r));
  }
  if (t.rows.empty()) fail(ctx + ": no rows");
  t.validate();
  return t;
}

std::string write_hierarchy_table_text(const HierarchyTable& t) {
  t.validate();
  const HierarchyScheme scheme =
      t.rows[0].levels.size() == 4 ? HierarchyScheme::cars : HierarchyScheme::aircraft;
  std::string out = "class";
  for (const auto& n : level_names(scheme)) out += "," + n;
  out += '\n';
  for (const HierarchyRow& r : t.rows) {
    out += r.class_name;
    for (const std::string& v : r.levels) {
      out += ',';
      out += v;
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Semantic tree JSON
// ---------------------------------------------------------------------------

namespace {

ordered_json parse_json_or_fail(std::istream& in, const std::string& ctx) {
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ctx + ": invalid JSON: " + e.what());
  }
}

}  // namespace

SemanticTree parse_semantic_tree(std::istream& in) {
  const std::string ctx = "semantic tree";
  ordered_json j = parse_json_or_fail(in, ctx);
  if (!j.is_object() || !j.contains("nodes") || !j["nodes"].is_array()) {
    fail(ctx + ": expected an object with a 'nodes' array");
  }

  SemanticTree tree;
  std::vector<std::string> parent_ids;
  std::unordered_map<std::string, int> index_by_id;
  for (const auto& jn : j["nodes"]) {
    if (!jn.is_object()) fail(ctx + ": node entries must be objects");
    if (!jn.contains("id") || !jn["id"].is_string()) {
      fail(ctx + ": node " + std::to_string(tree.nodes.size() + 1) +
           " is missing a string 'id'");
    }
    TreeNode node;
    node.id = jn["id"].get<std::string>();
    if (node.id.empty()) {
      fail(ctx + ": node " + std::to_string(tree.nodes.size() + 1) + " has an empty id");
    }
    if (!jn.contains("parent") || (!jn["parent"].is_null() && !jn["parent"].is_string())) {
      fail(ctx + ": node '" + node.id + "' needs a 'parent' that is a string or null");
    }
    parent_ids.push_back(jn["parent"].is_null() ? std::string()
                                                : jn["parent"].get<std::string>());
    if (jn.contains("class") && !jn["class"].is_null()) {
      if (!jn["class"].is_string()) {
        fail(ctx + ": node '" + node.id + "' has a non-string 'class'");
      }
      node.class_name = jn["class"].get<std::string>();
      if (node.class_name.empty()) {
        fail(ctx + ": node '" + node.id + "' has an empty class name");
      }
    }
    if (!index_by_id.emplace(node.id, static_cast<int>(tree.nodes.size())).second) {
      fail(ctx + ": duplicate node id '" + node.id + "'");
    }
    tree.nodes.push_back(std::move(node));
  }

  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    if (parent_ids[i].empty()) {
      tree.nodes[i].parent = -1;
      continue;
    }
    auto it = index_by_id.find(parent_ids[i]);
    if (it == index_by_id.end()) {
      fail(ctx + ": dangling parent reference to '" + parent_ids[i] + "' at node '" +
           tree.nodes[i].id + "'");
    }
    tree.nodes[i].parent = it->second;
  }
  tree.validate_and_index();
  return tree;
}

std::string write_semantic_tree_text(const SemanticTree& t) {
  SemanticTree checked = t;
  checked.validate_and_index();
  ordered_json nodes = ordered_json::array();
  for (const TreeNode& n : checked.nodes) {
    ordered_json jn;
    jn["id"] = n.id;
    if (n.parent == -1) {
      jn["parent"] = nullptr;
    } else {
      jn["parent"] = checked.nodes[static_cast<std::size_t>(n.parent)].id;
    }
    if (n.class_name.empty()) {
      jn["class"] = nullptr;
    } else {
      jn["class"] = n.class_name;
    }
    nodes.push_back(std::move(jn));
  }
  ordered_json j;
  j["nodes"] = std::move(nodes);
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Split spec JSON
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> string_list(const ordered_json& j, const std::string& ctx,
                                     const char* key) {
  if (!j.contains(key) || !j[key].is_array()) {
    fail(ctx + ": expected an array at key '" + std::string(key) + "'");
  }
  std::vector<std::string> out;
  for (const auto& e : j[key]) {
    if (!e.is_string()) fail(ctx + ": non-string entry in '" + std::string(key) + "'");
    out.push_back(e.get<std::string>());
  }
  return out;
}

double finite_number(const ordered_json& v, const std::string& ctx, const std::string& what) {
  if (!v.is_number()) fail(ctx + ": expected a number for " + what);
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(ctx + ": non-finite " + what);
  return d;
}

}  // namespace

SplitSpec parse_split(std::istream& in) {
  const std::string ctx = "split spec";
  ordered_json j = parse_json_or_fail(in, ctx);
  if (!j.is_object()) fail(ctx + ": expected a JSON object");

  SplitSpec s;
  if (!j.contains("scheme") || !j["scheme"].is_string()) {
    fail(ctx + ": expected a string at key 'scheme'");
  }
  s.scheme = j["scheme"].get<std::string>();
  s.known = string_list(j, ctx, "known");
  s.easy = string_list(j, ctx, "easy");
  s.medium = string_list(j, ctx, "medium");
  s.hard = string_list(j, ctx, "hard");
  if (!j.contains("difficulty") || !j["difficulty"].is_object()) {
    fail(ctx + ": expected an object at key 'difficulty'");
  }
  for (const auto& [name, value] : j["difficulty"].items()) {
    s.difficulty[name] = finite_number(value, ctx, "difficulty of class '" + name + "'");
  }
  if (!j.contains("meta") || !j["meta"].is_object()) {
    fail(ctx + ": expected an object at key 'meta'");
  }
  const auto& meta = j["meta"];
  if (!meta.contains("seed") || !meta["seed"].is_number_unsigned()) {
    fail(ctx + ": meta.seed must be a nonnegative integer");
  }
  if (!meta.contains("samples") || !meta["samples"].is_number_unsigned()) {
    fail(ctx + ": meta.samples must be a nonnegative integer");
  }
  if (!meta.contains("source_digest") || !meta["source_digest"].is_string()) {
    fail(ctx + ": meta.source_digest must be a string");
  }
  s.meta.seed = meta["seed"].get<std::uint64_t>();
  s.meta.samples = meta["samples"].get<std::uint64_t>();
  s.meta.source_digest = meta["source_digest"].get<std::string>();
  s.validate();
  return s;
}

std::string write_split_text(const SplitSpec& s) {
  s.validate();
  ordered_json j;
  j["scheme"] = s.scheme;
  j["known"] = s.known;
  j["easy"] = s.easy;
  j["medium"] = s.medium;
  j["hard"] = s.hard;
  ordered_json diff = ordered_json::object();
  for (const auto& [name, value] : s.difficulty) diff[name] = value;  // std::map: sorted keys
  j["difficulty"] = std::move(diff);
  j["meta"] = {{"seed", s.meta.seed},
               {"samples", s.meta.samples},
               {"source_digest", s.meta.source_digest}};
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Metrics report JSON
// ---------------------------------------------------------------------------

namespace {

std::optional<double> optional_metric(const ordered_json& j, const std::string& ctx,
                                      const char* key) {
  if (!j.contains(key)) fail(ctx + ": missing key '" + std::string(key) + "'");
  if (j[key].is_null()) return std::nullopt;
  return finite_number(j[key], ctx, "'" + std::string(key) + "'");
}

std::optional<Points> optional_points(const ordered_json& j, const std::string& ctx,
                                      const char* key) {
  if (!j.contains(key)) return std::nullopt;
  if (!j[key].is_array()) fail(ctx + ": expected an array at key '" + std::string(key) + "'");
  Points pts;
  for (const auto& e : j[key]) {
    if (!e.is_array() || e.size() != 2) {
      fail(ctx + ": entries of '" + std::string(key) + "' must be [x,y] pairs");
    }
    pts.emplace_back(finite_number(e[0], ctx, "curve x"), finite_number(e[1], ctx, "curve y"));
  }
  return pts;
}

ordered_json points_json(const Points& pts) {
  ordered_json arr = ordered_json::array();
  for (const auto& [x, y] : pts) arr.push_back(ordered_json::array({x, y}));
  return arr;
}

}  // namespace

MetricsReport parse_report(std::istream& in) {
  const std::string ctx = "metrics report";
  ordered_json j = parse_json_or_fail(in, ctx);
  if (!j.is_object()) fail(ctx + ": expected a JSON object");
  MetricsReport r;
  if (!j.contains("rule") || !j["rule"].is_string()) {
    fail(ctx + ": expected a string at key 'rule'");
  }
  r.rule = j["rule"].get<std::string>();
  if (!j.contains("accuracy")) fail(ctx + ": missing key 'accuracy'");
  r.accuracy = finite_number(j["accuracy"], ctx, "'accuracy'");
  r.auroc = optional_metric(j, ctx, "auroc");
  r.oscr = optional_metric(j, ctx, "oscr");
  r.ap = optional_metric(j, ctx, "ap");
  if (!j.contains("openness")) fail(ctx + ": missing key 'openness'");
  r.openness = finite_number(j["openness"], ctx, "'openness'");
  r.roc_points = optional_points(j, ctx, "roc_points");
  r.oscr_points = optional_points(j, ctx, "oscr_points");
  r.validate();
  return r;
}

std::string write_report_text(const MetricsReport& r) {
  r.validate();
  ordered_json j;
  j["rule"] = r.rule;
  j["accuracy"] = r.accuracy;
  j["auroc"] = r.auroc ? ordered_json(*r.auroc) : ordered_json(nullptr);
  j["oscr"] = r.oscr ? ordered_json(*r.oscr) : ordered_json(nullptr);
  j["ap"] = r.ap ? ordered_json(*r.ap) : ordered_json(nullptr);
  j["openness"] = r.openness;
  if (r.roc_points) j["roc_points"] = points_json(*r.roc_points);
  if (r.oscr_points) j["oscr_points"] = points_json(*r.oscr_points);
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Stream/text adapters and digests
// ---------------------------------------------------------------------------

EvaluationRun parse_run_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_run(in);
}
void write_run(const EvaluationRun& run, std::ostream& out) { out << write_run_text(run); }

AttributeMatrix parse_attribute_matrix_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_attribute_matrix(in);
}
void write_attribute_matrix(const AttributeMatrix& m, std::ostream& out) {
  out << write_attribute_matrix_text(m);
}

HierarchyTable parse_hierarchy_table_text(std::string_view text, HierarchyScheme scheme) {
  std::istringstream in{std::string(text)};
  return parse_hierarchy_table(in, scheme);
}
void write_hierarchy_table(const HierarchyTable& t, std::ostream& out) {
  out << write_hierarchy_table_text(t);
}

SemanticTree parse_semantic_tree_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_semantic_tree(in);
}
void write_semantic_tree(const SemanticTree& t, std::ostream& out) {
  out << write_semantic_tree_text(t);
}

SplitSpec parse_split_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_split(in);
}
void write_split(const SplitSpec& s, std::ostream& out) { out << write_split_text(s); }

MetricsReport parse_report_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_report(in);
}
void write_report(const MetricsReport& r, std::ostream& out) { out << write_report_text(r); }

std::string source_digest(const AttributeMatrix& m) {
  return fnv1a64_hex(write_attribute_matrix_text(m));
}
std::string source_digest(const HierarchyTable& t) {
  return fnv1a64_hex(write_hierarchy_table_text(t));
}
std::string source_digest(const SemanticTree& t) {
  return fnv1a64_hex(write_semantic_tree_text(t));
}

}  // namespace osr
