#pragma once

// Domain value types and the parsers/serializers for every external artifact:
// evaluation runs (CSV), attribute matrices (CSV), hierarchy tables (CSV),
// semantic trees (JSON), split specs (JSON), metrics reports (JSON).
//
// All writers are deterministic: stable key order, shortest round-trip float
// formatting, LF line endings. Serialize-then-parse is the exact identity;
// parse-then-serialize is the identity up to formatting normalization.
//
// Error reporting convention: data rows are numbered from 1 (the header is
// not a row and is reported as "header"); columns are numbered from 1
// including the leading id column.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "osr/error.hpp"

namespace osr {

// Label value marking a sample drawn from outside the known class set.
inline constexpr int kUnknownLabel = -1;

// ---------------------------------------------------------------------------
// Evaluation runs
// ---------------------------------------------------------------------------

struct Sample {
  std::string id;
  int label = kUnknownLabel;    // class index in [0, C) or kUnknownLabel
  std::vector<double> logits;   // length C
  std::vector<double> features; // length D; empty when the run carries none

  friend bool operator==(const Sample&, const Sample&) = default;
};

struct EvaluationRun {
  int num_classes = 0;  // C >= 2
  int feature_dim = 0;  // D >= 0; 0 means no features anywhere in the run
  std::vector<Sample> samples;

  bool has_features() const { return feature_dim > 0; }
  std::size_t size() const { return samples.size(); }

  // Throws DataError on any invariant violation: C < 2, no samples, wrong
  // vector widths, non-finite values, duplicate or unwritable sample ids,
  // labels outside {-1} ∪ [0, C), mixed feature presence.
  void validate() const;

  friend bool operator==(const EvaluationRun&, const EvaluationRun&) = default;
};

// ---------------------------------------------------------------------------
// Split-construction inputs
// ---------------------------------------------------------------------------

struct AttributeMatrix {
  std::vector<std::string> class_names;     // length C_total
  std::vector<std::vector<double>> values;  // C_total x A, entries in [0,1]

  std::size_t num_classes() const { return class_names.size(); }
  std::size_t num_attributes() const { return values.empty() ? 0 : values[0].size(); }

  // Entries in [0,1] and finite; unique class names; consistent row widths;
  // at least one row and one column; every row has a strictly positive entry.
  void validate() const;

  friend bool operator==(const AttributeMatrix&, const AttributeMatrix&) = default;
};

enum class HierarchyScheme { cars, aircraft };

std::string_view to_string(HierarchyScheme scheme);
HierarchyScheme hierarchy_scheme_from_string(std::string_view name);

// Level arity is fixed per scheme: cars = (make, model, type, year),
// aircraft = (manufacturer, family, variant).
std::size_t level_count(HierarchyScheme scheme);

struct HierarchyRow {
  std::string class_name;
  std::vector<std::string> levels;

  friend bool operator==(const HierarchyRow&, const HierarchyRow&) = default;
};

struct HierarchyTable {
  std::vector<HierarchyRow> rows;

  // Unique class names; uniform level arity (3 or 4); nonempty level values.
  void validate() const;

  friend bool operator==(const HierarchyTable&, const HierarchyTable&) = default;
};

struct TreeNode {
  std::string id;
  int parent = -1;         // index into SemanticTree::nodes; -1 for the root
  std::string class_name;  // empty when the node carries no class

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct SemanticTree {
  std::vector<TreeNode> nodes;  // input order preserved
  int root = -1;
  std::vector<int> depths;      // aligned with nodes; root depth 0

  int node_index(std::string_view id) const;          // -1 when absent
  int class_node(std::string_view class_name) const;  // -1 when absent
  std::vector<std::string> class_names() const;       // node order

  // Validates single-root acyclic structure and unique ids/class names, then
  // (re)builds root and depths. Throws DataError naming the offending node.
  void validate_and_index();

  friend bool operator==(const SemanticTree& a, const SemanticTree& b) {
    return a.nodes == b.nodes;
  }
};

// ---------------------------------------------------------------------------
// Split specs
// ---------------------------------------------------------------------------

struct SplitMeta {
  std::uint64_t seed = 0;
  std::uint64_t samples = 0;  // search draws; 0 for deterministic schemes
  std::string source_digest;  // canonical-content digest of the input artifact

  friend bool operator==(const SplitMeta&, const SplitMeta&) = default;
};

struct SplitSpec {
  std::string scheme;  // attribute | hierarchy-cars | hierarchy-aircraft | tree
  std::vector<std::string> known;
  std::vector<std::string> easy;
  std::vector<std::string> medium;  // may be empty (tree, hierarchy-cars)
  std::vector<std::string> hard;
  std::map<std::string, double> difficulty;  // open class -> similarity/distance
  SplitMeta meta;

  // Pairwise-disjoint duplicate-free lists, known scheme name, finite
  // difficulty values, difficulty entries for every binned class.
  void validate() const;

  friend bool operator==(const SplitSpec&, const SplitSpec&) = default;
};

// ---------------------------------------------------------------------------
// Metrics reports
// ---------------------------------------------------------------------------

using Points = std::vector<std::pair<double, double>>;

struct MetricsReport {
  std::string rule;
  double accuracy = 0.0;
  std::optional<double> auroc;  // absent when the run has no unknown samples
  std::optional<double> oscr;
  std::optional<double> ap;
  double openness = 0.0;
  std::optional<Points> roc_points;
  std::optional<Points> oscr_points;

  // Scalars in [0,1]; curve points in [0,1]^2 sorted nondecreasing in x.
  void validate() const;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

// ---------------------------------------------------------------------------
// Parsers and writers
// ---------------------------------------------------------------------------
// Stream forms are primary; _text forms are conveniences over them. Parsers
// throw DataError with row/column/node context; writers throw only for
// values that fail validation (stream state reports I/O failure).

EvaluationRun parse_run(std::istream& in);
EvaluationRun parse_run_text(std::string_view text);
void write_run(const EvaluationRun& run, std::ostream& out);
std::string write_run_text(const EvaluationRun& run);

AttributeMatrix parse_attribute_matrix(std::istream& in);
AttributeMatrix parse_attribute_matrix_text(std::string_view text);
void write_attribute_matrix(const AttributeMatrix& m, std::ostream& out);
std::string write_attribute_matrix_text(const AttributeMatrix& m);

HierarchyTable parse_hierarchy_table(std::istream& in, HierarchyScheme scheme);
HierarchyTable parse_hierarchy_table_text(std::string_view text, HierarchyScheme scheme);
void write_hierarchy_table(const HierarchyTable& t, std::ostream& out);
std::string write_hierarchy_table_text(const HierarchyTable& t);

SemanticTree parse_semantic_tree(std::istream& in);
SemanticTree parse_semantic_tree_text(std::string_view text);
void write_semantic_tree(const SemanticTree& t, std::ostream& out);
std::string write_semantic_tree_text(const SemanticTree& t);

SplitSpec parse_split(std::istream& in);
SplitSpec parse_split_text(std::string_view text);
void write_split(const SplitSpec& s, std::ostream& out);
std::string write_split_text(const SplitSpec& s);

MetricsReport parse_report(std::istream& in);
MetricsReport parse_report_text(std::string_view text);
void write_report(const MetricsReport& r, std::ostream& out);
std::string write_report_text(const MetricsReport& r);

// Digest recorded in SplitSpec metadata: FNV-1a 64 over the canonical
// serialization of the parsed artifact, so logically identical inputs agree
// regardless of their original byte formatting.
std::string source_digest(const AttributeMatrix& m);
std::string source_digest(const HierarchyTable& t);
std::string source_digest(const SemanticTree& t);

}  // namespace osr
