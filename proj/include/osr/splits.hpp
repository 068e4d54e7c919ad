#pragma once

// Easy/Medium/Hard open-set split construction by three schemes:
//
//  - attribute: cosine similarity between L2-normalized attribute rows;
//    randomized search over known-class subsets for the most difficult split
//    (greatest mean max-similarity over the Hard bin).
//  - hierarchy: literal name-level rules for the cars (make/model/type/year)
//    and aircraft (manufacturer/family/variant) layouts.
//  - tree: total path distance in a semantic tree from each open class to the
//    whole closed set; Easy = most distant, Hard = closest.
//
// Everything is deterministic: the subset search draws Fisher-Yates prefixes
// on the lexicographically sorted class list from per-sample RNG substreams
// (independent of thread count), ranking ties break lexicographically, and
// the argmax reduction breaks objective ties by lowest sample index.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "osr/runio.hpp"

namespace osr {

struct SimilarityMatrix {
  std::vector<std::string> class_names;
  std::vector<std::vector<double>> values;  // symmetric, unit diagonal

  friend bool operator==(const SimilarityMatrix&, const SimilarityMatrix&) = default;
};

// S[i][j] = cosine of attribute rows i and j (dot product of L2-normalized
// rows). Rows are nonnegative, so entries lie in [0, 1].
SimilarityMatrix class_similarity_matrix(const AttributeMatrix& m);

struct RankedClass {
  std::string name;
  double max_similarity = 0.0;

  friend bool operator==(const RankedClass&, const RankedClass&) = default;
};

// Pairs every non-closed class with its maximum similarity to any closed
// class, sorted ascending (least similar = easiest first); ties break by
// class name. Throws when closed is empty, covers all classes, contains
// duplicates, or names an unknown class.
std::vector<RankedClass> rank_open_classes(const SimilarityMatrix& s,
                                           const std::vector<std::string>& closed);

struct Bins {
  std::vector<RankedClass> easy;
  std::vector<RankedClass> medium;
  std::vector<RankedClass> hard;
};

// Contiguous rank-order bins of sizes floor(N/3), floor((N+1)/3), remainder
// (hard gets the largest share and the most similar classes).
Bins bin_open_classes(const std::vector<RankedClass>& ranked);

// Draws num_samples known-class subsets of size num_known (Fisher-Yates
// prefix on the sorted class list, one RNG substream per sample index),
// ranks and bins the open classes for each, and keeps the subset maximizing
// mean max-similarity over the Hard bin (ties: mean over all open classes,
// then lowest sample index). threads only partitions the sample range; the
// result is byte-identical for any thread count.
SplitSpec search_attribute_splits(const AttributeMatrix& m, int num_known,
                                  std::uint64_t num_samples, std::uint64_t seed,
                                  int threads = 1);

// Rule-based assignment against the closed set, most specific rule first
// (hard, then medium, then easy), difficulty recording the pre-merge rule
// level (3 hard, 2 medium, 1 easy, 0 no rule matched -> easy bin).
// Cars: hard = same make/model/type, different year; medium = same
// make/model, different type; easy = same make, different model. The medium
// bin is merged into hard in the returned spec (two-bin cars layout); the
// difficulty map keeps the pre-merge level.
// Aircraft: hard = same manufacturer and family (variant distinctness is
// implied by class distinctness); medium = same manufacturer, different
// family; easy = manufacturer shared with no closed class.
SplitSpec hierarchy_splits(const HierarchyTable& table, HierarchyScheme scheme,
                           const std::vector<std::string>& closed);

// Edge count of the unique path between two nodes:
// depth(a) + depth(b) - 2 depth(lca). Node arguments are node ids.
int tree_distance(const SemanticTree& tree, std::string_view node_a, std::string_view node_b);

struct TreeDistanceTable {
  std::vector<std::string> class_names;       // class-bearing nodes, tree order
  std::vector<std::vector<int>> distances;    // pairwise path lengths

  friend bool operator==(const TreeDistanceTable&, const TreeDistanceTable&) = default;
};

// Pairwise path lengths between all class-bearing nodes (a tree metric:
// symmetric, zero diagonal, triangle inequality).
TreeDistanceTable tree_distance_table(const SemanticTree& tree);

// Total path distance from each open class to every closed class, sorted
// descending; Easy = top num_easy (most dissimilar), Hard = bottom num_hard,
// medium empty. Ties sort lexicographically (a star tree degenerates to
// lexicographic assignment). The difficulty map records every open class's
// total distance, binned or not.
SplitSpec tree_splits(const SemanticTree& tree, const std::vector<std::string>& closed,
                      int num_easy, int num_hard);

}  // namespace osr
