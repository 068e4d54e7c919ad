#include "osr/splits.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "osr/rng.hpp"

namespace osr {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw DataError(msg); }

// Substream tag for the subset draws of search_attribute_splits.
constexpr std::uint64_t kTagSubsetSample = 0x73756273657473ull;

// Validates a closed-class list against available names; returns indices.
std::vector<std::size_t> resolve_closed(const std::vector<std::string>& names,
                                        const std::vector<std::string>& closed,
                                        const std::string& what) {
  if (closed.empty()) fail("closed class set is empty");
  std::unordered_map<std::string_view, std::size_t> index;
  index.reserve(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) index.emplace(names[i], i);
  std::vector<std::size_t> out;
  out.reserve(closed.size());
  std::unordered_set<std::string_view> seen;
  for (const std::string& name : closed) {
    auto it = index.find(name);
    if (it == index.end()) {
      fail("class in closed set missing from " + what + ": '" + name + "'");
    }
    if (!seen.insert(name).second) fail("duplicate class in closed set: '" + name + "'");
    out.push_back(it->second);
  }
  return out;
}

}  // namespace

SimilarityMatrix class_similarity_matrix(const AttributeMatrix& m) {
  m.validate();
  const std::size_t c = m.num_classes();
  std::vector<std::vector<double>> rows = m.values;
  for (auto& row : rows) {
    double sq = 0.0;
    for (double v : row) sq += v * v;
    const double norm = std::sqrt(sq);  // > 0: parse/validate reject zero rows
    for (double& v : row) v /= norm;
  }
  SimilarityMatrix s;
  s.class_names = m.class_names;
  s.values.assign(c, std::vector<double>(c, 0.0));
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = i; j < c; ++j) {
      double dot = 0.0;
      for (std::size_t k = 0; k < rows[i].size(); ++k) dot += rows[i][k] * rows[j][k];
      s.values[i][j] = dot;
      s.values[j][i] = dot;
    }
  }
  return s;
}

std::vector<RankedClass> rank_open_classes(const SimilarityMatrix& s,
                                           const std::vector<std::string>& closed) {
  auto closed_idx = resolve_closed(s.class_names, closed, "similarity matrix");
  if (closed_idx.size() == s.class_names.size()) {
    fail("closed set covers all classes — no open classes to rank");
  }
  std::vector<char> is_closed(s.class_names.size(), 0);
  for (std::size_t i : closed_idx) is_closed[i] = 1;
  std::vector<RankedClass> out;
  out.reserve(s.class_names.size() - closed_idx.size());
  for (std::size_t i = 0; i < s.class_names.size(); ++i) {
    if (is_closed[i]) continue;
    double best = s.values[i][closed_idx[0]];
    for (std::size_t c : closed_idx) best = std::max(best, s.values[i][c]);
    out.push_back({s.class_names[i], best});
  }
  std::sort(out.begin(), out.end(), [](const RankedClass& a, const RankedClass& b) {
    if (a.max_similarity != b.max_similarity) return a.max_similarity < b.max_similarity;
    return a.name < b.name;
  });
  return out;
}

Bins bin_open_classes(const std::vector<RankedClass>& ranked) {
  if (ranked.empty()) fail("cannot bin an empty ranked class list");
  const std::size_t n = ranked.size();
  const std::size_t easy_n = n / 3;
  const std::size_t medium_n = (n + 1) / 3;
  Bins bins;
  bins.easy.assign(ranked.begin(), ranked.begin() + easy_n);
  bins.medium.assign(ranked.begin() + easy_n, ranked.begin() + easy_n + medium_n);
  bins.hard.assign(ranked.begin() + easy_n + medium_n, ranked.end());
  return bins;
}

SplitSpec search_attribute_splits(const AttributeMatrix& m, int num_known,
                                  std::uint64_t num_samples, std::uint64_t seed,
                                  int threads) {
  m.validate();
  const int total = static_cast<int>(m.num_classes());
  if (num_known < 1 || num_known >= total) {
    fail("num_known must satisfy 1 <= num_known < number of classes (" +
         std::to_string(total) + "), got " + std::to_string(num_known));
  }
  if (num_samples < 1) fail("number of search samples must be at least 1");
  if (threads < 1) fail("thread count must be positive");

  // All work happens in lexicographically sorted index space: the sampling
  // procedure is a Fisher-Yates prefix on the sorted class list, and index
  // order there coincides with the lexicographic ranking tie-break.
  std::vector<int> order(static_cast<std::size_t>(total));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return m.class_names[a] < m.class_names[b]; });
  std::vector<std::string> names(static_cast<std::size_t>(total));
  for (int s = 0; s < total; ++s) names[s] = m.class_names[order[s]];

  const SimilarityMatrix sim = class_similarity_matrix(m);
  std::vector<double> s_flat(static_cast<std::size_t>(total) * total);
  for (int si = 0; si < total; ++si) {
    for (int sj = 0; sj < total; ++sj) {
      s_flat[static_cast<std::size_t>(si) * total + sj] = sim.values[order[si]][order[sj]];
    }
  }

  const int num_open = total - num_known;
  const int easy_n = num_open / 3;
  const int medium_n = (num_open + 1) / 3;
  const int hard_n = num_open - easy_n - medium_n;  // >= 1 whenever num_open >= 1

  // The hard-bin mean depends only on the multiset of the top hard_n
  // max-similarities (name tie-breaks merely reorder equal values), so the
  // per-sample evaluation sorts values alone.
  struct Objective {
    double hard_mean;
    double all_mean;
  };
  std::vector<Objective> objectives(num_samples);

  auto draw_subset = [&](std::uint64_t sample_index, std::vector<int>& items) {
    std::iota(items.begin(), items.end(), 0);
    SplitMix64 rng = substream(seed, kTagSubsetSample, sample_index);
    for (int j = 0; j < num_known; ++j) {
      const std::uint64_t r =
          static_cast<std::uint64_t>(j) + rng.uniform_below(static_cast<std::uint64_t>(total - j));
      std::swap(items[static_cast<std::size_t>(j)], items[r]);
    }
  };

  auto evaluate_range = [&](std::uint64_t begin, std::uint64_t end) {
    std::vector<int> items(static_cast<std::size_t>(total));
    std::vector<char> closed_flag(static_cast<std::size_t>(total));
    std::vector<double> open_vals;
    open_vals.reserve(static_cast<std::size_t>(num_open));
    for (std::uint64_t idx = begin; idx < end; ++idx) {
      draw_subset(idx, items);
      std::fill(closed_flag.begin(), closed_flag.end(), 0);
      for (int j = 0; j < num_known; ++j) closed_flag[static_cast<std::size_t>(items[j])] = 1;
      open_vals.clear();
      double sum_all = 0.0;
      for (int s = 0; s < total; ++s) {
        if (closed_flag[static_cast<std::size_t>(s)]) continue;
        const double* row = &s_flat[static_cast<std::size_t>(s) * total];
        double best = row[items[0]];
        for (int j = 1; j < num_known; ++j) best = std::max(best, row[items[j]]);
        open_vals.push_back(best);
        sum_all += best;
      }
      std::sort(open_vals.begin(), open_vals.end());
      double hard_sum = 0.0;
      for (int t = num_open - hard_n; t < num_open; ++t) {
        hard_sum += open_vals[static_cast<std::size_t>(t)];
      }
      objectives[idx] = {hard_sum / hard_n, sum_all / num_open};
    }
  };

  const std::uint64_t worker_count =
      std::min<std::uint64_t>(static_cast<std::uint64_t>(threads), num_samples);
  if (worker_count <= 1) {
    evaluate_range(0, num_samples);
  } else {
    const std::uint64_t chunk = (num_samples + worker_count - 1) / worker_count;
    std::vector<std::thread> pool;
    pool.reserve(worker_count);
    for (std::uint64_t t = 0; t < worker_count; ++t) {
      const std::uint64_t begin = t * chunk;
      const std::uint64_t end = std::min(begin + chunk, num_samples);
      if (begin >= end) break;
      pool.emplace_back(evaluate_range, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  // Deterministic argmax: objective, then all-open mean, then lowest index.
  std::uint64_t best = 0;
  for (std::uint64_t i = 1; i < num_samples; ++i) {
    if (objectives[i].hard_mean > objectives[best].hard_mean ||
        (objectives[i].hard_mean == objectives[best].hard_mean &&
         objectives[i].all_mean > objectives[best].all_mean)) {
      best = i;
    }
  }

  std::vector<int> items(static_cast<std::size_t>(total));
  draw_subset(best, items);
  std::vector<int> subset(items.begin(), items.begin() + num_known);
  std::sort(subset.begin(), subset.end());  // sorted-space ascending = lexicographic

  SimilarityMatrix sorted_sim;
  sorted_sim.class_names = names;
  sorted_sim.values.assign(static_cast<std::size_t>(total),
                           std::vector<double>(static_cast<std::size_t>(total), 0.0));
  for (int si = 0; si < total; ++si) {
    for (int sj = 0; sj < total; ++sj) {
      sorted_sim.values[si][sj] = s_flat[static_cast<std::size_t>(si) * total + sj];
    }
  }

  SplitSpec spec;
  spec.scheme = "attribute";
  for (int s : subset) spec.known.push_back(names[static_cast<std::size_t>(s)]);
  const auto ranked = rank_open_classes(sorted_sim, spec.known);
  const Bins bins = bin_open_classes(ranked);
  for (const RankedClass& r : bins.easy) spec.easy.push_back(r.name);
  for (const RankedClass& r : bins.medium) spec.medium.push_back(r.name);
  for (const RankedClass& r : bins.hard) spec.hard.push_back(r.name);
  for (const RankedClass& r : ranked) spec.difficulty[r.name] = r.max_similarity;
  spec.meta.seed = seed;
  spec.meta.samples = num_samples;
  spec.meta.source_digest = source_digest(m);
  spec.validate();
  return spec;
}

namespace {

// Strongest rule matched by an open class against one closed class.
// Levels: 3 hard, 2 medium, 1 easy (cars only), 0 nothing.
int cars_match_level(const std::vector<std::string>& open_lv,
                     const std::vector<std::string>& closed_lv) {
  if (open_lv[0] != closed_lv[0]) return 0;  // different make: no rule
  if (open_lv[1] != closed_lv[1]) return 1;  // same make, different model
  if (open_lv[2] != closed_lv[2]) return 2;  // same make+model, different type
  if (open_lv[3] != closed_lv[3]) return 3;  // same make+model+type, different year
  return 0;                                  // identical tuple: no rule applies
}

int aircraft_match_level(const std::vector<std::string>& open_lv,
                         const std::vector<std::string>& closed_lv) {
  if (open_lv[0] != closed_lv[0]) return 0;  // different manufacturer
  if (open_lv[1] != closed_lv[1]) return 2;  // same manufacturer, different family
  return 3;  // shared family; variants differ because the classes differ
}

}  // namespace

SplitSpec hierarchy_splits(const HierarchyTable& table, HierarchyScheme scheme,
                           const std::vector<std::string>& closed) {
  table.validate();
  if (table.rows[0].levels.size() != level_count(scheme)) {
    fail("hierarchy table arity does not match scheme '" + std::string(to_string(scheme)) +
         "'");
  }
  std::vector<std::string> names;
  names.reserve(table.rows.size());
  for (const HierarchyRow& r : table.rows) names.push_back(r.class_name);
  const auto closed_idx = resolve_closed(names, closed, "hierarchy table");
  std::vector<char> is_closed(table.rows.size(), 0);
  for (std::size_t i : closed_idx) is_closed[i] = 1;

  struct Assigned {
    std::string name;
    int level;
  };
  std::vector<Assigned> assigned;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (is_closed[i]) continue;
    int level = 0;
    for (std::size_t c : closed_idx) {
      const int match = scheme == HierarchyScheme::cars
                            ? cars_match_level(table.rows[i].levels, table.rows[c].levels)
                            : aircraft_match_level(table.rows[i].levels, table.rows[c].levels);
      level = std::max(level, match);  // difficulty = most similar closed class
    }
    assigned.push_back({table.rows[i].class_name, level});
  }
  std::sort(assigned.begin(), assigned.end(),
            [](const Assigned& a, const Assigned& b) { return a.name < b.name; });

  SplitSpec spec;
  spec.scheme =
      scheme == HierarchyScheme::cars ? "hierarchy-cars" : "hierarchy-aircraft";
  for (std::size_t c : closed_idx) spec.known.push_back(names[c]);
  std::sort(spec.known.begin(), spec.known.end());
  for (const Assigned& a : assigned) {
    spec.difficulty[a.name] = static_cast<double>(a.level);
    if (scheme == HierarchyScheme::cars) {
      // Two-bin cars layout: the medium rule merges into hard; the pre-merge
      // level stays visible in the difficulty map.
      if (a.level >= 2) {
        spec.hard.push_back(a.name);
      } else {
        spec.easy.push_back(a.name);
      }
    } else {
      if (a.level == 3) {
        spec.hard.push_back(a.name);
      } else if (a.level == 2) {
        spec.medium.push_back(a.name);
      } else {
        spec.easy.push_back(a.name);
      }
    }
  }
  spec.meta.seed = 0;
  spec.meta.samples = 0;
  spec.meta.source_digest = source_digest(table);
  spec.validate();
  return spec;
}

namespace {

void require_indexed(const SemanticTree& tree) {
  if (tree.nodes.empty() || tree.depths.size() != tree.nodes.size() || tree.root < 0) {
    fail("semantic tree is not indexed (call validate_and_index after construction)");
  }
}

int path_distance(const SemanticTree& tree, int a, int b) {
  int x = a;
  int y = b;
  int dist = 0;
  while (tree.depths[static_cast<std::size_t>(x)] > tree.depths[static_cast<std::size_t>(y)]) {
    x = tree.nodes[static_cast<std::size_t>(x)].parent;
    ++dist;
  }
  while (tree.depths[static_cast<std::size_t>(y)] > tree.depths[static_cast<std::size_t>(x)]) {
    y = tree.nodes[static_cast<std::size_t>(y)].parent;
    ++dist;
  }
  while (x != y) {
    x = tree.nodes[static_cast<std::size_t>(x)].parent;
    y = tree.nodes[static_cast<std::size_t>(y)].parent;
    dist += 2;
  }
  return dist;
}

}  // namespace

int tree_distance(const SemanticTree& tree, std::string_view node_a, std::string_view node_b) {
  require_indexed(tree);
  const int ia = tree.node_index(node_a);
  if (ia < 0) fail("unknown node '" + std::string(node_a) + "'");
  const int ib = tree.node_index(node_b);
  if (ib < 0) fail("unknown node '" + std::string(node_b) + "'");
  return path_distance(tree, ia, ib);
}

TreeDistanceTable tree_distance_table(const SemanticTree& tree) {
  require_indexed(tree);
  TreeDistanceTable table;
  std::vector<int> class_nodes;
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    if (!tree.nodes[i].class_name.empty()) {
      class_nodes.push_back(static_cast<int>(i));
      table.class_names.push_back(tree.nodes[i].class_name);
    }
  }
  const std::size_t n = class_nodes.size();
  table.distances.assign(n, std::vector<int>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const int d = path_distance(tree, class_nodes[i], class_nodes[j]);
      table.distances[i][j] = d;
      table.distances[j][i] = d;
    }
  }
  return table;
}

SplitSpec tree_splits(const SemanticTree& tree, const std::vector<std::string>& closed,
                      int num_easy, int num_hard) {
  require_indexed(tree);
  if (num_easy < 0 || num_hard < 0) fail("bin sizes must be nonnegative");

  std::unordered_map<std::string_view, int> class_to_node;
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    if (!tree.nodes[i].class_name.empty()) {
      class_to_node.emplace(tree.nodes[i].class_name, static_cast<int>(i));
    }
  }
  if (closed.empty()) fail("closed class set is empty");
  std::vector<int> closed_nodes;
  std::unordered_set<std::string_view> closed_set;
  for (const std::string& name : closed) {
    auto it = class_to_node.find(name);
    if (it == class_to_node.end()) {
      fail("class in closed set missing from tree: '" + name + "'");
    }
    if (!closed_set.insert(name).second) fail("duplicate class in closed set: '" + name + "'");
    closed_nodes.push_back(it->second);
  }

  struct OpenClass {
    std::string name;
    long long total;
  };
  std::vector<OpenClass> open;
  for (const TreeNode& node : tree.nodes) {
    if (node.class_name.empty() || closed_set.count(node.class_name)) continue;
    const int node_idx = class_to_node.at(node.class_name);
    long long total = 0;
    for (int c : closed_nodes) total += path_distance(tree, node_idx, c);
    open.push_back({node.class_name, total});
  }
  if (static_cast<std::size_t>(num_easy) + static_cast<std::size_t>(num_hard) > open.size()) {
    fail("insufficient open classes: requested " + std::to_string(num_easy) + " easy + " +
         std::to_string(num_hard) + " hard but only " + std::to_string(open.size()) +
         " are available");
  }
  // Most distant first; ties lexicographic (a star tree degenerates to pure
  // lexicographic assignment).
  std::sort(open.begin(), open.end(), [](const OpenClass& a, const OpenClass& b) {
    if (a.total != b.total) return a.total > b.total;
    return a.name < b.name;
  });

  SplitSpec spec;
  spec.scheme = "tree";
  spec.known = closed;
  std::sort(spec.known.begin(), spec.known.end());
  for (std::size_t i = 0; i < static_cast<std::size_t>(num_easy); ++i) {
    spec.easy.push_back(open[i].name);
  }
  for (std::size_t i = open.size() - static_cast<std::size_t>(num_hard); i < open.size(); ++i) {
    spec.hard.push_back(open[i].name);
  }
  for (const OpenClass& o : open) spec.difficulty[o.name] = static_cast<double>(o.total);
  spec.meta.seed = 0;
  spec.meta.samples = 0;
  spec.meta.source_digest = source_digest(tree);
  spec.validate();
  return spec;
}

}  // namespace osr
