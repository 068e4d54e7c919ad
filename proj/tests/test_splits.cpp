#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "osr/rng.hpp"
#include "osr/runio.hpp"
#include "osr/splits.hpp"

using namespace osr;

namespace {

// Pinned by the byte-stability contract: split search derives one RNG
// substream per sample index under this tag, so outputs re-derive exactly.
constexpr std::uint64_t kSubsetSampleTag = 0x73756273657473ull;

std::string padded(int i) {
  std::string s = std::to_string(i);
  return s.size() < 2 ? "0" + s : s;
}

AttributeMatrix random_matrix(oracle::Gen& g, int classes, int attrs) {
  AttributeMatrix m;
  for (int i = 0; i < classes; ++i) {
    m.class_names.push_back("c" + padded(i));
    std::vector<double> row;
    for (int k = 0; k < attrs; ++k) row.push_back(g.real(0.01, 1.0));
    m.values.push_back(std::move(row));
  }
  return m;
}

SemanticTree random_tree(oracle::Gen& g, int n) {
  SemanticTree t;
  for (int i = 0; i < n; ++i) {
    TreeNode node;
    node.id = "n" + padded(i);
    node.parent = i == 0 ? -1 : static_cast<int>(g.below(static_cast<std::uint64_t>(i)));
    node.class_name = "cls" + padded(i);
    t.nodes.push_back(std::move(node));
  }
  t.validate_and_index();
  return t;
}

SemanticTree tree_from(std::vector<TreeNode> nodes) {
  SemanticTree t;
  t.nodes = std::move(nodes);
  t.validate_and_index();
  return t;
}

std::string msg_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

bool contains(const std::string& hay, std::string_view needle) {
  return hay.find(needle) != std::string::npos;
}

// First num_known entries of the Fisher-Yates prefix the search draws for
// one sample index, replayed through the public RNG primitives.
std::vector<int> replay_draw(int total, int num_known, std::uint64_t seed,
                             std::uint64_t sample_index) {
  std::vector<int> items(static_cast<std::size_t>(total));
  std::iota(items.begin(), items.end(), 0);
  SplitMix64 rng = substream(seed, kSubsetSampleTag, sample_index);
  for (int j = 0; j < num_known; ++j) {
    const std::uint64_t r =
        static_cast<std::uint64_t>(j) + rng.uniform_below(static_cast<std::uint64_t>(total - j));
    std::swap(items[static_cast<std::size_t>(j)], items[r]);
  }
  items.resize(static_cast<std::size_t>(num_known));
  return items;
}

}  // namespace

// ---------------------------------------------------------------------------
// class_similarity_matrix
// ---------------------------------------------------------------------------

TEST_CASE("similarity: proportional rows score ~1, orthogonal rows score 0") {
  AttributeMatrix m;
  m.class_names = {"a", "b", "c"};
  m.values = {{0.3, 0.6}, {0.0, 0.7}, {0.1, 0.2}};  // a ∥ c, b ⊥ nothing exactly
  const SimilarityMatrix s = class_similarity_matrix(m);
  CHECK(s.values[0][2] == doctest::Approx(1.0).epsilon(1e-12));

  AttributeMatrix ortho;
  ortho.class_names = {"x", "y"};
  ortho.values = {{1.0, 0.0}, {0.0, 1.0}};
  CHECK(class_similarity_matrix(ortho).values[0][1] == 0.0);
}

TEST_CASE("similarity matches a long-double cosine oracle; symmetric unit diagonal") {
  oracle::Gen g(31);
  for (int it = 0; it < 50; ++it) {
    const AttributeMatrix m = random_matrix(g, g.irange(2, 8), g.irange(1, 6));
    const SimilarityMatrix s = class_similarity_matrix(m);
    REQUIRE(s.class_names == m.class_names);
    for (std::size_t i = 0; i < m.num_classes(); ++i) {
      CHECK(std::abs(s.values[i][i] - 1.0) < 1e-12);
      for (std::size_t j = 0; j < m.num_classes(); ++j) {
        CHECK(s.values[i][j] == s.values[j][i]);  // assigned from one dot product
        CHECK(std::abs(s.values[i][j] - oracle::cosine_ld(m.values[i], m.values[j])) < 1e-12);
        CHECK(s.values[i][j] >= 0.0);  // nonnegative attribute rows
        CHECK(s.values[i][j] <= 1.0 + 1e-12);
      }
    }
  }
}

// ---------------------------------------------------------------------------
// rank_open_classes
// ---------------------------------------------------------------------------

TEST_CASE("ranking: orthogonal class first, duplicate class last, ties by name") {
  AttributeMatrix m;
  m.class_names = {"anchor", "dup", "orthoB", "orthoA"};
  m.values = {{1.0, 0.0}, {0.5, 0.0}, {0.0, 1.0}, {0.0, 0.25}};
  const SimilarityMatrix s = class_similarity_matrix(m);
  const auto ranked = rank_open_classes(s, {"anchor"});
  REQUIRE(ranked.size() == 3);
  // orthoA and orthoB both have similarity exactly 0: lexicographic order.
  CHECK(ranked[0].name == "orthoA");
  CHECK(ranked[0].max_similarity == 0.0);
  CHECK(ranked[1].name == "orthoB");
  CHECK(ranked[1].max_similarity == 0.0);
  CHECK(ranked[2].name == "dup");
  CHECK(ranked[2].max_similarity == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ranking matches a max-over-closed oracle and partitions the classes") {
  oracle::Gen g(32);
  for (int it = 0; it < 100; ++it) {
    const int c = g.irange(3, 9);
    const AttributeMatrix m = random_matrix(g, c, g.irange(1, 5));
    const SimilarityMatrix s = class_similarity_matrix(m);
    const int k = g.irange(1, c - 1);
    std::vector<int> order(static_cast<std::size_t>(c));
    std::iota(order.begin(), order.end(), 0);
    for (int j = 0; j < k; ++j) {
      std::swap(order[static_cast<std::size_t>(j)],
                order[static_cast<std::size_t>(j) + g.below(static_cast<std::uint64_t>(c - j))]);
    }
    std::vector<std::string> closed;
    for (int j = 0; j < k; ++j) closed.push_back(m.class_names[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])]);

    const auto ranked = rank_open_classes(s, closed);
    CHECK(ranked.size() == static_cast<std::size_t>(c - k));
    std::set<std::string> seen;
    for (const RankedClass& r : ranked) {
      seen.insert(r.name);
      const auto idx = static_cast<std::size_t>(
          std::find(m.class_names.begin(), m.class_names.end(), r.name) - m.class_names.begin());
      double best = -1.0;
      for (const std::string& cname : closed) {
        const auto ci = static_cast<std::size_t>(
            std::find(m.class_names.begin(), m.class_names.end(), cname) - m.class_names.begin());
        best = std::max(best, s.values[idx][ci]);
      }
      CHECK(r.max_similarity == best);  // same doubles, exact
    }
    for (const std::string& cname : closed) CHECK(seen.count(cname) == 0);
    CHECK(seen.size() == ranked.size());
    for (std::size_t i = 1; i < ranked.size(); ++i) {
      const bool ascending =
          ranked[i - 1].max_similarity < ranked[i].max_similarity ||
          (ranked[i - 1].max_similarity == ranked[i].max_similarity &&
           ranked[i - 1].name < ranked[i].name);
      CHECK(ascending);
    }
  }
}

TEST_CASE("ranking error messages") {
  AttributeMatrix m;
  m.class_names = {"a", "b"};
  m.values = {{1.0, 0.0}, {0.0, 1.0}};
  const SimilarityMatrix s = class_similarity_matrix(m);
  CHECK(contains(msg_of([&] { rank_open_classes(s, {}); }), "closed class set is empty"));
  CHECK(contains(msg_of([&] { rank_open_classes(s, {"a", "b"}); }),
                 "closed set covers all classes — no open classes to rank"));
  CHECK(contains(msg_of([&] { rank_open_classes(s, {"a", "a"}); }),
                 "duplicate class in closed set: 'a'"));
  CHECK(contains(msg_of([&] { rank_open_classes(s, {"zzz"}); }),
                 "class in closed set missing from similarity matrix: 'zzz'"));
}

// ---------------------------------------------------------------------------
// bin_open_classes
// ---------------------------------------------------------------------------

TEST_CASE("binning: size splits and contiguity") {
  auto ranked_of = [](int n) {
    std::vector<RankedClass> r;
    for (int i = 0; i < n; ++i) r.push_back({"c" + padded(i), 0.01 * i});
    return r;
  };
  {
    const Bins b = bin_open_classes(ranked_of(3));
    CHECK(b.easy.size() == 1);
    CHECK(b.medium.size() == 1);
    CHECK(b.hard.size() == 1);
  }
  {
    const Bins b = bin_open_classes(ranked_of(100));
    CHECK(b.easy.size() == 33);
    CHECK(b.medium.size() == 33);
    CHECK(b.hard.size() == 34);
  }
  for (int n = 1; n <= 60; ++n) {
    const auto ranked = ranked_of(n);
    const Bins b = bin_open_classes(ranked);
    CHECK(b.easy.size() == static_cast<std::size_t>(n / 3));
    CHECK(b.medium.size() == static_cast<std::size_t>((n + 1) / 3));
    CHECK(b.easy.size() + b.medium.size() + b.hard.size() == static_cast<std::size_t>(n));
    CHECK(b.hard.size() >= b.easy.size());  // hard takes the remainder
    // Contiguity: concatenating the bins reproduces the ranked order.
    std::vector<RankedClass> cat = b.easy;
    cat.insert(cat.end(), b.medium.begin(), b.medium.end());
    cat.insert(cat.end(), b.hard.begin(), b.hard.end());
    CHECK(cat == ranked);
  }
}

// ---------------------------------------------------------------------------
// search_attribute_splits
// ---------------------------------------------------------------------------

TEST_CASE("search with one sample equals the replayed Fisher-Yates draw") {
  oracle::Gen g(33);
  // Class names intentionally shuffled relative to construction order.
  AttributeMatrix m = random_matrix(g, 7, 4);
  std::swap(m.class_names[0], m.class_names[5]);
  std::swap(m.values[0], m.values[5]);

  const SplitSpec spec = search_attribute_splits(m, 3, 1, 42);
  std::vector<std::string> sorted_names = m.class_names;
  std::sort(sorted_names.begin(), sorted_names.end());
  std::vector<std::string> expect;
  for (int idx : replay_draw(7, 3, 42, 0)) {
    expect.push_back(sorted_names[static_cast<std::size_t>(idx)]);
  }
  std::sort(expect.begin(), expect.end());
  CHECK(spec.known == expect);
  CHECK(spec.scheme == "attribute");
  CHECK(spec.meta.seed == 42);
  CHECK(spec.meta.samples == 1);
  CHECK(!spec.meta.source_digest.empty());
}

TEST_CASE("search is deterministic and thread-count invariant") {
  oracle::Gen g(34);
  const AttributeMatrix m = random_matrix(g, 10, 5);
  const SplitSpec a = search_attribute_splits(m, 4, 200, 9, 1);
  const SplitSpec b = search_attribute_splits(m, 4, 200, 9, 1);
  const SplitSpec c = search_attribute_splits(m, 4, 200, 9, 4);
  const SplitSpec d = search_attribute_splits(m, 4, 200, 9, 7);
  CHECK(a == b);
  CHECK(a == c);
  CHECK(a == d);
  CHECK(write_split_text(a) == write_split_text(d));
  const SplitSpec other = search_attribute_splits(m, 4, 200, 10, 1);
  CHECK(other.meta.seed == 10);  // different seed may pick a different subset
}

TEST_CASE("search equals the enumeration argmax over all C(6,3)=20 subsets") {
  oracle::Gen g(99);
  const AttributeMatrix m = random_matrix(g, 6, 4);
  const SimilarityMatrix s = class_similarity_matrix(m);
  std::vector<std::string> names = m.class_names;
  std::sort(names.begin(), names.end());

  struct Candidate {
    std::vector<std::string> subset;
    double hard_mean;
    double all_mean;
  };
  std::vector<Candidate> all;
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = i + 1; j < 6; ++j) {
      for (std::size_t k = j + 1; k < 6; ++k) {
        Candidate cand;
        cand.subset = {names[i], names[j], names[k]};
        const auto ranked = rank_open_classes(s, cand.subset);
        const Bins bins = bin_open_classes(ranked);
        double hard_sum = 0.0;
        for (const RankedClass& r : bins.hard) hard_sum += r.max_similarity;
        double all_sum = 0.0;
        for (const RankedClass& r : ranked) all_sum += r.max_similarity;
        cand.hard_mean = hard_sum / static_cast<double>(bins.hard.size());
        cand.all_mean = all_sum / static_cast<double>(ranked.size());
        all.push_back(std::move(cand));
      }
    }
  }
  REQUIRE(all.size() == 20);
  std::sort(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) {
    if (a.hard_mean != b.hard_mean) return a.hard_mean > b.hard_mean;
    return a.all_mean > b.all_mean;
  });
  // The toy instance must have an unambiguous winner under the search's
  // (hard mean, all-open mean) objective for the comparison to be meaningful;
  // this guards against an unlucky matrix, not the search. Both sides compute
  // the means with the same value ordering, so exact comparison is sound.
  const bool unique_winner =
      all[0].hard_mean > all[1].hard_mean ||
      (all[0].hard_mean == all[1].hard_mean && all[0].all_mean > all[1].all_mean + 1e-9);
  REQUIRE(unique_winner);

  const std::uint64_t samples = 256;
  // Replaying the draws must show every one of the 20 subsets was sampled.
  std::set<std::array<int, 3>> covered;
  for (std::uint64_t sidx = 0; sidx < samples; ++sidx) {
    auto draw = replay_draw(6, 3, 3, sidx);
    std::sort(draw.begin(), draw.end());
    covered.insert({draw[0], draw[1], draw[2]});
  }
  REQUIRE(covered.size() == 20);

  const SplitSpec spec = search_attribute_splits(m, 3, samples, 3);
  CHECK(spec.known == all[0].subset);
}

TEST_CASE("search winner's bins re-derive from the public rank/bin pipeline") {
  oracle::Gen g(35);
  const AttributeMatrix m = random_matrix(g, 9, 4);
  const SplitSpec spec = search_attribute_splits(m, 3, 64, 5);
  const SimilarityMatrix s = class_similarity_matrix(m);
  const auto ranked = rank_open_classes(s, spec.known);
  const Bins bins = bin_open_classes(ranked);
  auto names_of = [](const std::vector<RankedClass>& v) {
    std::vector<std::string> out;
    for (const RankedClass& r : v) out.push_back(r.name);
    return out;
  };
  CHECK(spec.easy == names_of(bins.easy));
  CHECK(spec.medium == names_of(bins.medium));
  CHECK(spec.hard == names_of(bins.hard));
  CHECK(spec.difficulty.size() == ranked.size());
  for (const RankedClass& r : ranked) {
    CHECK(spec.difficulty.at(r.name) == r.max_similarity);
  }
  CHECK_NOTHROW(spec.validate());
}

// ---------------------------------------------------------------------------
// hierarchy_splits
// ---------------------------------------------------------------------------

TEST_CASE("cars rules: 10-class hand table gives the exact bins and levels") {
  const HierarchyTable t = parse_hierarchy_table_text(
      "class,make,model,type,year\n"
      "C1,Falcon,Meteor,Coupe,2010\n"
      "C2,Falcon,Comet,Sedan,2012\n"
      "C3,Aurora,Nova,Hatch,2015\n"
      "O1,Falcon,Meteor,Coupe,2014\n"
      "O2,Falcon,Meteor,Wagon,2010\n"
      "O3,Falcon,Pulsar,Coupe,2011\n"
      "O4,Aurora,Nova,Hatch,2019\n"
      "O5,Aurora,Vega,Sedan,2016\n"
      "O6,Titan,Orion,SUV,2018\n"
      "O7,Aurora,Nova,Coupe,2015\n",
      HierarchyScheme::cars);
  const SplitSpec spec = hierarchy_splits(t, HierarchyScheme::cars, {"C1", "C2", "C3"});
  CHECK(spec.scheme == "hierarchy-cars");
  CHECK(spec.known == std::vector<std::string>{"C1", "C2", "C3"});
  CHECK(spec.easy == std::vector<std::string>{"O3", "O5", "O6"});
  CHECK(spec.medium.empty());
  CHECK(spec.hard == std::vector<std::string>{"O1", "O2", "O4", "O7"});
  const std::map<std::string, double> expected_levels = {
      {"O1", 3.0}, {"O2", 2.0}, {"O3", 1.0}, {"O4", 3.0},
      {"O5", 1.0}, {"O6", 0.0}, {"O7", 2.0},
  };
  CHECK(spec.difficulty == expected_levels);
  CHECK(spec.meta.samples == 0);
}

TEST_CASE("aircraft rules: 9-class hand table gives the exact bins and levels") {
  const HierarchyTable t = parse_hierarchy_table_text(
      "class,manufacturer,family,variant\n"
      "A1,Albatross,A100,A100-1\n"
      "A2,Albatross,A200,A200-1\n"
      "A3,Bison,B300,B300-1\n"
      "P1,Albatross,A100,A100-2\n"
      "P2,Albatross,A300,A300-1\n"
      "P3,Bison,B500,B500-1\n"
      "P4,Condor,C900,C900-1\n"
      "P5,Bison,B300,B300-2\n"
      "P6,Condor,C800,C800-2\n",
      HierarchyScheme::aircraft);
  const SplitSpec spec =
      hierarchy_splits(t, HierarchyScheme::aircraft, {"A1", "A2", "A3"});
  CHECK(spec.scheme == "hierarchy-aircraft");
  CHECK(spec.easy == std::vector<std::string>{"P4", "P6"});
  CHECK(spec.medium == std::vector<std::string>{"P2", "P3"});
  CHECK(spec.hard == std::vector<std::string>{"P1", "P5"});
  const std::map<std::string, double> expected_levels = {
      {"P1", 3.0}, {"P2", 2.0}, {"P3", 2.0}, {"P4", 0.0}, {"P5", 3.0}, {"P6", 0.0},
  };
  CHECK(spec.difficulty == expected_levels);
}

TEST_CASE("cars: an open class identical to a closed one matches no rule") {
  HierarchyTable t;
  t.rows = {
      {"k", {"M", "X", "T", "2010"}},
      {"o_same", {"M", "X", "T", "2010"}},   // identical tuple: no rule fires
      {"o_year", {"M", "X", "T", "2013"}},   // year-only difference: hardest rule
  };
  const SplitSpec spec = hierarchy_splits(t, HierarchyScheme::cars, {"k"});
  CHECK(spec.easy == std::vector<std::string>{"o_same"});
  CHECK(spec.hard == std::vector<std::string>{"o_year"});
  CHECK(spec.difficulty.at("o_same") == 0.0);
  CHECK(spec.difficulty.at("o_year") == 3.0);
}

TEST_CASE("hierarchy error messages") {
  HierarchyTable aircraft3;
  aircraft3.rows = {{"a", {"m", "f", "v"}}, {"b", {"m", "g", "w"}}};
  CHECK(contains(msg_of([&] {
          hierarchy_splits(aircraft3, HierarchyScheme::cars, {"a"});
        }),
        "hierarchy table arity does not match scheme 'cars'"));
  CHECK(contains(msg_of([&] {
          hierarchy_splits(aircraft3, HierarchyScheme::aircraft, {"zz"});
        }),
        "class in closed set missing from hierarchy table: 'zz'"));
  CHECK(contains(msg_of([&] {
          hierarchy_splits(aircraft3, HierarchyScheme::aircraft, {});
        }),
        "closed class set is empty"));
}

// ---------------------------------------------------------------------------
// tree distances
// ---------------------------------------------------------------------------

TEST_CASE("tree_distance: chain and sibling cases") {
  const SemanticTree chain = tree_from({
      {"root", -1, ""}, {"a", 0, ""}, {"b", 1, "b"},
  });
  CHECK(tree_distance(chain, "root", "root") == 0);
  CHECK(tree_distance(chain, "root", "a") == 1);
  CHECK(tree_distance(chain, "root", "b") == 2);
  CHECK(tree_distance(chain, "b", "a") == 1);

  const SemanticTree fork = tree_from({
      {"root", -1, ""}, {"l", 0, "left"}, {"r", 0, "right"},
  });
  CHECK(tree_distance(fork, "l", "r") == 2);
  CHECK(contains(msg_of([&] { tree_distance(fork, "l", "ghost"); }),
                 "unknown node 'ghost'"));
}

TEST_CASE("tree_distance equals BFS on random trees") {
  oracle::Gen g(36);
  for (int it = 0; it < 50; ++it) {
    const SemanticTree t = random_tree(g, g.irange(2, 40));
    for (int trial = 0; trial < 30; ++trial) {
      const int a = static_cast<int>(g.below(t.nodes.size()));
      const int b = static_cast<int>(g.below(t.nodes.size()));
      CHECK(tree_distance(t, t.nodes[static_cast<std::size_t>(a)].id,
                          t.nodes[static_cast<std::size_t>(b)].id) ==
            oracle::bfs_tree_distance(t, a, b));
    }
  }
}

TEST_CASE("tree_distance_table is a tree metric") {
  oracle::Gen g(37);
  for (int it = 0; it < 20; ++it) {
    const SemanticTree t = random_tree(g, g.irange(2, 20));
    const TreeDistanceTable table = tree_distance_table(t);
    const std::size_t n = table.class_names.size();
    REQUIRE(n == t.nodes.size());  // every node carries a class here
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(table.distances[i][i] == 0);
      for (std::size_t j = 0; j < n; ++j) {
        CHECK(table.distances[i][j] == table.distances[j][i]);
        CHECK(table.distances[i][j] >= 0);
        for (std::size_t k = 0; k < n; ++k) {
          CHECK(table.distances[i][j] <= table.distances[i][k] + table.distances[k][j]);
        }
      }
    }
  }
}

// ---------------------------------------------------------------------------
// tree_splits
// ---------------------------------------------------------------------------

TEST_CASE("tree_splits: two-family hand instance") {
  const SemanticTree t = tree_from({
      {"root", -1, ""},
      {"canid", 0, ""},
      {"bird", 0, ""},
      {"wolf", 1, "wolf"},
      {"dog", 1, "dog"},
      {"sparrow", 2, "sparrow"},
      {"crow", 2, "crow"},
  });
  const SplitSpec spec = tree_splits(t, {"dog"}, 2, 1);
  CHECK(spec.scheme == "tree");
  CHECK(spec.known == std::vector<std::string>{"dog"});
  CHECK(spec.easy == std::vector<std::string>{"crow", "sparrow"});  // 4,4: name tie-break
  CHECK(spec.medium.empty());
  CHECK(spec.hard == std::vector<std::string>{"wolf"});  // closest to the closed set
  CHECK(spec.difficulty.at("wolf") == 2.0);
  CHECK(spec.difficulty.at("sparrow") == 4.0);
  CHECK(spec.difficulty.at("crow") == 4.0);
}

TEST_CASE("tree_splits: star tree degenerates to lexicographic assignment") {
  std::vector<TreeNode> nodes = {{"hub", -1, ""}};
  for (const char* leaf : {"a", "b", "c", "d", "e", "f"}) {
    nodes.push_back({leaf, 0, leaf});
  }
  const SemanticTree t = tree_from(std::move(nodes));
  const SplitSpec spec = tree_splits(t, {"a"}, 2, 2);
  CHECK(spec.easy == std::vector<std::string>{"b", "c"});
  CHECK(spec.hard == std::vector<std::string>{"e", "f"});
  // Difficulty covers every open class, binned or not ('d' is unbinned).
  CHECK(spec.difficulty.size() == 5);
  for (const char* leaf : {"b", "c", "d", "e", "f"}) {
    CHECK(spec.difficulty.at(leaf) == 2.0);
  }
}

TEST_CASE("tree_splits matches a BFS-total oracle on random trees") {
  oracle::Gen g(38);
  for (int it = 0; it < 30; ++it) {
    const int n = g.irange(6, 16);
    const SemanticTree t = random_tree(g, n);
    // Closed set: a random strict subset of the classes.
    const int k = g.irange(1, n - 3);
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    for (int j = 0; j < k; ++j) {
      std::swap(order[static_cast<std::size_t>(j)],
                order[static_cast<std::size_t>(j) + g.below(static_cast<std::uint64_t>(n - j))]);
    }
    std::vector<std::string> closed;
    std::set<int> closed_idx;
    for (int j = 0; j < k; ++j) {
      closed.push_back(t.nodes[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])].class_name);
      closed_idx.insert(order[static_cast<std::size_t>(j)]);
    }

    struct Row {
      std::string name;
      long long total;
    };
    std::vector<Row> rows;
    for (int i = 0; i < n; ++i) {
      if (closed_idx.count(i)) continue;
      long long total = 0;
      for (int c : closed_idx) total += oracle::bfs_tree_distance(t, i, c);
      rows.push_back({t.nodes[static_cast<std::size_t>(i)].class_name, total});
    }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
      if (a.total != b.total) return a.total > b.total;
      return a.name < b.name;
    });

    const int num_easy = g.irange(0, static_cast<int>(rows.size()) / 2);
    const int num_hard = g.irange(0, static_cast<int>(rows.size()) - num_easy);
    const SplitSpec spec = tree_splits(t, closed, num_easy, num_hard);

    std::vector<std::string> expect_easy;
    for (int i = 0; i < num_easy; ++i) expect_easy.push_back(rows[static_cast<std::size_t>(i)].name);
    std::vector<std::string> expect_hard;
    for (std::size_t i = rows.size() - static_cast<std::size_t>(num_hard); i < rows.size(); ++i) {
      expect_hard.push_back(rows[i].name);
    }
    CHECK(spec.easy == expect_easy);
    CHECK(spec.hard == expect_hard);
    CHECK(spec.difficulty.size() == rows.size());
    for (const Row& r : rows) {
      CHECK(spec.difficulty.at(r.name) == static_cast<double>(r.total));
    }
  }
}

TEST_CASE("tree_splits error messages") {
  const SemanticTree t = tree_from({
      {"root", -1, ""}, {"x", 0, "x"}, {"y", 0, "y"}, {"z", 0, "z"},
  });
  CHECK(contains(msg_of([&] { tree_splits(t, {"x"}, -1, 0); }),
                 "bin sizes must be nonnegative"));
  CHECK(contains(msg_of([&] { tree_splits(t, {"x"}, 2, 1); }),
                 "insufficient open classes: requested 2 easy + 1 hard but only 2 are available"));
  CHECK(contains(msg_of([&] { tree_splits(t, {"ghost"}, 1, 1); }),
                 "class in closed set missing from tree: 'ghost'"));
  CHECK(contains(msg_of([&] { tree_splits(t, {"x", "x"}, 1, 0); }),
                 "duplicate class in closed set: 'x'"));
}

// ---------------------------------------------------------------------------
// partition property across schemes
// ---------------------------------------------------------------------------

TEST_CASE("bins partition the open classes on random attribute matrices") {
  oracle::Gen g(39);
  for (int it = 0; it < 150; ++it) {
    const int c = g.irange(3, 10);
    const AttributeMatrix m = random_matrix(g, c, g.irange(1, 5));
    const int k = g.irange(1, c - 1);
    const SplitSpec spec = search_attribute_splits(m, k, 8, static_cast<std::uint64_t>(it));
    std::set<std::string> all;
    std::size_t count = 0;
    for (const auto* bin : {&spec.easy, &spec.medium, &spec.hard}) {
      for (const std::string& name : *bin) {
        all.insert(name);
        ++count;
      }
    }
    CHECK(all.size() == count);  // pairwise disjoint
    CHECK(all.size() == static_cast<std::size_t>(c - k));
    for (const std::string& name : spec.known) CHECK(all.count(name) == 0);
    std::set<std::string> universe(m.class_names.begin(), m.class_names.end());
    for (const std::string& name : all) CHECK(universe.count(name) == 1);
  }
}
