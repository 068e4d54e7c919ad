// oseval: command-line front end for the open-set recognition evaluation
// library. Subcommands: score, eval, splits-attr, splits-hier, splits-tree,
// correlate, synth.
//
// Exit codes: 0 success, 1 usage error, 2 data/validation error, 3 internal
// error. Reports go to standard output, data files to -o paths, diagnostics
// to standard error. All randomness flows through an explicit --seed flag.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "osr/analysis.hpp"
#include "osr/metrics.hpp"
#include "osr/runio.hpp"
#include "osr/scoring.hpp"
#include "osr/splits.hpp"
#include "osr/synth.hpp"
#include "osr/text.hpp"

namespace {

constexpr int kExitSuccess = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw osr::DataError("cannot open input file '" + path + "'");
  return in;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw osr::DataError("cannot open output file '" + path + "'");
  out << content;
  out.flush();
  if (!out) throw osr::DataError("failed writing output file '" + path + "'");
}

osr::ScoreVector compute_scores(const osr::EvaluationRun& run, osr::ScoreRule rule) {
  switch (rule) {
    case osr::ScoreRule::msp:
      return osr::msp_scores(run);
    case osr::ScoreRule::mls:
      return osr::mls_scores(run);
    case osr::ScoreRule::feature_norm:
      return osr::feature_norm_scores(run);
  }
  throw std::logic_error("unhandled score rule");
}

std::string score_csv(const osr::EvaluationRun& run, const osr::ScoreVector& sv) {
  std::string out = "sample_id,label,score,prediction\n";
  for (std::size_t i = 0; i < run.samples.size(); ++i) {
    out += run.samples[i].id;
    out += ',';
    out += std::to_string(run.samples[i].label);
    out += ',';
    out += osr::format_double(sv.scores[i]);
    out += ',';
    out += std::to_string(sv.predictions[i]);
    out += '\n';
  }
  return out;
}

osr::MetricsReport build_report(const osr::EvaluationRun& run, osr::ScoreRule rule,
                                int num_unknown_classes, bool curves) {
  const osr::ScoreVector sv = compute_scores(run, rule);
  osr::MetricsReport report;
  report.rule = std::string(osr::to_string(rule));
  report.accuracy = osr::accuracy(run, sv.predictions);
  std::vector<double> known;
  std::vector<double> unknown;
  osr::split_scores(run, sv.scores, known, unknown);
  if (unknown.empty()) {
    std::cerr << "warning: run has no unknown samples; auroc, oscr and ap are null\n";
  } else {
    report.auroc = osr::auroc(known, unknown);
    const osr::OscrResult o = osr::oscr(run, sv);
    report.oscr = o.area;
    report.ap = osr::average_precision(known, unknown);
    if (curves) {
      report.roc_points = osr::roc_curve(known, unknown).points;
      report.oscr_points = o.curve.points;
    }
  }
  report.openness = osr::openness(run.num_classes, num_unknown_classes);
  return report;
}

std::vector<std::string> load_known(const std::string& inline_list,
                                    const std::string& file_path) {
  std::vector<std::string> out;
  if (!inline_list.empty()) {
    for (std::string_view field : osr::split_fields(inline_list)) {
      if (!field.empty()) out.emplace_back(field);
    }
  } else {
    std::ifstream in = open_input(file_path);
    for (auto& line : osr::read_lines(in)) {
      if (!line.empty()) out.push_back(std::move(line));
    }
  }
  if (out.empty()) throw osr::DataError("closed class set is empty");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Open-set recognition evaluation toolkit"};
  app.set_version_flag("--version", std::string(OSEVAL_VERSION));
  app.require_subcommand(1);

  const std::vector<std::string> rule_names = {"msp", "mls", "norm", "feature_norm"};

  // score
  auto* score_cmd = app.add_subcommand("score", "Score a run file and write a score CSV");
  std::string score_run_path, score_rule, score_out;
  score_cmd->add_option("run", score_run_path, "Run CSV file")->required();
  score_cmd->add_option("--rule", score_rule, "Scoring rule")
      ->required()
      ->check(CLI::IsMember(rule_names));
  score_cmd->add_option("-o,--output", score_out, "Output score CSV path")->required();

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a run file; report JSON on stdout");
  std::string eval_run_path, eval_rule;
  int eval_unknown_classes = 0;
  bool eval_curves = false;
  eval_cmd->add_option("run", eval_run_path, "Run CSV file")->required();
  eval_cmd->add_option("--rule", eval_rule, "Scoring rule")
      ->required()
      ->check(CLI::IsMember(rule_names));
  eval_cmd
      ->add_option("--num-unknown-classes", eval_unknown_classes,
                   "Number of unknown classes behind the unknown samples (for openness)")
      ->check(CLI::NonNegativeNumber);
  eval_cmd->add_flag("--curves", eval_curves, "Include ROC and OSCR curve points");

  // splits-attr
  auto* sattr_cmd = app.add_subcommand(
      "splits-attr", "Search a known/unknown split over an attribute matrix");
  std::string sattr_matrix, sattr_out;
  int sattr_known = 0;
  int sattr_threads = 1;
  std::uint64_t sattr_samples = 0;
  std::uint64_t sattr_seed = 0;
  sattr_cmd->add_option("--matrix", sattr_matrix, "Class-attribute CSV")->required();
  sattr_cmd->add_option("--num-known", sattr_known, "Number of known (closed-set) classes")
      ->required();
  sattr_cmd->add_option("--samples", sattr_samples, "Number of random subsets to score")
      ->required();
  sattr_cmd->add_option("--seed", sattr_seed, "PRNG seed (required; no default)")->required();
  sattr_cmd->add_option("--threads", sattr_threads, "Worker threads (result is unaffected)");
  sattr_cmd->add_option("-o,--output", sattr_out, "Output split JSON path")->required();

  // splits-hier
  auto* shier_cmd = app.add_subcommand(
      "splits-hier", "Bin open classes by hierarchy rules (cars or aircraft)");
  std::string shier_table, shier_scheme, shier_known, shier_known_file, shier_out;
  shier_cmd->add_option("--table", shier_table, "Hierarchy CSV")->required();
  shier_cmd->add_option("--scheme", shier_scheme, "Hierarchy scheme")
      ->required()
      ->check(CLI::IsMember({"cars", "aircraft"}));
  auto* shier_known_opt =
      shier_cmd->add_option("--known", shier_known, "Comma-separated known class names");
  auto* shier_known_file_opt = shier_cmd->add_option(
      "--known-file", shier_known_file, "File with one known class name per line");
  shier_known_opt->excludes(shier_known_file_opt);
  shier_cmd->add_option("-o,--output", shier_out, "Output split JSON path")->required();

  // splits-tree
  auto* stree_cmd = app.add_subcommand(
      "splits-tree", "Bin open classes by semantic-tree distance to the closed set");
  std::string stree_tree, stree_known, stree_known_file, stree_out;
  int stree_easy = 0, stree_hard = 0;
  stree_cmd->add_option("--tree", stree_tree, "Semantic tree JSON")->required();
  auto* stree_known_opt =
      stree_cmd->add_option("--known", stree_known, "Comma-separated known class names");
  auto* stree_known_file_opt = stree_cmd->add_option(
      "--known-file", stree_known_file, "File with one known class name per line");
  stree_known_opt->excludes(stree_known_file_opt);
  stree_cmd->add_option("--num-easy", stree_easy, "Open classes most distant from the closed set")
      ->required();
  stree_cmd->add_option("--num-hard", stree_hard, "Open classes nearest to the closed set")
      ->required();
  stree_cmd->add_option("-o,--output", stree_out, "Output split JSON path")->required();

  // correlate
  auto* corr_cmd = app.add_subcommand(
      "correlate", "Correlate closed-set accuracy with open-set AUROC across runs");
  std::string corr_path, corr_aggregate;
  bool corr_table = false;
  corr_cmd->add_option("summaries", corr_path, "Summary CSV file")->required();
  corr_cmd->add_flag("--table", corr_table, "Plain-text table instead of JSON");
  corr_cmd
      ->add_option("--aggregate", corr_aggregate,
                   "Print per-group mean/std table for this field instead of correlation")
      ->check(CLI::IsMember({"method", "dataset"}));

  // synth
  auto* synth_cmd = app.add_subcommand(
      "synth", "Generate a deterministic synthetic run file");
  osr::SynthConfig synth_cfg;
  std::string synth_out;
  synth_cmd->add_option("--classes", synth_cfg.num_classes, "Known classes C");
  synth_cmd->add_option("--dim", synth_cfg.feature_dim, "Feature dimension D");
  synth_cmd->add_option("--per-class", synth_cfg.samples_per_class, "Known samples per class");
  synth_cmd->add_option("--unknown", synth_cfg.unknown_samples, "Unknown samples");
  synth_cmd->add_option("--mu-known", synth_cfg.known_norm_mean, "Known-class mean norm");
  synth_cmd->add_option("--mu-unknown", synth_cfg.unknown_norm_mean, "Unknown mean norm");
  synth_cmd->add_option("--angular-noise", synth_cfg.angular_noise,
                        "Direction perturbation scale");
  synth_cmd->add_option("--norm-noise", synth_cfg.norm_noise, "Radial noise scale");
  synth_cmd->add_option("--seed", synth_cfg.seed, "PRNG seed (required; no default)")
      ->required();
  synth_cmd->add_option("-o,--output", synth_out, "Output run CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the error message
    return code == 0 ? kExitSuccess : kExitUsage;
  }

  try {
    if (score_cmd->parsed()) {
      std::ifstream in = open_input(score_run_path);
      const osr::EvaluationRun run = osr::parse_run(in);
      const osr::ScoreVector sv = compute_scores(run, osr::score_rule_from_string(score_rule));
      write_file(score_out, score_csv(run, sv));
      return kExitSuccess;
    }
    if (eval_cmd->parsed()) {
      std::ifstream in = open_input(eval_run_path);
      const osr::EvaluationRun run = osr::parse_run(in);
      const osr::MetricsReport report = build_report(
          run, osr::score_rule_from_string(eval_rule), eval_unknown_classes, eval_curves);
      std::cout << osr::write_report_text(report);
      return kExitSuccess;
    }
    if (sattr_cmd->parsed()) {
      std::ifstream in = open_input(sattr_matrix);
      const osr::AttributeMatrix m = osr::parse_attribute_matrix(in);
      const osr::SplitSpec spec = osr::search_attribute_splits(
          m, sattr_known, sattr_samples, sattr_seed, sattr_threads);
      write_file(sattr_out, osr::write_split_text(spec));
      return kExitSuccess;
    }
    if (shier_cmd->parsed()) {
      if (shier_known.empty() && shier_known_file.empty()) {
        std::cerr << "splits-hier: exactly one of --known or --known-file is required\n";
        return kExitUsage;
      }
      const osr::HierarchyScheme scheme = osr::hierarchy_scheme_from_string(shier_scheme);
      std::ifstream in = open_input(shier_table);
      const osr::HierarchyTable table = osr::parse_hierarchy_table(in, scheme);
      const osr::SplitSpec spec =
          osr::hierarchy_splits(table, scheme, load_known(shier_known, shier_known_file));
      write_file(shier_out, osr::write_split_text(spec));
      return kExitSuccess;
    }
    if (stree_cmd->parsed()) {
      if (stree_known.empty() && stree_known_file.empty()) {
        std::cerr << "splits-tree: exactly one of --known or --known-file is required\n";
        return kExitUsage;
      }
      std::ifstream in = open_input(stree_tree);
      const osr::SemanticTree tree = osr::parse_semantic_tree(in);
      const osr::SplitSpec spec = osr::tree_splits(
          tree, load_known(stree_known, stree_known_file), stree_easy, stree_hard);
      write_file(stree_out, osr::write_split_text(spec));
      return kExitSuccess;
    }
    if (corr_cmd->parsed()) {
      std::ifstream in = open_input(corr_path);
      const std::vector<osr::RunSummary> summaries = osr::parse_run_summaries(in);
      if (!corr_aggregate.empty()) {
        std::cout << osr::aggregate_table(osr::aggregate(summaries, corr_aggregate),
                                          corr_aggregate);
        return kExitSuccess;
      }
      const osr::CorrelationReport report = osr::correlation_report(summaries);
      for (const osr::CorrelationGroup& g : report.per_method) {
        if (g.rho) continue;
        if (g.count < 2) {
          std::cerr << "notice: method '" << g.method
                    << "' has fewer than 2 runs; rho reported as n/a\n";
        } else {
          std::cerr << "notice: method '" << g.method
                    << "' has a constant series; rho reported as n/a\n";
        }
      }
      std::cout << (corr_table ? osr::correlation_report_table(report)
                               : osr::correlation_report_json(report));
      return kExitSuccess;
    }
    if (synth_cmd->parsed()) {
      const osr::SynthResult result = osr::generate_run(synth_cfg);
      if (result.clamped_norms > 0) {
        std::cerr << "note: clamped " << result.clamped_norms
                  << " sample norm(s) at the 1e-06 floor\n";
      }
      write_file(synth_out, osr::write_run_text(result.run));
      return kExitSuccess;
    }
    std::cerr << "no subcommand selected\n";
    return kExitUsage;
  } catch (const osr::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
