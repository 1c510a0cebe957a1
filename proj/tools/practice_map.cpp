// practice_map command line: staged and end-to-end practice mapping runs.
//
// Exit codes: 0 success, 1 configuration error, 2 input error, 3 internal error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "practice_map/pipeline.hpp"
#include "practice_map/practice_map.hpp"

namespace pm = practice_map;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitInput = 2;
constexpr int kExitInternal = 3;

struct StageArgs {
  std::string config;
  std::vector<std::string> overrides;
  std::string output_dir;
};

void add_stage_options(CLI::App* cmd, StageArgs& args) {
  cmd->add_option("-c,--config", args.config, "INI run configuration")->required();
  cmd->add_option("--set", args.overrides, "Override a config key, e.g. similarity.min_weight=0.7");
  cmd->add_option("-o,--output-dir", args.output_dir,
                  std::string("Output directory (overrides ") + pm::kOutputDirEnv + " and the config)");
}

pm::RunConfig resolve_config(const StageArgs& args) {
  pm::RunConfig cfg = pm::load_config(args.config, args.overrides);
  if (!args.output_dir.empty()) {
    cfg.output_dir = args.output_dir;
  } else if (const char* env = std::getenv(pm::kOutputDirEnv); env && *env) {
    cfg.output_dir = env;
  }
  return cfg;
}

std::vector<int> parse_groups(const std::string& text) {
  std::vector<int> sizes;
  for (const auto& item : pm::csv::split(text, ',')) {
    auto v = pm::parse_int<int>(item);
    if (!v) throw pm::ConfigError("--groups expects comma-separated sizes, got '" + text + "'");
    sizes.push_back(*v);
  }
  return sizes;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Practice mapping: similarity networks of account interaction practices"};
  app.require_subcommand(1);

  StageArgs stage;
  auto* run = app.add_subcommand("run", "Run every stage and write all outputs plus report.json");
  auto* vectorize = app.add_subcommand("vectorize", "Build practice vectors -> vectors.csv");
  auto* similarity = app.add_subcommand("similarity", "vectors.csv -> edges.csv (Source,Target,Weight)");
  auto* cluster = app.add_subcommand("cluster", "vectors.csv + edges.csv -> clusters, nodes, archetypes");
  auto* metrics = app.add_subcommand("metrics", "clusters + interactions -> E-I, temporal, targets");
  for (auto* cmd : {run, vectorize, similarity, cluster, metrics}) add_stage_options(cmd, stage);

  pm::PolarizedScenario scenario;
  std::string groups = "5,5";
  std::string synth_out = "-";
  std::string synth_delim = "comma";
  auto* synth = app.add_subcommand("synth", "Write a synthetic polarized interactions file");
  synth->add_option("--groups", groups, "Comma-separated group sizes")->capture_default_str();
  synth->add_option("--repetitions", scenario.repetitions, "Interactions per (author, target)")
      ->capture_default_str();
  synth->add_option("--in-type", scenario.in_group_type, "In-group interaction type")->capture_default_str();
  synth->add_option("--out-type", scenario.out_group_type, "Out-group interaction type")
      ->capture_default_str();
  synth->add_option("--output", synth_out, "Output file, '-' for stdout")->capture_default_str();
  synth->add_option("--delimiter", synth_delim, "comma or tab")->capture_default_str();

  std::string validate_input;
  std::string validate_aspect;
  std::string validate_delim = "comma";
  auto* validate = app.add_subcommand("validate", "Check an input file and print a JSON summary");
  validate->add_option("input", validate_input, "Interactions or attributes file")->required();
  validate->add_option("--aspect", validate_aspect, "Treat the file as attributes of this aspect");
  validate->add_option("--delimiter", validate_delim, "comma or tab")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (run->parsed()) {
      const auto summary = pm::run_pipeline(resolve_config(stage));
      std::cout << "wrote";
      for (const auto& f : summary.files) std::cout << ' ' << f;
      std::cout << "\nedges.csv is undirected: import it into Gephi as an undirected network\n";
    } else if (vectorize->parsed()) {
      pm::run_vectorize_stage(resolve_config(stage));
    } else if (similarity->parsed()) {
      pm::run_similarity_stage(resolve_config(stage));
    } else if (cluster->parsed()) {
      pm::run_cluster_stage(resolve_config(stage));
    } else if (metrics->parsed()) {
      pm::run_metrics_stage(resolve_config(stage));
    } else if (synth->parsed()) {
      scenario.group_sizes = parse_groups(groups);
      const auto format = pm::delimiter_from_name(synth_delim);
      const auto records = pm::generate_polarized(scenario);
      if (synth_out == "-") {
        pm::write_interactions(std::cout, records, format);
      } else {
        std::ofstream out(synth_out, std::ios::binary);
        if (!out) throw pm::InputError("cannot write " + synth_out);
        pm::write_interactions(out, records, format);
      }
    } else if (validate->parsed()) {
      const auto format = pm::delimiter_from_name(validate_delim);
      std::ifstream in(validate_input, std::ios::binary);
      if (!in) throw pm::InputError("cannot open " + validate_input);
      pm::ValidationReport report;
      if (validate_aspect.empty()) {
        report = pm::validation_report(pm::parse_interactions(in, format));
      } else {
        report = pm::validation_report(pm::parse_attributes(in, validate_aspect, format));
      }
      std::cout << pm::validation_json(report).dump(2) << '\n';
    }
  } catch (const pm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const pm::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return 0;
}
