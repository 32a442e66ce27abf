// Command-line front end: build-verifier, synthesize, evaluate.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "algo/errors.hpp"
#include "algo/workspace.hpp"

namespace fs = std::filesystem;

namespace {

struct Overrides {
  std::string config;
  std::string corpus;
  std::string workspace;
  std::optional<std::uint64_t> seed;
  bool replay = false;
  bool record = false;
  bool live = false;
  std::optional<int> suite_size;
  std::vector<int> ks;
  std::vector<int> suite_sizes;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "run config (JSON)");
  cmd->add_option("--corpus", o.corpus, "problem corpus directory or file");
  cmd->add_option("--workspace", o.workspace, "workspace directory");
  cmd->add_option("--seed", o.seed, "master seed");
  auto* replay = cmd->add_flag("--replay", o.replay, "answer from the transcript store only");
  auto* record = cmd->add_flag("--record", o.record, "call the model and store transcripts");
  auto* live = cmd->add_flag("--live", o.live, "call the model without storing transcripts");
  replay->excludes(record)->excludes(live);
  record->excludes(live);
  cmd->add_option("--suite-size", o.suite_size, "generated cases per problem");
  cmd->add_option("--k", o.ks, "k values for pass@k")->delimiter(',');
  cmd->add_option("--suite-sizes", o.suite_sizes, "suite prefix sizes for the sweep")->delimiter(',');
}

algo::RunConfig resolve_config(const Overrides& o) {
  algo::RunConfig c;
  if (!o.config.empty()) c = algo::load_run_config(o.config);
  if (!o.corpus.empty()) c.corpus_path = fs::absolute(o.corpus);
  if (!o.workspace.empty()) c.workspace_path = fs::absolute(o.workspace);
  if (o.seed) c.seed = *o.seed;
  if (o.replay) c.mode = algo::GatewayMode::Replay;
  if (o.record) c.mode = algo::GatewayMode::Record;
  if (o.live) c.mode = algo::GatewayMode::Live;
  if (o.suite_size) c.suite_size = *o.suite_size;
  if (!o.ks.empty()) c.ks = o.ks;
  if (!o.suite_sizes.empty()) c.suite_sizes = o.suite_sizes;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verifier-guided program synthesis harness"};
  app.require_subcommand(1);
  Overrides o;
  auto* build = app.add_subcommand("build-verifier", "generate oracles, input tools and test suites");
  auto* synth = app.add_subcommand("synthesize", "generate, verify and rank candidate programs");
  auto* eval = app.add_subcommand("evaluate", "judge candidates and write reports");
  for (auto* cmd : {build, synth, eval}) add_common(cmd, o);

  CLI11_PARSE(app, argc, argv);

  try {
    algo::RunConfig config = resolve_config(o);
    if (build->parsed()) return algo::cmd_build_verifier(config, std::cout);
    if (synth->parsed()) return algo::cmd_synthesize(config, std::cout);
    return algo::cmd_evaluate(config, std::cout);
  } catch (const algo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
  } catch (const algo::SchemaError& e) {
    std::cerr << "corpus error: " << e.what() << "\n";
  } catch (const algo::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return 2;
}
