#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "jolopt/log.hpp"
#include "output.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> jobs;
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--out", flags.out, "Output directory")->capture_default_str();
  cmd->add_option("--seed", flags.seed, "Seed override");
  cmd->add_option("--jobs", flags.jobs, "Parallel runs (default: all cores)");
  cmd->add_option("--set", flags.sets, "Override a config field, key.path=value");
}

jolopt::cli::RunConfig load(const CommonFlags& flags,
                            const std::optional<std::string>& default_problem = std::nullopt) {
  std::vector<std::string> sets = flags.sets;
  if (flags.seed) sets.push_back("seed=" + std::to_string(*flags.seed));
  if (flags.jobs) sets.push_back("jobs=" + std::to_string(*flags.jobs));
  std::optional<std::filesystem::path> path;
  if (!flags.config.empty()) path = flags.config;
  return jolopt::cli::load_config(path, sets, default_problem);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace jolopt::cli;
  jolopt::log::configure_from_env();

  CLI::App app{"jolopt: joint learning and optimization runs, grids and sweeps"};
  app.require_subcommand(1);

  CommonFlags run_flags, grid_flags, sweep_flags;
  auto* run = app.add_subcommand("run", "Run the solver once");
  add_common(run, run_flags);
  auto* grid = app.add_subcommand("grid", "Run a (Q, R) x gamma0 grid");
  add_common(grid, grid_flags);
  auto* sweep = app.add_subcommand("sweep-opf", "Weighted-sum sweep on the dispatch problem");
  add_common(sweep, sweep_flags);

  std::string gen_kind;
  std::string gen_out = "out";
  std::optional<std::uint64_t> gen_seed;
  std::vector<std::string> gen_sets;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset");
  gen->add_option("kind", gen_kind, "logit or opf")->required()->check(CLI::IsMember({"logit", "opf"}));
  gen->add_option("--out", gen_out, "Output directory")->capture_default_str();
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("--set", gen_sets, "Generator field, key=value (e.g. products=50)");

  std::string hv_archive;
  std::vector<std::string> hv_exclude;
  double hv_margin = 0.1;
  auto* hv = app.add_subcommand("hv", "Hypervolume of an archive.csv");
  hv->add_option("archive", hv_archive, "archive.csv written by sweep-opf")
      ->required()
      ->check(CLI::ExistingFile);
  hv->add_option("--exclude", hv_exclude, "Tag to drop before normalizing");
  hv->add_option("--margin", hv_margin, "Reference point margin")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  return guarded(
      [&]() -> int {
        if (*run) return cmd_run(load(run_flags), run_flags.out, std::cout);
        if (*grid) return cmd_grid(load(grid_flags), grid_flags.out, std::cout);
        if (*sweep) return cmd_sweep_opf(load(sweep_flags, "opf"), sweep_flags.out, std::cout);
        if (*gen) {
          std::vector<std::string> sets{std::string("problem=") +
                                        (gen_kind == "logit" ? "retail" : "opf")};
          for (const auto& s : gen_sets) sets.push_back("generate." + s);
          if (gen_seed) sets.push_back("generate.seed=" + std::to_string(*gen_seed));
          return cmd_gen(load_config(std::nullopt, sets), gen_kind, gen_out, std::cout);
        }
        std::cout << fmt(archive_hypervolume(hv_archive, hv_exclude, hv_margin)) << '\n';
        return kExitOk;
      },
      std::cerr);
}
