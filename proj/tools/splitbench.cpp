#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "splitbench/commands.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> profile;
  std::optional<std::string> out;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config, "JSON run configuration")->required();
  cmd->add_option("--seed", flags.seed, "base sampler seed");
  cmd->add_option("--profile", flags.profile, "sampler profile")
      ->check(CLI::IsMember({"desk", "paper"}));
  cmd->add_option("--out", flags.out, "output directory");
}

splitbench::RunConfig resolve(const CommonFlags& flags) {
  auto cfg = splitbench::load_config(flags.config);
  if (flags.profile) cfg.apply_profile(*flags.profile);
  if (flags.seed) cfg.sampler.seed = *flags.seed;
  if (flags.out) cfg.out_dir = *flags.out;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"splitbench: readability predictors, Bayesian preference model and WAIC ablation"};
  app.require_subcommand(1);

  CommonFlags flags;
  splitbench::AblateOptions ablate_opts;
  std::string predictor_list;

  auto* extract = app.add_subcommand("extract", "compute per-(triple, side) text features");
  auto* fit = app.add_subcommand("fit", "fit the full logistic model by HMC");
  auto* ablate = app.add_subcommand("ablate", "leave-one-predictor-out WAIC comparison");
  auto* report = app.add_subcommand("report", "preference tallies and quality-score tables");
  for (auto* cmd : {extract, fit, ablate, report}) add_common(cmd, flags);
  ablate->add_flag("--reduced", ablate_opts.reduced,
                   "use grammar, split, ease, fk_grade, meaning, fluency");
  ablate->add_option("--predictors", predictor_list, "comma-separated predictor list");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : splitbench::kValidation;
  }

  return splitbench::run_guarded(
      [&]() -> int {
        const auto cfg = resolve(flags);
        if (extract->parsed()) return splitbench::cmd_extract(cfg, std::cout);
        if (fit->parsed()) return splitbench::cmd_fit(cfg, std::cout);
        if (report->parsed()) return splitbench::cmd_report(cfg, std::cout);
        if (!predictor_list.empty()) {
          std::string item;
          for (char ch : predictor_list + ",") {
            if (ch == ',') {
              if (!item.empty()) ablate_opts.predictors.push_back(item);
              item.clear();
            } else if (ch != ' ') {
              item += ch;
            }
          }
        }
        return splitbench::cmd_ablate(cfg, ablate_opts, std::cout);
      },
      std::cerr);
}
