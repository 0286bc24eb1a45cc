#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "chanorder/commands.hpp"

using namespace chanorder;

int main(int argc, char** argv) {
  CLI::App app{"Compare finite channels: Blackwell order, more-capable order, unique information"};
  app.require_subcommand(1);

  int code = kExitOk;

  CompareArgs compare_args;
  bool uniform = false;
  auto* compare = app.add_subcommand("compare", "Test the Blackwell order between two channels");
  compare->add_option("first", compare_args.first, "First channel file")->required();
  compare->add_option("second", compare_args.second, "Second channel file")->required();
  auto* prior_opt = compare->add_option("--prior", compare_args.prior,
                                        "Prior used for separating decision problems");
  compare->add_flag("--uniform", uniform, "Use the uniform prior (default)")->excludes(prior_opt);
  compare->callback([&] { code = cmd_compare(compare_args, std::cout, std::cerr); });

  DecideArgs decide_args;
  auto* decide = app.add_subcommand("decide", "Solve a decision problem for one channel");
  decide->add_option("channel", decide_args.channel)->required();
  decide->add_option("prior", decide_args.prior)->required();
  decide->add_option("utility", decide_args.utility)->required();
  decide->callback([&] { code = cmd_decide(decide_args, std::cout, std::cerr); });

  UiArgs ui_args;
  auto* ui = app.add_subcommand("ui", "Unique information of a joint distribution");
  auto* joint_opt = ui->add_option("joint", ui_args.joint, "Joint distribution file");
  ui->add_option("--scenario", ui_args.scenario, "Built-in scenario instead of a file")
      ->excludes(joint_opt);
  ui->add_option("--direction", ui_args.direction)
      ->check(CLI::IsMember({"both", "x1", "x2"}))
      ->capture_default_str();
  ui->add_option("--tolerance", ui_args.tolerance, "Duality-gap tolerance in bits")
      ->capture_default_str();
  ui->add_option("--max-iterations", ui_args.max_iterations)->capture_default_str();
  ui->callback([&] { code = cmd_ui(ui_args, std::cout, std::cerr); });

  HeatmapArgs heatmap_args;
  auto* heatmap = app.add_subcommand("heatmap", "Write a UI grid over a scenario family as CSV");
  heatmap->add_option("--family", heatmap_args.family)
      ->required()
      ->check(CLI::IsMember({"and-grid", "and-det"}));
  heatmap->add_option("--resolution", heatmap_args.resolution)->capture_default_str();
  heatmap->add_option("--out", heatmap_args.out)->required();
  heatmap->add_option("--tolerance", heatmap_args.tolerance)->capture_default_str();
  heatmap->add_option("--threads", heatmap_args.threads, "Worker threads (0 = all cores)");
  heatmap->callback([&] { code = cmd_heatmap(heatmap_args, std::cout, std::cerr); });

  ExampleArgs example_args;
  auto* example = app.add_subcommand("example", "Print a built-in scenario and re-check its values");
  example->add_option("--name", example_args.name)->required();
  example->add_option("--out", example_args.out_dir, "Also write the tables into this directory");
  example->callback([&] { code = cmd_example(example_args, std::cout, std::cerr); });

  CapacityArgs capacity_args;
  auto* cap = app.add_subcommand("capacity", "Channel capacity by Blahut-Arimoto");
  cap->add_option("channel", capacity_args.channel)->required();
  cap->add_option("--tolerance", capacity_args.tolerance)->capture_default_str();
  cap->callback([&] { code = cmd_capacity(capacity_args, std::cout, std::cerr); });

  MoreCapableArgs mc_args;
  auto* mc = app.add_subcommand("more-capable",
                                "Search for a prior where the second channel carries less information");
  mc->add_option("first", mc_args.first)->required();
  mc->add_option("second", mc_args.second)->required();
  mc->add_option("--grid", mc_args.grid)->capture_default_str();
  mc->add_option("--samples", mc_args.samples)->capture_default_str();
  mc->add_option("--seed", mc_args.seed)->capture_default_str();
  mc->callback([&] { code = cmd_more_capable(mc_args, std::cout, std::cerr); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInputError;
  }
  return code;
}
