// Copyright 2026 The mpjc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <CLI11.hpp>

#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "mpjc/cli/commands.hpp"
#include "mpjc/cli/config.hpp"
#include "mpjc/error.hpp"

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kNumerical = 3 };

struct Arguments {
  std::string config;
  std::string out;
  unsigned jobs = mpjc::default_jobs();
  std::optional<std::uint64_t> seed;
};

int execute(mpjc::cli::Scenario scenario, const Arguments& args) {
  mpjc::cli::RunConfig cfg = mpjc::cli::load_config(args.config);
  cfg.scenario = scenario;
  if (args.seed) cfg.ensemble.base_seed = *args.seed;
  const mpjc::cli::CommandOutput out = mpjc::cli::run_command(cfg, {args.jobs});
  std::filesystem::create_directories(args.out);
  for (const auto& [name, table] : out) {
    const std::filesystem::path path = std::filesystem::path(args.out) / name;
    mpjc::cli::write_csv(path, table);
    std::cout << path.string() << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiphoton joint-cavity emission: resonances, dynamics and correlations"};
  app.set_version_flag("--version", std::string(MPJC_VERSION));
  app.require_subcommand(1);

  Arguments args;
  std::optional<mpjc::cli::Scenario> chosen;
  for (mpjc::cli::Scenario sc :
       {mpjc::cli::Scenario::resonance, mpjc::cli::Scenario::rabi, mpjc::cli::Scenario::sweep,
        mpjc::cli::Scenario::g2tau, mpjc::cli::Scenario::trajectory}) {
    CLI::App* sub = app.add_subcommand(mpjc::cli::to_string(sc));
    sub->add_option("--config", args.config, "JSON run configuration (or a CSV written by mpjc)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", args.out, "output directory")->required();
    sub->add_option("--jobs", args.jobs, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", args.seed, "base seed for trajectory i = seed + i");
    sub->callback([&chosen, sc] { chosen = sc; });
  }
  app.get_subcommand("resonance")->description("resonance positions and effective coupling");
  app.get_subcommand("rabi")->description("closed-system super-Rabi oscillation");
  app.get_subcommand("sweep")->description("steady-state distributions and correlations vs delta_a");
  app.get_subcommand("g2tau")->description("delayed second-order and bundle correlations");
  app.get_subcommand("trajectory")->description("quantum-jump ensemble populations and jump record");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    return execute(*chosen, args);
  } catch (const mpjc::ConfigError& e) {
    std::cerr << "mpjc: configuration error: " << e.what() << '\n';
    return kConfig;
  } catch (const mpjc::DimensionError& e) {
    std::cerr << "mpjc: dimension error: " << e.what() << '\n';
    return kConfig;
  } catch (const mpjc::NumericalError& e) {
    std::cerr << "mpjc: numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "mpjc: " << e.what() << '\n';
    return kFailure;
  }
}
