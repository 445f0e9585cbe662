// disquo: run crosspoint-switch experiments and the self-check suite.
//
//   disquo simulate <config.json> [--seed U64] [--out PATH]
//   disquo sweep <config.json> [--seed U64] [--out PATH] [--jobs INT]
//   disquo verify [--level fast|full]
//
// Exit codes: 0 success, 1 verification or run failure, 2 configuration error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "disquo/experiment.hpp"
#include "disquo/verify.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kConfigError = 2;

int emit(const disquo::experiment::ExperimentConfig& cfg, const std::vector<disquo::experiment::ReportRow>& rows,
         const std::string& out_flag) {
  const std::string path = !out_flag.empty() ? out_flag : cfg.output_path.value_or("");
  if (path.empty() || path == "-") {
    disquo::experiment::write_csv(std::cout, rows);
  } else {
    std::ofstream os(path, std::ios::binary);
    if (!os) {
      std::cerr << "error: cannot open " << path << " for writing\n";
      return kFailed;
    }
    disquo::experiment::write_csv(os, rows);
    if (!os.flush()) {
      std::cerr << "error: write to " << path << " failed\n";
      return kFailed;
    }
  }
  int code = kOk;
  for (const auto& r : rows)
    if (r.error) {
      std::cerr << "point " << r.scheduler << " load=" << r.load << " seed=" << r.seed << " failed: " << *r.error
                << '\n';
      code = kFailed;
    }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crosspoint-buffered switch scheduling simulator"};
  app.require_subcommand(1);

  std::string config_path, out_path, level = "fast", mutate = "none";
  std::optional<std::uint64_t> seed;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  auto* simulate = app.add_subcommand("simulate", "Run a single configuration point");
  simulate->add_option("config", config_path, "JSON config file")->required();
  simulate->add_option("--seed", seed, "Seed (overrides switch.seed)");
  simulate->add_option("--out", out_path, "CSV output path (default: output.path or stdout)");

  auto* sweep = app.add_subcommand("sweep", "Run the cartesian product of the list-valued keys");
  sweep->add_option("config", config_path, "JSON config file")->required();
  sweep->add_option("--seed", seed, "Seed (overrides switch.seed)");
  sweep->add_option("--out", out_path, "CSV output path (default: output.path or stdout)");
  sweep->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify", "Check the chain mathematics on small switches");
  verify->add_option("--level", level, "fast or full")->check(CLI::IsMember({"fast", "full"}));
  verify->add_option("--mutate", mutate, "Deliberately break a formula (self-test of the suite)")
      ->check(CLI::IsMember({"none", "flip-product-form-sign"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  using namespace disquo;
  if (verify->parsed()) {
    const auto report = verify::run(level == "full" ? verify::Level::full : verify::Level::fast,
                                    mutate == "none" ? verify::Mutation::none : verify::Mutation::flip_product_form_sign);
    for (const auto& c : report.checks)
      std::printf("%s %-32s %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
    return report.all_passed() ? kOk : kFailed;
  }

  experiment::ExperimentConfig cfg;
  std::vector<experiment::PointConfig> points;
  try {
    cfg = experiment::load_config(config_path);
    if (seed) cfg.seeds = {*seed};
    points = cfg.expand();
    if (simulate->parsed() && points.size() != 1)
      throw ConfigError("simulate takes a single point; use sweep for list-valued keys");
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  const auto rows = experiment::run_points(points, simulate->parsed() ? 1 : jobs);
  return emit(cfg, rows, out_path);
}
