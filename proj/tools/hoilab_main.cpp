#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "hoi/error.hpp"
#include "hoi/sim/env.hpp"
#include "hoi/sim/trajlog.hpp"

namespace {

// exit codes: 0 ok, 2 usage/config error, 3 runtime fault
constexpr int kOkExit = 0;
constexpr int kUsageExit = 2;
constexpr int kFaultExit = 3;

int run_replay(const std::string& task_name, double seconds, unsigned seed,
               const std::string& out_path, bool with_ref) {
  hoi::sim::EnvConfig cfg;
  cfg.task = hoi::sim::task_from_string(task_name);
  cfg.episode_s = seconds;
  cfg.randomize = seed != 0;
  hoi::sim::Env env(cfg);
  env.reset(seed);

  std::vector<hoi::sim::TrajFrame> frames;
  frames.push_back(hoi::sim::capture_frame(env, with_ref));
  while (true) {
    std::vector<double> action(hoi::sim::kNumJoints, 0.0);  // track the reference
    const hoi::sim::EnvStepResult r = env.step(action);
    hoi::sim::TrajFrame f = hoi::sim::capture_frame(env, with_ref);
    f.rewards.emplace_back("total", r.reward.total);
    frames.push_back(std::move(f));
    if (r.terminated || r.truncated) {
      std::fprintf(stderr, "replay: %s after %d frames (t=%.2f s)\n",
                   r.terminated ? "terminated" : "truncated", env.frame(),
                   env.time());
      break;
    }
  }
  hoi::sim::write_trajectory(out_path, frames);
  std::fprintf(stderr, "replay: wrote %zu frames to %s\n", frames.size(),
               out_path.c_str());
  return kOkExit;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hoilab: humanoid-object interaction lab"};
  app.require_subcommand(1);

  auto* replay = app.add_subcommand(
      "replay", "roll the environment with zero action offsets and dump a trajectory");
  std::string task = "carry_box";
  double seconds = 4.0;
  unsigned seed = 0;
  std::string out_path = "replay.jsonl";
  bool with_ref = false;
  replay->add_option("--task", task, "task name (e.g. carry_box, push_cart)");
  replay->add_option("--seconds", seconds, "episode length in seconds")
      ->check(CLI::PositiveNumber);
  replay->add_option("--seed", seed, "randomization seed (0 = nominal params)");
  replay->add_option("--out", out_path, "output trajectory path (.jsonl)");
  replay->add_flag("--with-ref", with_ref, "include reference snapshots per frame");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOkExit : kUsageExit;
  }

  try {
    if (replay->parsed()) return run_replay(task, seconds, seed, out_path, with_ref);
  } catch (const hoi::ConfigError& e) {
    std::fprintf(stderr, "hoilab: config error: %s\n", e.what());
    return kUsageExit;
  } catch (const hoi::ContractError& e) {
    std::fprintf(stderr, "hoilab: contract violation: %s\n", e.what());
    return kUsageExit;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "hoilab: runtime fault: %s\n", e.what());
    return kFaultExit;
  }
  return kUsageExit;
}
