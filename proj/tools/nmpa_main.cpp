#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "nmpa/config.hpp"
#include "nmpa/gradcheck.hpp"
#include "nmpa/td3.hpp"

namespace fs = std::filesystem;
using namespace nmpa;

namespace {

// Relative output paths are rooted at $NMPA_RUN_ROOT when it is set.
fs::path resolve_out_dir(const std::string& out) {
  fs::path p(out);
  if (p.is_relative()) {
    if (const char* root = std::getenv("NMPA_RUN_ROOT")) p = fs::path(root) / p;
  }
  return p;
}

RunConfig load_config_or_default(const std::string& path) {
  if (path.empty()) {
    RunConfig cfg;
    cfg.validate();
    return cfg;
  }
  return load_run_config(path);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
}

struct CheckpointArgs {
  std::string checkpoint;
  std::string config;
  bool force = false;
};

// Loads a checkpoint and its config, enforcing the config-hash match.
std::pair<RunConfig, LoadedCheckpoint> load_eval_inputs(const CheckpointArgs& args) {
  std::string config_path = args.config;
  if (config_path.empty()) {
    const fs::path sibling = fs::path(args.checkpoint).parent_path() / "config.resolved.json";
    if (!fs::exists(sibling))
      throw std::runtime_error("no --config given and " + sibling.string() + " not found");
    config_path = sibling.string();
  }
  RunConfig cfg = load_run_config(config_path);
  LoadedCheckpoint ckpt = load_checkpoint(args.checkpoint);
  const std::string expected = config_hash(cfg);
  if (ckpt.manifest.config_hash != expected) {
    if (!args.force)
      throw std::runtime_error("config hash mismatch: checkpoint has '" +
                               ckpt.manifest.config_hash + "', config resolves to '" +
                               expected + "' (pass --force to override)");
    std::cerr << "warning: config hash mismatch overridden by --force\n";
  }
  return {std::move(cfg), std::move(ckpt)};
}

int cmd_train(const std::string& config_path, const std::string& out,
              std::optional<int> episodes, std::optional<std::uint64_t> seed, bool resume) {
  RunConfig cfg = load_config_or_default(config_path);
  if (episodes) cfg.train.max_episodes = *episodes;
  if (seed) cfg.seed = *seed;
  cfg.validate();

  const fs::path dir = resolve_out_dir(out);
  fs::create_directories(dir);
  save_run_config((dir / "config.resolved.json").string(), cfg);
  const std::string hash = config_hash(cfg);

  Td3Trainer trainer(cfg.topology, cfg.env, cfg.wmmse(), cfg.model, cfg.train, cfg.seed);
  if (resume) {
    const fs::path last = dir / "checkpoint_last.json";
    if (fs::exists(last)) {
      LoadedCheckpoint ckpt = load_checkpoint(last.string());
      if (ckpt.manifest.config_hash != hash)
        throw std::runtime_error("cannot resume: config hash mismatch in " + last.string());
      trainer.resume_from(ckpt.nets, ckpt.manifest.episode);
      std::cout << "resuming from episode " << ckpt.manifest.episode << "\n";
    }
  }

  std::ofstream report_os(dir / "report.jsonl", resume ? std::ios::app : std::ios::out);
  TrainHooks hooks;
  hooks.on_eval = [&](const Td3Nets& nets, const EvalRecord& rec, bool best) {
    TrainReport one;
    one.records.push_back(rec);
    write_report_jsonl(report_os, one);
    report_os.flush();
    save_checkpoint((dir / "checkpoint_last.json").string(), nets, {hash, rec.episode});
    if (best) save_checkpoint((dir / "checkpoint_best.json").string(), nets, {hash, rec.episode});
    std::cout << "episode " << rec.episode
              << "  eval sum-rate " << rec.mean_episodic_sum_rate
              << "  violations/tx " << rec.mean_violations_per_tx
              << (best ? "  (best)" : "") << "\n";
  };

  const TrainReport report = trainer.train(hooks);
  save_checkpoint((dir / "checkpoint_last.json").string(), trainer.nets(),
                  {hash, report.episodes_run});
  if (report.best_episode >= 0)
    save_checkpoint((dir / "checkpoint_best.json").string(), trainer.nets(),
                    {hash, report.best_episode});

  std::cout << "trained " << report.episodes_run << " episodes, " << report.updates
            << " updates";
  if (report.early_stopped) std::cout << " (early stopped)";
  if (report.best_episode >= 0)
    std::cout << "; best eval " << report.best_eval << " at episode " << report.best_episode;
  std::cout << "\nrun directory: " << dir.string() << "\n";
  return 0;
}

int cmd_eval(const CheckpointArgs& args, std::optional<int> episodes,
             std::optional<int> length, const std::string& out) {
  auto [cfg, ckpt] = load_eval_inputs(args);
  const int n = episodes.value_or(cfg.eval.episodes);
  const int len = length.value_or(cfg.eval.length);

  const fs::path dir = resolve_out_dir(out);
  fs::create_directories(dir);

  const CompareReport report = compare(cfg.topology, cfg.env, cfg.wmmse(), cfg.model,
                                       ckpt.nets.actor, n, len, cfg.seed);
  const ScaleHistogram hist =
      scale_histogram(report.nmpa_runs, cfg.env.b_max, cfg.eval.histogram_bins);

  {
    std::ofstream os(dir / "cumulative.csv");
    write_cumulative_csv(os, report);
  }
  {
    std::ofstream os(dir / "histogram.csv");
    write_histogram_csv(os, hist);
  }
  {
    nlohmann::json j = summary_json(report, {});
    j["config_hash"] = config_hash(cfg);
    j["seed"] = cfg.seed;
    write_text(dir / "summary.json", j.dump(2) + "\n");
  }

  std::cout << "episodes " << n << " length " << len << "\n"
            << "nmpa mean episodic sum-rate " << report.nmpa_mean << " +/- "
            << report.nmpa_std << "\n"
            << "mpa  mean episodic sum-rate " << report.mpa_mean << " +/- " << report.mpa_std
            << "\n"
            << "mean improvement " << 100.0 * report.mean_improvement << "%\n"
            << "violations/tx/episode: nmpa " << report.nmpa_violations_per_tx << ", mpa "
            << report.mpa_violations_per_tx << "\n"
            << "wrote " << (dir / "summary.json").string() << "\n";
  return 0;
}

int cmd_sweep(const CheckpointArgs& args, const std::vector<int>& lengths,
              std::optional<int> episodes, const std::string& out) {
  auto [cfg, ckpt] = load_eval_inputs(args);
  const std::vector<int> lens = lengths.empty() ? cfg.eval.sweep_lengths : lengths;
  const int n = episodes.value_or(cfg.eval.episodes);

  const fs::path dir = resolve_out_dir(out);
  fs::create_directories(dir);

  const std::vector<SweepRow> rows = sweep_lengths(cfg.topology, cfg.env, cfg.wmmse(),
                                                   cfg.model, ckpt.nets.actor, lens, n, cfg.seed);
  {
    std::ofstream os(dir / "sweep.csv");
    write_sweep_csv(os, rows);
  }
  std::cout << "length  nmpa_mean  mpa_mean  improvement\n";
  for (const SweepRow& r : rows)
    std::cout << r.length << "  " << r.nmpa_mean << "  " << r.mpa_mean << "  "
              << 100.0 * r.mean_improvement << "%\n";
  std::cout << "wrote " << (dir / "sweep.csv").string() << "\n";
  return 0;
}

int cmd_gen_data(const std::string& config_path, int length, int episodes,
                 const std::string& out) {
  RunConfig cfg = load_config_or_default(config_path);
  if (length > 0) cfg.env.horizon = length;
  std::ofstream os(resolve_out_dir(out));
  if (!os) throw std::runtime_error("cannot write " + out);
  for (int e = 0; e < episodes; ++e) {
    RngStream topo_rng = derive_stream(cfg.seed, "gen-topology", e);
    RngStream fading_rng = derive_stream(cfg.seed, "gen-fading", e);
    const Episode ep = sample_episode(cfg.topology, cfg.env.horizon, topo_rng, fading_rng);
    write_episode_jsonl(os, ep);
  }
  std::cout << "wrote " << episodes << " episode(s) of length " << cfg.env.horizon << " to "
            << out << "\n";
  return 0;
}

int cmd_gradcheck(int instances, std::uint64_t seed) {
  const GradCheckResult res = run_gradcheck(instances, {2, 3, 5}, seed);
  std::cout << "gradcheck: " << res.instances << " instances, " << res.coordinates
            << " coordinates, max relative error " << res.max_rel_error << "\n";
  if (res.max_rel_error >= 1e-4) {
    std::cerr << "gradcheck FAILED (tolerance 1e-4)\n";
    return 1;
  }
  std::cout << "gradcheck passed (tolerance 1e-4)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-myopic power allocation: training, evaluation, and data tools"};
  app.require_subcommand(1);

  std::string config_path, out = "run";
  std::optional<int> episodes_opt;
  std::optional<std::uint64_t> seed_opt;
  bool resume = false;

  CLI::App* train = app.add_subcommand("train", "train a policy with TD3");
  train->add_option("--config", config_path, "config JSON file (defaults when omitted)");
  train->add_option("--out", out, "run directory");
  int episodes_flag = -1;
  train->add_option("--episodes", episodes_flag, "override train.max_episodes");
  std::uint64_t seed_flag = 0;
  bool seed_set = false;
  train->add_option("--seed", seed_flag, "override root seed")->each([&](const std::string&) {
    seed_set = true;
  });
  train->add_flag("--resume", resume, "continue from checkpoint_last.json in --out");

  CheckpointArgs ckpt_args;
  std::string eval_out = "eval";
  int eval_episodes = -1, eval_length = -1;
  CLI::App* eval = app.add_subcommand("eval", "paired NMPA/MPA benchmark from a checkpoint");
  eval->add_option("--checkpoint", ckpt_args.checkpoint, "checkpoint JSON")->required();
  eval->add_option("--config", ckpt_args.config, "config (default: next to checkpoint)");
  eval->add_option("--episodes", eval_episodes, "number of paired episodes");
  eval->add_option("--length", eval_length, "episode length");
  eval->add_option("--out", eval_out, "output directory");
  eval->add_flag("--force", ckpt_args.force, "ignore config-hash mismatch");

  std::vector<int> sweep_lens;
  std::string sweep_out = "sweep";
  int sweep_episodes = -1;
  CLI::App* sweep = app.add_subcommand("sweep", "episode-length generalization sweep");
  sweep->add_option("--checkpoint", ckpt_args.checkpoint, "checkpoint JSON")->required();
  sweep->add_option("--config", ckpt_args.config, "config (default: next to checkpoint)");
  sweep->add_option("--lengths", sweep_lens, "inference lengths")->delimiter(',');
  sweep->add_option("--episodes", sweep_episodes, "episodes per length");
  sweep->add_option("--out", sweep_out, "output directory");
  sweep->add_flag("--force", ckpt_args.force, "ignore config-hash mismatch");

  std::string gen_out = "episodes.jsonl";
  int gen_length = 0, gen_n = 1;
  CLI::App* gen = app.add_subcommand("gen-data", "export episodes as JSONL");
  gen->add_option("--config", config_path, "config JSON file");
  gen->add_option("-T,--length", gen_length, "episode length (default env.horizon)");
  gen->add_option("-n,--episodes", gen_n, "number of episodes");
  gen->add_option("--out", gen_out, "output file");

  int gc_instances = 50;
  std::uint64_t gc_seed = 7;
  CLI::App* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient suite");
  gradcheck->add_option("--instances", gc_instances, "number of randomized instances");
  gradcheck->add_option("--seed", gc_seed, "seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      if (episodes_flag >= 0) episodes_opt = episodes_flag;
      if (seed_set) seed_opt = seed_flag;
      return cmd_train(config_path, out, episodes_opt, seed_opt, resume);
    }
    if (eval->parsed())
      return cmd_eval(ckpt_args,
                      eval_episodes >= 0 ? std::optional<int>(eval_episodes) : std::nullopt,
                      eval_length >= 0 ? std::optional<int>(eval_length) : std::nullopt,
                      eval_out);
    if (sweep->parsed())
      return cmd_sweep(ckpt_args, sweep_lens,
                       sweep_episodes >= 0 ? std::optional<int>(sweep_episodes) : std::nullopt,
                       sweep_out);
    if (gen->parsed()) return cmd_gen_data(config_path, gen_length, gen_n, gen_out);
    if (gradcheck->parsed()) return cmd_gradcheck(gc_instances, gc_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
