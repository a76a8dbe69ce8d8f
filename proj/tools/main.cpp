#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>

#include "gesturegen/pipeline/pipeline.hpp"

using namespace gesturegen::pipeline;

int main(int argc, char** argv) {
  CLI::App app{"co-speech gesture synthesis pipeline"};
  app.require_subcommand(1);

  PrepOptions prep;
  auto* cmd_prep = app.add_subcommand("prep", "preprocess a dataset manifest");
  cmd_prep->add_option("--manifest", prep.manifest_path, "dataset manifest (tsv)")
      ->required();
  cmd_prep->add_option("--config", prep.config_path, "pipeline config file");
  cmd_prep->add_option("--out", prep.out_dir, "output directory")->required();

  TrainOptions train_csmp;
  std::uint64_t steps_val = 0, seed_val = 0;
  double pdrop_val = 0, gamma_val = 0;
  auto* cmd_csmp = app.add_subcommand("train-csmp",
                                      "contrastive speech/motion pretraining");
  cmd_csmp->add_option("--data", train_csmp.data_dir, "prepared dataset directory")
      ->required();
  cmd_csmp->add_option("--config", train_csmp.config_path, "pipeline config file");
  cmd_csmp->add_option("--out", train_csmp.out_dir, "output directory")->required();
  cmd_csmp->add_option("--resume", train_csmp.resume_checkpoint,
                       "checkpoint to continue from");
  cmd_csmp->add_option("--exclude-list", train_csmp.exclude_list,
                       "clip ids to drop, one per line");
  auto* csmp_steps = cmd_csmp->add_option("--steps", steps_val, "total training steps");
  auto* csmp_seed = cmd_csmp->add_option("--seed", seed_val, "root random seed");

  TrainOptions train_diff;
  auto* cmd_diff = app.add_subcommand("train-diffusion",
                                      "train the gesture denoiser");
  cmd_diff->add_option("--data", train_diff.data_dir, "prepared dataset directory")
      ->required();
  cmd_diff->add_option("--config", train_diff.config_path, "pipeline config file");
  cmd_diff->add_option("--out", train_diff.out_dir, "output directory")->required();
  cmd_diff->add_option("--csmp", train_diff.csmp_checkpoint,
                       "trained csmp checkpoint");
  cmd_diff->add_option("--resume", train_diff.resume_checkpoint,
                       "checkpoint to continue from");
  cmd_diff->add_option("--exclude-list", train_diff.exclude_list,
                       "clip ids to drop, one per line");
  auto* diff_steps = cmd_diff->add_option("--steps", steps_val, "total training steps");
  auto* diff_seed = cmd_diff->add_option("--seed", seed_val, "root random seed");
  auto* diff_pdrop = cmd_diff->add_option("--guidance-dropout", pdrop_val,
                                          "conditioning dropout probability");

  SynthesizeOptions synth;
  auto* cmd_synth = app.add_subcommand("synthesize",
                                       "generate motion for a conversation");
  cmd_synth->add_option("--csmp", synth.csmp_checkpoint, "csmp checkpoint")
      ->required();
  cmd_synth->add_option("--diffusion", synth.diffusion_checkpoint,
                        "diffusion checkpoint")
      ->required();
  cmd_synth->add_option("--skeleton", synth.skeleton_bvh,
                        "bvh supplying the output joint tree")
      ->required();
  cmd_synth->add_option("--audio", synth.main_audio, "main agent audio (wav)")
      ->required();
  cmd_synth->add_option("--interloc-audio", synth.interloc_audio,
                        "interlocutor audio (wav)")
      ->required();
  cmd_synth->add_option("--transcript", synth.main_transcript,
                        "main agent transcript (tsv)")
      ->required();
  cmd_synth->add_option("--interloc-transcript", synth.interloc_transcript,
                        "interlocutor transcript (tsv)")
      ->required();
  cmd_synth->add_option("--out", synth.out_bvh, "output bvh path")->required();
  cmd_synth->add_option("--config", synth.config_path, "pipeline config file");
  auto* synth_gamma = cmd_synth->add_option("--gamma", gamma_val, "guidance scale");
  auto* synth_seed = cmd_synth->add_option("--seed", seed_val, "sampling seed");

  StatsOptions stats;
  auto* cmd_stats = app.add_subcommand("stats", "objective motion statistics");
  cmd_stats->add_option("files", stats.motion_files, "bvh files")->required();
  cmd_stats->add_option("--config", stats.config_path, "pipeline config file");
  cmd_stats->add_option("--out", stats.out_path, "report path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (*cmd_prep) return run_prep(prep);
    if (*cmd_csmp) {
      if (*csmp_steps) train_csmp.steps_override = steps_val;
      if (*csmp_seed) train_csmp.seed_override = seed_val;
      return run_train_csmp(train_csmp);
    }
    if (*cmd_diff) {
      if (*diff_steps) train_diff.steps_override = steps_val;
      if (*diff_seed) train_diff.seed_override = seed_val;
      if (*diff_pdrop) train_diff.p_drop_override = pdrop_val;
      return run_train_diffusion(train_diff);
    }
    if (*cmd_synth) {
      if (*synth_gamma) synth.gamma_override = gamma_val;
      if (*synth_seed) synth.seed_override = seed_val;
      return run_synthesize(synth);
    }
    if (*cmd_stats) return run_stats(stats);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
