#pragma once

#include <cstdint>
#include <string>

namespace gesturegen::pipeline {

// Every tunable of the pipeline in one flat document. Loaded from
// `key = value` lines; unknown keys are rejected and the resolved config is
// logged verbatim with every run so a run can be reproduced from its log.
struct PipelineConfig {
  std::uint64_t seed = 12345;
  std::uint64_t feature_seed = 1234567;

  std::uint64_t frame_rate = 30;
  std::uint64_t audio_rate = 16000;
  std::uint64_t embed_rate = 50;

  // signal prep
  double zero_eps = 0.0;
  double ramp_seconds = 0.2;
  std::string ramp_shape = "linear";

  // mocap cleanup
  std::uint64_t hampel_window = 15;
  double hampel_threshold = 3.0;
  std::string hampel_joints = "wrist";  // comma-separated name substrings
  double mad_floor = 1e-9;
  double anomaly_exclude_fraction = 0.05;

  // pose features
  bool include_root_translation = false;
  std::string tpose_path;  // optional reference-frame BVH; empty = identity

  // contrastive pretraining
  std::uint64_t csmp_context = 500;
  std::uint64_t csmp_hop = 250;
  std::uint64_t csmp_model_dim = 256;
  std::uint64_t csmp_heads = 4;
  std::uint64_t csmp_layers = 2;
  std::uint64_t csmp_ffn_dim = 1024;
  std::uint64_t csmp_max_dist = 64;
  std::uint64_t csmp_proj_dim = 512;
  double csmp_temp_init = 0.07;
  double csmp_temp_min = 0.01;
  std::uint64_t csmp_batch = 64;
  double csmp_lr = 1e-4;
  std::uint64_t csmp_steps = 2000;

  // denoiser + diffusion training
  std::uint64_t diff_window = 100;
  std::uint64_t diff_model_dim = 128;
  std::uint64_t diff_heads = 4;
  std::uint64_t diff_blocks = 15;
  std::uint64_t diff_stack_layers = 3;
  std::uint64_t diff_ffn_dim = 512;
  std::uint64_t diff_max_dist = 64;
  std::uint64_t diff_step_embed_dim = 64;
  std::uint64_t diff_batch = 16;
  double diff_lr = 1e-4;
  std::uint64_t diff_steps = 5000;

  // noise schedule + guidance
  std::string schedule_kind = "linear";
  std::uint64_t schedule_steps = 1000;
  double beta_min = 1e-4;
  double beta_max = 0.02;
  double p_drop = 0.1;
  double gamma = 1.0;
  std::uint64_t xfade_frames = 30;

  void validate() const;
};

// Parses a key = value document ('#' starts a comment). Unknown keys and
// malformed values raise with the offending line.
PipelineConfig parse_config(const std::string& text);
PipelineConfig load_config(const std::string& path);

// Sorted `key = value` lines; parse_config(serialize_config(c)) == c.
std::string serialize_config(const PipelineConfig& config);

}  // namespace gesturegen::pipeline
