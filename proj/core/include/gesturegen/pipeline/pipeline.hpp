#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gesturegen/pipeline/config.hpp"

namespace gesturegen::pipeline {

// Command entry points used by the CLI. They print progress to stdout,
// collect per-clip failures where the contract asks for it, and throw
// std::runtime_error / std::invalid_argument on fatal problems. The int
// result is the process exit code (0 ok, 1 data errors).

struct PrepOptions {
  std::string manifest_path;
  std::string config_path;  // empty = defaults
  std::string out_dir;
};
int run_prep(const PrepOptions& options);

struct TrainOptions {
  std::string data_dir;  // output of prep
  std::string config_path;
  std::string out_dir;
  std::string csmp_checkpoint;       // train-diffusion only
  std::string resume_checkpoint;     // continue a previous run
  std::string exclude_list;          // clip ids to drop, one per line
  std::optional<std::uint64_t> steps_override;
  std::optional<std::uint64_t> seed_override;
  std::optional<double> p_drop_override;  // --guidance-dropout
};
int run_train_csmp(const TrainOptions& options);
int run_train_diffusion(const TrainOptions& options);

struct SynthesizeOptions {
  std::string csmp_checkpoint;
  std::string diffusion_checkpoint;
  std::string skeleton_bvh;  // supplies the joint tree for output motion
  std::string main_audio;
  std::string interloc_audio;
  std::string main_transcript;
  std::string interloc_transcript;
  std::string out_bvh;
  std::string config_path;
  std::optional<double> gamma_override;
  std::optional<std::uint64_t> seed_override;
};
int run_synthesize(const SynthesizeOptions& options);

struct StatsOptions {
  std::vector<std::string> motion_files;
  std::string config_path;
  std::string out_path;  // empty = stdout
};
int run_stats(const StatsOptions& options);

}  // namespace gesturegen::pipeline
