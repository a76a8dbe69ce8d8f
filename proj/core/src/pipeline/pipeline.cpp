#include "gesturegen/pipeline/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "gesturegen/common/strings.hpp"
#include "gesturegen/csmp/csmp.hpp"
#include "gesturegen/diffusion/sampler.hpp"
#include "gesturegen/diffusion/training.hpp"
#include "gesturegen/embed/align.hpp"
#include "gesturegen/embed/features.hpp"
#include "gesturegen/embed/manifest.hpp"
#include "gesturegen/motion/anomaly.hpp"
#include "gesturegen/motion/kinematics.hpp"
#include "gesturegen/motion/rotation.hpp"
#include "gesturegen/pipeline/stats.hpp"
#include "gesturegen/signal/gate.hpp"
#include "gesturegen/signal/resample.hpp"

namespace gesturegen::pipeline {

namespace fs = std::filesystem;

namespace {

// Training runs in float32 (the checkpoint dtype) so save/resume round-trips
// exactly; the gradient-check suites use double.
using Real = float;

PipelineConfig config_from(const std::string& path) {
  PipelineConfig cfg = path.empty() ? PipelineConfig{} : load_config(path);
  cfg.validate();
  return cfg;
}

void write_resolved_config(const PipelineConfig& cfg, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  std::ofstream os(out_dir / "resolved.cfg");
  os << serialize_config(cfg);
  std::cout << "resolved config written to " << (out_dir / "resolved.cfg").string()
            << "\n";
}

motion::ReferencePose tpose_from(const PipelineConfig& cfg) {
  if (cfg.tpose_path.empty()) return {};
  return motion::load_reference_pose(cfg.tpose_path);
}

// DC removal then transcript-driven cross-talk gating.
sig::AudioTrack gated_audio(const std::string& audio_path,
                            const std::string& transcript_path,
                            const PipelineConfig& cfg) {
  sig::AudioTrack audio = sig::read_wav(audio_path);
  if (std::llround(audio.sample_rate) != static_cast<long long>(cfg.audio_rate))
    throw std::runtime_error(cat("'", audio_path, "' is ", audio.sample_rate,
                                 " Hz, expected ", cfg.audio_rate));
  audio = sig::remove_dc(audio, cfg.zero_eps);
  const embed::TimedTranscript transcript = embed::load_transcript(transcript_path);
  return sig::mute_crosstalk(audio, embed::speech_intervals(transcript),
                             cfg.ramp_seconds);
}

// A sidecar `<audio>.emb` (an export from some pretrained encoder) takes
// precedence over the built-in featurizer. Output is resampled to the motion
// frame rate.
embed::EmbeddingSequence audio_features_30hz(const sig::AudioTrack& processed,
                                             const std::string& source_path,
                                             const PipelineConfig& cfg) {
  embed::EmbeddingSequence features;
  const std::string sidecar = source_path + ".emb";
  if (fs::exists(sidecar)) {
    features = embed::load_embeddings(sidecar);
  } else {
    features = embed::fallback_audio_features(processed, cfg.feature_seed);
  }
  const auto rate = static_cast<unsigned>(std::lround(features.rate));
  if (rate != cfg.frame_rate) {
    features.vectors = sig::resample_columns(features.vectors, rate,
                                             static_cast<unsigned>(cfg.frame_rate));
    features.rate = static_cast<double>(cfg.frame_rate);
  }
  return features;
}

embed::EmbeddingSequence text_stream_30hz(const std::string& transcript_path,
                                          std::size_t frames,
                                          const PipelineConfig& cfg) {
  const embed::TimedTranscript transcript = embed::load_transcript(transcript_path);
  MatrixRM vectors;
  const std::string sidecar = transcript_path + ".emb";
  if (fs::exists(sidecar)) {
    const embed::EmbeddingSequence seq = embed::load_embeddings(sidecar);
    if (seq.frames() != transcript.tokens.size())
      throw std::runtime_error(cat("'", sidecar, "' has ", seq.frames(),
                                   " vectors for ", transcript.tokens.size(),
                                   " tokens"));
    vectors = seq.vectors;
  } else {
    vectors = embed::fallback_token_vectors(transcript, cfg.feature_seed);
  }
  return embed::replicate_tokens(transcript, vectors,
                                 static_cast<double>(cfg.frame_rate), frames);
}

struct PreparedClip {
  std::string id;
  fs::path dir;
};

std::vector<PreparedClip> list_prepared(const std::string& data_dir,
                                        const std::string& exclude_list) {
  std::set<std::string> excluded;
  if (!exclude_list.empty()) {
    std::ifstream is(exclude_list);
    if (!is) throw std::runtime_error(cat("cannot open exclude list '", exclude_list, "'"));
    std::string line;
    while (std::getline(is, line))
      if (!line.empty()) excluded.insert(line);
  }
  std::vector<PreparedClip> clips;
  for (const auto& entry : fs::directory_iterator(data_dir)) {
    if (!entry.is_directory()) continue;
    if (!fs::exists(entry.path() / "main_joint.emb")) continue;
    const std::string id = entry.path().filename().string();
    if (excluded.count(id)) continue;
    clips.push_back({id, entry.path()});
  }
  std::sort(clips.begin(), clips.end(),
            [](const PreparedClip& a, const PreparedClip& b) { return a.id < b.id; });
  if (clips.empty())
    throw std::runtime_error(cat("no prepared clips under '", data_dir, "'"));
  return clips;
}

MatrixRM pose_features(const fs::path& clip_dir, const PipelineConfig& cfg,
                       const motion::ReferencePose& tpose) {
  const motion::BvhDocument doc =
      motion::parse_bvh_file((clip_dir / "motion.bvh").string());
  return motion::to_expmap(doc, tpose, cfg.include_root_translation).frames;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

int run_prep(const PrepOptions& options) {
  const PipelineConfig cfg = config_from(options.config_path);
  const fs::path out_dir(options.out_dir);
  write_resolved_config(cfg, out_dir);
  const motion::ReferencePose tpose = tpose_from(cfg);

  const auto manifest = embed::load_manifest(options.manifest_path);
  std::ofstream anomalies(out_dir / "anomalies.tsv");
  std::ofstream exclusions(out_dir / "exclusions.txt");

  std::size_t ok = 0;
  std::vector<std::string> failures;
  for (const embed::ManifestEntry& entry : manifest) {
    try {
      const motion::BvhDocument doc = motion::parse_bvh_file(entry.motion_path);
      if (std::llround(doc.frame_rate()) != static_cast<long long>(cfg.frame_rate))
        throw std::runtime_error(cat("motion is ", doc.frame_rate(),
                                     " fps, expected ", cfg.frame_rate));
      const motion::PoseSequence pose =
          motion::to_expmap(doc, tpose, cfg.include_root_translation);

      // Mocap cleanup: flag, report, and list for exclusion; never repair.
      const motion::JointPositions positions =
          motion::forward_kinematics(pose, tpose);
      double flagged = 0.0;
      if (cfg.hampel_window < pose.frame_count()) {
        const auto report = motion::detect_speed_anomalies(
            positions, select_joints(*doc.skeleton, cfg.hampel_joints),
            cfg.hampel_window, cfg.hampel_threshold, cfg.mad_floor);
        motion::write_anomaly_report(anomalies, entry.clip_id, report);
        flagged = report.flagged_fraction();
      }
      if (flagged > cfg.anomaly_exclude_fraction)
        exclusions << entry.clip_id << "\n";

      const sig::AudioTrack main_audio =
          gated_audio(entry.main_audio_path, entry.main_transcript_path, cfg);
      const sig::AudioTrack il_audio = gated_audio(
          entry.interloc_audio_path, entry.interloc_transcript_path, cfg);
      const auto main_audio_emb =
          audio_features_30hz(main_audio, entry.main_audio_path, cfg);
      const auto il_audio_emb =
          audio_features_30hz(il_audio, entry.interloc_audio_path, cfg);
      const std::size_t frames = pose.frame_count();
      const auto main_text =
          text_stream_30hz(entry.main_transcript_path, frames, cfg);
      const auto il_text =
          text_stream_30hz(entry.interloc_transcript_path, frames, cfg);

      const embed::AlignedClip clip =
          embed::align_clip(pose, main_audio_emb, main_text, il_audio_emb, il_text);

      const fs::path clip_dir = out_dir / entry.clip_id;
      fs::create_directories(clip_dir);
      motion::BvhDocument trimmed = doc;
      trimmed.frames = doc.frames.topRows(
          static_cast<Eigen::Index>(clip.motion.frame_count()));
      motion::write_bvh_file(trimmed, (clip_dir / "motion.bvh").string());
      sig::write_wav((clip_dir / "main.wav").string(), main_audio);
      sig::write_wav((clip_dir / "interloc.wav").string(), il_audio);
      embed::EmbeddingSequence joint;
      joint.rate = clip.rate;
      joint.modality = embed::Modality::Joint;
      joint.vectors = clip.main_joint;
      embed::save_embeddings((clip_dir / "main_joint.emb").string(), joint);
      joint.vectors = clip.interloc_joint;
      embed::save_embeddings((clip_dir / "interloc_joint.emb").string(), joint);
      {
        std::ofstream meta(clip_dir / "prep.meta");
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.6g", flagged);
        meta << "frames = " << clip.frames() << "\n"
             << "rate = " << cfg.frame_rate << "\n"
             << "anomaly_fraction = " << buf << "\n";
      }
      ++ok;
    } catch (const std::exception& e) {
      failures.push_back(cat(entry.clip_id, ": ", e.what()));
    }
  }
  for (const std::string& f : failures) std::cerr << "error: " << f << "\n";
  std::cout << "prepared " << ok << "/" << manifest.size() << "\n";
  return failures.empty() ? 0 : 1;
}

namespace {

csmp::CsmpConfig csmp_config_from(const PipelineConfig& cfg, std::size_t input_dim,
                                  std::size_t motion_dim) {
  csmp::CsmpConfig c;
  c.context = cfg.csmp_context;
  c.hop = cfg.csmp_hop;
  c.input_dim = input_dim;
  c.motion_dim = motion_dim;
  c.model_dim = cfg.csmp_model_dim;
  c.heads = cfg.csmp_heads;
  c.layers = cfg.csmp_layers;
  c.ffn_dim = cfg.csmp_ffn_dim;
  c.max_dist = cfg.csmp_max_dist;
  c.proj_dim = cfg.csmp_proj_dim;
  c.temp_init = cfg.csmp_temp_init;
  c.temp_min = cfg.csmp_temp_min;
  return c;
}

}  // namespace

int run_train_csmp(const TrainOptions& options) {
  const PipelineConfig cfg = config_from(options.config_path);
  const fs::path out_dir(options.out_dir);
  write_resolved_config(cfg, out_dir);
  const motion::ReferencePose tpose = tpose_from(cfg);

  const auto prepared = list_prepared(options.data_dir, options.exclude_list);
  std::vector<csmp::CsmpClip> clips;
  for (const PreparedClip& p : prepared) {
    csmp::CsmpClip clip;
    clip.speech_text =
        embed::load_embeddings((p.dir / "main_joint.emb").string()).vectors;
    clip.motion = pose_features(p.dir, cfg, tpose);
    const auto frames = std::min(clip.speech_text.rows(), clip.motion.rows());
    clip.speech_text = clip.speech_text.topRows(frames);
    clip.motion = clip.motion.topRows(frames);
    clips.push_back(std::move(clip));
  }
  const auto input_dim = static_cast<std::size_t>(clips.front().speech_text.cols());
  const auto motion_dim = static_cast<std::size_t>(clips.front().motion.cols());

  const std::uint64_t total_steps = options.steps_override.value_or(cfg.csmp_steps);
  std::uint64_t seed = options.seed_override.value_or(cfg.seed);

  csmp::CsmpModel<Real> model;
  nn::AdamState<Real> opt;
  std::uint64_t start_step = 0;
  if (!options.resume_checkpoint.empty()) {
    const nn::ModelCheckpoint ckpt = nn::load_checkpoint(options.resume_checkpoint);
    model = csmp::csmp_from_checkpoint<Real>(ckpt, &opt);
    start_step = ckpt.step;
    seed = ckpt.seed;  // continuation must reuse the original stream
  } else {
    Rng rng(seed);
    model = csmp::CsmpModel<Real>(csmp_config_from(cfg, input_dim, motion_dim), rng);
  }
  if (model.cfg.input_dim != input_dim || model.cfg.motion_dim != motion_dim)
    throw std::runtime_error("checkpoint dims do not match the dataset");

  csmp::CsmpTrainConfig tcfg{cfg.csmp_batch, cfg.csmp_lr};
  csmp::CsmpTrainer<Real> trainer(model, std::move(clips), tcfg, seed);
  trainer.set_step_count(start_step);
  trainer.optimizer_state() = opt;

  std::ofstream log(out_dir / "train.log");
  if (total_steps < start_step)
    throw std::runtime_error(cat("checkpoint is already at step ", start_step,
                                 ", beyond requested ", total_steps));
  trainer.train(total_steps - start_step, &log);

  const auto ckpt = csmp::csmp_to_checkpoint(model, trainer.params(),
                                             trainer.optimizer_state(),
                                             trainer.step_count(), seed);
  nn::save_checkpoint((out_dir / "checkpoint.ckpt").string(), ckpt);
  std::cout << "csmp checkpoint at step " << trainer.step_count() << " -> "
            << (out_dir / "checkpoint.ckpt").string() << "\n";
  return 0;
}

int run_train_diffusion(const TrainOptions& options) {
  const PipelineConfig cfg = config_from(options.config_path);
  const fs::path out_dir(options.out_dir);
  write_resolved_config(cfg, out_dir);
  const motion::ReferencePose tpose = tpose_from(cfg);

  if (options.csmp_checkpoint.empty())
    throw std::runtime_error(
        "train-diffusion needs --csmp <checkpoint>: train the csmp stage first");
  csmp::CsmpModel<Real> csmp_model =
      csmp::csmp_from_checkpoint<Real>(nn::load_checkpoint(options.csmp_checkpoint));

  const auto prepared = list_prepared(options.data_dir, options.exclude_list);
  std::vector<diffusion::DiffusionClip> clips;
  for (const PreparedClip& p : prepared) {
    const MatrixRM main_st =
        embed::load_embeddings((p.dir / "main_joint.emb").string()).vectors;
    const MatrixRM il_st =
        embed::load_embeddings((p.dir / "interloc_joint.emb").string()).vectors;
    diffusion::DiffusionClip clip;
    clip.x0 = pose_features(p.dir, cfg, tpose);
    const auto frames = std::min(clip.x0.rows(), main_st.rows());
    clip.x0 = clip.x0.topRows(frames);
    clip.cond = csmp::conditioning_features(csmp_model, main_st.topRows(frames),
                                            il_st.topRows(frames));
    clips.push_back(std::move(clip));
  }
  const auto pose_dim = static_cast<std::size_t>(clips.front().x0.cols());
  const auto cond_dim = static_cast<std::size_t>(clips.front().cond.cols());

  const std::uint64_t total_steps = options.steps_override.value_or(cfg.diff_steps);
  std::uint64_t seed = options.seed_override.value_or(cfg.seed);
  diffusion::GuidanceParams guidance{cfg.gamma,
                                     options.p_drop_override.value_or(cfg.p_drop)};
  guidance.validate();

  diffusion::Denoiser<Real> model;
  nn::AdamState<Real> opt;
  std::uint64_t start_step = 0;
  MatrixRM feat_mean, feat_std;
  if (!options.resume_checkpoint.empty()) {
    const nn::ModelCheckpoint ckpt = nn::load_checkpoint(options.resume_checkpoint);
    model = diffusion::denoiser_from_checkpoint<Real>(ckpt, &opt);
    start_step = ckpt.step;
    seed = ckpt.seed;
    const auto& mean = ckpt.param_required("data.mean");
    const auto& stdev = ckpt.param_required("data.std");
    feat_mean = MatrixRM::Zero(1, static_cast<Eigen::Index>(mean.cols));
    feat_std = MatrixRM::Zero(1, static_cast<Eigen::Index>(stdev.cols));
    for (std::size_t c = 0; c < mean.cols; ++c) {
      feat_mean(0, static_cast<Eigen::Index>(c)) = mean.at(0, c);
      feat_std(0, static_cast<Eigen::Index>(c)) = stdev.at(0, c);
    }
  } else {
    diffusion::DenoiserConfig dcfg;
    dcfg.pose_dim = pose_dim;
    dcfg.cond_dim = cond_dim;
    dcfg.model_dim = cfg.diff_model_dim;
    dcfg.heads = cfg.diff_heads;
    dcfg.blocks = cfg.diff_blocks;
    dcfg.stack_layers = cfg.diff_stack_layers;
    dcfg.ffn_dim = cfg.diff_ffn_dim;
    dcfg.max_dist = cfg.diff_max_dist;
    dcfg.step_embed_dim = cfg.diff_step_embed_dim;
    dcfg.context = cfg.diff_window;
    Rng rng(seed);
    model = diffusion::Denoiser<Real>(dcfg, rng);

    // Feature-wise standardization over the training frames.
    feat_mean = MatrixRM::Zero(1, static_cast<Eigen::Index>(pose_dim));
    feat_std = MatrixRM::Zero(1, static_cast<Eigen::Index>(pose_dim));
    std::size_t total = 0;
    for (const auto& clip : clips) {
      for (Eigen::Index r = 0; r < clip.x0.rows(); ++r) feat_mean += clip.x0.row(r);
      total += static_cast<std::size_t>(clip.x0.rows());
    }
    feat_mean /= double(total);
    for (const auto& clip : clips)
      for (Eigen::Index r = 0; r < clip.x0.rows(); ++r) {
        const MatrixRM d = clip.x0.row(r) - feat_mean;
        feat_std += d.cwiseProduct(d);
      }
    feat_std = (feat_std / double(total)).cwiseSqrt().cwiseMax(1e-6);
  }
  for (auto& clip : clips) {
    for (Eigen::Index r = 0; r < clip.x0.rows(); ++r)
      clip.x0.row(r) = (clip.x0.row(r) - feat_mean.row(0)).cwiseQuotient(feat_std.row(0));
  }

  const diffusion::NoiseSchedule schedule = diffusion::make_schedule(
      cfg.schedule_kind, cfg.schedule_steps, cfg.beta_min, cfg.beta_max);
  nn::NamedParams<Real> params;
  model.collect_params(params);
  diffusion::DiffusionTrainConfig tcfg{cfg.diff_batch, cfg.diff_lr, cfg.diff_window};
  diffusion::DiffusionTrainer<Real> trainer(model, params, std::move(clips),
                                            schedule, guidance, tcfg, seed);
  trainer.set_step_count(start_step);
  trainer.optimizer_state() = opt;

  std::ofstream log(out_dir / "train.log");
  if (total_steps < start_step)
    throw std::runtime_error(cat("checkpoint is already at step ", start_step,
                                 ", beyond requested ", total_steps));
  trainer.train(total_steps - start_step, &log);

  std::map<std::string, nn::Tensor<float>> extra;
  nn::Tensor<float> mean_t(1, pose_dim), std_t(1, pose_dim);
  for (std::size_t c = 0; c < pose_dim; ++c) {
    mean_t.at(0, c) = static_cast<float>(feat_mean(0, static_cast<Eigen::Index>(c)));
    std_t.at(0, c) = static_cast<float>(feat_std(0, static_cast<Eigen::Index>(c)));
  }
  extra["data.mean"] = mean_t;
  extra["data.std"] = std_t;
  const auto ckpt = diffusion::denoiser_to_checkpoint(
      model, trainer.params(), trainer.optimizer_state(), schedule,
      cfg.schedule_kind, trainer.step_count(), seed, extra);
  nn::save_checkpoint((out_dir / "checkpoint.ckpt").string(), ckpt);
  std::cout << "diffusion checkpoint at step " << trainer.step_count() << " -> "
            << (out_dir / "checkpoint.ckpt").string() << "\n";
  return 0;
}

int run_synthesize(const SynthesizeOptions& options) {
  const PipelineConfig cfg = config_from(options.config_path);
  const motion::ReferencePose tpose = tpose_from(cfg);
  const double gamma = options.gamma_override.value_or(cfg.gamma);
  const std::uint64_t seed = options.seed_override.value_or(cfg.seed);

  csmp::CsmpModel<Real> csmp_model =
      csmp::csmp_from_checkpoint<Real>(nn::load_checkpoint(options.csmp_checkpoint));
  const nn::ModelCheckpoint diff_ckpt =
      nn::load_checkpoint(options.diffusion_checkpoint);
  diffusion::Denoiser<Real> denoiser =
      diffusion::denoiser_from_checkpoint<Real>(diff_ckpt);
  const diffusion::NoiseSchedule schedule =
      diffusion::schedule_from_checkpoint(diff_ckpt);

  // Target duration comes from the main agent's audio.
  const sig::AudioTrack probe = sig::read_wav(options.main_audio);
  const auto frames = static_cast<std::size_t>(
      std::floor(probe.duration() * double(cfg.frame_rate) + 0.5));
  if (frames == 0) throw std::runtime_error("input audio is too short");

  auto agent_stream = [&](const std::string& audio, const std::string& transcript) {
    embed::EmbeddingSequence a =
        audio_features_30hz(gated_audio(audio, transcript, cfg), audio, cfg);
    if (a.frames() < frames)
      throw std::runtime_error(cat("audio features cover ", a.frames(),
                                   " frames, need ", frames));
    const embed::EmbeddingSequence t = text_stream_30hz(transcript, frames, cfg);
    MatrixRM joint = MatrixRM::Zero(static_cast<Eigen::Index>(frames),
                                    a.vectors.cols() + t.vectors.cols());
    joint.leftCols(a.vectors.cols()) =
        a.vectors.topRows(static_cast<Eigen::Index>(frames));
    joint.rightCols(t.vectors.cols()) = t.vectors;
    return joint;
  };
  auto staged = [](const char* stage, auto&& fn) {
    try {
      return fn();
    } catch (const std::exception& e) {
      throw std::runtime_error(cat(stage, ": ", e.what()));
    }
  };
  const MatrixRM main_st = staged("main agent stream", [&] {
    return agent_stream(options.main_audio, options.main_transcript);
  });
  const MatrixRM il_st = staged("interlocutor stream", [&] {
    return agent_stream(options.interloc_audio, options.interloc_transcript);
  });
  const MatrixRM cond = staged("csmp conditioning", [&] {
    return csmp::conditioning_features(csmp_model, main_st, il_st);
  });

  diffusion::SamplerConfig scfg;
  scfg.window = denoiser.cfg.context;
  scfg.xfade_frames = cfg.xfade_frames;
  MatrixRM features = diffusion::sample<Real>(denoiser, schedule, cond, gamma,
                                              seed, scfg);

  // Back to raw pose features.
  const auto& mean = diff_ckpt.param_required("data.mean");
  const auto& stdev = diff_ckpt.param_required("data.std");
  for (Eigen::Index r = 0; r < features.rows(); ++r)
    for (Eigen::Index c = 0; c < features.cols(); ++c)
      features(r, c) = features(r, c) * stdev.at(0, static_cast<std::size_t>(c)) +
                       mean.at(0, static_cast<std::size_t>(c));

  const motion::BvhDocument skel_doc = motion::parse_bvh_file(options.skeleton_bvh);
  motion::PoseSequence pose;
  pose.frame_rate = static_cast<double>(cfg.frame_rate);
  pose.skeleton = skel_doc.skeleton;
  const std::size_t joints = skel_doc.skeleton->joint_count();
  if (static_cast<std::size_t>(features.cols()) == 3 * joints + 3) {
    pose.has_root_translation = true;
  } else if (static_cast<std::size_t>(features.cols()) == 3 * joints) {
    pose.has_root_translation = false;
  } else {
    throw std::runtime_error(cat("model pose dim ", features.cols(),
                                 " does not fit skeleton with ", joints,
                                 " joints"));
  }
  // Canonicalize: sampled rotations may exceed the expmap ball.
  for (Eigen::Index r = 0; r < features.rows(); ++r)
    for (std::size_t j = 0; j < joints; ++j) {
      Eigen::Vector3d v = features.block<1, 3>(r, static_cast<Eigen::Index>(3 * j))
                              .transpose();
      features.block<1, 3>(r, static_cast<Eigen::Index>(3 * j)) =
          motion::log_rotation(motion::exp_rotation(v)).transpose();
    }
  pose.frames = features;
  pose.validate();

  const motion::BvhDocument out_doc = motion::from_expmap(pose, tpose);
  motion::write_bvh_file(out_doc, options.out_bvh);

  {
    std::ofstream meta(options.out_bvh + ".meta");
    char buf[64];
    meta << "seed = " << seed << "\n";
    std::snprintf(buf, sizeof(buf), "%.17g", gamma);
    meta << "gamma = " << buf << "\n";
    meta << "csmp_checkpoint_hash = "
         << hex64(nn::file_hash(options.csmp_checkpoint)) << "\n";
    meta << "diffusion_checkpoint_hash = "
         << hex64(nn::file_hash(options.diffusion_checkpoint)) << "\n";
    meta << "schedule_kind = " << cfg.schedule_kind << "\n";
    meta << "schedule_steps = " << schedule.steps() << "\n";
    std::snprintf(buf, sizeof(buf), "%.17g", schedule.beta.front());
    meta << "beta_min = " << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%.17g", schedule.beta.back());
    meta << "beta_max = " << buf << "\n";
    meta << "frames = " << frames << "\n";
  }
  std::cout << "synthesized " << frames << " frames -> " << options.out_bvh << "\n";
  return 0;
}

int run_stats(const StatsOptions& options) {
  const PipelineConfig cfg = config_from(options.config_path);
  std::vector<ClipStats> all;
  for (const std::string& file : options.motion_files) {
    const motion::BvhDocument doc = motion::parse_bvh_file(file);
    all.push_back(compute_stats(file, doc, cfg));
  }
  if (options.out_path.empty()) {
    write_stats(std::cout, all);
  } else {
    std::ofstream os(options.out_path);
    if (!os) throw std::runtime_error(cat("cannot open '", options.out_path, "'"));
    write_stats(os, all);
    std::cout << "stats for " << all.size() << " files -> " << options.out_path
              << "\n";
  }
  return 0;
}

}  // namespace gesturegen::pipeline
