#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "corpus.hpp"
#include "gesturegen/embed/embedding.hpp"
#include "gesturegen/nn/checkpoint.hpp"
#include "gesturegen/pipeline/config.hpp"
#include "gesturegen/pipeline/pipeline.hpp"
#include "gesturegen/pipeline/stats.hpp"

using namespace gesturegen;
using namespace gesturegen::pipeline;
namespace fs = std::filesystem;

namespace {
fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "gesturegen_pipeline" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  REQUIRE(is.good());
  return std::string((std::istreambuf_iterator<char>(is)), {});
}
}  // namespace

TEST_CASE("pipeline config") {
  SUBCASE("defaults validate and round trip") {
    PipelineConfig cfg;
    cfg.validate();
    const std::string text = serialize_config(cfg);
    PipelineConfig back = parse_config(text);
    CHECK(serialize_config(back) == text);
  }
  SUBCASE("values round trip through the serializer") {
    PipelineConfig cfg;
    cfg.seed = 999;
    cfg.gamma = 2.25;
    cfg.hampel_joints = "wrist,hand";
    cfg.include_root_translation = true;
    PipelineConfig back = parse_config(serialize_config(cfg));
    CHECK(back.seed == 999);
    CHECK(back.gamma == 2.25);
    CHECK(back.hampel_joints == "wrist,hand");
    CHECK(back.include_root_translation == true);
  }
  SUBCASE("unknown keys are rejected") {
    CHECK_THROWS_WITH_AS(parse_config("no_such_key = 1\n"),
                         doctest::Contains("no_such_key"), std::runtime_error);
  }
  SUBCASE("bad values are rejected with their line") {
    CHECK_THROWS_WITH_AS(parse_config("seed = notanumber\n"),
                         doctest::Contains("line 1"), std::runtime_error);
    CHECK_THROWS_WITH_AS(parse_config("\ngamma = -1\n"),
                         doctest::Contains("gamma"), std::runtime_error);
  }
  SUBCASE("comments and blank lines are fine") {
    PipelineConfig cfg = parse_config("# comment\n\nseed = 7 # trailing\n");
    CHECK(cfg.seed == 7);
  }
}

TEST_CASE("motion statistics") {
  PipelineConfig cfg;

  SUBCASE("static pose has zero speed and jerk") {
    corpus::ClipOptions opt;
    opt.frames = 60;
    motion::BvhDocument doc = corpus::make_motion(opt);
    doc.frames.setZero();
    ClipStats stats = compute_stats("static", doc, cfg);
    CHECK(stats.mean_joint_speed == 0.0);
    CHECK(stats.mean_jerk == 0.0);
    CHECK(stats.flagged_fraction == 0.0);
    CHECK(stats.frames == 60);
    std::size_t total = 0;
    for (auto c : stats.hist_counts) total += c;
    CHECK(total == 60);
  }

  SUBCASE("sinusoidal single joint matches the analytic mean speed") {
    // Root rotates about z by A*sin(2*pi*f*t); child sits at radius r. The
    // child speed is r*|theta'| and the time average of |cos| is 2/pi.
    using motion::Axis;
    using motion::Channel;
    auto skel = std::make_shared<motion::Skeleton>();
    motion::Joint root;
    root.name = "base";
    root.parent = -1;
    for (Axis a : {Axis::Z, Axis::X, Axis::Y})
      root.channels.push_back({Channel::Kind::Rotation, a});
    skel->joints.push_back(root);
    motion::Joint tip = root;
    tip.name = "tip";
    tip.parent = 0;
    tip.offset = Eigen::Vector3d(2.0, 0, 0);
    skel->joints.push_back(tip);
    skel->validate();

    const double amp_deg = 20.0, freq = 0.5, fps = 30.0, radius = 2.0;
    const std::size_t frames = 1200;  // many periods for a clean average
    motion::BvhDocument doc;
    doc.skeleton = skel;
    doc.frame_time = 1.0 / fps;
    doc.frames = MatrixRM::Zero(frames, 6);
    for (std::size_t t = 0; t < frames; ++t)
      doc.frames(static_cast<Eigen::Index>(t), 0) =
          amp_deg * std::sin(2 * M_PI * freq * t / fps);

    PipelineConfig scfg;
    scfg.hampel_joints = "tip";
    ClipStats stats = compute_stats("sine", doc, scfg);
    const double amp_rad = amp_deg * M_PI / 180.0;
    const double tip_mean = radius * amp_rad * 2 * M_PI * freq * (2.0 / M_PI);
    // Mean over both joints; the root never moves.
    const double want = tip_mean / 2.0;
    CHECK(stats.mean_joint_speed == doctest::Approx(want).epsilon(0.02));
  }

  SUBCASE("report has one row per file") {
    const fs::path dir = fresh_dir("stats_rows");
    auto corpus_data = corpus::write_corpus(dir / "corpus", 3, 60);
    StatsOptions opt;
    for (const auto& id : corpus_data.clip_ids)
      opt.motion_files.push_back((corpus_data.dir / (id + ".bvh")).string());
    opt.out_path = (dir / "report.tsv").string();
    CHECK(run_stats(opt) == 0);
    std::istringstream is(slurp(dir / "report.tsv"));
    std::string line;
    std::size_t rows = 0;
    while (std::getline(is, line))
      if (!line.empty()) ++rows;
    CHECK(rows == 4);  // header + 3
  }
}

TEST_CASE("prep") {
  const fs::path dir = fresh_dir("prep");
  const fs::path cfg_path = dir / "tiny.cfg";
  std::ofstream(cfg_path) << corpus::tiny_config();

  SUBCASE("two clean clips produce two archives") {
    auto data = corpus::write_corpus(dir / "corpus", 2, 120);
    PrepOptions opt{data.manifest_path, cfg_path.string(), (dir / "prepared").string()};
    CHECK(run_prep(opt) == 0);
    for (const auto& id : data.clip_ids) {
      CHECK(fs::exists(dir / "prepared" / id / "motion.bvh"));
      CHECK(fs::exists(dir / "prepared" / id / "main_joint.emb"));
      CHECK(fs::exists(dir / "prepared" / id / "interloc_joint.emb"));
      const auto joint =
          embed::load_embeddings((dir / "prepared" / id / "main_joint.emb").string());
      CHECK(joint.dim() == 1536);
      CHECK(joint.frames() == 120);
      CHECK(joint.rate == doctest::Approx(30.0));
    }
    CHECK(slurp(dir / "prepared" / "exclusions.txt").empty());
    CHECK(fs::exists(dir / "prepared" / "resolved.cfg"));
  }

  SUBCASE("a clip with an injected wrist spike lands on the exclusion list") {
    auto data = corpus::write_corpus(dir / "corpus_spike", 3, 120, 1);
    PrepOptions opt{data.manifest_path, cfg_path.string(),
                    (dir / "prepared_spike").string()};
    CHECK(run_prep(opt) == 0);
    const std::string exclusions = slurp(dir / "prepared_spike" / "exclusions.txt");
    CHECK(exclusions.find("clip1") != std::string::npos);
    CHECK(exclusions.find("clip0") == std::string::npos);
    const std::string anomalies = slurp(dir / "prepared_spike" / "anomalies.tsv");
    CHECK(anomalies.find("clip1\t") != std::string::npos);
    CHECK(anomalies.find("LeftWrist") != std::string::npos);
  }

  SUBCASE("a sidecar embedding file replaces the fallback featurizer") {
    auto data = corpus::write_corpus(dir / "corpus_sidecar", 1, 120);
    // Constant 50 Hz embeddings stay constant through resampling, which the
    // fallback featurizer never produces for tonal audio.
    embed::EmbeddingSequence side;
    side.rate = 50.0;
    side.modality = embed::Modality::Audio;
    side.vectors = MatrixRM::Constant(200, 768, 0.25);
    embed::save_embeddings((data.dir / "clip0_main.wav.emb").string(), side);

    PrepOptions opt{data.manifest_path, cfg_path.string(),
                    (dir / "prepared_sidecar").string()};
    REQUIRE(run_prep(opt) == 0);
    const auto joint = embed::load_embeddings(
        (dir / "prepared_sidecar" / "clip0" / "main_joint.emb").string());
    // Steady-state audio columns carry the constant; text columns do not.
    CHECK(joint.vectors(60, 10) == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(joint.vectors(61, 500) == doctest::Approx(0.25).epsilon(1e-6));
    const auto il = embed::load_embeddings(
        (dir / "prepared_sidecar" / "clip0" / "interloc_joint.emb").string());
    CHECK(std::abs(il.vectors(60, 10) - 0.25) > 1e-6);  // fallback path
  }

  SUBCASE("a missing transcript fails that clip and names it") {
    auto data = corpus::write_corpus(dir / "corpus_missing", 2, 60);
    fs::remove(data.dir / "clip1_main.tsv");
    PrepOptions opt{data.manifest_path, cfg_path.string(),
                    (dir / "prepared_missing").string()};
    // Exit code 1, but the healthy clip is still prepared.
    CHECK(run_prep(opt) == 1);
    CHECK(fs::exists(dir / "prepared_missing" / "clip0" / "main_joint.emb"));
    CHECK(!fs::exists(dir / "prepared_missing" / "clip1" / "main_joint.emb"));
  }
}

TEST_CASE("training commands") {
  const fs::path dir = fresh_dir("train");
  const fs::path cfg_path = dir / "tiny.cfg";
  std::ofstream(cfg_path) << corpus::tiny_config();
  auto data = corpus::write_corpus(dir / "corpus", 3, 120);
  PrepOptions prep{data.manifest_path, cfg_path.string(), (dir / "prepared").string()};
  REQUIRE(run_prep(prep) == 0);

  SUBCASE("train-csmp produces a checkpoint with the step counter") {
    TrainOptions opt;
    opt.data_dir = (dir / "prepared").string();
    opt.config_path = cfg_path.string();
    opt.out_dir = (dir / "csmp").string();
    opt.steps_override = 12;
    CHECK(run_train_csmp(opt) == 0);
    const auto ckpt = nn::load_checkpoint((dir / "csmp" / "checkpoint.ckpt").string());
    CHECK(ckpt.step == 12);
    CHECK(ckpt.hyper_required("csmp.proj_dim") == 512.0);
    // Log has one line per step.
    std::istringstream is(slurp(dir / "csmp" / "train.log"));
    std::string line;
    std::size_t rows = 0;
    while (std::getline(is, line))
      if (!line.empty()) ++rows;
    CHECK(rows == 12);
  }

  SUBCASE("train-diffusion without a csmp checkpoint is an actionable error") {
    TrainOptions opt;
    opt.data_dir = (dir / "prepared").string();
    opt.config_path = cfg_path.string();
    opt.out_dir = (dir / "diff").string();
    CHECK_THROWS_WITH_AS(run_train_diffusion(opt),
                         doctest::Contains("train the csmp stage first"),
                         std::runtime_error);
  }

  SUBCASE("exclude list removes clips from training") {
    std::ofstream(dir / "exclude.txt") << "clip0\nclip1\nclip2\n";
    TrainOptions opt;
    opt.data_dir = (dir / "prepared").string();
    opt.config_path = cfg_path.string();
    opt.out_dir = (dir / "csmp_excluded").string();
    opt.exclude_list = (dir / "exclude.txt").string();
    CHECK_THROWS_WITH_AS(run_train_csmp(opt), doctest::Contains("no prepared clips"),
                         std::runtime_error);
  }
}
