#include <benchmark/benchmark.h>

#include <sstream>

#include "gesturegen/common/rng.hpp"
#include "gesturegen/motion/anomaly.hpp"
#include "gesturegen/motion/kinematics.hpp"
#include "gesturegen/motion/pose.hpp"

namespace {

using namespace gesturegen;

motion::BvhDocument chain_motion(std::size_t joints, std::size_t frames) {
  using motion::Axis;
  using motion::Channel;
  auto skel = std::make_shared<motion::Skeleton>();
  for (std::size_t j = 0; j < joints; ++j) {
    motion::Joint joint;
    joint.name = "j" + std::to_string(j);
    joint.parent = static_cast<int>(j) - 1;
    joint.offset = Eigen::Vector3d(0, 1, 0);
    for (Axis a : {Axis::Z, Axis::X, Axis::Y})
      joint.channels.push_back({Channel::Kind::Rotation, a});
    skel->joints.push_back(joint);
  }
  motion::BvhDocument doc;
  doc.skeleton = skel;
  doc.frame_time = 1.0 / 30.0;
  doc.frames = MatrixRM::Zero(static_cast<Eigen::Index>(frames),
                              static_cast<Eigen::Index>(3 * joints));
  Rng rng(3);
  for (Eigen::Index r = 0; r < doc.frames.rows(); ++r)
    for (Eigen::Index c = 0; c < doc.frames.cols(); ++c)
      doc.frames(r, c) = rng.uniform(-45, 45);
  return doc;
}

void BM_ExpmapEncode(benchmark::State& state) {
  const auto doc = chain_motion(24, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto pose = motion::to_expmap(doc);
    benchmark::DoNotOptimize(pose.frames.data());
  }
}
BENCHMARK(BM_ExpmapEncode)->Arg(300)->Arg(3000);

void BM_ForwardKinematics(benchmark::State& state) {
  const auto doc = chain_motion(24, static_cast<std::size_t>(state.range(0)));
  const auto pose = motion::to_expmap(doc);
  for (auto _ : state) {
    auto positions = motion::forward_kinematics(pose);
    benchmark::DoNotOptimize(positions.xyz.data());
  }
}
BENCHMARK(BM_ForwardKinematics)->Arg(300)->Arg(3000);

void BM_HampelDetector(benchmark::State& state) {
  const auto doc = chain_motion(24, static_cast<std::size_t>(state.range(0)));
  const auto positions = motion::forward_kinematics(motion::to_expmap(doc));
  const std::vector<std::size_t> joints = {23};
  for (auto _ : state) {
    auto report = motion::detect_speed_anomalies(positions, joints, 15, 3.0);
    benchmark::DoNotOptimize(report.flags.data());
  }
}
BENCHMARK(BM_HampelDetector)->Arg(300)->Arg(3000);

}  // namespace

BENCHMARK_MAIN();
