#include "gesturegen/pipeline/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <variant>

#include "gesturegen/common/strings.hpp"

namespace gesturegen::pipeline {

namespace {

using FieldPtr = std::variant<double PipelineConfig::*, std::uint64_t PipelineConfig::*,
                              bool PipelineConfig::*, std::string PipelineConfig::*>;

const std::map<std::string, FieldPtr>& field_table() {
  static const std::map<std::string, FieldPtr> table = {
      {"seed", &PipelineConfig::seed},
      {"feature_seed", &PipelineConfig::feature_seed},
      {"frame_rate", &PipelineConfig::frame_rate},
      {"audio_rate", &PipelineConfig::audio_rate},
      {"embed_rate", &PipelineConfig::embed_rate},
      {"zero_eps", &PipelineConfig::zero_eps},
      {"ramp_seconds", &PipelineConfig::ramp_seconds},
      {"ramp_shape", &PipelineConfig::ramp_shape},
      {"hampel_window", &PipelineConfig::hampel_window},
      {"hampel_threshold", &PipelineConfig::hampel_threshold},
      {"hampel_joints", &PipelineConfig::hampel_joints},
      {"mad_floor", &PipelineConfig::mad_floor},
      {"anomaly_exclude_fraction", &PipelineConfig::anomaly_exclude_fraction},
      {"include_root_translation", &PipelineConfig::include_root_translation},
      {"tpose_path", &PipelineConfig::tpose_path},
      {"csmp_context", &PipelineConfig::csmp_context},
      {"csmp_hop", &PipelineConfig::csmp_hop},
      {"csmp_model_dim", &PipelineConfig::csmp_model_dim},
      {"csmp_heads", &PipelineConfig::csmp_heads},
      {"csmp_layers", &PipelineConfig::csmp_layers},
      {"csmp_ffn_dim", &PipelineConfig::csmp_ffn_dim},
      {"csmp_max_dist", &PipelineConfig::csmp_max_dist},
      {"csmp_proj_dim", &PipelineConfig::csmp_proj_dim},
      {"csmp_temp_init", &PipelineConfig::csmp_temp_init},
      {"csmp_temp_min", &PipelineConfig::csmp_temp_min},
      {"csmp_batch", &PipelineConfig::csmp_batch},
      {"csmp_lr", &PipelineConfig::csmp_lr},
      {"csmp_steps", &PipelineConfig::csmp_steps},
      {"diff_window", &PipelineConfig::diff_window},
      {"diff_model_dim", &PipelineConfig::diff_model_dim},
      {"diff_heads", &PipelineConfig::diff_heads},
      {"diff_blocks", &PipelineConfig::diff_blocks},
      {"diff_stack_layers", &PipelineConfig::diff_stack_layers},
      {"diff_ffn_dim", &PipelineConfig::diff_ffn_dim},
      {"diff_max_dist", &PipelineConfig::diff_max_dist},
      {"diff_step_embed_dim", &PipelineConfig::diff_step_embed_dim},
      {"diff_batch", &PipelineConfig::diff_batch},
      {"diff_lr", &PipelineConfig::diff_lr},
      {"diff_steps", &PipelineConfig::diff_steps},
      {"schedule_kind", &PipelineConfig::schedule_kind},
      {"schedule_steps", &PipelineConfig::schedule_steps},
      {"beta_min", &PipelineConfig::beta_min},
      {"beta_max", &PipelineConfig::beta_max},
      {"p_drop", &PipelineConfig::p_drop},
      {"gamma", &PipelineConfig::gamma},
      {"xfade_frames", &PipelineConfig::xfade_frames},
  };
  return table;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

void assign(PipelineConfig& cfg, const FieldPtr& field, const std::string& value,
            const std::string& key, std::size_t lineno) {
  auto bad = [&]() {
    return std::runtime_error(
        cat("config line ", lineno, ": bad value '", value, "' for ", key));
  };
  std::visit(
      [&](auto ptr) {
        using M = std::remove_cvref_t<decltype(cfg.*ptr)>;
        if constexpr (std::is_same_v<M, std::string>) {
          cfg.*ptr = value;
        } else if constexpr (std::is_same_v<M, bool>) {
          if (value == "true" || value == "1") cfg.*ptr = true;
          else if (value == "false" || value == "0") cfg.*ptr = false;
          else throw bad();
        } else if constexpr (std::is_same_v<M, std::uint64_t>) {
          try {
            std::size_t used = 0;
            const auto v = std::stoull(value, &used);
            if (used != value.size()) throw bad();
            cfg.*ptr = v;
          } catch (const std::logic_error&) {
            throw bad();
          }
        } else {
          try {
            std::size_t used = 0;
            const double v = std::stod(value, &used);
            if (used != value.size()) throw bad();
            cfg.*ptr = v;
          } catch (const std::logic_error&) {
            throw bad();
          }
        }
      },
      field);
}

std::string format_value(const PipelineConfig& cfg, const FieldPtr& field) {
  return std::visit(
      [&](auto ptr) -> std::string {
        using M = std::remove_cvref_t<decltype(cfg.*ptr)>;
        if constexpr (std::is_same_v<M, std::string>) {
          return cfg.*ptr;
        } else if constexpr (std::is_same_v<M, bool>) {
          return (cfg.*ptr) ? "true" : "false";
        } else if constexpr (std::is_same_v<M, std::uint64_t>) {
          return std::to_string(cfg.*ptr);
        } else {
          char buf[40];
          std::snprintf(buf, sizeof(buf), "%.17g", cfg.*ptr);
          return buf;
        }
      },
      field);
}

}  // namespace

void PipelineConfig::validate() const {
  if (frame_rate == 0 || audio_rate == 0 || embed_rate == 0)
    throw std::runtime_error("config: rates must be positive");
  if (ramp_shape != "linear")
    throw std::runtime_error(cat("config: unknown ramp_shape '", ramp_shape, "'"));
  if (hampel_window % 2 == 0)
    throw std::runtime_error("config: hampel_window must be odd");
  if (!(p_drop >= 0.0 && p_drop < 1.0))
    throw std::runtime_error("config: p_drop out of [0, 1)");
  if (!(gamma >= 0.0))
    throw std::runtime_error("config: gamma must be >= 0");
  if (csmp_hop == 0 || csmp_hop > csmp_context)
    throw std::runtime_error("config: need 0 < csmp_hop <= csmp_context");
}

PipelineConfig parse_config(const std::string& text) {
  PipelineConfig cfg;
  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(cat("config line ", lineno, ": expected key = value"));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = field_table().find(key);
    if (it == field_table().end())
      throw std::runtime_error(cat("config line ", lineno, ": unknown key '", key, "'"));
    assign(cfg, it->second, value, key, lineno);
  }
  cfg.validate();
  return cfg;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error(cat("cannot open config '", path, "'"));
  std::stringstream buf;
  buf << is.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const PipelineConfig& config) {
  std::string out;
  for (const auto& [key, field] : field_table())
    out += key + " = " + format_value(config, field) + "\n";
  return out;
}

}  // namespace gesturegen::pipeline
