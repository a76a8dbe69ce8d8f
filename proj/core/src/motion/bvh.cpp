#include "gesturegen/motion/bvh.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "gesturegen/common/strings.hpp"

namespace gesturegen::motion {

namespace {

struct ParseError : std::runtime_error {
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error(cat("bvh parse error at line ", line, ": ", what)) {}
};

// Whitespace tokenizer that tracks 1-based line numbers.
class Lexer {
 public:
  explicit Lexer(std::istream& in) : in_(in) {}

  std::size_t line() const { return line_; }

  bool next(std::string& tok) {
    tok.clear();
    int c;
    while ((c = in_.get()) != EOF) {
      if (c == '\n') {
        ++line_;
        if (!tok.empty()) {
          --line_;  // token ended on the previous line
          in_.unget();
          return true;
        }
        continue;
      }
      if (std::isspace(c)) {
        if (!tok.empty()) return true;
        continue;
      }
      tok.push_back(static_cast<char>(c));
    }
    return !tok.empty();
  }

  std::string expect_any(const char* what) {
    std::string tok;
    if (!next(tok)) throw ParseError(line_, cat("unexpected end of file, expected ", what));
    return tok;
  }

  void expect(const std::string& want) {
    const std::string tok = expect_any(want.c_str());
    if (tok != want)
      throw ParseError(line_, cat("expected '", want, "', got '", tok, "'"));
  }

  double expect_number(const char* what) {
    const std::string tok = expect_any(what);
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw ParseError(line_, cat("expected number for ", what, ", got '", tok, "'"));
    }
    if (used != tok.size())
      throw ParseError(line_, cat("expected number for ", what, ", got '", tok, "'"));
    return v;
  }

  // Leaves the stream positioned at the start of the next line.
  void skip_to_line_end() {
    int c;
    while ((c = in_.get()) != EOF) {
      if (c == '\n') {
        ++line_;
        return;
      }
    }
  }

  std::istream& stream() { return in_; }
  void count_line() { ++line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 1;
};

Channel parse_channel_name(const std::string& tok, std::size_t line) {
  if (tok.size() != 9) throw ParseError(line, cat("unknown channel '", tok, "'"));
  Axis axis;
  switch (tok[0]) {
    case 'X': axis = Axis::X; break;
    case 'Y': axis = Axis::Y; break;
    case 'Z': axis = Axis::Z; break;
    default: throw ParseError(line, cat("unknown channel '", tok, "'"));
  }
  if (tok.substr(1) == "rotation") return {Channel::Kind::Rotation, axis};
  if (tok.substr(1) == "position") return {Channel::Kind::Position, axis};
  throw ParseError(line, cat("unknown channel '", tok, "'"));
}

const char* channel_name(const Channel& c) {
  static const char* names[2][3] = {
      {"Xrotation", "Yrotation", "Zrotation"},
      {"Xposition", "Yposition", "Zposition"}};
  return names[c.kind == Channel::Kind::Position ? 1 : 0]
              [static_cast<int>(c.axis)];
}

void parse_joint_body(Lexer& lex, Skeleton& skel, int joint_index) {
  lex.expect("{");
  lex.expect("OFFSET");
  Eigen::Vector3d off;
  for (int i = 0; i < 3; ++i) off[i] = lex.expect_number("OFFSET value");
  skel.joints[static_cast<std::size_t>(joint_index)].offset = off;

  lex.expect("CHANNELS");
  const double nch = lex.expect_number("channel count");
  if (nch != 3 && nch != 6)
    throw ParseError(lex.line(), cat("unsupported channel count ", nch));
  for (int i = 0; i < static_cast<int>(nch); ++i) {
    const std::string tok = lex.expect_any("channel name");
    skel.joints[static_cast<std::size_t>(joint_index)].channels.push_back(
        parse_channel_name(tok, lex.line()));
  }

  for (;;) {
    const std::string tok = lex.expect_any("JOINT, End Site or }");
    if (tok == "}") return;
    if (tok == "JOINT") {
      const std::string name = lex.expect_any("joint name");
      skel.joints.push_back(Joint{name, joint_index, {}, {}});
      parse_joint_body(lex, skel, static_cast<int>(skel.joints.size()) - 1);
    } else if (tok == "End") {
      lex.expect("Site");
      lex.expect("{");
      lex.expect("OFFSET");
      EndSite es;
      es.parent = joint_index;
      for (int i = 0; i < 3; ++i) es.offset[i] = lex.expect_number("OFFSET value");
      skel.end_sites.push_back(es);
      lex.expect("}");
    } else {
      throw ParseError(lex.line(), cat("expected JOINT, End Site or }, got '", tok, "'"));
    }
  }
}

}  // namespace

std::array<Axis, 3> Joint::rotation_order() const {
  std::array<Axis, 3> order{};
  std::size_t n = 0;
  for (const Channel& c : channels)
    if (c.kind == Channel::Kind::Rotation && n < 3) order[n++] = c.axis;
  if (n != 3) throw std::invalid_argument(cat("joint '", name, "' lacks 3 rotation channels"));
  return order;
}

bool Joint::has_position_channels() const {
  for (const Channel& c : channels)
    if (c.kind == Channel::Kind::Position) return true;
  return false;
}

std::size_t Skeleton::total_channels() const {
  std::size_t n = 0;
  for (const Joint& j : joints) n += j.channels.size();
  return n;
}

int Skeleton::find_joint(const std::string& name) const {
  for (std::size_t i = 0; i < joints.size(); ++i)
    if (joints[i].name == name) return static_cast<int>(i);
  return -1;
}

void Skeleton::validate() const {
  if (joints.empty()) throw std::invalid_argument("skeleton has no joints");
  std::size_t roots = 0;
  for (std::size_t i = 0; i < joints.size(); ++i) {
    const Joint& j = joints[i];
    if (j.parent < 0) {
      ++roots;
    } else if (static_cast<std::size_t>(j.parent) >= i) {
      throw std::invalid_argument(
          cat("joint '", j.name, "' parent index is not below its own"));
    }
    std::array<bool, 3> rot_seen{}, pos_seen{};
    std::size_t rot_n = 0;
    for (const Channel& c : j.channels) {
      auto& seen = c.kind == Channel::Kind::Rotation ? rot_seen : pos_seen;
      if (seen[static_cast<std::size_t>(c.axis)])
        throw std::invalid_argument(cat("joint '", j.name, "' repeats a channel axis"));
      seen[static_cast<std::size_t>(c.axis)] = true;
      rot_n += (c.kind == Channel::Kind::Rotation);
    }
    if (rot_n != 3)
      throw std::invalid_argument(
          cat("joint '", j.name, "' must have exactly 3 rotation channels"));
    if (i != 0 && j.has_position_channels())
      throw std::invalid_argument(
          cat("position channels only allowed on the root (joint '", j.name, "')"));
  }
  if (roots != 1) throw std::invalid_argument(cat("expected 1 root joint, found ", roots));
  for (const EndSite& es : end_sites)
    if (es.parent < 0 || static_cast<std::size_t>(es.parent) >= joints.size())
      throw std::invalid_argument("end site with invalid parent");
}

BvhDocument parse_bvh(std::istream& in) {
  Lexer lex(in);
  lex.expect("HIERARCHY");
  lex.expect("ROOT");

  auto skel = std::make_shared<Skeleton>();
  skel->joints.push_back(Joint{lex.expect_any("root name"), -1, {}, {}});
  parse_joint_body(lex, *skel, 0);
  skel->validate();

  lex.expect("MOTION");
  lex.expect("Frames:");
  const double frames_d = lex.expect_number("frame count");
  if (frames_d < 1 || frames_d != std::floor(frames_d))
    throw ParseError(lex.line(), cat("bad frame count ", frames_d));
  const auto n_frames = static_cast<std::size_t>(frames_d);
  lex.expect("Frame");
  lex.expect("Time:");
  const double frame_time = lex.expect_number("frame time");
  if (frame_time <= 0)
    throw ParseError(lex.line(), cat("frame time must be positive, got ", frame_time));
  lex.skip_to_line_end();

  BvhDocument doc;
  doc.frame_time = frame_time;
  const std::size_t n_channels = skel->total_channels();
  doc.frames = MatrixRM::Zero(static_cast<Eigen::Index>(n_frames),
                              static_cast<Eigen::Index>(n_channels));

  std::string line;
  std::size_t frame = 0;
  while (frame < n_frames) {
    if (!std::getline(lex.stream(), line))
      throw ParseError(lex.line(), cat("expected ", n_frames, " frames, found ", frame));
    lex.count_line();
    std::istringstream ls(line);
    std::vector<double> values;
    double v;
    while (ls >> v) values.push_back(v);
    if (values.empty()) continue;  // blank line
    if (values.size() != n_channels)
      throw ParseError(lex.line() - 1,
                       cat("frame ", frame, " has ", values.size(),
                           " values, expected ", n_channels, " channels"));
    for (std::size_t c = 0; c < n_channels; ++c)
      doc.frames(static_cast<Eigen::Index>(frame), static_cast<Eigen::Index>(c)) = values[c];
    ++frame;
  }
  doc.skeleton = std::move(skel);
  return doc;
}

BvhDocument parse_bvh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(cat("cannot open bvh file '", path, "'"));
  return parse_bvh(in);
}

namespace {

void write_number(std::ostream& out, double v, const char* fmt) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  out << buf;
}

void serialize_joint(const Skeleton& skel, std::size_t j, std::ostream& out,
                     int depth) {
  const Joint& joint = skel.joints[j];
  const std::string indent(static_cast<std::size_t>(depth), '\t');
  out << indent << (depth == 0 ? "ROOT " : "JOINT ") << joint.name << "\n";
  out << indent << "{\n";
  const std::string inner(static_cast<std::size_t>(depth) + 1, '\t');
  out << inner << "OFFSET";
  for (int i = 0; i < 3; ++i) {
    out << ' ';
    write_number(out, joint.offset[i], "%.6f");
  }
  out << "\n" << inner << "CHANNELS " << joint.channels.size();
  for (const Channel& c : joint.channels) out << ' ' << channel_name(c);
  out << "\n";
  for (std::size_t k = 0; k < skel.joints.size(); ++k)
    if (skel.joints[k].parent == static_cast<int>(j))
      serialize_joint(skel, k, out, depth + 1);
  for (const EndSite& es : skel.end_sites)
    if (es.parent == static_cast<int>(j)) {
      out << inner << "End Site\n" << inner << "{\n";
      out << inner << "\tOFFSET";
      for (int i = 0; i < 3; ++i) {
        out << ' ';
        write_number(out, es.offset[i], "%.6f");
      }
      out << "\n" << inner << "}\n";
    }
  out << indent << "}\n";
}

}  // namespace

void serialize_bvh(const BvhDocument& doc, std::ostream& out) {
  const Skeleton& skel = *doc.skeleton;
  out << "HIERARCHY\n";
  serialize_joint(skel, 0, out, 0);
  out << "MOTION\n";
  out << "Frames: " << doc.frames.rows() << "\n";
  out << "Frame Time: ";
  write_number(out, doc.frame_time, "%.17g");
  out << "\n";
  for (Eigen::Index r = 0; r < doc.frames.rows(); ++r) {
    for (Eigen::Index c = 0; c < doc.frames.cols(); ++c) {
      if (c) out << ' ';
      write_number(out, doc.frames(r, c), "%.6f");
    }
    out << "\n";
  }
}

void write_bvh_file(const BvhDocument& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(cat("cannot open '", path, "' for writing"));
  serialize_bvh(doc, out);
  if (!out) throw std::runtime_error(cat("write failed for '", path, "'"));
}

}  // namespace gesturegen::motion
