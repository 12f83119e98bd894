#include "wixup/frames_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "wixup/error.hpp"

namespace wixup {
namespace {

using nlohmann::json;

[[noreturn]] void fail_line(std::size_t line, const std::string& what) {
  throw DataError("line " + std::to_string(line) + ": " + what);
}

double number_at(const json& j, std::size_t line, const char* what) {
  if (!j.is_number()) fail_line(line, std::string("expected number for ") + what);
  return j.get<double>();
}

Point parse_point(const json& j, std::size_t line) {
  if (!j.is_array() || (j.size() != 3 && j.size() != 5))
    fail_line(line, "point must be an array of 3 or 5 numbers");
  Point p;
  p.x = number_at(j[0], line, "x");
  p.y = number_at(j[1], line, "y");
  p.z = number_at(j[2], line, "z");
  if (j.size() == 5)
    p.extras = PointExtras{number_at(j[3], line, "doppler"),
                           number_at(j[4], line, "intensity")};
  return p;
}

Label parse_label(const json& j, std::size_t line) {
  if (!j.is_object()) fail_line(line, "label must be an object");
  if (j.contains("keypoints")) {
    const auto& arr = j.at("keypoints");
    if (!arr.is_array()) fail_line(line, "keypoints must be an array");
    Keypoints kp;
    for (const auto& row : arr) {
      if (!row.is_array() || row.size() != 3)
        fail_line(line, "keypoint must be an array of 3 numbers");
      kp.joints.push_back({number_at(row[0], line, "keypoint"),
                           number_at(row[1], line, "keypoint"),
                           number_at(row[2], line, "keypoint")});
    }
    return kp;
  }
  if (j.contains("class")) {
    if (!j.contains("num_classes")) fail_line(line, "class label needs num_classes");
    const auto& k = j.at("class");
    const auto& c = j.at("num_classes");
    if (!k.is_number_integer() || !c.is_number_integer())
      fail_line(line, "class and num_classes must be integers");
    const auto cls = k.get<long long>();
    const auto n = c.get<long long>();
    if (n < 1 || cls < 0 || cls >= n) fail_line(line, "class index out of range");
    ClassProbs probs;
    probs.probs.assign(static_cast<std::size_t>(n), 0.0);
    probs.probs[static_cast<std::size_t>(cls)] = 1.0;
    return probs;
  }
  if (j.contains("probs")) {
    const auto& arr = j.at("probs");
    if (!arr.is_array()) fail_line(line, "probs must be an array");
    ClassProbs probs;
    for (const auto& v : arr) probs.probs.push_back(number_at(v, line, "probability"));
    return probs;
  }
  fail_line(line, "label needs one of keypoints, class, probs");
}

DatasetMeta parse_meta(const json& j, std::size_t line) {
  if (!j.is_object()) fail_line(line, "meta must be an object");
  DatasetMeta meta;
  const std::string kind = j.value("label", "");
  if (kind == "keypoints") {
    meta.label = LabelKind::Keypoints;
    if (!j.contains("J") || !j.at("J").is_number_unsigned())
      fail_line(line, "keypoints meta needs J");
    meta.label_size = j.at("J").get<std::size_t>();
  } else if (kind == "class") {
    meta.label = LabelKind::ClassProbs;
    if (!j.contains("C") || !j.at("C").is_number_unsigned())
      fail_line(line, "class meta needs C");
    meta.label_size = j.at("C").get<std::size_t>();
  } else {
    fail_line(line, "meta label must be \"keypoints\" or \"class\"");
  }
  meta.dims = j.value("dims", 3);
  if (meta.dims != 3 && meta.dims != 5) fail_line(line, "dims must be 3 or 5");
  return meta;
}

void append_array3(std::string& out, double a, double b, double c) {
  out += '[';
  out += format_double(a);
  out += ',';
  out += format_double(b);
  out += ',';
  out += format_double(c);
}

std::string escape(const std::string& s) { return json(s).dump(); }

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw DataError("cannot format number");
  return std::string(buf, end);
}

Dataset parse_dataset(std::istream& in) {
  Dataset dataset;
  std::optional<DatasetMeta> meta;
  bool header_dims = false;
  std::optional<int> dims;
  std::map<std::string, double> last_t;
  std::string text;
  std::size_t line = 0;

  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      fail_line(line, std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) fail_line(line, "expected a JSON object");
    if (j.contains("meta")) {
      if (line != 1 || meta) fail_line(line, "meta header must be the first line");
      meta = parse_meta(j.at("meta"), line);
      dims = meta->dims;
      header_dims = true;
      continue;
    }
    for (const char* key : {"seq", "t", "points", "label"})
      if (!j.contains(key)) fail_line(line, std::string("missing key ") + key);
    if (!j.at("seq").is_string()) fail_line(line, "seq must be a string");
    if (!j.at("points").is_array()) fail_line(line, "points must be an array");

    Frame frame;
    frame.seq_id = j.at("seq").get<std::string>();
    frame.t = number_at(j.at("t"), line, "t");
    for (const auto& p : j.at("points")) frame.points.push_back(parse_point(p, line));
    frame.label = parse_label(j.at("label"), line);

    if (!frame.points.empty()) {
      const int frame_dims = frame.points.front().extras ? 5 : 3;
      if (!dims) dims = frame_dims;
      for (const auto& p : frame.points)
        if ((p.extras ? 5 : 3) != *dims)
          fail_line(line, "dimensionality mismatch: dataset " +
                              std::string(header_dims ? "header declares " : "uses ") +
                              std::to_string(*dims) + "D points");
    }
    if (!meta) meta = DatasetMeta{label_kind(frame.label), label_size(frame.label), 3};
    meta->dims = dims.value_or(3);

    try {
      validate_frame(frame, *meta);
    } catch (const DataError& e) {
      fail_line(line, e.what());
    }
    auto [it, inserted] = last_t.try_emplace(frame.seq_id, frame.t);
    if (!inserted) {
      if (!(it->second < frame.t))
        fail_line(line, "non-monotone timestamps in sequence " + frame.seq_id);
      it->second = frame.t;
    }
    dataset.frames.push_back(std::move(frame));
  }
  if (meta) dataset.meta = *meta;
  normalize(dataset);
  return dataset;
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return parse_dataset(in);
}

std::string format_frame(const Frame& frame) {
  std::string out;
  out.reserve(64 + frame.points.size() * 48);
  out += "{\"seq\":";
  out += escape(frame.seq_id);
  out += ",\"t\":";
  out += format_double(frame.t);
  out += ",\"points\":[";
  for (std::size_t i = 0; i < frame.points.size(); ++i) {
    const auto& p = frame.points[i];
    if (i) out += ',';
    append_array3(out, p.x, p.y, p.z);
    if (p.extras) {
      out += ',';
      out += format_double(p.extras->doppler);
      out += ',';
      out += format_double(p.extras->intensity);
    }
    out += ']';
  }
  out += "],\"label\":";
  if (const auto* kp = std::get_if<Keypoints>(&frame.label)) {
    out += "{\"keypoints\":[";
    for (std::size_t i = 0; i < kp->joints.size(); ++i) {
      if (i) out += ',';
      append_array3(out, kp->joints[i][0], kp->joints[i][1], kp->joints[i][2]);
      out += ']';
    }
    out += "]}";
  } else {
    const auto& probs = std::get<ClassProbs>(frame.label).probs;
    std::size_t ones = 0, zeros = 0, hot = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (probs[i] == 1.0) {
        ++ones;
        hot = i;
      } else if (probs[i] == 0.0 && !std::signbit(probs[i])) {
        ++zeros;
      }
    }
    if (ones == 1 && ones + zeros == probs.size()) {
      out += "{\"class\":" + std::to_string(hot) +
             ",\"num_classes\":" + std::to_string(probs.size()) + "}";
    } else {
      out += "{\"probs\":[";
      for (std::size_t i = 0; i < probs.size(); ++i) {
        if (i) out += ',';
        out += format_double(probs[i]);
      }
      out += "]}";
    }
  }
  out += '}';
  return out;
}

void format_dataset(const Dataset& dataset, std::ostream& out) {
  if (dataset.frames.empty()) return;
  const auto& meta = dataset.meta;
  // Label variant and size are always inferable from the first frame, and dims
  // from the first frame with points. Only a 5D dataset without any points
  // needs the header.
  bool has_points = false;
  for (const auto& f : dataset.frames) has_points = has_points || !f.points.empty();
  if (has_points || meta.dims == 3) {
    for (const auto& f : dataset.frames) out << format_frame(f) << '\n';
    return;
  }
  if (meta.label == LabelKind::Keypoints)
    out << "{\"meta\":{\"label\":\"keypoints\",\"J\":" << meta.label_size;
  else
    out << "{\"meta\":{\"label\":\"class\",\"C\":" << meta.label_size;
  out << ",\"dims\":" << meta.dims << "}}\n";
  for (const auto& f : dataset.frames) out << format_frame(f) << '\n';
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  format_dataset(dataset, out);
  out.flush();
  if (!out) throw DataError("write failed for " + path.string());
}

}  // namespace wixup
