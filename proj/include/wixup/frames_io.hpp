#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "wixup/types.hpp"

namespace wixup {

// JSONL dataset format, one object per line:
//
//   {"meta":{"label":"keypoints","J":19,"dims":3}}          optional header
//   {"seq":"a","t":0.1,"points":[[x,y,z],...],"label":{"keypoints":[[x,y,z],...]}}
//   {"seq":"a","t":0.2,"points":[[x,y,z,D,I],...],"label":{"class":1,"num_classes":3}}
//   {"seq":"a","t":0.3,"points":[],"label":{"probs":[0.5,0.5,0]}}
//
// Class labels are expanded to probability vectors on ingestion. Without a
// header the meta is inferred from the first frame (dims from the first
// frame that has points; 3 when every frame is empty).

Dataset parse_dataset(std::istream& in);
Dataset read_dataset(const std::filesystem::path& path);

/// Byte-deterministic: fixed key order, shortest round-trip floats, one frame
/// per line. An empty dataset produces no output at all. The meta header is
/// written only when it cannot be inferred from the frames (5D with no points).
void format_dataset(const Dataset& dataset, std::ostream& out);
void write_dataset(const Dataset& dataset, const std::filesystem::path& path);

/// Serializes one frame as a single JSON line without the trailing newline.
std::string format_frame(const Frame& frame);

/// Shortest decimal that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace wixup
