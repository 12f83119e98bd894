#include "wixup/types.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wixup/error.hpp"

namespace wixup {

LabelKind label_kind(const Label& label) {
  return std::holds_alternative<Keypoints>(label) ? LabelKind::Keypoints
                                                  : LabelKind::ClassProbs;
}

std::size_t label_size(const Label& label) {
  if (const auto* kp = std::get_if<Keypoints>(&label)) return kp->joints.size();
  return std::get<ClassProbs>(label).probs.size();
}

std::vector<SequenceRange> sequences(const Dataset& dataset) {
  std::vector<SequenceRange> out;
  const auto& frames = dataset.frames;
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= frames.size(); ++i) {
    if (i == frames.size() || frames[i].seq_id != frames[begin].seq_id) {
      if (i > begin) out.push_back({frames[begin].seq_id, begin, i});
      begin = i;
    }
  }
  return out;
}

void validate_frame(const Frame& frame, const DatasetMeta& meta) {
  auto fail = [&](const std::string& what) {
    std::ostringstream os;
    os << "frame (seq " << frame.seq_id << ", t " << frame.t << "): " << what;
    throw DataError(os.str());
  };
  if (!std::isfinite(frame.t)) fail("non-finite timestamp");
  const bool want_extras = meta.dims == 5;
  for (const auto& p : frame.points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
      fail("non-finite coordinate");
    if (p.extras.has_value() != want_extras)
      fail("dimensionality mismatch: dataset declares " +
           std::to_string(meta.dims) + "D points");
    if (p.extras && (!std::isfinite(p.extras->doppler) ||
                     !std::isfinite(p.extras->intensity)))
      fail("non-finite doppler/intensity");
  }
  if (label_kind(frame.label) != meta.label) fail("mixed label variants");
  if (label_size(frame.label) != meta.label_size)
    fail("label dimension " + std::to_string(label_size(frame.label)) +
         " does not match dataset " + std::to_string(meta.label_size));
  if (const auto* kp = std::get_if<Keypoints>(&frame.label)) {
    for (const auto& j : kp->joints)
      for (double v : j)
        if (!std::isfinite(v)) fail("non-finite keypoint");
  } else {
    const auto& probs = std::get<ClassProbs>(frame.label).probs;
    double sum = 0.0;
    for (double v : probs) {
      if (!std::isfinite(v) || v < 0.0) fail("negative or non-finite class probability");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) fail("class probabilities do not sum to 1");
  }
}

void normalize(Dataset& dataset) {
  if (dataset.meta.dims != 3 && dataset.meta.dims != 5)
    throw DataError("point dimensionality must be 3 or 5");
  for (const auto& f : dataset.frames) validate_frame(f, dataset.meta);
  std::stable_sort(dataset.frames.begin(), dataset.frames.end(),
                   [](const Frame& a, const Frame& b) {
                     if (a.seq_id != b.seq_id) return a.seq_id < b.seq_id;
                     return a.t < b.t;
                   });
  for (std::size_t i = 1; i < dataset.frames.size(); ++i) {
    const auto& prev = dataset.frames[i - 1];
    const auto& cur = dataset.frames[i];
    if (prev.seq_id == cur.seq_id && !(prev.t < cur.t))
      throw DataError("non-monotone timestamps in sequence " + cur.seq_id);
  }
}

}  // namespace wixup
