// Marshalling only: every call converts arrays to core types, runs the core,
// and converts back.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cli.hpp"
#include "cli_config.hpp"
#include "wixup/augment.hpp"
#include "wixup/error.hpp"
#include "wixup/frames_io.hpp"
#include "wixup/mixer.hpp"
#include "wixup/self_training.hpp"
#include "wixup/synthetic.hpp"

namespace py = pybind11;
using namespace wixup;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::string setting_text(const py::handle& value) {
  if (py::isinstance<py::bool_>(value)) return value.cast<bool>() ? "true" : "false";
  if (py::isinstance<py::str>(value)) return value.cast<std::string>();
  return py::str(value).cast<std::string>();
}

void apply(cli::Settings& s, const py::object& config) {
  if (config.is_none()) return;
  for (const auto& item : config.cast<py::dict>())
    s.set(py::str(item.first).cast<std::string>(), setting_text(item.second));
}

std::vector<Point> points_from(const Array& a) {
  if (a.ndim() != 2 || (a.shape(1) != 3 && a.shape(1) != 5))
    throw DataError("points must be an N x 3 or N x 5 array");
  const auto r = a.unchecked<2>();
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(a.shape(0)));
  for (py::ssize_t i = 0; i < a.shape(0); ++i) {
    Point p{r(i, 0), r(i, 1), r(i, 2), std::nullopt};
    if (a.shape(1) == 5) p.extras = PointExtras{r(i, 3), r(i, 4)};
    out.push_back(p);
  }
  return out;
}

Label label_from(const Array& a) {
  if (a.ndim() == 1) {
    const auto r = a.unchecked<1>();
    ClassProbs c;
    for (py::ssize_t i = 0; i < a.shape(0); ++i) c.probs.push_back(r(i));
    return c;
  }
  if (a.ndim() == 2 && a.shape(1) == 3) {
    const auto r = a.unchecked<2>();
    Keypoints k;
    for (py::ssize_t i = 0; i < a.shape(0); ++i) k.joints.push_back({r(i, 0), r(i, 1), r(i, 2)});
    return k;
  }
  throw DataError("label must be a J x 3 keypoint array or a length-C vector");
}

Array points_to(const std::vector<Point>& points, int dims) {
  Array a({static_cast<py::ssize_t>(points.size()), static_cast<py::ssize_t>(dims)});
  auto w = a.mutable_unchecked<2>();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    const auto n = static_cast<py::ssize_t>(i);
    w(n, 0) = p.x;
    w(n, 1) = p.y;
    w(n, 2) = p.z;
    if (dims == 5) {
      w(n, 3) = p.extras ? p.extras->doppler : 0.0;
      w(n, 4) = p.extras ? p.extras->intensity : 0.0;
    }
  }
  return a;
}

Array label_to(const Label& label) {
  if (const auto* c = std::get_if<ClassProbs>(&label)) {
    Array a(static_cast<py::ssize_t>(c->probs.size()));
    std::copy(c->probs.begin(), c->probs.end(), a.mutable_data());
    return a;
  }
  const auto& k = std::get<Keypoints>(label);
  Array a({static_cast<py::ssize_t>(k.joints.size()), py::ssize_t{3}});
  auto w = a.mutable_unchecked<2>();
  for (std::size_t j = 0; j < k.joints.size(); ++j)
    for (int c = 0; c < 3; ++c) w(static_cast<py::ssize_t>(j), c) = k.joints[j][c];
  return a;
}

Dataset dataset_from(const py::list& frames) {
  Dataset d;
  bool first = true;
  for (const auto& item : frames) {
    const auto f = item.cast<py::dict>();
    Frame frame;
    frame.seq_id = f["seq"].cast<std::string>();
    frame.t = f["t"].cast<double>();
    const auto pts = f["points"].cast<Array>();
    frame.points = points_from(pts);
    frame.label = label_from(f["label"].cast<Array>());
    if (first) {
      d.meta = {label_kind(frame.label), label_size(frame.label), static_cast<int>(pts.shape(1))};
      first = false;
    }
    d.frames.push_back(std::move(frame));
  }
  normalize(d);
  return d;
}

py::list dataset_to(const Dataset& d) {
  py::list out;
  for (const auto& f : d.frames) {
    py::dict item;
    item["seq"] = f.seq_id;
    item["t"] = f.t;
    item["points"] = points_to(f.points, d.meta.dims);
    item["label"] = label_to(f.label);
    out.append(item);
  }
  return out;
}

py::object parse_json(const std::string& text) { return py::module_::import("json").attr("loads")(text); }

}  // namespace

PYBIND11_MODULE(_wixup, m) {
  m.doc() = "Array-level access to the wixup core";
  m.attr("__version__") = "0.1.0";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);

  m.def(
      "mix",
      [](const Array& points0, const Array& label0, const Array& points1, const Array& label1,
         const py::object& config, std::uint64_t seed) {
        auto settings = cli::pipeline_settings();
        apply(settings, config);
        const auto cfg = cli::augment_config(settings).mix;
        if (points0.ndim() == 2 && points1.ndim() == 2 && points0.shape(1) != points1.shape(1))
          throw DataError("both frames need the same point width");
        Frame f0{"a", 0.0, points_from(points0), label_from(label0)};
        Frame f1{"a", 0.0, points_from(points1), label_from(label1)};
        validate_frame(f0, {label_kind(f0.label), label_size(f0.label), static_cast<int>(points0.shape(1))});
        validate_frame(f1, {label_kind(f0.label), label_size(f0.label), static_cast<int>(points1.shape(1))});
        Rng rng(seed);
        const auto out = mix_frames(f0, f1, cfg, rng);
        return py::make_tuple(points_to(out.points, static_cast<int>(points0.shape(1))),
                              label_to(out.label));
      },
      py::arg("points0"), py::arg("label0"), py::arg("points1"), py::arg("label1"),
      py::arg("config") = py::none(), py::arg("seed") = 0,
      "Mixes two frames; returns (points, label).");

  m.def(
      "augment",
      [](const py::list& frames, const py::object& config) {
        auto settings = cli::pipeline_settings();
        apply(settings, config);
        const auto cfg = cli::augment_config(settings);
        const auto d = dataset_from(frames);
        Dataset out;
        {
          py::gil_scoped_release release;
          out = augment(d, cfg);
        }
        return dataset_to(out);
      },
      py::arg("frames"), py::arg("config") = py::none(),
      "Original frames plus augmented ones, sorted by (seq, t).");

  m.def(
      "run_uda",
      [](const py::list& source, const py::list& target, const py::object& config) {
        auto settings = cli::pipeline_settings();
        apply(settings, config);
        const auto cfg = cli::uda_config(settings);
        const auto s = dataset_from(source), t = dataset_from(target);
        KnnPredictor predictor(settings.get_u64("knn_k"));
        std::string report;
        {
          py::gil_scoped_release release;
          report = report_json(run_uda(s, t, predictor, cfg));
        }
        return parse_json(report);
      },
      py::arg("source"), py::arg("target"), py::arg("config") = py::none(),
      "Self-training adaptation with the built-in k-NN predictor; returns the report.");

  m.def(
      "generate",
      [](const py::object& config, std::uint64_t seed) {
        auto settings = cli::synth_settings();
        apply(settings, config);
        return dataset_to(generate_synthetic(cli::synth_config(settings), seed));
      },
      py::arg("config") = py::none(), py::arg("seed") = 0, "Synthetic dataset.");

  m.def(
      "read_jsonl", [](const std::string& path) { return dataset_to(read_dataset(path)); },
      py::arg("path"));
  m.def(
      "write_jsonl",
      [](const py::list& frames, const std::string& path) { write_dataset(dataset_from(frames), path); },
      py::arg("frames"), py::arg("path"));

  m.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs a command-line invocation in-process; returns (code, stdout, stderr).");
}
