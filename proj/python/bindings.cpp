// Copyright 2026 The MRLR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mrlr/align.hpp"
#include "mrlr/dictionary.hpp"
#include "mrlr/recognize.hpp"
#include "mrlr/solver.hpp"
#include "mrlr/synth.hpp"

namespace py = pybind11;
using namespace mrlr;

namespace {

py::exception<Error>* g_error_type = nullptr;

using Array2D = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Images cross the boundary as (height, width) float64 arrays.
Image to_image(const Array2D& arr) {
    if (arr.ndim() != 2) throw Error(ErrorKind::InvalidInput, "image must be a 2-D array");
    const auto h = static_cast<int>(arr.shape(0));
    const auto w = static_cast<int>(arr.shape(1));
    return Image(w, h, std::vector<double>(arr.data(), arr.data() + arr.size()));
}

Array2D to_array(const Image& img) {
    Array2D out({img.height(), img.width()});
    std::copy(img.data().begin(), img.data().end(), out.mutable_data());
    return out;
}

std::vector<Image> to_images(const std::vector<Array2D>& arrs) {
    std::vector<Image> out;
    out.reserve(arrs.size());
    for (const auto& a : arrs) out.push_back(to_image(a));
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Locality-constrained alignment and recognition";

    // Leaked on purpose: the type must outlive interpreter teardown.
    g_error_type = new py::exception<Error>(m, "MrlrError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object exc = py::handle(g_error_type->ptr())(e.what());
            exc.attr("kind") = to_string(e.kind());
            PyErr_SetObject(g_error_type->ptr(), exc.ptr());
        }
    });

    py::class_<Frame>(m, "Frame")
        .def(py::init<int, int>(), py::arg("width"), py::arg("height"))
        .def_readwrite("width", &Frame::width)
        .def_readwrite("height", &Frame::height)
        .def("__eq__", [](const Frame& a, const Frame& b) { return a == b; })
        .def("__repr__", [](const Frame& f) {
            return "Frame(" + std::to_string(f.width) + ", " + std::to_string(f.height) + ")";
        });

    py::class_<Similarity>(m, "Similarity")
        .def(py::init<double, double, double, double>(), py::arg("a") = 1.0, py::arg("b") = 0.0,
             py::arg("tx") = 0.0, py::arg("ty") = 0.0)
        .def_readwrite("a", &Similarity::a)
        .def_readwrite("b", &Similarity::b)
        .def_readwrite("tx", &Similarity::tx)
        .def_readwrite("ty", &Similarity::ty)
        .def_static("identity", &Similarity::identity)
        .def_static("translation", &Similarity::translation)
        .def("scale", &Similarity::scale)
        .def("valid", &Similarity::valid)
        .def("__eq__", [](const Similarity& a, const Similarity& b) { return a == b; })
        .def("__repr__", [](const Similarity& t) {
            return "Similarity(a=" + std::to_string(t.a) + ", b=" + std::to_string(t.b) +
                   ", tx=" + std::to_string(t.tx) + ", ty=" + std::to_string(t.ty) + ")";
        });
    m.def("compose", &compose, "Apply t2 first, then t1.");
    m.def("invert", &invert);
    m.def("add_step", &add_step);

    m.def("warp", [](const Array2D& img, const Similarity& tau, const Frame& frame) {
        return to_array(warp(to_image(img), tau, frame));
    });
    m.def("vectorize_normalize", [](const Array2D& img) { return vectorize_normalize(to_image(img)); });
    m.def("jacobian", [](const Array2D& img, const Similarity& tau, const Frame& frame) {
        return Eigen::MatrixXd(jacobian(to_image(img), tau, frame));
    });

    py::class_<Dictionary>(m, "Dictionary")
        .def_readonly("frame", &Dictionary::frame)
        .def_readonly("atoms", &Dictionary::atoms)
        .def_readonly("labels", &Dictionary::labels)
        .def_property_readonly("outside",
                               [](const Dictionary& d) {
                                   return std::vector<bool>(d.outside.begin(), d.outside.end());
                               })
        .def_property_readonly("rows", &Dictionary::rows)
        .def_property_readonly("cols", &Dictionary::cols)
        .def("subjects", &Dictionary::subjects)
        .def("outside_count", &Dictionary::outside_count)
        .def("save", [](const Dictionary& d, const std::string& path) { save_dictionary(d, path); });
    m.attr("OUTSIDE_LABEL") = kOutsideLabel;

    m.def(
        "build_dictionary",
        [](const std::vector<Array2D>& images, const std::vector<Label>& labels, const Frame& frame,
           const std::vector<Array2D>& outside) {
            const auto imgs = to_images(images);
            Dictionary d = build_dictionary(imgs, labels, frame);
            if (!outside.empty()) d = augment_with_outside(d, to_images(outside), frame);
            return d;
        },
        py::arg("images"), py::arg("labels"), py::arg("frame"),
        py::arg("outside") = std::vector<Array2D>{});
    m.def("load_dictionary", &load_dictionary);
    m.def("without_outside", &without_outside);

    m.def(
        "locality_adaptor",
        [](const Dictionary& d, const Eigen::VectorXd& y, double sigma) {
            const LocalityAdaptor c = locality_adaptor(d, y, sigma);
            return py::make_tuple(c.penalties, c.best);
        },
        py::arg("dict"), py::arg("y_hat"), py::arg("sigma") = kDefaultSigma);

    py::class_<StepSolution>(m, "StepSolution")
        .def_readonly("delta_tau", &StepSolution::delta_tau)
        .def_readonly("objective", &StepSolution::objective)
        .def_readonly("residual_norm", &StepSolution::residual_norm)
        .def_readonly("x", &StepSolution::x);
    m.def("solve_naive", [](const Eigen::MatrixXd& atoms, const Eigen::VectorXd& penalties,
                            const Eigen::MatrixXd& jac, const Eigen::VectorXd& y) {
        return solve_naive(atoms, penalties, jac, y);
    });
    m.def("solve_block", [](const Eigen::MatrixXd& atoms, const Eigen::VectorXd& penalties,
                            const Eigen::MatrixXd& jac, const Eigen::VectorXd& y) {
        return solve_block(atoms, penalties, jac, y, build_gram_cache(atoms, penalties));
    });

    py::class_<AlignConfig>(m, "AlignConfig")
        .def(py::init<>())
        .def_readwrite("sigma", &AlignConfig::sigma)
        .def_readwrite("lcd_size", &AlignConfig::lcd_size)
        .def_readwrite("max_outer", &AlignConfig::max_outer)
        .def_readwrite("max_inner", &AlignConfig::max_inner)
        .def_readwrite("tol_step", &AlignConfig::tol_step)
        .def_readwrite("use_outside", &AlignConfig::use_outside)
        .def_static("mrlr1", &AlignConfig::mrlr1)
        .def_static("mrlr2", &AlignConfig::mrlr2, py::arg("s") = kDefaultLcdSize);

    py::class_<IterationRecord>(m, "IterationRecord")
        .def_readonly("outer", &IterationRecord::outer)
        .def_readonly("inner", &IterationRecord::inner)
        .def_readonly("delta_norm", &IterationRecord::delta_norm)
        .def_readonly("residual", &IterationRecord::residual)
        .def_readonly("objective", &IterationRecord::objective);

    py::class_<AlignResult>(m, "AlignResult")
        .def_readonly("tau", &AlignResult::tau_final)
        .def_property_readonly("aligned", [](const AlignResult& r) { return to_array(r.aligned); })
        .def_readonly("trace", &AlignResult::trace)
        .def_readonly("selected_atoms", &AlignResult::selected_atoms)
        .def_readonly("converged", &AlignResult::converged);

    py::class_<Aligner>(m, "Aligner")
        .def(py::init<const Dictionary&, AlignConfig>(), py::arg("dict"),
             py::arg("config") = AlignConfig::mrlr2())
        .def(
            "align",
            [](const Aligner& a, const Array2D& img, const Similarity& tau0) {
                const Image observed = to_image(img);
                py::gil_scoped_release release;
                return a.align(observed, tau0);
            },
            py::arg("image"), py::arg("tau0"))
        .def_property_readonly("frame", &Aligner::frame);

    py::class_<CodingResult>(m, "CodingResult")
        .def_readonly("x", &CodingResult::x)
        .def_readonly("classes", &CodingResult::classes)
        .def_readonly("class_residuals", &CodingResult::class_residuals)
        .def_readonly("predicted", &CodingResult::predicted)
        .def_readonly("converged", &CodingResult::converged)
        .def_readonly("iterations", &CodingResult::iterations);
    m.def("crc_code", &crc_code, py::arg("dict"), py::arg("y"), py::arg("lam") = kDefaultLambda);
    m.def(
        "src_code",
        [](const Dictionary& d, const Eigen::VectorXd& y, double lambda) {
            return src_code(d, y, lambda);
        },
        py::arg("dict"), py::arg("y"), py::arg("lam") = kDefaultLambda);

    py::class_<Recognition>(m, "Recognition")
        .def_readonly("predicted", &Recognition::predicted)
        .def_readonly("alignment", &Recognition::alignment)
        .def_readonly("coding", &Recognition::coding);
    m.def(
        "recognize",
        [](const Array2D& img, const Dictionary& d, const Similarity& tau0,
           const AlignConfig& cfg, const std::string& coder, double lambda) {
            return recognize_pipeline(to_image(img), d, tau0, cfg, parse_coder(coder), lambda);
        },
        py::arg("image"), py::arg("dict"), py::arg("tau0"),
        py::arg("config") = AlignConfig::mrlr2(), py::arg("coder") = "crc",
        py::arg("lam") = kDefaultLambda);

    py::class_<SynthSpec>(m, "SynthSpec")
        .def(py::init<>())
        .def_readwrite("seed", &SynthSpec::seed)
        .def_readwrite("subjects", &SynthSpec::subjects)
        .def_readwrite("samples", &SynthSpec::samples)
        .def_readwrite("holdout", &SynthSpec::holdout)
        .def_readwrite("outside", &SynthSpec::outside)
        .def_readwrite("frame", &SynthSpec::frame);
    py::class_<Probe>(m, "Probe")
        .def_property_readonly("image", [](const Probe& p) { return to_array(p.image); })
        .def_readonly("truth", &Probe::truth)
        .def_readonly("label", &Probe::label);
    m.def("synth_dictionary", &synth_dictionary);
    m.def("synth_probes", &synth_probes);
    m.def("perturb_translation", &perturb_translation);
    m.def("fiducial_error", &fiducial_error);
}
