#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "quatnn/data.hpp"
#include "quatnn/ghr.hpp"
#include "quatnn/gradcheck.hpp"
#include "quatnn/network.hpp"
#include "quatnn/train.hpp"
#include "quatnn/verify.hpp"

namespace py = pybind11;
using namespace quatnn;

namespace {

QuatFunction wrap_callable(const py::function& f) {
    return QuatFunction{
        [f](const Quaternion& q) { return f(q).cast<Quaternion>(); }, nullptr};
}

std::string repr_quaternion(const Quaternion& q) {
    std::ostringstream os;
    os << "Quaternion(" << q.w << ", " << q.x << ", " << q.y << ", " << q.z << ")";
    return os.str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Quaternion neural network core with GHR-calculus gradients";

    py::enum_<Involution>(m, "Involution")
        .value("NONE", Involution::None)
        .value("I", Involution::I)
        .value("J", Involution::J)
        .value("K", Involution::K);

    py::enum_<Activation>(m, "Activation")
        .value("IDENTITY", Activation::Identity)
        .value("TANHSHRINK", Activation::Tanhshrink);

    py::class_<Quaternion>(m, "Quaternion")
        .def(py::init<>())
        .def(py::init<double, double, double, double>(), py::arg("w"), py::arg("x"),
             py::arg("y"), py::arg("z"))
        .def_readwrite("w", &Quaternion::w)
        .def_readwrite("x", &Quaternion::x)
        .def_readwrite("y", &Quaternion::y)
        .def_readwrite("z", &Quaternion::z)
        .def("__getitem__",
             [](const Quaternion& q, int a) {
                 if (a < 0 || a > 3) throw py::index_error();
                 return q[a];
             })
        .def("__add__", [](const Quaternion& a, const Quaternion& b) { return a + b; })
        .def("__sub__", [](const Quaternion& a, const Quaternion& b) { return a - b; })
        .def("__mul__", [](const Quaternion& a, const Quaternion& b) { return a * b; })
        .def("__rmul__", [](const Quaternion& a, double s) { return s * a; })
        .def("__mul__", [](const Quaternion& a, double s) { return a * s; })
        .def("__neg__", [](const Quaternion& a) { return -a; })
        .def("__eq__", [](const Quaternion& a, const Quaternion& b) { return a == b; })
        .def("__repr__", &repr_quaternion);

    m.def("conj", [](const Quaternion& q) { return conj(q); });
    m.def("hadamard", &hadamard);
    m.def("norm", [](const Quaternion& q) { return norm(q); });
    m.def("norm_sq", [](const Quaternion& q) { return norm_sq(q); });
    m.def("inverse", [](const Quaternion& q) { return inverse(q); });
    m.def("involution", [](const Quaternion& q, Involution a) { return involution(q, a); });
    m.def("conj_involution",
          [](const Quaternion& q, Involution a) { return conj_involution(q, a); });

    py::class_<ComponentGradient>(m, "ComponentGradient")
        .def(py::init<>())
        .def(py::init<Quaternion, Quaternion, Quaternion, Quaternion>(), py::arg("d0"),
             py::arg("d1"), py::arg("d2"), py::arg("d3"))
        .def_readwrite("d0", &ComponentGradient::d0)
        .def_readwrite("d1", &ComponentGradient::d1)
        .def_readwrite("d2", &ComponentGradient::d2)
        .def_readwrite("d3", &ComponentGradient::d3);

    py::class_<GhrDirection>(m, "GhrDirection")
        .def(py::init<>())
        .def(py::init<Quaternion, bool>(), py::arg("mu"), py::arg("conjugated") = false)
        .def_readwrite("mu", &GhrDirection::mu)
        .def_readwrite("conjugated", &GhrDirection::conjugated);

    m.def("hr_derivative", &hr_derivative, py::arg("gradient"), py::arg("variant"));
    m.def("hr_conjugate_derivative", &hr_conjugate_derivative, py::arg("gradient"),
          py::arg("variant"));
    m.def("ghr_derivative", &ghr_derivative, py::arg("gradient"), py::arg("direction"));
    m.def("naive_derivative", &naive_derivative, py::arg("gradient"));
    m.def(
        "finite_difference_gradient",
        [](const py::function& f, const Quaternion& at, double h) {
            return finite_difference_gradient(wrap_callable(f), at, h);
        },
        py::arg("f"), py::arg("at"), py::arg("h") = kDefaultFdStep);
    m.def(
        "ghr_product_rule",
        [](const py::function& f, const py::function& g, const Quaternion& at,
           const GhrDirection& dir, double h) {
            return ghr_product_rule(wrap_callable(f), wrap_callable(g), at, dir, h);
        },
        py::arg("f"), py::arg("g"), py::arg("at"),
        py::arg("direction") = GhrDirection{}, py::arg("h") = kDefaultFdStep);
    m.def("ghr_chain_rule", &ghr_chain_rule, py::arg("outer"), py::arg("inner_traces"));

    py::class_<RouteResult>(m, "RouteResult")
        .def_readonly("route", &RouteResult::route)
        .def_readonly("expect_mismatch", &RouteResult::expect_mismatch)
        .def_readonly("points", &RouteResult::points)
        .def_readonly("degenerate_points", &RouteResult::degenerate_points)
        .def_readonly("mismatch_min", &RouteResult::mismatch_min)
        .def_readonly("mismatch_max", &RouteResult::mismatch_max)
        .def("as_expected", &RouteResult::as_expected)
        .def("verdict", &RouteResult::verdict);

    py::class_<FailureReport>(m, "FailureReport")
        .def_readonly("seed", &FailureReport::seed)
        .def_readonly("points", &FailureReport::points)
        .def_readonly("routes", &FailureReport::routes)
        .def("all_as_expected", &FailureReport::all_as_expected)
        .def("to_text", &FailureReport::to_text)
        .def("to_kv", &FailureReport::to_kv);

    m.def("demonstrate_rule_failures", &demonstrate_rule_failures, py::arg("seed"),
          py::arg("points") = 100);

    py::class_<IdentityCheck>(m, "IdentityCheck")
        .def_readonly("name", &IdentityCheck::name)
        .def_readonly("samples", &IdentityCheck::samples)
        .def_readonly("max_abs_error", &IdentityCheck::max_abs_error);

    m.def("involution_identity_suite", &involution_identity_suite, py::arg("seed"),
          py::arg("samples") = 1000);

    py::class_<QMatrix>(m, "QMatrix")
        .def(py::init<std::size_t, std::size_t>(), py::arg("rows"), py::arg("cols"))
        .def_property_readonly("rows", &QMatrix::rows)
        .def_property_readonly("cols", &QMatrix::cols)
        .def("__getitem__",
             [](const QMatrix& w, std::pair<std::size_t, std::size_t> idx) {
                 if (idx.first >= w.rows() || idx.second >= w.cols())
                     throw py::index_error();
                 return w(idx.first, idx.second);
             })
        .def("__setitem__",
             [](QMatrix& w, std::pair<std::size_t, std::size_t> idx,
                const Quaternion& q) {
                 if (idx.first >= w.rows() || idx.second >= w.cols())
                     throw py::index_error();
                 w(idx.first, idx.second) = q;
             });

    m.def("matvec", &matvec, py::arg("w"), py::arg("a"));

    py::class_<DenseLayer>(m, "DenseLayer")
        .def(py::init<>())
        .def_readwrite("weights", &DenseLayer::weights)
        .def_readwrite("bias", &DenseLayer::bias)
        .def_readwrite("activation", &DenseLayer::activation)
        .def_property_readonly("inputs", &DenseLayer::inputs)
        .def_property_readonly("outputs", &DenseLayer::outputs);

    py::class_<Network>(m, "Network")
        .def(py::init<>())
        .def_readwrite("layers", &Network::layers)
        .def_property_readonly("input_size", &Network::input_size)
        .def_property_readonly("output_size", &Network::output_size)
        .def("validate", &Network::validate);

    py::class_<ForwardTrace>(m, "ForwardTrace")
        .def_readonly("input", &ForwardTrace::input)
        .def_readonly("pre_activations", &ForwardTrace::pre_activations)
        .def_readonly("activations", &ForwardTrace::activations)
        .def("output", [](const ForwardTrace& t) { return t.output(); });

    py::class_<LayerGradients>(m, "LayerGradients")
        .def_readonly("dw", &LayerGradients::dw)
        .def_readonly("db", &LayerGradients::db);

    m.def("forward", &forward, py::arg("net"), py::arg("input"));
    m.def("loss", &loss, py::arg("output"), py::arg("target"));
    m.def("backward", &backward, py::arg("net"), py::arg("trace"), py::arg("target"));
    m.def("sgd_step", &sgd_step, py::arg("net"), py::arg("gradients"), py::arg("lr"));

    py::class_<GradCheckReport>(m, "GradCheckReport")
        .def_readonly("parameters", &GradCheckReport::parameters)
        .def_readonly("max_abs_error", &GradCheckReport::max_abs_error)
        .def_readonly("max_rel_error", &GradCheckReport::max_rel_error)
        .def("passed", &GradCheckReport::passed, py::arg("tol"))
        .def("summary", &GradCheckReport::summary);

    m.def("gradient_check", &gradient_check, py::arg("net"), py::arg("input"),
          py::arg("target"), py::arg("h") = kDefaultFdStep);

    py::class_<AppendixGradients>(m, "AppendixGradients")
        .def_readonly("dw", &AppendixGradients::dw)
        .def_readonly("db", &AppendixGradients::db)
        .def_readonly("degenerate", &AppendixGradients::degenerate);

    m.def("appendix_product_rule_gradient", &appendix_product_rule_gradient,
          py::arg("w"), py::arg("a"), py::arg("d"));

    py::class_<Dataset>(m, "Dataset")
        .def_readonly("inputs", &Dataset::inputs)
        .def_readonly("targets", &Dataset::targets)
        .def_readonly("input_size", &Dataset::input_size)
        .def_readonly("output_size", &Dataset::output_size)
        .def_readonly("seed", &Dataset::seed)
        .def_readonly("teacher_description", &Dataset::teacher_description)
        .def("__len__", &Dataset::size);

    m.def("make_teacher", &make_teacher, py::arg("shape"), py::arg("activation"),
          py::arg("seed"));
    m.def("gen_dataset", &gen_dataset, py::arg("teacher"), py::arg("n"), py::arg("seed"));
    m.def("save_dataset", &save_dataset, py::arg("dataset"), py::arg("path"));
    m.def("load_dataset", &load_dataset, py::arg("path"));
    m.def("save_network", &save_network, py::arg("net"));
    m.def("load_network", &load_network, py::arg("text"));
    m.def("save_network_file", &save_network_file, py::arg("net"), py::arg("path"));
    m.def("load_network_file", &load_network_file, py::arg("path"));

    py::class_<TrainConfig>(m, "TrainConfig")
        .def(py::init<>())
        .def_readwrite("epochs", &TrainConfig::epochs)
        .def_readwrite("lr", &TrainConfig::lr)
        .def_readwrite("batch_size", &TrainConfig::batch_size)
        .def_readwrite("shape", &TrainConfig::shape)
        .def_readwrite("activation", &TrainConfig::activation)
        .def_readwrite("seed_teacher", &TrainConfig::seed_teacher)
        .def_readwrite("seed_student", &TrainConfig::seed_student)
        .def_readwrite("seed_data", &TrainConfig::seed_data)
        .def_readwrite("seed_shuffle", &TrainConfig::seed_shuffle)
        .def("validate", &TrainConfig::validate);

    py::class_<EpochMetrics>(m, "EpochMetrics")
        .def_readonly("epoch", &EpochMetrics::epoch)
        .def_readonly("train_loss", &EpochMetrics::train_loss)
        .def_readonly("val_loss", &EpochMetrics::val_loss)
        .def_readonly("wdiff_mean", &EpochMetrics::wdiff_mean)
        .def_readonly("wdiff_min", &EpochMetrics::wdiff_min)
        .def_readonly("wdiff_max", &EpochMetrics::wdiff_max);

    py::class_<TrainResult>(m, "TrainResult")
        .def_readonly("net", &TrainResult::net)
        .def_readonly("history", &TrainResult::history);

    m.def(
        "train",
        [](const Network& student, const Dataset& train_ds, const Dataset& val_ds,
           const TrainConfig& cfg, const Network* reference) {
            return train(student, train_ds, val_ds, cfg, reference);
        },
        py::arg("student"), py::arg("train_dataset"), py::arg("val_dataset"),
        py::arg("config"), py::arg("reference") = nullptr);
    m.def("evaluate", &evaluate, py::arg("net"), py::arg("dataset"));
    m.def("weight_difference", &weight_difference, py::arg("a"), py::arg("b"));
    m.def("metrics_to_csv", &metrics_to_csv, py::arg("history"));

    py::class_<WeightDifference>(m, "WeightDifference")
        .def_readonly("mean", &WeightDifference::mean)
        .def_readonly("min", &WeightDifference::min)
        .def_readonly("max", &WeightDifference::max);
}
