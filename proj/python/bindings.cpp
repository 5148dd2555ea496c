#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pvt/error.hpp"
#include "pvt/pipeline.hpp"

namespace py = pybind11;

namespace {

pvt::Dataset dataset_from_array(const pvt::Matrix& a) {
    if (a.cols() != 5 && a.cols() != 6)
        throw pvt::ValidationError("expected 5 input columns or 6 columns including electrical_efficiency");
    std::vector<pvt::RawRecord> records(static_cast<std::size_t>(a.rows()));
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        auto& r = records[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < a.cols(); ++j) r.set(static_cast<pvt::Column>(j), a(i, j));
    }
    return pvt::Dataset(std::move(records));
}

pvt::Matrix dataset_to_array(const pvt::Dataset& d) {
    const auto cols = static_cast<Eigen::Index>(d.has_target() ? pvt::kColumnCount : pvt::kInputCount);
    pvt::Matrix a(static_cast<Eigen::Index>(d.size()), cols);
    for (std::size_t i = 0; i < d.size(); ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            a(static_cast<Eigen::Index>(i), j) = d[i].get(static_cast<pvt::Column>(j));
    return a;
}

py::dict metrics_dict(const pvt::MetricsReport& m) {
    return py::module_::import("json").attr("loads")(pvt::to_json(m).dump());
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "PV/T electrical efficiency regression models";

    static py::exception<pvt::ValidationError> validation_error(m, "ValidationError", PyExc_ValueError);
    static py::exception<pvt::IoError> io_error(m, "IoError", PyExc_OSError);
    static py::exception<pvt::NumericalError> numerical_error(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const pvt::ValidationError& e) {
            PyErr_SetString(validation_error.ptr(), e.what());
        } catch (const pvt::IoError& e) {
            PyErr_SetString(io_error.ptr(), e.what());
        } catch (const pvt::NumericalError& e) {
            PyErr_SetString(numerical_error.ptr(), e.what());
        }
    });

    m.attr("__version__") = std::string(pvt::kLibraryVersion);
    m.attr("COLUMNS") = std::vector<std::string>(pvt::kColumnNames.begin(), pvt::kColumnNames.end());

    m.def("generate_synthetic",
          [](std::size_t n, std::uint64_t seed, double noise_sd) {
              return dataset_to_array(pvt::generate_synthetic(n, seed, noise_sd));
          },
          py::arg("n"), py::arg("seed"), py::arg("noise_sd") = 0.1,
          "n×6 array in schema column order.");
    m.def("load_csv", [](const std::string& path) { return dataset_to_array(pvt::load_csv_inputs(path)); },
          py::arg("path"));

    m.def("train",
          [](const std::string& config_json, const pvt::Matrix& data) {
              const auto cfg = pvt::run_config_from_json(pvt::Json::parse(config_json));
              const auto out = pvt::run_training(cfg, dataset_from_array(data));
              return py::make_tuple(pvt::to_json(out.bundle).dump(), out.report.dump(), out.history);
          },
          py::arg("config_json"), py::arg("data"),
          "Returns (model JSON, report JSON, cost history).");
    m.def("predict",
          [](const std::string& model_json, const pvt::Matrix& data) {
              return pvt::bundle_from_json(pvt::Json::parse(model_json)).predict(dataset_from_array(data));
          },
          py::arg("model_json"), py::arg("data"));

    m.def("metrics", [](const pvt::Vector& y_exp, const pvt::Vector& y_cal) {
        return metrics_dict(pvt::metrics(y_exp, y_cal));
    }, py::arg("y_exp"), py::arg("y_cal"));
    m.def("hat_diagonal", &pvt::hat_diagonal, py::arg("x"));
    m.def("warning_leverage", &pvt::warning_leverage, py::arg("k"), py::arg("n"));
    m.def("relevancy_factor", &pvt::relevancy_factor, py::arg("x"), py::arg("y"));
    m.def("count_parameters", &pvt::count_parameters, py::arg("n_clusters"), py::arg("n_variables"),
          py::arg("n_mf_params"));
    m.def("rbf_kernel",
          [](const pvt::Vector& x, const pvt::Vector& xk, double sigma2) { return pvt::rbf_kernel(x, xk, sigma2); },
          py::arg("x"), py::arg("xk"), py::arg("sigma2"));
    m.def("andrews_curve",
          [](const std::vector<double>& x, double t) { return pvt::andrews_curve(x, t); }, py::arg("x"),
          py::arg("t"));
}
