// SPDX-License-Identifier: Apache-2.0
#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "mimopa/allocation.hpp"
#include "mimopa/channel.hpp"
#include "mimopa/config.hpp"
#include "mimopa/errors.hpp"
#include "mimopa/harness.hpp"
#include "mimopa/metrics.hpp"
#include "mimopa/oracle.hpp"
#include "mimopa/parallel.hpp"
#include "mimopa/precoding.hpp"
#include "mimopa/rng.hpp"

namespace py = pybind11;
using namespace mimopa;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Downlink multiuser MIMO power allocation: precoders, MSE-driven "
              "adaptive allocators, grid search, and the experiment harness.";
    m.attr("__version__") = "0.1.0";

    // Exception hierarchy: base first, subclasses after, so the more specific
    // translators (registered later) run first.
    py::exception<Error> base(m, "Error", PyExc_RuntimeError);
    py::register_exception<DimensionError>(m, "DimensionError", base);
    py::register_exception<DomainError>(m, "DomainError", base);
    py::register_exception<DegenerateInputError>(m, "DegenerateInputError", base);
    py::register_exception<SingularityError>(m, "SingularityError", base);
    py::register_exception<DivergenceError>(m, "DivergenceError", base);
    py::register_exception<SearchBudgetError>(m, "SearchBudgetError", base);
    py::register_exception<ConfigError>(m, "ConfigError", base);
    py::register_exception<IoError>(m, "IoError", base);

    py::class_<Rng>(m, "Rng")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def_static(
            "substream",
            [](std::uint64_t seed, const std::vector<std::uint64_t>& path) {
                return Rng::substream(seed, path);
            },
            py::arg("seed"), py::arg("path"),
            "Independent stream for a (tag, index, ...) path under a master seed")
        .def("next_u64", &Rng::next_u64)
        .def("uniform01", &Rng::uniform01)
        .def("gaussian_pair",
             [](Rng& r) {
                 double g0 = 0.0, g1 = 0.0;
                 r.gaussian_pair(g0, g1);
                 return py::make_tuple(g0, g1);
             })
        .def("complex_gaussian", &Rng::complex_gaussian, py::arg("variance"));

    m.def("splitmix64", &splitmix64, py::arg("x"));

    py::enum_<PrecoderKind>(m, "PrecoderKind")
        .value("MF", PrecoderKind::MF)
        .value("ZF", PrecoderKind::ZF)
        .value("MMSE", PrecoderKind::MMSE);
    py::enum_<AllocatorKind>(m, "AllocatorKind")
        .value("ES", AllocatorKind::ES)
        .value("RMAPA", AllocatorKind::RMAPA)
        .value("MAPA", AllocatorKind::MAPA)
        .value("UPA", AllocatorKind::UPA)
        .value("RANDOM", AllocatorKind::RANDOM);
    py::enum_<SearchObjective>(m, "SearchObjective")
        .value("MSE", SearchObjective::MSE)
        .value("SUMRATE", SearchObjective::SUMRATE);
    py::enum_<ExperimentKind>(m, "ExperimentKind")
        .value("LEARNING_CURVE", ExperimentKind::LEARNING_CURVE)
        .value("SUMRATE_SWEEP", ExperimentKind::SUMRATE_SWEEP)
        .value("CONVEXITY_PROBE", ExperimentKind::CONVEXITY_PROBE);
    py::enum_<OutputFormat>(m, "OutputFormat")
        .value("CSV", OutputFormat::CSV)
        .value("JSON", OutputFormat::JSON);

    py::class_<ChannelMatrix>(m, "ChannelMatrix")
        .def(py::init<Matrix, std::vector<int>>(), py::arg("m"),
             py::arg("users") = std::vector<int>{})
        .def_readwrite("m", &ChannelMatrix::m)
        .def_readwrite("users", &ChannelMatrix::users)
        .def_property_readonly("n_rx", &ChannelMatrix::n_rx)
        .def_property_readonly("n_tx", &ChannelMatrix::n_tx);

    py::class_<ChannelSet>(m, "ChannelSet")
        .def_readonly("h_true", &ChannelSet::h_true)
        .def_readonly("h_est", &ChannelSet::h_est)
        .def_readonly("h_err", &ChannelSet::h_err)
        .def_readonly("sigma_e2", &ChannelSet::sigma_e2);

    py::class_<NoiseModel>(m, "NoiseModel")
        .def(py::init<double>(), py::arg("sigma_n2"))
        .def_readonly("sigma_n2", &NoiseModel::sigma_n2);

    py::class_<SystemConfig>(m, "SystemConfig")
        .def(py::init<>())
        .def_readwrite("n_tx", &SystemConfig::n_tx)
        .def_readwrite("users", &SystemConfig::users)
        .def_readwrite("sigma_n2", &SystemConfig::sigma_n2)
        .def_readwrite("sigma_e2", &SystemConfig::sigma_e2)
        .def_readwrite("e_tr", &SystemConfig::e_tr)
        .def_readwrite("seed", &SystemConfig::seed)
        .def_readwrite("mu", &SystemConfig::mu)
        .def_readwrite("iterations", &SystemConfig::iterations)
        .def_readwrite("es_grid_step", &SystemConfig::es_grid_step)
        .def_readwrite("robust_scale", &SystemConfig::robust_scale)
        .def("n_rx", &SystemConfig::n_rx)
        .def("validate", &SystemConfig::validate);

    m.def("sample_rayleigh", &sample_rayleigh, py::arg("n_r"), py::arg("n_t"),
          py::arg("rng"), py::arg("users") = std::vector<int>{});
    m.def("split_csit", &split_csit, py::arg("h_true"), py::arg("sigma_e2"),
          py::arg("rng"));
    m.def("sample_symbols", &sample_symbols, py::arg("n_r"), py::arg("rng"));
    m.def("transmit", &transmit, py::arg("precoder"), py::arg("a"), py::arg("s"));
    m.def("receive", &receive, py::arg("h"), py::arg("x"), py::arg("noise"),
          py::arg("rng"));
    m.def("receive_noiseless", &receive_noiseless, py::arg("h"), py::arg("x"));

    py::class_<Precoder>(m, "Precoder")
        .def(py::init([](Matrix matrix, PrecoderKind kind) {
                 Precoder p;
                 p.matrix = std::move(matrix);
                 p.kind = kind;
                 return p;
             }),
             py::arg("matrix"), py::arg("kind") = PrecoderKind::MF)
        .def_readonly("matrix", &Precoder::matrix)
        .def_readonly("kind", &Precoder::kind)
        .def_readonly("built_from", &Precoder::built_from);

    m.def("channel_fingerprint", &channel_fingerprint, py::arg("h"));
    m.def("normalize_columns", &normalize_columns, py::arg("m"));
    m.def("mf_precoder", &mf_precoder, py::arg("h_est"));
    m.def("zf_precoder", &zf_precoder, py::arg("h_est"));
    m.def("mmse_precoder", &mmse_precoder, py::arg("h_est"), py::arg("sigma_n2"),
          py::arg("e_tr"));
    m.def("make_precoder", &make_precoder, py::arg("kind"), py::arg("h_est"),
          py::arg("sigma_n2"), py::arg("e_tr"));

    py::class_<ErrorCovariance>(m, "ErrorCovariance")
        .def_static("homogeneous", &ErrorCovariance::homogeneous, py::arg("n_rx"),
                    py::arg("n_tx"), py::arg("sigma_e2"), py::arg("scale") = 1.0)
        .def_readwrite("xi", &ErrorCovariance::xi);

    py::class_<AllocatorTrace>(m, "AllocatorTrace")
        .def_readonly("iterates", &AllocatorTrace::iterates)
        .def_readonly("objective_values", &AllocatorTrace::objective_values)
        .def_readonly("beta_history", &AllocatorTrace::beta_history);

    m.def("mse_objective", &mse_objective, py::arg("h"), py::arg("precoder"),
          py::arg("a"), py::arg("sigma_n2"));
    m.def("mse_gradient", &mse_gradient, py::arg("h"), py::arg("precoder"),
          py::arg("a"));
    m.def("robust_gradient", &robust_gradient, py::arg("h_est"), py::arg("precoder"),
          py::arg("xi"), py::arg("a"));
    m.def("normalize_power", &normalize_power, py::arg("a"));
    m.def("mapa", &mapa, py::arg("h"), py::arg("precoder"), py::arg("mu"),
          py::arg("iterations"), py::arg("a0") = std::nullopt);
    m.def("rmapa", &rmapa, py::arg("h_est"), py::arg("precoder"), py::arg("sigma_e2"),
          py::arg("mu"), py::arg("iterations"), py::arg("robust_scale") = 1.0);
    m.def("upa", &upa, py::arg("n_r"));
    m.def("random_allocation", &random_allocation, py::arg("n_r"), py::arg("rng"));
    m.def("exhaustive_search", &exhaustive_search, py::arg("h"), py::arg("precoder"),
          py::arg("grid_step"), py::arg("objective"), py::arg("sigma_n2"));

    py::class_<RatePoint>(m, "RatePoint")
        .def_readonly("snr_db", &RatePoint::snr_db)
        .def_readonly("sum_rate", &RatePoint::sum_rate)
        .def_readonly("per_user_rates", &RatePoint::per_user_rates);

    py::class_<MsdCurve>(m, "MsdCurve")
        .def_readonly("values", &MsdCurve::values)
        .def_readonly("trials_averaged", &MsdCurve::trials_averaged);

    py::class_<ErgodicResult>(m, "ErgodicResult")
        .def_readonly("points", &ErgodicResult::points)
        .def_readonly("failed_trials", &ErgodicResult::failed_trials);

    m.def("sum_rate", &sum_rate, py::arg("h_true"), py::arg("precoder"), py::arg("a"),
          py::arg("sigma_n2"), py::arg("e_tr"), py::arg("user_partition"));
    m.def("msd", &msd, py::arg("traces"), py::arg("a_opt"));
    m.def("ergodic_sum_rate", &ergodic_sum_rate, py::arg("config"),
          py::arg("allocator"), py::arg("precoder_kind"), py::arg("snr_grid_db"),
          py::arg("n_channels"));

    py::class_<ExperimentSpec>(m, "ExperimentSpec")
        .def(py::init<>())
        .def_readwrite("kind", &ExperimentSpec::kind)
        .def_readwrite("system", &ExperimentSpec::system)
        .def_readwrite("precoders", &ExperimentSpec::precoders)
        .def_readwrite("allocators", &ExperimentSpec::allocators)
        .def_readwrite("trials", &ExperimentSpec::trials)
        .def_readwrite("snr_grid_db", &ExperimentSpec::snr_grid_db)
        .def_readwrite("theta_steps", &ExperimentSpec::theta_steps)
        .def_readwrite("output_path", &ExperimentSpec::output_path)
        .def_readwrite("output_format", &ExperimentSpec::output_format)
        .def("validate", &ExperimentSpec::validate);

    py::class_<ExperimentResult>(m, "ExperimentResult")
        .def_readonly("spec_fingerprint", &ExperimentResult::spec_fingerprint)
        .def_readonly("column_names", &ExperimentResult::column_names)
        .def_readonly("columns", &ExperimentResult::columns)
        .def_readonly("metadata", &ExperimentResult::metadata);

    m.def("spec_fingerprint", &spec_fingerprint, py::arg("spec"));
    m.def("run_learning_curve", &run_learning_curve, py::arg("spec"));
    m.def("run_sum_rate_sweep", &run_sum_rate_sweep, py::arg("spec"));
    m.def("run_convexity_probe", &run_convexity_probe, py::arg("spec"));
    m.def("run_experiment", &run_experiment, py::arg("spec"),
          py::call_guard<py::gil_scoped_release>());

    py::class_<ReadBack>(m, "ReadBack")
        .def_readonly("column_names", &ReadBack::column_names)
        .def_readonly("columns", &ReadBack::columns)
        .def_readonly("metadata", &ReadBack::metadata);

    m.def("parse_config", &parse_config, py::arg("path"));
    m.def("parse_config_text", &parse_config_text, py::arg("text"), py::arg("origin"));
    m.def("emit_result", &emit_result, py::arg("result"), py::arg("format"),
          py::arg("path"));
    m.def("read_result", &read_result, py::arg("path"), py::arg("format"));
    m.def("data_section", &data_section, py::arg("file_contents"), py::arg("format"));

    py::class_<OracleReport>(m, "OracleReport")
        .def_readonly("gradient_checks", &OracleReport::gradient_checks)
        .def_readonly("gradient_failures", &OracleReport::gradient_failures)
        .def_readonly("gradient_worst_rel_err", &OracleReport::gradient_worst_rel_err)
        .def_readonly("search_checks", &OracleReport::search_checks)
        .def_readonly("search_failures", &OracleReport::search_failures)
        .def_readonly("search_worst_gap", &OracleReport::search_worst_gap)
        .def("all_passed", &OracleReport::all_passed);

    m.def(
        "run_oracle_suite",
        [](const ExperimentSpec& spec) {
            std::ostringstream out;
            const OracleReport report = run_oracle_suite(spec, out);
            return py::make_tuple(report, out.str());
        },
        py::arg("spec"),
        "Runs the gradient and grid-search self checks; returns (report, text)");

    m.def("worker_count", &worker_count);
}
