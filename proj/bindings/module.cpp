#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "swagg/bounds.hpp"
#include "swagg/errors.hpp"
#include "swagg/forest.hpp"
#include "swagg/oracle.hpp"
#include "swagg/selector.hpp"
#include "swagg/spectral.hpp"
#include "swagg/synthetic.hpp"

namespace py = pybind11;
using namespace swagg;

namespace {

AssumptionParams make_params(const std::string& assumption, double mu, double sigma, double p,
                             int m, int ell, double c_min, double c_max) {
    const auto kind = assumption_from_string(assumption);
    if (!kind) throw DomainError("unknown assumption '" + assumption + "'");
    AssumptionParams params;
    params.kind = *kind;
    params.mu = mu;
    params.sigma = sigma;
    params.p = *kind == Assumption::Always ? 1.0 : p;
    params.m = *kind == Assumption::Poisson ? m : 1;
    params.ell = ell;
    params.c_min = c_min;
    params.c_max = c_max;
    return params;
}

WindowKind make_kind(const std::string& window) {
    const auto kind = window_kind_from_string(window);
    if (!kind) throw DomainError("unknown window '" + window + "'");
    return *kind;
}

py::dict bound_to_dict(const std::optional<AggregateBound>& bound) {
    py::dict d;
    if (!bound) {
        d["status"] = "NoRecords";
        return d;
    }
    d["status"] = "ok";
    d["lo"] = bound->lo;
    d["hi"] = bound->hi;
    d["clipped"] = bound->clipped;
    d["exact"] = bound->exact;
    return d;
}

}  // namespace

PYBIND11_MODULE(_swagg, m) {
    m.doc() = "Sliding-window aggregate bound estimation and feature ranking";

    py::class_<AssumptionParams>(m, "AssumptionParams")
        .def(py::init(&make_params), py::arg("assumption"), py::arg("mu"), py::arg("sigma"),
             py::arg("p"), py::arg("m"), py::arg("ell"), py::arg("c_min"), py::arg("c_max"))
        .def_readonly("mu", &AssumptionParams::mu)
        .def_readonly("sigma", &AssumptionParams::sigma)
        .def_readonly("p", &AssumptionParams::p)
        .def_readonly("m", &AssumptionParams::m)
        .def_readonly("ell", &AssumptionParams::ell)
        .def_readonly("c_min", &AssumptionParams::c_min)
        .def_readonly("c_max", &AssumptionParams::c_max)
        .def_property_readonly(
            "assumption", [](const AssumptionParams& p) { return std::string(to_string(p.kind)); });

    m.def(
        "fit_parameters",
        [](const std::vector<std::pair<std::int64_t, double>>& records, std::int64_t t0,
           std::int64_t freq, std::int64_t horizon, const std::string& override_kind,
           int m_cap) {
            const ResampledColumn col = resample(records, t0, freq, horizon);
            std::optional<Assumption> forced;
            if (!override_kind.empty()) {
                forced = assumption_from_string(override_kind);
                if (!forced) throw DomainError("unknown assumption '" + override_kind + "'");
            }
            std::optional<int> cap;
            if (m_cap > 0) cap = m_cap;
            return fit_parameters(col, forced, cap);
        },
        py::arg("records"), py::arg("t0"), py::arg("freq"), py::arg("horizon"),
        py::arg("override_kind") = "", py::arg("m_cap") = 0,
        "Resample (timestamp, value) records and fit distribution parameters");

    m.def(
        "count_distribution",
        [](const AssumptionParams& params, int w) { return count_distribution(params, w); },
        py::arg("params"), py::arg("w"));

    m.def(
        "stationary_mixture",
        [](const std::string& window, const AssumptionParams& params, int w) {
            const StationaryMixture mix = stationary_mixture(make_kind(window), params, w);
            py::dict d;
            d["weights"] = mix.weights;
            d["scale_means"] = mix.scale_means;
            d["scale_vars"] = mix.scale_vars;
            d["mean"] = mix.mean();
            return d;
        },
        py::arg("window"), py::arg("params"), py::arg("w"));

    m.def(
        "exit_prob",
        [](const AssumptionParams& params, int n, int a, int w) {
            return exit_prob(params, n, a, w);
        },
        py::arg("params"), py::arg("n"), py::arg("a"), py::arg("w"));
    m.def(
        "incoming_prob",
        [](const AssumptionParams& params, int b) { return incoming_prob(params, b); },
        py::arg("params"), py::arg("b"));
    m.def(
        "next_state_coeffs",
        [](const std::string& window, int n, int a, int b) {
            const auto coeffs = next_state_coeffs(make_kind(window), n, a, b);
            return std::make_pair(coeffs.x, coeffs.mu);
        },
        py::arg("window"), py::arg("n"), py::arg("a"), py::arg("b"));

    m.def(
        "spectral",
        [](const std::string& window, const AssumptionParams& params, int w,
           const std::string& method) {
            const auto lm = lambda_method_from_string(method);
            if (!lm) throw DomainError("unknown lambda method '" + method + "'");
            const WindowKind kind = make_kind(window);
            const StationaryMixture mix = stationary_mixture(kind, params, w);
            const SpectralQuantities q = compute_spectral(kind, params, mix, w, *lm);
            py::dict d;
            d["kappa"] = q.kappa;
            d["phi"] = q.phi;
            d["lambda"] = q.lambda;
            d["lambda_lower"] = q.lambda_lower;
            d["alpha"] = q.alpha;
            d["degenerate"] = q.degenerate;
            return d;
        },
        py::arg("window"), py::arg("params"), py::arg("w"), py::arg("method") = "full");

    m.def(
        "bounds",
        [](const std::string& window, const AssumptionParams& params, int w, double rho,
           double rho_l, double rho_r, const std::string& method) {
            const auto lm = lambda_method_from_string(method);
            if (!lm) throw DomainError("unknown lambda method '" + method + "'");
            const WindowKind kind = make_kind(window);
            const StationaryMixture mix = stationary_mixture(kind, params, w);
            const SpectralQuantities q = compute_spectral(kind, params, mix, w, *lm);
            py::dict d;
            d["avg"] = bound_to_dict(avg_bound(mix, q, params, w, rho));
            d["max"] = bound_to_dict(max_bound(mix, params, w, rho_l, rho_r));
            d["min"] = bound_to_dict(min_bound(mix, params, w, rho_l, rho_r));
            return d;
        },
        py::arg("window"), py::arg("params"), py::arg("w"), py::arg("rho") = 0.9,
        py::arg("rho_l") = 0.05, py::arg("rho_r") = 0.95, py::arg("method") = "full",
        "Confidence bounds for the three aggregators of one window model");

    m.def(
        "simulate_chain",
        [](const std::string& window, const AssumptionParams& params, int w, int steps,
           std::uint64_t seed) {
            const ChainSample sample = simulate_chain(make_kind(window), params, w, steps, seed);
            return std::make_pair(sample.values, sample.counts);
        },
        py::arg("window"), py::arg("params"), py::arg("w"), py::arg("steps"), py::arg("seed"),
        "Simulate the window chain; returns (values, counts)");

    m.def(
        "forest_importance",
        [](const std::vector<std::vector<double>>& columns,
           const std::vector<std::string>& labels, int trees, std::uint64_t seed) {
            const LabelData data = LabelData::from_strings(labels);
            return forest_importance(columns, data, trees, seed).importance;
        },
        py::arg("columns"), py::arg("labels"), py::arg("trees") = 100, py::arg("seed") = 1,
        "Normalized impurity-decrease importances; columns are feature-major");

    m.def(
        "rank_recall",
        [](const std::vector<std::pair<std::string, double>>& estimated,
           const std::vector<std::pair<std::string, double>>& actual, double top_fraction) {
            auto as_report = [](const std::vector<std::pair<std::string, double>>& items) {
                ImportanceReport report;
                for (const auto& [name, value] : items) {
                    report.columns.push_back(name);
                    report.mean_importance.push_back(value);
                }
                report.order.resize(report.columns.size());
                for (std::size_t i = 0; i < report.columns.size(); ++i)
                    report.order[i] = static_cast<int>(i);
                std::sort(report.order.begin(), report.order.end(), [&](int l, int r) {
                    const auto sl = static_cast<std::size_t>(l);
                    const auto sr = static_cast<std::size_t>(r);
                    if (report.mean_importance[sl] != report.mean_importance[sr])
                        return report.mean_importance[sl] > report.mean_importance[sr];
                    return report.columns[sl] < report.columns[sr];
                });
                return report;
            };
            return rank_recall(as_report(estimated), as_report(actual), top_fraction);
        },
        py::arg("estimated"), py::arg("actual"), py::arg("top_fraction"),
        "Top-fraction overlap between two (column, importance) rankings");

    py::register_exception<Error>(m, "SwaggError");
}
