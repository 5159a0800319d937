#include "fourlat/errors.hpp"
#include "fourlat/harness.hpp"
#include "fourlat/resolvent.hpp"
#include "fourlat/spectra.hpp"
#include "fourlat/symbols.hpp"

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace fourlat;

namespace {

Symbol make_symbol(const std::string& name, double s, double mass, int dim) {
    if (name == "laplacian") return make_laplacian(dim);
    if (name == "bilaplacian") return make_bilaplacian(dim);
    if (name == "fraclap") return make_fraclap(s, dim);
    if (name == "pseudorel") return make_pseudorel(mass, dim);
    throw ConfigError("unknown symbol '" + name + "'");
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Lattice discretization of Fourier multiplier operators: symbol "
              "evaluation, convergence-rate experiments, and spectral distances.";
    m.attr("__version__") = "0.1.0";

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<SolverError>(m, "SolverError");

    m.def(
        "run_experiment",
        [](const std::string& config_json) { return to_json(run(config_from_json(config_json))); },
        py::arg("config_json"),
        "Run one experiment described by a JSON config string; returns the "
        "report as JSON (points, slope, r2, predicted gamma, verdict).");

    m.def(
        "fit_rate",
        [](const std::vector<double>& h, const std::vector<double>& error, int drop_largest) {
            if (h.size() != error.size())
                throw std::invalid_argument("fit_rate: h and error lengths differ");
            std::vector<RatePoint> pts;
            for (std::size_t i = 0; i < h.size(); ++i) pts.push_back({h[i], error[i]});
            const FitResult fit = fit_rate(pts, drop_largest);
            py::dict out;
            out["slope"] = fit.slope;
            out["intercept"] = fit.intercept;
            out["r2"] = fit.r2;
            return out;
        },
        py::arg("h"), py::arg("error"), py::arg("drop_largest") = 1,
        "Least-squares slope of log(error) against log(h).");

    m.def("theta_prime", &theta_prime, py::arg("theta"), py::arg("tau"), py::arg("dim"),
          "Effective Hoelder exponent after the embedding's decay budget.");

    m.def(
        "predicted_rate",
        [](const std::string& symbol, double s, double mass, int dim,
           std::optional<double> theta_prime_value) {
            return predicted_rate(make_symbol(symbol, s, mass, dim), theta_prime_value);
        },
        py::arg("symbol"), py::arg("s") = 1.0, py::arg("mass") = 1.0, py::arg("dim") = 1,
        py::arg("theta_prime") = std::nullopt,
        "Expected operator-norm convergence exponent for the symbol (optionally "
        "capped by a potential's effective Hoelder exponent).");

    m.def(
        "eval_symbol",
        [](const std::string& symbol, const std::vector<double>& xi, double s, double mass) {
            const int dim = static_cast<int>(xi.size());
            return eval_symbol(make_symbol(symbol, s, mass, dim), xi.data());
        },
        py::arg("symbol"), py::arg("xi"), py::arg("s") = 1.0, py::arg("mass") = 1.0,
        "Multiplier value at a frequency point.");

    m.def(
        "eval_discretized",
        [](const std::string& symbol, double h, const std::vector<double>& xi, double s,
           double mass) {
            const int dim = static_cast<int>(xi.size());
            return eval_discretized(make_symbol(symbol, s, mass, dim), h, xi.data());
        },
        py::arg("symbol"), py::arg("h"), py::arg("xi"), py::arg("s") = 1.0,
        py::arg("mass") = 1.0,
        "Multiplier value after the lattice sine substitution at mesh h.");

    m.def(
        "free_error_norm",
        [](const std::string& symbol, double h, std::complex<double> z, double s, double mass,
           int dim, double delta, const std::string& ramp, std::optional<double> tau) {
            const RieszPair pair = build_pair(dim, delta, RampSpec::parse(ramp), tau);
            return error_norm_fiber(make_symbol(symbol, s, mass, dim), pair, h, z);
        },
        py::arg("symbol"), py::arg("h"), py::arg("z"), py::arg("s") = 1.0,
        py::arg("mass") = 1.0, py::arg("dim") = 1, py::arg("delta") = 0.5,
        py::arg("ramp") = "poly9", py::arg("tau") = std::nullopt,
        "Exact (fiber-method) norm of the embedded-resolvent error operator for "
        "the free multiplier at spectral parameter z.");

    m.def(
        "hausdorff_distance",
        [](const std::vector<double>& a, const std::vector<double>& b) {
            SpectrumSet x, y;
            x.values = a;
            y.values = b;
            std::sort(x.values.begin(), x.values.end());
            std::sort(y.values.begin(), y.values.end());
            return hausdorff(x, y);
        },
        py::arg("a"), py::arg("b"), "Hausdorff distance between two finite point sets.");

    m.def(
        "local_hausdorff_distance",
        [](const std::vector<double>& a, const std::vector<double>& b, double lo, double hi,
           double mu) {
            SpectrumSet x, y;
            x.values = a;
            y.values = b;
            std::sort(x.values.begin(), x.values.end());
            std::sort(y.values.begin(), y.values.end());
            return local_hausdorff(x, y, Window(lo, hi, mu));
        },
        py::arg("a"), py::arg("b"), py::arg("lo"), py::arg("hi"), py::arg("mu") = 1.0,
        "Hausdorff distance restricted to the window [lo, hi].");

    m.def("default_h_list", &default_h_list, "Default geometric mesh list 2^-2 .. 2^-7.");
}
