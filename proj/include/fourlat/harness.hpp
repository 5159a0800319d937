#pragma once
// Experiment orchestration: JSON configuration, h sweeps over a bounded
// worker pool, log-log rate fitting, and CSV/JSON report emission.

#include "fourlat/resolvent.hpp"
#include "fourlat/riesz.hpp"
#include "fourlat/spectra.hpp"
#include "fourlat/symbols.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fourlat {

enum class ExperimentKind {
    identity_suite,
    rate_free,
    rate_potential,
    commutator,
    spectrum_distance,
    local_spectrum,
    gap,
    projection,
    eigen_track,
    y_blowup,
};

ExperimentKind parse_kind(const std::string& name); // kebab-case names
std::string kind_name(ExperimentKind kind);

struct WindowConfig {
    double a = -1.0;
    double b = 1.0;
    double mu = 1.0;
    int multiplicity = 1;
};

struct ExperimentConfig {
    std::string name = "experiment";
    ExperimentKind kind = ExperimentKind::rate_free;

    std::string symbol = "laplacian"; // laplacian | bilaplacian | fraclap | pseudorel
    double s = 1.0;                   // fraclap exponent
    double mass = 1.0;                // pseudorel mass
    int dim = 1;
    std::string potential;            // "" (free) | cos | rough | well

    double delta = 0.5;               // embedding pair shape
    std::string ramp = "poly9";
    std::optional<double> tau;

    std::vector<double> h_list;       // strictly decreasing, all > 0
    std::complex<double> probe{-1.0, 0.0};
    double box_half = 8.0;
    int refine = 4;

    std::optional<WindowConfig> window; // gap / local-spectrum / projection / eigen-track
    std::vector<double> y_list;         // y-blowup ordinates (h_list[0] fixes the mesh)
    double mu = 1.0;                    // spectrum-distance reciprocal shift

    std::optional<double> gamma;     // override the predicted rate
    std::optional<double> tolerance; // override the kind's default band
    std::uint64_t seed = 0x5eedULL;

    std::string csv_path;  // empty = do not write
    std::string json_path;
};

ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::string& path);

std::vector<double> default_h_list(); // 2^-2 .. 2^-7
Symbol symbol_from_config(const ExperimentConfig& config);
std::optional<PotentialSpec> potential_from_config(const ExperimentConfig& config);
RieszPair pair_from_config(const ExperimentConfig& config);

struct RatePoint {
    double h = 0.0; // abscissa: mesh size, or y in the blowup scan
    double error = 0.0;
};

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

// Least squares on (log h, log error), dropping the largest-h points first
// (pre-asymptotic shelf). Needs >= 3 surviving points, all errors > 0.
FitResult fit_rate(const std::vector<RatePoint>& points, int drop_largest = 1);

struct RateReport {
    std::string experiment;
    std::string kind;
    std::string symbol;
    std::vector<RatePoint> points;
    std::vector<std::string> labels; // per-point names where h is not the story
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double gamma_predicted = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string note;
};

// Dispatches on config.kind; deterministic for a fixed config and seed.
// Writes csv_path/json_path when set. Per-h module failures propagate with
// the mesh and stage attached; configuration problems throw ConfigError.
RateReport run(const ExperimentConfig& config);

// Fixed columns: experiment,kind,symbol,h,error,slope,gamma_predicted,verdict.
// One row per point, then a summary row; empty report = header only.
std::string to_csv(const RateReport& report);
std::string to_json(const RateReport& report);
RateReport report_from_json(const std::string& text);
void emit(const RateReport& report, const std::string& format, const std::string& path);

int worker_count(); // FOURLAT_THREADS caps the pool; default = logical cores

} // namespace fourlat
