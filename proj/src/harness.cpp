#include "fourlat/harness.hpp"

#include "fourlat/errors.hpp"
#include "fourlat/lattice.hpp"
#include "fourlat/rng.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace fourlat {

namespace {

using nlohmann::json;

const char* const kind_names[] = {
    "identity-suite", "rate-free",  "rate-potential", "commutator", "spectrum-distance",
    "local-spectrum", "gap",        "projection",     "eigen-track", "y-blowup",
};

LatticeGrid make_grid(int dim, double box_half, double h) {
    if (!(h > 0.0) || !(box_half > 0.0))
        throw ConfigError("harness: box and mesh must be positive");
    const auto n = static_cast<int>(std::llround(2.0 * box_half / h));
    if (n < 2 || std::abs(n * h - 2.0 * box_half) > 1e-9 * box_half)
        throw ConfigError("harness: box is not an integer number of mesh cells");
    return LatticeGrid(dim, h, n);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_safe(std::string s) {
    for (auto& c : s)
        if (c == ',' || c == '\n' || c == '\r') c = '_';
    return s;
}

// run `count` independent tasks on the worker pool; the first failure wins
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& task) {
    const auto workers =
        std::min<std::size_t>(static_cast<std::size_t>(worker_count()), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                task(i);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(body);
    body();
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

// attach the mesh and stage to propagated module errors, keeping the
// ConfigError type intact so the exit-code contract survives
template <typename F>
auto with_context(double h, const char* stage, F&& f) {
    try {
        return f();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string(stage) + " at h=" + fmt(h) + ": " + e.what());
    } catch (const SolverError& e) {
        throw std::runtime_error(std::string(stage) + " at h=" + fmt(h) + ": " + e.what());
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string(stage) + " at h=" + fmt(h) + ": " + e.what());
    }
}

double require_field(const json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("config: missing field ") + key);
    return j.at(key).get<double>();
}

bool needs_rate_fit(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::rate_free:
        case ExperimentKind::rate_potential:
        case ExperimentKind::commutator:
        case ExperimentKind::spectrum_distance:
        case ExperimentKind::local_spectrum:
        case ExperimentKind::projection:
        case ExperimentKind::eigen_track: return true;
        default: return false;
    }
}

bool needs_window(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::gap:
        case ExperimentKind::local_spectrum:
        case ExperimentKind::projection:
        case ExperimentKind::eigen_track: return true;
        default: return false;
    }
}

bool needs_potential(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::rate_potential:
        case ExperimentKind::commutator:
        case ExperimentKind::eigen_track: return true;
        default: return false;
    }
}

double default_tolerance(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::rate_free:
        case ExperimentKind::commutator: return 0.15;
        case ExperimentKind::rate_potential: return 0.2;
        case ExperimentKind::spectrum_distance:
        case ExperimentKind::local_spectrum:
        case ExperimentKind::projection: return 0.3;
        case ExperimentKind::eigen_track: return 0.4;
        case ExperimentKind::y_blowup: return 0.1;
        default: return 0.0;
    }
}

double default_gamma(const ExperimentConfig& cfg, const Symbol& sym, const RieszPair& pair,
                     const std::optional<PotentialSpec>& pot) {
    if (cfg.gamma) return *cfg.gamma;
    const auto tp = pot ? std::optional<double>(theta_prime(pot->theta, pair.tau, cfg.dim))
                        : std::nullopt;
    switch (cfg.kind) {
        case ExperimentKind::rate_free: return predicted_rate(sym);
        case ExperimentKind::rate_potential:
        case ExperimentKind::spectrum_distance:
        case ExperimentKind::local_spectrum:
        case ExperimentKind::projection: return predicted_rate(sym, tp);
        case ExperimentKind::commutator: return *tp;
        case ExperimentKind::eigen_track: return 2.0; // isolated eigenvalues converge
                                                      // at the symbol substitution order
        case ExperimentKind::y_blowup: return pot ? 4.0 : 2.0;
        default: return 0.0;
    }
}

// distance between interval spectra [0, top] inside the window [a, b];
// keeps the free local comparison exact instead of sampling-limited
double local_interval_distance(double top_x, double top_y, double a, double b) {
    auto contrib = [&](double tx, double ty) {
        if (a > tx || b < 0.0) return 0.0; // the window misses [0, tx]
        return std::max(0.0, std::min(b, tx) - ty);
    };
    return std::max(contrib(top_x, top_y), contrib(top_y, top_x));
}

void fill_identity(const ExperimentConfig& cfg, const RieszPair& pair, RateReport& rep) {
    const double h = cfg.h_list.front();
    const LatticeGrid coarse = make_grid(cfg.dim, cfg.box_half, h);
    const ContinuumProxy proxy(coarse, cfg.refine);

    const double biortho = biorthogonality_defect(pair);

    double fold = 0.0; // K J = identity on 100 random coarse fields
    for (int t = 0; t < 100; ++t) {
        const LatticeField u = random_field(coarse, Domain::space, mix_seed(cfg.seed, t));
        LatticeField r = discretize(embed(u, pair, proxy), pair, proxy);
        for (std::size_t k = 0; k < r.v.size(); ++k) r.v[k] -= u.v[k];
        fold = std::max(fold, field_norm(r) / field_norm(u));
    }

    const ProjectionCheck pc = projection_check(pair, proxy, 100, mix_seed(cfg.seed, 0xabba));
    const double kernel =
        field_norm(discretize(kernel_witness(pair, proxy), pair, proxy));

    // union check needs a dense fine assembly, so shrink the coarse grid
    const int cap = std::max(
        2, static_cast<int>(std::pow(512.0, 1.0 / cfg.dim)) / cfg.refine);
    const LatticeGrid small(cfg.dim, h, std::min(coarse.n, cap));
    const double uni = union_with_zero_defect(pair, ContinuumProxy(small, cfg.refine),
                                              mix_seed(cfg.seed, 0x5eaU));

    const char* names[] = {"biorthogonality", "fold-identity", "idempotency",
                           "kernel-witness", "union-with-zero"};
    const double defects[] = {biortho, fold, pc.idempotency_defect, kernel, uni};
    const double thresholds[] = {1e-10, 1e-8, 1e-8, 1e-8, 1e-6};
    rep.pass = true;
    for (int i = 0; i < 5; ++i) {
        rep.points.push_back({h, defects[i]});
        rep.labels.emplace_back(names[i]);
        rep.pass = rep.pass && defects[i] < thresholds[i];
    }
    rep.note = "defect thresholds 1e-10/1e-8/1e-8/1e-8/1e-6";
}

} // namespace

ExperimentKind parse_kind(const std::string& name) {
    for (std::size_t i = 0; i < std::size(kind_names); ++i)
        if (name == kind_names[i]) return static_cast<ExperimentKind>(i);
    throw ConfigError("config: unknown experiment kind '" + name + "'");
}

std::string kind_name(ExperimentKind kind) {
    return kind_names[static_cast<std::size_t>(kind)];
}

std::vector<double> default_h_list() {
    std::vector<double> h;
    for (int k = 2; k <= 7; ++k) h.push_back(std::pow(2.0, -k));
    return h;
}

ExperimentConfig config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be an object");

    static const char* const known[] = {
        "name", "kind",   "symbol", "s",      "mass",   "dim",    "potential", "delta",
        "ramp", "tau",    "h_list", "h_max",  "h_count", "probe", "box_half",  "refine",
        "window", "y_list", "mu",   "gamma",  "tolerance", "seed", "csv",      "json",
    };
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::find_if(std::begin(known), std::end(known),
                         [&key](const char* k) { return key == k; }) == std::end(known))
            throw ConfigError("config: unknown field '" + key + "'");
    }

    ExperimentConfig cfg;
    try {
        cfg.name = j.value("name", cfg.name);
        if (!j.contains("kind")) throw ConfigError("config: missing field kind");
        cfg.kind = parse_kind(j.at("kind").get<std::string>());
        cfg.symbol = j.value("symbol", cfg.symbol);
        cfg.s = j.value("s", cfg.s);
        cfg.mass = j.value("mass", cfg.mass);
        cfg.dim = j.value("dim", cfg.dim);
        cfg.potential = j.value("potential", cfg.potential);
        cfg.delta = j.value("delta", cfg.delta);
        cfg.ramp = j.value("ramp", cfg.ramp);
        if (j.contains("tau")) cfg.tau = j.at("tau").get<double>();
        if (j.contains("h_list")) cfg.h_list = j.at("h_list").get<std::vector<double>>();
        if (j.contains("h_max") || j.contains("h_count")) {
            if (!cfg.h_list.empty())
                throw ConfigError("config: give either h_list or h_max/h_count");
            const double h_max = j.value("h_max", 0.25);
            const int count = j.value("h_count", 6);
            if (count < 1 || !(h_max > 0.0))
                throw ConfigError("config: h_max/h_count out of range");
            for (int k = 0; k < count; ++k) cfg.h_list.push_back(h_max * std::pow(0.5, k));
        }
        if (j.contains("probe")) {
            const auto& p = j.at("probe");
            cfg.probe = {require_field(p, "re"), p.value("im", 0.0)};
        }
        cfg.box_half = j.value("box_half", cfg.box_half);
        cfg.refine = j.value("refine", cfg.refine);
        if (j.contains("window")) {
            const auto& w = j.at("window");
            WindowConfig wc;
            wc.a = require_field(w, "a");
            wc.b = require_field(w, "b");
            wc.mu = require_field(w, "mu");
            wc.multiplicity = w.value("multiplicity", 1);
            cfg.window = wc;
        }
        if (j.contains("y_list")) cfg.y_list = j.at("y_list").get<std::vector<double>>();
        cfg.mu = j.value("mu", cfg.mu);
        if (j.contains("gamma")) cfg.gamma = j.at("gamma").get<double>();
        if (j.contains("tolerance")) cfg.tolerance = j.at("tolerance").get<double>();
        cfg.seed = j.value("seed", cfg.seed);
        cfg.csv_path = j.value("csv", cfg.csv_path);
        cfg.json_path = j.value("json", cfg.json_path);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    try {
        RampSpec::parse(cfg.ramp); // surfaces bad ramp names at load time
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return config_from_json(buf.str());
}

Symbol symbol_from_config(const ExperimentConfig& config) {
    if (config.symbol == "laplacian") return make_laplacian(config.dim);
    if (config.symbol == "bilaplacian") return make_bilaplacian(config.dim);
    if (config.symbol == "fraclap") return make_fraclap(config.s, config.dim);
    if (config.symbol == "pseudorel") return make_pseudorel(config.mass, config.dim);
    throw ConfigError("config: unknown symbol '" + config.symbol + "'");
}

std::optional<PotentialSpec> potential_from_config(const ExperimentConfig& config) {
    if (config.potential.empty()) return std::nullopt;
    if (config.potential == "cos") return make_cos_potential(config.dim);
    if (config.potential == "rough") return make_rough_potential(config.dim);
    if (config.potential == "well") return make_well_potential(config.dim);
    throw ConfigError("config: unknown potential '" + config.potential + "'");
}

RieszPair pair_from_config(const ExperimentConfig& config) {
    return build_pair(config.dim, config.delta, RampSpec::parse(config.ramp), config.tau);
}

FitResult fit_rate(const std::vector<RatePoint>& points, int drop_largest) {
    if (drop_largest < 0) throw std::invalid_argument("fit_rate: negative drop count");
    std::vector<RatePoint> sorted = points;
    std::sort(sorted.begin(), sorted.end(),
              [](const RatePoint& a, const RatePoint& b) { return a.h > b.h; });
    if (static_cast<int>(sorted.size()) - drop_largest < 3)
        throw std::domain_error("fit_rate: need at least 3 points after dropping");
    sorted.erase(sorted.begin(), sorted.begin() + drop_largest);

    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (const auto& p : sorted) {
        if (!(p.h > 0.0) || !(p.error > 0.0))
            throw std::domain_error("fit_rate: degenerate data (h or error not positive)");
        const double x = std::log(p.h), y = std::log(p.error);
        sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
    }
    const auto n = static_cast<double>(sorted.size());
    const double det = n * sxx - sx * sx;
    if (std::abs(det) < 1e-30) throw std::domain_error("fit_rate: h values coincide");

    FitResult fit;
    fit.slope = (n * sxy - sx * sy) / det;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss_res = 0.0;
    const double mean_y = sy / n;
    double ss_tot = syy - n * mean_y * mean_y;
    for (const auto& p : sorted) {
        const double r = std::log(p.error) - (fit.intercept + fit.slope * std::log(p.h));
        ss_res += r * r;
    }
    fit.r2 = ss_tot > 1e-30 ? 1.0 - ss_res / ss_tot : (ss_res < 1e-30 ? 1.0 : 0.0);
    return fit;
}

RateReport run(const ExperimentConfig& config) {
    ExperimentConfig cfg = config;
    if (cfg.h_list.empty()) cfg.h_list = default_h_list();
    for (std::size_t i = 0; i < cfg.h_list.size(); ++i) {
        if (!(cfg.h_list[i] > 0.0)) throw ConfigError("config: h values must be positive");
        if (i > 0 && !(cfg.h_list[i] < cfg.h_list[i - 1]))
            throw ConfigError("config: h list must be strictly decreasing");
    }
    if (needs_rate_fit(cfg.kind) && cfg.h_list.size() < 4)
        throw ConfigError("config: rate fits need at least 4 h values");
    if (needs_window(cfg.kind) && !cfg.window)
        throw ConfigError("config: kind '" + kind_name(cfg.kind) + "' needs a window");
    const Symbol sym = symbol_from_config(cfg);
    const std::optional<PotentialSpec> pot = potential_from_config(cfg);
    if (needs_potential(cfg.kind) && !pot)
        throw ConfigError("config: kind '" + kind_name(cfg.kind) + "' needs a potential");
    const RieszPair pair = pair_from_config(cfg);

    RateReport rep;
    rep.experiment = cfg.name;
    rep.kind = kind_name(cfg.kind);
    rep.symbol = cfg.symbol;
    rep.gamma_predicted = default_gamma(cfg, sym, pair, pot);
    rep.tolerance = cfg.tolerance.value_or(default_tolerance(cfg.kind));

    const auto count = cfg.h_list.size();
    std::vector<double> errors(count, 0.0);
    auto sweep = [&](const char* stage, const std::function<double(std::size_t)>& one) {
        parallel_for(count, [&](std::size_t i) {
            errors[i] = with_context(cfg.h_list[i], stage, [&] { return one(i); });
        });
        for (std::size_t i = 0; i < count; ++i) rep.points.push_back({cfg.h_list[i], errors[i]});
    };
    auto fit_and_judge = [&] {
        const bool at_floor = std::all_of(rep.points.begin(), rep.points.end(),
                                          [](const RatePoint& p) { return p.error < 1e-14; });
        if (at_floor) { // agreement down to rounding; nothing left to fit
            rep.slope = 0.0;
            rep.intercept = 0.0;
            rep.r2 = 1.0;
            rep.pass = true;
            rep.note = "errors at the rounding floor; no rate to fit";
            return;
        }
        const FitResult fit = fit_rate(rep.points, 1);
        rep.slope = fit.slope;
        rep.intercept = fit.intercept;
        rep.r2 = fit.r2;
        rep.pass = std::abs(rep.slope - rep.gamma_predicted) <= rep.tolerance && rep.r2 >= 0.98;
    };

    switch (cfg.kind) {
        case ExperimentKind::identity_suite: {
            fill_identity(cfg, pair, rep);
            break;
        }
        case ExperimentKind::rate_free: {
            FiberSampling sampling;
            sampling.per_axis = cfg.dim == 1 ? 4096 : cfg.dim == 2 ? 192 : 48;
            sampling.seed = cfg.seed;
            sweep("rate-free", [&](std::size_t i) {
                return error_norm_fiber(sym, pair, cfg.h_list[i], cfg.probe, sampling);
            });
            fit_and_judge();
            break;
        }
        case ExperimentKind::rate_potential: {
            sweep("rate-potential", [&](std::size_t i) {
                const ContinuumProxy proxy(make_grid(cfg.dim, cfg.box_half, cfg.h_list[i]),
                                           cfg.refine);
                ResolventProbe probe;
                probe.z = cfg.probe;
                probe.method = ResolventProbe::Method::power;
                const ErrorOperatorHandle handle(sym, pair, proxy, pot, probe);
                return error_norm_power(handle, 2000, mix_seed(cfg.seed, i)).value;
            });
            fit_and_judge();
            break;
        }
        case ExperimentKind::commutator: {
            sweep("commutator", [&](std::size_t i) {
                const ContinuumProxy proxy(make_grid(cfg.dim, cfg.box_half, cfg.h_list[i]),
                                           cfg.refine);
                return potential_commutator_norm(*pot, pair, proxy, 2000,
                                                 mix_seed(cfg.seed, i))
                    .value;
            });
            fit_and_judge();
            break;
        }
        case ExperimentKind::spectrum_distance: {
            sweep("spectrum-distance", [&](std::size_t i) {
                const ContinuumProxy proxy(make_grid(cfg.dim, cfg.box_half, cfg.h_list[i]),
                                           cfg.refine);
                return resolvent_spectrum_distance(sym, pot ? &*pot : nullptr, proxy, cfg.mu);
            });
            fit_and_judge();
            break;
        }
        case ExperimentKind::local_spectrum: {
            const WindowConfig w = *cfg.window;
            sweep("local-spectrum", [&](std::size_t i) {
                const LatticeGrid grid = make_grid(cfg.dim, cfg.box_half, cfg.h_list[i]);
                const ContinuumProxy proxy(grid, cfg.refine);
                if (!pot) {
                    OperatorSpec dspec{sym, OperatorSpace::discrete, std::nullopt};
                    OperatorSpec pspec{sym, OperatorSpace::proxy, std::nullopt};
                    const double td = spectrum(dspec, grid, 2).values.back();
                    const double tp = spectrum(pspec, proxy.fine, 2).values.back();
                    return local_interval_distance(td, tp, w.a, w.b);
                }
                OperatorSpec dspec{sym, OperatorSpace::discrete, pot};
                OperatorSpec pspec{sym, OperatorSpace::proxy, pot};
                return local_hausdorff(spectrum(dspec, grid), spectrum(pspec, proxy.fine),
                                       Window(w.a, w.b, w.mu, w.multiplicity));
            });
            fit_and_judge();
            break;
        }
        case ExperimentKind::gap: {
            const WindowConfig w = *cfg.window;
            const GapReport gaps = gap_check(sym, pot ? &*pot : nullptr, w.a, w.b,
                                             cfg.h_list, cfg.box_half);
            for (const auto& e : gaps.entries) rep.points.push_back({e.h, e.distance});
            rep.pass = gaps.all_empty;
            rep.note = "interval clear of the reference spectrum by " +
                       fmt(gaps.proxy_distance);
            break;
        }
        case ExperimentKind::projection: {
            const WindowConfig w = *cfg.window;
            const Window window(w.a, w.b, w.mu, w.multiplicity);
            sweep("projection", [&](std::size_t i) {
                return spectral_projection_distance(sym, pot ? &*pot : nullptr, pair, window,
                                                    cfg.h_list[i], cfg.box_half, cfg.refine,
                                                    rep.gamma_predicted);
            });
            fit_and_judge();
            break;
        }
        case ExperimentKind::eigen_track: {
            const WindowConfig w = *cfg.window;
            const Window window(w.a, w.b, w.mu, w.multiplicity);
            const TrackReport track = with_context(cfg.h_list.front(), "eigen-track", [&] {
                return track_eigenvalues(sym, *pot, pair, window, cfg.h_list, cfg.box_half,
                                         cfg.refine);
            });
            bool counts_ok = true;
            double kpsi_min = std::numeric_limits<double>::infinity();
            double resid_max = 0.0;
            for (const auto& e : track.entries) {
                rep.points.push_back({e.h, e.lambda_gap});
                counts_ok = counts_ok && e.count_ok;
                kpsi_min = std::min(kpsi_min, e.k_psi_norm);
                resid_max = std::max(resid_max, e.subspace_residual);
            }
            rep.note = "reference " + fmt(track.reference.empty() ? 0.0 : track.reference[0]) +
                       "; min |K psi| " + fmt(kpsi_min) + "; max subspace residual " +
                       fmt(resid_max);
            if (counts_ok) {
                fit_and_judge();
                rep.pass = rep.pass && kpsi_min >= 0.5;
            } else {
                rep.pass = false;
            }
            break;
        }
        case ExperimentKind::y_blowup: {
            std::vector<double> ys = cfg.y_list;
            if (ys.empty())
                for (int k = 0; k <= 4; ++k) ys.push_back(std::pow(0.5, k));
            const double h = cfg.h_list.front();
            const BlowupReport blow = with_context(h, "y-blowup", [&] {
                const ContinuumProxy proxy(make_grid(cfg.dim, cfg.box_half, h), cfg.refine);
                return y_blowup_scan(sym, pair, proxy, pot ? &*pot : nullptr,
                                     cfg.probe.real(), ys, cfg.seed);
            });
            for (const auto& p : blow.points) rep.points.push_back({p.y, p.norm});
            const FitResult fit = fit_rate(rep.points, 0);
            rep.slope = blow.exponent;
            rep.intercept = fit.intercept;
            rep.r2 = fit.r2;
            double step_max = 0.0; // growth exponent of each halving step
            for (std::size_t i = 0; i + 1 < blow.points.size(); ++i) {
                const auto &a = blow.points[i], &b = blow.points[i + 1];
                step_max = std::max(step_max, std::log(b.norm / a.norm) / std::log(a.y / b.y));
            }
            rep.pass = blow.exponent <= rep.gamma_predicted + rep.tolerance &&
                       step_max <= rep.gamma_predicted + rep.tolerance;
            rep.note = "worst per-step growth exponent " + fmt(step_max);
            break;
        }
    }

    if (!cfg.csv_path.empty()) emit(rep, "csv", cfg.csv_path);
    if (!cfg.json_path.empty()) emit(rep, "json", cfg.json_path);
    return rep;
}

std::string to_csv(const RateReport& report) {
    std::string out = "experiment,kind,symbol,h,error,slope,gamma_predicted,verdict\n";
    const std::string head =
        csv_safe(report.experiment) + "," + csv_safe(report.kind) + "," +
        csv_safe(report.symbol) + ",";
    for (const auto& p : report.points)
        out += head + fmt(p.h) + "," + fmt(p.error) + ",,,\n";
    if (!report.points.empty())
        out += head + ",," + fmt(report.slope) + "," + fmt(report.gamma_predicted) + "," +
               (report.pass ? "pass" : "fail") + "\n";
    return out;
}

std::string to_json(const RateReport& report) {
    json j;
    j["experiment"] = report.experiment;
    j["kind"] = report.kind;
    j["symbol"] = report.symbol;
    j["points"] = json::array();
    for (std::size_t i = 0; i < report.points.size(); ++i) {
        json p;
        p["h"] = report.points[i].h;
        p["error"] = report.points[i].error;
        if (i < report.labels.size()) p["label"] = report.labels[i];
        j["points"].push_back(p);
    }
    j["slope"] = report.slope;
    j["intercept"] = report.intercept;
    j["r2"] = report.r2;
    j["gamma_predicted"] = report.gamma_predicted;
    j["tolerance"] = report.tolerance;
    j["pass"] = report.pass;
    j["note"] = report.note;
    return j.dump(2) + "\n";
}

RateReport report_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("report: invalid JSON: ") + e.what());
    }
    RateReport rep;
    try {
        rep.experiment = j.at("experiment").get<std::string>();
        rep.kind = j.at("kind").get<std::string>();
        rep.symbol = j.at("symbol").get<std::string>();
        for (const auto& p : j.at("points")) {
            rep.points.push_back({p.at("h").get<double>(), p.at("error").get<double>()});
            if (p.contains("label")) rep.labels.push_back(p.at("label").get<std::string>());
        }
        rep.slope = j.at("slope").get<double>();
        rep.intercept = j.at("intercept").get<double>();
        rep.r2 = j.at("r2").get<double>();
        rep.gamma_predicted = j.at("gamma_predicted").get<double>();
        rep.tolerance = j.at("tolerance").get<double>();
        rep.pass = j.at("pass").get<bool>();
        rep.note = j.value("note", std::string());
    } catch (const std::exception& e) {
        throw ConfigError(std::string("report: ") + e.what());
    }
    return rep;
}

void emit(const RateReport& report, const std::string& format, const std::string& path) {
    std::string body;
    if (format == "csv") body = to_csv(report);
    else if (format == "json") body = to_json(report);
    else throw ConfigError("emit: unknown format '" + format + "'");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit: cannot open " + path);
    out << body;
    if (!out.good()) throw std::runtime_error("emit: write failed for " + path);
}

int worker_count() {
    if (const char* env = std::getenv("FOURLAT_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return std::min(n, 256);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

} // namespace fourlat
