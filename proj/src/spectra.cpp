#include "fourlat/spectra.hpp"

#include "fourlat/errors.hpp"
#include "fourlat/fft.hpp"
#include "fourlat/rng.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

namespace fourlat {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

constexpr std::int64_t dense_cap = 4096;

LatticeGrid grid_for(int dim, double box_half, double h) {
    if (!(h > 0.0) || !(box_half > 0.0))
        throw std::invalid_argument("spectra: box and mesh must be positive");
    const auto n = static_cast<int>(std::llround(2.0 * box_half / h));
    if (n < 2 || std::abs(n * h - 2.0 * box_half) > 1e-9 * box_half)
        throw ConfigError("spectra: box is not an integer number of mesh cells");
    return LatticeGrid(dim, h, n);
}

double eval_by_space(const Symbol& sym, OperatorSpace space, double h, const double* xi) {
    return space == OperatorSpace::discrete ? eval_discretized(sym, h, xi)
                                            : eval_symbol(sym, xi);
}

// sup of the multiplier over the grid's frequency cell: corner, diagonal
// path to the corner, and a random fill-in
double range_max(const Symbol& sym, OperatorSpace space, const LatticeGrid& grid) {
    const int d = sym.dim;
    double corner[max_dim], xi[max_dim];
    for (int i = 0; i < d; ++i) corner[i] = grid.freq_half();
    double top = eval_by_space(sym, space, grid.h, corner);
    for (int k = 0; k <= 8192; ++k) {
        const double t = k / 8192.0;
        for (int i = 0; i < d; ++i) xi[i] = t * corner[i];
        top = std::max(top, eval_by_space(sym, space, grid.h, xi));
    }
    std::uint64_t state = 0x5eedface1234ULL;
    for (int k = 0; k < 4096; ++k) {
        for (int i = 0; i < d; ++i) xi[i] = uniform(state, -corner[i], corner[i]);
        top = std::max(top, eval_by_space(sym, space, grid.h, xi));
    }
    return top;
}

// dense matrix of the multiplier operator (circulant from one inverse
// transform of the symbol values) plus the sampled potential diagonal
Eigen::MatrixXd dense_operator(const Symbol& sym, OperatorSpace space,
                               const PotentialSpec* potential, const LatticeGrid& grid) {
    const auto n = grid.size();
    if (n > dense_cap) throw ConfigError("spectra: grid too large for the dense eigensolver");
    if (sym.dim != grid.dim) throw std::invalid_argument("spectra: symbol dimension mismatch");

    std::vector<std::complex<double>> col(static_cast<std::size_t>(n));
    const double dxi = grid.freq_step();
    std::vector<std::array<int, max_dim>> idx(static_cast<std::size_t>(n));
    for (std::int64_t f = 0; f < n; ++f) {
        int p[max_dim];
        decode_index(f, grid.dim, grid.n, p);
        double xi[max_dim];
        for (int i = 0; i < grid.dim; ++i) {
            xi[i] = dxi * grid.signed_index(p[i]);
            idx[f][i] = p[i];
        }
        col[f] = eval_by_space(sym, space, grid.h, xi);
    }
    fft_unnormalized(col.data(), grid.shape(), +1);
    const double inv_n = 1.0 / static_cast<double>(n);

    Eigen::MatrixXd m(n, n);
    for (std::int64_t p = 0; p < n; ++p)
        for (std::int64_t q = 0; q < n; ++q) {
            std::int64_t flat = 0;
            for (int i = 0; i < grid.dim; ++i) {
                const int diff = idx[p][i] - idx[q][i];
                flat = flat * grid.n + (diff < 0 ? diff + grid.n : diff);
            }
            m(p, q) = col[flat].real() * inv_n;
        }
    if (potential) {
        const LatticeField vals = sample_potential(potential->evaluator, grid);
        for (std::int64_t p = 0; p < n; ++p) m(p, p) += vals.v[p].real();
    }
    return m;
}

std::vector<double> dense_eigenvalues(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("spectra: eigensolver failed");
    return std::vector<double>(es.eigenvalues().data(), es.eigenvalues().data() + m.rows());
}

double dist_to_sorted(double x, const std::vector<double>& v) {
    const auto it = std::lower_bound(v.begin(), v.end(), x);
    double best = inf;
    if (it != v.end()) best = std::min(best, *it - x);
    if (it != v.begin()) best = std::min(best, x - *(it - 1));
    return best;
}

double one_sided(const std::vector<double>& X, const std::vector<double>& Y) {
    // both sorted: sweep a single pointer over Y
    double sup = 0.0;
    std::size_t j = 0;
    for (const double x : X) {
        while (j + 1 < Y.size() && Y[j + 1] < x) ++j;
        double d = std::abs(Y[j] - x);
        if (j + 1 < Y.size()) d = std::min(d, std::abs(Y[j + 1] - x));
        sup = std::max(sup, d);
    }
    return sup;
}

double interval_clearance(const SpectrumSet& s, double a, double b) {
    // distance from [a, b] to the set; sampled ranges are connected, so
    // only their endpoints matter
    if (s.values.empty()) return inf;
    if (s.kind == SpectrumSet::Kind::sampled_range) {
        const double lo = s.values.front(), hi = s.values.back();
        if (b < lo) return lo - b;
        if (a > hi) return a - hi;
        return 0.0;
    }
    double best = inf;
    for (const double v : s.values) {
        if (v < a) best = std::min(best, a - v);
        else if (v > b) best = std::min(best, v - b);
        else return 0.0;
    }
    return best;
}

std::vector<double> window_values(const std::vector<double>& eigs, double a, double b) {
    std::vector<double> out;
    for (const double v : eigs)
        if (v > a && v < b) out.push_back(v);
    return out;
}

LatticeField vector_to_field(const Eigen::VectorXd& v, const LatticeGrid& grid) {
    LatticeField f = make_field(grid, Domain::space);
    for (std::int64_t i = 0; i < grid.size(); ++i) f.v[i] = v(i);
    return f;
}

// dense inverse iteration for the eigenvector at an already-computed
// eigenvalue; pairwise orthogonalized for clustered targets
std::vector<LatticeField> dense_window_vectors(const Eigen::MatrixXd& m,
                                               const std::vector<double>& targets,
                                               const LatticeGrid& grid, std::uint64_t seed) {
    std::vector<LatticeField> out;
    const auto n = m.rows();
    for (std::size_t t = 0; t < targets.size(); ++t) {
        const double shift = targets[t] + 1e-9 * std::max(1.0, std::abs(targets[t]));
        Eigen::MatrixXd b = m;
        b.diagonal().array() -= shift;
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(b);
        std::uint64_t state = mix_seed(seed, t);
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v(i) = uniform(state, -1.0, 1.0);
        const double weight = grid.space_weight();
        for (int it = 0; it < 3; ++it) {
            v = lu.solve(v);
            for (const auto& prev : out) {
                double dot = 0.0; // weighted inner against unit-weighted prev
                for (Eigen::Index i = 0; i < n; ++i) dot += prev.v[i].real() * v(i);
                dot *= weight;
                for (Eigen::Index i = 0; i < n; ++i) v(i) -= dot * prev.v[i].real();
            }
            v.normalize();
        }
        LatticeField f = vector_to_field(v, grid);
        const double w = field_norm(f); // unit in the weighted norm
        for (auto& x : f.v) x /= w;
        out.push_back(std::move(f));
    }
    return out;
}

struct RitzSet {
    std::vector<double> values;        // ascending
    std::vector<LatticeField> vectors; // matching order, unit weighted norm
    double worst_residual = 0.0;
};

// matrix-free block inverse iteration with a fixed shift, Rayleigh-Ritz
// refined; solves go through the preconditioned resolvent
RitzSet iterate_window_vectors(const OperatorSpec& op, const LatticeGrid& fine, int m,
                               double sigma, std::uint64_t seed) {
    if (m < 1 || m > 32) throw ConfigError("spectra: window rank out of range");
    std::vector<LatticeField> psi;
    for (int j = 0; j < m; ++j) psi.push_back(random_field(fine, Domain::space, mix_seed(seed, j)));

    RitzSet ritz;
    double shift = sigma;
    for (int sweep = 0; sweep < 6; ++sweep) {
        for (int j = 0; j < m; ++j) {
            try {
                psi[j] = apply_resolvent_unchecked(op, shift, psi[j], 1e-8, 800);
            } catch (const SolverError&) {
                // shift collided with an eigenvalue; nudge once and retry
                shift += 1e-6 * std::max(1.0, std::abs(shift));
                psi[j] = apply_resolvent_unchecked(op, shift, psi[j], 1e-8, 800);
            }
        }
        for (int j = 0; j < m; ++j) {
            for (int i = 0; i < j; ++i) {
                const auto c = field_inner(psi[i], psi[j]);
                for (std::size_t k = 0; k < psi[j].v.size(); ++k) psi[j].v[k] -= c * psi[i].v[k];
            }
            const double nrm = field_norm(psi[j]);
            if (nrm < 1e-14) throw std::runtime_error("spectra: inverse iteration degenerated");
            for (auto& x : psi[j].v) x /= nrm;
        }
        std::vector<LatticeField> hpsi;
        for (int j = 0; j < m; ++j) hpsi.push_back(apply_operator(op, psi[j]));
        Eigen::MatrixXd s(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) s(i, j) = field_inner(psi[i], hpsi[j]).real();
        s = 0.5 * (s + s.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
        std::vector<LatticeField> rot, hrot;
        for (int j = 0; j < m; ++j) {
            LatticeField a = make_field(fine, Domain::space);
            LatticeField ha = make_field(fine, Domain::space);
            for (int i = 0; i < m; ++i) {
                const double u = es.eigenvectors()(i, j);
                for (std::size_t k = 0; k < a.v.size(); ++k) {
                    a.v[k] += u * psi[i].v[k];
                    ha.v[k] += u * hpsi[i].v[k];
                }
            }
            rot.push_back(std::move(a));
            hrot.push_back(std::move(ha));
        }
        psi = std::move(rot);
        ritz.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + m);
        ritz.worst_residual = 0.0;
        for (int j = 0; j < m; ++j) {
            LatticeField r = hrot[j];
            for (std::size_t k = 0; k < r.v.size(); ++k) r.v[k] -= ritz.values[j] * psi[j].v[k];
            ritz.worst_residual = std::max(
                ritz.worst_residual, field_norm(r) / std::max(1.0, std::abs(ritz.values[j])));
        }
        if (ritz.worst_residual < 1e-8) break;
    }
    ritz.vectors = std::move(psi);
    return ritz;
}

// window projection in one of three shapes: zero, identity, or low-rank
struct WindowProjection {
    bool zero = false;
    bool identity = false;
    std::vector<LatticeField> basis; // orthonormal (weighted)

    LatticeField apply(const LatticeField& f) const {
        if (identity) return f;
        LatticeField out = make_field(f.grid, f.domain);
        if (zero) return out;
        for (const auto& b : basis) {
            const auto c = field_inner(b, f);
            for (std::size_t k = 0; k < out.v.size(); ++k) out.v[k] += c * b.v[k];
        }
        return out;
    }
};

void guard_window_edges(const std::vector<double>& eigs, double a, double b, double eps,
                        const char* side) {
    for (const double v : eigs)
        if (std::abs(v - a) < eps || std::abs(v - b) < eps)
            throw ConfigError(std::string("spectra: ") + side +
                              " eigenvalue grazes the window edge");
}

} // namespace

Window::Window(double a_, double b_, double mu_, int multiplicity_)
    : a(a_), b(b_), mu(mu_), multiplicity(multiplicity_) {
    if (!(a < b)) throw ConfigError("window: need a < b");
    if (!(mu > 0.0)) throw ConfigError("window: need mu > 0");
    if (!(-mu < a)) throw ConfigError("window: need -mu < a");
    if (multiplicity < 1) throw ConfigError("window: multiplicity must be positive");
}

SpectrumSet spectrum(const OperatorSpec& op, const LatticeGrid& grid, int samples) {
    if (op.symbol.dim != grid.dim) throw std::invalid_argument("spectrum: dimension mismatch");
    SpectrumSet s;
    if (!op.potential) {
        if (samples < 2) throw std::invalid_argument("spectrum: need at least 2 samples");
        const double top = range_max(op.symbol, op.space, grid);
        s.kind = SpectrumSet::Kind::sampled_range;
        s.values.resize(samples);
        for (int k = 0; k < samples; ++k) s.values[k] = top * k / (samples - 1);
        s.note = "sampled multiplier range";
        return s;
    }
    s.kind = SpectrumSet::Kind::eigenvalue_list;
    s.values = dense_eigenvalues(dense_operator(op.symbol, op.space, &*op.potential, grid));
    s.note = "dense symmetric eigensolve";
    return s;
}

double hausdorff(const SpectrumSet& X, const SpectrumSet& Y) {
    if (X.values.empty() || Y.values.empty())
        throw std::domain_error("hausdorff: sets must be non-empty");
    return std::max(one_sided(X.values, Y.values), one_sided(Y.values, X.values));
}

double local_hausdorff(const SpectrumSet& X, const SpectrumSet& Y, const Window& K) {
    double sup = -inf;
    for (const double x : X.values)
        if (x >= K.a && x <= K.b) sup = std::max(sup, dist_to_sorted(x, Y.values));
    for (const double y : Y.values)
        if (y >= K.a && y <= K.b) sup = std::max(sup, dist_to_sorted(y, X.values));
    return std::max(0.0, sup);
}

double resolvent_spectrum_distance(const Symbol& sym, const PotentialSpec* potential,
                                   const ContinuumProxy& proxy, double mu,
                                   double resolution) {
    if (!(mu > 0.0)) throw std::invalid_argument("resolvent_spectrum_distance: need mu > 0");
    if (potential && !(mu > potential->bound))
        throw std::invalid_argument("resolvent_spectrum_distance: need mu > sup |V|");

    SpectrumSet X, Y;
    X.kind = Y.kind = SpectrumSet::Kind::eigenvalue_list;
    if (!potential) {
        // both spectra are intervals [0, max]; sample them uniformly in the
        // mapped coordinate so the comparison resolution is flat
        const double h = proxy.coarse.h;
        const double rho = resolution > 0.0 ? resolution : 0.01 * h * h;
        auto mapped_interval = [&](double top) {
            const double lo = 1.0 / (top + mu), hi = 1.0 / mu;
            const int count = std::max(2, static_cast<int>(std::ceil((hi - lo) / rho)) + 1);
            std::vector<double> vals(count);
            for (int k = 0; k < count; ++k)
                vals[k] = lo + (hi - lo) * k / (count - 1);
            return vals;
        };
        X.values = mapped_interval(range_max(sym, OperatorSpace::discrete, proxy.coarse));
        Y.values = mapped_interval(range_max(sym, OperatorSpace::proxy, proxy.fine));
    } else {
        auto mapped_eigs = [&](OperatorSpace space, const LatticeGrid& grid) {
            std::vector<double> eigs =
                dense_eigenvalues(dense_operator(sym, space, potential, grid));
            if (!eigs.empty() && eigs.front() + mu <= 0.0)
                throw std::invalid_argument(
                    "resolvent_spectrum_distance: mu does not clear the spectrum bottom");
            for (double& v : eigs) v = 1.0 / (v + mu);
            std::sort(eigs.begin(), eigs.end());
            return eigs;
        };
        X.values = mapped_eigs(OperatorSpace::discrete, proxy.coarse);
        Y.values = mapped_eigs(OperatorSpace::proxy, proxy.fine);
    }
    return hausdorff(X, Y);
}

double union_with_zero_defect(const RieszPair& pair, const ContinuumProxy& proxy,
                              std::uint64_t seed) {
    const auto nf = proxy.fine.size();
    const auto nc = proxy.coarse.size();
    if (nf > 512) throw ConfigError("union_with_zero_defect: fine grid too large to assemble");

    std::uint64_t state = seed;
    std::vector<double> diag(static_cast<std::size_t>(nc));
    for (auto& v : diag) {
        v = uniform(state, 0.5, 2.0);
        if (uniform01(state) < 0.5) v = -v;
    }

    Eigen::MatrixXcd m(nf, nf);
    for (std::int64_t q = 0; q < nf; ++q) {
        LatticeField e = make_field(proxy.fine, Domain::space);
        e.v[q] = 1.0;
        LatticeField u = discretize(e, pair, proxy);
        for (std::int64_t i = 0; i < nc; ++i) u.v[i] *= diag[i];
        const LatticeField f = embed(u, pair, proxy);
        for (std::int64_t p = 0; p < nf; ++p) m(p, q) = f.v[p];
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, false);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("union_with_zero_defect: eigensolver failed");

    std::vector<double> expected(diag.begin(), diag.end());
    expected.resize(static_cast<std::size_t>(nf), 0.0);
    std::sort(expected.begin(), expected.end());
    std::vector<double> got(static_cast<std::size_t>(nf));
    double worst_imag = 0.0;
    for (std::int64_t i = 0; i < nf; ++i) {
        got[i] = es.eigenvalues()(i).real();
        worst_imag = std::max(worst_imag, std::abs(es.eigenvalues()(i).imag()));
    }
    std::sort(got.begin(), got.end());
    double worst = worst_imag;
    for (std::int64_t i = 0; i < nf; ++i)
        worst = std::max(worst, std::abs(got[i] - expected[i]));
    return worst;
}

GapReport gap_check(const Symbol& sym, const PotentialSpec* potential, double a, double b,
                    const std::vector<double>& h_list, double box_half, int verify_points) {
    if (!(a <= b)) throw std::invalid_argument("gap_check: need a <= b");
    if (h_list.empty()) throw std::invalid_argument("gap_check: empty h list");

    // continuum reference first: the interval must clear the proxy spectrum
    const double hv = 2.0 * box_half / verify_points;
    const LatticeGrid vgrid(sym.dim, hv, verify_points);
    OperatorSpec vop{sym, OperatorSpace::proxy, std::nullopt};
    if (potential) vop.potential = *potential;
    const SpectrumSet vspec = spectrum(vop, vgrid);
    GapReport rep;
    rep.proxy_distance = interval_clearance(vspec, a, b);
    if (rep.proxy_distance <= 0.0)
        throw ConfigError("gap_check: [a, b] meets the continuum reference spectrum");

    rep.all_empty = true;
    for (const double h : h_list) {
        const LatticeGrid grid = grid_for(sym.dim, box_half, h);
        OperatorSpec op{sym, OperatorSpace::discrete, std::nullopt};
        if (potential) op.potential = *potential;
        const SpectrumSet s = spectrum(op, grid);
        GapEntry e;
        e.h = h;
        e.distance = interval_clearance(s, a, b);
        e.empty = e.distance > 0.0;
        rep.all_empty = rep.all_empty && e.empty;
        rep.entries.push_back(e);
    }
    return rep;
}

TrackReport track_eigenvalues(const Symbol& sym, const PotentialSpec& potential,
                              const RieszPair& pair, const Window& window,
                              const std::vector<double>& h_list, double box_half,
                              int refine) {
    if (h_list.empty()) throw std::invalid_argument("track_eigenvalues: empty h list");
    const int m = window.multiplicity;

    // the window must isolate exactly m eigenvalues on a dense reference
    {
        const int nv = 2048;
        const LatticeGrid vgrid = grid_for(sym.dim, box_half, 2.0 * box_half / nv);
        const auto eigs =
            dense_eigenvalues(dense_operator(sym, OperatorSpace::proxy, &potential, vgrid));
        const auto inside = window_values(eigs, window.a, window.b);
        if (static_cast<int>(inside.size()) != m)
            throw ConfigError("track_eigenvalues: window does not isolate the expected count");
    }

    TrackReport rep;
    OperatorSpec proxy_op{sym, OperatorSpace::proxy, potential};
    double h_finest = inf;
    for (const double h : h_list) {
        const LatticeGrid coarse = grid_for(sym.dim, box_half, h);
        const ContinuumProxy proxy(coarse, refine);

        const Eigen::MatrixXd md = dense_operator(sym, OperatorSpace::discrete, &potential, coarse);
        const auto eigs = dense_eigenvalues(md);
        TrackEntry e;
        e.h = h;
        e.discrete = window_values(eigs, window.a, window.b);
        e.count = static_cast<int>(e.discrete.size());
        e.count_ok = e.count == m;

        const double sigma =
            e.count > 0 ? e.discrete[0] : 0.5 * (window.a + window.b);
        const RitzSet ritz = iterate_window_vectors(proxy_op, proxy.fine, m, sigma, 0xf1be5ULL);
        if (h < h_finest) {
            h_finest = h;
            rep.reference = ritz.values;
        }

        std::vector<LatticeField> pvecs =
            dense_window_vectors(md, e.discrete, coarse, 0xc0a57ULL);
        e.lambda_gap = std::numeric_limits<double>::quiet_NaN();
        if (e.count_ok) {
            e.lambda_gap = 0.0;
            for (int i = 0; i < m; ++i)
                e.lambda_gap = std::max(e.lambda_gap, std::abs(e.discrete[i] - ritz.values[i]));
        }

        e.k_psi_norm = inf;
        e.subspace_residual = 0.0;
        for (int j = 0; j < m; ++j) {
            const LatticeField kpsi = discretize(ritz.vectors[j], pair, proxy);
            const double kn = field_norm(kpsi);
            e.k_psi_norm = std::min(e.k_psi_norm, kn);
            LatticeField r = kpsi;
            for (const auto& v : pvecs) {
                const auto c = field_inner(v, kpsi) / field_inner(v, v);
                for (std::size_t k = 0; k < r.v.size(); ++k) r.v[k] -= c * v.v[k];
            }
            e.subspace_residual = std::max(e.subspace_residual, field_norm(r) / kn);
        }
        rep.entries.push_back(e);
    }
    rep.note = "dense coarse eigensolve; proxy reference by shifted inverse iteration";
    return rep;
}

double spectral_projection_distance(const Symbol& sym, const PotentialSpec* potential,
                                    const RieszPair& pair, const Window& window, double h,
                                    double box_half, int refine, double gamma_hint) {
    const double eps = std::max(1e-3, 5.0 * std::pow(h, gamma_hint));
    const LatticeGrid coarse = grid_for(sym.dim, box_half, h);
    const ContinuumProxy proxy(coarse, refine);
    OperatorSpec dop{sym, OperatorSpace::discrete, std::nullopt};
    OperatorSpec pop{sym, OperatorSpace::proxy, std::nullopt};
    if (potential) {
        dop.potential = *potential;
        pop.potential = *potential;
    }

    // discrete side: dense eigenvalues, then window vectors
    const Eigen::MatrixXd md = dense_operator(sym, OperatorSpace::discrete,
                                              potential, coarse);
    const auto deigs = dense_eigenvalues(md);
    guard_window_edges(deigs, window.a, window.b, eps, "discrete");
    const auto dwin = window_values(deigs, window.a, window.b);
    WindowProjection eh;
    if (dwin.empty()) eh.zero = true;
    else if (dwin.size() == deigs.size()) eh.identity = true;
    else if (dwin.size() <= 32) eh.basis = dense_window_vectors(md, dwin, coarse, 0xe16eULL);
    else throw ConfigError("spectral_projection_distance: window rank too large");

    // proxy side: count on a dense reference, vectors by inverse iteration
    const int nv = 2048;
    const LatticeGrid vgrid = grid_for(sym.dim, box_half, 2.0 * box_half / nv);
    const auto peigs = dense_eigenvalues(dense_operator(sym, OperatorSpace::proxy,
                                                        potential, vgrid));
    guard_window_edges(peigs, window.a, window.b, eps, "proxy");
    const auto pwin = window_values(peigs, window.a, window.b);
    WindowProjection ep;
    if (pwin.empty()) ep.zero = true;
    else if (pwin.size() == peigs.size()) ep.identity = true;
    else if (pwin.size() <= 32) {
        const double sigma = 0.5 * (pwin.front() + pwin.back());
        ep.basis = iterate_window_vectors(pop, proxy.fine, static_cast<int>(pwin.size()),
                                          sigma, 0xd1f7ULL)
                       .vectors;
    } else throw ConfigError("spectral_projection_distance: window rank too large");

    auto apply = [&](const LatticeField& f) {
        const LatticeField u = eh.apply(discretize(f, pair, proxy));
        LatticeField out = embed(u, pair, proxy);
        const LatticeField pf = ep.apply(f);
        for (std::size_t k = 0; k < out.v.size(); ++k) out.v[k] -= pf.v[k];
        return out;
    };
    auto apply_adjoint = [&](const LatticeField& f) {
        const LatticeField u = eh.apply(embed_adjoint(f, pair, proxy));
        LatticeField out = discretize_adjoint(u, pair, proxy);
        const LatticeField pf = ep.apply(f);
        for (std::size_t k = 0; k < out.v.size(); ++k) out.v[k] -= pf.v[k];
        return out;
    };
    return operator_norm_power(apply, apply_adjoint, proxy.fine, 2000, 0xacce5ULL).value;
}

} // namespace fourlat
