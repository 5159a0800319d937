#include "fourlat/lattice.hpp"

#include "fourlat/fft.hpp"
#include "fourlat/rng.hpp"
#include "fourlat/symbols.hpp" // max_dim

#include <cmath>
#include <stdexcept>

namespace fourlat {

namespace {

constexpr double two_pi = 6.283185307179586477;

void check_compatible(const LatticeField& f, const LatticeGrid& grid, Domain domain,
                      const char* where) {
    if (!f.grid.same_as(grid)) throw std::invalid_argument(std::string(where) + ": grid mismatch");
    if (f.domain != domain) throw std::invalid_argument(std::string(where) + ": wrong field domain");
}

} // namespace

LatticeGrid::LatticeGrid(int dim_, double h_, int n_) : dim(dim_), h(h_), n(n_) {
    if (dim < 1 || dim > max_dim) throw std::invalid_argument("grid: dim must be 1..3");
    if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("grid: h must be positive");
    if (n < 8 || n % 2 != 0) throw std::invalid_argument("grid: n must be even and >= 8");
}

std::int64_t LatticeGrid::size() const {
    std::int64_t s = 1;
    for (int i = 0; i < dim; ++i) s *= n;
    return s;
}

double LatticeGrid::space_weight() const { return std::pow(h, dim); }
double LatticeGrid::freq_weight() const { return std::pow(freq_step(), dim); }

LatticeField make_field(const LatticeGrid& grid, Domain domain) {
    return LatticeField{grid, domain, std::vector<std::complex<double>>(grid.size())};
}

LatticeField random_field(const LatticeGrid& grid, Domain domain, std::uint64_t seed) {
    LatticeField f = make_field(grid, domain);
    std::uint64_t state = seed;
    for (auto& z : f.v) {
        // Box-Muller keeps the stream reproducible across platforms.
        const double u1 = std::max(uniform01(state), 1e-300);
        const double u2 = uniform01(state);
        const double r = std::sqrt(-2.0 * std::log(u1));
        z = {r * std::cos(two_pi * u2), r * std::sin(two_pi * u2)};
    }
    return f;
}

double field_norm(const LatticeField& f) {
    double acc = 0.0;
    for (const auto& z : f.v) acc += std::norm(z);
    const double w = f.domain == Domain::space ? f.grid.space_weight() : f.grid.freq_weight();
    return std::sqrt(w * acc);
}

std::complex<double> field_inner(const LatticeField& a, const LatticeField& b) {
    if (!a.grid.same_as(b.grid) || a.domain != b.domain)
        throw std::invalid_argument("field_inner: incompatible fields");
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i) acc += std::conj(a.v[i]) * b.v[i];
    const double w = a.domain == Domain::space ? a.grid.space_weight() : a.grid.freq_weight();
    return w * acc;
}

LatticeField dft(const LatticeField& f) {
    if (f.domain != Domain::space) throw std::invalid_argument("dft: expected a space-side field");
    LatticeField g{f.grid, Domain::frequency, f.v};
    fft_unnormalized(g.v.data(), f.grid.shape(), -1);
    const double scale = f.grid.space_weight() * std::pow(two_pi, -0.5 * f.grid.dim);
    for (auto& z : g.v) z *= scale;
    return g;
}

LatticeField idft(const LatticeField& g) {
    if (g.domain != Domain::frequency) throw std::invalid_argument("idft: expected a frequency-side field");
    LatticeField f{g.grid, Domain::space, g.v};
    fft_unnormalized(f.v.data(), g.grid.shape(), +1);
    const double scale =
        std::pow(two_pi, 0.5 * g.grid.dim) / std::pow(g.grid.h * g.grid.n, g.grid.dim);
    for (auto& z : f.v) z *= scale;
    return f;
}

ContinuumProxy::ContinuumProxy(const LatticeGrid& coarse_, int refine_)
    : coarse(coarse_), refine(refine_), fine(coarse_.dim, coarse_.h / refine_, coarse_.n * refine_) {
    if (refine < 4) throw std::invalid_argument("proxy: refinement < 4 aliases the shifted masks");
}

namespace {

// Synthesis-type map: extend coarse frequencies periodically onto the fine
// cell and multiply by (2pi)^{d/2} profile(h xi).
LatticeField spread_with_profile(const LatticeField& u, const std::function<double(double)>& axis,
                                 const ContinuumProxy& proxy) {
    check_compatible(u, proxy.coarse, Domain::space, "embed");
    const int d = proxy.coarse.dim;
    const int nc = proxy.coarse.n;
    const int nf = proxy.fine.n;
    const double h = proxy.coarse.h;
    const double dxi = proxy.coarse.freq_step();

    LatticeField uhat = dft(u);
    LatticeField out = make_field(proxy.fine, Domain::frequency);
    const double norm = std::pow(two_pi, 0.5 * d);

    int p[max_dim];
    const std::int64_t total = proxy.fine.size();
    for (std::int64_t f = 0; f < total; ++f) {
        decode_index(f, d, nf, p);
        double factor = norm;
        std::int64_t cflat = 0;
        for (int i = 0; i < d; ++i) {
            const int m = p[i] < nf / 2 ? p[i] : p[i] - nf; // signed fine index
            factor *= axis(h * dxi * m);
            const int c = ((m % nc) + nc) % nc; // coarse storage slot
            cflat = cflat * nc + c;
        }
        if (factor != 0.0) out.v[f] = factor * uhat.v[cflat];
    }
    return idft(out);
}

// Analysis-type map: fold fine frequencies back with profile(h xi + 2pi j).
LatticeField fold_with_profile(const LatticeField& f, const std::function<double(double)>& axis,
                               const ContinuumProxy& proxy) {
    check_compatible(f, proxy.fine, Domain::space, "discretize");
    const int d = proxy.coarse.dim;
    const int nc = proxy.coarse.n;
    const int nf = proxy.fine.n;
    const double h = proxy.coarse.h;
    const double dxi = proxy.coarse.freq_step();

    LatticeField fhat = dft(f);
    LatticeField out = make_field(proxy.coarse, Domain::frequency);
    const double norm = std::pow(two_pi, 0.5 * d);

    int p[max_dim];
    int shifts = 1;
    for (int i = 0; i < d; ++i) shifts *= 3;

    const std::int64_t total = proxy.coarse.size();
    for (std::int64_t c = 0; c < total; ++c) {
        decode_index(c, d, nc, p);
        std::complex<double> acc = 0.0;
        for (int s = 0; s < shifts; ++s) {
            int rem = s;
            double factor = 1.0;
            std::int64_t fflat = 0;
            for (int i = 0; i < d; ++i) {
                const int j = rem % 3 - 1;
                rem /= 3;
                const int m = p[i] < nc / 2 ? p[i] : p[i] - nc; // signed coarse index
                factor *= axis(h * dxi * m + two_pi * j);
                const int mf = m + nc * j; // fine signed index, inside the cell for refine >= 4
                fflat = fflat * nf + proxy.fine.wrap(mf);
            }
            if (factor != 0.0) acc += factor * fhat.v[fflat];
        }
        out.v[c] = norm * acc;
    }
    return idft(out);
}

} // namespace

LatticeField embed(const LatticeField& u, const RieszPair& pair, const ContinuumProxy& proxy) {
    if (pair.dim != proxy.coarse.dim) throw std::invalid_argument("embed: pair dimension mismatch");
    return spread_with_profile(u, pair.phi_axis, proxy);
}

LatticeField discretize(const LatticeField& f, const RieszPair& pair, const ContinuumProxy& proxy) {
    if (pair.dim != proxy.coarse.dim) throw std::invalid_argument("discretize: pair dimension mismatch");
    return fold_with_profile(f, pair.psi_axis, proxy);
}

LatticeField embed_adjoint(const LatticeField& f, const RieszPair& pair, const ContinuumProxy& proxy) {
    if (pair.dim != proxy.coarse.dim) throw std::invalid_argument("embed_adjoint: pair dimension mismatch");
    return fold_with_profile(f, pair.phi_axis, proxy);
}

LatticeField discretize_adjoint(const LatticeField& u, const RieszPair& pair,
                                const ContinuumProxy& proxy) {
    if (pair.dim != proxy.coarse.dim)
        throw std::invalid_argument("discretize_adjoint: pair dimension mismatch");
    return spread_with_profile(u, pair.psi_axis, proxy);
}

LatticeField kernel_witness(const RieszPair& pair, const ContinuumProxy& proxy) {
    if (pair.dim != proxy.coarse.dim) throw std::invalid_argument("kernel_witness: pair dimension mismatch");
    const int d = proxy.fine.dim;
    const int nf = proxy.fine.n;
    const double h = proxy.coarse.h;
    const double dxi = proxy.coarse.freq_step();

    LatticeField fhat = make_field(proxy.fine, Domain::frequency);
    int p[max_dim];
    for (std::int64_t f = 0; f < proxy.fine.size(); ++f) {
        decode_index(f, d, nf, p);
        double val = 1.0;
        for (int i = 0; i < d; ++i) {
            const int m = p[i] < nf / 2 ? p[i] : p[i] - nf;
            const double t = h * dxi * m;
            val *= i == 0 ? kernel_witness_profile(pair, t) : pair.psi_axis(t);
        }
        fhat.v[f] = val;
    }
    LatticeField out = idft(fhat);
    const double nrm = field_norm(out);
    if (nrm == 0.0) throw std::runtime_error("kernel_witness: degenerate profile");
    for (auto& z : out.v) z /= nrm;
    return out;
}

LatticeField sample_potential(const std::function<double(const double*, int)>& potential,
                              const LatticeGrid& grid) {
    if (!potential) throw std::invalid_argument("sample_potential: evaluator required");
    LatticeField out = make_field(grid, Domain::space);
    int p[max_dim];
    double x[max_dim];
    for (std::int64_t f = 0; f < grid.size(); ++f) {
        decode_index(f, grid.dim, grid.n, p);
        for (int i = 0; i < grid.dim; ++i) x[i] = grid.h * grid.signed_index(p[i]);
        const double v = potential(x, grid.dim);
        if (!std::isfinite(v)) throw std::domain_error("sample_potential: non-finite sample");
        out.v[f] = v;
    }
    return out;
}

ProjectionCheck projection_check(const RieszPair& pair, const ContinuumProxy& proxy, int trials,
                                 std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("projection_check: need at least one trial");
    ProjectionCheck result;
    for (int t = 0; t < trials; ++t) {
        LatticeField f = random_field(proxy.fine, Domain::space, mix_seed(seed, t));
        const double fn = field_norm(f);
        LatticeField p1 = embed(discretize(f, pair, proxy), pair, proxy);
        LatticeField p2 = embed(discretize(p1, pair, proxy), pair, proxy);
        double idem = 0.0, gap = 0.0;
        for (std::size_t i = 0; i < f.v.size(); ++i) {
            idem += std::norm(p2.v[i] - p1.v[i]);
            gap += std::norm(p1.v[i] - f.v[i]);
        }
        const double w = proxy.fine.space_weight();
        result.idempotency_defect = std::max(result.idempotency_defect, std::sqrt(w * idem) / fn);
        result.identity_gap = std::max(result.identity_gap, std::sqrt(w * gap) / fn);
    }
    return result;
}

} // namespace fourlat
