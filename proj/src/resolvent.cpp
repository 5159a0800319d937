#include "fourlat/resolvent.hpp"

#include "fourlat/errors.hpp"
#include "fourlat/fft.hpp"
#include "fourlat/rng.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fourlat {

namespace {

constexpr double two_pi = 6.283185307179586477;

using cvec = std::vector<std::complex<double>>;

// symbol values over a grid's frequency storage order
std::vector<double> multiplier_values(const Symbol& sym, OperatorSpace space,
                                      const LatticeGrid& grid) {
    if (sym.dim != grid.dim) throw std::invalid_argument("operator: symbol dimension mismatch");
    std::vector<double> g(static_cast<std::size_t>(grid.size()));
    const double dxi = grid.freq_step();
    int p[max_dim];
    double xi[max_dim];
    for (std::int64_t f = 0; f < grid.size(); ++f) {
        decode_index(f, grid.dim, grid.n, p);
        for (int i = 0; i < grid.dim; ++i) xi[i] = dxi * grid.signed_index(p[i]);
        g[f] = space == OperatorSpace::discrete ? eval_discretized(sym, grid.h, xi)
                                                : eval_symbol(sym, xi);
    }
    return g;
}

std::vector<double> potential_values(const PotentialSpec& V, const LatticeGrid& grid) {
    if (V.dim != grid.dim) throw std::invalid_argument("operator: potential dimension mismatch");
    const LatticeField f = sample_potential(V.evaluator, grid);
    std::vector<double> out(f.v.size());
    for (std::size_t i = 0; i < f.v.size(); ++i) out[i] = f.v[i].real();
    return out;
}

LatticeField resolve_diagonal(const std::vector<double>& mult, std::complex<double> z,
                              const LatticeField& u) {
    LatticeField g = dft(u);
    for (std::size_t i = 0; i < g.v.size(); ++i) g.v[i] /= mult[i] - z;
    return idft(g);
}

std::complex<double> dot(const cvec& a, const cvec& b) {
    std::complex<double> s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

double nrm(const cvec& a) { return std::sqrt(std::abs(dot(a, a))); }

// GMRES on (I + V R0) y = u followed by w = R0 y; the Krylov residual of
// the right-preconditioned system is the true residual of (H - z) w = u.
LatticeField resolve_gmres(const std::vector<double>& mult, const std::vector<double>& pot,
                           std::complex<double> z, const LatticeField& u, double tol,
                           int max_iter) {
    if (max_iter < 1) throw std::invalid_argument("apply_resolvent: max_iter must be >= 1");
    const std::size_t n = u.v.size();

    auto apply_r0 = [&](const cvec& y) {
        LatticeField t = make_field(u.grid, u.domain);
        t.v = y;
        return resolve_diagonal(mult, z, t).v;
    };
    auto apply_a = [&](const cvec& y) {
        cvec t = apply_r0(y);
        for (std::size_t i = 0; i < n; ++i) t[i] = y[i] + pot[i] * t[i];
        return t;
    };

    const double unorm = nrm(u.v);
    if (unorm == 0.0) return make_field(u.grid, u.domain);

    std::vector<cvec> basis;
    basis.reserve(max_iter + 1);
    {
        cvec v0 = u.v;
        for (auto& x : v0) x /= unorm;
        basis.push_back(std::move(v0));
    }
    std::vector<cvec> rcols; // rotated Hessenberg columns (upper triangular)
    cvec cs(max_iter), sn(max_iter), g(max_iter + 1, 0.0);
    g[0] = unorm;

    double rel = 1.0;
    int steps = 0;
    bool solved = false;
    while (steps < max_iter) {
        cvec w = apply_a(basis[steps]);
        cvec h(steps + 2, 0.0);
        for (int i = 0; i <= steps; ++i) {
            h[i] = dot(basis[i], w);
            for (std::size_t j = 0; j < n; ++j) w[j] -= h[i] * basis[i][j];
        }
        const double hh = nrm(w);
        h[steps + 1] = hh;
        if (hh > 0.0) {
            for (auto& x : w) x /= hh;
            basis.push_back(std::move(w));
        }

        for (int i = 0; i < steps; ++i) {
            const auto t = cs[i] * h[i] + sn[i] * h[i + 1];
            h[i + 1] = -std::conj(sn[i]) * h[i] + cs[i] * h[i + 1];
            h[i] = t;
        }
        const double a = std::abs(h[steps]), b = std::abs(h[steps + 1]);
        const double r = std::hypot(a, b);
        if (r == 0.0) {
            cs[steps] = 1.0;
            sn[steps] = 0.0;
        } else if (a == 0.0) {
            cs[steps] = 0.0;
            sn[steps] = std::conj(h[steps + 1]) / r;
        } else {
            const auto phase = h[steps] / a;
            cs[steps] = a / r;
            sn[steps] = phase * std::conj(h[steps + 1]) / r;
        }
        h[steps] = cs[steps] * h[steps] + sn[steps] * h[steps + 1];
        h[steps + 1] = 0.0;
        g[steps + 1] = -std::conj(sn[steps]) * g[steps];
        g[steps] = cs[steps] * g[steps];

        h.resize(steps + 1);
        rcols.push_back(std::move(h));
        ++steps;
        rel = std::abs(g[steps]) / unorm;
        if (rel <= tol || hh == 0.0) {
            solved = rel <= tol || hh == 0.0;
            break;
        }
    }
    if (!solved && rel > tol)
        throw SolverError("apply_resolvent: no convergence in " + std::to_string(steps) +
                              " iterations",
                          rel, steps);

    // back-substitute R y = g, assemble y in the Krylov basis, precondition
    cvec y(steps, 0.0);
    for (int i = steps - 1; i >= 0; --i) {
        std::complex<double> s = g[i];
        for (int j = i + 1; j < steps; ++j) s -= rcols[j][i] * y[j];
        y[i] = s / rcols[i][i];
    }
    cvec x(n, 0.0);
    for (int j = 0; j < steps; ++j)
        for (std::size_t i = 0; i < n; ++i) x[i] += y[j] * basis[j][i];

    LatticeField out = make_field(u.grid, u.domain);
    out.v = apply_r0(x);
    return out;
}

LatticeField resolve(const std::vector<double>& mult, const std::vector<double>* pot,
                     std::complex<double> z, const LatticeField& u, double tol, int max_iter) {
    return pot ? resolve_gmres(mult, *pot, z, u, tol, max_iter) : resolve_diagonal(mult, z, u);
}

int pow_int(int base, int exp) {
    int r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

// spectral norm of a small row-major complex matrix
double spectral_norm(const std::vector<std::complex<double>>& m, int rows) {
    Eigen::MatrixXcd a(rows, rows);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < rows; ++j) a(i, j) = m[i * rows + j];
    return a.jacobiSvd().singularValues()(0);
}

// diagonal tail of one fiber: sup over the given per-axis shift lists,
// skipping tuples whose shifts all lie in {-1,0,1} (those sit in the block)
double far_diagonal(const Symbol& sym, double h, std::complex<double> z, const double* zeta,
                    const std::vector<std::vector<int>>& jlists) {
    const int d = sym.dim;
    std::int64_t total = 1;
    for (int i = 0; i < d; ++i) total *= static_cast<std::int64_t>(jlists[i].size());
    double sup = 0.0;
    double xi[max_dim];
    for (std::int64_t f = 0; f < total; ++f) {
        std::int64_t rem = f;
        bool in_block = true;
        for (int i = 0; i < d; ++i) {
            const int j = jlists[i][rem % jlists[i].size()];
            rem /= jlists[i].size();
            in_block = in_block && std::abs(j) <= 1;
            xi[i] = zeta[i] + two_pi * j / h;
        }
        if (in_block) continue;
        sup = std::max(sup, 1.0 / std::abs(eval_symbol(sym, xi) - z));
    }
    return sup;
}

struct FiberAccumulator {
    const Symbol& sym;
    const RieszPair& pair;
    double h;
    std::complex<double> z;
    int block; // 3^d
    std::vector<std::complex<double>> scratch;

    FiberAccumulator(const Symbol& s, const RieszPair& p, double hh, std::complex<double> zz)
        : sym(s), pair(p), h(hh), z(zz), block(pow_int(3, s.dim)), scratch(block * block) {}

    double block_norm(const double* zeta) {
        fill_matrix(zeta);
        return spectral_norm(scratch, block);
    }

    void fill_matrix(const double* zeta) {
        const int d = sym.dim;
        const std::complex<double> a = 1.0 / (eval_discretized(sym, h, zeta) - z);
        const double amp = std::pow(two_pi, d);
        double argp[max_dim], argq[max_dim], xi[max_dim];
        for (int jp = 0; jp < block; ++jp) {
            int rem = jp;
            for (int i = 0; i < d; ++i) {
                argp[i] = h * zeta[i] + two_pi * (rem % 3 - 1);
                rem /= 3;
            }
            const double phi = pair.phi_hat(argp);
            for (int jq = 0; jq < block; ++jq) {
                int r2 = jq;
                for (int i = 0; i < d; ++i) {
                    const int j = r2 % 3 - 1;
                    r2 /= 3;
                    argq[i] = h * zeta[i] + two_pi * j;
                    xi[i] = zeta[i] + two_pi * j / h;
                }
                std::complex<double> entry = amp * phi * pair.psi_hat(argq) * a;
                if (jp == jq) entry -= 1.0 / (eval_symbol(sym, xi) - z);
                scratch[jp * block + jq] = entry;
            }
        }
    }
};

NormEstimate power_iterate(const std::function<double(cvec&)>& round_trip, std::size_t n,
                           int iters, std::uint64_t seed, int restarts) {
    // round_trip: v (unit) -> writes A*A v into v, returns ||A v||^2
    NormEstimate best;
    for (int r = 0; r < restarts; ++r) {
        std::uint64_t state = mix_seed(seed, static_cast<std::uint64_t>(r));
        cvec v(n);
        for (auto& x : v) {
            // Box-Muller on splitmix draws, matching the field generator
            const double u1 = std::max(uniform01(state), 1e-300);
            const double u2 = uniform01(state);
            const double rad = std::sqrt(-2.0 * std::log(u1));
            x = {rad * std::cos(two_pi * u2), rad * std::sin(two_pi * u2)};
        }
        double nv = nrm(v);
        for (auto& x : v) x /= nv;

        double lambda = -1.0;
        NormEstimate cur;
        for (int it = 0; it < iters; ++it) {
            cvec w = v;
            const double ray = round_trip(w);
            cur.iterations = it + 1;
            if (ray <= 1e-300) {
                cur.value = 0.0;
                cur.converged = true;
                cur.last_increment = 0.0;
                break;
            }
            cur.value = std::sqrt(ray);
            cur.last_increment = lambda < 0.0 ? ray : std::abs(ray - lambda);
            if (lambda >= 0.0 && cur.last_increment <= 1e-6 * ray) {
                cur.converged = true;
                break;
            }
            lambda = ray;
            const double nw = nrm(w);
            if (nw == 0.0) {
                cur.converged = true;
                break;
            }
            v = std::move(w);
            for (auto& x : v) x /= nw;
        }
        if (cur.value > best.value || r == 0) best = cur;
    }
    return best;
}

} // namespace

PotentialSpec make_cos_potential(int dim) {
    PotentialSpec V;
    V.dim = dim;
    V.name = "cos";
    V.evaluator = [](const double* x, int) { return std::cos(x[0]); };
    V.bound = 1.0;
    V.theta = 1.0;
    return V;
}

PotentialSpec make_rough_potential(int dim) {
    PotentialSpec V;
    V.dim = dim;
    V.name = "abs-sin-sqrt";
    V.evaluator = [](const double* x, int) { return std::sqrt(std::abs(std::sin(x[0]))); };
    V.bound = 1.0;
    V.theta = 0.5;
    return V;
}

PotentialSpec make_well_potential(int dim) {
    PotentialSpec V;
    V.dim = dim;
    V.name = "sech2-well";
    V.evaluator = [](const double* x, int d) {
        double r2 = 0.0;
        for (int i = 0; i < d; ++i) r2 += x[i] * x[i];
        const double s = 1.0 / std::cosh(std::sqrt(r2));
        return -2.0 * s * s;
    };
    V.bound = 2.0;
    V.theta = 1.0;
    return V;
}

PotentialSpec make_constant_potential(double c, int dim) {
    PotentialSpec V;
    V.dim = dim;
    V.name = "const";
    V.evaluator = [c](const double*, int) { return c; };
    V.bound = std::abs(c);
    V.theta = 1.0;
    return V;
}

double theta_prime(double theta, double tau, int dim) {
    if (!(theta > 0.0 && theta <= 1.0))
        throw std::invalid_argument("theta_prime: theta must lie in (0, 1]");
    if (!(tau > dim)) throw std::invalid_argument("theta_prime: tau must exceed the dimension");
    return theta * (tau - dim) / (tau - dim + theta);
}

PotentialCheck validate_potential(const PotentialSpec& V, double radius, int budget,
                                  std::uint64_t seed) {
    if (!V.evaluator) throw std::invalid_argument("validate_potential: evaluator required");
    if (!(V.theta > 0.0 && V.theta <= 1.0))
        throw std::invalid_argument("validate_potential: theta must lie in (0, 1]");
    std::uint64_t state = seed;
    PotentialCheck chk;
    double x[max_dim], y[max_dim];
    for (int t = 0; t < budget; ++t) {
        for (int i = 0; i < V.dim; ++i) x[i] = uniform(state, -radius, radius);
        const double vx = V.evaluator(x, V.dim);
        chk.worst_bound_excess = std::max(chk.worst_bound_excess, std::abs(vx) - V.bound);

        // pair across log-spaced separations to probe the Hoelder quotient
        const double sep = std::exp(uniform(state, std::log(1e-4), std::log(1.0)));
        double norm2 = 0.0;
        for (int i = 0; i < V.dim; ++i) {
            y[i] = uniform(state, -1.0, 1.0);
            norm2 += y[i] * y[i];
        }
        const double inv = sep / std::max(std::sqrt(norm2), 1e-12);
        for (int i = 0; i < V.dim; ++i) y[i] = x[i] + y[i] * inv;
        const double vy = V.evaluator(y, V.dim);
        chk.worst_quotient =
            std::max(chk.worst_quotient, std::abs(vx - vy) / std::pow(sep, V.theta));
    }
    chk.pass = chk.worst_bound_excess <= 1e-9 &&
               chk.worst_quotient <= 50.0 * std::max(1.0, V.bound);
    return chk;
}

LatticeField apply_operator(const OperatorSpec& op, const LatticeField& u) {
    if (u.domain != Domain::space)
        throw std::invalid_argument("apply_operator: expected a space-side field");
    const std::vector<double> mult = multiplier_values(op.symbol, op.space, u.grid);
    LatticeField g = dft(u);
    for (std::size_t i = 0; i < g.v.size(); ++i) g.v[i] *= mult[i];
    LatticeField out = idft(g);
    if (op.potential) {
        const std::vector<double> pot = potential_values(*op.potential, u.grid);
        for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] += pot[i] * u.v[i];
    }
    return out;
}

void require_admissible(std::complex<double> z, const PotentialSpec* potential) {
    if (!potential) {
        if (z.imag() == 0.0 && z.real() >= 0.0)
            throw std::domain_error("probe: z on [0, inf) touches the free spectrum");
        return;
    }
    const double mu = potential->bound + 1.0;
    if (z.imag() == 0.0 && z.real() > -mu)
        throw std::domain_error("probe: real z must sit at or below -(sup|V| + 1)");
}

LatticeField apply_resolvent(const OperatorSpec& op, std::complex<double> z,
                             const LatticeField& u, double tol, int max_iter) {
    require_admissible(z, op.potential ? &*op.potential : nullptr);
    return apply_resolvent_unchecked(op, z, u, tol, max_iter);
}

LatticeField apply_resolvent_unchecked(const OperatorSpec& op, std::complex<double> z,
                                       const LatticeField& u, double tol, int max_iter) {
    const std::vector<double> mult = multiplier_values(op.symbol, op.space, u.grid);
    if (!op.potential) return resolve_diagonal(mult, z, u);
    const std::vector<double> pot = potential_values(*op.potential, u.grid);
    return resolve_gmres(mult, pot, z, u, tol, max_iter);
}

ErrorOperatorHandle::ErrorOperatorHandle(Symbol sym, RieszPair p, ContinuumProxy prx,
                                         std::optional<PotentialSpec> pot, ResolventProbe prb)
    : symbol(std::move(sym)), pair(std::move(p)), proxy(std::move(prx)),
      potential(std::move(pot)), probe(prb) {
    if (pair.dim != symbol.dim || proxy.coarse.dim != symbol.dim)
        throw std::invalid_argument("error operator: dimension mismatch");
    require_admissible(probe.z, potential ? &*potential : nullptr);
    mult_coarse = multiplier_values(symbol, OperatorSpace::discrete, proxy.coarse);
    mult_fine = multiplier_values(symbol, OperatorSpace::proxy, proxy.fine);
    if (potential) {
        pot_coarse = potential_values(*potential, proxy.coarse);
        pot_fine = potential_values(*potential, proxy.fine);
    }
}

LatticeField ErrorOperatorHandle::apply(const LatticeField& f) const {
    if (!f.grid.same_as(proxy.fine) || f.domain != Domain::space)
        throw std::invalid_argument("error operator: expected a space-side fine field");
    const std::vector<double>* pc = potential ? &pot_coarse : nullptr;
    const std::vector<double>* pf = potential ? &pot_fine : nullptr;
    const LatticeField u = discretize(f, pair, proxy);
    const LatticeField r1 = resolve(mult_coarse, pc, probe.z, u, probe.tol, probe.max_iter);
    LatticeField out = embed(r1, pair, proxy);
    const LatticeField r2 = resolve(mult_fine, pf, probe.z, f, probe.tol, probe.max_iter);
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] = scale * (out.v[i] - r2.v[i]);
    return out;
}

LatticeField ErrorOperatorHandle::apply_adjoint(const LatticeField& f) const {
    if (!f.grid.same_as(proxy.fine) || f.domain != Domain::space)
        throw std::invalid_argument("error operator: expected a space-side fine field");
    const std::vector<double>* pc = potential ? &pot_coarse : nullptr;
    const std::vector<double>* pf = potential ? &pot_fine : nullptr;
    const std::complex<double> zb = std::conj(probe.z);
    const LatticeField u = embed_adjoint(f, pair, proxy);
    const LatticeField r1 = resolve(mult_coarse, pc, zb, u, probe.tol, probe.max_iter);
    LatticeField out = discretize_adjoint(r1, pair, proxy);
    const LatticeField r2 = resolve(mult_fine, pf, zb, f, probe.tol, probe.max_iter);
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] = scale * (out.v[i] - r2.v[i]);
    return out;
}

std::vector<std::complex<double>> error_fiber_matrix(const Symbol& sym, const RieszPair& pair,
                                                     double h, std::complex<double> z,
                                                     const double* zeta) {
    if (sym.dim != pair.dim) throw std::invalid_argument("fiber: dimension mismatch");
    FiberAccumulator acc(sym, pair, h, z);
    acc.fill_matrix(zeta);
    return acc.scratch;
}

double error_norm_fiber(const Symbol& sym, const RieszPair& pair, double h,
                        std::complex<double> z, const FiberSampling& sampling) {
    if (sym.dim != pair.dim) throw std::invalid_argument("fiber: dimension mismatch");
    if (!(h > 0.0)) throw std::invalid_argument("fiber: h must be positive");
    require_admissible(z, nullptr);
    const int d = sym.dim;
    if (sampling.per_axis < 2) throw std::invalid_argument("fiber: need >= 2 samples per axis");
    std::int64_t total = 1;
    for (int i = 0; i < d; ++i) {
        total *= sampling.per_axis;
        if (total > (1 << 24))
            throw std::invalid_argument("fiber: per-axis sampling too dense for this dimension");
    }

    FiberAccumulator acc(sym, pair, h, z);
    // per-axis far shifts: shells 2..8 cover the tail, whose diagonal decays
    // with the symbol's growth once the masks have dropped out
    std::vector<std::vector<int>> jlists(d);
    for (int i = 0; i < d; ++i)
        for (int j = -8; j <= 8; ++j)
            if (d == 1 || std::abs(j) <= 4) jlists[i].push_back(j);

    double sup = 0.0;
    const double edge = M_PI / h;
    double zeta[max_dim];
    for (std::int64_t f = 0; f < total; ++f) {
        std::int64_t rem = f;
        for (int i = 0; i < d; ++i) {
            const auto p = static_cast<int>(rem % sampling.per_axis);
            rem /= sampling.per_axis;
            zeta[i] = -edge + 2.0 * edge * p / sampling.per_axis;
        }
        sup = std::max(sup, acc.block_norm(zeta));
        sup = std::max(sup, far_diagonal(sym, h, z, zeta, jlists));
    }
    std::uint64_t state = sampling.seed;
    for (int t = 0; t < sampling.random_count; ++t) {
        for (int i = 0; i < d; ++i) zeta[i] = uniform(state, -edge, edge);
        sup = std::max(sup, acc.block_norm(zeta));
        sup = std::max(sup, far_diagonal(sym, h, z, zeta, jlists));
    }
    return sup;
}

double error_norm_fiber(const Symbol& sym, const RieszPair& pair, const ContinuumProxy& proxy,
                        std::complex<double> z) {
    if (sym.dim != pair.dim || sym.dim != proxy.coarse.dim)
        throw std::invalid_argument("fiber: dimension mismatch");
    require_admissible(z, nullptr);
    const int d = sym.dim;
    const LatticeGrid& cg = proxy.coarse;
    const double h = cg.h;
    const int r = proxy.refine;

    FiberAccumulator acc(sym, pair, h, z);
    double sup = 0.0;
    double zeta[max_dim];
    std::vector<std::vector<int>> jlists(d);
    int p[max_dim];
    for (std::int64_t f = 0; f < cg.size(); ++f) {
        decode_index(f, d, cg.n, p);
        for (int i = 0; i < d; ++i) {
            const int k = cg.signed_index(p[i]);
            zeta[i] = cg.freq_step() * k;
            // exactly the fine-cell shifts of this fiber
            jlists[i].clear();
            for (int j = -r; j <= r; ++j) {
                const int m = k + cg.n * j;
                if (m >= -r * cg.n / 2 && m < r * cg.n / 2) jlists[i].push_back(j);
            }
        }
        sup = std::max(sup, acc.block_norm(zeta));
        sup = std::max(sup, far_diagonal(sym, h, z, zeta, jlists));
    }
    return sup;
}

NormEstimate operator_norm_power(
    const std::function<LatticeField(const LatticeField&)>& apply,
    const std::function<LatticeField(const LatticeField&)>& apply_adjoint,
    const LatticeGrid& domain_grid, int iters, std::uint64_t seed, int restarts) {
    if (iters < 50) throw std::invalid_argument("operator_norm_power: need at least 50 iterations");
    const auto n = static_cast<std::size_t>(domain_grid.size());
    auto round_trip = [&](cvec& v) {
        LatticeField f = make_field(domain_grid, Domain::space);
        f.v = std::move(v);
        const double fn = field_norm(f);
        const LatticeField af = apply(f);
        const double q = field_norm(af) / fn;
        v = apply_adjoint(af).v;
        return q * q;
    };
    return power_iterate(round_trip, n, iters, seed, restarts);
}

NormEstimate error_norm_power(const ErrorOperatorHandle& handle, int iters, std::uint64_t seed) {
    if (iters < 50) throw std::invalid_argument("error_norm_power: need at least 50 iterations");
    return operator_norm_power([&](const LatticeField& f) { return handle.apply(f); },
                               [&](const LatticeField& f) { return handle.apply_adjoint(f); },
                               handle.proxy.fine, iters, seed);
}

NormEstimate potential_commutator_norm(const PotentialSpec& V, const RieszPair& pair,
                                       const ContinuumProxy& proxy, int iters,
                                       std::uint64_t seed) {
    if (iters < 50)
        throw std::invalid_argument("potential_commutator_norm: need at least 50 iterations");
    if (V.dim != pair.dim || V.dim != proxy.coarse.dim)
        throw std::invalid_argument("potential_commutator_norm: dimension mismatch");
    const std::vector<double> vc = potential_values(V, proxy.coarse);
    const std::vector<double> vf = potential_values(V, proxy.fine);

    auto commutator = [&](const LatticeField& f) {
        LatticeField a = discretize(f, pair, proxy);
        for (std::size_t i = 0; i < a.v.size(); ++i) a.v[i] *= vc[i];
        LatticeField vff = f;
        for (std::size_t i = 0; i < vff.v.size(); ++i) vff.v[i] *= vf[i];
        const LatticeField b = discretize(vff, pair, proxy);
        for (std::size_t i = 0; i < a.v.size(); ++i) a.v[i] -= b.v[i];
        return a;
    };
    auto commutator_adjoint = [&](const LatticeField& u) {
        LatticeField vu = u;
        for (std::size_t i = 0; i < vu.v.size(); ++i) vu.v[i] *= vc[i];
        LatticeField a = discretize_adjoint(vu, pair, proxy);
        const LatticeField b = discretize_adjoint(u, pair, proxy);
        for (std::size_t i = 0; i < a.v.size(); ++i) a.v[i] -= vf[i] * b.v[i];
        return a;
    };

    return operator_norm_power(commutator, commutator_adjoint, proxy.fine, iters, seed);
}

BlowupReport y_blowup_scan(const Symbol& sym, const RieszPair& pair, const ContinuumProxy& proxy,
                           const PotentialSpec* potential, double x,
                           const std::vector<double>& y_list, std::uint64_t seed) {
    if (y_list.empty()) throw std::invalid_argument("y_blowup_scan: empty y list");
    for (double y : y_list)
        if (!(y > 0.0)) throw std::invalid_argument("y_blowup_scan: y values must be positive");

    BlowupReport rep;
    std::vector<double> ys = y_list;
    std::sort(ys.begin(), ys.end(), std::greater<>());
    for (double y : ys) {
        const std::complex<double> z{x, y};
        double norm;
        if (potential) {
            ResolventProbe probe;
            probe.z = z;
            ErrorOperatorHandle handle(sym, pair, proxy, *potential, probe);
            norm = error_norm_power(handle, 2000, seed).value;
        } else {
            norm = error_norm_fiber(sym, pair, proxy, z);
        }
        rep.points.push_back({y, norm});
    }

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int used = 0;
    for (const auto& pt : rep.points) {
        if (pt.norm <= 0.0) continue;
        const double lx = std::log(1.0 / pt.y);
        const double ly = std::log(pt.norm);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        ++used;
    }
    rep.exponent = used >= 2 ? (used * sxy - sx * sy) / (used * sxx - sx * sx) : 0.0;
    return rep;
}

} // namespace fourlat
