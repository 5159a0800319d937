#include <doctest.h>

#include "fourlat/errors.hpp"
#include "fourlat/lattice.hpp"
#include "fourlat/resolvent.hpp"
#include "fourlat/riesz.hpp"
#include "fourlat/symbols.hpp"

#include <cmath>
#include <complex>
#include <vector>

using namespace fourlat;

namespace {

constexpr double two_pi = 6.283185307179586477;

double loglog_slope(const std::vector<double>& hs, const std::vector<double>& es) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto n = static_cast<double>(hs.size());
    for (std::size_t i = 0; i < hs.size(); ++i) {
        const double x = std::log(hs[i]), y = std::log(es[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// || (H - z) w - u || / || u ||
double residual_of(const OperatorSpec& op, std::complex<double> z, const LatticeField& w,
                   const LatticeField& u) {
    LatticeField r = apply_operator(op, w);
    for (std::size_t i = 0; i < r.v.size(); ++i) r.v[i] -= z * w.v[i] + u.v[i];
    return field_norm(r) / field_norm(u);
}

RieszPair smooth_pair(int dim) {
    RampSpec ramp;
    ramp.kind = RampSpec::Kind::poly;
    ramp.order = 9;
    return build_pair(dim, 0.5, ramp);
}

} // namespace

TEST_CASE("resolvent: plane waves are multiplier eigenvectors") {
    const LatticeGrid grid(1, 0.5, 32);
    const int k = 5;
    const double xi = k * grid.freq_step();
    LatticeField u = make_field(grid, Domain::space);
    for (int p = 0; p < grid.n; ++p) {
        const double x = grid.h * grid.signed_index(p);
        u.v[p] = std::polar(1.0, xi * x);
    }
    OperatorSpec op{make_laplacian(1), OperatorSpace::discrete, std::nullopt};
    const LatticeField hu = apply_operator(op, u);
    const double s = 2.0 / grid.h * std::sin(0.5 * grid.h * xi);
    double worst = 0.0;
    for (int p = 0; p < grid.n; ++p) worst = std::max(worst, std::abs(hu.v[p] - s * s * u.v[p]));
    CHECK(worst < 1e-10);

    op.space = OperatorSpace::proxy;
    const LatticeField hpu = apply_operator(op, u);
    worst = 0.0;
    for (int p = 0; p < grid.n; ++p) worst = std::max(worst, std::abs(hpu.v[p] - xi * xi * u.v[p]));
    CHECK(worst < 1e-10);
}

TEST_CASE("resolvent: free solve inverts the shifted operator") {
    for (int dim : {1, 2}) {
        const LatticeGrid grid(dim, 0.25, dim == 1 ? 64 : 16);
        const LatticeField u = random_field(grid, Domain::space, 0xabcdULL + dim);
        OperatorSpec op{make_fraclap(0.7, dim), OperatorSpace::discrete, std::nullopt};
        const std::complex<double> z{-1.0, 0.5};
        const LatticeField w = apply_resolvent(op, z, u);
        CHECK(residual_of(op, z, w, u) < 1e-12);
    }
}

TEST_CASE("resolvent: gmres meets the residual contract with a potential") {
    const LatticeGrid grid(1, 0.0625, 256);
    const LatticeField u = random_field(grid, Domain::space, 0x5eedULL);

    OperatorSpec op{make_laplacian(1), OperatorSpace::discrete, make_cos_potential(1)};
    const std::complex<double> z{-1.0, 1.0};
    const LatticeField w = apply_resolvent(op, z, u, 1e-10, 400);
    CHECK(residual_of(op, z, w, u) < 5e-10);

    OperatorSpec well{make_laplacian(1), OperatorSpace::discrete, make_well_potential(1)};
    const LatticeField ww = apply_resolvent(well, z, u, 1e-10, 400);
    CHECK(residual_of(well, z, ww, u) < 5e-10);

    // real z far below the potential bound is admissible and solvable
    const LatticeField wr = apply_resolvent(well, -4.0, u, 1e-10, 400);
    CHECK(residual_of(well, -4.0, wr, u) < 5e-10);

    // proxy-side operator goes through the same path
    OperatorSpec prox{make_laplacian(1), OperatorSpace::proxy, make_cos_potential(1)};
    const LatticeField wp = apply_resolvent(prox, z, u, 1e-10, 400);
    CHECK(residual_of(prox, z, wp, u) < 5e-10);
}

TEST_CASE("resolvent: linearity and conjugate symmetry") {
    const LatticeGrid grid(1, 0.125, 128);
    const LatticeField u = random_field(grid, Domain::space, 1ULL);
    const LatticeField v = random_field(grid, Domain::space, 2ULL);
    OperatorSpec op{make_laplacian(1), OperatorSpace::discrete, make_cos_potential(1)};
    const std::complex<double> z{-0.5, 2.0};

    const std::complex<double> a{0.3, -1.1}, b{-2.0, 0.7};
    LatticeField combo = make_field(grid, Domain::space);
    for (std::size_t i = 0; i < combo.v.size(); ++i) combo.v[i] = a * u.v[i] + b * v.v[i];
    const LatticeField rc = apply_resolvent(op, z, combo);
    const LatticeField ru = apply_resolvent(op, z, u);
    const LatticeField rv = apply_resolvent(op, z, v);
    double worst = 0.0;
    for (std::size_t i = 0; i < combo.v.size(); ++i)
        worst = std::max(worst, std::abs(rc.v[i] - a * ru.v[i] - b * rv.v[i]));
    CHECK(worst / field_norm(combo) < 1e-9);

    // <u, R(z) v> = <R(conj z) u, v> for the self-adjoint operator
    const LatticeField rzu = apply_resolvent(op, std::conj(z), u);
    const auto lhs = field_inner(u, rv);
    const auto rhs = field_inner(rzu, v);
    CHECK(std::abs(lhs - rhs) / std::abs(lhs) < 1e-8);
}

TEST_CASE("resolvent: inadmissible probes are rejected") {
    const LatticeGrid grid(1, 0.5, 16);
    const LatticeField u = random_field(grid, Domain::space, 3ULL);
    OperatorSpec freeop{make_laplacian(1), OperatorSpace::discrete, std::nullopt};
    CHECK_THROWS_AS(apply_resolvent(freeop, 0.5, u), std::domain_error);
    CHECK_THROWS_AS(apply_resolvent(freeop, 0.0, u), std::domain_error);
    CHECK_NOTHROW(apply_resolvent(freeop, -1.0, u));
    CHECK_NOTHROW(apply_resolvent(freeop, {3.0, 1e-6}, u));

    OperatorSpec op{make_laplacian(1), OperatorSpace::discrete, make_cos_potential(1)};
    CHECK_THROWS_AS(apply_resolvent(op, -1.5, u), std::domain_error);
    CHECK_NOTHROW(apply_resolvent(op, -3.0, u));
    CHECK_NOTHROW(apply_resolvent(op, {-1.5, 0.5}, u));
}

TEST_CASE("resolvent: starved solver reports residual and iterations") {
    const LatticeGrid grid(1, 0.125, 128);
    const LatticeField u = random_field(grid, Domain::space, 4ULL);
    OperatorSpec op{make_laplacian(1), OperatorSpace::discrete, make_cos_potential(1)};
    bool threw = false;
    try {
        apply_resolvent(op, {-1.0, 0.05}, u, 1e-12, 2);
    } catch (const SolverError& e) {
        threw = true;
        CHECK(e.iterations == 2);
        CHECK(e.residual > 1e-12);
    }
    CHECK(threw);
}

TEST_CASE("resolvent: coupling exponent formula and guards") {
    CHECK(theta_prime(1.0, 10.0, 1) == doctest::Approx(0.9));
    CHECK(theta_prime(0.5, 4.0, 1) == doctest::Approx(3.0 / 7.0));
    // 1/theta' = 1/theta + 1/(tau - d)
    const double tp = theta_prime(0.7, 5.0, 2);
    CHECK(1.0 / tp == doctest::Approx(1.0 / 0.7 + 1.0 / 3.0));
    CHECK_THROWS_AS(theta_prime(1.0, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(theta_prime(0.0, 4.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(theta_prime(1.5, 4.0, 1), std::invalid_argument);
}

TEST_CASE("resolvent: potential validation separates honest and false claims") {
    CHECK(validate_potential(make_cos_potential(1)).pass);
    CHECK(validate_potential(make_rough_potential(1)).pass);
    CHECK(validate_potential(make_well_potential(2)).pass);
    CHECK(validate_potential(make_constant_potential(-3.0, 1)).pass);

    PotentialSpec lying_bound = make_cos_potential(1);
    lying_bound.bound = 0.5;
    const PotentialCheck b = validate_potential(lying_bound);
    CHECK_FALSE(b.pass);
    CHECK(b.worst_bound_excess > 0.4);

    // a jump cannot hide from the quotient at any claimed exponent
    PotentialSpec jump;
    jump.dim = 1;
    jump.name = "jump";
    jump.evaluator = [](const double* x, int) { return x[0] >= 0.0 ? 1.0 : -1.0; };
    jump.bound = 1.0;
    jump.theta = 1.0;
    const PotentialCheck j = validate_potential(jump);
    CHECK_FALSE(j.pass);
    CHECK(j.worst_quotient > 50.0);
}

TEST_CASE("fiber matrix: vanishing symbol leaves only the mask coupling") {
    const Symbol zero = make_custom([](const double*, int) { return 0.0; },
                                    SymbolClass::class_iii(1.0), 1);
    const RieszPair pair = smooth_pair(1);
    const std::complex<double> z{-1.0, 0.0};
    const std::complex<double> inv_z = 1.0 / z;
    const double h = 1.0;

    // inside |h zeta| <= pi/2 the shifted masks clear the cell: the center
    // entry cancels exactly and the off-diagonal couplings vanish
    for (double hz : {0.0, 0.4, -1.5, 1.5}) {
        const double zeta = hz / h;
        const auto m = error_fiber_matrix(zero, pair, h, z, &zeta);
        CHECK(std::abs(m[1 * 3 + 1]) < 1e-12);
        CHECK(std::abs(m[0 * 3 + 0] - inv_z) < 1e-12);
        CHECK(std::abs(m[2 * 3 + 2] - inv_z) < 1e-12);
        CHECK(std::abs(m[0 * 3 + 1]) < 1e-12);
        CHECK(std::abs(m[1 * 3 + 2]) < 1e-12);
    }
    // past the clear zone the center entry picks up the periodization excess
    {
        const double zeta = 2.8;
        const auto m = error_fiber_matrix(zero, pair, h, z, &zeta);
        CHECK(std::abs(m[1 * 3 + 1]) > 1e-2);
    }
}

TEST_CASE("error operator: adjoint pairing and scale hook") {
    const RieszPair pair = smooth_pair(1);
    const LatticeGrid coarse(1, 0.5, 32);
    const ContinuumProxy proxy(coarse, 4);
    const LatticeField f = random_field(proxy.fine, Domain::space, 7ULL);
    const LatticeField g = random_field(proxy.fine, Domain::space, 8ULL);

    ErrorOperatorHandle free_h(make_laplacian(1), pair, proxy);
    const auto lhs = field_inner(free_h.apply(f), g);
    const auto rhs = field_inner(f, free_h.apply_adjoint(g));
    CHECK(std::abs(lhs - rhs) / std::abs(lhs) < 1e-10);

    ErrorOperatorHandle scaled(make_laplacian(1), pair, proxy);
    scaled.scale = 3.0;
    const LatticeField d1 = free_h.apply(f);
    const LatticeField d3 = scaled.apply(f);
    double worst = 0.0;
    for (std::size_t i = 0; i < d1.v.size(); ++i)
        worst = std::max(worst, std::abs(d3.v[i] - 3.0 * d1.v[i]));
    CHECK(worst < 1e-13);

    ResolventProbe probe;
    probe.z = {-1.0, 1.0};
    ErrorOperatorHandle pot_h(make_laplacian(1), pair, proxy, make_cos_potential(1), probe);
    const auto plhs = field_inner(pot_h.apply(f), g);
    const auto prhs = field_inner(f, pot_h.apply_adjoint(g));
    CHECK(std::abs(plhs - prhs) / std::abs(plhs) < 1e-6);
}

TEST_CASE("error norm: zero scale collapses the power estimate") {
    const RieszPair pair = smooth_pair(1);
    const ContinuumProxy proxy(LatticeGrid(1, 0.5, 16), 4);
    ErrorOperatorHandle handle(make_laplacian(1), pair, proxy);
    handle.scale = 0.0;
    const NormEstimate est = error_norm_power(handle, 50);
    CHECK(est.converged);
    CHECK(est.value == 0.0);
}

TEST_CASE("error norm: power estimate is homogeneous in the scale hook") {
    const RieszPair pair = smooth_pair(1);
    const ContinuumProxy proxy(LatticeGrid(1, 0.5, 32), 4);
    ErrorOperatorHandle handle(make_laplacian(1), pair, proxy);
    const NormEstimate one = error_norm_power(handle, 2000, 0x77ULL);
    handle.scale = 3.0;
    const NormEstimate three = error_norm_power(handle, 2000, 0x77ULL);
    CHECK(one.converged);
    CHECK(three.converged);
    CHECK(three.value == doctest::Approx(3.0 * one.value).epsilon(1e-8));
}

TEST_CASE("error norm: fiber and power agree on the shared grid") {
    const RieszPair pair = smooth_pair(1);
    const Symbol sym = make_laplacian(1);
    const ContinuumProxy proxy(LatticeGrid(1, 0.25, 64), 4);
    const std::complex<double> z{-1.0, 0.0};

    const double fiber = error_norm_fiber(sym, pair, proxy, z);
    ErrorOperatorHandle handle(sym, pair, proxy);
    const NormEstimate power = error_norm_power(handle, 5000);
    CHECK(power.converged);
    CHECK(std::abs(fiber - power.value) / fiber < 1e-3);
}

TEST_CASE("error norm: free second-order symbol converges at rate two") {
    const RieszPair pair = smooth_pair(1);
    const Symbol sym = make_laplacian(1);
    FiberSampling sampling;
    sampling.per_axis = 1024;
    sampling.random_count = 2000;
    std::vector<double> hs, es;
    for (int k = 2; k <= 7; ++k) {
        const double h = std::pow(2.0, -k);
        hs.push_back(h);
        es.push_back(error_norm_fiber(sym, pair, h, {-1.0, 0.0}, sampling));
    }
    for (std::size_t i = 1; i < es.size(); ++i) CHECK(es[i] < es[i - 1]);
    const double slope = loglog_slope(hs, es);
    CHECK(slope > 1.85);
    CHECK(slope < 2.15);
}

TEST_CASE("commutator norm: potentials commute at their coupling rates") {
    const RieszPair pair = smooth_pair(1);
    const double L = 8.0;
    auto sweep = [&](const PotentialSpec& V) {
        std::vector<double> hs, es;
        for (int k = 3; k <= 5; ++k) {
            const double h = std::pow(2.0, -k);
            const ContinuumProxy proxy(LatticeGrid(1, h, static_cast<int>(2.0 * L / h)), 4);
            const NormEstimate est = potential_commutator_norm(V, pair, proxy, 2000);
            CHECK(est.converged);
            hs.push_back(h);
            es.push_back(est.value);
        }
        return loglog_slope(hs, es);
    };
    // theta'(1, tau = 10) = 0.9, approached from below at these meshes
    const double smooth_slope = sweep(make_cos_potential(1));
    CHECK(smooth_slope > 0.6);
    CHECK(smooth_slope < 1.05);
    // theta'(1/2, tau = 10) ~ 0.47 and the measured rate sits near 1/2
    const double rough_slope = sweep(make_rough_potential(1));
    CHECK(rough_slope > 0.35);
    CHECK(rough_slope < 0.65);

    // constants commute exactly
    const ContinuumProxy proxy(LatticeGrid(1, 0.25, 64), 4);
    const NormEstimate c = potential_commutator_norm(make_constant_potential(2.5, 1), pair, proxy, 50);
    CHECK(c.value < 1e-8);
}

TEST_CASE("y blowup: free error norm grows as the probe nears the spectrum") {
    const RieszPair pair = smooth_pair(1);
    const ContinuumProxy proxy(LatticeGrid(1, 0.25, 64), 4);
    const BlowupReport rep =
        y_blowup_scan(make_laplacian(1), pair, proxy, nullptr, 1.0, {1.0, 0.5, 0.25});
    REQUIRE(rep.points.size() == 3);
    CHECK(rep.points[0].y == 1.0);
    CHECK(rep.points[2].y == 0.25);
    CHECK(rep.points[1].norm > rep.points[0].norm);
    CHECK(rep.points[2].norm > rep.points[1].norm);
    CHECK(rep.exponent > 0.5);
}

TEST_CASE("resolvent module guards") {
    const RieszPair pair = smooth_pair(1);
    const ContinuumProxy proxy(LatticeGrid(1, 0.5, 16), 4);
    ErrorOperatorHandle handle(make_laplacian(1), pair, proxy);
    CHECK_THROWS_AS(error_norm_power(handle, 10), std::invalid_argument);
    CHECK_THROWS_AS(potential_commutator_norm(make_cos_potential(1), pair, proxy, 10),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        y_blowup_scan(make_laplacian(1), pair, proxy, nullptr, 1.0, {}),
        std::invalid_argument);
    CHECK_THROWS_AS(
        y_blowup_scan(make_laplacian(1), pair, proxy, nullptr, 1.0, {0.5, -0.25}),
        std::invalid_argument);
    CHECK_THROWS_AS(error_norm_fiber(make_laplacian(3), smooth_pair(3), 0.5, {-1.0, 0.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(error_norm_fiber(make_laplacian(2), pair, proxy, {-1.0, 0.0}),
                    std::invalid_argument);
    const LatticeField wrong = random_field(proxy.coarse, Domain::space, 9ULL);
    CHECK_THROWS_AS(handle.apply(wrong), std::invalid_argument);
}
