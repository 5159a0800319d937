#include <doctest.h>

#include <cmath>
#include <complex>
#include <stdexcept>

#include "fourlat/lattice.hpp"
#include "fourlat/riesz.hpp"

using namespace fourlat;

namespace {

constexpr double two_pi = 6.283185307179586477;

double rel_diff(const LatticeField& a, const LatticeField& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i) {
        num = std::max(num, std::abs(a.v[i] - b.v[i]));
        den = std::max(den, std::abs(b.v[i]));
    }
    return num / std::max(den, 1e-300);
}

} // namespace

TEST_CASE("grid bookkeeping places indices and frequencies") {
    const LatticeGrid g(1, 0.5, 16);
    CHECK(g.size() == 16);
    CHECK(g.box_half() == doctest::Approx(4.0));
    CHECK(g.freq_step() == doctest::Approx(two_pi / 8.0));
    CHECK(g.freq_half() == doctest::Approx(two_pi));
    CHECK(g.signed_index(0) == 0);
    CHECK(g.signed_index(7) == 7);
    CHECK(g.signed_index(8) == -8);
    CHECK(g.signed_index(15) == -1);
    CHECK(g.wrap(-1) == 15);
    CHECK(g.wrap(3) == 3);

    CHECK_THROWS_AS(LatticeGrid(0, 0.5, 16), std::invalid_argument);
    CHECK_THROWS_AS(LatticeGrid(1, -0.5, 16), std::invalid_argument);
    CHECK_THROWS_AS(LatticeGrid(1, 0.5, 15), std::invalid_argument);
    CHECK_THROWS_AS(LatticeGrid(1, 0.5, 4), std::invalid_argument);
}

TEST_CASE("the transform sends a point mass to a flat profile") {
    const LatticeGrid g(1, 0.5, 16);
    LatticeField u = make_field(g, Domain::space);
    u.v[0] = 1.0;
    const LatticeField uh = dft(u);
    // h (2pi)^{-1/2} with h = 1/2
    for (const auto& z : uh.v) {
        CHECK(z.real() == doctest::Approx(0.19947114020071635).epsilon(1e-14));
        CHECK(std::abs(z.imag()) < 1e-16);
    }
}

TEST_CASE("the transform pins lattice plane waves to single bins") {
    const LatticeGrid g(1, 0.25, 32);
    const int k = 5; // frequency bin xi = k * freq_step
    const double xi0 = k * g.freq_step();
    LatticeField u = make_field(g, Domain::space);
    for (int p = 0; p < g.n; ++p) {
        const double x = g.h * g.signed_index(p);
        u.v[p] = std::exp(std::complex<double>(0.0, x * xi0));
    }
    const LatticeField uh = dft(u);
    for (int p = 0; p < g.n; ++p) {
        const double expected = p == k ? g.h * g.n / std::sqrt(two_pi) : 0.0;
        CHECK(std::abs(uh.v[p] - expected) < 1e-12);
    }
}

TEST_CASE("transforms are unitary and invert each other") {
    for (int n : {16, 12}) { // including a non-power-of-two length
        const LatticeGrid g(1, 0.3, n);
        const LatticeField u = random_field(g, Domain::space, 42);
        const LatticeField uh = dft(u);
        CHECK(field_norm(uh) == doctest::Approx(field_norm(u)).epsilon(1e-13));
        CHECK(rel_diff(idft(uh), u) < 1e-13);
    }
    const LatticeGrid g2(2, 0.7, 16);
    const LatticeField u2 = random_field(g2, Domain::space, 7);
    const LatticeField u2h = dft(u2);
    CHECK(field_norm(u2h) == doctest::Approx(field_norm(u2)).epsilon(1e-13));
    CHECK(rel_diff(idft(u2h), u2) < 1e-13);

    // inner products carry over too
    const LatticeField w2 = random_field(g2, Domain::space, 8);
    const auto lhs = field_inner(u2, w2);
    const auto rhs = field_inner(u2h, dft(w2));
    CHECK(std::abs(lhs - rhs) < 1e-12 * std::abs(lhs));
}

TEST_CASE("embedding a point mass reproduces the mask transform") {
    const RieszPair pair = build_pair(1, 0.5, RampSpec::parse("poly9"));
    const LatticeGrid coarse(1, 1.0, 64);
    const ContinuumProxy proxy(coarse, 4);

    LatticeField u = make_field(coarse, Domain::space);
    u.v[0] = 1.0;
    const LatticeField f = embed(u, pair, proxy);

    // with h = 1 the embedded field is the periodized mask transform itself;
    // at box size 64 the wrap-around tail sits below the poly9 decay floor
    for (double x : {0.0, 0.25, 1.75, 5.0, -3.5}) {
        const int m = static_cast<int>(std::lround(x / proxy.fine.h));
        const int p = proxy.fine.wrap(m);
        const double expected = mask_transform(pair, PairMember::phi, x);
        CHECK(std::abs(f.v[p] - expected) < 1e-9);
    }
}

TEST_CASE("embedding tensorizes over axes") {
    // a 2-D point-mass embedding is the exact outer product of 1-D ones
    const RieszPair pair = build_pair(2, 0.5, RampSpec::parse("poly9"));
    const RieszPair axis = build_pair(1, 0.5, RampSpec::parse("poly9"));
    const ContinuumProxy proxy(LatticeGrid(2, 1.0, 16), 4);
    const ContinuumProxy proxy1(LatticeGrid(1, 1.0, 16), 4);

    LatticeField u = make_field(proxy.coarse, Domain::space);
    u.v[0] = 1.0;
    const LatticeField f = embed(u, pair, proxy);

    LatticeField u1 = make_field(proxy1.coarse, Domain::space);
    u1.v[0] = 1.0;
    const LatticeField f1 = embed(u1, axis, proxy1);

    const int nf = proxy.fine.n;
    double worst = 0.0;
    for (int a = 0; a < nf; ++a)
        for (int b = 0; b < nf; ++b)
            worst = std::max(worst, std::abs(f.v[a * nf + b] - f1.v[a] * f1.v[b]));
    CHECK(worst < 1e-13);
}

TEST_CASE("analysis inverts synthesis on the lattice") {
    struct Case { double h; int n; int r; double delta; const char* ramp; };
    for (const Case& c : {Case{0.7, 24, 4, 0.3, "expstep"}, Case{0.25, 32, 5, 0.5, "poly7"},
                          Case{1.3, 16, 4, 0.0, "poly9"}}) {
        const RieszPair pair = build_pair(1, c.delta, RampSpec::parse(c.ramp));
        const ContinuumProxy proxy(LatticeGrid(1, c.h, c.n), c.r);
        const LatticeField u = random_field(proxy.coarse, Domain::space, 17);
        const LatticeField back = discretize(embed(u, pair, proxy), pair, proxy);
        CHECK(rel_diff(back, u) < 1e-12);
    }
    const RieszPair pair2 = build_pair(2, 0.5, RampSpec::parse("expstep"));
    const ContinuumProxy proxy2(LatticeGrid(2, 0.5, 12), 4);
    const LatticeField u2 = random_field(proxy2.coarse, Domain::space, 3);
    CHECK(rel_diff(discretize(embed(u2, pair2, proxy2), pair2, proxy2), u2) < 1e-12);
}

TEST_CASE("embedding and discretization pair with their adjoints") {
    const RieszPair pair = build_pair(1, 0.3, RampSpec::parse("poly9"));
    const ContinuumProxy proxy(LatticeGrid(1, 0.5, 32), 4);
    const LatticeField u = random_field(proxy.coarse, Domain::space, 11);
    const LatticeField f = random_field(proxy.fine, Domain::space, 12);

    const auto a = field_inner(embed(u, pair, proxy), f);
    const auto b = field_inner(u, embed_adjoint(f, pair, proxy));
    CHECK(std::abs(a - b) < 1e-12 * std::abs(a));

    const auto c = field_inner(discretize(f, pair, proxy), u);
    const auto d = field_inner(f, discretize_adjoint(u, pair, proxy));
    CHECK(std::abs(c - d) < 1e-12 * std::abs(c));

    const RieszPair pair2 = build_pair(2, 0.5, RampSpec::parse("expstep"));
    const ContinuumProxy proxy2(LatticeGrid(2, 0.5, 12), 4);
    const LatticeField u2 = random_field(proxy2.coarse, Domain::space, 13);
    const LatticeField f2 = random_field(proxy2.fine, Domain::space, 14);
    const auto a2 = field_inner(embed(u2, pair2, proxy2), f2);
    const auto b2 = field_inner(u2, embed_adjoint(f2, pair2, proxy2));
    CHECK(std::abs(a2 - b2) < 1e-12 * std::abs(a2));
}

TEST_CASE("the symmetric split embeds isometrically") {
    // at delta = 1/2 with equal bumps the translate functional is exactly 1
    const RieszPair pair = build_pair(1, 0.5, RampSpec::parse("expstep"));
    const ContinuumProxy proxy(LatticeGrid(1, 0.5, 32), 4);
    for (std::uint64_t seed : {21, 22, 23}) {
        const LatticeField u = random_field(proxy.coarse, Domain::space, seed);
        CHECK(field_norm(embed(u, pair, proxy)) ==
              doctest::Approx(field_norm(u)).epsilon(1e-12));
    }
}

TEST_CASE("embedding norms stay inside the frame bounds") {
    const RieszPair pair = build_pair(1, 0.0, RampSpec::parse("poly9"));
    const RieszBounds b = riesz_bounds(pair, PairMember::phi, 65536);
    const ContinuumProxy proxy(LatticeGrid(1, 0.5, 64), 4);
    for (std::uint64_t seed = 31; seed < 41; ++seed) {
        const LatticeField u = random_field(proxy.coarse, Domain::space, seed);
        const double ratio = field_norm(embed(u, pair, proxy)) / field_norm(u);
        CHECK(ratio >= std::sqrt(b.lower) - 1e-6);
        CHECK(ratio <= std::sqrt(b.upper) + 1e-6);
    }
}

TEST_CASE("the composite projection is idempotent but below the identity") {
    const RieszPair pair = build_pair(1, 0.3, RampSpec::parse("poly9"));
    const ContinuumProxy proxy(LatticeGrid(1, 0.5, 32), 4);
    const ProjectionCheck chk = projection_check(pair, proxy, 10, 99);
    CHECK(chk.idempotency_defect < 1e-10);
    CHECK(chk.identity_gap > 0.1);
}

TEST_CASE("the kernel witness is annihilated by analysis") {
    const RieszPair pair = build_pair(1, 0.5, RampSpec::parse("poly9"));
    const ContinuumProxy proxy(LatticeGrid(1, 0.5, 32), 4);
    const LatticeField w = kernel_witness(pair, proxy);
    CHECK(field_norm(w) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(field_norm(discretize(w, pair, proxy)) < 1e-10);

    const RieszPair pair2 = build_pair(2, 0.5, RampSpec::parse("poly7"));
    const ContinuumProxy proxy2(LatticeGrid(2, 0.5, 12), 4);
    const LatticeField w2 = kernel_witness(pair2, proxy2);
    CHECK(field_norm(w2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(field_norm(discretize(w2, pair2, proxy2)) < 1e-10);
}

TEST_CASE("potentials are sampled on the lattice points") {
    const LatticeGrid g(1, 0.5, 8);
    const LatticeField vc = sample_potential(
        [](const double* x, int) { return std::cos(x[0]); }, g);
    for (int p = 0; p < g.n; ++p) {
        CHECK(vc.v[p].real() == doctest::Approx(std::cos(0.5 * g.signed_index(p))).epsilon(1e-15));
        CHECK(vc.v[p].imag() == 0.0);
    }

    const LatticeGrid g2(2, 1.0, 8);
    const LatticeField vs = sample_potential(
        [](const double* x, int d) {
            double r2 = 0.0;
            for (int i = 0; i < d; ++i) r2 += x[i] * x[i];
            const double s = 1.0 / std::cosh(std::sqrt(r2));
            return -2.0 * s * s;
        },
        g2);
    CHECK(vs.v[0].real() == doctest::Approx(-2.0).epsilon(1e-15));

    CHECK_THROWS_AS(sample_potential([](const double* x, int) { return 1.0 / x[0]; }, g),
                    std::domain_error);
}

TEST_CASE("proxy construction rejects skimpy refinements") {
    const LatticeGrid g(1, 0.5, 16);
    CHECK_THROWS_AS(ContinuumProxy(g, 3), std::invalid_argument);
    CHECK_NOTHROW(ContinuumProxy(g, 4));
}
