#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "fourlat/riesz.hpp"

using namespace fourlat;

namespace {
constexpr double two_pi = 6.283185307179586477;
}

TEST_CASE("ramps step monotonically between the junctions") {
    for (const char* name : {"expstep", "poly3", "poly9"}) {
        const RampSpec ramp = RampSpec::parse(name);
        CHECK(ramp_value(ramp, 0.0) == 0.0);
        CHECK(ramp_value(ramp, 1.0) == 1.0);
        CHECK(ramp_value(ramp, -0.2) == 0.0);
        CHECK(ramp_value(ramp, 1.3) == 1.0);
        double prev = 0.0;
        for (int i = 1; i <= 200; ++i) {
            const double v = ramp_value(ramp, i / 200.0);
            CHECK(v >= prev - 1e-15);
            prev = v;
        }
        CHECK(ramp.name() == name);
    }
    // the symmetric-step identity s(t) + s(1-t) = 1 holds for both kinds
    const RampSpec poly = RampSpec::parse("poly7");
    const RampSpec exps = RampSpec::parse("expstep");
    for (double t : {0.1, 0.25, 0.4, 0.5, 0.8}) {
        CHECK(ramp_value(poly, t) + ramp_value(poly, 1.0 - t) == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(ramp_value(exps, t) + ramp_value(exps, 1.0 - t) == doctest::Approx(1.0).epsilon(1e-13));
    }
    CHECK_THROWS_AS(RampSpec::parse("poly0"), std::invalid_argument);
    CHECK_THROWS_AS(RampSpec::parse("spline"), std::invalid_argument);
}

TEST_CASE("bump profiles are flat inside and vanish outside") {
    BumpProfile u;
    u.dim = 2;
    u.ramp = RampSpec::parse("poly5");
    CHECK(u.axis(0.0) == 1.0);
    CHECK(u.axis(M_PI) == 1.0);
    CHECK(u.axis(-M_PI) == 1.0);
    CHECK(u.axis(1.5 * M_PI) == 0.0);
    CHECK(u.axis(-8.0) == 0.0);
    const double mid = u.axis(1.25 * M_PI);
    CHECK(mid > 0.0);
    CHECK(mid < 1.0);
    const double xi[2] = {0.5, 1.25 * M_PI};
    CHECK(u(xi) == doctest::Approx(mid).epsilon(1e-15));
}

TEST_CASE("built pairs satisfy the biorthogonality identity") {
    for (double delta : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        for (const char* ramp : {"expstep", "poly9"}) {
            const RieszPair pair = build_pair(1, delta, RampSpec::parse(ramp));
            CHECK(biorthogonality_defect(pair, 4096) < 1e-10);
        }
    }
    const RieszPair pair2 = build_pair(2, 0.5, RampSpec::parse("expstep"));
    CHECK(biorthogonality_defect(pair2, 256) < 1e-10);
}

TEST_CASE("the split parameter shapes the masks as advertised") {
    // delta = 1/2: symmetric pair, identical masks
    const RieszPair even = build_pair(1, 0.5, RampSpec::parse("poly9"));
    for (double t : {0.0, 1.0, 3.3, 4.0, -2.9}) {
        CHECK(even.phi_axis(t) == doctest::Approx(even.psi_axis(t)).epsilon(1e-14));
    }
    // delta = 0: the embedding mask is the raw bump, all weight on psi
    const RieszPair lop = build_pair(1, 0.0, RampSpec::parse("poly9"));
    BumpProfile u;
    u.ramp = RampSpec::parse("poly9");
    for (double t : {0.0, 2.0, 3.5, 4.4}) {
        CHECK(lop.phi_axis(t) == doctest::Approx(u.axis(t)).epsilon(1e-14));
    }
    // the floors record the exact values on the inner half-cell
    CHECK(even.phi_axis(0.3) == doctest::Approx(even.floor_phi).epsilon(1e-14));
    CHECK(lop.psi_axis(-1.2) == doctest::Approx(lop.floor_psi).epsilon(1e-14));
    CHECK(lop.floor_phi == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("biorthogonality defect detects broken pairs") {
    const RieszPair pair = build_pair(1, 0.5, RampSpec::parse("poly9"));

    // scaling one mask by 1/2 leaves exactly half the target everywhere
    RieszPair halved = pair;
    const auto base_psi = pair.psi_axis;
    halved.psi_axis = [base_psi](double t) { return 0.5 * base_psi(t); };
    CHECK(biorthogonality_defect(halved, 512) == doctest::Approx(0.5 / two_pi).epsilon(1e-12));

    // disjoint supports kill every product, leaving the full target
    RieszPair shifted = pair;
    shifted.psi_axis = [base_psi](double t) { return base_psi(t - 4.0 * M_PI); };
    CHECK(biorthogonality_defect(shifted, 512) == doctest::Approx(1.0 / two_pi).epsilon(1e-12));
}

TEST_CASE("frame bounds collapse to one at the symmetric split") {
    const RieszPair pair = build_pair(1, 0.5, RampSpec::parse("expstep"));
    for (PairMember m : {PairMember::phi, PairMember::psi}) {
        const RieszBounds b = riesz_bounds(pair, m, 8192);
        CHECK_FALSE(b.degenerate);
        CHECK(b.lower == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(b.upper == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("frame bounds match a direct evaluation at an uneven split") {
    const RieszPair pair = build_pair(1, 0.0, RampSpec::parse("poly9"));
    const RieszBounds b = riesz_bounds(pair, PairMember::phi, 8192);

    // independent dense scan of 2pi sum_k phi(t - 2pi k)^2 on [-pi, pi]
    double lo = 1e300, hi = 0.0;
    for (int i = 0; i <= 100000; ++i) {
        const double t = -M_PI + two_pi * i / 100000.0;
        double acc = 0.0;
        for (int k = -1; k <= 1; ++k) {
            const double v = pair.phi_axis(t - two_pi * k);
            acc += v * v;
        }
        acc *= two_pi;
        lo = std::min(lo, acc);
        hi = std::max(hi, acc);
    }
    CHECK(b.lower == doctest::Approx(lo).epsilon(1e-6));
    CHECK(b.upper == doctest::Approx(hi).epsilon(1e-6));
    CHECK(b.upper > b.lower + 0.1); // genuinely uneven: phi is the raw bump
    CHECK_FALSE(b.degenerate);

    const RieszBounds zero = riesz_bounds_profile([](double) { return 0.0; }, 1, 64);
    CHECK(zero.degenerate);
}

TEST_CASE("dimension powers the frame bounds") {
    const RieszPair p1 = build_pair(1, 0.0, RampSpec::parse("poly9"));
    const RieszPair p3 = build_pair(3, 0.0, RampSpec::parse("poly9"));
    const RieszBounds b1 = riesz_bounds(p1, PairMember::phi, 2048);
    const RieszBounds b3 = riesz_bounds(p3, PairMember::phi, 2048);
    CHECK(b3.lower == doctest::Approx(std::pow(b1.lower, 3)).epsilon(1e-12));
    CHECK(b3.upper == doctest::Approx(std::pow(b1.upper, 3)).epsilon(1e-12));
}

TEST_CASE("mask transform quadrature agrees with a plain Riemann sum") {
    const RieszPair pair = build_pair(1, 0.5, RampSpec::parse("poly9"));
    for (double x : {0.0, 1.7, 6.3}) {
        const int n = 400000;
        const double a = -1.5 * M_PI, b = 1.5 * M_PI;
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            const double t = a + (b - a) * (i + 0.5) / n;
            acc += pair.psi_axis(t) * std::cos(x * t);
        }
        acc *= (b - a) / n / std::sqrt(two_pi);
        CHECK(mask_transform(pair, PairMember::psi, x) == doctest::Approx(acc).epsilon(1e-8));
    }
    // value at the origin is the mask's mean; comfortably positive
    CHECK(mask_transform(pair, PairMember::phi, 0.0) > 0.9);
}

TEST_CASE("polynomial ramps reach their declared tail order") {
    // the poly9 transform carries a large junction constant: on the default
    // [10, 32] window it already beats the d+2 floor, and on a wide window
    // the envelope supports the declared tau = order + 1
    const RieszPair pair = build_pair(1, 0.5, RampSpec::parse("poly9"));
    CHECK(pair.tau == doctest::Approx(10.0));

    const DecayReport near = decay_check(pair, PairMember::psi, pair.tau);
    CHECK(near.slope < -3.0);
    CHECK(near.constant > 0.0);

    const DecayReport wide = decay_check(pair, PairMember::psi, pair.tau, 128.0, 1 << 18);
    CHECK(wide.r_inner == doctest::Approx(16.0));
    CHECK(wide.supports(pair.tau));
    CHECK(wide.tail_max < 1e-2);

    // low-order ramps show their shallower asymptote on the default window
    const RieszPair low = build_pair(1, 0.5, RampSpec::parse("poly3"));
    const DecayReport rep3 = decay_check(low, PairMember::psi, low.tau);
    CHECK(low.tau == doctest::Approx(4.0));
    CHECK(rep3.supports(low.tau));
    CHECK(rep3.slope > -7.0); // genuinely shallower than the steep ramps
}

TEST_CASE("decay check rejects malformed windows") {
    const RieszPair pair = build_pair(1, 0.5, RampSpec::parse("poly5"));
    CHECK_THROWS_AS(decay_check(pair, PairMember::psi, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(decay_check(pair, PairMember::psi, 4.0, 8.0), std::invalid_argument);
    CHECK_THROWS_AS(decay_check(pair, PairMember::psi, 4.0, 32.0, 65536, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(decay_check(pair, PairMember::psi, 4.0, 32.0, 1024), std::invalid_argument);
}

TEST_CASE("kernel witness profile telescopes the translate sum to zero") {
    const RieszPair pair = build_pair(1, 0.5, RampSpec::parse("poly9"));
    // sum_j psi(t + 2pi j) W(t + 2pi j) must vanish identically; only the
    // |j| <= 1 shifts can contribute over the support of either factor
    for (int i = 0; i <= 2000; ++i) {
        const double t = -M_PI + two_pi * i / 2000.0;
        double acc = 0.0;
        for (int j = -2; j <= 2; ++j) {
            const double s = t + two_pi * j;
            acc += pair.psi_axis(s) * kernel_witness_profile(pair, s);
        }
        CHECK(std::abs(acc) < 1e-14);
    }
    // and the witness itself is not the zero profile
    double peak = 0.0;
    for (int i = 0; i <= 2000; ++i) {
        const double t = -M_PI + two_pi * i / 2000.0;
        peak = std::max(peak, std::abs(kernel_witness_profile(pair, t)));
    }
    CHECK(peak > 0.1);
}

TEST_CASE("pair construction validates its inputs") {
    CHECK_THROWS_AS(build_pair(0, 0.5, RampSpec{}), std::invalid_argument);
    CHECK_THROWS_AS(build_pair(4, 0.5, RampSpec{}), std::invalid_argument);
    CHECK_THROWS_AS(build_pair(1, -0.1, RampSpec{}), std::invalid_argument);
    CHECK_THROWS_AS(build_pair(1, 1.5, RampSpec{}), std::invalid_argument);
    CHECK_THROWS_AS(build_pair(1, 0.5, RampSpec{}, -2.0), std::invalid_argument);
}
