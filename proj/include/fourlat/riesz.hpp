#pragma once

// Biorthogonal Riesz pairs built from frequency-side bump masks.
//
// Start from two tensor-product bumps u1, u2 that equal 1 on [-pi, pi]^d,
// vanish outside [-3pi/2, 3pi/2]^d, and ramp monotonically in between.
// With the 2piZ^d-periodization v = sum_k (u1 u2)(. - 2pi k) >= 1 and a
// split parameter delta in [0, 1], the masks
//   phi0_hat = (2pi)^(-d delta)      u1 / v^delta,
//   psi0_hat = (2pi)^(-d (1-delta))  u2 / v^(1-delta)
// satisfy the biorthogonality identity
//   sum_k conj(phi0_hat) psi0_hat (xi - 2pi k) = (2pi)^(-d)  a.e.,
// which makes the lattice translates of their inverse transforms a
// biorthogonal pair of Riesz sequences. Everything here is real-valued
// and tensorized, so profiles are stored as 1-D axis factors.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

namespace fourlat {

struct RampSpec {
    enum class Kind { expstep, poly };
    Kind kind = Kind::expstep;
    int order = 9; // poly smoothstep order (C^order junctions)

    // accepts "expstep" or "poly<k>" (e.g. "poly9")
    static RampSpec parse(const std::string& name);
    std::string name() const;
};

// Smooth monotone step on [0, 1] with s(0) = 0, s(1) = 1.
double ramp_value(const RampSpec& ramp, double t);

struct BumpProfile {
    int dim = 1;
    RampSpec ramp;

    double axis(double t) const;              // 1-D factor
    double operator()(const double* xi) const; // product over axes
};

struct RieszPair {
    int dim = 1;
    double delta = 0.5;
    double tau = 4.0; // declared polynomial decay exponent of psi0
    std::function<double(double)> phi_axis, psi_axis;
    double floor_phi = 0.0; // exact lower bounds on [-pi/2, pi/2]^d
    double floor_psi = 0.0;

    static constexpr double support_radius = 4.712388980384689858; // 3pi/2

    double phi_hat(const double* xi) const;
    double psi_hat(const double* xi) const;
};

// The declared tau defaults to order+1 for poly ramps (the junction
// smoothness gives |psi0(x)| ~ |x|^-(order+1)) and to a conservative
// constant for expstep ramps, whose transform decays like exp(-c sqrt x)
// and supports only a small polynomial exponent on finite windows.
RieszPair build_pair(const BumpProfile& u1, const BumpProfile& u2, double delta,
                     std::optional<double> tau = std::nullopt);
RieszPair build_pair(int dim, double delta, const RampSpec& ramp,
                     std::optional<double> tau = std::nullopt);

// sup over sampled xi in [-pi, pi]^d of
//   | sum_{|k_i|<=1} phi0_hat psi0_hat (xi - 2pi k) - (2pi)^-d |.
double biorthogonality_defect(const RieszPair& pair, int samples_per_axis = 2048);

enum class PairMember { phi, psi };

struct RieszBounds {
    double lower = 0.0;
    double upper = 0.0;
    bool degenerate = false; // lower bound indistinguishable from zero
};

// Extremes over sampled xi of the translate functional
//   (2pi)^d sum_{|k_i|<=1} |profile(xi - 2pi k)|^2,
// whose essential inf/sup are the Riesz frame bounds A, B.
RieszBounds riesz_bounds_profile(const std::function<double(double)>& axis_profile, int dim,
                                 int samples_per_axis = 4096);
RieszBounds riesz_bounds(const RieszPair& pair, PairMember member, int samples_per_axis = 4096);

struct DecayReport {
    double constant = 0.0;   // smallest sampled C with |psi0(x)| <= C (1+|x|)^-tau
    double slope = 0.0;      // log-log envelope slope over [r_inner, R]
    double tail_max = 0.0;   // max |psi0| on |x| >= r_inner
    double r_inner = 10.0;
    double r_outer = 32.0;
    double period = 256.0;
    int grid_points = 65536;

    bool supports(double tau) const { return slope <= -tau + 0.3; }
};

// Empirical decay of the inverse transform of one mask, computed on a
// dedicated 1-D grid (grid_points samples over a period of period_factor*R;
// the period must stay >= 4R so aliased tails cannot contaminate |x| <= R).
DecayReport decay_check(const RieszPair& pair, PairMember member, double tau, double R = 32.0,
                        int grid_points = 65536, double period_factor = 8.0);

// 1-D frequency profile W of a nonzero function annihilated by the
// analysis map: W pairs adjacent 2pi-translates of psi0_hat with opposite
// signs so the translate sum telescopes to zero at every frequency.
double kernel_witness_profile(const RieszPair& pair, double t);

// Pointwise inverse transform of one mask's axis profile by direct
// quadrature, (2pi)^{-1/2} int profile(t) cos(x t) dt over the support.
// Slow but transform-free; meant as an oracle for the lattice maps.
double mask_transform(const RieszPair& pair, PairMember member, double x);

} // namespace fourlat
