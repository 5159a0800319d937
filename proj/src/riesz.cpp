#include "fourlat/riesz.hpp"

#include "fourlat/fft.hpp"
#include "fourlat/symbols.hpp" // max_dim

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

namespace fourlat {

namespace {

constexpr double two_pi = 6.283185307179586477;
constexpr double inner_edge = M_PI;            // mask is 1 inside |t| <= pi
constexpr double outer_edge = 1.5 * M_PI;      // and 0 outside |t| >= 3pi/2

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

double poly_step_raw(int order, double x) {
    // S_k(x) = x^(k+1) sum_n binom(k+n, n) binom(2k+1, k-n) (-x)^n
    double acc = 0.0;
    double xpow = 1.0;
    for (int n = 0; n <= order; ++n) {
        acc += binom(order + n, n) * binom(2 * order + 1, order - n) * xpow;
        xpow *= -x;
    }
    return std::pow(x, order + 1) * acc;
}

double poly_step(int order, double x) {
    // the alternating sum cancels badly for x near 1; fold through the
    // symmetry S(x) = 1 - S(1-x) so it is only ever evaluated on [0, 1/2]
    return x > 0.5 ? 1.0 - poly_step_raw(order, 1.0 - x) : poly_step_raw(order, x);
}

double exp_step(double x) {
    // f(t) = exp(-1/t) partition; flat to all orders at both junctions
    const double a = std::exp(-1.0 / x);
    const double b = std::exp(-1.0 / (1.0 - x));
    return a / (a + b);
}

} // namespace

RampSpec RampSpec::parse(const std::string& name) {
    RampSpec r;
    if (name == "expstep") {
        r.kind = Kind::expstep;
        return r;
    }
    if (name.rfind("poly", 0) == 0) {
        r.kind = Kind::poly;
        try {
            r.order = std::stoi(name.substr(4));
        } catch (const std::exception&) {
            throw std::invalid_argument("ramp: cannot parse order in '" + name + "'");
        }
        if (r.order < 1 || r.order > 24) throw std::invalid_argument("ramp: poly order must be 1..24");
        return r;
    }
    throw std::invalid_argument("ramp: unknown kind '" + name + "'");
}

std::string RampSpec::name() const {
    if (kind == Kind::expstep) return "expstep";
    return "poly" + std::to_string(order);
}

double ramp_value(const RampSpec& ramp, double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return ramp.kind == RampSpec::Kind::expstep ? exp_step(t) : poly_step(ramp.order, t);
}

double BumpProfile::axis(double t) const {
    const double a = std::abs(t);
    if (a <= inner_edge) return 1.0;
    if (a >= outer_edge) return 0.0;
    return ramp_value(ramp, (outer_edge - a) / (outer_edge - inner_edge));
}

double BumpProfile::operator()(const double* xi) const {
    double p = 1.0;
    for (int i = 0; i < dim; ++i) p *= axis(xi[i]);
    return p;
}

double RieszPair::phi_hat(const double* xi) const {
    double p = 1.0;
    for (int i = 0; i < dim; ++i) p *= phi_axis(xi[i]);
    return p;
}

double RieszPair::psi_hat(const double* xi) const {
    double p = 1.0;
    for (int i = 0; i < dim; ++i) p *= psi_axis(xi[i]);
    return p;
}

RieszPair build_pair(const BumpProfile& u1, const BumpProfile& u2, double delta,
                     std::optional<double> tau) {
    if (u1.dim != u2.dim) throw std::invalid_argument("build_pair: dimension mismatch");
    if (u1.dim < 1 || u1.dim > max_dim) throw std::invalid_argument("build_pair: dim must be 1..3");
    if (!(delta >= 0.0 && delta <= 1.0)) throw std::invalid_argument("build_pair: delta must lie in [0,1]");

    // Periodized overlap v1(t) = sum_k u1 u2 (t - 2pi k). Reducing t mod 2pi
    // first makes the three-shift sum exact for every argument.
    auto v1 = [u1, u2](double t) {
        const double red = t - two_pi * std::floor((t + M_PI) / two_pi);
        double acc = 0.0;
        for (int k = -1; k <= 1; ++k) {
            const double s = red - two_pi * k;
            acc += u1.axis(s) * u2.axis(s);
        }
        return acc;
    };

    RieszPair pair;
    pair.dim = u1.dim;
    pair.delta = delta;
    const double nphi = std::pow(two_pi, -delta);
    const double npsi = std::pow(two_pi, -(1.0 - delta));
    pair.phi_axis = [u1, v1, delta, nphi](double t) {
        if (std::abs(t) >= outer_edge) return 0.0;
        return nphi * u1.axis(t) / std::pow(v1(t), delta);
    };
    pair.psi_axis = [u2, v1, delta, npsi](double t) {
        if (std::abs(t) >= outer_edge) return 0.0;
        return npsi * u2.axis(t) / std::pow(v1(t), 1.0 - delta);
    };
    // On [-pi/2, pi/2] the shifted overlaps vanish and v1 = 1, so the axis
    // factors sit exactly at their normalization constants.
    pair.floor_phi = std::pow(nphi, pair.dim);
    pair.floor_psi = std::pow(npsi, pair.dim);

    if (tau) {
        if (!(*tau > 0.0)) throw std::invalid_argument("build_pair: tau must be positive");
        pair.tau = *tau;
    } else if (u1.ramp.kind == RampSpec::Kind::poly && u2.ramp.kind == RampSpec::Kind::poly) {
        pair.tau = std::min(u1.ramp.order, u2.ramp.order) + 1.0;
    } else {
        pair.tau = 3.0; // expstep: exp(-c sqrt x) tails look like a small power on finite windows
    }
    return pair;
}

RieszPair build_pair(int dim, double delta, const RampSpec& ramp, std::optional<double> tau) {
    BumpProfile u;
    u.dim = dim;
    u.ramp = ramp;
    return build_pair(u, u, delta, tau);
}

double biorthogonality_defect(const RieszPair& pair, int samples_per_axis) {
    if (samples_per_axis < 2) throw std::invalid_argument("biorthogonality_defect: need >= 2 samples");
    const int d = pair.dim;
    const double target = std::pow(two_pi, -d);

    std::int64_t total = 1;
    for (int i = 0; i < d; ++i) total *= samples_per_axis;
    double worst = 0.0;
    double xi[max_dim], shifted[max_dim];
    for (std::int64_t f = 0; f < total; ++f) {
        std::int64_t rem = f;
        for (int i = 0; i < d; ++i) {
            const int p = static_cast<int>(rem % samples_per_axis);
            rem /= samples_per_axis;
            xi[i] = -M_PI + two_pi * static_cast<double>(p) / static_cast<double>(samples_per_axis - 1);
        }
        double sum = 0.0;
        std::int64_t count = 1;
        for (int i = 0; i < d; ++i) count *= 3;
        for (std::int64_t s = 0; s < count; ++s) {
            std::int64_t r = s;
            for (int i = 0; i < d; ++i) {
                const int k = static_cast<int>(r % 3) - 1;
                r /= 3;
                shifted[i] = xi[i] - two_pi * k;
            }
            sum += pair.phi_hat(shifted) * pair.psi_hat(shifted);
        }
        worst = std::max(worst, std::abs(sum - target));
    }
    return worst;
}

RieszBounds riesz_bounds_profile(const std::function<double(double)>& axis_profile, int dim,
                                 int samples_per_axis) {
    if (!axis_profile) throw std::invalid_argument("riesz_bounds: profile required");
    if (dim < 1 || dim > max_dim) throw std::invalid_argument("riesz_bounds: dim must be 1..3");
    if (samples_per_axis < 2) throw std::invalid_argument("riesz_bounds: need >= 2 samples");

    // Tensor structure: the functional factorizes into per-axis sums
    // 2pi * sum_{|k|<=1} profile(t - 2pi k)^2, extremized on [-pi, pi].
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (int p = 0; p < samples_per_axis; ++p) {
        const double t = -M_PI + two_pi * static_cast<double>(p) / static_cast<double>(samples_per_axis - 1);
        double acc = 0.0;
        for (int k = -1; k <= 1; ++k) {
            const double v = axis_profile(t - two_pi * k);
            acc += v * v;
        }
        acc *= two_pi;
        lo = std::min(lo, acc);
        hi = std::max(hi, acc);
    }
    RieszBounds b;
    b.lower = std::pow(lo, dim);
    b.upper = std::pow(hi, dim);
    b.degenerate = b.lower <= 1e-12 * std::max(1.0, b.upper);
    return b;
}

RieszBounds riesz_bounds(const RieszPair& pair, PairMember member, int samples_per_axis) {
    return riesz_bounds_profile(member == PairMember::phi ? pair.phi_axis : pair.psi_axis, pair.dim,
                                samples_per_axis);
}

DecayReport decay_check(const RieszPair& pair, PairMember member, double tau, double R,
                        int grid_points, double period_factor) {
    if (!(tau > pair.dim)) throw std::invalid_argument("decay_check: tau must exceed the dimension");
    if (!(R >= 16.0)) throw std::invalid_argument("decay_check: R must be >= 16");
    if (!(period_factor >= 4.0)) throw std::invalid_argument("decay_check: period must be >= 4R");
    if (grid_points < 4096) throw std::invalid_argument("decay_check: grid too coarse");

    const double period = period_factor * R;
    const int n = grid_points;
    const double dxi = two_pi / period;

    // Inverse transform of the axis mask on a periodic grid: the mask is
    // smooth and compactly supported, so the quadrature error is dominated
    // by periodized tails at |x| >= period - R, far outside the window.
    const auto& profile = member == PairMember::phi ? pair.phi_axis : pair.psi_axis;
    std::vector<std::complex<double>> buf(n);
    for (int p = 0; p < n; ++p) {
        const int m = p < n / 2 ? p : p - n;
        buf[p] = profile(dxi * m);
    }
    fft_unnormalized(buf.data(), {n}, +1);
    const double scale = dxi / std::sqrt(two_pi);

    DecayReport rep;
    // the envelope fit starts past R/8 so wide windows skip the shelf the
    // transform rides before its junction-order asymptote takes over
    rep.r_inner = std::max(10.0, R / 8.0);
    rep.r_outer = R;
    rep.period = period;
    rep.grid_points = n;

    const double dx = period / n;
    double constant = 0.0;
    double tail_max = 0.0;

    const int bins = 12;
    std::vector<double> bin_max(bins, 0.0);
    const double lr0 = std::log(rep.r_inner), lr1 = std::log(R);

    for (int p = 0; p < n; ++p) {
        const int m = p < n / 2 ? p : p - n;
        const double x = dx * m;
        const double ax = std::abs(x);
        if (ax > R) continue;
        const double v = std::abs(buf[p]) * scale;
        constant = std::max(constant, v * std::pow(1.0 + ax, tau));
        if (ax >= rep.r_inner) {
            tail_max = std::max(tail_max, v);
            int b = static_cast<int>(bins * (std::log(ax) - lr0) / (lr1 - lr0));
            b = std::min(std::max(b, 0), bins - 1);
            bin_max[b] = std::max(bin_max[b], v);
        }
    }

    // Envelope slope: least squares on the per-bin maxima, which rides over
    // the oscillation zeros of the transform.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int used = 0;
    for (int b = 0; b < bins; ++b) {
        if (bin_max[b] <= 0.0) continue;
        const double lx = lr0 + (b + 0.5) * (lr1 - lr0) / bins;
        const double ly = std::log(bin_max[b]);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        ++used;
    }
    if (used < 3) throw std::runtime_error("decay_check: not enough tail bins above zero");
    rep.slope = (used * sxy - sx * sy) / (used * sxx - sx * sx);
    rep.constant = constant;
    rep.tail_max = tail_max;
    return rep;
}

double mask_transform(const RieszPair& pair, PairMember member, double x) {
    // Composite Simpson over the compact support; the masks are smooth, so
    // this converges far past the accuracy the FFT-based paths are held to.
    const auto& profile = member == PairMember::phi ? pair.phi_axis : pair.psi_axis;
    const int n = 1 << 16;
    const double a = -outer_edge, b = outer_edge;
    const double step = (b - a) / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double t = a + step * i;
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * profile(t) * std::cos(x * t);
    }
    return acc * step / 3.0 / std::sqrt(two_pi);
}

double kernel_witness_profile(const RieszPair& pair, double t) {
    // Decompose t = xi + 2pi n with xi in [-pi, pi). Even n picks up the
    // translate one slot to the right, odd n the negated one to the left,
    // so adjacent terms of the translate sum cancel pairwise.
    const double n = std::floor((t + M_PI) / two_pi);
    const bool even = std::fmod(std::fmod(n, 2.0) + 2.0, 2.0) == 0.0;
    return even ? pair.psi_axis(t + two_pi) : -pair.psi_axis(t - two_pi);
}

} // namespace fourlat
