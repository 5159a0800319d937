#pragma once

// Periodic lattice grids, the mesh-normalized discrete Fourier transform,
// and the embedding/discretization maps between a coarse lattice and a
// refined "continuum stand-in" lattice over the same box.
//
// A grid holds n points per axis at mesh h; the box is [-L, L)^d with
// L = n h / 2 and fields are stored in wrapped (FFT) order. The pair
//   (F_h u)(xi) = h^d (2pi)^{-d/2} sum_n u(n) e^{-i h n . xi}
//   (F_h* g)(n) = (2pi)^{-d/2} int g(xi) e^{i h n . xi} dxi
// is exactly unitary between the h^d-weighted lattice norm and the
// Riemann-sum norm on the frequency cell [-pi/h, pi/h)^d.
//
// A refinement of the same box by an integer factor r keeps the frequency
// spacing and widens the cell r-fold, so coarse frequencies extend
// periodically onto the fine cell by index reduction and fine frequencies
// fold back onto coarse ones by integer shifts. The synthesis map J_h
// multiplies the extension by (2pi)^{d/2} phi0_hat(h xi); the analysis map
// K_h folds with conj(psi0_hat(h xi + 2pi j)). K_h J_h = I exactly on the
// grid; J_h K_h is a non-orthogonal projection strictly below the identity.

#include "fourlat/riesz.hpp"

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

namespace fourlat {

struct LatticeGrid {
    int dim;
    double h;
    int n;

    LatticeGrid(int dim, double h, int n);

    std::int64_t size() const;
    double box_half() const { return 0.5 * h * n; }
    double freq_step() const { return 2.0 * M_PI / (h * n); }
    double freq_half() const { return M_PI / h; }
    double space_weight() const;
    double freq_weight() const;
    std::vector<int> shape() const { return std::vector<int>(dim, n); }
    int signed_index(int p) const { return p < n / 2 ? p : p - n; }
    int wrap(int s) const { return s >= 0 ? s : s + n; }
    bool same_as(const LatticeGrid& o) const { return dim == o.dim && h == o.h && n == o.n; }
};

inline void decode_index(std::int64_t flat, int dim, int n, int* p) {
    for (int i = dim - 1; i >= 0; --i) {
        p[i] = static_cast<int>(flat % n);
        flat /= n;
    }
}

enum class Domain { space, frequency };

struct LatticeField {
    LatticeGrid grid;
    Domain domain;
    std::vector<std::complex<double>> v;
};

LatticeField make_field(const LatticeGrid& grid, Domain domain);
LatticeField random_field(const LatticeGrid& grid, Domain domain, std::uint64_t seed);

double field_norm(const LatticeField& f);
std::complex<double> field_inner(const LatticeField& a, const LatticeField& b);

LatticeField dft(const LatticeField& f);  // space -> frequency
LatticeField idft(const LatticeField& g); // frequency -> space

struct ContinuumProxy {
    LatticeGrid coarse;
    int refine;
    LatticeGrid fine;

    // refine < 4 cannot hold the 2pi/h-shifted mask supports without
    // aliasing, so it is rejected outright.
    ContinuumProxy(const LatticeGrid& coarse, int refine);
};

// J_h: coarse field -> fine field through the phi mask.
LatticeField embed(const LatticeField& u, const RieszPair& pair, const ContinuumProxy& proxy);
// K_h: fine field -> coarse field through the psi mask.
LatticeField discretize(const LatticeField& f, const RieszPair& pair, const ContinuumProxy& proxy);
// Adjoints with respect to the weighted inner products: J_h* folds with
// phi, K_h* spreads with psi.
LatticeField embed_adjoint(const LatticeField& f, const RieszPair& pair, const ContinuumProxy& proxy);
LatticeField discretize_adjoint(const LatticeField& u, const RieszPair& pair,
                                const ContinuumProxy& proxy);

// Unit-norm fine field annihilated by discretize() up to rounding.
LatticeField kernel_witness(const RieszPair& pair, const ContinuumProxy& proxy);

LatticeField sample_potential(const std::function<double(const double*, int)>& potential,
                              const LatticeGrid& grid);

struct ProjectionCheck {
    double idempotency_defect = 0.0; // max |(JK)^2 f - JK f| / |f|
    double identity_gap = 0.0;       // max |JK f - f| / |f|
};

ProjectionCheck projection_check(const RieszPair& pair, const ContinuumProxy& proxy, int trials,
                                 std::uint64_t seed);

} // namespace fourlat
