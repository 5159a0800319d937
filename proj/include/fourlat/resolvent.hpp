#pragma once

// Resolvents of the multiplier operators and the error operator
//   D(z) = J_h (H_h - z)^-1 K_h - (H - z)^-1,
// whose operator norm is the quantity the h-sweeps track. Two norm paths:
// fibers (free case: D(z) is block-diagonal over frequencies of the coarse
// cell, with an explicit small matrix per fiber) and power iteration on
// D(z)*D(z) (general, matrix-free). A potential enters the discrete side
// sampled on lattice points and the proxy side sampled on the fine lattice.

#include "fourlat/lattice.hpp"
#include "fourlat/riesz.hpp"
#include "fourlat/symbols.hpp"

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fourlat {

struct PotentialSpec {
    int dim = 1;
    std::string name = "custom";
    std::function<double(const double*, int)> evaluator;
    double bound = 0.0; // sup |V|
    double theta = 1.0; // Hoelder exponent in (0, 1]
};

PotentialSpec make_cos_potential(int dim);           // cos(x_1)
PotentialSpec make_rough_potential(int dim);         // |sin x_1|^(1/2), theta = 1/2
PotentialSpec make_well_potential(int dim);          // -2 sech^2 |x|
PotentialSpec make_constant_potential(double c, int dim);

// effective coupling exponent: 1/theta' = 1/theta + 1/(tau - d)
double theta_prime(double theta, double tau, int dim);

struct PotentialCheck {
    double worst_bound_excess = 0.0;   // max |V| - bound over samples
    double worst_quotient = 0.0;       // max Hoelder quotient over sample pairs
    bool pass = false;
};

PotentialCheck validate_potential(const PotentialSpec& V, double radius = 16.0,
                                  int budget = 4000, std::uint64_t seed = 0x7e57ULL);

enum class OperatorSpace { discrete, proxy };

// A multiplier operator (plus optional potential) acting on fields of one
// grid: `discrete` reads the symbol through the sine substitution at the
// grid's own mesh, `proxy` reads it raw as the continuum stand-in.
struct OperatorSpec {
    Symbol symbol;
    OperatorSpace space = OperatorSpace::discrete;
    std::optional<PotentialSpec> potential;
};

LatticeField apply_operator(const OperatorSpec& op, const LatticeField& u);

struct ResolventProbe {
    std::complex<double> z{-1.0, 0.0};
    double tol = 1e-10;
    int max_iter = 400;
    enum class Method { fiber, power } method = Method::fiber;
};

// Throws std::domain_error unless z is admissible: away from [0, inf) when
// V is absent, and off the real axis or below -mu = -(sup|V| + 1) otherwise.
void require_admissible(std::complex<double> z, const PotentialSpec* potential);

// w with ||(op - z) w - u|| <= tol ||u||. Free operators divide in Fourier
// space (residual at round-off); with a potential the shifted system is
// solved by GMRES preconditioned on the right by the free resolvent, which
// makes the Krylov residual the true residual. Non-convergence within
// max_iter throws SolverError carrying the final relative residual.
LatticeField apply_resolvent(const OperatorSpec& op, std::complex<double> z,
                             const LatticeField& u, double tol = 1e-10, int max_iter = 400);

// Same solve without the blanket admissibility screen, for callers that
// certify z lies in the resolvent set themselves (spectral routines probe
// real shifts inside verified gaps, which the screen is too coarse for).
LatticeField apply_resolvent_unchecked(const OperatorSpec& op, std::complex<double> z,
                                       const LatticeField& u, double tol = 1e-10,
                                       int max_iter = 400);

// Matrix-free handle for D(z) between fine-grid fields.
struct ErrorOperatorHandle {
    Symbol symbol;
    RieszPair pair;
    ContinuumProxy proxy;
    std::optional<PotentialSpec> potential;
    ResolventProbe probe;
    double scale = 1.0; // test hook: multiplies the whole operator

    // diagonals cached at construction: symbol values per grid, potential samples
    std::vector<double> mult_coarse, mult_fine, pot_coarse, pot_fine;

    ErrorOperatorHandle(Symbol symbol, RieszPair pair, ContinuumProxy proxy,
                        std::optional<PotentialSpec> potential = std::nullopt,
                        ResolventProbe probe = {});

    LatticeField apply(const LatticeField& f) const;
    LatticeField apply_adjoint(const LatticeField& f) const;
};

struct FiberSampling {
    int per_axis = 4096;
    int random_count = 10000;
    std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
};

// Exact norm of the free error operator on the infinite lattice, modulo
// sampling of the sup over fibers zeta in the coarse frequency cell: per
// fiber the operator is the 3^d x 3^d matrix
//   M_{j',j} = (2pi)^d phi0_hat(h zeta + 2pi j') conj(psi0_hat(h zeta + 2pi j))
//              * (G0h(zeta) - z)^-1  -  delta_{j'j} (G0(zeta + 2pi j / h) - z)^-1
// padded by the diagonal tail |G0(zeta + 2pi j / h) - z|^-1 over far shifts.
double error_norm_fiber(const Symbol& sym, const RieszPair& pair, double h,
                        std::complex<double> z, const FiberSampling& sampling = {});

// Same fiber computation restricted to the proxy's own finite grid: fibers
// are exactly the coarse grid frequencies and the shift range is exactly
// the fine cell, so this is the exact norm of the operator the power
// method sees, and the two must agree to its convergence tolerance.
double error_norm_fiber(const Symbol& sym, const RieszPair& pair, const ContinuumProxy& proxy,
                        std::complex<double> z);

// One fiber matrix, row-major (3^d)^2 entries; exposed for direct tests.
std::vector<std::complex<double>> error_fiber_matrix(const Symbol& sym, const RieszPair& pair,
                                                     double h, std::complex<double> z,
                                                     const double* zeta);

struct NormEstimate {
    double value = 0.0;
    bool converged = false;
    double last_increment = 0.0;
    int iterations = 0;
};

// Power iteration on A*A for a matrix-free operator between fields whose
// domain is `domain_grid` (space side). Seeded restarts, max over restarts,
// convergence when the Rayleigh quotient moves by < 1e-6 relative.
NormEstimate operator_norm_power(
    const std::function<LatticeField(const LatticeField&)>& apply,
    const std::function<LatticeField(const LatticeField&)>& apply_adjoint,
    const LatticeGrid& domain_grid, int iters, std::uint64_t seed, int restarts = 5);

// Power iteration on D(z)*D(z) from seeded random starts (5 restarts, max
// over restarts), declaring convergence when the Rayleigh quotient moves
// by < 1e-6 relative. Non-convergence is reported, not thrown.
NormEstimate error_norm_power(const ErrorOperatorHandle& handle, int iters = 2000,
                              std::uint64_t seed = 0x11d5ULL);

// || V_h K_h - K_h V || as an operator from fine fields to coarse fields,
// by power iteration on C*C.
NormEstimate potential_commutator_norm(const PotentialSpec& V, const RieszPair& pair,
                                       const ContinuumProxy& proxy, int iters = 2000,
                                       std::uint64_t seed = 0x11d5ULL);

struct BlowupPoint {
    double y = 0.0;
    double norm = 0.0;
};

struct BlowupReport {
    std::vector<BlowupPoint> points; // sorted by decreasing y
    double exponent = 0.0;           // fitted growth power of 1/|y|
};

// ||D(x + iy)|| for each y: fiber norm when V is absent, power iteration
// otherwise. The fitted exponent estimates N in the |y|^-N blowup bound.
BlowupReport y_blowup_scan(const Symbol& sym, const RieszPair& pair, const ContinuumProxy& proxy,
                           const PotentialSpec* potential, double x,
                           const std::vector<double>& y_list, std::uint64_t seed = 0x11d5ULL);

} // namespace fourlat
