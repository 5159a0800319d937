#pragma once

// Spectra of the discrete and continuum-proxy operators, Hausdorff and
// local Hausdorff distances between them, gap checks, spectral window
// projections, and eigenvalue/eigenvector tracking across a mesh sweep.
//
// Free operators have purely-multiplier spectra: the closure of the range
// of the (discretized) symbol, an interval [0, max] by continuity, which
// is represented as a sorted sample. With a potential the operator is
// truncated to its grid and diagonalized densely (real symmetric), so grid
// sizes are capped; the continuum side is stood in by the refined proxy.

#include "fourlat/lattice.hpp"
#include "fourlat/resolvent.hpp"
#include "fourlat/riesz.hpp"
#include "fourlat/symbols.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fourlat {

struct SpectrumSet {
    enum class Kind { sampled_range, eigenvalue_list };
    Kind kind = Kind::eigenvalue_list;
    std::vector<double> values; // sorted ascending
    std::string note;
};

// Window K = [a, b] with shift mu > 0, -mu < a <= b.
struct Window {
    double a;
    double b;
    double mu;
    int multiplicity = 1;

    Window(double a, double b, double mu, int multiplicity = 1);
};

// Spectrum of the operator truncated to `grid`. V absent: sampled range of
// the multiplier over the grid's frequency cell (`samples` values). V
// present: dense symmetric eigensolve; grids above 4096 points are refused.
SpectrumSet spectrum(const OperatorSpec& op, const LatticeGrid& grid, int samples = 2048);

// Hausdorff distance between non-empty sorted sets; empty input throws
// std::domain_error.
double hausdorff(const SpectrumSet& X, const SpectrumSet& Y);

// Local Hausdorff distance in K = [a, b]:
//   max{0, sup_{x in X cap K} dist(x, Y), sup_{y in Y cap K} dist(y, X)},
// empty intersections contributing sup(empty) = -inf.
double local_hausdorff(const SpectrumSet& X, const SpectrumSet& Y, const Window& K);

// Hausdorff distance between the reciprocal-shifted spectra
// {1/(lambda + mu)} of the discrete operator (coarse grid) and the proxy
// (fine grid). Free spectra are intervals; both are sampled uniformly in
// the mapped coordinate at `resolution` (0 picks 0.01 h^2, fine enough for
// second-order sweeps). With a potential both sides are dense eigensolves.
double resolvent_spectrum_distance(const Symbol& sym, const PotentialSpec* potential,
                                   const ContinuumProxy& proxy, double mu,
                                   double resolution = 0.0);

// Worst deviation between the eigenvalues of the assembled fine-grid
// operator J F K (F random diagonal on the coarse grid) and the predicted
// spectrum {F values} union {0}. Fine grids above 512 points are refused.
double union_with_zero_defect(const RieszPair& pair, const ContinuumProxy& proxy,
                              std::uint64_t seed = 0x5ca1eULL);

struct GapEntry {
    double h = 0.0;
    bool empty = false;     // no spectrum in [a, b]
    double distance = 0.0;  // from [a, b] to the nearest spectral point
};

struct GapReport {
    std::vector<GapEntry> entries;
    bool all_empty = false;
    double proxy_distance = 0.0; // clearance of [a, b] on the proxy reference
};

// Checks [a, b] stays spectrum-free on the discrete operator for each h.
// The interval must first clear the proxy reference (box `box_half`,
// `verify_points` dense points); violation there is a ConfigError.
GapReport gap_check(const Symbol& sym, const PotentialSpec* potential, double a, double b,
                    const std::vector<double>& h_list, double box_half,
                    int verify_points = 2048);

struct TrackEntry {
    double h = 0.0;
    int count = 0;          // discrete eigenvalues found in the window
    bool count_ok = false;  // count == multiplicity
    std::vector<double> discrete;
    double lambda_gap = 0.0;        // max |lambda_{i,h} - lambda_i(proxy)|
    double subspace_residual = 0.0; // max_j ||(I - P_h) K psi_j|| / ||K psi_j||
    double k_psi_norm = 0.0;        // min_j ||K psi_j||, psi_j unit on the fine grid
};

struct TrackReport {
    std::vector<double> reference; // proxy eigenvalues in the window (finest h)
    std::vector<TrackEntry> entries;
    std::string note;
};

// Tracks the window eigenvalues of H_h across the sweep against the proxy
// reference: dense eigenvalues on the coarse grid, inverse iteration for
// the window eigenvectors on both grids (matrix-free with preconditioned
// solves on the fine side), and the K_h image tests of the continuum
// eigenvectors. The window must isolate exactly `multiplicity` proxy
// eigenvalues (verified densely first; violation is a ConfigError).
TrackReport track_eigenvalues(const Symbol& sym, const PotentialSpec& potential,
                              const RieszPair& pair, const Window& window,
                              const std::vector<double>& h_list, double box_half,
                              int refine = 8);

// || J E_{H_h}((a,b)) K - E_H((a,b)) || by power iteration, both window
// projections built from eigendecompositions (low-rank inside a gap, or
// the exact identity/zero in the degenerate cases). Eigenvalues within
// eps = max(1e-3, 5 h^gamma_hint) of a window edge are refused.
double spectral_projection_distance(const Symbol& sym, const PotentialSpec* potential,
                                    const RieszPair& pair, const Window& window, double h,
                                    double box_half, int refine = 4,
                                    double gamma_hint = 2.0);

} // namespace fourlat
