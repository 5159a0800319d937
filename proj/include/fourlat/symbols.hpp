#pragma once

// Fourier multiplier symbols and their lattice discretization.
//
// A symbol is a real function G0 >= 0 on R^d with G0(0) = 0, classified by
// growth/gradient exponents:
//   ClassI:   alpha > 1/2, beta > -1/2, alpha <= 1+beta < 2*alpha <= 3+beta,
//             G0 >= c|xi|^alpha outside |xi| <= c0, |grad G0| <= C|xi|^beta.
//   ClassII:  1/2 < alpha <= 1, beta_tilde >= 0, 1+beta_tilde < 2*alpha,
//             G0 = |xi|^alpha + remainder with ClassI-type remainder bounds.
//   ClassIII: G0 = |xi|^alpha exactly, 0 < alpha <= 1.
//
// On the mesh-h lattice the symbol becomes
//   G0h(xi) = G0((2/h) sin(h xi_1 / 2), ..., (2/h) sin(h xi_d / 2)),
// which is (2*pi/h)Z^d-periodic. The predicted operator-norm convergence
// rate gamma of the discretized resolvent depends only on the class:
//   ClassI:   min{2a-1, 2a-b-1}   ClassII: 2a-bt-1   ClassIII: a,
// capped by the potential exponent theta' when a potential is present.

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fourlat {

inline constexpr int max_dim = 3;

enum class ClassKind { one, two, three };

struct SymbolClass {
    ClassKind kind;
    double alpha = 0.0;
    double beta = 0.0;       // ClassI gradient exponent
    double beta_tilde = 0.0; // ClassII remainder gradient exponent

    static SymbolClass class_i(double alpha, double beta);
    static SymbolClass class_ii(double alpha, double beta_tilde);
    static SymbolClass class_iii(double alpha);
};

enum class SymbolTag { fraclap, laplacian, bilaplacian, pseudorel, custom };

struct Symbol {
    int dim = 1;
    SymbolTag tag = SymbolTag::custom;
    double power = 0.0; // fraclap exponent s
    double mass = 0.0;  // pseudorel mass m
    SymbolClass cls = SymbolClass::class_iii(1.0);
    double c_growth = 1.0; // growth lower-bound constant
    double c0_radius = 1.0; // growth bound applies for |xi| >= c0
    std::function<double(const double*, int)> custom_eval;

    double operator()(const double* xi) const;
    double operator()(double xi) const; // d = 1 convenience
};

Symbol make_fraclap(double s, int dim);
Symbol make_laplacian(int dim);
Symbol make_bilaplacian(int dim);
Symbol make_pseudorel(double m, int dim);
Symbol make_custom(std::function<double(const double*, int)> eval, SymbolClass cls, int dim,
                   double c_growth = 1.0, double c0_radius = 1.0);

double eval_symbol(const Symbol& sym, const double* xi);

struct DiscretizedSymbol {
    Symbol base;
    double h;

    DiscretizedSymbol(Symbol base, double h);
    double operator()(const double* xi) const;
    double operator()(double xi) const; // d = 1 convenience
};

double eval_discretized(const Symbol& sym, double h, const double* xi);

// Convergence rate gamma predicted from the class parameters alone,
// further capped by theta' when a Hoelder potential is attached.
double predicted_rate(const Symbol& sym, std::optional<double> theta_prime = std::nullopt);

struct GapSampling {
    int per_axis = 512;
    int random_count = 10000;
    std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
};

// sup over sampled h*xi in [-3pi/2, 3pi/2]^d of
//   | (G0h(xi) - z)^-1 - (G0(xi) - z)^-1 |.
// Requires z away from [0, inf), where both symbols take values.
double symbol_resolvent_gap(const DiscretizedSymbol& dsym, std::complex<double> z,
                            const GapSampling& sampling = {});

struct ConditionReport {
    std::string name;
    bool pass = false;
    double worst = 0.0;                    // worst sampled margin or ratio
    std::array<double, max_dim> at{};      // sample point attaining it
    std::string note;
};

struct ClassValidationReport {
    ConditionReport zero_at_origin;
    ConditionReport growth;
    ConditionReport gradient;
    ConditionReport symmetry;
    bool all_pass = false;
};

// Sampled falsification of the class conditions. The growth bound uses the
// symbol's declared (c, c0). The gradient bound is checked as "a constant
// exists": the log-log trend of |grad G0| / |xi|^beta must not grow with
// |xi|; the smallest sampled constant is reported in `worst`.
ClassValidationReport validate_class(const Symbol& sym, int budget = 20000,
                                     std::uint64_t seed = 0x51a37ULL);

} // namespace fourlat
