#include "fourlat/symbols.hpp"

#include "fourlat/rng.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

namespace fourlat {

namespace {

void check_dim(int dim) {
    if (dim < 1 || dim > max_dim) throw std::invalid_argument("symbol: dim must be 1..3");
}

double norm2sq(const double* xi, int dim) {
    double r2 = 0.0;
    for (int i = 0; i < dim; ++i) r2 += xi[i] * xi[i];
    return r2;
}

void check_finite(const double* xi, int dim) {
    for (int i = 0; i < dim; ++i)
        if (!std::isfinite(xi[i])) throw std::domain_error("symbol: non-finite frequency");
}

// Least-squares slope of y against x.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double xm = 0, ym = 0;
    for (std::size_t i = 0; i < n; ++i) { xm += x[i]; ym += y[i]; }
    xm /= static_cast<double>(n);
    ym /= static_cast<double>(n);
    double num = 0, den = 0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (x[i] - xm) * (y[i] - ym);
        den += (x[i] - xm) * (x[i] - xm);
    }
    return num / den;
}

} // namespace

SymbolClass SymbolClass::class_i(double alpha, double beta) {
    if (!(alpha > 0.5)) throw std::invalid_argument("ClassI: alpha must exceed 1/2");
    if (!(beta > -0.5)) throw std::invalid_argument("ClassI: beta must exceed -1/2");
    if (!(alpha <= 1.0 + beta && 1.0 + beta < 2.0 * alpha && 2.0 * alpha <= 3.0 + beta))
        throw std::invalid_argument("ClassI: need alpha <= 1+beta < 2*alpha <= 3+beta");
    SymbolClass c;
    c.kind = ClassKind::one;
    c.alpha = alpha;
    c.beta = beta;
    return c;
}

SymbolClass SymbolClass::class_ii(double alpha, double beta_tilde) {
    if (!(alpha > 0.5 && alpha <= 1.0)) throw std::invalid_argument("ClassII: need 1/2 < alpha <= 1");
    if (!(beta_tilde >= 0.0)) throw std::invalid_argument("ClassII: beta_tilde must be >= 0");
    if (!(1.0 + beta_tilde < 2.0 * alpha))
        throw std::invalid_argument("ClassII: need 1 + beta_tilde < 2*alpha");
    SymbolClass c;
    c.kind = ClassKind::two;
    c.alpha = alpha;
    c.beta_tilde = beta_tilde;
    return c;
}

SymbolClass SymbolClass::class_iii(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("ClassIII: need 0 < alpha <= 1");
    SymbolClass c;
    c.kind = ClassKind::three;
    c.alpha = alpha;
    return c;
}

double Symbol::operator()(const double* xi) const { return eval_symbol(*this, xi); }

double Symbol::operator()(double xi) const {
    if (dim != 1) throw std::invalid_argument("symbol: scalar eval requires dim 1");
    return eval_symbol(*this, &xi);
}

Symbol make_fraclap(double s, int dim) {
    check_dim(dim);
    if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("fraclap: s must be positive");
    Symbol sym;
    sym.dim = dim;
    sym.tag = SymbolTag::fraclap;
    sym.power = s;
    if (s <= 1.0)
        sym.cls = SymbolClass::class_iii(s);
    else if (s < 2.0)
        sym.cls = SymbolClass::class_i(s, s - 1.0);
    else
        sym.cls = SymbolClass::class_i(0.5 * (s + 2.0), s - 1.0);
    sym.c_growth = 1.0;
    sym.c0_radius = 1.0;
    return sym;
}

Symbol make_laplacian(int dim) {
    check_dim(dim);
    Symbol sym;
    sym.dim = dim;
    sym.tag = SymbolTag::laplacian;
    sym.cls = SymbolClass::class_i(2.0, 1.0);
    sym.c_growth = 1.0;
    sym.c0_radius = 1.0;
    return sym;
}

Symbol make_bilaplacian(int dim) {
    check_dim(dim);
    Symbol sym;
    sym.dim = dim;
    sym.tag = SymbolTag::bilaplacian;
    sym.cls = SymbolClass::class_i(3.0, 3.0);
    sym.c_growth = 1.0;
    sym.c0_radius = 1.0;
    return sym;
}

Symbol make_pseudorel(double m, int dim) {
    check_dim(dim);
    if (!(m >= 0.0) || !std::isfinite(m)) throw std::invalid_argument("pseudorel: mass must be >= 0");
    if (m == 0.0) return make_fraclap(1.0, dim); // massless case degenerates to |xi|
    Symbol sym;
    sym.dim = dim;
    sym.tag = SymbolTag::pseudorel;
    sym.mass = m;
    sym.cls = SymbolClass::class_i(1.0, 0.0);
    sym.c_growth = 0.5;
    sym.c0_radius = 2.0 * m + 1.0;
    return sym;
}

Symbol make_custom(std::function<double(const double*, int)> eval, SymbolClass cls, int dim,
                   double c_growth, double c0_radius) {
    check_dim(dim);
    if (!eval) throw std::invalid_argument("custom symbol: evaluator required");
    if (!(c_growth > 0.0 && c0_radius > 0.0))
        throw std::invalid_argument("custom symbol: constants must be positive");
    Symbol sym;
    sym.dim = dim;
    sym.tag = SymbolTag::custom;
    sym.cls = cls;
    sym.c_growth = c_growth;
    sym.c0_radius = c0_radius;
    sym.custom_eval = std::move(eval);
    return sym;
}

double eval_symbol(const Symbol& sym, const double* xi) {
    check_finite(xi, sym.dim);
    const double r2 = norm2sq(xi, sym.dim);
    switch (sym.tag) {
        case SymbolTag::fraclap:
            return std::pow(r2, 0.5 * sym.power);
        case SymbolTag::laplacian:
            return r2;
        case SymbolTag::bilaplacian:
            return r2 * r2;
        case SymbolTag::pseudorel:
            // sqrt(r2 + m^2) - m, written to stay exact at xi = 0
            return r2 / (std::sqrt(r2 + sym.mass * sym.mass) + sym.mass);
        case SymbolTag::custom:
            return sym.custom_eval(xi, sym.dim);
    }
    throw std::logic_error("eval_symbol: unreachable");
}

DiscretizedSymbol::DiscretizedSymbol(Symbol base_, double h_) : base(std::move(base_)), h(h_) {
    if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("discretized symbol: h must be positive");
}

double DiscretizedSymbol::operator()(const double* xi) const { return eval_discretized(base, h, xi); }

double DiscretizedSymbol::operator()(double xi) const {
    if (base.dim != 1) throw std::invalid_argument("symbol: scalar eval requires dim 1");
    return eval_discretized(base, h, &xi);
}

double eval_discretized(const Symbol& sym, double h, const double* xi) {
    if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("eval_discretized: h must be positive");
    check_finite(xi, sym.dim);
    double mapped[max_dim];
    for (int i = 0; i < sym.dim; ++i) mapped[i] = (2.0 / h) * std::sin(0.5 * h * xi[i]);
    return eval_symbol(sym, mapped);
}

double predicted_rate(const Symbol& sym, std::optional<double> theta_prime) {
    double free_rate;
    switch (sym.cls.kind) {
        case ClassKind::one:
            free_rate = std::min(2.0 * sym.cls.alpha - 1.0, 2.0 * sym.cls.alpha - sym.cls.beta - 1.0);
            break;
        case ClassKind::two:
            free_rate = 2.0 * sym.cls.alpha - sym.cls.beta_tilde - 1.0;
            break;
        case ClassKind::three:
            free_rate = sym.cls.alpha;
            break;
        default:
            throw std::logic_error("predicted_rate: unreachable");
    }
    if (theta_prime) {
        if (!(*theta_prime > 0.0)) throw std::invalid_argument("predicted_rate: theta_prime must be positive");
        return std::min(free_rate, *theta_prime);
    }
    return free_rate;
}

double symbol_resolvent_gap(const DiscretizedSymbol& dsym, std::complex<double> z,
                            const GapSampling& sampling) {
    const Symbol& sym = dsym.base;
    const int d = sym.dim;
    const double h = dsym.h;
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw std::domain_error("symbol_resolvent_gap: non-finite z");
    if (z.imag() == 0.0 && z.real() >= 0.0)
        throw std::domain_error("symbol_resolvent_gap: z must avoid [0, inf)");
    if (sampling.per_axis < 2) throw std::invalid_argument("symbol_resolvent_gap: need >= 2 points per axis");

    const double edge = 1.5 * M_PI / h; // sup runs over h*xi in [-3pi/2, 3pi/2]^d
    double worst = 0.0;
    auto probe = [&](const double* xi) {
        const double g = eval_symbol(sym, xi);
        const double gh = eval_discretized(sym, h, xi);
        const double gap = std::abs(1.0 / (std::complex<double>(gh) - z) -
                                    1.0 / (std::complex<double>(g) - z));
        if (gap > worst) worst = gap;
    };

    const int per = sampling.per_axis;
    std::int64_t total = 1;
    for (int i = 0; i < d; ++i) total *= per;
    double xi[max_dim];
    for (std::int64_t f = 0; f < total; ++f) {
        std::int64_t rem = f;
        for (int i = 0; i < d; ++i) {
            const int p = static_cast<int>(rem % per);
            rem /= per;
            xi[i] = -edge + 2.0 * edge * static_cast<double>(p) / static_cast<double>(per - 1);
        }
        probe(xi);
    }

    std::uint64_t state = sampling.seed;
    for (int r = 0; r < sampling.random_count; ++r) {
        for (int i = 0; i < d; ++i) xi[i] = uniform(state, -edge, edge);
        probe(xi);
    }
    return worst;
}

namespace {

// Numeric gradient by central differences, step scaled to the point.
void numeric_gradient(const std::function<double(const double*)>& f, const double* xi, int dim,
                      double* grad) {
    const double r = std::sqrt(norm2sq(xi, dim));
    const double step = 1e-6 * (1.0 + r);
    double pt[max_dim];
    for (int i = 0; i < dim; ++i) pt[i] = xi[i];
    for (int i = 0; i < dim; ++i) {
        pt[i] = xi[i] + step;
        const double fp = f(pt);
        pt[i] = xi[i] - step;
        const double fm = f(pt);
        pt[i] = xi[i];
        grad[i] = (fp - fm) / (2.0 * step);
    }
}

} // namespace

ClassValidationReport validate_class(const Symbol& sym, int budget, std::uint64_t seed) {
    if (budget < 100) throw std::invalid_argument("validate_class: budget too small");
    const int d = sym.dim;
    ClassValidationReport rep;
    std::uint64_t state = seed;

    // zero at origin
    {
        double origin[max_dim] = {0, 0, 0};
        const double v = eval_symbol(sym, origin);
        rep.zero_at_origin.name = "zero_at_origin";
        rep.zero_at_origin.worst = std::abs(v);
        rep.zero_at_origin.pass = std::abs(v) <= 1e-13;
    }

    // growth lower bound: G0 >= c |xi|^alpha for |xi| >= c0
    // (ClassIII instead demands G0 = |xi|^alpha exactly)
    {
        rep.growth.name = "growth_lower_bound";
        const double alpha = sym.cls.alpha;
        const double rmax = std::max(100.0, 10.0 * sym.c0_radius);
        const int trials = budget / 4;
        double worst_ratio = std::numeric_limits<double>::infinity();
        double worst_dev = 0.0;
        double xi[max_dim];
        for (int t = 0; t < trials; ++t) {
            const double r = sym.c0_radius * std::pow(rmax / sym.c0_radius, uniform01(state));
            double dir2 = 0.0;
            for (int i = 0; i < d; ++i) {
                xi[i] = uniform(state, -1.0, 1.0);
                dir2 += xi[i] * xi[i];
            }
            if (dir2 == 0.0) { xi[0] = 1.0; dir2 = 1.0; }
            const double scale = r / std::sqrt(dir2);
            for (int i = 0; i < d; ++i) xi[i] *= scale;
            const double g = eval_symbol(sym, xi);
            const double ref = std::pow(r, alpha);
            if (sym.cls.kind == ClassKind::three) {
                const double dev = std::abs(g - ref) / (1.0 + ref);
                if (dev > worst_dev) {
                    worst_dev = dev;
                    for (int i = 0; i < d; ++i) rep.growth.at[i] = xi[i];
                }
            } else {
                const double ratio = g / (sym.c_growth * ref);
                if (ratio < worst_ratio) {
                    worst_ratio = ratio;
                    for (int i = 0; i < d; ++i) rep.growth.at[i] = xi[i];
                }
            }
        }
        if (sym.cls.kind == ClassKind::three) {
            rep.growth.worst = worst_dev;
            rep.growth.pass = worst_dev <= 1e-9;
            rep.growth.note = "checked G0 = |xi|^alpha exactly";
        } else {
            rep.growth.worst = worst_ratio;
            rep.growth.pass = worst_ratio >= 1.0 - 1e-9;
        }
    }

    // gradient bound: the ratio |grad G0| / |xi|^beta must stay bounded.
    // Sampling can only falsify growth of the ratio, so we test the log-log
    // trend across radius bins and report the largest sampled constant.
    {
        rep.gradient.name = "gradient_bound";
        double expo;
        std::function<double(const double*)> f;
        switch (sym.cls.kind) {
            case ClassKind::one:
                expo = sym.cls.beta;
                f = [&sym](const double* p) { return eval_symbol(sym, p); };
                break;
            case ClassKind::two:
                expo = sym.cls.beta_tilde;
                f = [&sym](const double* p) {
                    return eval_symbol(sym, p) - std::pow(norm2sq(p, sym.dim), 0.5 * sym.cls.alpha);
                };
                rep.gradient.note = "remainder G0 - |xi|^alpha";
                break;
            case ClassKind::three:
                expo = sym.cls.alpha - 1.0;
                f = [&sym](const double* p) { return eval_symbol(sym, p); };
                break;
            default:
                throw std::logic_error("validate_class: unreachable");
        }
        const double rlo = std::max(sym.c0_radius, 1.0);
        const double rhi = 1e3 * rlo;
        const int bins = 16;
        const int per_bin = std::max(8, budget / (2 * bins));
        std::vector<double> logr, logratio;
        double cmax = 0.0;
        bool finite = true;
        double xi[max_dim], grad[max_dim];
        for (int b = 0; b < bins; ++b) {
            const double rb = rlo * std::pow(rhi / rlo, (b + 0.5) / bins);
            double bin_worst = 0.0;
            double bin_at[max_dim] = {0, 0, 0};
            for (int t = 0; t < per_bin; ++t) {
                double dir2 = 0.0;
                for (int i = 0; i < d; ++i) {
                    xi[i] = uniform(state, -1.0, 1.0);
                    dir2 += xi[i] * xi[i];
                }
                if (dir2 == 0.0) { xi[0] = 1.0; dir2 = 1.0; }
                const double r = rb * std::pow(rhi / rlo, uniform(state, -0.5, 0.5) / bins);
                const double scale = r / std::sqrt(dir2);
                for (int i = 0; i < d; ++i) xi[i] *= scale;
                numeric_gradient(f, xi, d, grad);
                const double gnorm = std::sqrt(norm2sq(grad, d));
                if (!std::isfinite(gnorm)) { finite = false; continue; }
                const double ratio = gnorm / std::pow(r, expo);
                if (ratio > bin_worst) {
                    bin_worst = ratio;
                    for (int i = 0; i < d; ++i) bin_at[i] = xi[i];
                }
            }
            if (bin_worst > cmax) {
                cmax = bin_worst;
                for (int i = 0; i < d; ++i) rep.gradient.at[i] = bin_at[i];
            }
            logr.push_back(std::log(rb));
            logratio.push_back(std::log(std::max(bin_worst, 1e-300)));
        }
        const double slope = ls_slope(logr, logratio);
        rep.gradient.worst = cmax;
        rep.gradient.pass = finite && slope <= 0.05;
        if (rep.gradient.note.empty())
            rep.gradient.note = "trend slope " + std::to_string(slope);
        else
            rep.gradient.note += ", trend slope " + std::to_string(slope);
    }

    // reflection symmetry in every coordinate
    {
        rep.symmetry.name = "reflection_symmetry";
        const int trials = budget / 4;
        double worst = 0.0;
        double xi[max_dim], flipped[max_dim];
        for (int t = 0; t < trials; ++t) {
            for (int i = 0; i < d; ++i) xi[i] = uniform(state, -20.0, 20.0);
            const double g = eval_symbol(sym, xi);
            for (int mask = 1; mask < (1 << d); ++mask) {
                for (int i = 0; i < d; ++i) flipped[i] = (mask & (1 << i)) ? -xi[i] : xi[i];
                const double gf = eval_symbol(sym, flipped);
                const double dev = std::abs(gf - g) / (1.0 + std::abs(g));
                if (dev > worst) {
                    worst = dev;
                    for (int i = 0; i < d; ++i) rep.symmetry.at[i] = xi[i];
                }
            }
        }
        rep.symmetry.worst = worst;
        rep.symmetry.pass = worst <= 1e-12;
    }

    rep.all_pass = rep.zero_at_origin.pass && rep.growth.pass && rep.gradient.pass && rep.symmetry.pass;
    return rep;
}

} // namespace fourlat
