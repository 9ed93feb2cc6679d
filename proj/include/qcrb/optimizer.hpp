#pragma once

#include <cmath>
#include <string>
#include <variant>

#include "qcrb/errors.hpp"
#include "qcrb/moments.hpp"
#include "qcrb/qfim_ideal.hpp"

namespace qcrb {

struct OptimizationResult {
    double argmin = 0.0;
    double minimum = 0.0;
    int evaluations = 0;
    bool converged = false;
};

inline constexpr int kGridPoints = 129;
inline constexpr int kEvaluationBudget = 10000;

// Grid scan over [lo, hi] followed by golden-section refinement of the bracket
// around the best grid point. The objective may return any ordered arithmetic type
// convertible to double; comparisons are done in that type. Ties go to the lower x.
template <class Objective>
OptimizationResult minimize_scalar(Objective&& objective, double lo, double hi, double abs_tol = 1e-8) {
    if (!(lo < hi)) throw InvalidArgument("minimize_scalar requires lo < hi");
    if (!(abs_tol > 0.0)) throw InvalidArgument("minimize_scalar requires abs_tol > 0");

    using Value = decltype(objective(lo));
    int evals = 0;
    auto eval = [&](double x) {
        const Value v = objective(x);
        ++evals;
        if (!std::isfinite(static_cast<double>(v)))
            throw NonFiniteObjective("objective is not finite at x = " + std::to_string(x));
        return v;
    };

    const int n = kGridPoints - 1;
    int best_i = 0;
    Value best_v = eval(lo);
    double best_x = lo;
    for (int i = 1; i <= n; ++i) {
        const double x = i == n ? hi : lo + (hi - lo) * (static_cast<double>(i) / n);
        const Value v = eval(x);
        if (v < best_v) {
            best_v = v;
            best_x = x;
            best_i = i;
        }
    }
    auto grid_x = [&](int i) { return i >= n ? hi : lo + (hi - lo) * (static_cast<double>(i) / n); };
    double a = grid_x(best_i > 0 ? best_i - 1 : 0);
    double b = grid_x(best_i < n ? best_i + 1 : n);

    auto consider = [&](double x, const Value& v) {
        if (v < best_v || (!(best_v < v) && x < best_x)) {
            best_v = v;
            best_x = x;
        }
    };

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    Value fc = eval(c);
    Value fd = eval(d);
    consider(c, fc);
    consider(d, fd);
    bool converged = true;
    while (b - a > abs_tol) {
        if (evals >= kEvaluationBudget) {
            converged = false;
            break;
        }
        // Machine resolution reached inside the bracket.
        if (!(a < c && c < d && d < b)) break;
        if (!(fd < fc)) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c);
            consider(c, fc);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d);
            consider(d, fd);
        }
    }
    return {best_x, static_cast<double>(best_v), evals, converged};
}

namespace detail {
#if defined(__SIZEOF_FLOAT128__)
using WideReal = __float128;
#else
using WideReal = long double;
#endif
}  // namespace detail

struct SingleArmFamily {
    double eta = 1.0;
};
struct TwoArmSymmetricFamily {
    double eta = 1.0;
};
struct TwoArmIndependentFamily {
    double eta_a = 1.0;
    double eta_b = 1.0;
};
using LossFamily = std::variant<SingleArmFamily, TwoArmSymmetricFamily, TwoArmIndependentFamily>;

// Bounded searches gamma in [-1.5, 0.5]. WholeLine searches the real line through
// gamma + 1 = tan(theta), |gamma + 1| <= kWholeLineLimit, then refines in gamma.
enum class GammaDomain { Bounded, WholeLine };

inline constexpr double kGammaLo = -1.5;
inline constexpr double kGammaHi = 0.5;
inline constexpr double kWholeLineLimit = 1e6;
inline constexpr int kMaxSweeps = 50;

struct GammaSearch {
    Estimation mode = Estimation::TwoParameter;
    GammaDomain domain = GammaDomain::Bounded;
    double abs_tol = 1e-8;
};

struct GammaOptimum {
    // argmin holds gamma (gamma_a for the independent family).
    OptimizationResult result;
    double gamma_b = 0.0;
    int sweeps = 0;
};

GammaOptimum optimize_gamma(const ModeStatistics& stats, const LossFamily& family, Target target,
                            const GammaSearch& search = {});

const char* to_string(GammaDomain d);

}  // namespace qcrb
