#include "qcrb/optimizer.hpp"

#include <algorithm>

#include "qcrb/qfim_lossy.hpp"

namespace qcrb {

namespace {

using detail::WideReal;

template <class Objective>
OptimizationResult minimize_gamma(Objective&& objective, const GammaSearch& search) {
    if (search.domain == GammaDomain::Bounded)
        return minimize_scalar(objective, kGammaLo, kGammaHi, search.abs_tol);

    // Locate the basin on the compactified line, then refine directly in gamma.
    const double theta_max = std::atan(kWholeLineLimit);
    auto on_angle = [&](double theta) { return objective(std::tan(theta) - 1.0); };
    const OptimizationResult coarse = minimize_scalar(on_angle, -theta_max, theta_max, 1e-10);
    const double width = 1e-6;
    const double t_lo = std::max(-theta_max, coarse.argmin - width);
    const double t_hi = std::min(theta_max, coarse.argmin + width);
    OptimizationResult fine =
        minimize_scalar(objective, std::tan(t_lo) - 1.0, std::tan(t_hi) - 1.0, search.abs_tol);
    fine.evaluations += coarse.evaluations;
    fine.converged = fine.converged && coarse.converged;
    return fine;
}

void check_eta(double eta) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidArgument("loss transmission must lie in [0, 1]");
}

}  // namespace

const char* to_string(GammaDomain d) { return d == GammaDomain::Bounded ? "bounded" : "whole_line"; }

GammaOptimum optimize_gamma(const ModeStatistics& stats, const LossFamily& family, Target target,
                            const GammaSearch& search) {
    validate(stats);
    const Estimation mode = search.mode;

    if (const auto* f = std::get_if<SingleArmFamily>(&family)) {
        check_eta(f->eta);
        const WideReal eta = f->eta;
        auto objective = [&](double gamma) {
            return detail::objective_value(
                detail::single_arm_elements<WideReal>(stats, eta, WideReal(gamma)), target, mode);
        };
        return {minimize_gamma(objective, search), 0.0, 1};
    }

    if (const auto* f = std::get_if<TwoArmSymmetricFamily>(&family)) {
        check_eta(f->eta);
        const WideReal eta = f->eta;
        auto objective = [&](double gamma) {
            const WideReal g = gamma;
            return detail::objective_value(detail::two_arm_elements<WideReal>(stats, eta, eta, g, g),
                                           target, mode);
        };
        const OptimizationResult r = minimize_gamma(objective, search);
        return {r, r.argmin, 1};
    }

    const auto& f = std::get<TwoArmIndependentFamily>(family);
    check_eta(f.eta_a);
    check_eta(f.eta_b);
    const WideReal eta_a = f.eta_a;
    const WideReal eta_b = f.eta_b;
    auto value = [&](double ga, double gb) {
        return detail::objective_value(
            detail::two_arm_elements<WideReal>(stats, eta_a, eta_b, WideReal(ga), WideReal(gb)), target,
            mode);
    };

    // Start from the symmetric optimum over the common gamma.
    const OptimizationResult start =
        minimize_gamma([&](double g) { return value(g, g); }, search);
    double ga = start.argmin;
    double gb = start.argmin;
    int evals = start.evaluations;
    bool inner_ok = start.converged;
    bool settled = false;
    OptimizationResult last = start;
    int sweep = 0;
    while (sweep < kMaxSweeps && !settled) {
        ++sweep;
        const OptimizationResult ra = minimize_gamma([&](double g) { return value(g, gb); }, search);
        const OptimizationResult rb = minimize_gamma([&](double g) { return value(ra.argmin, g); }, search);
        evals += ra.evaluations + rb.evaluations;
        inner_ok = inner_ok && ra.converged && rb.converged;
        settled = std::abs(ra.argmin - ga) < search.abs_tol && std::abs(rb.argmin - gb) < search.abs_tol;
        ga = ra.argmin;
        gb = rb.argmin;
        last = rb;
    }
    OptimizationResult out{ga, last.minimum, evals, inner_ok && settled};
    // Never report worse than the symmetric start.
    if (start.minimum < out.minimum) {
        out.argmin = start.argmin;
        out.minimum = start.minimum;
        gb = start.argmin;
    }
    return {out, gb, sweep};
}

}  // namespace qcrb
