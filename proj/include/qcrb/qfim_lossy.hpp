#pragma once

#include "qcrb/moments.hpp"
#include "qcrb/qfim_ideal.hpp"

namespace qcrb {

// Loss in arm a only; gamma sets where the loss acts relative to the phase.
struct SingleArmLoss {
    double eta_a = 1.0;
    double gamma = 0.0;
};

struct TwoArmLoss {
    double eta_a = 1.0;
    double eta_b = 1.0;
    double gamma_a = 0.0;
    double gamma_b = 0.0;
};

enum class DissipationRegime { SmallDissipation, HighDissipation };

struct HighLossEstimate {
    double gamma;
    double bound;
    double omega;        // gamma + 1
    double lambda_coef;  // 1 - omega (1 - eta)
    bool assumptions_hold;
};

void validate(const SingleArmLoss& loss);
void validate(const TwoArmLoss& loss);

FisherMatrix c_matrix_single(const ModeStatistics& stats, const SingleArmLoss& loss);
FisherMatrix c_matrix_two(const ModeStatistics& stats, const TwoArmLoss& loss);
double c_bound(const FisherMatrix& cm, Target target);

// Stationary point of the single-arm two-parameter bound over gamma.
double gamma_opt_single(const ModeStatistics& stats, double eta_a, Target target);
double optimal_bound_single(const ModeStatistics& stats, double eta_a, Target target);
// Asymptotic closed forms; meant for cross-checks, not as production bounds.
double limit_bound_single(const ModeStatistics& stats, double eta_a, Target target,
                          DissipationRegime regime);

double c_bound_two_symmetric(const ModeStatistics& stats, double eta, double gamma, Target target);
HighLossEstimate high_loss_two_arm(const ModeStatistics& stats, double eta, Target target);

namespace detail {

template <class Real>
struct MatrixElements {
    Real pp, mm, pm;
};

// Per-arm contribution: x^2 var + Gamma^2 (1 - eta) eta mean, with x = 1 - Gamma (1 - eta).
template <class Real>
Real arm_variance(Real var, Real mean, Real eta, Real gamma) {
    const Real big_gamma = gamma + Real(1);
    const Real x = Real(1) - big_gamma * (Real(1) - eta);
    return x * x * var + big_gamma * big_gamma * (Real(1) - eta) * eta * mean;
}

template <class Real>
Real arm_scale(Real eta, Real gamma) {
    return Real(1) - (gamma + Real(1)) * (Real(1) - eta);
}

template <class Real>
MatrixElements<Real> two_arm_elements(const ModeStatistics& s, Real eta_a, Real eta_b, Real gamma_a,
                                      Real gamma_b) {
    const Real a = arm_variance<Real>(s.var_a, s.mean_a, eta_a, gamma_a);
    const Real b = arm_variance<Real>(s.var_b, s.mean_b, eta_b, gamma_b);
    const Real cross = Real(2) * arm_scale(eta_a, gamma_a) * arm_scale(eta_b, gamma_b) * Real(s.cov);
    return {a + b + cross, a + b - cross, a - b};
}

// Single-arm loss is the two-arm form with arm b lossless.
template <class Real>
MatrixElements<Real> single_arm_elements(const ModeStatistics& s, Real eta_a, Real gamma) {
    return two_arm_elements<Real>(s, eta_a, Real(1), gamma, Real(0));
}

template <class Real>
Real objective_value(const MatrixElements<Real>& m, Target target, Estimation mode) {
    if (mode == Estimation::SingleParameter) return target == Target::PhaseSum ? m.pp : m.mm;
    return schur_complement(m.pp, m.mm, m.pm, target);
}

}  // namespace detail

}  // namespace qcrb
