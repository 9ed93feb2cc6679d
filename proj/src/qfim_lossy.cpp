#include "qcrb/qfim_lossy.hpp"

#include <algorithm>
#include <cmath>

namespace qcrb {

namespace {

void check_eta(double eta, const char* name) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidArgument(std::string(name) + " must lie in [0, 1]");
}

void check_gamma(double gamma, const char* name) {
    if (!std::isfinite(gamma)) throw InvalidArgument(std::string(name) + " must be finite");
}

void check_open_eta(double eta) {
    if (!(eta > 0.0 && eta < 1.0)) throw InvalidArgument("eta_a must lie in the open interval (0, 1)");
}

struct SingleArmInputs {
    double var_a, var_b, mean_a, j, rho;  // rho = sqrt(var_b / var_a)
};

SingleArmInputs single_arm_inputs(const ModeStatistics& s) {
    validate(s);
    if (!(s.var_a > 0.0 && s.var_b > 0.0))
        throw DegenerateStatistics("optimal gamma requires nonzero variances in both arms");
    if (!(s.mean_a > 0.0 && s.mean_b > 0.0))
        throw DegenerateStatistics("optimal gamma requires nonzero mean photon numbers");
    const double j = correlation_j(s);
    if (std::abs(j) >= 1.0) throw DegenerateStatistics("optimal gamma is singular for |J| = 1");
    return {s.var_a, s.var_b, s.mean_a, j, std::sqrt(s.var_b / s.var_a)};
}

}  // namespace

void validate(const SingleArmLoss& loss) {
    check_eta(loss.eta_a, "eta_a");
    check_gamma(loss.gamma, "gamma");
}

void validate(const TwoArmLoss& loss) {
    check_eta(loss.eta_a, "eta_a");
    check_eta(loss.eta_b, "eta_b");
    check_gamma(loss.gamma_a, "gamma_a");
    check_gamma(loss.gamma_b, "gamma_b");
}

FisherMatrix c_matrix_single(const ModeStatistics& stats, const SingleArmLoss& loss) {
    validate(stats);
    validate(loss);
    const auto m = detail::single_arm_elements<double>(stats, loss.eta_a, loss.gamma);
    return {m.pp, m.mm, m.pm};
}

FisherMatrix c_matrix_two(const ModeStatistics& stats, const TwoArmLoss& loss) {
    validate(stats);
    validate(loss);
    const auto m =
        detail::two_arm_elements<double>(stats, loss.eta_a, loss.eta_b, loss.gamma_a, loss.gamma_b);
    return {m.pp, m.mm, m.pm};
}

double c_bound(const FisherMatrix& cm, Target target) { return two_param_bound(cm, target); }

double gamma_opt_single(const ModeStatistics& stats, double eta_a, Target target) {
    check_open_eta(eta_a);
    const auto in = single_arm_inputs(stats);
    const double q_plus_one = in.var_a / in.mean_a;
    const double sign = target == Target::PhaseDifference ? 1.0 : -1.0;
    const double denom = (1.0 - eta_a) + eta_a / (q_plus_one * (1.0 - in.j * in.j)) *
                                             (1.0 + sign * in.j / in.rho);
    if (denom == 0.0 || !std::isfinite(denom))
        throw DegenerateStatistics("optimal gamma formula has a vanishing denominator");
    return 1.0 / denom - 1.0;
}

double optimal_bound_single(const ModeStatistics& stats, double eta_a, Target target) {
    const double gamma = gamma_opt_single(stats, eta_a, target);
    return c_bound(c_matrix_single(stats, {eta_a, gamma}), target);
}

double limit_bound_single(const ModeStatistics& stats, double eta_a, Target target,
                          DissipationRegime regime) {
    check_open_eta(eta_a);
    const auto in = single_arm_inputs(stats);
    const double j = in.j;
    const double j2 = j * j;
    const double rho = in.rho;
    // The SU(2)/SU(1,1) pairs differ only in the sign of J in the odd terms.
    const double s = target == Target::PhaseDifference ? 1.0 : -1.0;

    if (regime == DissipationRegime::SmallDissipation) {
        const double upsilon = 1.0 + 5.0 * j2 + j2 / (rho * rho) + rho * rho +
                               s * 2.0 * j * (1.0 + j2) / rho + s * 4.0 * j * rho;
        const double lead = rho + s * j;
        return 4.0 * (1.0 - j2) * in.var_a * lead * lead / upsilon;
    }

    const double k = eta_a * in.mean_a / (1.0 - eta_a);
    const double first = k * (1.0 - s * 2.0 * j * rho);
    const double shifted = j + s * rho;
    const double bracket = 1.0 - j2 + 2.0 * shifted * shifted;
    const double over_u = k * k * (1.0 - s * 2.0 * j * rho) * bracket -
                          s * k * (1.0 - j2) * in.var_b * (2.0 * j * rho + s * 3.0);
    const double over_d = k * bracket + (1.0 - j2) * in.var_b;
    return first - over_u / over_d;
}

double c_bound_two_symmetric(const ModeStatistics& stats, double eta, double gamma, Target target) {
    return c_bound(c_matrix_two(stats, {eta, eta, gamma, gamma}), target);
}

HighLossEstimate high_loss_two_arm(const ModeStatistics& stats, double eta, Target target) {
    if (eta >= 1.0) throw AssumptionViolation("high-loss closed form is undefined at eta = 1");
    if (!(eta > 0.0)) throw AssumptionViolation("high-loss closed form requires eta > 0");
    validate(stats);
    const double j = correlation_j(stats);
    const double ma = stats.mean_a;
    const double mb = stats.mean_b;
    const double zeta = (1.0 - j * j) * stats.var_a * stats.var_b;
    const double tau = ma * mb;
    const double lambda = mb * stats.var_a + ma * stats.var_b;
    const double eps = ma + mb;
    const double chi = target == Target::PhaseDifference ? stats.var_a + stats.var_b + 2.0 * stats.cov
                                                         : stats.var_a + stats.var_b - 2.0 * stats.cov;
    const double denom = eta * tau + (1.0 - eta) * lambda;
    if (!(denom > 0.0)) throw DegenerateStatistics("high-loss closed form has a vanishing denominator");
    const double omega = lambda / denom;
    const double lam = eta * tau / denom;
    const double loss = (1.0 - eta) * eta;

    HighLossEstimate out;
    out.omega = omega;
    out.lambda_coef = lam;
    out.gamma = eta * (lambda - tau) / denom;
    const double num = lam * lam * lam * lam * zeta + omega * omega * omega * omega * loss * loss * tau +
                       lam * lam * omega * omega * loss * lambda;
    out.bound = 4.0 * num / (lam * lam * chi + omega * omega * loss * eps);

    const double vmax = std::max(stats.var_a, stats.var_b);
    const double j_expected = target == Target::PhaseDifference ? -1.0 : 1.0;
    out.assumptions_hold =
        std::abs(stats.var_a - stats.var_b) <= 0.05 * vmax && std::abs(j - j_expected) <= 0.05;
    return out;
}

}  // namespace qcrb
