#include "qcrb/moments.hpp"

#include <cmath>
#include <string>

#include "qcrb/errors.hpp"

namespace qcrb {

namespace {

constexpr double kClampSlack = 1e-12;

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace

void validate(const ModeStatistics& s) {
    if (!finite_nonneg(s.mean_a) || !finite_nonneg(s.mean_b))
        throw InvalidArgument("mean photon numbers must be finite and >= 0");
    if (!finite_nonneg(s.var_a) || !finite_nonneg(s.var_b))
        throw InvalidArgument("variances must be finite and >= 0");
    if (!std::isfinite(s.cov)) throw InvalidArgument("covariance must be finite");
    const double bound = std::sqrt(s.var_a * s.var_b);
    if (std::abs(s.cov) > bound * (1.0 + kClampSlack) + kClampSlack)
        throw InvalidArgument("covariance violates |cov| <= sqrt(var_a*var_b)");
}

void validate(const InterferometerInput& in) {
    if (!finite_nonneg(in.alpha_mag)) throw InvalidArgument("alpha_mag must be >= 0");
    if (!finite_nonneg(in.squeeze_r)) throw InvalidArgument("squeeze_r must be >= 0");
    if (const auto* lbs = std::get_if<LinearSplitter>(&in.splitter)) {
        const double t = lbs->transmissivity;
        if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("transmissivity must lie in [0, 1]");
    } else {
        const double g = std::get<NonlinearSplitter>(in.splitter).gain;
        if (!(std::isfinite(g) && g >= 1.0)) throw InvalidArgument("gain must be >= 1");
    }
}

ModeStatistics lbs_moments(const InterferometerInput& in) {
    validate(in);
    const auto* lbs = std::get_if<LinearSplitter>(&in.splitter);
    if (!lbs) throw InvalidArgument("lbs_moments requires a linear splitter");
    const double t = lbs->transmissivity;
    const double r = lbs->reflectivity();
    const double a2 = in.alpha_mag * in.alpha_mag;
    const double sh = std::sinh(in.squeeze_r);
    const double ch = std::cosh(in.squeeze_r);
    const double sh2 = sh * sh;
    const double ch2 = ch * ch;
    const double e2r = std::exp(2.0 * in.squeeze_r);

    ModeStatistics s;
    s.mean_a = t * a2 + r * sh2;
    s.mean_b = r * a2 + t * sh2;
    const double shared = t * r * (a2 * e2r + sh2);
    s.var_a = t * t * a2 + 2.0 * r * r * sh2 * ch2 + shared;
    s.var_b = r * r * a2 + 2.0 * t * t * sh2 * ch2 + shared;
    s.cov = t * r * (a2 * (1.0 - e2r) + sh2 * std::cosh(2.0 * in.squeeze_r));
    return s;
}

ModeStatistics nbs_moments(const InterferometerInput& in) {
    validate(in);
    const auto* nbs = std::get_if<NonlinearSplitter>(&in.splitter);
    if (!nbs) throw InvalidArgument("nbs_moments requires a nonlinear splitter");
    const double G2 = nbs->gain * nbs->gain;
    const double g2 = nbs->conjugate_gain_sq();
    const double a2 = in.alpha_mag * in.alpha_mag;
    const double sh2 = std::sinh(in.squeeze_r) * std::sinh(in.squeeze_r);
    const double ch2 = std::cosh(in.squeeze_r) * std::cosh(in.squeeze_r);
    const double e2r = std::exp(2.0 * in.squeeze_r);

    ModeStatistics s;
    s.mean_a = G2 * a2 + g2 * ch2;
    s.mean_b = G2 * sh2 + g2 * (a2 + 1.0);
    const double shared = G2 * g2 * (a2 * e2r + ch2);
    s.var_a = G2 * G2 * a2 + 2.0 * g2 * g2 * sh2 * ch2 + shared;
    s.var_b = g2 * g2 * a2 + 2.0 * G2 * G2 * sh2 * ch2 + shared;
    s.cov = G2 * g2 * (a2 * (1.0 + e2r) + ch2 * std::cosh(2.0 * in.squeeze_r));
    return s;
}

ModeStatistics splitter_moments(const InterferometerInput& in) {
    if (std::holds_alternative<LinearSplitter>(in.splitter)) return lbs_moments(in);
    return nbs_moments(in);
}

double mandel_q(double mean, double var) {
    if (!(mean > 0.0)) throw DegenerateStatistics("Mandel Q undefined for zero mean photon number");
    return (var - mean) / mean;
}

double correlation_j(const ModeStatistics& s) {
    const double denom = std::sqrt(s.var_a * s.var_b);
    if (!(denom > 0.0)) throw DegenerateStatistics("correlation J undefined for zero variance");
    double j = s.cov / denom;
    if (std::abs(j) > 1.0) {
        if (std::abs(j) - 1.0 > kClampSlack)
            throw InvalidArgument("correlation |J| exceeds 1 by " + std::to_string(std::abs(j) - 1.0));
        j = std::copysign(1.0, j);
    }
    return j;
}

Correlations derived_correlations(const ModeStatistics& s) {
    return {mandel_q(s.mean_a, s.var_a), mandel_q(s.mean_b, s.var_b), correlation_j(s)};
}

}  // namespace qcrb
