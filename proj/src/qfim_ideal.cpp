#include "qcrb/qfim_ideal.hpp"

#include <algorithm>
#include <cmath>

namespace qcrb {

const char* to_string(Target t) {
    return t == Target::PhaseSum ? "phase_sum" : "phase_difference";
}

const char* to_string(Estimation e) {
    return e == Estimation::SingleParameter ? "single" : "two";
}

FisherMatrix qfim_matrix(const ModeStatistics& s) {
    validate(s);
    return {s.var_a + s.var_b + 2.0 * s.cov, s.var_a + s.var_b - 2.0 * s.cov, s.var_a - s.var_b};
}

double two_param_bound(const FisherMatrix& fm, Target target) {
    return detail::schur_complement(fm.pp, fm.mm, fm.pm, target);
}

double overestimation(const FisherMatrix& fm, Target target) {
    const double comp = fm.complementary(target);
    const double tol = 1e-12 * std::max({1.0, fm.pp, fm.mm});
    if (std::abs(fm.pm) <= tol && comp <= tol) return 0.0;
    if (comp <= tol)
        throw SingularComplement("complementary diagonal vanishes while the off-diagonal does not");
    return fm.pm * fm.pm / comp;
}

double single_param_info(const FisherMatrix& fm, Target target) { return fm.diagonal(target); }

double information(const FisherMatrix& fm, Target target, Estimation mode) {
    return mode == Estimation::SingleParameter ? single_param_info(fm, target)
                                               : two_param_bound(fm, target);
}

double qcrb_delta_phi(double info, int repeats) {
    if (repeats < 1) throw InvalidArgument("repeats must be >= 1");
    if (!(info > 0.0)) throw NonpositiveInformation("information must be positive for a finite bound");
    return 1.0 / std::sqrt(static_cast<double>(repeats) * info);
}

PrecisionBound qcrb(double info, int repeats, Estimation mode, Target target) {
    return {info, qcrb_delta_phi(info, repeats), mode, target, repeats};
}

}  // namespace qcrb
