#pragma once

#include "qcrb/errors.hpp"
#include "qcrb/moments.hpp"

namespace qcrb {

enum class Target { PhaseSum, PhaseDifference };
enum class Estimation { SingleParameter, TwoParameter };

const char* to_string(Target t);
const char* to_string(Estimation e);

// Symmetric 2x2 information matrix in the (phi+, phi-) basis. Shared by the
// lossless QFIM and the lossy C matrices.
struct FisherMatrix {
    double pp = 0.0;
    double mm = 0.0;
    double pm = 0.0;

    // PhaseSum -> pp, PhaseDifference -> mm.
    double diagonal(Target t) const { return t == Target::PhaseSum ? pp : mm; }
    double complementary(Target t) const { return t == Target::PhaseSum ? mm : pp; }
};

struct PrecisionBound {
    double info;
    double delta_phi;
    Estimation mode;
    Target target;
    int repeats;
};

FisherMatrix qfim_matrix(const ModeStatistics& stats);

// Schur complement diagonal - pm^2 / complementary.
double two_param_bound(const FisherMatrix& fm, Target target);
// diagonal - two_param_bound, >= 0.
double overestimation(const FisherMatrix& fm, Target target);
double single_param_info(const FisherMatrix& fm, Target target);
double information(const FisherMatrix& fm, Target target, Estimation mode);

double qcrb_delta_phi(double info, int repeats);
PrecisionBound qcrb(double info, int repeats, Estimation mode = Estimation::TwoParameter,
                    Target target = Target::PhaseDifference);

namespace detail {

template <class Real>
Real abs_of(Real x) {
    return x < Real(0) ? -x : x;
}

template <class Real>
Real max_of(Real a, Real b) {
    return a < b ? b : a;
}

// Used with double and with wider types by the gamma optimizer.
template <class Real>
Real schur_complement(Real pp, Real mm, Real pm, Target target) {
    const Real diag = target == Target::PhaseSum ? pp : mm;
    const Real comp = target == Target::PhaseSum ? mm : pp;
    const Real tol = Real(1e-12) * max_of(Real(1), max_of(pp, mm));
    const bool pm_small = abs_of(pm) <= tol;
    if (comp <= tol) {
        if (pm_small) return diag;
        throw SingularComplement("complementary diagonal vanishes while the off-diagonal does not");
    }
    return diag - pm * pm / comp;
}

}  // namespace detail

}  // namespace qcrb
