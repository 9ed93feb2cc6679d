#pragma once

#include <complex>
#include <vector>

#include "qcrb/moments.hpp"
#include "qcrb/qfim_ideal.hpp"
#include "qcrb/qfim_lossy.hpp"

namespace qcrb {

inline constexpr int kDefaultCutoff = 64;
inline constexpr double kPreparationDeficitLimit = 1e-10;
inline constexpr double kSplitterDeficitLimit = 1e-8;

// Two-mode pure state on the grid 0 <= n_a, n_b <= cutoff.
struct TruncatedState {
    int cutoff = 0;
    std::vector<std::complex<double>> amplitudes;  // index n_a * (cutoff + 1) + n_b

    int dim() const { return cutoff + 1; }
    std::complex<double>& at(int na, int nb) { return amplitudes[na * dim() + nb]; }
    const std::complex<double>& at(int na, int nb) const { return amplitudes[na * dim() + nb]; }
    double norm_sq() const;
};

TruncatedState vacuum_state(int cutoff);
// |alpha> (x) S(r)|0> with real alpha and real squeezing.
TruncatedState prepare_input(double alpha_mag, double squeeze_r, int cutoff = kDefaultCutoff);
// Exponentiates the splitter generator on a padded grid and projects back.
TruncatedState apply_splitter(const TruncatedState& state, const SplitterSpec& splitter);
TruncatedState oracle_state(const InterferometerInput& input, int cutoff = kDefaultCutoff);

// The measurements below normalize by the state's norm.
ModeStatistics measure_moments(const TruncatedState& state);
FisherMatrix derivative_qfim(const TruncatedState& state);
FisherMatrix kraus_sum_cij(const TruncatedState& state, const SingleArmLoss& loss);
FisherMatrix kraus_sum_cij(const TruncatedState& state, const TwoArmLoss& loss);
// Sum over Kraus operators of <Pi^dag Pi>, normalized by the state norm.
double kraus_completeness(const TruncatedState& state, const TwoArmLoss& loss);

}  // namespace qcrb
