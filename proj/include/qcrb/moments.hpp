#pragma once

#include <variant>

namespace qcrb {

struct LinearSplitter {
    double transmissivity = 0.5;
    double reflectivity() const { return 1.0 - transmissivity; }
};

struct NonlinearSplitter {
    double gain = 1.0;
    // g^2 = G^2 - 1
    double conjugate_gain_sq() const { return gain * gain - 1.0; }
};

using SplitterSpec = std::variant<LinearSplitter, NonlinearSplitter>;

// Coherent state |alpha> in mode a, squeezed vacuum in mode b. Phases are fixed
// to the phase-matched values, so only magnitudes are stored.
struct InterferometerInput {
    double alpha_mag = 0.0;
    double squeeze_r = 0.0;
    SplitterSpec splitter = LinearSplitter{};
};

// Photon-number statistics of the two arms after the first splitter.
struct ModeStatistics {
    double mean_a = 0.0;
    double mean_b = 0.0;
    double var_a = 0.0;
    double var_b = 0.0;
    double cov = 0.0;
};

struct Correlations {
    double mandel_q_a;
    double mandel_q_b;
    double correlation_j;
};

// Throws InvalidArgument on negative/non-finite entries or Cauchy-Schwarz violation.
void validate(const ModeStatistics& stats);
void validate(const InterferometerInput& input);

ModeStatistics lbs_moments(const InterferometerInput& input);
ModeStatistics nbs_moments(const InterferometerInput& input);
// Dispatches on the splitter variant.
ModeStatistics splitter_moments(const InterferometerInput& input);

double mandel_q(double mean, double var);
double correlation_j(const ModeStatistics& stats);
Correlations derived_correlations(const ModeStatistics& stats);

}  // namespace qcrb
