#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "qcrb/qcrb.hpp"

namespace qcrb::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidConfig = 1;
inline constexpr int kExitComputation = 2;
inline constexpr int kExitOracleFailure = 3;

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Interferometer { SU2, SU11 };
enum class LossModel { None, OneArm, TwoArm };
enum class TwoArmGamma { Symmetric, Independent };
enum class SweepVariable { AlphaPhotons, Eta, SplitterRatio, Gain };
enum class Spacing { Linear, Log };

struct SweepRange {
    SweepVariable variable = SweepVariable::Eta;
    double start = 0.0;
    double stop = 1.0;
    int steps = 2;
    Spacing spacing = Spacing::Linear;

    std::vector<double> values() const;
};

struct ScanSpec {
    Interferometer interferometer = Interferometer::SU2;
    Estimation estimation = Estimation::TwoParameter;
    LossModel loss = LossModel::None;
    TwoArmGamma two_arm_gamma = TwoArmGamma::Symmetric;
    GammaDomain gamma_domain = GammaDomain::Bounded;
    std::optional<SweepRange> sweep;
    std::map<std::string, double> fixed;
    int repeats = 1;
    int cutoff = kDefaultCutoff;

    Target target() const {
        return interferometer == Interferometer::SU2 ? Target::PhaseDifference : Target::PhaseSum;
    }
};

// Fully resolved inputs for one evaluation.
struct PointInputs {
    InterferometerInput input;
    double eta_a = 1.0;
    double eta_b = 1.0;
    std::optional<double> gamma_a;  // fixed gamma; optimized when absent
    std::optional<double> gamma_b;
};

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

struct Record {
    double swept_value = kMissing;
    ModeStatistics stats{kMissing, kMissing, kMissing, kMissing, kMissing};
    FisherMatrix matrix{kMissing, kMissing, kMissing};
    double info_single = kMissing;
    double info_two = kMissing;
    double delta_f = kMissing;
    double gamma_opt_analytic = kMissing;
    double gamma_opt_numeric = kMissing;
    double gamma_b_numeric = kMissing;
    double info_optimal = kMissing;
    double qcrb_single = kMissing;
    double qcrb_two = kMissing;
    std::string error;
};

ScanSpec parse_spec(const nlohmann::json& doc);
nlohmann::json spec_to_json(const ScanSpec& spec);
PointInputs resolve_point(const ScanSpec& spec, std::optional<double> swept_value);

Record run_point(const ScanSpec& spec, std::optional<double> swept_value = std::nullopt);
// Rows in sweep order regardless of jobs.
std::vector<Record> run_scan(const ScanSpec& spec, int jobs = 1);

std::vector<std::string> csv_columns(const ScanSpec& spec);
std::string csv_text(const ScanSpec& spec, const std::vector<Record>& rows);
nlohmann::json record_to_json(const ScanSpec& spec, const Record& rec);
nlohmann::json scan_metadata(const ScanSpec& spec, const std::vector<Record>& rows);
// Writes the CSV and the companion metadata file; returns the metadata path.
std::string write_scan(const ScanSpec& spec, const std::vector<Record>& rows, const std::string& csv_path);

// Shortest decimal text that parses back to the same double; empty for NaN.
std::string format_double(double x);

struct OracleLine {
    std::string identity;
    double closed_form;
    double oracle;
    double rel_error;
    double tolerance;
    bool pass;
};

struct OracleReport {
    std::vector<OracleLine> lines;
    bool cutoff_too_small = false;
    std::string failure;

    bool pass() const;
    std::string text() const;
};

struct OracleTolerances {
    double moments = 1e-6;
    double kraus = 1e-8;
    double completeness = 1e-10;
};

OracleReport oracle_check(const ScanSpec& spec, const OracleTolerances& tol = {});

// Error classification used for exit codes and row messages.
const char* error_kind(const std::exception& e);

int run_cli(int argc, char** argv);

}  // namespace qcrb::app
