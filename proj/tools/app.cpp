#include "app.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

namespace qcrb::app {

using nlohmann::json;

namespace {

const std::vector<std::string> kFixedKeys = {"alpha", "alpha_photons", "r",     "T",       "splitter_ratio",
                                             "G",     "eta",           "eta_a", "eta_b",   "gamma",
                                             "gamma_b"};

template <class Enum>
struct Named {
    const char* name;
    Enum value;
};

const Named<Interferometer> kInterferometers[] = {{"SU2", Interferometer::SU2}, {"SU11", Interferometer::SU11}};
const Named<Estimation> kEstimations[] = {{"single", Estimation::SingleParameter},
                                          {"two", Estimation::TwoParameter}};
const Named<LossModel> kLosses[] = {
    {"none", LossModel::None}, {"one_arm", LossModel::OneArm}, {"two_arm", LossModel::TwoArm}};
const Named<TwoArmGamma> kTwoArmGammas[] = {{"symmetric", TwoArmGamma::Symmetric},
                                            {"independent", TwoArmGamma::Independent}};
const Named<GammaDomain> kDomains[] = {{"bounded", GammaDomain::Bounded}, {"whole_line", GammaDomain::WholeLine}};
const Named<SweepVariable> kSweepVariables[] = {{"alpha_photons", SweepVariable::AlphaPhotons},
                                                {"eta", SweepVariable::Eta},
                                                {"splitter_ratio", SweepVariable::SplitterRatio},
                                                {"gain", SweepVariable::Gain}};
const Named<Spacing> kSpacings[] = {{"linear", Spacing::Linear}, {"log", Spacing::Log}};

template <class Enum, std::size_t N>
Enum parse_enum(const json& v, const Named<Enum> (&table)[N], const std::string& key) {
    if (!v.is_string()) throw ConfigError("'" + key + "' must be a string");
    const auto s = v.get<std::string>();
    for (const auto& e : table)
        if (s == e.name) return e.value;
    std::string allowed;
    for (const auto& e : table) allowed += std::string(allowed.empty() ? "" : ", ") + e.name;
    throw ConfigError("'" + key + "' has unknown value '" + s + "' (allowed: " + allowed + ")");
}

template <class Enum, std::size_t N>
const char* enum_name(Enum value, const Named<Enum> (&table)[N]) {
    for (const auto& e : table)
        if (e.value == value) return e.name;
    return "?";
}

double parse_number(const json& v, const std::string& key) {
    if (!v.is_number()) throw ConfigError("'" + key + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError("'" + key + "' must be finite");
    return x;
}

int parse_int(const json& v, const std::string& key) {
    if (!v.is_number_integer()) throw ConfigError("'" + key + "' must be an integer");
    return v.get<int>();
}

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; }))
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
}

std::optional<double> fixed_value(const ScanSpec& spec, const std::string& key) {
    const auto it = spec.fixed.find(key);
    if (it == spec.fixed.end()) return std::nullopt;
    return it->second;
}

void require_range(double x, double lo, double hi, const std::string& what) {
    if (!(x >= lo && x <= hi))
        throw ConfigError(what + " = " + format_double(x) + " is outside [" + format_double(lo) + ", " +
                          format_double(hi) + "]");
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

json number_or_null(double x) { return std::isnan(x) ? json(nullptr) : json(x); }

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string swept_context(std::optional<double> swept) {
    return swept ? " (at swept_value=" + format_double(*swept) + ")" : std::string();
}

}  // namespace

std::vector<double> SweepRange::values() const {
    std::vector<double> out(steps);
    for (int i = 0; i < steps; ++i) {
        const double f = static_cast<double>(i) / (steps - 1);
        if (i == steps - 1)
            out[i] = stop;
        else if (spacing == Spacing::Log)
            out[i] = start * std::pow(stop / start, f);
        else
            out[i] = (start * (steps - 1 - i) + stop * i) / (steps - 1);
    }
    return out;
}

const char* error_kind(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return "InvalidConfig";
    if (dynamic_cast<const CutoffTooSmall*>(&e)) return "CutoffTooSmall";
    if (dynamic_cast<const AssumptionViolation*>(&e)) return "AssumptionViolation";
    if (dynamic_cast<const DegenerateStatistics*>(&e)) return "DegenerateStatistics";
    if (dynamic_cast<const SingularComplement*>(&e)) return "SingularComplement";
    if (dynamic_cast<const NonpositiveInformation*>(&e)) return "NonpositiveInformation";
    if (dynamic_cast<const NonFiniteObjective*>(&e)) return "NonFiniteObjective";
    if (dynamic_cast<const InvalidArgument*>(&e)) return "InvalidArgument";
    return "Error";
}

ScanSpec parse_spec(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown(doc,
                   {"interferometer", "estimation", "loss", "two_arm_gamma", "gamma_domain", "sweep", "fixed",
                    "repeats", "cutoff"},
                   "config");
    ScanSpec spec;
    if (!doc.contains("interferometer")) throw ConfigError("'interferometer' is required");
    spec.interferometer = parse_enum(doc["interferometer"], kInterferometers, "interferometer");
    if (doc.contains("estimation")) spec.estimation = parse_enum(doc["estimation"], kEstimations, "estimation");
    if (doc.contains("loss")) spec.loss = parse_enum(doc["loss"], kLosses, "loss");
    if (doc.contains("two_arm_gamma"))
        spec.two_arm_gamma = parse_enum(doc["two_arm_gamma"], kTwoArmGammas, "two_arm_gamma");
    if (doc.contains("gamma_domain")) spec.gamma_domain = parse_enum(doc["gamma_domain"], kDomains, "gamma_domain");
    if (doc.contains("repeats")) spec.repeats = parse_int(doc["repeats"], "repeats");
    if (doc.contains("cutoff")) spec.cutoff = parse_int(doc["cutoff"], "cutoff");

    if (doc.contains("fixed")) {
        const json& fixed = doc["fixed"];
        if (!fixed.is_object()) throw ConfigError("'fixed' must be an object");
        for (auto it = fixed.begin(); it != fixed.end(); ++it) {
            if (std::find(kFixedKeys.begin(), kFixedKeys.end(), it.key()) == kFixedKeys.end())
                throw ConfigError("unknown fixed parameter '" + it.key() + "'");
            spec.fixed[it.key()] = parse_number(it.value(), "fixed." + it.key());
        }
    }

    if (doc.contains("sweep") && !doc["sweep"].is_null()) {
        const json& s = doc["sweep"];
        if (!s.is_object()) throw ConfigError("'sweep' must be an object");
        reject_unknown(s, {"variable", "start", "stop", "steps", "spacing"}, "sweep");
        for (const char* k : {"variable", "start", "stop", "steps"})
            if (!s.contains(k)) throw ConfigError(std::string("'sweep.") + k + "' is required");
        SweepRange r;
        r.variable = parse_enum(s["variable"], kSweepVariables, "sweep.variable");
        r.start = parse_number(s["start"], "sweep.start");
        r.stop = parse_number(s["stop"], "sweep.stop");
        r.steps = parse_int(s["steps"], "sweep.steps");
        if (s.contains("spacing")) r.spacing = parse_enum(s["spacing"], kSpacings, "sweep.spacing");
        spec.sweep = r;
    }

    // Structural checks; value checks run by resolving the range endpoints.
    if (spec.repeats < 1) throw ConfigError("'repeats' must be >= 1");
    if (spec.cutoff < 1) throw ConfigError("'cutoff' must be >= 1");
    if (spec.sweep) {
        const SweepRange& r = *spec.sweep;
        if (!(r.start < r.stop)) throw ConfigError("sweep requires start < stop");
        if (r.steps < 2) throw ConfigError("sweep requires steps >= 2");
        if (r.spacing == Spacing::Log && !(r.start > 0.0)) throw ConfigError("log spacing requires start > 0");
        resolve_point(spec, r.start);
        resolve_point(spec, r.stop);
    } else {
        resolve_point(spec, std::nullopt);
    }
    return spec;
}

json spec_to_json(const ScanSpec& spec) {
    json j;
    j["interferometer"] = enum_name(spec.interferometer, kInterferometers);
    j["estimation"] = enum_name(spec.estimation, kEstimations);
    j["loss"] = enum_name(spec.loss, kLosses);
    j["two_arm_gamma"] = enum_name(spec.two_arm_gamma, kTwoArmGammas);
    j["gamma_domain"] = enum_name(spec.gamma_domain, kDomains);
    j["repeats"] = spec.repeats;
    j["cutoff"] = spec.cutoff;
    j["fixed"] = json::object();
    for (const auto& [k, v] : spec.fixed) j["fixed"][k] = v;
    if (spec.sweep) {
        j["sweep"] = {{"variable", enum_name(spec.sweep->variable, kSweepVariables)},
                      {"start", spec.sweep->start},
                      {"stop", spec.sweep->stop},
                      {"steps", spec.sweep->steps},
                      {"spacing", enum_name(spec.sweep->spacing, kSpacings)}};
    } else {
        j["sweep"] = nullptr;
    }
    return j;
}

PointInputs resolve_point(const ScanSpec& spec, std::optional<double> swept) {
    const bool su2 = spec.interferometer == Interferometer::SU2;
    const bool has_sweep = swept && spec.sweep;
    auto is_swept = [&](SweepVariable v) { return has_sweep && spec.sweep->variable == v; };

    PointInputs p;

    // Coherent amplitude.
    const auto alpha = fixed_value(spec, "alpha");
    const auto photons = fixed_value(spec, "alpha_photons");
    if (alpha && photons) throw ConfigError("give either fixed.alpha or fixed.alpha_photons, not both");
    double n_alpha = 0.0;
    if (is_swept(SweepVariable::AlphaPhotons)) {
        n_alpha = *swept;
    } else if (photons) {
        n_alpha = *photons;
    } else if (alpha) {
        require_range(*alpha, 0.0, INFINITY, "alpha");
        n_alpha = *alpha * *alpha;
    } else {
        throw ConfigError("coherent amplitude missing: set fixed.alpha or fixed.alpha_photons, or sweep it");
    }
    require_range(n_alpha, 0.0, INFINITY, "alpha_photons");
    p.input.alpha_mag = alpha && !is_swept(SweepVariable::AlphaPhotons) ? *alpha : std::sqrt(n_alpha);

    const auto r = fixed_value(spec, "r");
    if (!r) throw ConfigError("squeezing missing: set fixed.r");
    require_range(*r, 0.0, INFINITY, "r");
    p.input.squeeze_r = *r;

    // Splitter.
    if (su2) {
        if (is_swept(SweepVariable::Gain)) throw ConfigError("SU2 uses a linear splitter; sweep splitter_ratio instead of gain");
        if (fixed_value(spec, "G")) throw ConfigError("fixed.G applies to SU11 only");
        const auto t = fixed_value(spec, "T");
        const auto ratio = fixed_value(spec, "splitter_ratio");
        if (t && ratio) throw ConfigError("give either fixed.T or fixed.splitter_ratio, not both");
        double transmissivity;
        if (is_swept(SweepVariable::SplitterRatio)) {
            require_range(*swept, 0.0, INFINITY, "splitter_ratio");
            transmissivity = 1.0 / (1.0 + *swept);
        } else if (ratio) {
            require_range(*ratio, 0.0, INFINITY, "splitter_ratio");
            transmissivity = 1.0 / (1.0 + *ratio);
        } else if (t) {
            transmissivity = *t;
        } else {
            throw ConfigError("splitter missing: set fixed.T or fixed.splitter_ratio, or sweep splitter_ratio");
        }
        require_range(transmissivity, 0.0, 1.0, "T");
        p.input.splitter = LinearSplitter{transmissivity};
    } else {
        if (is_swept(SweepVariable::SplitterRatio))
            throw ConfigError("SU11 uses a nonlinear splitter; sweep gain instead of splitter_ratio");
        if (fixed_value(spec, "T") || fixed_value(spec, "splitter_ratio"))
            throw ConfigError("fixed.T and fixed.splitter_ratio apply to SU2 only");
        double gain;
        if (is_swept(SweepVariable::Gain))
            gain = *swept;
        else if (const auto g = fixed_value(spec, "G"))
            gain = *g;
        else
            throw ConfigError("gain missing: set fixed.G or sweep gain");
        require_range(gain, 1.0, INFINITY, "G");
        p.input.splitter = NonlinearSplitter{gain};
    }

    // Loss.
    if (spec.loss == LossModel::None) {
        if (is_swept(SweepVariable::Eta)) throw ConfigError("sweeping eta requires loss one_arm or two_arm");
        for (const char* k : {"eta", "eta_a", "eta_b", "gamma", "gamma_b"})
            if (fixed_value(spec, k)) throw ConfigError(std::string("fixed.") + k + " requires a loss model");
        return p;
    }
    const auto eta = fixed_value(spec, "eta");
    const auto eta_a = fixed_value(spec, "eta_a");
    const auto eta_b = fixed_value(spec, "eta_b");
    if (eta && eta_a) throw ConfigError("give either fixed.eta or fixed.eta_a, not both");
    if (is_swept(SweepVariable::Eta)) {
        if (eta_a || eta_b) throw ConfigError("fixed.eta_a/eta_b conflict with an eta sweep");
        p.eta_a = p.eta_b = *swept;
    } else if (eta || eta_a) {
        p.eta_a = eta ? *eta : *eta_a;
        p.eta_b = eta ? *eta : p.eta_a;
    } else {
        throw ConfigError("loss transmission missing: set fixed.eta or sweep eta");
    }
    if (spec.loss == LossModel::OneArm) {
        if (eta_b) throw ConfigError("fixed.eta_b requires loss two_arm");
        if (fixed_value(spec, "gamma_b")) throw ConfigError("fixed.gamma_b requires loss two_arm");
        p.eta_b = 1.0;
    } else if (eta_b) {
        p.eta_b = *eta_b;
    }
    require_range(p.eta_a, 0.0, 1.0, "eta_a");
    require_range(p.eta_b, 0.0, 1.0, "eta_b");
    if (spec.loss == LossModel::TwoArm && spec.two_arm_gamma == TwoArmGamma::Symmetric && p.eta_a != p.eta_b)
        throw ConfigError("symmetric two-arm gamma requires eta_a == eta_b; use two_arm_gamma = independent");

    p.gamma_a = fixed_value(spec, "gamma");
    p.gamma_b = fixed_value(spec, "gamma_b");
    if (p.gamma_b && !p.gamma_a) throw ConfigError("fixed.gamma_b requires fixed.gamma");
    if (spec.loss == LossModel::TwoArm && p.gamma_a && !p.gamma_b) p.gamma_b = p.gamma_a;
    return p;
}

namespace {

void evaluate(const ScanSpec& spec, std::optional<double> swept, Record& rec) {
    const PointInputs p = resolve_point(spec, swept);
    const Target target = spec.target();
    rec.stats = splitter_moments(p.input);
    const ModeStatistics& s = rec.stats;

    if (spec.loss == LossModel::None) {
        rec.matrix = qfim_matrix(s);
        rec.info_single = single_param_info(rec.matrix, target);
        rec.info_two = two_param_bound(rec.matrix, target);
        rec.delta_f = overestimation(rec.matrix, target);
    } else {
        auto matrix_at = [&](double ga, double gb) {
            if (spec.loss == LossModel::OneArm) return c_matrix_single(s, {p.eta_a, ga});
            return c_matrix_two(s, {p.eta_a, p.eta_b, ga, gb});
        };
        if (p.gamma_a) {
            rec.matrix = matrix_at(*p.gamma_a, p.gamma_b.value_or(0.0));
            rec.info_single = single_param_info(rec.matrix, target);
            rec.info_two = c_bound(rec.matrix, target);
            rec.delta_f = overestimation(rec.matrix, target);
        } else {
            LossFamily family;
            if (spec.loss == LossModel::OneArm)
                family = SingleArmFamily{p.eta_a};
            else if (spec.two_arm_gamma == TwoArmGamma::Symmetric)
                family = TwoArmSymmetricFamily{p.eta_a};
            else
                family = TwoArmIndependentFamily{p.eta_a, p.eta_b};
            const GammaOptimum two =
                optimize_gamma(s, family, target, {Estimation::TwoParameter, spec.gamma_domain, 1e-8});
            const GammaOptimum single =
                optimize_gamma(s, family, target, {Estimation::SingleParameter, spec.gamma_domain, 1e-8});
            const GammaOptimum& chosen = spec.estimation == Estimation::TwoParameter ? two : single;
            rec.gamma_opt_numeric = chosen.result.argmin;
            if (spec.loss == LossModel::TwoArm) rec.gamma_b_numeric = chosen.gamma_b;
            rec.matrix = matrix_at(chosen.result.argmin, chosen.gamma_b);
            rec.info_single = single.result.minimum;
            rec.info_two = two.result.minimum;
            rec.delta_f = overestimation(rec.matrix, target);
            if (spec.loss == LossModel::OneArm && spec.estimation == Estimation::TwoParameter && p.eta_a > 0.0 &&
                p.eta_a < 1.0) {
                try {
                    rec.gamma_opt_analytic = gamma_opt_single(s, p.eta_a, target);
                } catch (const DegenerateStatistics&) {
                    // No analytic stationary point for these statistics.
                }
            }
        }
    }
    rec.info_optimal = spec.estimation == Estimation::TwoParameter ? rec.info_two : rec.info_single;
    rec.qcrb_single = qcrb_delta_phi(rec.info_single, spec.repeats);
    rec.qcrb_two = qcrb_delta_phi(rec.info_two, spec.repeats);
}

}  // namespace

Record run_point(const ScanSpec& spec, std::optional<double> swept) {
    Record rec;
    if (swept) rec.swept_value = *swept;
    try {
        evaluate(spec, swept, rec);
    } catch (const std::exception& e) {
        rec.error = std::string(error_kind(e)) + ": " + e.what() + swept_context(swept);
    }
    return rec;
}

std::vector<Record> run_scan(const ScanSpec& spec, int jobs) {
    if (!spec.sweep) return {run_point(spec)};
    const std::vector<double> values = spec.sweep->values();
    std::vector<Record> rows(values.size());
    const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(values.size())));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < values.size(); i = next++) rows[i] = run_point(spec, values[i]);
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    return rows;
}

std::vector<std::string> csv_columns(const ScanSpec& spec) {
    const std::string m = spec.loss == LossModel::None ? "f_" : "c_";
    return {"swept_value", "mean_a", "mean_b", "var_a", "var_b", "cov", m + "pp", m + "mm", m + "pm",
            "info_single", "info_two", "delta_f", "gamma_opt_analytic", "gamma_opt_numeric", "info_optimal",
            "qcrb_single", "qcrb_two", "error"};
}

std::string format_double(double x) {
    if (std::isnan(x)) return "";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string csv_text(const ScanSpec& spec, const std::vector<Record>& rows) {
    std::string out;
    const auto cols = csv_columns(spec);
    for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
    out += '\n';
    for (const Record& r : rows) {
        const double v[] = {r.swept_value,      r.stats.mean_a,    r.stats.mean_b,      r.stats.var_a,
                            r.stats.var_b,      r.stats.cov,       r.matrix.pp,         r.matrix.mm,
                            r.matrix.pm,        r.info_single,     r.info_two,          r.delta_f,
                            r.gamma_opt_analytic, r.gamma_opt_numeric, r.info_optimal, r.qcrb_single,
                            r.qcrb_two};
        for (double x : v) out += format_double(x) + ',';
        out += csv_escape(r.error) + '\n';
    }
    return out;
}

json record_to_json(const ScanSpec& spec, const Record& r) {
    const auto cols = csv_columns(spec);
    const double v[] = {r.swept_value,       r.stats.mean_a,      r.stats.mean_b, r.stats.var_a, r.stats.var_b,
                        r.stats.cov,         r.matrix.pp,         r.matrix.mm,    r.matrix.pm,   r.info_single,
                        r.info_two,          r.delta_f,           r.gamma_opt_analytic,
                        r.gamma_opt_numeric, r.info_optimal,      r.qcrb_single,  r.qcrb_two};
    json j = json::object();
    for (std::size_t i = 0; i + 1 < cols.size(); ++i) j[cols[i]] = number_or_null(v[i]);
    j["gamma_b_numeric"] = number_or_null(r.gamma_b_numeric);
    j["target"] = to_string(spec.target());
    j["estimation"] = to_string(spec.estimation);
    j["error"] = r.error.empty() ? json(nullptr) : json(r.error);
    return j;
}

json scan_metadata(const ScanSpec& spec, const std::vector<Record>& rows) {
    const auto errors = std::count_if(rows.begin(), rows.end(), [](const Record& r) { return !r.error.empty(); });
    return {{"library_version", kVersion},
            {"columns", csv_columns(spec)},
            {"spec", spec_to_json(spec)},
            {"target", to_string(spec.target())},
            {"tolerances",
             {{"schur_relative", 1e-12},
              {"gamma_abs_tol", 1e-8},
              {"gamma_bounded_interval", {kGammaLo, kGammaHi}},
              {"gamma_whole_line_limit", kWholeLineLimit},
              {"grid_points", kGridPoints},
              {"evaluation_budget", kEvaluationBudget}}},
            {"rows", rows.size()},
            {"rows_with_errors", errors},
            {"timestamp", utc_timestamp()}};
}

std::string write_scan(const ScanSpec& spec, const std::vector<Record>& rows, const std::string& csv_path) {
    {
        std::ofstream out(csv_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open '" + csv_path + "' for writing");
        out << csv_text(spec, rows);
        if (!out) throw std::runtime_error("failed writing '" + csv_path + "'");
    }
    const std::string meta_path = std::filesystem::path(csv_path).replace_extension(".meta.json").string();
    std::ofstream meta(meta_path);
    if (!meta) throw std::runtime_error("cannot open '" + meta_path + "' for writing");
    meta << scan_metadata(spec, rows).dump(2) << '\n';
    if (!meta) throw std::runtime_error("failed writing '" + meta_path + "'");
    return meta_path;
}

bool OracleReport::pass() const {
    return !cutoff_too_small && failure.empty() &&
           std::all_of(lines.begin(), lines.end(), [](const OracleLine& l) { return l.pass; });
}

std::string OracleReport::text() const {
    std::ostringstream os;
    os << "identity,closed_form,oracle,rel_error,tolerance,status\n";
    for (const auto& l : lines)
        os << l.identity << ',' << format_double(l.closed_form) << ',' << format_double(l.oracle) << ','
           << format_double(l.rel_error) << ',' << format_double(l.tolerance) << ','
           << (l.pass ? "PASS" : "FAIL") << '\n';
    if (cutoff_too_small) os << "CUTOFF_TOO_SMALL: " << failure << '\n';
    else if (!failure.empty()) os << "ERROR: " << failure << '\n';
    os << "overall," << (pass() ? "PASS" : "FAIL") << '\n';
    return os.str();
}

namespace {

// Errors are normalized by the largest magnitude in the group, so entries that
// vanish analytically (a zero covariance, a zero off-diagonal) are judged on the
// scale of their companions.
void add_group(OracleReport& rep, const std::string& prefix, const std::vector<std::string>& names,
               const std::vector<double>& closed, const std::vector<double>& oracle, double tol, double floor = 0.0) {
    double scale = floor;
    for (std::size_t i = 0; i < closed.size(); ++i) scale = std::max({scale, std::abs(closed[i]), std::abs(oracle[i])});
    for (std::size_t i = 0; i < closed.size(); ++i) {
        const double diff = std::abs(closed[i] - oracle[i]);
        const double rel = scale > 0.0 ? diff / scale : diff;
        rep.lines.push_back({prefix + ":" + names[i], closed[i], oracle[i], rel, tol, rel <= tol});
    }
}

std::vector<double> moment_vector(const ModeStatistics& s) {
    return {s.mean_a, s.mean_b, s.var_a, s.var_b, s.cov};
}

std::vector<double> matrix_vector(const FisherMatrix& m) { return {m.pp, m.mm, m.pm}; }

}  // namespace

OracleReport oracle_check(const ScanSpec& spec, const OracleTolerances& tol) {
    OracleReport rep;
    const PointInputs p = resolve_point(spec, std::nullopt);
    const ModeStatistics closed = splitter_moments(p.input);
    const std::vector<std::string> moment_names = {"mean_a", "mean_b", "var_a", "var_b", "cov"};
    const std::vector<std::string> matrix_names = {"pp", "mm", "pm"};
    try {
        const TruncatedState state = oracle_state(p.input, spec.cutoff);
        const ModeStatistics measured = measure_moments(state);
        add_group(rep, "moments", moment_names, moment_vector(closed), moment_vector(measured), tol.moments);

        if (closed.mean_a > 0 && closed.mean_b > 0 && closed.var_a > 0 && closed.var_b > 0) {
            const Correlations cc = derived_correlations(closed);
            const Correlations mc = derived_correlations(measured);
            // Q and J are dimensionless and may vanish; the unit floor keeps them comparable.
            add_group(rep, "correlations", {"Q_a", "Q_b", "J"}, {cc.mandel_q_a, cc.mandel_q_b, cc.correlation_j},
                      {mc.mandel_q_a, mc.mandel_q_b, mc.correlation_j}, tol.moments, 1.0);
        }

        add_group(rep, "qfim", matrix_names, matrix_vector(qfim_matrix(closed)), matrix_vector(derivative_qfim(state)),
                  tol.moments);

        if (spec.loss != LossModel::None) {
            const double ga = p.gamma_a.value_or(0.0);
            TwoArmLoss two{p.eta_a, p.eta_b, ga, p.gamma_b.value_or(ga)};
            FisherMatrix c, k;
            if (spec.loss == LossModel::OneArm) {
                two = {p.eta_a, 1.0, ga, 0.0};
                c = c_matrix_single(measured, {p.eta_a, ga});
                k = kraus_sum_cij(state, SingleArmLoss{p.eta_a, ga});
            } else {
                c = c_matrix_two(measured, two);
                k = kraus_sum_cij(state, two);
            }
            add_group(rep, "kraus", matrix_names, matrix_vector(c), matrix_vector(k), tol.kraus);
            const double complete = kraus_completeness(state, two);
            const double diff = std::abs(complete - 1.0);
            rep.lines.push_back({"kraus:completeness", 1.0, complete, diff, tol.completeness, diff <= tol.completeness});
        }

        const TruncatedState doubled = oracle_state(p.input, 2 * spec.cutoff);
        add_group(rep, "convergence", moment_names, moment_vector(measured), moment_vector(measure_moments(doubled)),
                  tol.moments);
    } catch (const CutoffTooSmall& e) {
        rep.cutoff_too_small = true;
        rep.failure = e.what();
    }
    return rep;
}

namespace {

json load_config(const std::string& path) {
    std::string text;
    if (path == "-") {
        text.assign(std::istreambuf_iterator<char>(std::cin), {});
    } else {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot read config '" + path + "'");
        text.assign(std::istreambuf_iterator<char>(in), {});
    }
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
}

const char* kKeyHelp = R"(Config keys (JSON object, read from --config <path|->):
  interferometer   "SU2" (linear splitter, phase difference) | "SU11" (nonlinear splitter, phase sum)
  estimation       "two" (default) | "single"; selects info_optimal and the reported gamma
  loss             "none" (default) | "one_arm" | "two_arm"
  two_arm_gamma    "symmetric" (default, gamma_a = gamma_b) | "independent"
  gamma_domain     "bounded" (default, gamma in [-1.5, 0.5]) | "whole_line"
  repeats          integer m >= 1 (default 1); --repeats overrides
  cutoff           Fock cutoff for oracle-check (default 64); convergence is checked at twice this
  sweep            {"variable": "alpha_photons" | "eta" | "splitter_ratio" | "gain",
                    "start": x, "stop": y, "steps": n >= 2, "spacing": "linear" | "log"}
  fixed            parameters not swept:
                     alpha | alpha_photons   coherent amplitude |alpha| or photon number |alpha|^2
                     r                       squeezing amplitude
                     T | splitter_ratio      SU2 transmissivity or R/T
                     G                       SU11 gain
                     eta, eta_a, eta_b       arm transmissions (eta sets both arms for two_arm)
                     gamma, gamma_b          evaluate at this gamma instead of optimizing
Exit codes: 0 ok, 1 invalid config, 2 computation error, 3 oracle failure.)";

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App cli{"Two-parameter quantum Cramer-Rao bounds for SU(2) and SU(1,1) interferometers"};
    cli.footer(kKeyHelp);
    cli.require_subcommand(1);

    std::string config_path, output_path;
    int jobs = 1;
    int repeats = 0;
    double tolerance = 0.0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file, or - for standard input")->required();
        sub->add_option("--output", output_path, "output path");
        sub->add_option("--repeats", repeats, "number of repeats m (overrides config)")->check(CLI::PositiveNumber);
    };
    CLI::App* point = cli.add_subcommand("point", "evaluate one parameter point, print a JSON record");
    add_common(point);
    CLI::App* scan = cli.add_subcommand("scan", "sweep one parameter, write CSV plus <output>.meta.json");
    add_common(scan);
    scan->add_option("--jobs", jobs, "concurrent sweep points")->check(CLI::PositiveNumber);
    scan->get_option("--output")->required();
    CLI::App* oracle = cli.add_subcommand("oracle-check", "compare closed forms with the truncated Fock oracle");
    add_common(oracle);
    oracle->add_option("--tolerance", tolerance, "relative tolerance for every identity")
        ->check(CLI::PositiveNumber);

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.exit(e);
        return code == 0 ? kExitOk : kExitInvalidConfig;
    }

    ScanSpec spec;
    try {
        spec = parse_spec(load_config(config_path));
        if (repeats > 0) spec.repeats = repeats;
    } catch (const ConfigError& e) {
        std::cerr << "invalid config: " << e.what() << '\n';
        return kExitInvalidConfig;
    }

    try {
        if (point->parsed()) {
            if (spec.sweep) {
                std::cerr << "invalid config: point does not take a sweep\n";
                return kExitInvalidConfig;
            }
            Record rec;
            try {
                evaluate(spec, std::nullopt, rec);
            } catch (const InvalidArgument& e) {
                std::cerr << "invalid config: " << e.what() << '\n';
                return kExitInvalidConfig;
            } catch (const Error& e) {
                std::cerr << error_kind(e) << ": " << e.what() << '\n';
                return kExitComputation;
            }
            const std::string text = record_to_json(spec, rec).dump(2) + "\n";
            if (output_path.empty()) {
                std::cout << text;
            } else {
                std::ofstream out(output_path);
                if (!(out << text)) throw std::runtime_error("cannot write '" + output_path + "'");
            }
            return kExitOk;
        }
        if (scan->parsed()) {
            if (!spec.sweep) {
                std::cerr << "invalid config: scan requires a sweep\n";
                return kExitInvalidConfig;
            }
            const auto rows = run_scan(spec, jobs);
            const std::string meta = write_scan(spec, rows, output_path);
            const auto errors = std::count_if(rows.begin(), rows.end(), [](const Record& r) { return !r.error.empty(); });
            std::cerr << "wrote " << rows.size() << " rows to " << output_path << " (metadata " << meta << ")";
            if (errors) std::cerr << "; " << errors << " rows carry errors";
            std::cerr << '\n';
            return kExitOk;
        }
        // oracle-check
        if (spec.sweep) {
            std::cerr << "invalid config: oracle-check evaluates a single point\n";
            return kExitInvalidConfig;
        }
        OracleTolerances tol;
        if (tolerance > 0.0) tol.moments = tol.kraus = tol.completeness = tolerance;
        OracleReport rep;
        try {
            rep = oracle_check(spec, tol);
        } catch (const InvalidArgument& e) {
            std::cerr << "invalid config: " << e.what() << '\n';
            return kExitInvalidConfig;
        }
        const std::string text = rep.text();
        if (output_path.empty()) {
            std::cout << text;
        } else {
            std::ofstream out(output_path);
            if (!(out << text)) throw std::runtime_error("cannot write '" + output_path + "'");
        }
        return rep.pass() ? kExitOk : kExitOracleFailure;
    } catch (const ConfigError& e) {
        std::cerr << "invalid config: " << e.what() << '\n';
        return kExitInvalidConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitComputation;
    }
}

}  // namespace qcrb::app
