#include "qcrb/fock_oracle.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <algorithm>
#include <cmath>
#include <string>

#include "qcrb/errors.hpp"

namespace qcrb {

namespace {

using cplx = std::complex<double>;

void check_cutoff(int cutoff) {
    if (cutoff < 1) throw InvalidArgument("cutoff must be >= 1");
}

// Extra rows kept while the generator acts, so that population near the cutoff
// is not reflected back by the truncated operator.
int padding_for(int cutoff) { return std::max(8, cutoff / 2); }

// sqrt(C(m + l, l) (1 - eta)^l eta^m)
double kraus_weight(int m, int l, double eta) {
    if (eta >= 1.0) return l == 0 ? 1.0 : 0.0;
    if (eta <= 0.0) return m == 0 ? 1.0 : 0.0;
    const double log_binom = std::lgamma(m + l + 1.0) - std::lgamma(l + 1.0) - std::lgamma(m + 1.0);
    return std::exp(0.5 * (log_binom + l * std::log1p(-eta) + m * std::log(eta)));
}

std::vector<double> populations(const TruncatedState& s) {
    std::vector<double> p(s.amplitudes.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(s.amplitudes[i]);
    return p;
}

// Accumulates 4 * covariance of the (+, -) exponent operators over a weighted set.
struct ExponentMoments {
    double weight = 0.0, sum_p = 0.0, sum_m = 0.0;
    double pp = 0.0, mm = 0.0, pm = 0.0;

    void add(double w, double kp, double km) {
        weight += w;
        sum_p += w * kp;
        sum_m += w * km;
    }
    void add_centered(double w, double kp, double km, double mean_p, double mean_m) {
        const double dp = kp - mean_p;
        const double dm = km - mean_m;
        pp += w * dp * dp;
        mm += w * dm * dm;
        pm += w * dp * dm;
    }
};

// Two passes over (weight, k+, k-) triples; emit(f) calls f(w, kp, km) for every term.
template <class Emit>
FisherMatrix exponent_covariance(Emit&& emit) {
    ExponentMoments acc;
    emit([&](double w, double kp, double km) { acc.add(w, kp, km); });
    if (!(acc.weight > 0.0)) return {};
    const double mp = acc.sum_p / acc.weight;
    const double mm = acc.sum_m / acc.weight;
    emit([&](double w, double kp, double km) { acc.add_centered(w, kp, km, mp, mm); });
    return {4.0 * acc.pp / acc.weight, 4.0 * acc.mm / acc.weight, 4.0 * acc.pm / acc.weight};
}

}  // namespace

double TruncatedState::norm_sq() const {
    double n = 0.0;
    for (const auto& a : amplitudes) n += std::norm(a);
    return n;
}

TruncatedState vacuum_state(int cutoff) {
    check_cutoff(cutoff);
    TruncatedState s{cutoff, std::vector<cplx>(static_cast<std::size_t>(cutoff + 1) * (cutoff + 1))};
    s.at(0, 0) = 1.0;
    return s;
}

TruncatedState prepare_input(double alpha_mag, double squeeze_r, int cutoff) {
    check_cutoff(cutoff);
    if (!(alpha_mag >= 0.0 && std::isfinite(alpha_mag))) throw InvalidArgument("alpha_mag must be >= 0");
    if (!(squeeze_r >= 0.0 && std::isfinite(squeeze_r))) throw InvalidArgument("squeeze_r must be >= 0");

    std::vector<double> coherent(cutoff + 1, 0.0);
    coherent[0] = std::exp(-0.5 * alpha_mag * alpha_mag);
    for (int n = 1; n <= cutoff; ++n) coherent[n] = coherent[n - 1] * alpha_mag / std::sqrt(double(n));

    std::vector<double> squeezed(cutoff + 1, 0.0);
    squeezed[0] = 1.0 / std::sqrt(std::cosh(squeeze_r));
    const double t = -std::tanh(squeeze_r);
    for (int n = 2; n <= cutoff; n += 2)
        squeezed[n] = squeezed[n - 2] * t * std::sqrt((n - 1.0) / n);

    double norm_a = 0.0, norm_b = 0.0;
    for (double c : coherent) norm_a += c * c;
    for (double c : squeezed) norm_b += c * c;
    const double deficit = 1.0 - norm_a * norm_b;
    if (deficit > kPreparationDeficitLimit)
        throw CutoffTooSmall("input preparation loses " + std::to_string(deficit) +
                                 " of the norm at cutoff " + std::to_string(cutoff),
                             deficit);

    TruncatedState s{cutoff, std::vector<cplx>(static_cast<std::size_t>(cutoff + 1) * (cutoff + 1))};
    for (int na = 0; na <= cutoff; ++na)
        for (int nb = 0; nb <= cutoff; ++nb) s.at(na, nb) = coherent[na] * squeezed[nb];
    return s;
}

TruncatedState apply_splitter(const TruncatedState& state, const SplitterSpec& splitter) {
    const int cutoff = state.cutoff;
    const int w = cutoff + padding_for(cutoff);  // padded grid 0..w
    const bool linear = std::holds_alternative<LinearSplitter>(splitter);

    double angle = 0.0;
    if (linear) {
        const double t = std::get<LinearSplitter>(splitter).transmissivity;
        if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("transmissivity must lie in [0, 1]");
        angle = std::acos(std::sqrt(t));
    } else {
        const double g = std::get<NonlinearSplitter>(splitter).gain;
        if (!(g >= 1.0 && std::isfinite(g))) throw InvalidArgument("gain must be >= 1");
        angle = std::acosh(g);
    }

    TruncatedState out{cutoff, std::vector<cplx>(state.amplitudes.size())};
    double lost = 0.0;
    std::vector<std::pair<int, int>> sites;

    // Linear: blocks of fixed n_a + n_b, coupling a^dag b + a b^dag.
    // Nonlinear: blocks of fixed n_a - n_b, coupling a^dag b^dag + a b.
    const int first = linear ? 0 : -w;
    const int last = linear ? 2 * w : w;
    for (int label = first; label <= last; ++label) {
        sites.clear();
        bool occupied = false;
        if (linear) {
            for (int na = std::max(0, label - w); na <= std::min(label, w); ++na)
                sites.emplace_back(na, label - na);
        } else {
            for (int nb = std::max(0, -label); nb + label <= w && nb <= w; ++nb)
                sites.emplace_back(nb + label, nb);
        }
        const int n = static_cast<int>(sites.size());
        Eigen::VectorXcd v(n);
        for (int k = 0; k < n; ++k) {
            const auto [na, nb] = sites[k];
            v[k] = (na <= cutoff && nb <= cutoff) ? state.at(na, nb) : cplx(0.0);
            if (v[k] != cplx(0.0)) occupied = true;
        }
        if (!occupied) continue;

        Eigen::MatrixXcd gen = Eigen::MatrixXcd::Zero(n, n);
        for (int k = 0; k + 1 < n; ++k) {
            const auto [na, nb] = sites[k];
            // Linear: <na+1, nb-1| a^dag b |na, nb>. Nonlinear: <na+1, nb+1| a^dag b^dag |na, nb>.
            const double elem = linear ? std::sqrt((na + 1.0) * nb) : std::sqrt((na + 1.0) * (nb + 1.0));
            gen(k + 1, k) = cplx(0.0, angle * elem);
            gen(k, k + 1) = cplx(0.0, angle * elem);
        }
        const Eigen::VectorXcd r = gen.exp() * v;
        for (int k = 0; k < n; ++k) {
            const auto [na, nb] = sites[k];
            if (na <= cutoff && nb <= cutoff)
                out.at(na, nb) = r[k];
            else
                lost += std::norm(r[k]);
        }
    }

    const double in_norm = state.norm_sq();
    const double deficit = in_norm > 0.0 ? lost / in_norm : 0.0;
    if (deficit > kSplitterDeficitLimit)
        throw CutoffTooSmall("splitter pushes " + std::to_string(deficit) +
                                 " of the norm beyond cutoff " + std::to_string(cutoff),
                             deficit);
    return out;
}

TruncatedState oracle_state(const InterferometerInput& input, int cutoff) {
    validate(input);
    return apply_splitter(prepare_input(input.alpha_mag, input.squeeze_r, cutoff), input.splitter);
}

ModeStatistics measure_moments(const TruncatedState& state) {
    const auto p = populations(state);
    const int d = state.dim();
    double total = 0.0, sa = 0.0, sb = 0.0;
    for (int na = 0; na < d; ++na)
        for (int nb = 0; nb < d; ++nb) {
            const double w = p[na * d + nb];
            total += w;
            sa += w * na;
            sb += w * nb;
        }
    if (!(total > 0.0)) return {};
    const double ma = sa / total;
    const double mb = sb / total;
    double va = 0.0, vb = 0.0, c = 0.0;
    for (int na = 0; na < d; ++na)
        for (int nb = 0; nb < d; ++nb) {
            const double w = p[na * d + nb];
            va += w * (na - ma) * (na - ma);
            vb += w * (nb - mb) * (nb - mb);
            c += w * (na - ma) * (nb - mb);
        }
    return {ma, mb, va / total, vb / total, c / total};
}

FisherMatrix derivative_qfim(const TruncatedState& state) {
    const int d = state.dim();
    const double norm = state.norm_sq();
    if (!(norm > 0.0)) return {};
    // d psi / d phi_pm = i g_pm psi with g_pm = (n_a +- n_b) / 2.
    std::vector<cplx> dp(state.amplitudes.size()), dm(state.amplitudes.size());
    const cplx i1(0.0, 1.0);
    for (int na = 0; na < d; ++na)
        for (int nb = 0; nb < d; ++nb) {
            const cplx a = state.at(na, nb);
            dp[na * d + nb] = i1 * (0.5 * (na + nb)) * a;
            dm[na * d + nb] = i1 * (0.5 * (na - nb)) * a;
        }
    auto inner = [&](const std::vector<cplx>& x, const std::vector<cplx>& y) {
        cplx s = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) s += std::conj(x[k]) * y[k];
        return s / norm;
    };
    const std::vector<cplx>& psi = state.amplitudes;
    const cplx p_psi = inner(dp, psi);
    const cplx m_psi = inner(dm, psi);
    auto element = [&](const std::vector<cplx>& x, cplx x_psi, const std::vector<cplx>& y, cplx y_psi) {
        return 4.0 * std::real(inner(x, y) - x_psi * std::conj(y_psi));
    };
    return {element(dp, p_psi, dp, p_psi), element(dm, m_psi, dm, m_psi), element(dp, p_psi, dm, m_psi)};
}

FisherMatrix kraus_sum_cij(const TruncatedState& state, const SingleArmLoss& loss) {
    validate(loss);
    const auto p = populations(state);
    const int d = state.dim();
    // Pi_l |n_a, n_b> = w(n_a - l, l) |n_a - l, n_b> up to the phase factor whose
    // exponent operators are k+- = (m +- n_b - gamma l) / 2.
    return exponent_covariance([&](auto&& f) {
        for (int l = 0; l < d; ++l)
            for (int m = 0; m + l < d; ++m) {
                const double w = kraus_weight(m, l, loss.eta_a);
                if (w == 0.0) continue;
                const double w2 = w * w;
                for (int nb = 0; nb < d; ++nb) {
                    const double q = w2 * p[(m + l) * d + nb];
                    if (q == 0.0) continue;
                    f(q, 0.5 * (m + nb - loss.gamma * l), 0.5 * (m - nb - loss.gamma * l));
                }
            }
    });
}

FisherMatrix kraus_sum_cij(const TruncatedState& state, const TwoArmLoss& loss) {
    validate(loss);
    const auto p = populations(state);
    const int d = state.dim();
    std::vector<double> wa(d * d), wb(d * d);  // index m * d + l
    for (int m = 0; m < d; ++m)
        for (int l = 0; m + l < d; ++l) {
            wa[m * d + l] = std::pow(kraus_weight(m, l, loss.eta_a), 2);
            wb[m * d + l] = std::pow(kraus_weight(m, l, loss.eta_b), 2);
        }
    return exponent_covariance([&](auto&& f) {
        for (int la = 0; la < d; ++la)
            for (int ma = 0; ma + la < d; ++ma) {
                const double qa = wa[ma * d + la];
                if (qa == 0.0) continue;
                for (int lb = 0; lb < d; ++lb)
                    for (int mb = 0; mb + lb < d; ++mb) {
                        const double q = qa * wb[mb * d + lb] * p[(ma + la) * d + mb + lb];
                        if (q == 0.0) continue;
                        f(q, 0.5 * (ma + mb - loss.gamma_a * la - loss.gamma_b * lb),
                          0.5 * (ma - mb - loss.gamma_a * la + loss.gamma_b * lb));
                    }
            }
    });
}

double kraus_completeness(const TruncatedState& state, const TwoArmLoss& loss) {
    validate(loss);
    const auto p = populations(state);
    const int d = state.dim();
    double total = 0.0, kept = 0.0;
    for (int na = 0; na < d; ++na)
        for (int nb = 0; nb < d; ++nb) {
            const double w = p[na * d + nb];
            if (w == 0.0) continue;
            total += w;
            double sa = 0.0, sb = 0.0;
            for (int la = 0; la <= na; ++la) sa += std::pow(kraus_weight(na - la, la, loss.eta_a), 2);
            for (int lb = 0; lb <= nb; ++lb) sb += std::pow(kraus_weight(nb - lb, lb, loss.eta_b), 2);
            kept += w * sa * sb;
        }
    return total > 0.0 ? kept / total : 1.0;
}

}  // namespace qcrb
