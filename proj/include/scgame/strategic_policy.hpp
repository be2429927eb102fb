#pragma once

// Limit analysis of the second punitive policy: the supplier tracks, per
// reported state, the average demand it actually served and charges a markup
// of 2*pi times the gap between that average and its truthful benchmark
// sqrt(alpha) h_jj. The long-run behaviour is the attractor of a per-state
// drift equation solved here by bisection.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "scgame/errors.hpp"
#include "scgame/greedy_policy.hpp"
#include "scgame/market.hpp"
#include "scgame/report.hpp"

namespace scgame::strategic {

inline constexpr std::size_t no_index = static_cast<std::size_t>(-1);

/// Margin statistic W_ij(d) = sqrt(alpha) h_ij - pi alpha (d - sqrt(alpha) h_jj).
/// When positive it is both the served demand for the (true i, reported j)
/// slot and alpha times the manufacturer's unit margin.
inline double margin_stat(double d, std::size_t i, std::size_t j, double pi, const MarketModel& model) {
    const double sqrt_alpha = std::sqrt(model.alpha());
    return sqrt_alpha * greedy::h_value(i, j, model) -
           pi * model.alpha() * (d - sqrt_alpha * greedy::h_value(j, j, model));
}

/// Smallest true-state index still attracting demand at average d, i.e.
/// min { i : W_ij(d) > 0 }; no_index when every state is priced out.
inline std::size_t n_index(double d, std::size_t j, double pi, const MarketModel& model) {
    for (std::size_t i = 0; i < model.states(); ++i)
        if (margin_stat(d, i, j, pi, model) > 0.0) return i;
    return no_index;
}

/// Drift of the running demand average for reported state j:
/// E[D | reported j, current average d] - d. Strictly decreasing in d with a
/// positive value at 0 and a negative one at phi_L, so it has a unique zero.
inline double demand_drift(double d, std::size_t j, const ReportPolicy& r, double pi, const MarketModel& model) {
    const double denom = r.report_prob(j, model);
    if (!(denom > 0.0)) throw PolicyError("demand_drift: state " + std::to_string(j + 1) + " is never reported");
    double num = 0.0;
    for (std::size_t i = 0; i < model.states(); ++i) {
        const double w = model.prob(i) * r.at(i, j);
        if (w == 0.0) continue;
        const double m = margin_stat(d, i, j, pi, model);
        if (m > 0.0) num += w * m;
    }
    return num / denom - d;
}

struct FixedPointEntry {
    std::size_t j = 0;          ///< reported-state index
    double report_prob = 0.0;   ///< P(reported = j)
    double d_star = 0.0;        ///< attractor of the demand average
    std::size_t cutoff = 0;     ///< n_index at d_star (no_index if empty)
    double residual = 0.0;      ///< |drift(d_star)|
    double closed_form_gap = 0.0; ///< |closed-form reconstruction - d_star|
};

struct FixedPointResult {
    std::vector<FixedPointEntry> entries; ///< one per reported state, ascending j
};

namespace detail {

/// Closed form of the attractor for a fixed cutoff N:
/// sqrt(alpha) sum_{i>=N} sigma r (h_ij + pi alpha h_jj) /
/// (sum_i sigma r + pi alpha sum_{i>=N} sigma r).
inline double closed_form(std::size_t cutoff, std::size_t j, const ReportPolicy& r, double pi,
                          const MarketModel& model) {
    const double sqrt_alpha = std::sqrt(model.alpha());
    const double h_jj = greedy::h_value(j, j, model);
    const double total = r.report_prob(j, model);
    if (cutoff == no_index) return 0.0;
    double num = 0.0;
    double tail = 0.0;
    for (std::size_t i = cutoff; i < model.states(); ++i) {
        const double w = model.prob(i) * r.at(i, j);
        num += w * (greedy::h_value(i, j, model) + pi * model.alpha() * h_jj);
        tail += w;
    }
    return sqrt_alpha * num / (total + pi * model.alpha() * tail);
}

} // namespace detail

/// Unique zero of the demand drift for reported state j, found by bisection
/// on [0, phi_L] and cross-checked against the closed form at the solved
/// cutoff (either adjacent branch is accepted at a kink).
inline FixedPointEntry fixed_point(std::size_t j, const ReportPolicy& r, double pi, const MarketModel& model) {
    FixedPointEntry e;
    e.j = j;
    e.report_prob = r.report_prob(j, model);
    if (!(e.report_prob > 0.0)) throw PolicyError("fixed_point: state " + std::to_string(j + 1) + " is never reported");

    const double hi0 = model.support().back();
    const double g0 = demand_drift(0.0, j, r, pi, model);
    const double g1 = demand_drift(hi0, j, r, pi, model);
    if (!(g0 > 0.0) || !(g1 < 0.0))
        throw PolicyError("fixed_point: drift does not bracket a root on [0, phi_L]");

    double lo = 0.0, hi = hi0;
    for (int it = 0; it < 128 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (demand_drift(mid, j, r, pi, model) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    e.d_star = 0.5 * (lo + hi);
    e.residual = std::abs(demand_drift(e.d_star, j, r, pi, model));
    e.cutoff = n_index(e.d_star, j, pi, model);

    e.closed_form_gap = std::abs(detail::closed_form(e.cutoff, j, r, pi, model) - e.d_star);
    if (e.closed_form_gap > 1e-8) {
        // root can sit exactly on a cutoff kink; both adjacent branches agree there
        std::vector<std::size_t> alts;
        if (e.cutoff == no_index) {
            alts.push_back(model.states() - 1);
        } else {
            if (e.cutoff > 0) alts.push_back(e.cutoff - 1);
            alts.push_back(e.cutoff + 1 < model.states() ? e.cutoff + 1 : no_index);
        }
        for (std::size_t alt : alts)
            e.closed_form_gap =
                std::min(e.closed_form_gap, std::abs(detail::closed_form(alt, j, r, pi, model) - e.d_star));
    }
    return e;
}

/// Fixed points for every reported state; states with zero report
/// probability are excluded.
inline FixedPointResult fixed_point_all(const ReportPolicy& r, double pi, const MarketModel& model) {
    if (r.states() != model.states()) throw PolicyError("fixed_point_all: policy/model state mismatch");
    FixedPointResult out;
    for (std::size_t j = 0; j < model.states(); ++j)
        if (r.report_prob(j, model) > 0.0) out.entries.push_back(fixed_point(j, r, pi, model));
    return out;
}

/// Almost-sure limit of the manufacturer's time-averaged revenue under the
/// demand-feedback policy: (1/alpha) sum over served (i, j) pairs of
/// sigma_i r_ij W_ij(d*_j)^2. Served demand is (W)+ and the unit margin W/alpha.
inline double asymptotic_utility(const ReportPolicy& r, double pi, const MarketModel& model) {
    const FixedPointResult fp = fixed_point_all(r, pi, model);
    double u = 0.0;
    for (const auto& e : fp.entries) {
        for (std::size_t i = 0; i < model.states(); ++i) {
            const double w = model.prob(i) * r.at(i, e.j);
            if (w == 0.0) continue;
            const double m = margin_stat(e.d_star, i, e.j, pi, model);
            if (m > 0.0) u += w * m * m;
        }
    }
    return u / model.alpha();
}

/// Column-pooled revenue accounting: every (i, j) term is weighted by the
/// column-average demand d*_j instead of its own served demand,
/// (1/alpha) sum sigma_i r_ij d*_j W_ij(d*_j). Dominated by v_bar_bound
/// whenever the penalties are nonnegative; diagnostic companion to
/// asymptotic_utility.
inline double pooled_utility(const ReportPolicy& r, double pi, const MarketModel& model) {
    const FixedPointResult fp = fixed_point_all(r, pi, model);
    double u = 0.0;
    for (const auto& e : fp.entries)
        for (std::size_t i = 0; i < model.states(); ++i)
            u += model.prob(i) * r.at(i, e.j) * e.d_star * margin_stat(e.d_star, i, e.j, pi, model);
    return u / model.alpha();
}

/// Upper bound companion of pooled_utility with the penalty term dropped:
/// (1/alpha) sum sigma_i r_ij d*_j sqrt(alpha) h_ij.
inline double v_bar_bound(const ReportPolicy& r, double pi, const MarketModel& model) {
    const FixedPointResult fp = fixed_point_all(r, pi, model);
    const double sqrt_alpha = std::sqrt(model.alpha());
    double v = 0.0;
    for (const auto& e : fp.entries)
        for (std::size_t i = 0; i < model.states(); ++i)
            v += model.prob(i) * r.at(i, e.j) * e.d_star * sqrt_alpha * greedy::h_value(i, e.j, model);
    return v / model.alpha();
}

/// Smallest penalty (geometric scan 1, 2, 4, ... then bisection to 1e-3)
/// at which the misreporting policy earns strictly less than truthful
/// reporting. Empty when pi_max is not enough; policies that convert the
/// demand feedback into a discount (over-reporting that drags the column
/// average down) may genuinely have no finite threshold.
inline std::optional<double> find_penalty_threshold(const ReportPolicy& r, const MarketModel& model,
                                                    double pi_max) {
    if (!(pi_max > 0.0)) throw PolicyError("find_penalty_threshold: pi_max must be positive");
    if (r.is_identity_matrix())
        throw PolicyError("find_penalty_threshold: truthful policy always earns the truthful value; "
                          "no threshold exists");
    const double truthful = sbe_dynamic(model).expected_u_m;

    std::vector<double> scan;
    for (double pi = 1.0; pi <= pi_max; pi *= 2.0) scan.push_back(pi);
    if (scan.empty() || scan.back() < pi_max) scan.push_back(pi_max);

    double lo = 0.0;
    std::optional<double> hi;
    for (double pi : scan) {
        if (asymptotic_utility(r, pi, model) < truthful) {
            hi = pi;
            break;
        }
        lo = pi;
    }
    if (!hi) return std::nullopt;
    while (*hi - lo > 1e-3) {
        const double mid = 0.5 * (lo + *hi);
        if (asymptotic_utility(r, mid, model) < truthful)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

/// Max over (i, j) of |16 alpha (h_jj h_ij - h_ii^2) + (phi_j - phi_i)^2|;
/// exact algebra makes this zero up to rounding.
inline double h_identity_residual(const MarketModel& model) {
    double worst = 0.0;
    for (std::size_t i = 0; i < model.states(); ++i) {
        const double h_ii = greedy::h_value(i, i, model);
        for (std::size_t j = 0; j < model.states(); ++j) {
            const double lhs = 16.0 * model.alpha() *
                               (greedy::h_value(j, j, model) * greedy::h_value(i, j, model) - h_ii * h_ii);
            const double gap = model.potential(j) - model.potential(i);
            worst = std::max(worst, std::abs(lhs + gap * gap));
        }
    }
    return worst;
}

} // namespace scgame::strategic
