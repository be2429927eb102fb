#pragma once

// Limit analysis of the first punitive policy: the supplier adds a markup
// proportional to the long-run expected reporting deviation f(r), and the
// greedy (under-reporting) manufacturer best-responds slot by slot.

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "scgame/errors.hpp"
#include "scgame/market.hpp"
#include "scgame/report.hpp"

namespace scgame::greedy {

/// h(i,j): square root of the manufacturer's best-response utility when the
/// true potential is support[i], the reported one support[j], and no penalty
/// is charged: (2 phi_i - phi_j - alpha(cs+cm)) / (4 sqrt(alpha)).
inline double h_value(std::size_t i, std::size_t j, const MarketModel& model) {
    return (2.0 * model.potential(i) - model.potential(j) - model.alpha() * model.cost_sum()) /
           (4.0 * std::sqrt(model.alpha()));
}

inline std::vector<std::vector<double>> h_matrix(const MarketModel& model) {
    const std::size_t n = model.states();
    std::vector<std::vector<double>> h(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) h[i][j] = h_value(i, j, model);
    return h;
}

/// Penalized quote for a reported state: q*(phi_j) + (pi / sqrt(alpha)) f.
inline double punitive_quote(std::size_t reported, double pi, double f_value, const MarketModel& model) {
    return model.q_star(model.potential(reported)) + pi / std::sqrt(model.alpha()) * f_value;
}

/// Best-response utility of the manufacturer when the true state is i, the
/// reported state is j and the supplier charges punitive_quote(j, pi, f).
/// The penalty enters the optimal margin as sqrt(alpha) pi f, giving
/// ([2 h_ij - pi f]+)^2 / 4.
inline double conditional_utility(std::size_t i, std::size_t j, double pi, double f_value,
                                  const MarketModel& model) {
    const double gap = 2.0 * h_value(i, j, model) - pi * f_value;
    return gap > 0.0 ? 0.25 * gap * gap : 0.0;
}

namespace detail {

/// Utility of a lower-triangular matrix under penalty pi, given precomputed h.
inline double eval_lower_triangular(const std::vector<std::vector<double>>& rows, double pi,
                                    const MarketModel& model) {
    const std::size_t n = model.states();
    double f = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j)
            f += model.prob(i) * (model.potential(i) - model.potential(j)) * rows[i][j];
    double u = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            const double w = model.prob(i) * rows[i][j];
            if (w == 0.0) continue;
            const double gap = 2.0 * h_value(i, j, model) - pi * f;
            if (gap > 0.0) u += w * 0.25 * gap * gap;
        }
    }
    return u;
}

/// Calls fn(counts) for every composition of `total` into `parts` nonnegative
/// integers, in lexicographic order.
inline void for_each_composition(std::size_t parts, int total, std::vector<int>& counts,
                                 const std::function<void(const std::vector<int>&)>& fn, std::size_t pos = 0) {
    if (pos + 1 == parts) {
        counts[pos] = total;
        fn(counts);
        return;
    }
    for (int k = 0; k <= total; ++k) {
        counts[pos] = k;
        for_each_composition(parts, total - k, counts, fn, pos + 1);
    }
}

inline double grid_policy_count(std::size_t states, int steps) {
    double count = 1.0;
    for (std::size_t i = 0; i < states; ++i) {
        // row i has i+1 admissible entries: C(steps + i, i) compositions
        double c = 1.0;
        for (std::size_t k = 1; k <= i; ++k) c = c * (steps + k) / k;
        count *= c;
    }
    return count;
}

} // namespace detail

/// Expected limit utility of the manufacturer misreporting with a
/// lower-triangular policy against penalty pi:
/// sum_{i >= j} sigma_i r_ij * conditional_utility(i, j, pi, f(r)).
/// Policies with over-reporting mass belong to the demand-feedback analysis
/// (strategic_policy.hpp) and are rejected here.
inline double partial_info_utility(const ReportPolicy& r, double pi, const MarketModel& model) {
    if (r.states() != model.states()) throw PolicyError("partial_info_utility: policy/model state mismatch");
    if (!r.is_lower_triangular())
        throw PolicyError("partial_info_utility: policy over-reports; use the strategic (demand-feedback) analysis");
    return detail::eval_lower_triangular(r.rows(), pi, model);
}

struct TruthCheck {
    bool truth_revealing = false;
    double truthful_utility = 0.0;
    /// Best utility over the non-identity grid policies, and its argmax
    /// (lexicographically first on ties). Empty when no such policy exists.
    double best_other_utility = 0.0;
    std::optional<ReportPolicy> offender;
};

/// Exhaustively checks, over a simplex grid on the under-reporting class,
/// whether truthful reporting is the strict unique maximizer at penalty pi.
/// Each row's mass is enumerated in multiples of 1/round(1/grid_step); ties
/// with the truthful utility within 1e-9 count as failure.
inline TruthCheck verify_truth_revealing(double pi, const MarketModel& model, double grid_step) {
    if (!(grid_step > 0.0) || grid_step > 0.5)
        throw PolicyError("verify_truth_revealing: grid_step must lie in (0, 0.5]");
    const int steps = static_cast<int>(std::lround(1.0 / grid_step));
    const std::size_t n = model.states();
    if (n > 6 && grid_step < 0.1)
        throw PolicyError("verify_truth_revealing: refusing more than 6 states at grid steps below 0.1");
    if (detail::grid_policy_count(n, steps) > 2e7)
        throw PolicyError("verify_truth_revealing: grid would enumerate more than 2e7 policies");

    TruthCheck out;
    out.truthful_utility = partial_info_utility(ReportPolicy::identity(n), pi, model);

    std::vector<std::vector<double>> rows(n, std::vector<double>(n, 0.0));
    std::vector<std::vector<int>> counts(n);
    bool have_other = false;
    double best = 0.0;
    std::vector<std::vector<double>> best_rows;

    // Recursively pick one composition per row; row i spreads `steps` units
    // over entries j = 0..i.
    std::function<void(std::size_t, bool)> walk_rows = [&](std::size_t row, bool identity_so_far) {
        if (row == n) {
            if (identity_so_far) return; // skip the truthful policy itself
            const double u = detail::eval_lower_triangular(rows, pi, model);
            if (!have_other || u > best) {
                have_other = true;
                best = u;
                best_rows = rows;
            }
            return;
        }
        std::vector<int> c(row + 1, 0);
        detail::for_each_composition(row + 1, steps, c, [&](const std::vector<int>& comp) {
            for (std::size_t j = 0; j <= row; ++j) rows[row][j] = static_cast<double>(comp[j]) / steps;
            walk_rows(row + 1, identity_so_far && comp[row] == steps);
        });
        for (std::size_t j = 0; j <= row; ++j) rows[row][j] = 0.0;
    };
    walk_rows(0, true);

    if (have_other) {
        out.best_other_utility = best;
        out.offender = ReportPolicy::validated(best_rows, ReportClass::greedy);
        out.truth_revealing = out.truthful_utility - best > 1e-9;
    } else {
        out.truth_revealing = true; // single-state market has no deviation to check
    }
    return out;
}

/// Smallest scanned penalty from which truthful reporting stays the strict
/// grid maximizer all the way to pi_max. Scans pi = pi_step, 2 pi_step, ...
inline std::optional<double> find_penalty_threshold(const MarketModel& model, double grid_step, double pi_max,
                                                    double pi_step) {
    if (!(pi_step > 0.0) || !(pi_max >= pi_step))
        throw PolicyError("find_penalty_threshold: need 0 < pi_step <= pi_max");
    std::vector<double> scan;
    for (double pi = pi_step; pi <= pi_max * (1.0 + 1e-12); pi += pi_step) scan.push_back(pi);
    std::vector<bool> ok(scan.size());
    for (std::size_t k = 0; k < scan.size(); ++k) ok[k] = verify_truth_revealing(scan[k], model, grid_step).truth_revealing;
    std::size_t first = scan.size();
    for (std::size_t k = scan.size(); k-- > 0;) {
        if (!ok[k]) break;
        first = k;
    }
    if (first == scan.size()) return std::nullopt;
    return scan[first];
}

} // namespace scgame::greedy
