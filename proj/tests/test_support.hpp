#pragma once

// Shared fixtures and independent oracles for the test suites. The oracles
// deliberately avoid the closed forms under test: brute-force grids for the
// pricing optima, direct summation for expectations, integer-count chi-square
// for sampling.

#include <cmath>
#include <cstddef>
#include <vector>

#include "scgame/greedy_policy.hpp"
#include "scgame/market.hpp"
#include "scgame/report.hpp"
#include "scgame/rng.hpp"

namespace testsup {

inline scgame::MarketModel example1() {
    return scgame::MarketModel(0.5, 10.0, 10.0, {40.0, 60.0, 80.0}, {0.2, 0.5, 0.3});
}

inline scgame::MarketModel example2() {
    return scgame::MarketModel(0.5, 10.0, 10.0, {10.0, 40.0, 60.0, 70.0, 80.0}, {0.1, 0.2, 0.3, 0.2, 0.2});
}

/// Grid argmax of the manufacturer utility over p in [0, phi/alpha].
inline double brute_force_best_price(double phi, double q, const scgame::MarketModel& model, double step_frac = 1e-4) {
    const double hi = phi / model.alpha();
    const double step = step_frac * hi;
    double best_p = 0.0, best_u = -1e300;
    for (double p = 0.0; p <= hi + step * 0.5; p += step) {
        const double u = scgame::demand(p, phi, model.alpha()) * (p - q - model.cm());
        if (u > best_u) {
            best_u = u;
            best_p = p;
        }
    }
    return best_p;
}

struct BruteSbe {
    double p, q, u_m, u_s;
};

/// Nested grid search of the leader-follower equilibrium: outer grid on the
/// quote, the follower answered by its own inner grid argmax.
inline BruteSbe brute_force_sbe(double phi, const scgame::MarketModel& model, double q_step = 1e-3,
                                double p_step_frac = 1e-5) {
    BruteSbe best{0, 0, -1e300, -1e300};
    const double q_hi = phi / model.alpha();
    for (double q = 0.0; q <= q_hi + 0.5 * q_step; q += q_step) {
        const double p = brute_force_best_price(phi, q, model, p_step_frac);
        const double us = scgame::demand(p, phi, model.alpha()) * (q - model.cs());
        if (us > best.u_s) {
            best = {p, q, scgame::demand(p, phi, model.alpha()) * (p - q - model.cm()), us};
        }
    }
    return best;
}

/// Grid supremum of the manufacturer utility against the penalized quote for
/// (true i, reported j).
inline double brute_force_conditional_utility(std::size_t i, std::size_t j, double pi, double f,
                                              const scgame::MarketModel& model, double step_frac = 1e-5) {
    const double quote = scgame::greedy::punitive_quote(j, pi, f, model);
    const double phi = model.potential(i);
    const double hi = phi / model.alpha();
    const double step = step_frac * hi;
    double best = 0.0; // p = phi/alpha always achieves zero
    for (double p = 0.0; p <= hi + 0.5 * step; p += step) {
        const double u = scgame::demand(p, phi, model.alpha()) * (p - quote - model.cm());
        if (u > best) best = u;
    }
    return best;
}

/// Random model with a strict minimum-potential margin.
inline scgame::MarketModel random_model(scgame::Rng& g, std::size_t min_states = 2, std::size_t max_states = 5) {
    const std::size_t n = min_states + static_cast<std::size_t>(g.below(max_states - min_states + 1));
    const double alpha = 0.05 + 0.95 * g.next_double();
    const double cs = 0.5 + 19.5 * g.next_double();
    const double cm = 0.5 + 19.5 * g.next_double();
    std::vector<double> support(n), probs(n);
    double phi = alpha * (cs + cm) + 1.0 + 30.0 * g.next_double();
    for (std::size_t i = 0; i < n; ++i) {
        support[i] = phi;
        phi += 1.0 + 30.0 * g.next_double();
    }
    double sum = 0.0;
    for (auto& p : probs) {
        p = 0.05 + g.next_double();
        sum += p;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        probs[i] /= sum;
        acc += probs[i];
    }
    probs[n - 1] = 1.0 - acc;
    return scgame::MarketModel(alpha, cs, cm, support, probs);
}

/// Row-stochastic matrix with full support (unit-exponential weights).
inline scgame::ReportPolicy random_general_policy(std::size_t n, scgame::Rng& g) {
    scgame::ReportPolicy::Matrix m(n, std::vector<double>(n));
    for (auto& row : m) {
        double sum = 0.0;
        for (auto& v : row) {
            v = -std::log(1.0 - g.next_double());
            sum += v;
        }
        double acc = 0.0;
        for (std::size_t j = 0; j + 1 < n; ++j) {
            row[j] /= sum;
            acc += row[j];
        }
        row[n - 1] = 1.0 - acc;
    }
    return scgame::ReportPolicy::validated(m, scgame::ReportClass::general);
}

/// Lower-triangular row-stochastic matrix with full support on each prefix.
inline scgame::ReportPolicy random_greedy_policy(std::size_t n, scgame::Rng& g) {
    scgame::ReportPolicy::Matrix m(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> w(i + 1);
        double sum = 0.0;
        for (auto& v : w) {
            v = -std::log(1.0 - g.next_double());
            sum += v;
        }
        double acc = 0.0;
        for (std::size_t j = 0; j < i; ++j) {
            m[i][j] = w[j] / sum;
            acc += m[i][j];
        }
        m[i][i] = 1.0 - acc;
    }
    return scgame::ReportPolicy::validated(m, scgame::ReportClass::greedy);
}

/// Upper 0.001 quantiles of the chi-square distribution for 1..6 degrees of
/// freedom; a sampling test passes when its statistic stays below the entry.
inline double chi_square_crit_999(std::size_t dof) {
    static const double crit[] = {10.828, 13.816, 16.266, 18.467, 20.515, 22.458};
    return crit[dof - 1];
}

} // namespace testsup
