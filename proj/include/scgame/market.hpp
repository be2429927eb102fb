#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "scgame/errors.hpp"

namespace scgame {

/// Economy primitives: price sensitivity, per-unit costs and the finite
/// distribution of the market potential. Immutable after construction and
/// safe to share across threads; every operation below is a pure function.
///
/// Construction enforces:
///   - alpha in (0, 1]
///   - support strictly increasing, all positive, at least one state
///   - probabilities positive and summing to 1 within 1e-12
///   - minimum-potential condition support[0] >= alpha * (cs + cm);
///     equality is admitted as a degenerate boundary whose lowest state
///     carries zero equilibrium demand and utility.
class MarketModel {
  public:
    MarketModel(double alpha, double cs, double cm, std::vector<double> support, std::vector<double> probs)
        : alpha_(alpha), cs_(cs), cm_(cm), support_(std::move(support)), probs_(std::move(probs)) {
        validate();
    }

    double alpha() const { return alpha_; }
    double cs() const { return cs_; }
    double cm() const { return cm_; }
    double cost_sum() const { return cs_ + cm_; }
    std::size_t states() const { return support_.size(); }
    const std::vector<double>& support() const { return support_; }
    const std::vector<double>& probs() const { return probs_; }
    double potential(std::size_t i) const { return support_[i]; }
    double prob(std::size_t i) const { return probs_[i]; }

    /// E[potential] under the state distribution.
    double mean_potential() const {
        double m = 0.0;
        for (std::size_t i = 0; i < support_.size(); ++i) m += probs_[i] * support_[i];
        return m;
    }

    /// Equilibrium raw-material price for a (reported) potential.
    double q_star(double phi) const { return (phi + alpha_ * (cs_ - cm_)) / (2.0 * alpha_); }

    /// Equilibrium selling price for a potential.
    double p_star(double phi) const { return (phi + alpha_ * (q_star(phi) + cm_)) / (2.0 * alpha_); }

  private:
    void validate() const {
        if (!(alpha_ > 0.0) || alpha_ > 1.0) throw ModelError("alpha must lie in (0, 1], got " + str(alpha_));
        if (!(cs_ >= 0.0) || !(cm_ >= 0.0)) throw ModelError("costs must be nonnegative");
        if (support_.empty()) throw ModelError("support must contain at least one potential");
        if (support_.size() != probs_.size())
            throw ModelError("support and probs must have equal length");
        if (!(support_.front() > 0.0)) throw ModelError("potentials must be positive");
        for (std::size_t i = 1; i < support_.size(); ++i)
            if (!(support_[i] > support_[i - 1]))
                throw ModelError("support must be strictly increasing at position " + std::to_string(i + 1));
        double sum = 0.0;
        for (std::size_t i = 0; i < probs_.size(); ++i) {
            if (!(probs_[i] > 0.0))
                throw ModelError("probs must be positive, entry " + std::to_string(i + 1) + " is " + str(probs_[i]));
            sum += probs_[i];
        }
        if (std::abs(sum - 1.0) > 1e-12) throw ModelError("probs must sum to 1 within 1e-12, got " + str(sum));
        const double floor = alpha_ * cost_sum();
        if (support_.front() < floor)
            throw AssumptionError("minimum-potential assumption violated: lowest potential " +
                                  str(support_.front()) + " < alpha*(cs+cm) = " + str(floor));
    }

    static std::string str(double v) {
        std::ostringstream os;
        os << v;
        return os.str();
    }

    double alpha_;
    double cs_;
    double cm_;
    std::vector<double> support_;
    std::vector<double> probs_;
};

/// Demand attracted at selling price `price` out of potential `potential`:
/// (phi - alpha p)+, zero once the price reaches phi/alpha.
inline double demand(double price, double potential, double alpha) {
    if (!(price >= 0.0)) throw std::domain_error("demand: price must be nonnegative");
    if (!(potential > 0.0)) throw std::domain_error("demand: potential must be positive");
    if (!(alpha > 0.0) || alpha > 1.0) throw std::domain_error("demand: alpha must lie in (0, 1]");
    return std::max(0.0, potential - alpha * price);
}

/// Manufacturer revenue at prices (p, q): demand times the unit margin.
/// Negative when the margin is negative; callers model losses explicitly.
inline double manufacturer_utility(double p, double q, double phi, const MarketModel& model) {
    if (!(q >= 0.0)) throw std::domain_error("manufacturer_utility: q must be nonnegative");
    return demand(p, phi, model.alpha()) * (p - q - model.cm());
}

/// Supplier revenue at prices (p, q).
inline double supplier_utility(double p, double q, double phi, const MarketModel& model) {
    if (!(q >= 0.0)) throw std::domain_error("supplier_utility: q must be nonnegative");
    return demand(p, phi, model.alpha()) * (q - model.cs());
}

/// Selling price maximizing the manufacturer utility against quote `q`.
/// Interior optimum (phi + alpha(q + cm)) / (2 alpha); when even that price
/// cannot earn a nonnegative margin the market is shut down by pricing at
/// phi/alpha (zero demand, zero utility).
inline double best_response_price(double phi, double q, const MarketModel& model) {
    if (!(q >= 0.0)) throw std::domain_error("best_response_price: q must be nonnegative");
    const double alpha = model.alpha();
    if (phi < alpha * (q + model.cm())) return phi / alpha;
    return (phi + alpha * (q + model.cm())) / (2.0 * alpha);
}

struct SbeState {
    double p_star;
    double q_star;
    double u_m;
    double u_s;
};

/// Leader-follower equilibrium for one fixed potential. The supplier earns
/// exactly twice the manufacturer: u_s = (phi - alpha(cs+cm))^2 / (8 alpha).
inline SbeState sbe_single(double phi, const MarketModel& model) {
    const double alpha = model.alpha();
    if (phi < alpha * model.cost_sum())
        throw AssumptionError("sbe_single: potential below alpha*(cs+cm)");
    SbeState out;
    out.q_star = model.q_star(phi);
    out.p_star = model.p_star(phi);
    const double margin = phi - alpha * model.cost_sum();
    out.u_s = margin * margin / (8.0 * alpha);
    out.u_m = 0.5 * out.u_s;
    return out;
}

struct SbeOutcome {
    std::vector<double> p_star;
    std::vector<double> q_star;
    std::vector<double> u_m;
    std::vector<double> u_s;
    double expected_u_m = 0.0;
    double expected_u_s = 0.0;
};

/// Per-state equilibrium of the fluctuating market plus the probability
/// weighted utilities.
inline SbeOutcome sbe_dynamic(const MarketModel& model) {
    SbeOutcome out;
    const std::size_t n = model.states();
    out.p_star.reserve(n);
    out.q_star.reserve(n);
    out.u_m.reserve(n);
    out.u_s.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const SbeState s = sbe_single(model.potential(i), model);
        out.p_star.push_back(s.p_star);
        out.q_star.push_back(s.q_star);
        out.u_m.push_back(s.u_m);
        out.u_s.push_back(s.u_s);
        out.expected_u_m += model.prob(i) * s.u_m;
        out.expected_u_s += model.prob(i) * s.u_s;
    }
    return out;
}

} // namespace scgame
