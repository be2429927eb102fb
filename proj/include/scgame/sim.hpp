#pragma once

// Slot-by-slot Monte-Carlo engine for the repeated pricing game: draw the
// market potential, draw the (mis)report, quote under the selected punitive
// policy with online estimates, realize demand, track running averages.
// A trace is strictly sequential (the averages feed the quotes); distinct
// traces never share state and may run concurrently.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "scgame/errors.hpp"
#include "scgame/greedy_policy.hpp"
#include "scgame/market.hpp"
#include "scgame/report.hpp"
#include "scgame/rng.hpp"

namespace scgame {

enum class PolicyKind {
    deviation, ///< markup pi * f_t on the aggregate reporting deviation estimate
    demand     ///< markup 2 pi * (per-state demand average - truthful benchmark)
};

inline const char* to_string(PolicyKind k) {
    return k == PolicyKind::deviation ? "I" : "II";
}

struct PunitiveSpec {
    PolicyKind kind = PolicyKind::deviation;
    double pi = 0.0;
};

struct SimConfig {
    MarketModel model;
    ReportPolicy report;
    PunitiveSpec policy;
    std::int64_t horizon = 1;
    std::uint64_t seed = 1;
    /// Halfwidth n of the uniform demand noise on [-n, n]; only the demand
    /// policy observes noisy demand, the deviation policy treats this as 0.
    double noise_halfwidth = 0.0;
    bool record_slots = false;
};

struct SlotRecord {
    std::int64_t t = 0;
    std::size_t true_state = 0;
    std::size_t reported_state = 0;
    double quote = 0.0;
    double price = 0.0;
    double demand = 0.0;
    double u_m = 0.0;
    double u_s = 0.0;
    double phi_bar = 0.0;
    double f_t = 0.0;
    std::vector<double> d_bar; ///< snapshot after the update; demand policy only
};

struct TraceSummary {
    std::int64_t horizon = 0;
    double phi_bar = 0.0; ///< running mean of reported potentials
    double f_t = 0.0;     ///< final deviation estimate (mean potential - phi_bar)+
    double u_m_bar = 0.0; ///< realized time-averaged manufacturer revenue
    double u_s_bar = 0.0; ///< realized time-averaged supplier revenue
    /// Running average of ([h(true, reported) - pi f_t]+)^2, the slot-optimal
    /// value implied by the h statistic; tracked for the deviation policy
    /// next to the realized average.
    std::optional<double> u_m_bar_nominal;
    std::vector<double> d_bar;              ///< per-reported-state demand averages (demand policy)
    std::vector<std::int64_t> report_count; ///< slots in which each state was reported
};

struct Trace {
    TraceSummary summary;
    std::vector<SlotRecord> slots; ///< filled only when record_slots is set
};

inline void validate(const SimConfig& cfg) {
    if (cfg.horizon < 1) throw PolicyError("sim: horizon must be at least 1");
    if (!(cfg.noise_halfwidth >= 0.0)) throw PolicyError("sim: noise halfwidth must be nonnegative");
    if (cfg.report.states() != cfg.model.states()) throw PolicyError("sim: policy/model state mismatch");
    if (!(cfg.policy.pi >= 0.0)) throw PolicyError("sim: penalty must be nonnegative");
}

/// Runs one seeded trace. Fully deterministic: (config, seed) fixes every
/// slot record bit for bit.
inline Trace simulate(const SimConfig& cfg) {
    validate(cfg);
    const MarketModel& model = cfg.model;
    const std::size_t n = model.states();
    const double alpha = model.alpha();
    const double sqrt_alpha = std::sqrt(alpha);
    const double mean_phi = model.mean_potential();
    const bool demand_policy = cfg.policy.kind == PolicyKind::demand;
    const double noise_hw = demand_policy ? cfg.noise_halfwidth : 0.0;

    // truthful per-state demand benchmarks sqrt(alpha) h_jj
    std::vector<double> d_truth(n);
    for (std::size_t j = 0; j < n; ++j) d_truth[j] = sqrt_alpha * greedy::h_value(j, j, model);
    const std::vector<std::vector<double>> h = greedy::h_matrix(model);

    SimStreams streams(cfg.seed);
    Trace out;
    if (cfg.record_slots) out.slots.reserve(static_cast<std::size_t>(cfg.horizon));

    double phi_bar = 0.0;
    double u_m_bar = 0.0;
    double u_s_bar = 0.0;
    double u_m_bar_nominal = 0.0;
    double f_t = 0.0;
    std::vector<double> d_bar = d_truth; // before the first report each state sits at its benchmark
    std::vector<std::int64_t> count(n, 0);

    for (std::int64_t t = 1; t <= cfg.horizon; ++t) {
        const std::size_t i = sample_from(model.probs(), streams.market.next_double());
        const std::size_t j = sample_report(i, cfg.report, streams.report);
        const double phi = model.potential(i);
        const double phi_hat = model.potential(j);
        ++count[j];

        phi_bar += (phi_hat - phi_bar) / static_cast<double>(t);
        f_t = std::max(0.0, mean_phi - phi_bar);

        double quote;
        if (demand_policy)
            quote = model.q_star(phi_hat) + 2.0 * cfg.policy.pi * (d_bar[j] - d_truth[j]);
        else
            quote = model.q_star(phi_hat) + cfg.policy.pi * f_t;

        // Best response to the actual quote. The demand policy can quote below
        // zero (a transient or steady discount), so the selling price is
        // clamped to [0, phi/alpha] here instead of calling
        // best_response_price, whose contract requires q >= 0.
        const double interior = (phi + alpha * (quote + model.cm())) / (2.0 * alpha);
        const double price = std::clamp(interior, 0.0, phi / alpha);
        double dem = std::max(0.0, phi - alpha * price);
        if (noise_hw > 0.0) dem += streams.noise.uniform(-noise_hw, noise_hw);

        const double u_m = dem * (price - quote - model.cm());
        const double u_s = dem * (quote - model.cs());

        u_m_bar += (u_m - u_m_bar) / static_cast<double>(t);
        u_s_bar += (u_s - u_s_bar) / static_cast<double>(t);
        if (!demand_policy) {
            const double gap = h[i][j] - cfg.policy.pi * f_t;
            const double nominal = gap > 0.0 ? gap * gap : 0.0;
            u_m_bar_nominal += (nominal - u_m_bar_nominal) / static_cast<double>(t);
        } else {
            d_bar[j] += (dem - d_bar[j]) / static_cast<double>(count[j]);
        }

        if (cfg.record_slots) {
            SlotRecord rec{t, i, j, quote, price, dem, u_m, u_s, phi_bar, f_t, {}};
            if (demand_policy) rec.d_bar = d_bar;
            out.slots.push_back(std::move(rec));
        }
    }

    out.summary.horizon = cfg.horizon;
    out.summary.phi_bar = phi_bar;
    out.summary.f_t = f_t;
    out.summary.u_m_bar = u_m_bar;
    out.summary.u_s_bar = u_s_bar;
    if (!demand_policy) out.summary.u_m_bar_nominal = u_m_bar_nominal;
    if (demand_policy) out.summary.d_bar = d_bar;
    out.summary.report_count = count;
    return out;
}

struct Stat {
    double mean = 0.0;
    double std_error = 0.0;
};

struct ReplicateSummary {
    int n_seeds = 0;
    Stat u_m_bar;
    Stat u_s_bar;
    Stat phi_bar;
    std::optional<Stat> u_m_bar_nominal;
    std::vector<Stat> d_bar;
};

namespace detail {
inline Stat stat_of(const std::vector<double>& xs) {
    Stat s;
    const double n = static_cast<double>(xs.size());
    for (double x : xs) s.mean += x;
    s.mean /= n;
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.std_error = std::sqrt(ss / (n - 1.0) / n);
    return s;
}
} // namespace detail

/// Runs the config under seeds seed, seed+1, ..., seed+n_seeds-1 and reports
/// mean and standard error of each tracked statistic.
inline ReplicateSummary replicate(const SimConfig& cfg, int n_seeds) {
    if (n_seeds < 2) throw PolicyError("replicate: need at least 2 seeds");
    std::vector<double> um, us, pb, nominal;
    std::vector<std::vector<double>> db(cfg.model.states());
    bool have_d = false;
    for (int k = 0; k < n_seeds; ++k) {
        SimConfig run = cfg;
        run.seed = cfg.seed + static_cast<std::uint64_t>(k);
        run.record_slots = false;
        const TraceSummary s = simulate(run).summary;
        um.push_back(s.u_m_bar);
        us.push_back(s.u_s_bar);
        pb.push_back(s.phi_bar);
        if (s.u_m_bar_nominal) nominal.push_back(*s.u_m_bar_nominal);
        if (!s.d_bar.empty()) {
            have_d = true;
            for (std::size_t j = 0; j < s.d_bar.size(); ++j) db[j].push_back(s.d_bar[j]);
        }
    }
    ReplicateSummary out;
    out.n_seeds = n_seeds;
    out.u_m_bar = detail::stat_of(um);
    out.u_s_bar = detail::stat_of(us);
    out.phi_bar = detail::stat_of(pb);
    if (!nominal.empty()) out.u_m_bar_nominal = detail::stat_of(nominal);
    if (have_d)
        for (auto& col : db) out.d_bar.push_back(detail::stat_of(col));
    return out;
}

} // namespace scgame
