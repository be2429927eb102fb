#pragma once

// Deterministic CSV assembly: fixed %.12g formatting, no locale, so a run
// with the same seed reproduces files byte for byte.

#include <cstdint>
#include <cstdio>
#include <string>

#include "scgame/sim.hpp"

namespace scgame {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

class CsvWriter {
  public:
    CsvWriter& field(const std::string& s) {
        if (!line_empty_) out_ += ',';
        out_ += s;
        line_empty_ = false;
        return *this;
    }
    CsvWriter& field(double v) { return field(format_double(v)); }
    CsvWriter& field(std::int64_t v) { return field(std::to_string(v)); }
    CsvWriter& end_row() {
        out_ += '\n';
        line_empty_ = true;
        return *this;
    }
    const std::string& str() const { return out_; }

  private:
    std::string out_;
    bool line_empty_ = true;
};

/// Per-slot stream. Columns: t, phi, phi_hat, Q, P, D, u_m, u_s, phi_bar,
/// f_t and, for the demand policy, d_bar_1..d_bar_L.
inline std::string trace_csv(const Trace& trace, const SimConfig& cfg) {
    CsvWriter w;
    w.field("t").field("phi").field("phi_hat").field("Q").field("P").field("D").field("u_m").field("u_s")
        .field("phi_bar").field("f_t");
    const bool demand_policy = cfg.policy.kind == PolicyKind::demand;
    if (demand_policy)
        for (std::size_t j = 0; j < cfg.model.states(); ++j) w.field("d_bar_" + std::to_string(j + 1));
    w.end_row();
    for (const SlotRecord& s : trace.slots) {
        w.field(s.t)
            .field(cfg.model.potential(s.true_state))
            .field(cfg.model.potential(s.reported_state))
            .field(s.quote)
            .field(s.price)
            .field(s.demand)
            .field(s.u_m)
            .field(s.u_s)
            .field(s.phi_bar)
            .field(s.f_t);
        if (demand_policy)
            for (double d : s.d_bar) w.field(d);
        w.end_row();
    }
    return w.str();
}

/// Summary statistics of a single run, one stat per row.
inline std::string summary_csv(const TraceSummary& s) {
    CsvWriter w;
    w.field("stat").field("value").end_row();
    w.field("horizon").field(s.horizon).end_row();
    w.field("phi_bar").field(s.phi_bar).end_row();
    w.field("f_t").field(s.f_t).end_row();
    w.field("u_m_bar").field(s.u_m_bar).end_row();
    w.field("u_s_bar").field(s.u_s_bar).end_row();
    if (s.u_m_bar_nominal) w.field("u_m_bar_nominal").field(*s.u_m_bar_nominal).end_row();
    for (std::size_t j = 0; j < s.d_bar.size(); ++j)
        w.field("d_bar_" + std::to_string(j + 1)).field(s.d_bar[j]).end_row();
    for (std::size_t j = 0; j < s.report_count.size(); ++j)
        w.field("report_count_" + std::to_string(j + 1)).field(s.report_count[j]).end_row();
    return w.str();
}

/// Summary of a replicated run, one stat per row with mean and stderr.
inline std::string replicate_csv(const ReplicateSummary& s) {
    CsvWriter w;
    w.field("stat").field("mean").field("stderr").end_row();
    auto row = [&](const std::string& name, const Stat& st) {
        w.field(name).field(st.mean).field(st.std_error).end_row();
    };
    row("u_m_bar", s.u_m_bar);
    row("u_s_bar", s.u_s_bar);
    row("phi_bar", s.phi_bar);
    if (s.u_m_bar_nominal) row("u_m_bar_nominal", *s.u_m_bar_nominal);
    for (std::size_t j = 0; j < s.d_bar.size(); ++j) row("d_bar_" + std::to_string(j + 1), s.d_bar[j]);
    return w.str();
}

} // namespace scgame
