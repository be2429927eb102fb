#pragma once

#include <cstddef>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "scgame/errors.hpp"
#include "scgame/market.hpp"
#include "scgame/rng.hpp"

namespace scgame {

enum class ReportClass { identity, greedy, general };

inline const char* to_string(ReportClass c) {
    switch (c) {
        case ReportClass::identity: return "identity";
        case ReportClass::greedy: return "greedy";
        case ReportClass::general: return "general";
    }
    return "?";
}

/// Row-stochastic misreporting matrix: rows()[i][j] is the probability of
/// reporting state j when the true state is i. The greedy class only
/// under-reports (zero above the diagonal). Immutable once built; sampling
/// needs an exclusive Rng per caller.
class ReportPolicy {
  public:
    using Matrix = std::vector<std::vector<double>>;

    static ReportPolicy identity(std::size_t states) {
        if (states < 1) throw PolicyError("identity policy needs at least one state");
        Matrix m(states, std::vector<double>(states, 0.0));
        for (std::size_t i = 0; i < states; ++i) m[i][i] = 1.0;
        return ReportPolicy(std::move(m), ReportClass::identity);
    }

    /// Validates and wraps a matrix. Collects every violated constraint into
    /// one error rather than stopping at the first; never renormalizes.
    static ReportPolicy validated(Matrix rows, ReportClass tag) {
        std::vector<std::string> faults;
        const std::size_t n = rows.size();
        if (n == 0) faults.push_back("matrix is empty");
        for (std::size_t i = 0; i < n; ++i) {
            if (rows[i].size() != n) {
                faults.push_back("row " + std::to_string(i + 1) + " has " + std::to_string(rows[i].size()) +
                                 " entries, expected " + std::to_string(n));
                continue;
            }
            double sum = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double v = rows[i][j];
                if (!(v >= 0.0) || v > 1.0) faults.push_back("entry (" + ij(i, j) + ") = " + str(v) + " outside [0, 1]");
                sum += v;
            }
            if (std::abs(sum - 1.0) > 1e-12)
                faults.push_back("row " + std::to_string(i + 1) + " sums to " + str(sum) + ", expected 1 within 1e-12");
            if (tag == ReportClass::greedy) {
                for (std::size_t j = i + 1; j < n; ++j)
                    if (rows[i][j] != 0.0)
                        faults.push_back("greedy policy has over-reporting mass at (" + ij(i, j) + ")");
            }
            if (tag == ReportClass::identity) {
                for (std::size_t j = 0; j < n; ++j) {
                    const double want = i == j ? 1.0 : 0.0;
                    if (rows[i][j] != want) faults.push_back("identity policy differs at (" + ij(i, j) + ")");
                }
            }
        }
        if (!faults.empty()) {
            std::string msg = "invalid report policy:";
            for (const auto& f : faults) msg += "\n  - " + f;
            throw PolicyError(msg);
        }
        return ReportPolicy(std::move(rows), tag);
    }

    std::size_t states() const { return rows_.size(); }
    ReportClass tag() const { return tag_; }
    const Matrix& rows() const { return rows_; }
    double at(std::size_t i, std::size_t j) const { return rows_[i][j]; }

    /// Exact structural identity, independent of the tag.
    bool is_identity_matrix() const {
        for (std::size_t i = 0; i < rows_.size(); ++i)
            for (std::size_t j = 0; j < rows_.size(); ++j)
                if (rows_[i][j] != (i == j ? 1.0 : 0.0)) return false;
        return true;
    }

    /// No mass above the diagonal (membership in the under-reporting class).
    bool is_lower_triangular() const {
        for (std::size_t i = 0; i < rows_.size(); ++i)
            for (std::size_t j = i + 1; j < rows_.size(); ++j)
                if (rows_[i][j] != 0.0) return false;
        return true;
    }

    /// P(reported state = j) under the model's state distribution.
    double report_prob(std::size_t j, const MarketModel& model) const {
        double p = 0.0;
        for (std::size_t i = 0; i < rows_.size(); ++i) p += model.prob(i) * rows_[i][j];
        return p;
    }

  private:
    ReportPolicy(Matrix rows, ReportClass tag) : rows_(std::move(rows)), tag_(tag) {}

    static std::string ij(std::size_t i, std::size_t j) {
        return std::to_string(i + 1) + "," + std::to_string(j + 1);
    }
    static std::string str(double v) {
        std::ostringstream os;
        os << v;
        return os.str();
    }

    Matrix rows_;
    ReportClass tag_;
};

/// Expected long-run gap between the true and the reported potential,
/// f(r) = sum_{i,j} sigma_i (phi_i - phi_j) r_ij. Nonnegative for the
/// under-reporting class, signed in general.
inline double expected_deviation(const ReportPolicy& r, const MarketModel& model) {
    if (r.states() != model.states()) throw PolicyError("expected_deviation: policy/model state mismatch");
    double f = 0.0;
    for (std::size_t i = 0; i < r.states(); ++i)
        for (std::size_t j = 0; j < r.states(); ++j)
            if (i != j) f += model.prob(i) * (model.potential(i) - model.potential(j)) * r.at(i, j);
    return f;
}

/// Draws the reported state for a true state.
inline std::size_t sample_report(std::size_t true_index, const ReportPolicy& r, Rng& rng) {
    if (true_index >= r.states()) throw PolicyError("sample_report: state index out of range");
    return sample_from(r.rows()[true_index], rng.next_double());
}

} // namespace scgame
