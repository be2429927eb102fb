// Command-line front end: seeded experiment presets, arbitrary config runs,
// and the penalty/fixed-point analyses. CSV files are the machine contract;
// stdout carries a human summary.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "scgame/config.hpp"
#include "scgame/csv.hpp"
#include "scgame/greedy_policy.hpp"
#include "scgame/presets.hpp"
#include "scgame/sim.hpp"
#include "scgame/strategic_policy.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_assumption = 3;
constexpr int exit_not_found = 4;

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
    std::filesystem::create_directories(dir);
    const std::filesystem::path path = std::filesystem::path(dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

struct RunOptions {
    std::string preset;
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    bool seed_given = false;
    int replications = 0; // 0 = take the config/preset default
    bool trace = false;
    bool quiet = false;
};

int cmd_run(const RunOptions& opt) {
    using namespace scgame;
    if (!opt.preset.empty()) {
        const PresetOutput out = run_preset(opt.preset, opt.seed, opt.replications > 0 ? opt.replications : 10);
        for (const auto& [name, content] : out.files) write_file(opt.out_dir, name, content);
        if (!opt.quiet) {
            std::fputs(out.summary.c_str(), stdout);
            std::printf("wrote %zu file(s) to %s\n", out.files.size(), opt.out_dir.c_str());
        }
        return exit_ok;
    }

    const ParsedConfig parsed = load_config(opt.config_path);
    SimConfig cfg = parsed.sim_config();
    if (opt.seed_given) cfg.seed = opt.seed;
    const int reps = opt.replications > 0 ? opt.replications : parsed.replications;

    if (reps > 1) {
        const ReplicateSummary rs = replicate(cfg, reps);
        write_file(opt.out_dir, "summary.csv", replicate_csv(rs));
        if (!opt.quiet) {
            std::printf("policy %s, pi=%s, T=%lld, %d seeds from %llu\n", to_string(cfg.policy.kind),
                        format_double(cfg.policy.pi).c_str(), static_cast<long long>(cfg.horizon), reps,
                        static_cast<unsigned long long>(cfg.seed));
            std::printf("  %-16s %14s %14s\n", "stat", "mean", "stderr");
            std::printf("  %-16s %14s %14s\n", "u_m_bar", format_double(rs.u_m_bar.mean).c_str(),
                        format_double(rs.u_m_bar.std_error).c_str());
            std::printf("  %-16s %14s %14s\n", "u_s_bar", format_double(rs.u_s_bar.mean).c_str(),
                        format_double(rs.u_s_bar.std_error).c_str());
            std::printf("  %-16s %14s %14s\n", "phi_bar", format_double(rs.phi_bar.mean).c_str(),
                        format_double(rs.phi_bar.std_error).c_str());
        }
    } else {
        cfg.record_slots = opt.trace;
        const Trace trace = simulate(cfg);
        write_file(opt.out_dir, "summary.csv", summary_csv(trace.summary));
        if (opt.trace) write_file(opt.out_dir, "trace.csv", trace_csv(trace, cfg));
        if (!opt.quiet) {
            const TraceSummary& s = trace.summary;
            std::printf("policy %s, pi=%s, T=%lld, seed %llu\n", to_string(cfg.policy.kind),
                        format_double(cfg.policy.pi).c_str(), static_cast<long long>(cfg.horizon),
                        static_cast<unsigned long long>(cfg.seed));
            std::printf("  u_m_bar  = %s\n", format_double(s.u_m_bar).c_str());
            std::printf("  u_s_bar  = %s\n", format_double(s.u_s_bar).c_str());
            std::printf("  phi_bar  = %s (f = %s)\n", format_double(s.phi_bar).c_str(),
                        format_double(s.f_t).c_str());
            for (std::size_t j = 0; j < s.d_bar.size(); ++j)
                std::printf("  d_bar_%zu  = %s\n", j + 1, format_double(s.d_bar[j]).c_str());
        }
    }
    if (!opt.quiet) std::printf("wrote summary to %s\n", opt.out_dir.c_str());
    return exit_ok;
}

struct AnalyzeOptions {
    std::string config_path;
    std::string out_dir;
    double grid_step = 0.1;
    double pi_max = 20.0;
    double pi_step = 0.5;
    double pi_max_strategic = 1e4;
    std::optional<double> pi_override;
    bool quiet = false;
};

int cmd_pi_bar_greedy(const AnalyzeOptions& opt) {
    using namespace scgame;
    const ParsedConfig parsed = load_config(opt.config_path);
    const MarketModel& model = parsed.need_model();

    CsvWriter w;
    w.field("pi").field("truth_revealing").field("truthful_utility").field("best_other_utility").end_row();
    if (!opt.quiet)
        std::printf("%8s %6s %16s %18s\n", "pi", "truth", "truthful_utility", "best_other_utility");
    for (double pi = opt.pi_step; pi <= opt.pi_max * (1.0 + 1e-12); pi += opt.pi_step) {
        const greedy::TruthCheck tc = greedy::verify_truth_revealing(pi, model, opt.grid_step);
        w.field(pi).field(std::int64_t(tc.truth_revealing)).field(tc.truthful_utility).field(tc.best_other_utility)
            .end_row();
        if (!opt.quiet)
            std::printf("%8s %6s %16s %18s\n", format_double(pi).c_str(), tc.truth_revealing ? "yes" : "no",
                        format_double(tc.truthful_utility).c_str(), format_double(tc.best_other_utility).c_str());
    }
    if (!opt.out_dir.empty()) write_file(opt.out_dir, "pi_bar_greedy.csv", w.str());

    const auto pi_bar = greedy::find_penalty_threshold(model, opt.grid_step, opt.pi_max, opt.pi_step);
    if (!pi_bar) {
        std::printf("threshold: not found up to pi_max = %s\n", format_double(opt.pi_max).c_str());
        return exit_not_found;
    }
    std::printf("threshold: pi_bar = %s (grid step %s, scan step %s, pi_max %s)\n", format_double(*pi_bar).c_str(),
                format_double(opt.grid_step).c_str(), format_double(opt.pi_step).c_str(),
                format_double(opt.pi_max).c_str());
    return exit_ok;
}

int cmd_pi_bar_strategic(const AnalyzeOptions& opt) {
    using namespace scgame;
    const ParsedConfig parsed = load_config(opt.config_path);
    const MarketModel& model = parsed.need_model();
    const ReportPolicy& report = parsed.need_report();
    const double truthful = sbe_dynamic(model).expected_u_m;

    CsvWriter w;
    w.field("pi").field("asymptotic_utility").field("truthful_utility").end_row();
    if (!opt.quiet) std::printf("%12s %18s\n", "pi", "asymptotic_utility");
    for (double pi = 1.0; pi <= opt.pi_max_strategic; pi *= 2.0) {
        const double u = strategic::asymptotic_utility(report, pi, model);
        w.field(pi).field(u).field(truthful).end_row();
        if (!opt.quiet) std::printf("%12s %18s\n", format_double(pi).c_str(), format_double(u).c_str());
    }
    if (!opt.out_dir.empty()) write_file(opt.out_dir, "pi_bar_strategic.csv", w.str());

    const auto pi_bar = strategic::find_penalty_threshold(report, model, opt.pi_max_strategic);
    if (!pi_bar) {
        std::printf("threshold: not found up to pi_max = %s (utility stays at or above the truthful %s)\n",
                    format_double(opt.pi_max_strategic).c_str(), format_double(truthful).c_str());
        return exit_not_found;
    }
    std::printf("threshold: pi_bar = %s, utility at 2x threshold = %s (truthful %s)\n",
                format_double(*pi_bar).c_str(),
                format_double(strategic::asymptotic_utility(report, 2.0 * *pi_bar, model)).c_str(),
                format_double(truthful).c_str());
    return exit_ok;
}

int cmd_fixed_point(const AnalyzeOptions& opt) {
    using namespace scgame;
    const ParsedConfig parsed = load_config(opt.config_path);
    const MarketModel& model = parsed.need_model();
    const ReportPolicy& report = parsed.need_report();
    double pi = 0.0;
    if (opt.pi_override)
        pi = *opt.pi_override;
    else
        pi = parsed.need_policy().pi;

    const strategic::FixedPointResult fp = strategic::fixed_point_all(report, pi, model);
    CsvWriter w;
    w.field("j").field("phi_j").field("report_prob").field("d_star").field("cutoff").field("residual")
        .field("closed_form_gap").end_row();
    std::printf("fixed points at pi = %s\n", format_double(pi).c_str());
    std::printf("%4s %10s %12s %14s %7s %12s %16s\n", "j", "phi_j", "report_prob", "d_star", "cutoff", "residual",
                "closed_form_gap");
    for (const auto& e : fp.entries) {
        const std::string cutoff =
            e.cutoff == strategic::no_index ? std::string("none") : std::to_string(e.cutoff + 1);
        w.field(std::int64_t(e.j + 1)).field(model.potential(e.j)).field(e.report_prob).field(e.d_star)
            .field(cutoff).field(e.residual).field(e.closed_form_gap).end_row();
        std::printf("%4zu %10s %12s %14s %7s %12s %16s\n", e.j + 1, format_double(model.potential(e.j)).c_str(),
                    format_double(e.report_prob).c_str(), format_double(e.d_star).c_str(), cutoff.c_str(),
                    format_double(e.residual).c_str(), format_double(e.closed_form_gap).c_str());
    }
    std::printf("asymptotic utility = %s\n", format_double(strategic::asymptotic_utility(report, pi, model)).c_str());
    if (!opt.out_dir.empty()) write_file(opt.out_dir, "fixed_point.csv", w.str());
    return exit_ok;
}

int cmd_identity_check(const AnalyzeOptions& opt) {
    using namespace scgame;
    const ParsedConfig parsed = load_config(opt.config_path);
    const MarketModel& model = parsed.need_model();
    CsvWriter w;
    w.field("i").field("j").field("residual").end_row();
    double worst = 0.0;
    for (std::size_t i = 0; i < model.states(); ++i) {
        const double h_ii = greedy::h_value(i, i, model);
        for (std::size_t j = 0; j < model.states(); ++j) {
            const double lhs = 16.0 * model.alpha() *
                               (greedy::h_value(j, j, model) * greedy::h_value(i, j, model) - h_ii * h_ii);
            const double gap = model.potential(j) - model.potential(i);
            const double res = std::abs(lhs + gap * gap);
            worst = std::max(worst, res);
            w.field(std::int64_t(i + 1)).field(std::int64_t(j + 1)).field(res).end_row();
        }
    }
    if (!opt.out_dir.empty()) write_file(opt.out_dir, "identity_check.csv", w.str());
    std::printf("max residual over all (i, j): %s\n", format_double(worst).c_str());
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dynamic supplier-manufacturer pricing game: equilibria, punitive policies, simulation"};
    app.require_subcommand(1);

    RunOptions run_opt;
    CLI::App* run = app.add_subcommand("run", "Run a named preset or a config file");
    auto* preset_opt = run->add_option("--preset", run_opt.preset, "Preset name: fig2-left | fig2-right");
    auto* config_opt = run->add_option("--config", run_opt.config_path, "Path to a config file");
    preset_opt->excludes(config_opt);
    run->add_option("--seed", run_opt.seed, "Master seed")->default_val(1);
    run->add_option("--out", run_opt.out_dir, "Output directory")->default_val("out");
    run->add_option("--replications", run_opt.replications, "Seeds per cell/run");
    run->add_flag("--trace", run_opt.trace, "Also write the per-slot trace.csv (single runs only)");
    run->add_flag("--quiet", run_opt.quiet, "Suppress the human summary");

    AnalyzeOptions an_opt;
    CLI::App* analyze = app.add_subcommand("analyze", "Threshold and fixed-point analyses");
    analyze->require_subcommand(1);
    CLI::App* pbg = analyze->add_subcommand("pi-bar-greedy", "Penalty threshold against under-reporting");
    pbg->add_option("--config", an_opt.config_path, "Config with a [model] section")->required();
    pbg->add_option("--grid-step", an_opt.grid_step, "Simplex grid step")->default_val(0.1);
    pbg->add_option("--pi-max", an_opt.pi_max, "Largest scanned penalty")->default_val(20.0);
    pbg->add_option("--pi-step", an_opt.pi_step, "Penalty scan step")->default_val(0.5);
    pbg->add_option("--out", an_opt.out_dir, "Directory for pi_bar_greedy.csv");
    pbg->add_flag("--quiet", an_opt.quiet, "Only print the threshold");

    CLI::App* pbs = analyze->add_subcommand("pi-bar-strategic", "Penalty threshold for the demand-feedback policy");
    pbs->add_option("--config", an_opt.config_path, "Config with [model] and [report]")->required();
    pbs->add_option("--pi-max", an_opt.pi_max_strategic, "Largest scanned penalty")->default_val(1e4);
    pbs->add_option("--out", an_opt.out_dir, "Directory for pi_bar_strategic.csv");
    pbs->add_flag("--quiet", an_opt.quiet, "Only print the threshold");

    CLI::App* fxp = analyze->add_subcommand("fixed-point", "Per-state demand-average attractors");
    fxp->add_option("--config", an_opt.config_path, "Config with [model] and [report]")->required();
    double pi_cli = 0.0;
    auto* pi_opt = fxp->add_option("--pi", pi_cli, "Penalty (defaults to the config's [policy] pi)");
    fxp->add_option("--out", an_opt.out_dir, "Directory for fixed_point.csv");

    CLI::App* idc = analyze->add_subcommand("identity-check", "Algebraic identity residuals of the h matrix");
    idc->add_option("--config", an_opt.config_path, "Config with a [model] section")->required();
    idc->add_option("--out", an_opt.out_dir, "Directory for identity_check.csv");

    CLI11_PARSE(app, argc, argv);
    run_opt.seed_given = run->count("--seed") > 0;

    try {
        if (run->parsed()) {
            if (run_opt.preset.empty() && run_opt.config_path.empty())
                throw scgame::ConfigError("run needs --preset or --config");
            return cmd_run(run_opt);
        }
        if (pbg->parsed()) return cmd_pi_bar_greedy(an_opt);
        if (pbs->parsed()) return cmd_pi_bar_strategic(an_opt);
        if (fxp->parsed()) {
            if (pi_opt->count() > 0) an_opt.pi_override = pi_cli;
            return cmd_fixed_point(an_opt);
        }
        if (idc->parsed()) return cmd_identity_check(an_opt);
    } catch (const scgame::AssumptionError& e) {
        std::fprintf(stderr, "assumption violated: %s\n", e.what());
        return exit_assumption;
    } catch (const scgame::ModelError& e) {
        std::fprintf(stderr, "model error: %s\n", e.what());
        return exit_assumption;
    } catch (const scgame::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_config;
    } catch (const scgame::PolicyError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_config;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return exit_ok;
}
