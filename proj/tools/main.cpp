#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>

#include "rsrde/harness.hpp"
#include "rsrde/rde.hpp"

using namespace rsrde;

namespace {

struct CommonOpts {
    std::vector<int> code{31, 25};
    std::string channel = "msc";
    std::vector<double> params;
    std::string strategy = "rde";
    std::vector<int> sed{8, 8};
    std::string output;
    ExperimentConfig cfg;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--code", o.code, "code as n,k")->expected(2)->delimiter(',');
    cmd->add_option("--field-bits", o.cfg.field_bits, "field width override (default from n)");
    cmd->add_option("--channel", o.channel, "msc | awgn")
        ->check(CLI::IsMember({"msc", "awgn"}));
    cmd->add_option("--params", o.params, "channel parameters: p values (msc) or Eb/N0 dB (awgn)")
        ->delimiter(',');
    cmd->add_option("--strategy", o.strategy, "gmd | sed | rd | rde")
        ->check(CLI::IsMember({"gmd", "sed", "rd", "rde"}));
    cmd->add_option("--ell", o.cfg.ell, "top-ell depth of the scheme");
    cmd->add_option("--rate", o.cfg.rate, "log2 pattern count for rd/rde");
    cmd->add_option("--sed", o.sed, "SED parameters l,f")->expected(2)->delimiter(',');
    cmd->add_option("--trials", o.cfg.trials, "frame cap per sweep point");
    cmd->add_option("--min-errors", o.cfg.min_errors, "early-stop error count");
    cmd->add_option("--seed", o.cfg.seed, "root seed");
    cmd->add_option("--threads", o.cfg.threads, "worker threads (output is thread-count invariant)");
    cmd->add_option("--output,-o", o.output, "CSV path (default stdout)");
    cmd->add_flag("--paper-scale", o.cfg.paper_scale, "allow n > 63 (very slow at desk scale)");
    cmd->set_config("--config", "", "key = value config file; flags override");
}

ExperimentConfig finalize(const CommonOpts& o) {
    ExperimentConfig cfg = o.cfg;
    cfg.n = o.code.at(0);
    cfg.k = o.code.at(1);
    cfg.channel = (o.channel == "awgn") ? ChannelKind::AwgnBpsk : ChannelKind::Msc;
    cfg.channel_params = o.params;
    if (o.strategy == "gmd") cfg.strategy = PatternStrategy::Gmd;
    else if (o.strategy == "sed") cfg.strategy = PatternStrategy::Sed;
    else if (o.strategy == "rd") cfg.strategy = PatternStrategy::Rd;
    else cfg.strategy = PatternStrategy::Rde;
    cfg.sed_l = o.sed.at(0);
    cfg.sed_f = o.sed.at(1);
    if (cfg.n > 63 && cfg.paper_scale)
        std::cerr << "warning: n = " << cfg.n
                  << " is paper scale; expect long runtimes at low FER\n";
    return cfg;
}

int write_out(const std::string& path, const std::function<void(std::ostream&)>& fn) {
    if (path.empty()) {
        fn(std::cout);
        return 0;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        std::cerr << "error: cannot open output file " << path << "\n";
        return 2;
    }
    fn(f);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"erasure-pattern-set construction and multi-trial errors-and-erasures "
                 "Reed-Solomon decoding simulator"};
    app.require_subcommand(1);

    CommonOpts sim_o, ana_o, bud_o, surf_o;
    CLI::App* sim = app.add_subcommand("simulate", "Monte-Carlo FER sweep");
    add_common(sim, sim_o);
    CLI::App* ana = app.add_subcommand("analytic", "2^-F approximation curve (msc, mBM-1, rde)");
    add_common(ana, ana_o);
    CLI::App* bud = app.add_subcommand("budget", "attempt budget per target exponent");
    add_common(bud, bud_o);
    std::vector<double> budget_exponents;
    bud->add_option("--exponents", budget_exponents, "target exponents (default: even grid)")
        ->delimiter(',');
    CLI::App* surf = app.add_subcommand("rde-surface", "dump an (s,t,R,D,F) grid as CSV");
    add_common(surf, surf_o);
    std::vector<double> s_list, t_list;
    surf->add_option("--s-list", s_list, "s grid (default log-spaced)")->delimiter(',');
    surf->add_option("--t-list", t_list, "t grid, negative (default log-spaced)")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) {
            const ExperimentConfig cfg = finalize(sim_o);
            const auto pts = run_experiment(cfg);
            return write_out(sim_o.output,
                             [&](std::ostream& os) { write_curve_csv(os, cfg, pts); });
        }
        if (ana->parsed()) {
            const ExperimentConfig cfg = finalize(ana_o);
            const auto pts = analytic_curve(cfg);
            return write_out(ana_o.output,
                             [&](std::ostream& os) { write_curve_csv(os, cfg, pts); });
        }
        if (bud->parsed()) {
            const ExperimentConfig cfg = finalize(bud_o);
            const auto rows = attempts_budget_report(cfg, budget_exponents);
            return write_out(bud_o.output,
                             [&](std::ostream& os) { write_budget_csv(os, cfg, rows); });
        }
        // rde-surface
        const ExperimentConfig cfg = finalize(surf_o);
        cfg.validate();
        if (cfg.channel != ChannelKind::Msc)
            throw ConfigError("rde-surface: only the msc channel is supported");
        const Field field(cfg.effective_bits());
        const MscChannel ch(cfg.channel_params.at(0), field.size());
        const std::vector<Symbol> dummy(static_cast<std::size_t>(cfg.n), 0);
        const ErrorPatternModel model = build_error_model(reliability_from_msc(dummy, ch), cfg.ell);
        const Eigen::ArrayXXd delta = mbm_distortion(cfg.ell);
        if (s_list.empty())
            for (int i = -4; i <= 4; ++i) s_list.push_back(std::exp2(i));
        if (t_list.empty())
            for (int i = -4; i <= 4; ++i) t_list.push_back(-std::exp2(i));
        return write_out(surf_o.output, [&](std::ostream& os) {
            rde_surface_csv(os, model, delta, s_list, t_list);
        });
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what();
        if (std::isfinite(e.frontier_rate()))
            std::cerr << " (achievable rate " << e.frontier_rate() << ")";
        std::cerr << "\n";
        return 3;
    } catch (const NonConvergenceError& e) {
        std::cerr << "non-convergence: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
}
