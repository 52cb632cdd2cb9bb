#include "rsrde/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <thread>

#include "rsrde/rde.hpp"
#include "rsrde/rng.hpp"

namespace rsrde {

namespace {

constexpr long kChunk = 256;  // frames per scheduling chunk, thread-count independent

enum StreamSalt : std::uint64_t {
    kSaltFrame = 1,
    kSaltPointPatterns = 2,
    kSaltFramePatterns = 3,
};

std::uint64_t frame_key(std::size_t point_index, long frame) {
    return (static_cast<std::uint64_t>(point_index) << 40) ^ static_cast<std::uint64_t>(frame);
}

struct FrameOutcome {
    bool error = false;
    bool list_miss = false;
};

struct Tally {
    long errors = 0;
    long list_misses = 0;
    long ml_errors = 0;
};

// Runs fn over frame indices in fixed chunks until the trial cap or the
// error target is hit. The chunk partition is independent of the thread
// count, and integer tallies merge exactly, so output is bit-reproducible.
void run_frames(const ExperimentConfig& cfg,
                const std::function<FrameOutcome(long)>& fn, CurvePoint& pt) {
    long frames = 0;
    Tally total;
    while (frames < cfg.trials && total.errors < cfg.min_errors) {
        const long todo = std::min(kChunk, cfg.trials - frames);
        const int nthreads = std::max(1, cfg.threads);
        std::vector<Tally> local(nthreads);
        auto work = [&](int tid) {
            const long begin = frames + todo * tid / nthreads;
            const long end = frames + todo * (tid + 1) / nthreads;
            for (long f = begin; f < end; ++f) {
                const FrameOutcome out = fn(f);
                if (out.error) ++local[tid].errors;
                if (out.list_miss) ++local[tid].list_misses;
                if (out.error && !out.list_miss) ++local[tid].ml_errors;
            }
        };
        if (nthreads == 1) {
            work(0);
        } else {
            std::vector<std::thread> pool;
            pool.reserve(nthreads);
            for (int t = 0; t < nthreads; ++t) pool.emplace_back(work, t);
            for (auto& th : pool) th.join();
        }
        for (const Tally& l : local) {
            total.errors += l.errors;
            total.list_misses += l.list_misses;
            total.ml_errors += l.ml_errors;
        }
        frames += todo;
    }
    pt.frames = frames;
    pt.frame_errors = total.errors;
    pt.list_misses = total.list_misses;
    pt.ml_errors = total.ml_errors;
    pt.fer = frames > 0 ? static_cast<double>(total.errors) / frames : 0.0;
    pt.fer_ci95 = frames > 0 ? 1.96 * std::sqrt(pt.fer * (1.0 - pt.fer) / frames) : 0.0;
}

Codeword random_codeword(const RsCode& code, RngStream& rng) {
    std::vector<Symbol> msg(code.k);
    for (Symbol& s : msg)
        s = static_cast<Symbol>(rng.next_below(static_cast<std::uint64_t>(code.field->size())));
    return encode(msg, code);
}

// i.i.d. surrogate of the per-frame AWGN error model; used only to seed the
// per-frame (s, t) solves deterministically.
ErrorPatternModel awgn_surrogate_model(const ExperimentConfig& cfg, const AwgnBpskChannel& ch) {
    const int m = 1 << ch.bits_per_symbol;
    const double arg = 1.0 / (ch.noise_std() * std::sqrt(2.0));
    const double bit_err = 0.5 * std::erfc(arg);
    const double p1 = std::pow(1.0 - bit_err, ch.bits_per_symbol);
    ErrorPatternModel model;
    model.ell = cfg.ell;
    model.P.resize(cfg.n, cfg.ell + 1);
    const double rest = (1.0 - p1) / (m - 1);
    for (int i = 0; i < cfg.n; ++i) {
        model.P(i, 1) = p1;
        for (int j = 2; j <= cfg.ell; ++j) model.P(i, j) = rest;
        model.P(i, 0) = std::max(0.0, 1.0 - p1 - (cfg.ell - 1) * rest);
    }
    model.position_order.resize(cfg.n);
    for (int i = 0; i < cfg.n; ++i) model.position_order[i] = i;
    return model;
}

Eigen::ArrayXXd pattern_distribution(const ExperimentConfig& cfg, const ErrorPatternModel& model,
                                     const Eigen::ArrayXXd& delta, int d_min,
                                     const SolveOptions& opts) {
    if (cfg.strategy == PatternStrategy::Rd) {
        try {
            return blahut_rd(model, delta, static_cast<double>(d_min)).Q;
        } catch (const InfeasibleError&) {
            if (!opts.clamp_to_frontier) throw;
            // hopeless frame: fall back to plain hard decisions
            Eigen::ArrayXXd q = Eigen::ArrayXXd::Zero(model.positions(), cfg.ell + 1);
            q.col(1) = 1.0;
            return q;
        }
    }
    return solve_st(model, delta, static_cast<double>(cfg.rate), static_cast<double>(d_min), opts)
        .point.Q;
}

}  // namespace

int ExperimentConfig::effective_bits() const {
    if (field_bits > 0) return field_bits;
    int b = 2;
    while ((1 << b) - 1 < n) ++b;
    return b;
}

void ExperimentConfig::validate() const {
    const int b = effective_bits();
    if (b < 2 || b > 12) throw ConfigError("config: field width outside [2, 12]");
    const int m = 1 << b;
    if (!(0 < k && k < n && n <= m - 1)) throw ConfigError("config: require 0 < k < n <= 2^b - 1");
    if (n > 63 && !paper_scale)
        throw ConfigError("config: n > 63 is far beyond desk runtime; pass --paper-scale to force");
    if (channel_params.empty()) throw ConfigError("config: no channel parameters");
    if (channel == ChannelKind::Msc)
        for (double p : channel_params)
            if (!(p > 0.0 && p <= 1.0 && p > (1.0 - p) / (m - 1)))
                throw ConfigError("config: msc p must satisfy (1-p)/(m-1) < p <= 1");
    if (ell < 1 || ell >= m) throw ConfigError("config: require 1 <= ell < m");
    if (strategy == PatternStrategy::Rd || strategy == PatternStrategy::Rde) {
        if (rate < 0 || rate > 30) throw ConfigError("config: rate outside [0, 30]");
        if (static_cast<long long>(1ll << rate) * n > (1ll << 31))
            throw ConfigError("config: pattern set would exceed the memory guard");
    }
    if (strategy == PatternStrategy::Sed) {
        if (sed_f % 2 != 0 || sed_f < 0 || sed_f > sed_l || sed_l > n)
            throw ConfigError("config: SED needs even f with f <= l <= n");
    }
    if (trials < 1) throw ConfigError("config: trials must be >= 1");
    if (min_errors < 1) throw ConfigError("config: min_errors must be >= 1");
    if (threads < 1 || threads > 256) throw ConfigError("config: threads outside [1, 256]");
}

std::vector<CurvePoint> run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const Field field(cfg.effective_bits());
    const RsCode code(cfg.n, cfg.k, field);
    const Eigen::ArrayXXd delta = mbm_distortion(cfg.ell);
    const int d_min = code.d_min;

    std::vector<CurvePoint> points;
    points.reserve(cfg.channel_params.size());

    for (std::size_t pi = 0; pi < cfg.channel_params.size(); ++pi) {
        const double param = cfg.channel_params[pi];
        CurvePoint pt;
        pt.channel_param = param;

        if (cfg.channel == ChannelKind::Msc) {
            const MscChannel ch(param, field.size());
            // rows are identical across positions, so the model and the
            // pattern set are fixed for the whole sweep point
            const std::vector<Symbol> dummy(static_cast<std::size_t>(cfg.n), 0);
            const ErrorPatternModel model = build_error_model(reliability_from_msc(dummy, ch),
                                                              cfg.ell);
            ErasurePatternSet set;
            try {
                switch (cfg.strategy) {
                    case PatternStrategy::Gmd: set = gmd_patterns(model, code); break;
                    case PatternStrategy::Sed: set = sed_patterns(model, code, cfg.sed_l, cfg.sed_f); break;
                    default: {
                        SolveOptions opts;
                        opts.tol = 1e-9;
                        const Eigen::ArrayXXd q =
                            pattern_distribution(cfg, model, delta, d_min, opts);
                        set = sample_patterns(
                            q, 1 << cfg.rate,
                            derive_stream(cfg.seed, pi, kSaltPointPatterns).next_u64(), model,
                            d_min);
                        set.strategy = cfg.strategy;
                        break;
                    }
                }
            } catch (const InfeasibleError& err) {
                throw InfeasibleError(std::string(err.what()) + " (channel parameter " +
                                          std::to_string(param) + ")",
                                      err.frontier_rate());
            } catch (const NonConvergenceError& err) {
                throw NonConvergenceError(std::string(err.what()) + " (channel parameter " +
                                              std::to_string(param) + ")",
                                          err.position());
            }

            run_frames(cfg, [&](long frame) {
                RngStream rng = derive_stream(cfg.seed, frame_key(pi, frame), kSaltFrame);
                const Codeword cw = random_codeword(code, rng);
                const std::vector<Symbol> rx = transmit_msc(cw, ch, rng);
                const ReliabilityMatrix rel = reliability_from_msc(rx, ch);
                const auto candidates = run_attempts(rel, set, code);
                const Candidate* sel = ml_select_msc(candidates, rx);
                FrameOutcome out;
                out.list_miss = std::none_of(candidates.begin(), candidates.end(),
                                             [&](const Candidate& c) { return c.word == cw; });
                out.error = (sel == nullptr) || (sel->word != cw);
                return out;
            }, pt);

            if (cfg.strategy == PatternStrategy::Rde && cfg.ell == 1) {
                try {
                    const double F = max_exponent(cfg.rate, d_min, cfg.n, param);
                    pt.f_exponent = F;
                    pt.pe_approx = std::exp2(-F);
                } catch (const std::domain_error&) {
                }
            }
        } else {
            const AwgnBpskChannel ch(param, field.bits(),
                                     static_cast<double>(cfg.k) / cfg.n);
            // deterministic warm start shared by all frames of this point
            std::optional<std::pair<double, double>> base_st;
            if (cfg.strategy == PatternStrategy::Rde) {
                try {
                    SolveOptions opts;
                    opts.tol = 1e-9;
                    opts.clamp_to_frontier = true;
                    const StSolution sol =
                        solve_st(awgn_surrogate_model(cfg, ch), delta,
                                 static_cast<double>(cfg.rate), static_cast<double>(d_min), opts);
                    base_st = {sol.params.s, sol.params.t};
                } catch (const InfeasibleError&) {
                } catch (const NonConvergenceError&) {
                }
            }

            run_frames(cfg, [&](long frame) {
                RngStream rng = derive_stream(cfg.seed, frame_key(pi, frame), kSaltFrame);
                const Codeword cw = random_codeword(code, rng);
                const std::vector<double> obs = transmit_awgn_bpsk(cw, ch, rng);
                const ReliabilityMatrix rel = reliability_from_awgn(obs, ch);
                const ErrorPatternModel model = build_error_model(rel, cfg.ell);

                ErasurePatternSet set;
                switch (cfg.strategy) {
                    case PatternStrategy::Gmd: set = gmd_patterns(model, code); break;
                    case PatternStrategy::Sed: set = sed_patterns(model, code, cfg.sed_l, cfg.sed_f); break;
                    default: {
                        SolveOptions opts;
                        opts.tol = 1e-8;
                        opts.clamp_to_frontier = true;  // per-frame targets may be off-surface
                        opts.initial_st = base_st;
                        const Eigen::ArrayXXd q =
                            pattern_distribution(cfg, model, delta, d_min, opts);
                        set = sample_patterns(
                            q, 1 << cfg.rate,
                            derive_stream(cfg.seed, frame_key(pi, frame), kSaltFramePatterns)
                                .next_u64(),
                            model, d_min);
                        set.strategy = cfg.strategy;
                        break;
                    }
                }
                const auto candidates = run_attempts(rel, set, code);
                const Candidate* sel = ml_select_awgn(candidates, obs, field.bits());
                FrameOutcome out;
                out.list_miss = std::none_of(candidates.begin(), candidates.end(),
                                             [&](const Candidate& c) { return c.word == cw; });
                out.error = (sel == nullptr) || (sel->word != cw);
                return out;
            }, pt);
        }

        points.push_back(pt);
    }
    return points;
}

std::vector<CurvePoint> analytic_curve(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.channel != ChannelKind::Msc || cfg.strategy != PatternStrategy::Rde || cfg.ell != 1)
        throw ConfigError("analytic: requires the m-SC channel with the mBM-1 RDE scheme");
    const int d_min = cfg.n - cfg.k + 1;
    std::vector<CurvePoint> points;
    for (double p : cfg.channel_params) {
        CurvePoint pt;
        pt.channel_param = p;
        const double F = max_exponent(cfg.rate, d_min, cfg.n, p);  // throws when out of range
        pt.f_exponent = F;
        pt.pe_approx = std::exp2(-F);
        points.push_back(pt);
    }
    return points;
}

std::vector<BudgetRow> attempts_budget_report(const ExperimentConfig& cfg,
                                              const std::vector<double>& exponents) {
    cfg.validate();
    if (cfg.channel != ChannelKind::Msc || cfg.ell != 1)
        throw ConfigError("budget: requires the m-SC channel with ell = 1");
    const double p = cfg.channel_params.front();
    const int d_min = cfg.n - cfg.k + 1;
    const double d_bar = static_cast<double>(d_min) / cfg.n;
    if (p < 1.0 - d_bar)
        throw ConfigError("budget: requires p >= 1 - d_min/N");
    const double f_max = cfg.n * kl_divergence(1.0 - d_bar, p);

    std::vector<double> grid = exponents;
    if (grid.empty()) {
        for (int i = 0; i <= 10; ++i) grid.push_back(f_max * i / 10.0);
    }
    std::vector<BudgetRow> rows;
    for (double f : grid) {
        BudgetRow row;
        row.exponent = f;
        row.rate = min_rate_for_exponent(f, d_min, cfg.n, p);
        row.attempts = std::exp2(row.rate);
        rows.push_back(row);
    }
    return rows;
}

const char* channel_name(ChannelKind c) {
    return c == ChannelKind::Msc ? "msc" : "awgn";
}

const char* strategy_name(PatternStrategy s) {
    switch (s) {
        case PatternStrategy::Gmd: return "gmd";
        case PatternStrategy::Sed: return "sed";
        case PatternStrategy::Rd: return "rd";
        default: return "rde";
    }
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_config_header(std::ostream& os, const ExperimentConfig& cfg) {
    os << "# code_n = " << cfg.n << "\n";
    os << "# code_k = " << cfg.k << "\n";
    os << "# field_bits = " << cfg.effective_bits() << "\n";
    os << "# channel = " << channel_name(cfg.channel) << "\n";
    os << "# params =";
    for (std::size_t i = 0; i < cfg.channel_params.size(); ++i)
        os << (i ? "," : " ") << fmt(cfg.channel_params[i]);
    os << "\n";
    os << "# ell = " << cfg.ell << "\n";
    os << "# strategy = " << strategy_name(cfg.strategy) << "\n";
    os << "# rate = " << cfg.rate << "\n";
    os << "# sed_l = " << cfg.sed_l << "\n";
    os << "# sed_f = " << cfg.sed_f << "\n";
    os << "# trials = " << cfg.trials << "\n";
    os << "# min_errors = " << cfg.min_errors << "\n";
    os << "# seed = " << cfg.seed << "\n";
}

}  // namespace

void write_curve_csv(std::ostream& os, const ExperimentConfig& cfg,
                     const std::vector<CurvePoint>& points) {
    write_config_header(os, cfg);
    os << "channel_param,frames,frame_errors,list_misses,ml_errors,fer,fer_ci95,"
          "f_exponent,pe_approx\n";
    for (const CurvePoint& pt : points) {
        os << fmt(pt.channel_param) << ',' << pt.frames << ',' << pt.frame_errors << ','
           << pt.list_misses << ',' << pt.ml_errors << ',';
        if (pt.frames > 0) os << fmt(pt.fer) << ',' << fmt(pt.fer_ci95);
        else os << ',';
        os << ',';
        if (pt.f_exponent) os << fmt(*pt.f_exponent);
        os << ',';
        if (pt.pe_approx) os << fmt(*pt.pe_approx);
        os << '\n';
    }
}

void write_budget_csv(std::ostream& os, const ExperimentConfig& cfg,
                      const std::vector<BudgetRow>& rows) {
    write_config_header(os, cfg);
    os << "target_f,required_rate,attempts\n";
    for (const BudgetRow& row : rows)
        os << fmt(row.exponent) << ',' << fmt(row.rate) << ',' << fmt(row.attempts) << '\n';
}

}  // namespace rsrde
