#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rsrde/errors.hpp"
#include "rsrde/multitrial.hpp"

namespace rsrde {

enum class ChannelKind { Msc, AwgnBpsk };

struct ExperimentConfig {
    int n = 31;
    int k = 25;
    int field_bits = 0;  // 0 -> smallest width with n <= 2^b - 1
    ChannelKind channel = ChannelKind::Msc;
    std::vector<double> channel_params;  // p values, or Eb/N0 in dB
    int ell = 1;
    PatternStrategy strategy = PatternStrategy::Rde;
    int rate = 8;  // log2 pattern count for Rd/Rde
    int sed_l = 8;
    int sed_f = 8;
    long trials = 100000;
    long min_errors = 100;
    std::uint64_t seed = 1;
    int threads = 1;
    bool paper_scale = false;  // allow n > 63 (slow at desk scale)

    int effective_bits() const;
    void validate() const;  // throws ConfigError
};

struct CurvePoint {
    double channel_param = 0.0;
    long frames = 0;
    long frame_errors = 0;
    long list_misses = 0;  // transmitted word absent from the candidate list
    long ml_errors = 0;    // present but not selected
    double fer = 0.0;
    double fer_ci95 = 0.0;
    std::optional<double> f_exponent;
    std::optional<double> pe_approx;
};

/// Monte-Carlo sweep over the configured channel parameters. Frames run in
/// fixed-size chunks so identical configs produce identical output for any
/// thread count; early stop triggers at chunk boundaries once min_errors
/// is reached.
std::vector<CurvePoint> run_experiment(const ExperimentConfig& cfg);

/// 2^{-F} approximation per channel parameter (m-SC, mBM-1, RDE only).
std::vector<CurvePoint> analytic_curve(const ExperimentConfig& cfg);

struct BudgetRow {
    double exponent;
    double rate;
    double attempts;  // 2^rate
};

/// Smallest attempt budget per target exponent. Empty `exponents` selects
/// an even grid over [0, N KL(1 - D/N || p)].
std::vector<BudgetRow> attempts_budget_report(const ExperimentConfig& cfg,
                                              const std::vector<double>& exponents = {});

const char* channel_name(ChannelKind c);
const char* strategy_name(PatternStrategy s);

/// Fixed column order: channel_param, frames, frame_errors, list_misses,
/// ml_errors, fer, fer_ci95, f_exponent, pe_approx. Config (with defaults
/// applied) is echoed in `#` header lines.
void write_curve_csv(std::ostream& os, const ExperimentConfig& cfg,
                     const std::vector<CurvePoint>& points);
void write_budget_csv(std::ostream& os, const ExperimentConfig& cfg,
                      const std::vector<BudgetRow>& rows);

}  // namespace rsrde
