#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rsrde/galois.hpp"
#include "rsrde/rng.hpp"

namespace rsrde {

/// m-ary symmetric channel: a symbol survives with probability p, otherwise
/// it is replaced uniformly by one of the other m-1 symbols. Requires
/// p > (1-p)/(m-1) so the hard decision is the received symbol.
struct MscChannel {
    double p;
    int m;
    MscChannel(double p_, int m_);
};

/// AWGN channel with BPSK bit mapping, unit symbol energy. `snr_db` is
/// Eb/N0 per information bit; the code rate is folded into the noise
/// variance so FER curves plot against Eb/N0.
struct AwgnBpskChannel {
    double snr_db;
    int bits_per_symbol;
    double code_rate;  // K/N
    AwgnBpskChannel(double snr_db_, int bits_per_symbol_, double code_rate_);
    double noise_std() const;
};

/// bit j (LSB first) of a symbol maps to +1 when clear, -1 when set
inline double bpsk_level(Symbol s, int bit) { return ((s >> bit) & 1) ? -1.0 : 1.0; }

/// Per-position symbol posteriors. `order` row i is a permutation of the m
/// symbols sorted by posterior descending (ties: lower symbol index first).
struct ReliabilityMatrix {
    Eigen::ArrayXXd pi;     // N x m, rows sum to 1
    Eigen::ArrayXXi order;  // N x m, order(i, 0) = most likely symbol
    int positions() const { return static_cast<int>(pi.rows()); }
};

/// Source model over ranks: column j >= 1 holds the posterior of the j-th
/// most likely symbol, column 0 the remainder. `position_order` lists
/// codeword positions by ascending top-symbol posterior (LRPs first).
struct ErrorPatternModel {
    int ell = 1;
    Eigen::ArrayXXd P;  // N x (ell+1), rows sum to 1
    std::vector<int> position_order;
    int positions() const { return static_cast<int>(P.rows()); }
};

std::vector<Symbol> transmit_msc(const Codeword& cw, const MscChannel& ch, RngStream& rng);

/// Returns N*b reals: each symbol expanded LSB-first to b bits, mapped to
/// +-1, plus white Gaussian noise.
std::vector<double> transmit_awgn_bpsk(const Codeword& cw, const AwgnBpskChannel& ch,
                                       RngStream& rng);

ReliabilityMatrix reliability_from_msc(const std::vector<Symbol>& received, const MscChannel& ch);

/// Exact per-symbol posteriors from bit observations (bits independent
/// given the symbol, uniform symbol prior).
ReliabilityMatrix reliability_from_awgn(const std::vector<double>& observations,
                                        const AwgnBpskChannel& ch);

ErrorPatternModel build_error_model(const ReliabilityMatrix& reliability, int ell);

}  // namespace rsrde
