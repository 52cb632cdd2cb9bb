#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "rsrde/channels.hpp"
#include "rsrde/galois.hpp"

namespace rsrde {

/// Per-position instruction in codeword order: 0 erases the position,
/// k >= 1 decodes with the k-th most likely symbol as the hard decision.
struct ErasurePattern {
    std::vector<std::uint8_t> letters;
    int erasure_count() const;
};

enum class PatternStrategy { Gmd, Sed, Rd, Rde };

struct ErasurePatternSet {
    std::vector<ErasurePattern> patterns;
    PatternStrategy strategy = PatternStrategy::Gmd;
    std::uint64_t rng_seed = 0;
    int size() const { return static_cast<int>(patterns.size()); }
};

/// Nested erasure of 0, 2, 4, ... d_min-1 least reliable positions
/// (d_min-2 when d_min is even), hard-decision letter 1 elsewhere.
ErasurePatternSet gmd_patterns(const ErrorPatternModel& model, const RsCode& code);

/// Every even-cardinality subset (size <= f, and below d_min) of the l
/// least reliable positions. Requires f even and f <= l <= N.
ErasurePatternSet sed_patterns(const ErrorPatternModel& model, const RsCode& code, int l, int f);

/// `count` patterns with independent per-position letters drawn from the
/// rows of Q (which live in reliability order; rows are mapped back to
/// codeword positions through model.position_order). Patterns that erase
/// >= d_min positions are redrawn a few times, then clipped to keep only
/// the d_min-1 least reliable erasures. Duplicates are retained.
ErasurePatternSet sample_patterns(const Eigen::ArrayXXd& Q, int count, std::uint64_t rng_seed,
                                  const ErrorPatternModel& model, int d_min);

/// One pattern per line, letters as digits.
std::string patterns_to_text(const ErasurePatternSet& set);
ErasurePatternSet patterns_from_text(const std::string& text,
                                     PatternStrategy strategy = PatternStrategy::Gmd);

struct Candidate {
    Codeword word;
    int pattern_index;  // first pattern that produced this word
};

/// Runs one errors-and-erasures attempt per pattern against the ranked
/// symbol lists and returns the de-duplicated decoded codewords. Failed
/// attempts contribute nothing.
std::vector<Candidate> run_attempts(const ReliabilityMatrix& reliability,
                                    const ErasurePatternSet& set, const RsCode& code);

/// Maximum-likelihood pick: minimum symbol Hamming distance to the received
/// word. Ties keep the earliest pattern index. nullptr when empty.
const Candidate* ml_select_msc(const std::vector<Candidate>& candidates,
                               const std::vector<Symbol>& received);

/// Maximum-likelihood pick for AWGN observations: minimum squared Euclidean
/// distance over the bit-mapped signal.
const Candidate* ml_select_awgn(const std::vector<Candidate>& candidates,
                                const std::vector<double>& observations, int bits_per_symbol);

/// min over the set of sum_i delta(x_i, pattern_i); lets the harness
/// estimate the list-miss probability without running the decoder.
double min_distortion(const std::vector<std::uint8_t>& x, const ErasurePatternSet& set,
                      const Eigen::ArrayXXd& delta);

/// Rank (1-based) of the transmitted symbol at each position, 0 when it is
/// outside the top ell.
std::vector<std::uint8_t> true_error_pattern(const ReliabilityMatrix& reliability,
                                             const Codeword& transmitted, int ell);

}  // namespace rsrde
