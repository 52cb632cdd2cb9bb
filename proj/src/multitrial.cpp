#include "rsrde/multitrial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "rsrde/rde.hpp"
#include "rsrde/rng.hpp"

namespace rsrde {

int ErasurePattern::erasure_count() const {
    return static_cast<int>(std::count(letters.begin(), letters.end(), std::uint8_t{0}));
}

ErasurePatternSet gmd_patterns(const ErrorPatternModel& model, const RsCode& code) {
    const int n = model.positions();
    if (n != code.n) throw std::invalid_argument("gmd_patterns: model/code length mismatch");
    const int max_erase = (code.d_min % 2 == 1) ? code.d_min - 1 : code.d_min - 2;

    ErasurePatternSet set;
    set.strategy = PatternStrategy::Gmd;
    for (int g = 0; g <= max_erase; g += 2) {
        ErasurePattern pat;
        pat.letters.assign(n, 1);
        for (int r = 0; r < g; ++r) pat.letters[model.position_order[r]] = 0;
        set.patterns.push_back(std::move(pat));
    }
    return set;
}

ErasurePatternSet sed_patterns(const ErrorPatternModel& model, const RsCode& code, int l, int f) {
    const int n = model.positions();
    if (n != code.n) throw std::invalid_argument("sed_patterns: model/code length mismatch");
    if (f % 2 != 0) throw std::invalid_argument("sed_patterns: f must be even");
    if (!(0 <= f && f <= l && l <= n)) throw std::invalid_argument("sed_patterns: need f <= l <= N");

    ErasurePatternSet set;
    set.strategy = PatternStrategy::Sed;
    std::vector<int> combo;
    // subsets enumerated in lexicographic order over reliability ranks
    auto emit = [&]() {
        ErasurePattern pat;
        pat.letters.assign(n, 1);
        for (int r : combo) pat.letters[model.position_order[r]] = 0;
        set.patterns.push_back(std::move(pat));
    };
    for (int c = 0; c <= f && c < code.d_min; c += 2) {
        combo.assign(c, 0);
        for (int i = 0; i < c; ++i) combo[i] = i;
        if (c == 0) {
            emit();
            continue;
        }
        for (;;) {
            emit();
            int i = c - 1;
            while (i >= 0 && combo[i] == l - c + i) --i;
            if (i < 0) break;
            ++combo[i];
            for (int j = i + 1; j < c; ++j) combo[j] = combo[j - 1] + 1;
        }
    }
    return set;
}

ErasurePatternSet sample_patterns(const Eigen::ArrayXXd& Q, int count, std::uint64_t rng_seed,
                                  const ErrorPatternModel& model, int d_min) {
    const int n = model.positions();
    if (Q.rows() != n) throw std::invalid_argument("sample_patterns: Q/model size mismatch");
    const int nk = static_cast<int>(Q.cols());
    constexpr int kRetryCap = 100;

    ErasurePatternSet set;
    set.strategy = PatternStrategy::Rde;
    set.rng_seed = rng_seed;
    set.patterns.reserve(count);
    RngStream rng(rng_seed);

    ErasurePattern pat;
    pat.letters.resize(n);
    for (int c = 0; c < count; ++c) {
        int zeros = 0;
        for (int attempt = 0; attempt < kRetryCap; ++attempt) {
            zeros = 0;
            for (int r = 0; r < n; ++r) {
                const double roll = rng.next_double();
                double acc = 0.0;
                int letter = nk - 1;
                for (int k = 0; k < nk; ++k) {
                    acc += Q(r, k);
                    if (roll < acc) {
                        letter = k;
                        break;
                    }
                }
                pat.letters[model.position_order[r]] = static_cast<std::uint8_t>(letter);
                if (letter == 0) ++zeros;
            }
            if (zeros < d_min) break;
        }
        if (zeros >= d_min) {
            // keep only the d_min - 1 least reliable erasures
            int kept = 0;
            for (int r = 0; r < n; ++r) {
                std::uint8_t& letter = pat.letters[model.position_order[r]];
                if (letter != 0) continue;
                if (kept < d_min - 1)
                    ++kept;
                else
                    letter = 1;
            }
        }
        set.patterns.push_back(pat);
    }
    return set;
}

std::string patterns_to_text(const ErasurePatternSet& set) {
    std::string out;
    for (const auto& pat : set.patterns) {
        for (std::uint8_t v : pat.letters) out.push_back(static_cast<char>('0' + v));
        out.push_back('\n');
    }
    return out;
}

ErasurePatternSet patterns_from_text(const std::string& text, PatternStrategy strategy) {
    ErasurePatternSet set;
    set.strategy = strategy;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ErasurePattern pat;
        pat.letters.reserve(line.size());
        for (char c : line) {
            if (c < '0' || c > '9') throw std::invalid_argument("patterns_from_text: bad letter");
            pat.letters.push_back(static_cast<std::uint8_t>(c - '0'));
        }
        set.patterns.push_back(std::move(pat));
    }
    return set;
}

namespace {

struct PatternHash {
    std::size_t operator()(const std::vector<std::uint8_t>& v) const {
        std::size_t h = 1469598103934665603ull;
        for (std::uint8_t b : v) {
            h ^= b;
            h *= 1099511628211ull;
        }
        return h;
    }
};

}  // namespace

std::vector<Candidate> run_attempts(const ReliabilityMatrix& reliability,
                                    const ErasurePatternSet& set, const RsCode& code) {
    const int n = code.n;
    if (reliability.positions() != n)
        throw std::invalid_argument("run_attempts: reliability/code length mismatch");

    std::vector<Candidate> candidates;
    // identical patterns decode identically; skip repeats
    std::unordered_set<std::vector<std::uint8_t>, PatternHash> seen_patterns;
    std::vector<Symbol> word(n);
    ErasureSet erasures;
    for (int idx = 0; idx < set.size(); ++idx) {
        const ErasurePattern& pat = set.patterns[idx];
        if (static_cast<int>(pat.letters.size()) != n)
            throw std::invalid_argument("run_attempts: pattern length mismatch");
        if (!seen_patterns.insert(pat.letters).second) continue;

        erasures.positions.clear();
        for (int i = 0; i < n; ++i) {
            const std::uint8_t letter = pat.letters[i];
            if (letter == 0) {
                erasures.positions.push_back(i);
                word[i] = static_cast<Symbol>(reliability.order(i, 0));
            } else {
                word[i] = static_cast<Symbol>(reliability.order(i, letter - 1));
            }
        }
        if (static_cast<int>(erasures.positions.size()) >= code.d_min) continue;
        auto decoded = decode_errors_erasures(word, erasures, code);
        if (!decoded) continue;
        const bool dup = std::any_of(candidates.begin(), candidates.end(),
                                     [&](const Candidate& c) { return c.word == *decoded; });
        if (!dup) candidates.push_back({std::move(*decoded), idx});
    }
    return candidates;
}

const Candidate* ml_select_msc(const std::vector<Candidate>& candidates,
                               const std::vector<Symbol>& received) {
    const Candidate* best = nullptr;
    int best_dist = 0;
    for (const Candidate& c : candidates) {
        int dist = 0;
        for (std::size_t i = 0; i < received.size(); ++i)
            if (c.word[i] != received[i]) ++dist;
        if (!best || dist < best_dist) {
            best = &c;
            best_dist = dist;
        }
    }
    return best;
}

const Candidate* ml_select_awgn(const std::vector<Candidate>& candidates,
                                const std::vector<double>& observations, int bits_per_symbol) {
    const Candidate* best = nullptr;
    double best_dist = 0.0;
    for (const Candidate& c : candidates) {
        double dist = 0.0;
        std::size_t idx = 0;
        for (Symbol s : c.word)
            for (int j = 0; j < bits_per_symbol; ++j) {
                const double d = observations[idx++] - bpsk_level(s, j);
                dist += d * d;
            }
        if (!best || dist < best_dist) {
            best = &c;
            best_dist = dist;
        }
    }
    return best;
}

double min_distortion(const std::vector<std::uint8_t>& x, const ErasurePatternSet& set,
                      const Eigen::ArrayXXd& delta) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& pat : set.patterns) best = std::min(best, distortion(x, pat.letters, delta));
    return best;
}

std::vector<std::uint8_t> true_error_pattern(const ReliabilityMatrix& reliability,
                                             const Codeword& transmitted, int ell) {
    const int n = reliability.positions();
    std::vector<std::uint8_t> x(n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 1; j <= ell; ++j)
            if (reliability.order(i, j - 1) == transmitted[i]) {
                x[i] = static_cast<std::uint8_t>(j);
                break;
            }
    return x;
}

}  // namespace rsrde
