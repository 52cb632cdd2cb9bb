#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace rsrde {

using Symbol = std::uint16_t;

/// GF(2^b) arithmetic over a primitive polynomial, via log/antilog tables.
/// Immutable after construction; safe to share across threads.
class Field {
public:
    /// Conventional primitive polynomial for the given width (2 <= bits <= 12).
    explicit Field(int bits);
    Field(int bits, std::uint32_t primitive_poly);

    int bits() const { return bits_; }
    int size() const { return size_; }  // m = 2^bits
    std::uint32_t primitive_poly() const { return poly_; }

    Symbol mul(Symbol a, Symbol b) const {
        if (a == 0 || b == 0) return 0;
        return antilog_[log_[a] + log_[b]];
    }
    Symbol div(Symbol a, Symbol b) const;
    Symbol inv(Symbol a) const;
    /// alpha^e for any integer exponent (negative allowed)
    Symbol alpha_pow(int e) const;
    int log(Symbol a) const;

    /// Reference product: carry-less multiply reduced mod the primitive
    /// polynomial. Used to validate the tables.
    Symbol mul_slow(Symbol a, Symbol b) const;

private:
    int bits_;
    int size_;
    std::uint32_t poly_;
    std::vector<Symbol> antilog_;  // length 2(m-1), doubled to skip a mod
    std::vector<int> log_;         // length m, log_[0] unused
};

/// (n, k) Reed-Solomon code over `field`, narrow-sense (generator roots
/// alpha^1 .. alpha^{n-k}), systematic with the message in the top k
/// coefficient positions.
struct RsCode {
    RsCode(int n, int k, const Field& field);

    int n;
    int k;
    const Field* field;
    int d_min;                      // n - k + 1
    std::vector<Symbol> generator;  // monic, degree n-k, generator[0] = const term

    int parity() const { return n - k; }
};

using Codeword = std::vector<Symbol>;

struct ErasureSet {
    std::vector<int> positions;  // distinct indices in [0, n)
};

Codeword encode(const std::vector<Symbol>& message, const RsCode& code);

std::vector<Symbol> syndromes(const std::vector<Symbol>& word, const RsCode& code);
bool is_codeword(const std::vector<Symbol>& word, const RsCode& code);

/// Bounded-distance errors-and-erasures decoding: Berlekamp-Massey with the
/// locator seeded by the erasure polynomial, Chien search, Forney values.
/// Returns the unique codeword c with 2v + e < d_min when one exists, where
/// v counts disagreements with `received` on unerased positions and
/// e = |erasures|; otherwise nullopt. The returned word always passes a
/// syndrome recheck and the radius check.
std::optional<Codeword> decode_errors_erasures(const std::vector<Symbol>& received,
                                               const ErasureSet& erasures,
                                               const RsCode& code);

}  // namespace rsrde
