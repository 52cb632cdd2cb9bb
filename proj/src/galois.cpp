#include "rsrde/galois.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace rsrde {

namespace {

std::uint32_t conventional_poly(int bits) {
    switch (bits) {
        case 2: return 0x7;      // x^2 + x + 1
        case 3: return 0xB;      // x^3 + x + 1
        case 4: return 0x13;     // x^4 + x + 1
        case 5: return 0x25;     // x^5 + x^2 + 1
        case 6: return 0x43;     // x^6 + x + 1
        case 7: return 0x89;     // x^7 + x^3 + 1
        case 8: return 0x11D;    // x^8 + x^4 + x^3 + x^2 + 1
        case 9: return 0x211;    // x^9 + x^4 + 1
        case 10: return 0x409;   // x^10 + x^3 + 1
        case 11: return 0x805;   // x^11 + x^2 + 1
        case 12: return 0x1053;  // x^12 + x^6 + x^4 + x + 1
        default:
            throw std::invalid_argument("Field: unsupported width " + std::to_string(bits));
    }
}

int poly_degree(const std::vector<Symbol>& p) {
    for (int i = static_cast<int>(p.size()) - 1; i >= 0; --i)
        if (p[i] != 0) return i;
    return 0;
}

Symbol poly_eval(const std::vector<Symbol>& p, Symbol x, const Field& f) {
    Symbol acc = 0;
    for (int i = static_cast<int>(p.size()) - 1; i >= 0; --i)
        acc = static_cast<Symbol>(f.mul(acc, x) ^ p[i]);
    return acc;
}

// Formal derivative evaluated at x; in characteristic 2 only odd-degree
// terms survive: p'(x) = sum_{i odd} p_i x^{i-1}.
Symbol poly_deriv_eval(const std::vector<Symbol>& p, Symbol x, const Field& f) {
    Symbol acc = 0;
    Symbol xpow = 1;
    const Symbol x2 = f.mul(x, x);
    for (std::size_t i = 1; i < p.size(); i += 2) {
        acc = static_cast<Symbol>(acc ^ f.mul(p[i], xpow));
        xpow = f.mul(xpow, x2);
    }
    return acc;
}

}  // namespace

Field::Field(int bits) : Field(bits, conventional_poly(bits)) {}

Field::Field(int bits, std::uint32_t primitive_poly)
    : bits_(bits), size_(1 << bits), poly_(primitive_poly) {
    if (bits < 2 || bits > 12) throw std::invalid_argument("Field: width must be in [2, 12]");
    antilog_.assign(2 * (size_ - 1), 0);
    log_.assign(size_, 0);
    std::uint32_t x = 1;
    for (int i = 0; i < size_ - 1; ++i) {
        antilog_[i] = static_cast<Symbol>(x);
        log_[x] = i;
        x <<= 1;
        if (x & static_cast<std::uint32_t>(size_)) x ^= poly_;
    }
    if (x != 1) throw std::invalid_argument("Field: polynomial is not primitive");
    for (int i = 0; i < size_ - 1; ++i) antilog_[i + size_ - 1] = antilog_[i];
}

Symbol Field::div(Symbol a, Symbol b) const {
    if (b == 0) throw std::domain_error("Field::div by zero");
    if (a == 0) return 0;
    return antilog_[log_[a] - log_[b] + size_ - 1];
}

Symbol Field::inv(Symbol a) const {
    if (a == 0) throw std::domain_error("Field::inv of zero");
    return antilog_[size_ - 1 - log_[a]];
}

Symbol Field::alpha_pow(int e) const {
    const int q = size_ - 1;
    int r = e % q;
    if (r < 0) r += q;
    return antilog_[r];
}

int Field::log(Symbol a) const {
    if (a == 0) throw std::domain_error("Field::log of zero");
    return log_[a];
}

Symbol Field::mul_slow(Symbol a, Symbol b) const {
    std::uint32_t acc = 0;
    std::uint32_t aa = a;
    std::uint32_t bb = b;
    while (bb) {
        if (bb & 1) acc ^= aa;
        bb >>= 1;
        aa <<= 1;
        if (aa & static_cast<std::uint32_t>(size_)) aa ^= poly_;
    }
    return static_cast<Symbol>(acc);
}

RsCode::RsCode(int n_, int k_, const Field& f) : n(n_), k(k_), field(&f), d_min(n_ - k_ + 1) {
    if (!(0 < k && k < n && n <= f.size() - 1))
        throw std::invalid_argument("RsCode: require 0 < k < n <= m - 1");
    // g(x) = prod_{i=1}^{n-k} (x - alpha^i)
    generator.assign(1, 1);
    for (int i = 1; i <= n - k; ++i) {
        const Symbol root = f.alpha_pow(i);
        generator.push_back(0);
        for (int j = static_cast<int>(generator.size()) - 1; j >= 1; --j)
            generator[j] = static_cast<Symbol>(generator[j - 1] ^ f.mul(generator[j], root));
        generator[0] = f.mul(generator[0], root);
    }
}

Codeword encode(const std::vector<Symbol>& message, const RsCode& code) {
    if (static_cast<int>(message.size()) != code.k)
        throw std::invalid_argument("encode: message length != k");
    const Field& f = *code.field;
    const int p = code.parity();
    std::vector<Symbol> rem(p, 0);
    for (int j = code.k - 1; j >= 0; --j) {
        const Symbol feedback = static_cast<Symbol>(message[j] ^ rem[p - 1]);
        for (int i = p - 1; i >= 1; --i)
            rem[i] = static_cast<Symbol>(rem[i - 1] ^ f.mul(feedback, code.generator[i]));
        rem[0] = f.mul(feedback, code.generator[0]);
    }
    Codeword cw(code.n);
    for (int i = 0; i < p; ++i) cw[i] = rem[i];
    for (int j = 0; j < code.k; ++j) cw[p + j] = message[j];
    return cw;
}

std::vector<Symbol> syndromes(const std::vector<Symbol>& word, const RsCode& code) {
    const Field& f = *code.field;
    std::vector<Symbol> s(code.parity());
    for (int j = 1; j <= code.parity(); ++j) {
        const Symbol x = f.alpha_pow(j);
        Symbol acc = 0;
        for (int i = code.n - 1; i >= 0; --i) acc = static_cast<Symbol>(f.mul(acc, x) ^ word[i]);
        s[j - 1] = acc;
    }
    return s;
}

bool is_codeword(const std::vector<Symbol>& word, const RsCode& code) {
    const auto s = syndromes(word, code);
    return std::all_of(s.begin(), s.end(), [](Symbol v) { return v == 0; });
}

std::optional<Codeword> decode_errors_erasures(const std::vector<Symbol>& received,
                                               const ErasureSet& erasures,
                                               const RsCode& code) {
    const Field& f = *code.field;
    const int n = code.n;
    const int nroots = code.parity();
    const int e = static_cast<int>(erasures.positions.size());
    if (static_cast<int>(received.size()) != n)
        throw std::invalid_argument("decode: received length != n");
    if (e >= code.d_min) return std::nullopt;  // radius is empty

    const auto synd = syndromes(received, code);
    const bool clean = std::all_of(synd.begin(), synd.end(), [](Symbol v) { return v == 0; });
    if (clean) return received;  // already a codeword; 2*0 + e < d_min holds

    // Locator seeded with the erasure polynomial prod (1 - alpha^pos x).
    std::vector<Symbol> lambda(nroots + 1, 0);
    lambda[0] = 1;
    for (int pos : erasures.positions) {
        if (pos < 0 || pos >= n) throw std::invalid_argument("decode: erasure index out of range");
        const Symbol x = f.alpha_pow(pos);
        for (int i = std::min(poly_degree(lambda), nroots - 1); i >= 0; --i)
            lambda[i + 1] = static_cast<Symbol>(lambda[i + 1] ^ f.mul(lambda[i], x));
    }
    std::vector<Symbol> b = lambda;
    int el = e;  // connection length
    for (int r = e + 1; r <= nroots; ++r) {
        Symbol discr = 0;
        for (int i = 0; i < r && i <= nroots; ++i)
            discr = static_cast<Symbol>(discr ^ f.mul(lambda[i], synd[r - 1 - i]));
        if (discr == 0) {
            b.insert(b.begin(), 0);
            b.pop_back();
            continue;
        }
        std::vector<Symbol> t(nroots + 1, 0);
        t[0] = lambda[0];
        for (int i = 0; i < nroots; ++i)
            t[i + 1] = static_cast<Symbol>(lambda[i + 1] ^ f.mul(discr, b[i]));
        if (2 * el <= r + e - 1) {
            el = r + e - el;
            for (int i = 0; i <= nroots; ++i) b[i] = lambda[i] ? f.div(lambda[i], discr) : 0;
        } else {
            b.insert(b.begin(), 0);
            b.pop_back();
        }
        lambda = std::move(t);
    }

    const int deg_lambda = poly_degree(lambda);
    if (deg_lambda == 0) return std::nullopt;

    // Chien search over the code positions
    std::vector<int> roots;
    roots.reserve(deg_lambda);
    for (int i = 0; i < n; ++i) {
        if (poly_eval(lambda, f.alpha_pow(-i), f) == 0) {
            roots.push_back(i);
            if (static_cast<int>(roots.size()) > deg_lambda) return std::nullopt;
        }
    }
    if (static_cast<int>(roots.size()) != deg_lambda) return std::nullopt;

    // Omega(x) = S(x) Lambda(x) mod x^{nroots}
    std::vector<Symbol> omega(nroots, 0);
    for (int i = 0; i < nroots; ++i) {
        Symbol acc = 0;
        for (int j = 0; j <= std::min(i, deg_lambda); ++j)
            acc = static_cast<Symbol>(acc ^ f.mul(lambda[j], synd[i - j]));
        omega[i] = acc;
    }

    Codeword fixed = received;
    for (int pos : roots) {
        const Symbol xinv = f.alpha_pow(-pos);
        const Symbol den = poly_deriv_eval(lambda, xinv, f);
        if (den == 0) return std::nullopt;
        const Symbol num = poly_eval(omega, xinv, f);
        fixed[pos] = static_cast<Symbol>(fixed[pos] ^ f.div(num, den));
    }

    if (!is_codeword(fixed, code)) return std::nullopt;
    std::vector<char> erased(n, 0);
    for (int pos : erasures.positions) erased[pos] = 1;
    int v = 0;
    for (int i = 0; i < n; ++i)
        if (!erased[i] && fixed[i] != received[i]) ++v;
    if (2 * v + e >= code.d_min) return std::nullopt;
    return fixed;
}

}  // namespace rsrde
