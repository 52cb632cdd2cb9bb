#include "rsrde/channels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rsrde {

namespace {
constexpr double kProbFloor = 1e-300;  // floor before logs/divisions
}

MscChannel::MscChannel(double p_, int m_) : p(p_), m(m_) {
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("MscChannel: p out of (0, 1]");
    if (m < 2) throw std::invalid_argument("MscChannel: m < 2");
    if (!(p > (1.0 - p) / (m - 1)))
        throw std::invalid_argument("MscChannel: require p > (1-p)/(m-1)");
}

AwgnBpskChannel::AwgnBpskChannel(double snr_db_, int bits_per_symbol_, double code_rate_)
    : snr_db(snr_db_), bits_per_symbol(bits_per_symbol_), code_rate(code_rate_) {
    if (bits_per_symbol < 1) throw std::invalid_argument("AwgnBpskChannel: bits_per_symbol < 1");
    if (!(code_rate > 0.0 && code_rate <= 1.0))
        throw std::invalid_argument("AwgnBpskChannel: code_rate out of (0, 1]");
}

double AwgnBpskChannel::noise_std() const {
    // Es = 1 per coded bit, Eb = Es / rate; sigma^2 = N0/2 = 1/(2 r Eb/N0)
    const double ebn0 = std::pow(10.0, snr_db / 10.0);
    return std::sqrt(1.0 / (2.0 * code_rate * ebn0));
}

std::vector<Symbol> transmit_msc(const Codeword& cw, const MscChannel& ch, RngStream& rng) {
    std::vector<Symbol> out(cw.size());
    for (std::size_t i = 0; i < cw.size(); ++i) {
        if (rng.next_double() < ch.p) {
            out[i] = cw[i];
        } else {
            // uniform over the other m-1 symbols
            Symbol r = static_cast<Symbol>(rng.next_below(static_cast<std::uint64_t>(ch.m - 1)));
            out[i] = (r >= cw[i]) ? static_cast<Symbol>(r + 1) : r;
        }
    }
    return out;
}

std::vector<double> transmit_awgn_bpsk(const Codeword& cw, const AwgnBpskChannel& ch,
                                       RngStream& rng) {
    const int b = ch.bits_per_symbol;
    const double sigma = ch.noise_std();
    std::vector<double> out(cw.size() * static_cast<std::size_t>(b));
    std::size_t idx = 0;
    for (Symbol s : cw)
        for (int j = 0; j < b; ++j) out[idx++] = bpsk_level(s, j) + sigma * rng.next_gaussian();
    return out;
}

namespace {

Eigen::ArrayXXi ranking_from_posteriors(const Eigen::ArrayXXd& pi) {
    const int n = static_cast<int>(pi.rows());
    const int m = static_cast<int>(pi.cols());
    Eigen::ArrayXXi order(n, m);
    std::vector<int> idx(m);
    for (int i = 0; i < n; ++i) {
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
            if (pi(i, a) != pi(i, b)) return pi(i, a) > pi(i, b);
            return a < b;
        });
        for (int j = 0; j < m; ++j) order(i, j) = idx[j];
    }
    return order;
}

}  // namespace

ReliabilityMatrix reliability_from_msc(const std::vector<Symbol>& received, const MscChannel& ch) {
    const int n = static_cast<int>(received.size());
    ReliabilityMatrix rel;
    rel.pi = Eigen::ArrayXXd::Constant(n, ch.m, (1.0 - ch.p) / (ch.m - 1));
    for (int i = 0; i < n; ++i) rel.pi(i, received[i]) = ch.p;
    rel.pi = rel.pi.max(kProbFloor);
    rel.order = ranking_from_posteriors(rel.pi);
    return rel;
}

ReliabilityMatrix reliability_from_awgn(const std::vector<double>& observations,
                                        const AwgnBpskChannel& ch) {
    const int b = ch.bits_per_symbol;
    if (observations.size() % static_cast<std::size_t>(b) != 0)
        throw std::invalid_argument("reliability_from_awgn: observation length not N*b");
    const int n = static_cast<int>(observations.size()) / b;
    const int m = 1 << b;
    const double inv_var = 1.0 / (ch.noise_std() * ch.noise_std());

    // log Pr(y | sym) = sum_j y_j * level_j(sym) / sigma^2 + const
    ReliabilityMatrix rel;
    rel.pi.resize(n, m);
    Eigen::ArrayXd ll(m);
    for (int i = 0; i < n; ++i) {
        const double* y = &observations[static_cast<std::size_t>(i) * b];
        for (int s = 0; s < m; ++s) {
            double acc = 0.0;
            for (int j = 0; j < b; ++j) acc += y[j] * bpsk_level(static_cast<Symbol>(s), j);
            ll(s) = acc * inv_var;
        }
        const double peak = ll.maxCoeff();
        Eigen::ArrayXd w = (ll - peak).exp();
        rel.pi.row(i) = (w / w.sum()).max(kProbFloor);
    }
    rel.order = ranking_from_posteriors(rel.pi);
    return rel;
}

ErrorPatternModel build_error_model(const ReliabilityMatrix& reliability, int ell) {
    const int n = reliability.positions();
    const int m = static_cast<int>(reliability.pi.cols());
    if (ell < 1 || ell >= m) throw std::invalid_argument("build_error_model: require 1 <= ell < m");

    ErrorPatternModel model;
    model.ell = ell;
    model.P.resize(n, ell + 1);
    for (int i = 0; i < n; ++i) {
        double top = 0.0;
        for (int j = 1; j <= ell; ++j) {
            model.P(i, j) = reliability.pi(i, reliability.order(i, j - 1));
            top += model.P(i, j);
        }
        model.P(i, 0) = std::max(0.0, 1.0 - top);
    }
    model.position_order.resize(n);
    std::iota(model.position_order.begin(), model.position_order.end(), 0);
    std::stable_sort(model.position_order.begin(), model.position_order.end(), [&](int a, int b) {
        if (model.P(a, 1) != model.P(b, 1)) return model.P(a, 1) < model.P(b, 1);
        return a < b;
    });
    return model;
}

}  // namespace rsrde
