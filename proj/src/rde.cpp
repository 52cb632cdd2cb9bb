#include "rsrde/rde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <stdexcept>

namespace rsrde {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Eigen::ArrayXd exp2_arr(const Eigen::ArrayXd& a) {
    return a.unaryExpr([](double v) { return std::exp2(v); });
}

Eigen::ArrayXd log2_arr(const Eigen::ArrayXd& a) {
    return a.unaryExpr([](double v) { return v > 0.0 ? std::log2(v) : kNegInf; });
}

// log2(sum_i 2^{a_i}), ignoring -inf entries
double log2_sum_exp(const Eigen::ArrayXd& a) {
    const double peak = a.maxCoeff();
    if (peak == kNegInf) return kNegInf;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i)
        if (a(i) != kNegInf) acc += std::exp2(a(i) - peak);
    return peak + std::log2(acc);
}

// Log-domain alternating-minimization kernel for one source component.
// Linear-domain powers 2^{t delta} and 2^{-s t delta} overflow for large
// |t|, so all state is carried as log2.
class ArimotoKernel {
public:
    ArimotoKernel(const Eigen::ArrayXd& p_vec, const Eigen::ArrayXXd& delta, double s, double t)
        : p_(p_vec), log_p_(log2_arr(p_vec)), delta_(delta), s_(s), t_(t),
          nj_(static_cast<int>(delta.rows())), nk_(static_cast<int>(delta.cols())) {}

    // log_w(j,k) = t delta_jk + log_q(k) - row_lse(j)
    void channel(const Eigen::ArrayXd& log_q, Eigen::ArrayXXd& log_w,
                 Eigen::ArrayXd& row_lse) const {
        log_w.resize(nj_, nk_);
        row_lse.resize(nj_);
        Eigen::ArrayXd row(nk_);
        for (int j = 0; j < nj_; ++j) {
            for (int k = 0; k < nk_; ++k) row(k) = t_ * delta_(j, k) + log_q(k);
            row_lse(j) = log2_sum_exp(row);
            for (int k = 0; k < nk_; ++k) log_w(j, k) = row(k) - row_lse(j);
        }
    }

    Eigen::ArrayXd next(const Eigen::ArrayXd& log_q) const {
        Eigen::ArrayXXd log_w;
        Eigen::ArrayXd row_lse;
        channel(log_q, log_w, row_lse);
        Eigen::ArrayXd log_num(nk_);
        Eigen::ArrayXd terms(nj_);
        for (int k = 0; k < nk_; ++k) {
            for (int j = 0; j < nj_; ++j)
                terms(j) = (p_(j) > 0.0)
                               ? log_p_(j) - s_ * t_ * delta_(j, k) + (1.0 + s_) * log_w(j, k)
                               : kNegInf;
            log_num(k) = log2_sum_exp(terms) / (1.0 + s_);
        }
        return log_num - log2_sum_exp(log_num);
    }

    // (F, R, D) and the distributions at the supplied q
    RdePoint evaluate(const Eigen::ArrayXd& log_q) const {
        Eigen::ArrayXXd log_w;
        Eigen::ArrayXd row_lse;
        channel(log_q, log_w, row_lse);

        Eigen::ArrayXd log_pt(nj_);
        for (int j = 0; j < nj_; ++j)
            log_pt(j) = (p_(j) > 0.0) ? log_p_(j) - s_ * row_lse(j) : kNegInf;
        const double norm = log2_sum_exp(log_pt);
        log_pt -= norm;
        const Eigen::ArrayXd pt = exp2_arr(log_pt);

        RdePoint point;
        point.p_tilde.resize(1, nj_);
        point.p_tilde.row(0) = pt.transpose();
        point.Q.resize(1, nk_);
        point.Q.row(0) = exp2_arr(log_q).transpose();
        Eigen::ArrayXXd w(nj_, nk_);
        for (int j = 0; j < nj_; ++j)
            for (int k = 0; k < nk_; ++k) w(j, k) = std::exp2(log_w(j, k));
        point.W.push_back(w);

        double F = 0.0;
        for (int j = 0; j < nj_; ++j)
            if (pt(j) > 0.0) F += pt(j) * (log_pt(j) - log_p_(j));

        Eigen::ArrayXd log_qt(nk_);
        Eigen::ArrayXd terms(nj_);
        for (int k = 0; k < nk_; ++k) {
            for (int j = 0; j < nj_; ++j)
                terms(j) = (pt(j) > 0.0) ? log_pt(j) + log_w(j, k) : kNegInf;
            log_qt(k) = log2_sum_exp(terms);
        }

        double R = 0.0;
        double D = 0.0;
        for (int j = 0; j < nj_; ++j) {
            if (pt(j) <= 0.0) continue;
            for (int k = 0; k < nk_; ++k) {
                const double wj = w(j, k);
                if (wj <= 0.0) continue;
                R += pt(j) * wj * (log_w(j, k) - log_qt(k));
                D += pt(j) * wj * delta_(j, k);
            }
        }
        point.F = std::max(0.0, F);
        point.R = std::max(0.0, R);
        point.D = D;
        return point;
    }

    int letters() const { return nk_; }

private:
    Eigen::ArrayXd p_;
    Eigen::ArrayXd log_p_;
    Eigen::ArrayXXd delta_;
    double s_;
    double t_;
    int nj_;
    int nk_;
};

Eigen::ArrayXd converge(const ArimotoKernel& kernel, double tol, int max_iter, int position) {
    const int nk = kernel.letters();
    Eigen::ArrayXd log_q = Eigen::ArrayXd::Constant(nk, -std::log2(static_cast<double>(nk)));
    Eigen::ArrayXd q = exp2_arr(log_q);
    for (int iter = 0; iter < max_iter; ++iter) {
        const Eigen::ArrayXd log_q2 = kernel.next(log_q);
        const Eigen::ArrayXd q2 = exp2_arr(log_q2);
        const double change = (q2 - q).abs().maxCoeff();
        log_q = log_q2;
        q = q2;
        if (change < tol) return log_q;
    }
    throw NonConvergenceError("arimoto iteration did not converge within max_iter", position);
}

void validate_pvec(const Eigen::ArrayXd& p_vec) {
    if (p_vec.size() < 2) throw std::invalid_argument("arimoto: alphabet too small");
    if ((p_vec < -1e-12).any()) throw std::invalid_argument("arimoto: negative probability");
    if (std::abs(p_vec.sum() - 1.0) > 1e-6)
        throw std::invalid_argument("arimoto: probabilities do not sum to 1");
}

struct RowGroups {
    std::vector<Eigen::ArrayXd> rows;  // distinct rows, in first-occurrence order
    std::vector<int> count;
    std::vector<int> first_position;
    std::vector<int> group_of;  // per position
};

RowGroups group_rows(const Eigen::ArrayXXd& P) {
    RowGroups g;
    g.group_of.resize(P.rows());
    std::map<std::vector<std::int64_t>, int> seen;
    for (Eigen::Index i = 0; i < P.rows(); ++i) {
        std::vector<std::int64_t> key(P.cols());
        for (Eigen::Index j = 0; j < P.cols(); ++j)
            key[j] = std::llround(P(i, j) * 1e12);  // 1e-12 grid
        auto [it, inserted] = seen.emplace(key, static_cast<int>(g.rows.size()));
        if (inserted) {
            g.rows.push_back(P.row(i).transpose());
            g.count.push_back(0);
            g.first_position.push_back(static_cast<int>(i));
        }
        g.count[it->second]++;
        g.group_of[i] = it->second;
    }
    return g;
}

}  // namespace

double binary_entropy(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    return -u * std::log2(u) - (1.0 - u) * std::log2(1.0 - u);
}

double kl_divergence(double u, double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("kl_divergence: p outside (0, 1)");
    double acc = 0.0;
    if (u > 0.0) acc += u * std::log2(u / p);
    if (u < 1.0) acc += (1.0 - u) * std::log2((1.0 - u) / (1.0 - p));
    return acc;
}

Eigen::ArrayXXd mbm_distortion(int ell) {
    if (ell < 1) throw std::invalid_argument("mbm_distortion: ell must be >= 1");
    Eigen::ArrayXXd delta(ell + 1, ell + 1);
    for (int j = 0; j <= ell; ++j) {
        delta(j, 0) = 1.0;  // erasing costs 1 regardless of the truth
        for (int k = 1; k <= ell; ++k) delta(j, k) = (j == k) ? 0.0 : 2.0;
    }
    return delta;
}

double distortion(const std::vector<std::uint8_t>& x, const std::vector<std::uint8_t>& x_hat,
                  const Eigen::ArrayXXd& delta) {
    if (x.size() != x_hat.size()) throw std::invalid_argument("distortion: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] >= delta.rows() || x_hat[i] >= delta.cols())
            throw std::invalid_argument("distortion: letter outside alphabet");
        acc += delta(x[i], x_hat[i]);
    }
    return acc;
}

ArimotoStep arimoto_step(const Eigen::ArrayXd& p_vec, const Eigen::ArrayXXd& delta, double s,
                         double t, const Eigen::ArrayXd& q_prev) {
    validate_pvec(p_vec);
    if ((q_prev <= 0.0).any()) throw std::invalid_argument("arimoto_step: q_prev must be positive");
    if (s < 0.0 || t > 0.0) throw std::invalid_argument("arimoto_step: require s >= 0, t <= 0");
    ArimotoKernel kernel(p_vec, delta, s, t);
    ArimotoStep out;
    Eigen::ArrayXXd log_w;
    Eigen::ArrayXd row_lse;
    const Eigen::ArrayXd log_q = log2_arr(q_prev / q_prev.sum());
    kernel.channel(log_q, log_w, row_lse);
    out.w.resize(delta.rows(), delta.cols());
    for (Eigen::Index j = 0; j < delta.rows(); ++j)
        for (Eigen::Index k = 0; k < delta.cols(); ++k) out.w(j, k) = std::exp2(log_w(j, k));
    out.q_next = exp2_arr(kernel.next(log_q));
    return out;
}

RdePoint arimoto_rde_single(const Eigen::ArrayXd& p_vec, const Eigen::ArrayXXd& delta,
                            const RdeParams& params) {
    validate_pvec(p_vec);
    if (params.s < 0.0 || params.t > 0.0)
        throw std::invalid_argument("arimoto_rde_single: require s >= 0, t <= 0");
    ArimotoKernel kernel(p_vec, delta, params.s, params.t);
    const Eigen::ArrayXd log_q = converge(kernel, params.tol, params.max_iter, -1);
    return kernel.evaluate(log_q);
}

RdePoint factored_rde(const ErrorPatternModel& model, const Eigen::ArrayXXd& delta,
                      const RdeParams& params) {
    const int n = model.positions();
    const int nk = static_cast<int>(delta.cols());
    const RowGroups groups = group_rows(model.P);

    std::vector<RdePoint> singles;
    singles.reserve(groups.rows.size());
    for (std::size_t g = 0; g < groups.rows.size(); ++g) {
        try {
            singles.push_back(arimoto_rde_single(groups.rows[g], delta, params));
        } catch (const NonConvergenceError& err) {
            throw NonConvergenceError(err.what(), groups.first_position[g]);
        }
    }

    RdePoint point;
    for (std::size_t g = 0; g < groups.rows.size(); ++g) {
        point.F += groups.count[g] * singles[g].F;
        point.R += groups.count[g] * singles[g].R;
        point.D += groups.count[g] * singles[g].D;
    }
    point.Q.resize(n, nk);
    point.p_tilde.resize(n, static_cast<int>(delta.rows()));
    point.W.reserve(n);
    for (int i = 0; i < n; ++i) {
        const RdePoint& s = singles[groups.group_of[i]];
        point.Q.row(i) = s.Q.row(0);
        point.p_tilde.row(i) = s.p_tilde.row(0);
        point.W.push_back(s.W[0]);
    }
    return point;
}

AnalyticCase analytic_mbm1(double p, double s, double t) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("analytic_mbm1: p outside (0, 1)");
    if (!(s >= 0.0)) throw std::domain_error("analytic_mbm1: s must be >= 0");
    if (!(t <= 0.0)) throw std::domain_error("analytic_mbm1: t must be <= 0");

    const double pbar = 1.0 - p;
    const double e2t = std::exp2(t);
    const double c = e2t / (1.0 + e2t);  // 2^t / (1 + 2^t)

    AnalyticCase out;
    double q1, u;
    if (p <= c) {
        out.case_id = 1;
        q1 = 0.0;
        u = p;
        out.point.D = 1.0;
        out.point.R = 0.0;
        out.point.F = 0.0;
    } else if (p >= 1.0 / (1.0 + std::exp2(t * (2.0 * s + 1.0)))) {
        out.case_id = 2;
        q1 = 1.0;
        out.point.D = 2.0 * pbar / (p * std::exp2(2.0 * t * s) + pbar);
        u = 1.0 - out.point.D / 2.0;
        out.point.R = 0.0;
        out.point.F = kl_divergence(u, p);
    } else {
        out.case_id = 3;
        // logit2(u) = (s t + logit2(p)) / (s + 1)
        const double logit = (s * t + std::log2(p / pbar)) / (s + 1.0);
        u = 1.0 / (1.0 + std::exp2(-logit));
        out.point.D = c + 1.0 - u;
        out.point.R = binary_entropy(u) - binary_entropy(c);  // u + D - 1 = c
        out.point.F = kl_divergence(u, p);
        q1 = (u - c) / (1.0 - 2.0 * c);
    }
    out.u = u;
    out.q1_star = q1;

    out.point.Q.resize(1, 2);
    out.point.Q << 1.0 - q1, q1;
    out.point.p_tilde.resize(1, 2);
    out.point.p_tilde << 1.0 - u, u;
    // w(j,k) = q_k 2^{t delta_jk} / sum_k, delta = mbm_distortion(1)
    Eigen::ArrayXXd w(2, 2);
    {
        const double n00 = (1.0 - q1) * e2t;        // delta(0,0) = 1
        const double n01 = q1 * e2t * e2t;          // delta(0,1) = 2
        const double n10 = (1.0 - q1) * e2t;        // delta(1,0) = 1
        const double n11 = q1;                      // delta(1,1) = 0
        w(0, 0) = n00 / (n00 + n01);
        w(0, 1) = n01 / (n00 + n01);
        w(1, 0) = n10 / (n10 + n11);
        w(1, 1) = n11 / (n10 + n11);
    }
    out.point.W.push_back(w);
    return out;
}

double h_rate(double u, double d_bar) {
    return binary_entropy(u) - binary_entropy(u + d_bar - 1.0);
}

double h_inverse(double r_bar, double d_bar) {
    if (!(d_bar > 0.0 && d_bar < 1.0)) throw std::domain_error("h_inverse: d_bar outside (0, 1)");
    const double lo = 1.0 - d_bar;
    const double hi = 1.0 - d_bar / 2.0;
    const double r_max = binary_entropy(lo);
    if (!(r_bar > 0.0 && r_bar <= r_max + 1e-12))
        throw std::domain_error("h_inverse: rate outside (0, H(1-d)]");
    // h is strictly decreasing on [lo, hi), h(lo) = H(1-d), h(hi) = 0
    double a = lo;
    double b = hi;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (a + b);
        if (h_rate(mid, d_bar) > r_bar)
            a = mid;
        else
            b = mid;
    }
    return 0.5 * (a + b);
}

double g_inverse(double f_bar, double d_bar, double p) {
    if (!(d_bar > 0.0 && d_bar < 1.0)) throw std::domain_error("g_inverse: d_bar outside (0, 1)");
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("g_inverse: p outside (0, 1)");
    const double lo = 1.0 - d_bar;
    const double f_lo = kl_divergence(lo, p);
    if (p >= lo) {
        // decreasing branch on [1-d, p]
        if (!(f_bar >= -1e-12 && f_bar <= f_lo + 1e-12))
            throw std::domain_error("g_inverse: exponent outside [0, KL(1-d || p)]");
        double a = lo;
        double b = p;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (a + b);
            if (kl_divergence(mid, p) > f_bar)
                a = mid;
            else
                b = mid;
        }
        return 0.5 * (a + b);
    }
    // p < 1-d: every admissible u lies above p, where g is increasing
    const double hi = 1.0 - 1e-15;
    if (!(f_bar >= f_lo - 1e-12 && f_bar <= kl_divergence(hi, p)))
        throw std::domain_error("g_inverse: exponent outside the increasing branch range");
    double a = lo;
    double b = hi;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (a + b);
        if (kl_divergence(mid, p) < f_bar)
            a = mid;
        else
            b = mid;
    }
    return 0.5 * (a + b);
}

double max_exponent(double rate, double dist, int n, double p) {
    if (n < 1) throw std::domain_error("max_exponent: n < 1");
    const double d_bar = dist / n;
    const double r_bar = rate / n;
    if (!(d_bar > 0.0 && d_bar < 1.0)) throw std::domain_error("max_exponent: D/N outside (0, 1)");
    if (!(r_bar > 0.0 && r_bar <= binary_entropy(1.0 - d_bar) + 1e-12))
        throw std::domain_error("max_exponent: rate outside (0, N H(1 - D/N)]");
    return n * kl_divergence(h_inverse(r_bar, d_bar), p);
}

double min_rate_for_exponent(double exponent, double dist, int n, double p) {
    if (n < 1) throw std::domain_error("min_rate_for_exponent: n < 1");
    const double d_bar = dist / n;
    const double f_bar = exponent / n;
    const double u = g_inverse(f_bar, d_bar, p);
    return n * std::max(0.0, h_rate(u, d_bar));
}

namespace {

// Shared machinery for solve_st / blahut_rd: evaluate the factored (F, R, D)
// for grouped rows without assembling the full point.
struct GroupedEval {
    RowGroups groups;
    const Eigen::ArrayXXd* delta;
    double arimoto_tol;
    int max_iter;

    struct Triple {
        double F = 0.0, R = 0.0, D = 0.0;
    };

    Triple eval(double s, double t) const {
        Triple out;
        for (std::size_t g = 0; g < groups.rows.size(); ++g) {
            ArimotoKernel kernel(groups.rows[g], *delta, s, t);
            const Eigen::ArrayXd log_q =
                converge(kernel, arimoto_tol, max_iter, groups.first_position[g]);
            const RdePoint p = kernel.evaluate(log_q);
            out.F += groups.count[g] * p.F;
            out.R += groups.count[g] * p.R;
            out.D += groups.count[g] * p.D;
        }
        return out;
    }
};

constexpr double kSMax = 1048576.0;  // 2^20, treated as the rate frontier
constexpr double kTMin = -1048576.0;

// Largest s with R(s, t) <= rate_target, bisected on [0, kSMax]. status:
// 0 interior bracket, -1 rate target below R(s=0, t), +1 above R(kSMax, t).
struct InnerResult {
    double s = 0.0;
    GroupedEval::Triple at;
    int status = 0;
};

InnerResult inner_solve_rate(const GroupedEval& ev, double t, double rate_target, double tol) {
    InnerResult res;
    GroupedEval::Triple lo = ev.eval(0.0, t);
    if (lo.R >= rate_target) {
        res.s = 0.0;
        res.at = lo;
        res.status = (lo.R - rate_target > tol * std::max(1.0, rate_target)) ? -1 : 0;
        return res;
    }
    double s_lo = 0.0;
    double s_hi = 1.0;
    GroupedEval::Triple hi = ev.eval(s_hi, t);
    while (hi.R < rate_target && s_hi < kSMax) {
        s_lo = s_hi;
        lo = hi;
        s_hi = std::min(s_hi * 4.0, kSMax);
        hi = ev.eval(s_hi, t);
    }
    if (hi.R < rate_target) {
        res.s = s_hi;
        res.at = hi;
        res.status = +1;
        return res;
    }
    for (int i = 0; i < 64; ++i) {
        const double mid = 0.5 * (s_lo + s_hi);
        const GroupedEval::Triple m = ev.eval(mid, t);
        if (m.R < rate_target) {
            s_lo = mid;
            lo = m;
        } else {
            s_hi = mid;
            hi = m;
        }
        if (std::abs(hi.R - rate_target) <= 0.125 * tol * std::max(1.0, rate_target)) break;
    }
    res.s = s_hi;
    res.at = hi;
    res.status = 0;
    return res;
}

}  // namespace

StSolution solve_st(const ErrorPatternModel& model, const Eigen::ArrayXXd& delta,
                    double rate_target, double distortion_target, const SolveOptions& opts) {
    if (rate_target < 0.0) throw std::invalid_argument("solve_st: rate target must be >= 0");
    if (distortion_target <= 0.0)
        throw std::invalid_argument("solve_st: distortion target must be > 0");

    GroupedEval ev{group_rows(model.P), &delta, opts.arimoto_tol, opts.max_iter};
    const double r_scale = std::max(1.0, rate_target);
    const double d_scale = std::max(1.0, distortion_target);

    auto finish = [&](double s, double t, bool clamped) {
        StSolution sol;
        sol.params.s = s;
        sol.params.t = t;
        sol.params.tol = opts.arimoto_tol;
        sol.params.max_iter = opts.max_iter;
        sol.point = factored_rde(model, delta, sol.params);
        sol.clamped = clamped;
        return sol;
    };

    // Fast path: damped Newton in (log s, log -t) from a warm start.
    if (opts.initial_st && rate_target > 0.0) {
        double a = std::log(std::max(opts.initial_st->first, 1e-6));
        double b = std::log(std::max(-opts.initial_st->second, 1e-9));
        auto residual = [&](double aa, double bb, GroupedEval::Triple& at) {
            at = ev.eval(std::exp(aa), -std::exp(bb));
            return std::max(std::abs(at.R - rate_target) / r_scale,
                            std::abs(at.D - distortion_target) / d_scale);
        };
        GroupedEval::Triple at;
        double err = residual(a, b, at);
        bool ok = true;
        for (int iter = 0; iter < 60 && err > opts.tol; ++iter) {
            const double h = 1e-6;
            GroupedEval::Triple ra, rb;
            residual(a + h, b, ra);
            residual(a, b + h, rb);
            const double j11 = (ra.R - at.R) / h, j12 = (rb.R - at.R) / h;
            const double j21 = (ra.D - at.D) / h, j22 = (rb.D - at.D) / h;
            const double det = j11 * j22 - j12 * j21;
            if (!std::isfinite(det) || std::abs(det) < 1e-300) {
                ok = false;
                break;
            }
            const double fr = at.R - rate_target;
            const double fd = at.D - distortion_target;
            const double da = (-j22 * fr + j12 * fd) / det;
            const double db = (j21 * fr - j11 * fd) / det;
            double lambda = 1.0;
            bool improved = false;
            for (int cut = 0; cut < 12; ++cut, lambda *= 0.5) {
                GroupedEval::Triple trial;
                const double err2 = residual(a + lambda * da, b + lambda * db, trial);
                if (err2 < err) {
                    a += lambda * da;
                    b += lambda * db;
                    at = trial;
                    err = err2;
                    improved = true;
                    break;
                }
            }
            if (!improved) {
                ok = false;
                break;
            }
        }
        if (ok && err <= opts.tol) return finish(std::exp(a), -std::exp(b), false);
        // fall through to the robust path
    }

    // Robust path: outer bisection on t to hit the distortion target, inner
    // bisection on s to hit the rate target.
    auto outer_eval = [&](double t) { return inner_solve_rate(ev, t, rate_target, opts.tol); };

    double t_hi = -1e-9;
    InnerResult at_hi = outer_eval(t_hi);
    double t_lo = -1.0;
    InnerResult at_lo = outer_eval(t_lo);
    while (at_lo.at.D > distortion_target && t_lo > kTMin) {
        t_hi = t_lo;
        at_hi = at_lo;
        t_lo *= 4.0;
        at_lo = outer_eval(t_lo);
    }
    if (at_lo.at.D > distortion_target)
        throw InfeasibleError("solve_st: distortion target below the minimum achievable",
                              at_lo.at.R);
    if (at_hi.at.D < distortion_target) {
        // even the flattest slope cannot reach this distortion
        if (opts.clamp_to_frontier) {
            const InnerResult& edge = at_hi;
            StSolution sol = finish(edge.s, t_hi, true);
            return sol;
        }
        throw InfeasibleError("solve_st: distortion target above the achievable range", at_hi.at.R);
    }
    InnerResult best = at_hi;
    double t_best = t_hi;
    for (int i = 0; i < 64; ++i) {
        const double mid = 0.5 * (t_lo + t_hi);
        const InnerResult m = outer_eval(mid);
        if (m.at.D < distortion_target) {
            t_lo = mid;
            at_lo = m;
        } else {
            t_hi = mid;
            at_hi = m;
        }
        best = at_hi;
        t_best = t_hi;
        if (std::abs(best.at.D - distortion_target) <= 0.25 * opts.tol * d_scale &&
            best.status == 0)
            break;
    }

    const double r_err = std::abs(best.at.R - rate_target) / r_scale;
    const double d_err = std::abs(best.at.D - distortion_target) / d_scale;
    if (r_err <= opts.tol && d_err <= opts.tol) return finish(best.s, t_best, false);

    if (best.status != 0) {
        if (opts.clamp_to_frontier) return finish(best.s, t_best, true);
        if (best.status > 0)
            throw InfeasibleError(
                "solve_st: rate target exceeds the achievable rate at the distortion target",
                best.at.R);
        throw InfeasibleError(
            "solve_st: rate target below the rate-distortion rate at the distortion target",
            best.at.R);
    }
    throw NonConvergenceError("solve_st: residual tolerance not met", -1);
}

RdResult blahut_rd(const ErrorPatternModel& model, const Eigen::ArrayXXd& delta,
                   double distortion_target) {
    const int n = model.positions();
    const int nk = static_cast<int>(delta.cols());

    // achievable range of the average distortion
    double d_min = 0.0;
    double d_max = 0.0;
    std::vector<int> best_letter(n, 0);
    for (int i = 0; i < n; ++i) {
        double row_min = 0.0;
        for (Eigen::Index j = 0; j < delta.rows(); ++j) {
            double m = delta(j, 0);
            for (int k = 1; k < nk; ++k) m = std::min(m, delta(j, k));
            row_min += model.P(i, j) * m;
        }
        d_min += row_min;
        double best = std::numeric_limits<double>::infinity();
        for (int k = 0; k < nk; ++k) {
            double cost = 0.0;
            for (Eigen::Index j = 0; j < delta.rows(); ++j) cost += model.P(i, j) * delta(j, k);
            if (cost < best) {
                best = cost;
                best_letter[i] = k;
            }
        }
        d_max += best;
    }
    if (distortion_target < d_min - 1e-9)
        throw InfeasibleError("blahut_rd: distortion target below the minimum achievable",
                              std::numeric_limits<double>::quiet_NaN());
    if (distortion_target >= d_max) {
        // zero rate reaches the target already
        RdResult res;
        res.rate = 0.0;
        res.Q = Eigen::ArrayXXd::Zero(n, nk);
        for (int i = 0; i < n; ++i) res.Q(i, best_letter[i]) = 1.0;
        return res;
    }

    GroupedEval ev{group_rows(model.P), &delta, 1e-12, 100000};
    auto d_at = [&](double t) { return ev.eval(0.0, t).D; };

    double t_hi = -1e-9;
    double t_lo = -1.0;
    while (d_at(t_lo) > distortion_target && t_lo > kTMin) t_lo *= 4.0;
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (t_lo + t_hi);
        if (d_at(mid) < distortion_target)
            t_lo = mid;
        else
            t_hi = mid;
    }
    RdeParams params;
    params.s = 0.0;
    params.t = t_hi;
    const RdePoint point = factored_rde(model, delta, params);
    RdResult res;
    res.rate = point.R;
    res.Q = point.Q;
    return res;
}

void rde_surface_csv(std::ostream& os, const ErrorPatternModel& model,
                     const Eigen::ArrayXXd& delta, const std::vector<double>& s_values,
                     const std::vector<double>& t_values) {
    os << "s,t,R,D,F\n";
    char buf[160];
    RdeParams params;
    for (double s : s_values) {
        for (double t : t_values) {
            params.s = s;
            params.t = t;
            const RdePoint p = factored_rde(model, delta, params);
            std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g,%.12g\n", s, t, p.R, p.D,
                          p.F);
            os << buf;
        }
    }
}

}  // namespace rsrde
