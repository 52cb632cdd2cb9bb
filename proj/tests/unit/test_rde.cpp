#include <doctest.h>

#include <cmath>
#include <vector>

#include "rsrde/galois.hpp"
#include "rsrde/rde.hpp"
#include "rsrde/rng.hpp"

using namespace rsrde;

namespace {

ErrorPatternModel iid_binary_model(int n, double p) {
    ErrorPatternModel model;
    model.ell = 1;
    model.P.resize(n, 2);
    for (int i = 0; i < n; ++i) {
        model.P(i, 0) = 1.0 - p;
        model.P(i, 1) = p;
    }
    model.position_order.resize(n);
    for (int i = 0; i < n; ++i) model.position_order[i] = i;
    return model;
}

ErrorPatternModel model_from_rows(const std::vector<Eigen::ArrayXd>& rows) {
    ErrorPatternModel model;
    model.ell = static_cast<int>(rows.front().size()) - 1;
    model.P.resize(static_cast<int>(rows.size()), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) model.P.row(i) = rows[i].transpose();
    model.position_order.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) model.position_order[i] = static_cast<int>(i);
    return model;
}

// brute-force super-alphabet instance: joint letters are tuples, the joint
// source is the product distribution and the joint distortion the sum
RdePoint joint_super_alphabet(const ErrorPatternModel& model, const Eigen::ArrayXXd& delta,
                              const RdeParams& params) {
    const int n = model.positions();
    const int nj = static_cast<int>(delta.rows());
    const int nk = static_cast<int>(delta.cols());
    int jn = 1, kn = 1;
    for (int i = 0; i < n; ++i) {
        jn *= nj;
        kn *= nk;
    }
    Eigen::ArrayXd pj(jn);
    Eigen::ArrayXXd dj(jn, kn);
    for (int j = 0; j < jn; ++j) {
        double prob = 1.0;
        int jj = j;
        std::vector<int> jt(n);
        for (int i = 0; i < n; ++i) {
            jt[i] = jj % nj;
            jj /= nj;
            prob *= model.P(i, jt[i]);
        }
        pj(j) = prob;
        for (int k = 0; k < kn; ++k) {
            double dist = 0.0;
            int kk = k;
            for (int i = 0; i < n; ++i) {
                dist += delta(jt[i], kk % nk);
                kk /= nk;
            }
            dj(j, k) = dist;
        }
    }
    return arimoto_rde_single(pj, dj, params);
}

}  // namespace

TEST_CASE("mbm distortion table") {
    const auto d1 = mbm_distortion(1);
    CHECK(d1(0, 0) == 1.0);
    CHECK(d1(0, 1) == 2.0);
    CHECK(d1(1, 0) == 1.0);
    CHECK(d1(1, 1) == 0.0);

    const auto d2 = mbm_distortion(2);
    CHECK(d2(2, 0) == 1.0);
    CHECK(d2(2, 2) == 0.0);
    CHECK(d2(2, 1) == 2.0);
    CHECK(d2(1, 2) == 2.0);
    for (int ell : {1, 2, 3, 5})
        for (int j = 0; j <= ell; ++j) CHECK(mbm_distortion(ell)(j, 0) == 1.0);
    CHECK_THROWS_AS(mbm_distortion(0), std::invalid_argument);
}

TEST_CASE("distortion sums letter costs") {
    const auto d1 = mbm_distortion(1);
    // 3 unerased errors (x=0 with xhat=1) and 2 erasures: 2*3 + 2
    const std::vector<std::uint8_t> x = {0, 0, 0, 1, 0, 1, 1};
    const std::vector<std::uint8_t> xh = {1, 1, 1, 0, 0, 1, 1};
    CHECK(distortion(x, xh, d1) == 8.0);
    const std::vector<std::uint8_t> same = {1, 1, 1};
    CHECK(distortion(same, same, d1) == 0.0);
    CHECK_THROWS_AS(distortion(x, same, d1), std::invalid_argument);
    const std::vector<std::uint8_t> bad = {3, 0, 0};
    CHECK_THROWS_AS(distortion(bad, same, d1), std::invalid_argument);
}

TEST_CASE("threshold equivalence: distortion < d_min iff the attempt decodes") {
    // mBM-1 over the m-SC; the induced attempt erases where xhat = 0 and
    // otherwise decodes with the received (top-1) symbol
    struct Spec {
        int bits, n, k;
        double p;
    };
    for (const Spec spec : {Spec{4, 15, 9, 0.72}, Spec{5, 31, 25, 0.88}}) {
        const Field f(spec.bits);
        const RsCode code(spec.n, spec.k, f);
        const auto delta = mbm_distortion(1);
        const MscChannel ch(spec.p, f.size());
        RngStream rng(41);
        int below = 0, above = 0;
        for (int trial = 0; trial < 1500; ++trial) {
            std::vector<Symbol> msg(code.k);
            for (auto& s : msg) s = static_cast<Symbol>(rng.next_below(f.size()));
            const Codeword cw = encode(msg, code);
            const auto rx = transmit_msc(cw, ch, rng);

            std::vector<std::uint8_t> x(code.n), xh(code.n);
            ErasureSet erasures;
            std::vector<Symbol> attempt = rx;
            for (int i = 0; i < code.n; ++i) {
                x[i] = (rx[i] == cw[i]) ? 1 : 0;
                xh[i] = (rng.next_double() < 0.25) ? 0 : 1;
                if (xh[i] == 0) erasures.positions.push_back(i);
            }
            if (static_cast<int>(erasures.positions.size()) >= code.d_min) continue;
            const double d = distortion(x, xh, delta);
            const auto out = decode_errors_erasures(attempt, erasures, code);
            const bool success = out.has_value() && *out == cw;
            REQUIRE((d < code.d_min) == success);
            (d < code.d_min ? below : above)++;
        }
        // both sides of the threshold must actually be exercised
        CHECK(below > 100);
        CHECK(above > 100);
    }
}

TEST_CASE("arimoto step reduces to the classical update at s = 0") {
    const auto delta = mbm_distortion(1);
    Eigen::ArrayXd p(2), q(2);
    p << 0.2, 0.8;
    q << 0.4, 0.6;
    const double t = -1.3;
    const auto step = arimoto_step(p, delta, 0.0, t, q);
    // w rows by hand
    Eigen::ArrayXXd w(2, 2);
    for (int j = 0; j < 2; ++j) {
        const double n0 = q(0) * std::exp2(t * delta(j, 0));
        const double n1 = q(1) * std::exp2(t * delta(j, 1));
        w(j, 0) = n0 / (n0 + n1);
        w(j, 1) = n1 / (n0 + n1);
    }
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) CHECK(step.w(j, k) == doctest::Approx(w(j, k)).epsilon(1e-12));
    for (int k = 0; k < 2; ++k) {
        const double expect = p(0) * w(0, k) + p(1) * w(1, k);
        CHECK(step.q_next(k) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("arimoto step ignores distortion at t = 0") {
    const auto delta = mbm_distortion(1);
    Eigen::ArrayXd p(2), q(2);
    p << 0.35, 0.65;
    q << 0.3, 0.7;
    const auto step = arimoto_step(p, delta, 1.7, 0.0, q);
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) CHECK(step.w(j, k) == doctest::Approx(q(k)).epsilon(1e-12));
}

TEST_CASE("single-source arimoto agrees with the closed forms in all three cases") {
    const auto delta = mbm_distortion(1);
    RdeParams params;
    params.tol = 1e-14;

    struct Probe {
        double p, s, t;
        int expect_case;
    };
    const Probe probes[] = {
        {0.30, 0.50, -0.40, 1},  // p <= 2^t/(1+2^t) needs p < 1/2
        {0.30, 2.00, -0.25, 1},
        {0.90, 0.50, -0.50, 2},
        {0.80, 0.25, -1.00, 2},
        {0.90, 0.80, -4.00, 3},
        {0.95, 0.40, -3.00, 3},
        {0.99, 2.00, -6.00, 3},
        {0.80, 1.50, -5.00, 3},
    };
    for (const Probe& pr : probes) {
        const AnalyticCase ac = analytic_mbm1(pr.p, pr.s, pr.t);
        REQUIRE(ac.case_id == pr.expect_case);
        params.s = pr.s;
        params.t = pr.t;
        Eigen::ArrayXd pv(2);
        pv << 1.0 - pr.p, pr.p;
        const RdePoint num = arimoto_rde_single(pv, delta, params);
        CHECK(std::abs(num.F - ac.point.F) < 1e-6);
        CHECK(std::abs(num.R - ac.point.R) < 1e-6);
        CHECK(std::abs(num.D - ac.point.D) < 1e-6);
        CHECK(std::abs(num.Q(0, 1) - ac.q1_star) < 1e-6);
        CHECK(num.p_tilde.row(0).sum() == doctest::Approx(1.0).epsilon(1e-9));
        // fixed point: w = q 2^{t delta} / normalizer
        for (int j = 0; j < 2; ++j) {
            const double n0 = num.Q(0, 0) * std::exp2(pr.t * delta(j, 0));
            const double n1 = num.Q(0, 1) * std::exp2(pr.t * delta(j, 1));
            CHECK(std::abs(num.W[0](j, 0) - n0 / (n0 + n1)) < 1e-8);
            CHECK(std::abs(num.W[0](j, 1) - n1 / (n0 + n1)) < 1e-8);
        }
    }
}

TEST_CASE("analytic case-3 reproduction distribution sums to 1") {
    const AnalyticCase ac = analytic_mbm1(0.9, 0.8, -4.0);
    REQUIRE(ac.case_id == 3);
    const double q1 = (1.0 - ac.point.D) / (3.0 - 2.0 * (ac.u + ac.point.D));
    const double q0 = (2.0 * (1.0 - ac.u) - ac.point.D) / (3.0 - 2.0 * (ac.u + ac.point.D));
    CHECK(ac.q1_star == doctest::Approx(q1).epsilon(1e-12));
    CHECK(q0 + q1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ac.point.Q(0, 0) == doctest::Approx(q0).epsilon(1e-12));
}

TEST_CASE("case boundaries: case 1 gives (D,R,F) = (1,0,0); case-2 boundary has F -> 0") {
    const AnalyticCase c1 = analytic_mbm1(0.25, 1.0, -0.3);
    REQUIRE(c1.case_id == 1);
    CHECK(c1.point.D == 1.0);
    CHECK(c1.point.R == 0.0);
    CHECK(c1.point.F == 0.0);
    CHECK(c1.u == doctest::Approx(0.25));

    // at s = 0 every case-2 point has u = p and so F = 0
    const AnalyticCase c2 = analytic_mbm1(0.9, 0.0, -0.5);
    REQUIRE(c2.case_id == 2);
    CHECK(c2.point.F == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("zero-exponent special case: s = 0 gives F = 0") {
    const auto delta = mbm_distortion(1);
    RdeParams params;
    params.s = 0.0;
    for (double t : {-0.3, -1.0, -4.0}) {
        params.t = t;
        Eigen::ArrayXd pv(2);
        pv << 0.15, 0.85;
        const RdePoint pt = arimoto_rde_single(pv, delta, params);
        CHECK(std::abs(pt.F) < 1e-10);
    }
}

TEST_CASE("non-convergence is reported, never silently truncated") {
    const auto delta = mbm_distortion(1);
    RdeParams params;
    params.s = 0.8;
    params.t = -4.0;
    params.tol = 1e-14;
    params.max_iter = 2;
    Eigen::ArrayXd pv(2);
    pv << 0.1, 0.9;
    CHECK_THROWS_AS(arimoto_rde_single(pv, delta, params), NonConvergenceError);
    try {
        const auto model = iid_binary_model(5, 0.9);
        factored_rde(model, delta, params);
        FAIL("expected NonConvergenceError");
    } catch (const NonConvergenceError& e) {
        CHECK(e.position() == 0);
    }
}

TEST_CASE("factored evaluation: i.i.d. rows give exactly N x the single value") {
    const auto delta = mbm_distortion(1);
    RdeParams params;
    params.s = 0.8;
    params.t = -4.0;
    Eigen::ArrayXd pv(2);
    pv << 0.1, 0.9;
    const RdePoint single = arimoto_rde_single(pv, delta, params);
    const RdePoint whole = factored_rde(iid_binary_model(255, 0.9), delta, params);
    CHECK(whole.F == 255.0 * single.F);
    CHECK(whole.R == 255.0 * single.R);
    CHECK(whole.D == 255.0 * single.D);
    CHECK(whole.Q.rows() == 255);
    for (int i = 0; i < 255; ++i)
        CHECK(whole.Q(i, 1) == single.Q(0, 1));
}

TEST_CASE("factored evaluation equals the joint super-alphabet computation") {
    const auto delta = mbm_distortion(1);
    RdeParams params;
    params.s = 0.6;
    params.t = -2.5;
    params.tol = 1e-14;

    {
        std::vector<Eigen::ArrayXd> rows(2, Eigen::ArrayXd(2));
        rows[0] << 0.2, 0.8;
        rows[1] << 0.05, 0.95;
        const auto model = model_from_rows(rows);
        const RdePoint fac = factored_rde(model, delta, params);
        const RdePoint joint = joint_super_alphabet(model, delta, params);
        CHECK(std::abs(fac.F - joint.F) < 1e-8);
        CHECK(std::abs(fac.R - joint.R) < 1e-8);
        CHECK(std::abs(fac.D - joint.D) < 1e-8);
    }
    {
        std::vector<Eigen::ArrayXd> rows(3, Eigen::ArrayXd(2));
        rows[0] << 0.3, 0.7;
        rows[1] << 0.12, 0.88;
        rows[2] << 0.02, 0.98;
        const auto model = model_from_rows(rows);
        const RdePoint fac = factored_rde(model, delta, params);
        const RdePoint joint = joint_super_alphabet(model, delta, params);
        CHECK(std::abs(fac.F - joint.F) < 1e-8);
        CHECK(std::abs(fac.R - joint.R) < 1e-8);
        CHECK(std::abs(fac.D - joint.D) < 1e-8);
    }
}

TEST_CASE("h and g inverses") {
    const double d = 7.0 / 31.0;
    // endpoints
    CHECK(h_inverse(binary_entropy(1.0 - d), d) == doctest::Approx(1.0 - d).epsilon(1e-9));
    CHECK(h_inverse(1e-9, d) == doctest::Approx(1.0 - d / 2.0).epsilon(1e-6));
    // roundtrips across a grid
    for (int i = 1; i <= 40; ++i) {
        const double r = binary_entropy(1.0 - d) * i / 41.0;
        const double u = h_inverse(r, d);
        CHECK(std::abs(h_rate(u, d) - r) < 1e-10);
    }
    CHECK_THROWS_AS(h_inverse(binary_entropy(1.0 - d) + 1e-3, d), std::domain_error);

    const double p = 0.9;
    CHECK(g_inverse(0.0, d, p) == doctest::Approx(p).epsilon(1e-9));
    const double f_edge = kl_divergence(1.0 - d, p);
    CHECK(g_inverse(f_edge, d, p) == doctest::Approx(1.0 - d).epsilon(1e-9));
    for (int i = 0; i <= 40; ++i) {
        const double fv = f_edge * i / 40.0;
        const double u = g_inverse(fv, d, p);
        CHECK(std::abs(kl_divergence(u, p) - fv) < 1e-10);
    }
    CHECK_THROWS_AS(g_inverse(f_edge + 1e-3, d, p), std::domain_error);

    // h strictly decreasing, g strictly decreasing on [1-d, p]: sampled slopes
    for (int i = 0; i + 1 <= 30; ++i) {
        const double u0 = (1.0 - d) + (d / 2.0 - 1e-6) * i / 30.0;
        const double u1 = (1.0 - d) + (d / 2.0 - 1e-6) * (i + 1) / 30.0;
        CHECK(h_rate(u1, d) < h_rate(u0, d));
    }
    for (int i = 0; i + 1 <= 30; ++i) {
        const double u0 = (1.0 - d) + (p - (1.0 - d)) * i / 30.0;
        const double u1 = (1.0 - d) + (p - (1.0 - d)) * (i + 1) / 30.0;
        CHECK(kl_divergence(u1, p) < kl_divergence(u0, p));
    }
}

TEST_CASE("theorem endpoints and roundtrips") {
    // max exponent at the rate endpoint
    {
        const int n = 31;
        const double dist = 7.0;
        const double p = 0.85;
        const double d = dist / n;
        const double r_max = n * binary_entropy(1.0 - d);
        CHECK(max_exponent(r_max, dist, n, p) ==
              doctest::Approx(n * kl_divergence(1.0 - d, p)).epsilon(1e-9));
        CHECK_THROWS_AS(max_exponent(r_max + 0.5, dist, n, p), std::domain_error);
        CHECK_THROWS_AS(max_exponent(0.0, dist, n, p), std::domain_error);
    }
    // zero exponent needs no attempts once D/N >= 2(1-p)
    {
        const int n = 31;
        const double p = 0.9;
        const double dist = 7.0;  // 7/31 > 2(1-p) = 0.2
        CHECK(min_rate_for_exponent(0.0, dist, n, p) == 0.0);
        const double f_max = n * kl_divergence(1.0 - dist / n, p);
        CHECK(min_rate_for_exponent(f_max, dist, n, p) ==
              doctest::Approx(n * binary_entropy(1.0 - dist / n)).epsilon(1e-9));
    }
    // inverse pair on both acceptance parameter sets (subset here)
    {
        const int n = 255;
        const double dist = 17.0;
        const double p = 0.9;  // p < 1 - D/N: increasing branch of g
        const double r_max = n * binary_entropy(1.0 - dist / n);
        for (int i = 1; i <= 10; ++i) {
            const double r = r_max * i / 11.0;
            const double back = min_rate_for_exponent(max_exponent(r, dist, n, p), dist, n, p);
            CHECK(std::abs(back - r) < 1e-6);
        }
    }
    {
        const int n = 31;
        const double dist = 7.0;
        const double p = 0.85;  // inside [1-d, 1-d/2): restrict to rates above N h(p)
        const double r_lo = n * h_rate(p, dist / n);
        const double r_hi = n * binary_entropy(1.0 - dist / n);
        for (int i = 1; i <= 10; ++i) {
            const double r = r_lo + (r_hi - r_lo) * i / 11.0;
            const double back = min_rate_for_exponent(max_exponent(r, dist, n, p), dist, n, p);
            CHECK(std::abs(back - r) < 1e-6);
        }
    }
    // monotone in R where the exponent is physical (u <= p)
    {
        const int n = 31;
        const double dist = 7.0;
        const double p = 0.9;
        double prev = 0.0;
        for (int i = 1; i <= 20; ++i) {
            const double r = n * binary_entropy(1.0 - dist / n) * i / 21.0;
            const double F = max_exponent(r, dist, n, p);
            CHECK(F >= prev - 1e-12);
            prev = F;
        }
    }
}

TEST_CASE("solve_st hits its targets and is self-consistent") {
    const auto delta = mbm_distortion(1);
    const auto model = iid_binary_model(31, 0.9);
    SolveOptions opts;
    opts.tol = 1e-9;
    const StSolution sol = solve_st(model, delta, 8.0, 7.0, opts);
    CHECK(sol.params.s >= 0.0);
    CHECK(sol.params.t <= 0.0);
    CHECK(std::abs(sol.point.R - 8.0) <= 1e-9 * 8.0);
    CHECK(std::abs(sol.point.D - 7.0) <= 1e-9 * 7.0);
    CHECK_FALSE(sol.clamped);
    // re-evaluating the returned parameters reproduces the point
    const RdePoint again = factored_rde(model, delta, sol.params);
    CHECK(again.R == doctest::Approx(sol.point.R).epsilon(1e-12));
    CHECK(again.D == doctest::Approx(sol.point.D).epsilon(1e-12));
    for (int i = 0; i < 31; ++i)
        CHECK(sol.point.Q.row(i).sum() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("solve_st matches the closed-form exponent on a feasible i.i.d. instance") {
    const auto delta = mbm_distortion(1);
    const auto model = iid_binary_model(255, 0.97);
    SolveOptions opts;
    opts.tol = 1e-10;
    const StSolution sol = solve_st(model, delta, 11.0, 17.0, opts);
    const double expect = max_exponent(11.0, 17.0, 255, 0.97);
    CHECK(std::abs(sol.point.F - expect) < 1e-4);
}

TEST_CASE("solve_st warm start converges to the same solution") {
    const auto delta = mbm_distortion(1);
    const auto model = iid_binary_model(31, 0.93);
    SolveOptions cold;
    cold.tol = 1e-10;
    const StSolution a = solve_st(model, delta, 8.0, 7.0, cold);
    SolveOptions warm = cold;
    warm.initial_st = {a.params.s * 1.1, a.params.t * 0.9};
    const StSolution b = solve_st(model, delta, 8.0, 7.0, warm);
    CHECK(std::abs(a.point.F - b.point.F) < 1e-7);
    CHECK(std::abs(a.point.R - b.point.R) < 1e-7);
    CHECK(std::abs(a.point.D - b.point.D) < 1e-7);
}

TEST_CASE("solve_st zero-rate request lands on the s = 0 boundary with F = 0") {
    const auto delta = mbm_distortion(1);
    const auto model = iid_binary_model(31, 0.9);
    // at s = 0 the distortion range tops out at 2(1-p) per position
    const double d_target = 31 * 2.0 * 0.1 * 0.999;
    const StSolution sol = solve_st(model, delta, 0.0, d_target);
    CHECK(sol.params.s == 0.0);
    CHECK(std::abs(sol.point.F) < 1e-9);
    CHECK(std::abs(sol.point.D - d_target) <= 1e-9 * std::max(1.0, d_target));
}

TEST_CASE("solve_st reports infeasible rate targets with the frontier value") {
    const auto delta = mbm_distortion(1);
    const auto model = iid_binary_model(31, 0.9);
    const double r_max = 31 * binary_entropy(1.0 - 7.0 / 31.0);  // ~23.9 bits
    try {
        solve_st(model, delta, r_max + 1.0, 7.0);
        FAIL("expected InfeasibleError");
    } catch (const InfeasibleError& e) {
        CHECK(e.frontier_rate() > r_max - 0.5);
        CHECK(e.frontier_rate() < r_max + 0.5);
    }
    SolveOptions clamp;
    clamp.clamp_to_frontier = true;
    const StSolution sol = solve_st(model, delta, r_max + 1.0, 7.0, clamp);
    CHECK(sol.clamped);
    CHECK(sol.point.R < r_max + 0.5);
}

TEST_CASE("blahut baseline: endpoints and dominance") {
    const auto delta = mbm_distortion(1);
    const auto model = iid_binary_model(31, 0.9);
    const double d_max = 31 * 0.2;  // min_k E delta: letter 1 costs 2(1-p)
    const double d_min = 31 * 0.1;  // erase exactly the errors

    // zero rate at (and beyond) the max distortion
    const RdResult at_max = blahut_rd(model, delta, d_max);
    CHECK(at_max.rate == doctest::Approx(0.0).epsilon(1e-9));
    CHECK_THROWS_AS(blahut_rd(model, delta, d_min * 0.9), InfeasibleError);

    const RdResult mid = blahut_rd(model, delta, 5.0);
    CHECK(mid.rate > 0.0);
    for (int i = 0; i < 31; ++i) CHECK(mid.Q.row(i).sum() == doctest::Approx(1.0).epsilon(1e-9));

    // at F > 0 the RDE point needs strictly more rate than the RD curve at
    // the same distortion
    RdeParams params;
    params.s = 1.2;
    params.t = -3.0;
    const RdePoint pt = factored_rde(model, delta, params);
    REQUIRE(pt.F > 1e-6);
    const RdResult rd = blahut_rd(model, delta, pt.D);
    CHECK(pt.R > rd.rate + 1e-6);
}
