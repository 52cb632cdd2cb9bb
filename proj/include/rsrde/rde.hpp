#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

#include "rsrde/channels.hpp"
#include "rsrde/errors.hpp"

namespace rsrde {

/// binary entropy in bits, H(0) = H(1) = 0
double binary_entropy(double u);
/// binary Kullback-Leibler divergence in bits
double kl_divergence(double u, double p);

/// Letter costs for top-ell multi-trial decoding: erasing costs 1 whatever
/// the truth, a correct hard decision costs 0, a wrong one costs 2. Summed
/// over positions this reproduces 2v + e of the induced decoding attempt.
/// Row index = error letter, column index = reproduction letter.
Eigen::ArrayXXd mbm_distortion(int ell);

/// d(x, xhat) = sum_i delta(x_i, xhat_i)
double distortion(const std::vector<std::uint8_t>& x, const std::vector<std::uint8_t>& x_hat,
                  const Eigen::ArrayXXd& delta);

struct RdeParams {
    double s = 0.0;  // >= 0
    double t = 0.0;  // <= 0
    double tol = 1e-12;
    int max_iter = 100000;
};

/// A point on the rate-distortion-exponent surface, unnormalized (F, R, D
/// sum over positions). Q stacks the per-position reproduction
/// distributions; W and p_tilde hold the matching conditionals and tilted
/// source rows.
struct RdePoint {
    double F = 0.0;
    double R = 0.0;
    double D = 0.0;
    Eigen::ArrayXXd Q;                   // N x (ell+1)
    std::vector<Eigen::ArrayXXd> W;      // per position, (ell+1) x (ell+1), (row j, col k)
    Eigen::ArrayXXd p_tilde;             // N x (ell+1)
};

struct ArimotoStep {
    Eigen::ArrayXd q_next;
    Eigen::ArrayXXd w;  // w(j, k) = Pr(xhat = k | x = j)
};

/// One alternating-minimization update. s = 0 collapses to the classical
/// rate-distortion update; t = 0 makes w ignore the distortion.
ArimotoStep arimoto_step(const Eigen::ArrayXd& p_vec, const Eigen::ArrayXXd& delta, double s,
                         double t, const Eigen::ArrayXd& q_prev);

/// Iterate arimoto_step from the uniform distribution until the sup-norm
/// change in q drops below params.tol, then evaluate (F, R, D). Throws
/// NonConvergenceError if max_iter is hit first.
RdePoint arimoto_rde_single(const Eigen::ArrayXd& p_vec, const Eigen::ArrayXXd& delta,
                            const RdeParams& params);

/// Per-position evaluation for an independent non-identical source: F, R, D
/// sum across positions. Rows with identical probabilities (quantized at
/// 1e-12) are computed once and scaled by their multiplicity.
RdePoint factored_rde(const ErrorPatternModel& model, const Eigen::ArrayXXd& delta,
                      const RdeParams& params);

struct StSolution {
    RdeParams params;
    RdePoint point;
    bool clamped = false;  // rate target was off the surface; point sits on the frontier
};

struct SolveOptions {
    double tol = 1e-9;
    double arimoto_tol = 1e-12;
    int max_iter = 100000;
    /// warm start for the damped-Newton path; bisection is used otherwise
    std::optional<std::pair<double, double>> initial_st;
    /// on an unreachable rate target, return the closest frontier point
    /// instead of throwing InfeasibleError
    bool clamp_to_frontier = false;
};

/// Find (s, t) such that the factored evaluation hits the unnormalized
/// targets: |R - rate_target| <= tol*max(1, rate_target) and likewise for
/// D. Throws InfeasibleError (with the achievable frontier rate) when the
/// rate target is off the surface at the requested distortion.
StSolution solve_st(const ErrorPatternModel& model, const Eigen::ArrayXXd& delta,
                    double rate_target, double distortion_target, const SolveOptions& opts = {});

/// Closed-form single-letter solution for the binary source with the
/// mbm_distortion(1) measure. case_id 1 and 2 are the boundary optima
/// (never erase impossible / always keep the hard decision), case 3 the
/// interior stationary point.
struct AnalyticCase {
    int case_id = 0;
    double u = 0.0;        // tilted probability of a correct hard decision
    double q1_star = 0.0;  // reproduction probability of the hard-decision letter
    RdePoint point;        // single-component
};
AnalyticCase analytic_mbm1(double p, double s, double t);

/// h(u) = H(u) - H(u + d_bar - 1), strictly decreasing on [1-d, 1-d/2)
double h_rate(double u, double d_bar);
/// inverse of h on (0, H(1-d)] -> [1-d, 1-d/2)
double h_inverse(double r_bar, double d_bar);
/// inverse of g(u) = KL(u || p): on [1-d, p] (decreasing branch) when
/// p >= 1-d, else on [1-d, 1) where g is increasing
double g_inverse(double f_bar, double d_bar, double p);

/// Largest exponent reachable with 2^rate attempts at unnormalized
/// distortion threshold `dist`: n * KL(h^{-1}(rate/n) || p)
double max_exponent(double rate, double dist, int n, double p);
/// Smallest rate whose 2^rate attempts reach `exponent`:
/// n * [H(g^{-1}(F/n)) - H(g^{-1}(F/n) + dist/n - 1)]^+
double min_rate_for_exponent(double exponent, double dist, int n, double p);

struct RdResult {
    double rate = 0.0;
    Eigen::ArrayXXd Q;
};

/// Classical alternating-minimization rate-distortion baseline at a common
/// slope across the independent positions; returns the minimum rate and
/// reproduction distributions at total distortion `distortion_target`.
RdResult blahut_rd(const ErrorPatternModel& model, const Eigen::ArrayXXd& delta,
                   double distortion_target);

/// Diagnostic dump: one CSV row (s, t, R, D, F) per grid point.
void rde_surface_csv(std::ostream& os, const ErrorPatternModel& model,
                     const Eigen::ArrayXXd& delta, const std::vector<double>& s_values,
                     const std::vector<double>& t_values);

}  // namespace rsrde
