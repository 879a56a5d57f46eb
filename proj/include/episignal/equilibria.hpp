#pragma once

#include "episignal/epi.hpp"
#include "episignal/signaling.hpp"

#include <optional>
#include <string>

namespace episignal {

enum class EquilibriumKind {
    kSeparating,
    kPartialPooling,
    kPooling,
};

std::string to_string(EquilibriumKind kind);

/// How R_c responds to pooled (inflated) estimates.
enum class RcAlphaModel {
    /// Realized policy scaled by the true/estimated compliance ratio, Rc
    /// evaluated at the resulting under-response.
    kUnderResponse,
    /// Rc(alpha) = Rc(0) + beta_sens * alpha; used for the closed-form
    /// approximation checks.
    kLinearized,
};

enum class WindowVerdict {
    kPooling,
    kPartialPooling,
    kSeparating,
};

std::string to_string(WindowVerdict verdict);

struct ExistenceWindow {
    double lower_bound = 0.0;  // e^{-a Rc(1)} I_m
    double upper_bound = 0.0;  // e^{-a Rc(0)} I_m (1 + a beta_sens)
    double beta_sens = 0.0;    // dRc/dalpha at alpha = 0
    double rc_at_zero = 0.0;
    double rc_at_one = 0.0;
    WindowVerdict verdict = WindowVerdict::kPooling;
    // Pure separation is never strict when I_m > 0; the verdict above uses
    // the window bounds regardless.
    bool separating_unstable_note = false;
};

struct FixedPointResult {
    double mixing_alpha = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

/// Equilibrium strategy matrices: Separating is the identity, Pooling sends
/// 00 from every type, PartialPooling mixes theta_01/theta_10 between truth
/// and 00 with probability alpha while theta_00 and theta_11 send 00.
SenderStrategy build_strategy(EquilibriumKind kind, double mixing_alpha = 0.0);

/// Posterior over types given the pooled message m = 00.
StatusDistribution pooled_message_posterior(const StatusDistribution& pi, double mixing_alpha);

struct EstimatedRates {
    double psi_hat = 0.0;
    double eta_hat = 0.0;
};

/// Claim-counting estimates under the partial-pooling strategy:
/// psi_hat = pi00 + pi01 + alpha*pi10 + pi11, eta_hat symmetric.
EstimatedRates estimated_rates(const StatusDistribution& pi, double mixing_alpha);

/// Rc at the realized behavior implied by the PHA's under-response to
/// pooled estimates.
double rc_of_alpha(const EpiParams& params, const BehaviorRates& baseline,
                   const StatusDistribution& pi, double mixing_alpha,
                   RcAlphaModel model = RcAlphaModel::kUnderResponse);

/// Central-difference dRc/dalpha at alpha = 0 (h = 1e-4).
double rc_alpha_sensitivity(const EpiParams& params, const BehaviorRates& baseline,
                            const StatusDistribution& pi, double step = 1e-4);

/// Existence window for the semantic weight plus the verdict for the
/// game's configured lambda1.
ExistenceWindow existence_window(const EpiParams& params, const BehaviorRates& baseline,
                                 const GameParams& game, const StatusDistribution& pi,
                                 RcAlphaModel model = RcAlphaModel::kUnderResponse);

/// Bisection solve of alpha = e^{-a Rc(alpha)} I_m / (lambda1 (1 - p(theta01|00))).
/// Throws std::runtime_error when no interior sign change exists.
FixedPointResult solve_alpha_fixed_point(const EpiParams& params, const BehaviorRates& baseline,
                                         const GameParams& game, const StatusDistribution& pi,
                                         double tolerance = 1e-8,
                                         RcAlphaModel model = RcAlphaModel::kUnderResponse);

/// Closed-form approximation
/// alpha* ~= e^{-a Rc(0)} I_m / (lambda1 + a beta e^{-a Rc(0)} I_m).
/// Not clamped; values above 1 signal an existence-window violation.
double alpha_approximation(const EpiParams& params, const BehaviorRates& baseline,
                           const GameParams& game, const StatusDistribution& pi);

}  // namespace episignal
