#include "episignal/equilibria.hpp"

#include <cmath>
#include <stdexcept>

namespace episignal {

std::string to_string(EquilibriumKind kind)
{
    switch (kind) {
        case EquilibriumKind::kSeparating: return "separating";
        case EquilibriumKind::kPartialPooling: return "partial_pooling";
        case EquilibriumKind::kPooling: return "pooling";
    }
    return "unknown";
}

std::string to_string(WindowVerdict verdict)
{
    switch (verdict) {
        case WindowVerdict::kPooling: return "pooling";
        case WindowVerdict::kPartialPooling: return "partial_pooling";
        case WindowVerdict::kSeparating: return "separating";
    }
    return "unknown";
}

SenderStrategy build_strategy(EquilibriumKind kind, double mixing_alpha)
{
    if (mixing_alpha < 0.0 || mixing_alpha > 1.0) {
        throw std::invalid_argument("build_strategy: mixing_alpha must be in [0,1]");
    }
    SenderStrategy strategy;
    switch (kind) {
        case EquilibriumKind::kSeparating:
            for (int c = 0; c < kNumStatuses; ++c) {
                strategy.probabilities[c][c] = 1.0;
            }
            break;
        case EquilibriumKind::kPooling:
            for (int c = 0; c < kNumStatuses; ++c) {
                strategy.probabilities[c][0] = 1.0;
            }
            break;
        case EquilibriumKind::kPartialPooling:
            // theta_00 and theta_11 send 00; theta_01 and theta_10 pool with
            // probability alpha and otherwise report truthfully.
            strategy.probabilities[0][0] = 1.0;
            strategy.probabilities[1][0] = mixing_alpha;
            strategy.probabilities[1][1] = 1.0 - mixing_alpha;
            strategy.probabilities[2][0] = mixing_alpha;
            strategy.probabilities[2][2] = 1.0 - mixing_alpha;
            strategy.probabilities[3][0] = 1.0;
            break;
    }
    return strategy;
}

StatusDistribution pooled_message_posterior(const StatusDistribution& pi, double mixing_alpha)
{
    const double marginal =
        pi[0] + mixing_alpha * (pi[1] + pi[2]) + pi[3];
    if (marginal <= 0.0) {
        throw std::domain_error("pooled_message_posterior: degenerate pooled marginal");
    }
    return StatusDistribution{pi[0] / marginal, mixing_alpha * pi[1] / marginal,
                              mixing_alpha * pi[2] / marginal, pi[3] / marginal};
}

EstimatedRates estimated_rates(const StatusDistribution& pi, double mixing_alpha)
{
    EstimatedRates rates;
    rates.psi_hat = pi[0] + pi[1] + mixing_alpha * pi[2] + pi[3];
    rates.eta_hat = pi[0] + pi[2] + mixing_alpha * pi[1] + pi[3];
    return rates;
}

double rc_of_alpha(const EpiParams& params, const BehaviorRates& baseline,
                   const StatusDistribution& pi, double mixing_alpha, RcAlphaModel model)
{
    if (model == RcAlphaModel::kLinearized) {
        const double rc0 = r_control(params, baseline);
        return rc0 + rc_alpha_sensitivity(params, baseline, pi) * mixing_alpha;
    }
    const EstimatedRates at_alpha = estimated_rates(pi, mixing_alpha);
    const EstimatedRates at_zero = estimated_rates(pi, 0.0);
    // Pooling inflates the PHA's compliance estimates; the realized policy
    // shrinks by the truthful/inflated ratio.
    const double psi_scale =
        at_alpha.psi_hat > 0.0 && at_zero.psi_hat > 0.0 ? at_zero.psi_hat / at_alpha.psi_hat : 1.0;
    const double eta_scale =
        at_alpha.eta_hat > 0.0 && at_zero.eta_hat > 0.0 ? at_zero.eta_hat / at_alpha.eta_hat : 1.0;
    BehaviorRates realized;
    realized.vaccination_rate = baseline.vaccination_rate * psi_scale;
    realized.masking_rate = baseline.masking_rate * eta_scale;
    return r_control(params, realized);
}

double rc_alpha_sensitivity(const EpiParams& params, const BehaviorRates& baseline,
                            const StatusDistribution& pi, double step)
{
    const double up = rc_of_alpha(params, baseline, pi, step, RcAlphaModel::kUnderResponse);
    const double down = rc_of_alpha(params, baseline, pi, -step, RcAlphaModel::kUnderResponse);
    return (up - down) / (2.0 * step);
}

ExistenceWindow existence_window(const EpiParams& params, const BehaviorRates& baseline,
                                 const GameParams& game, const StatusDistribution& pi,
                                 RcAlphaModel model)
{
    ExistenceWindow window;
    window.beta_sens = rc_alpha_sensitivity(params, baseline, pi);
    window.rc_at_zero = rc_of_alpha(params, baseline, pi, 0.0, model);
    window.rc_at_one = rc_of_alpha(params, baseline, pi, 1.0, model);
    const double a = game.economic_factor;
    const double im = game.mask_lie_incentive;
    window.lower_bound = std::exp(-a * window.rc_at_one) * im;
    window.upper_bound = std::exp(-a * window.rc_at_zero) * im * (1.0 + a * window.beta_sens);
    window.separating_unstable_note = im > 0.0;

    if (game.semantic_weight <= window.lower_bound) {
        window.verdict = WindowVerdict::kPooling;
    } else if (game.semantic_weight >= window.upper_bound) {
        window.verdict = WindowVerdict::kSeparating;
    } else {
        window.verdict = WindowVerdict::kPartialPooling;
    }
    return window;
}

namespace {

double fixed_point_rhs(const EpiParams& params, const BehaviorRates& baseline,
                       const GameParams& game, const StatusDistribution& pi, double alpha,
                       RcAlphaModel model)
{
    const double rc = rc_of_alpha(params, baseline, pi, alpha, model);
    const StatusDistribution posterior = pooled_message_posterior(pi, alpha);
    const double denom = game.semantic_weight * (1.0 - posterior[1]);
    if (denom <= 0.0) {
        throw std::domain_error("fixed point rhs: degenerate denominator");
    }
    return std::exp(-game.economic_factor * rc) * game.mask_lie_incentive / denom;
}

}  // namespace

FixedPointResult solve_alpha_fixed_point(const EpiParams& params, const BehaviorRates& baseline,
                                         const GameParams& game, const StatusDistribution& pi,
                                         double tolerance, RcAlphaModel model)
{
    const auto residual = [&](double alpha) {
        return alpha - fixed_point_rhs(params, baseline, game, pi, alpha, model);
    };

    // F(0+) < 0 whenever I_m > 0; look for the sign change toward 1.
    double lo = 1e-12;
    double hi = 1.0 - 1e-12;
    double f_lo = residual(lo);
    double f_hi = residual(hi);
    if (f_lo == 0.0) {
        return FixedPointResult{lo, 0.0, 0};
    }
    if (f_lo * f_hi > 0.0) {
        throw std::runtime_error(
            "solve_alpha_fixed_point: no interior sign change in (0,1); "
            "fall back to the boundary verdict");
    }

    FixedPointResult result;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = residual(mid);
        result.mixing_alpha = mid;
        result.residual = std::abs(f_mid);
        result.iterations = iter + 1;
        if (result.residual < tolerance) {
            return result;
        }
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    if (result.residual >= tolerance) {
        throw std::runtime_error("solve_alpha_fixed_point: bisection failed to reach tolerance");
    }
    return result;
}

double alpha_approximation(const EpiParams& params, const BehaviorRates& baseline,
                           const GameParams& game, const StatusDistribution& pi)
{
    const double beta_sens = rc_alpha_sensitivity(params, baseline, pi);
    const double rc0 = rc_of_alpha(params, baseline, pi, 0.0, RcAlphaModel::kUnderResponse);
    const double numerator = std::exp(-game.economic_factor * rc0) * game.mask_lie_incentive;
    const double denominator = game.semantic_weight + game.economic_factor * beta_sens * numerator;
    if (denominator <= 0.0) {
        throw std::domain_error("alpha_approximation: degenerate denominator");
    }
    return numerator / denominator;
}

}  // namespace episignal
