#include "episignal/signaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace episignal {

namespace {

constexpr double kRowSumTolerance = 1e-9;

void require(bool cond, const char* what)
{
    if (!cond) {
        throw std::invalid_argument(what);
    }
}

int hamming(Message message, TrueStatus status)
{
    return (message.vaccine_bit() != status.vaccine_bit ? 1 : 0) +
           (message.mask_bit() != status.mask_bit ? 1 : 0);
}

}  // namespace

void GameParams::validate() const
{
    require(vaccine_lie_incentive >= 0.0, "I_v must be >= 0");
    require(mask_lie_incentive >= 0.0, "I_m must be >= 0");
    require(semantic_weight >= 0.0, "lambda1 must be >= 0");
    require(distortion_weight >= 0.0, "lambda2 must be >= 0");
    require(rationality > 0.0, "alpha_RSA must be > 0");
    require(economic_factor >= 0.0, "economic factor a must be >= 0");
    require(distortion_threshold >= 0.0, "D* must be >= 0");
}

void BehaviorProfile::validate() const
{
    double sum = 0.0;
    for (double p : type_distribution) {
        require(p >= 0.0, "type distribution entries must be >= 0");
        sum += p;
    }
    require(std::abs(sum - 1.0) < 1e-9, "type distribution must sum to 1");
    require(non_responsive_share >= 0.0 && non_responsive_share <= 1.0,
            "non_responsive_share must be in [0,1]");
    require(vaccine_deception_propensity >= 0.05 && vaccine_deception_propensity <= 0.15,
            "vaccine deception propensity must be in [0.05, 0.15]");
    require(mask_deception_propensity >= 0.40 && mask_deception_propensity <= 0.80,
            "mask deception propensity must be in [0.40, 0.80]");
}

void SenderStrategy::validate() const
{
    for (int c = 0; c < kNumStatuses; ++c) {
        double sum = 0.0;
        for (int m = 0; m < kNumMessages; ++m) {
            const double g = probabilities[c][m];
            require(g >= -1e-15 && g <= 1.0 + 1e-12, "strategy entries must be in [0,1]");
            sum += g;
        }
        require(std::abs(sum - 1.0) < kRowSumTolerance, "strategy rows must sum to 1");
        // compliant bits are never misreported as non-compliant
        const TrueStatus status = TrueStatus::from_index(c);
        for (int m = 0; m < kNumMessages; ++m) {
            const Message msg{m};
            const bool claims_noncompliant_vaccine = msg.vaccine_bit() == 1 && status.vaccine_bit == 0;
            const bool claims_noncompliant_mask = msg.mask_bit() == 1 && status.mask_bit == 0;
            if (claims_noncompliant_vaccine || claims_noncompliant_mask) {
                require(probabilities[c][m] == 0.0,
                        "compliant bits must never be reported as non-compliant");
            }
        }
    }
}

void ReceiverBelief::validate() const
{
    for (int m = 0; m < kNumMessages; ++m) {
        double sum = 0.0;
        for (double p : posterior[m]) {
            require(p >= -1e-15, "posterior entries must be >= 0");
            sum += p;
        }
        require(std::abs(sum - 1.0) < kRowSumTolerance, "posterior rows must sum to 1");
    }
}

std::vector<BehaviorType> nine_types()
{
    std::vector<BehaviorType> types;
    for (int idx = 0; idx < kNumStatuses; ++idx) {
        const TrueStatus status = TrueStatus::from_index(idx);
        const int v_options = status.vaccine_bit == 1 ? 2 : 1;
        const int m_options = status.mask_bit == 1 ? 2 : 1;
        for (int v = 0; v < v_options; ++v) {
            for (int m = 0; m < m_options; ++m) {
                types.push_back(BehaviorType{status, v == 1, m == 1});
            }
        }
    }
    return types;  // 1 + 2 + 2 + 4 = 9 rows
}

std::vector<int> feasible_messages(TrueStatus status)
{
    std::vector<int> messages;
    for (int m = 0; m < kNumMessages; ++m) {
        const Message msg{m};
        if (msg.vaccine_bit() <= status.vaccine_bit && msg.mask_bit() <= status.mask_bit) {
            messages.push_back(m);
        }
    }
    return messages;
}

double lie_gain(const GameParams& game, Message message, TrueStatus status)
{
    double gain = 0.0;
    if (status.vaccine_bit == 1 && message.vaccine_bit() == 0) {
        gain += game.vaccine_lie_incentive;
    }
    if (status.mask_bit == 1 && message.mask_bit() == 0) {
        gain += game.mask_lie_incentive;
    }
    return gain;
}

double sender_utility_base(const SenderStrategy& strategy, TrueStatus status,
                           const GameParams& game)
{
    double utility = 0.0;
    for (int m = 0; m < kNumMessages; ++m) {
        utility += strategy(m, status.index()) * lie_gain(game, Message{m}, status);
    }
    return utility;
}

double sender_utility_rc(const SenderStrategy& strategy, TrueStatus status, const GameParams& game,
                         double rc)
{
    if (rc < 0.0) {
        throw std::invalid_argument("sender_utility_rc: rc must be >= 0");
    }
    return std::exp(-game.economic_factor * rc) * sender_utility_base(strategy, status, game);
}

double semantic_loss(const SenderStrategy& strategy, const ReceiverBelief& belief,
                     const StatusDistribution& pi, double responders, double population)
{
    if (population <= 0.0) {
        throw std::invalid_argument("semantic_loss: population must be positive");
    }
    if (responders <= 0.0) {
        return 0.0;  // non-responders carry p = q = 0
    }
    double accuracy = 0.0;
    for (int c = 0; c < kNumStatuses; ++c) {
        double inner = 0.0;
        for (int m = 0; m < kNumMessages; ++m) {
            inner += strategy(m, c) * belief.posterior[m][c];
        }
        accuracy += pi[c] * inner;
    }
    return -(responders / population) * accuracy;
}

SenderStrategy pragmatic_sender(const GameParams& game, double rc, const ReceiverBelief& belief)
{
    game.validate();
    const double discount = std::exp(-game.economic_factor * rc);
    SenderStrategy strategy;
    for (int c = 0; c < kNumStatuses; ++c) {
        const TrueStatus status = TrueStatus::from_index(c);
        const std::vector<int> feasible = feasible_messages(status);

        // scores in log space; subtract the max before exponentiating
        std::vector<double> score(feasible.size());
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < feasible.size(); ++i) {
            const Message msg{feasible[i]};
            const double utility = discount * lie_gain(game, msg, status) +
                                   game.semantic_weight * belief.posterior[feasible[i]][c];
            score[i] = game.rationality * utility;
            best = std::max(best, score[i]);
        }
        if (!std::isfinite(best)) {
            throw std::runtime_error("pragmatic_sender: all feasible messages have degenerate scores");
        }
        double norm = 0.0;
        for (std::size_t i = 0; i < feasible.size(); ++i) {
            score[i] = std::exp(score[i] - best);
            norm += score[i];
        }
        for (std::size_t i = 0; i < feasible.size(); ++i) {
            strategy.probabilities[c][feasible[i]] = score[i] / norm;
        }
    }
    return strategy;
}

ReceiverBelief bayes_posterior(const SenderStrategy& strategy, const StatusDistribution& pi)
{
    ReceiverBelief belief;
    for (int m = 0; m < kNumMessages; ++m) {
        double marginal = 0.0;
        for (int c = 0; c < kNumStatuses; ++c) {
            marginal += strategy(m, c) * pi[c];
        }
        belief.message_marginal[m] = marginal;
        if (marginal > 0.0) {
            for (int c = 0; c < kNumStatuses; ++c) {
                belief.posterior[m][c] = strategy(m, c) * pi[c] / marginal;
            }
        } else {
            belief.posterior[m] = pi;  // off-path messages keep the prior
        }
    }
    return belief;
}

ReceiverBelief receiver_inference_constrained(const std::array<double, kNumMessages>& message_marginal,
                                              const std::vector<std::array<double, kNumStatuses>>& sq_error,
                                              const std::vector<std::array<double, kNumStatuses>>& theta_given_c,
                                              double lambda2,
                                              DistortionSign sign)
{
    if (sq_error.size() != theta_given_c.size()) {
        throw std::invalid_argument("receiver_inference_constrained: table sizes must match");
    }
    ReceiverBelief belief;
    belief.message_marginal = message_marginal;
    const double orientation = sign == DistortionSign::kAsPrinted ? 1.0 : -1.0;
    for (int m = 0; m < kNumMessages; ++m) {
        if (message_marginal[m] <= 0.0) {
            throw std::domain_error("receiver_inference_constrained: undefined message (P(m)=0)");
        }
        std::array<double, kNumStatuses> exponent{};
        double best = -std::numeric_limits<double>::infinity();
        for (int c = 0; c < kNumStatuses; ++c) {
            double expected = 0.0;
            for (std::size_t t = 0; t < sq_error.size(); ++t) {
                expected += theta_given_c[t][c] * sq_error[t][c];
            }
            // (lambda2 * P(m) * Dbar - P(m)) / P(m); the -1 is constant in c
            exponent[c] = orientation * lambda2 * expected - 1.0;
            best = std::max(best, exponent[c]);
        }
        double norm = 0.0;
        for (int c = 0; c < kNumStatuses; ++c) {
            belief.posterior[m][c] = std::exp(exponent[c] - best);
            norm += belief.posterior[m][c];
        }
        for (int c = 0; c < kNumStatuses; ++c) {
            belief.posterior[m][c] /= norm;
        }
    }
    return belief;
}

double surprise(const ReceiverBelief& belief, TrueStatus status, Message message)
{
    if (!message.is_response()) {
        throw std::invalid_argument("surprise: undefined for non-response");
    }
    const double p = belief.posterior[message.value][status.index()];
    if (p <= 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return -std::log(p);
}

DeceptionLevel deception_level(const SenderStrategy& strategy,
                               const StatusDistribution& responder_type_counts, double silent_count)
{
    if (silent_count < 0.0) {
        throw std::invalid_argument("deception_level: silent count must be >= 0");
    }
    DeceptionLevel level;
    double responders = 0.0;
    for (int c = 0; c < kNumStatuses; ++c) {
        const TrueStatus status = TrueStatus::from_index(c);
        const double count = responder_type_counts[c];
        responders += count;
        for (int m = 0; m < kNumMessages; ++m) {
            const Message msg{m};
            const double weight = count * strategy(m, c);
            level.overall += 0.5 * weight * hamming(msg, status);
            level.vaccination += weight * (msg.vaccine_bit() != status.vaccine_bit ? 1.0 : 0.0);
            level.masking += weight * (msg.mask_bit() != status.mask_bit ? 1.0 : 0.0);
        }
    }
    const double responder_overall = level.overall;
    level.overall += silent_count;
    level.vaccination += silent_count;
    level.masking += silent_count;

    const double population = responders + silent_count;
    if (population > 0.0) {
        level.overall_rate = level.overall / population;
        level.vaccination_rate = level.vaccination / population;
        level.masking_rate = level.masking / population;
    }
    level.responder_rate = responders > 0.0 ? responder_overall / responders : 0.0;
    return level;
}

double entropy_bits(const StatusDistribution& pi)
{
    double h = 0.0;
    for (double p : pi) {
        if (p > 0.0) {
            h -= p * std::log2(p);
        }
    }
    return h;
}

double information_content_bits(const StatusDistribution& pi, const ReceiverBelief& belief)
{
    double conditional = 0.0;
    for (int m = 0; m < kNumMessages; ++m) {
        if (belief.message_marginal[m] > 0.0) {
            conditional += belief.message_marginal[m] * entropy_bits(belief.posterior[m]);
        }
    }
    const double mi = entropy_bits(pi) - conditional;
    return std::max(0.0, mi);  // guard tiny negative round-off
}

StatusDistribution status_distribution_from_fractions(double vaccinated_fraction,
                                                      double masking_fraction)
{
    const double v = std::min(std::max(vaccinated_fraction, 0.0), 1.0);
    const double m = std::min(std::max(masking_fraction, 0.0), 1.0);
    return StatusDistribution{v * m, v * (1.0 - m), (1.0 - v) * m, (1.0 - v) * (1.0 - m)};
}

PerBitLieRates per_bit_lie_rates(const SenderStrategy& strategy, const StatusDistribution& pi)
{
    PerBitLieRates rates;
    double vaccine_mass = 0.0;
    double mask_mass = 0.0;
    for (int c = 0; c < kNumStatuses; ++c) {
        const TrueStatus status = TrueStatus::from_index(c);
        const double mass = pi[c] > 0.0 ? pi[c] : 0.0;
        if (status.vaccine_bit == 1) {
            vaccine_mass += mass;
            for (int m = 0; m < kNumMessages; ++m) {
                if (Message{m}.vaccine_bit() == 0) {
                    rates.vaccine += mass * strategy.probabilities[c][m];
                }
            }
        }
        if (status.mask_bit == 1) {
            mask_mass += mass;
            for (int m = 0; m < kNumMessages; ++m) {
                if (Message{m}.mask_bit() == 0) {
                    rates.mask += mass * strategy.probabilities[c][m];
                }
            }
        }
    }
    rates.vaccine = vaccine_mass > 0.0 ? rates.vaccine / vaccine_mass : 0.0;
    rates.mask = mask_mass > 0.0 ? rates.mask / mask_mass : 0.0;
    return rates;
}

SenderStrategy per_bit_strategy(double vaccine_lie_probability, double mask_lie_probability)
{
    if (vaccine_lie_probability < 0.0 || vaccine_lie_probability > 1.0 ||
        mask_lie_probability < 0.0 || mask_lie_probability > 1.0) {
        throw std::invalid_argument("per_bit_strategy: lie probabilities must be in [0,1]");
    }
    SenderStrategy strategy;
    for (int c = 0; c < kNumStatuses; ++c) {
        const TrueStatus status = TrueStatus::from_index(c);
        // per-bit report distribution; compliant bits always truthful
        const double claim_compliant_v =
            status.vaccine_bit == 1 ? vaccine_lie_probability : 1.0;
        const double claim_compliant_m = status.mask_bit == 1 ? mask_lie_probability : 1.0;
        for (int m = 0; m < kNumMessages; ++m) {
            const Message msg{m};
            double prob = 1.0;
            prob *= msg.vaccine_bit() == 0 ? claim_compliant_v : 1.0 - claim_compliant_v;
            prob *= msg.mask_bit() == 0 ? claim_compliant_m : 1.0 - claim_compliant_m;
            strategy.probabilities[c][m] = prob;
        }
    }
    return strategy;
}

}  // namespace episignal
