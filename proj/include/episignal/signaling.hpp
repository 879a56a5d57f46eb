#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace episignal {

/// True behavioral status as two bits. Bit value 0 is the compliant
/// (desirable) state, 1 the non-compliant one. Index = 2*vaccine_bit + mask_bit,
/// so the four statuses enumerate as 00, 01, 10, 11.
struct TrueStatus {
    int vaccine_bit = 0;
    int mask_bit = 0;

    int index() const { return 2 * vaccine_bit + mask_bit; }
    static TrueStatus from_index(int idx)
    {
        return TrueStatus{(idx >> 1) & 1, idx & 1};
    }
};

inline constexpr int kNumStatuses = 4;

/// Messages reuse the status encoding plus a distinguished "no response"
/// symbol for silent individuals.
struct Message {
    static constexpr int kNoResponse = 4;
    int value = 0;  // 0..3 concrete message, 4 = no response

    bool is_response() const { return value != kNoResponse; }
    int vaccine_bit() const { return (value >> 1) & 1; }
    int mask_bit() const { return value & 1; }
};

inline constexpr int kNumMessages = 4;  // concrete (responding) messages

/// Probability distribution over the four statuses.
using StatusDistribution = std::array<double, kNumStatuses>;

/// Game-layer constants (incentives, weights, rationality).
struct GameParams {
    double vaccine_lie_incentive = 1.0;  // I_v
    double mask_lie_incentive = 0.5;  // I_m
    double semantic_weight = 0.2;  // lambda1
    double distortion_weight = 1.0;  // lambda2
    double rationality = 1.0;  // alpha_RSA
    double economic_factor = 0.5;  // a
    double distortion_threshold = 1.0;  // D*

    void validate() const;
};

/// Population reporting profile: the type distribution plus how the
/// non-compliant lie about each bit.
struct BehaviorProfile {
    StatusDistribution type_distribution{0.25, 0.25, 0.25, 0.25};  // pi
    double non_responsive_share = 0.3;  // P(K_s)
    double vaccine_deception_propensity = 0.10;  // in [0.05, 0.15]
    double mask_deception_propensity = 0.60;  // in [0.40, 0.80]

    void validate() const;
};

/// Row-stochastic matrix g(m|c): row per true status, column per message.
/// A compliant bit is never reported as non-compliant, so rows only put
/// mass on messages m with m_bit <= c_bit per bit.
struct SenderStrategy {
    std::array<std::array<double, kNumMessages>, kNumStatuses> probabilities{};

    double operator()(int message, int status) const { return probabilities[status][message]; }
    void validate() const;
};

/// Receiver belief p(c|m) with per-message marginals. Rows for messages
/// with zero marginal probability hold the prior (off-path convention).
struct ReceiverBelief {
    std::array<StatusDistribution, kNumMessages> posterior{};
    std::array<double, kNumMessages> message_marginal{};

    void validate() const;
};

/// One of the nine reachable (status, per-bit honesty) combinations.
struct BehaviorType {
    TrueStatus status;
    bool vaccine_deceptive = false;
    bool mask_deceptive = false;

    /// The message this type sends: truthful bits except where deceptive.
    Message report() const
    {
        const int v = vaccine_deceptive ? 0 : status.vaccine_bit;
        const int m = mask_deceptive ? 0 : status.mask_bit;
        return Message{2 * v + m};
    }
};

/// The nine-type table: deception flags only exist for non-compliant bits.
std::vector<BehaviorType> nine_types();

/// Messages a sender of true status c may use (compliant bits never
/// misreported as non-compliant).
std::vector<int> feasible_messages(TrueStatus status);

/// Incentive collected by reporting m when the truth is c: I_v for a
/// vaccine-bit lie plus I_m for a mask-bit lie.
double lie_gain(const GameParams& game, Message message, TrueStatus status);

/// Per-individual deception payoff of a strategy row for type c.
double sender_utility_base(const SenderStrategy& strategy, TrueStatus status,
                           const GameParams& game);

/// Same payoff with every incentive term scaled by exp(-a * rc).
double sender_utility_rc(const SenderStrategy& strategy, TrueStatus status, const GameParams& game,
                         double rc);

/// Negative semantic accuracy:
/// U_L = -(K_c/K) * sum_c pi(c) sum_m g(m|c) p(c|m), in [-1, 0].
double semantic_loss(const SenderStrategy& strategy, const ReceiverBelief& belief,
                     const StatusDistribution& pi, double responders, double population);

/// Softmax (RSA) sender best response at temperature alpha_RSA over the
/// feasible message set for each status.
SenderStrategy pragmatic_sender(const GameParams& game, double rc, const ReceiverBelief& belief);

/// Bayes posterior p(c|m) oc g(m|c) pi(c), with message marginals.
/// Zero-marginal messages take the prior.
ReceiverBelief bayes_posterior(const SenderStrategy& strategy, const StatusDistribution& pi);

enum class DistortionSign {
    kAsPrinted,   // posterior mass grows with expected distortion
    kCorrected,   // posterior mass shrinks with expected distortion
};

/// Constrained inference distribution P(c|m) oc exp(+/- lambda2 * Dbar(c,m))
/// where Dbar(c,m) = sum_theta p(theta|c) * sq_error(theta, m).
/// `sq_error[t][c]` is the squared hospitalization error for belief-parameter
/// set theta_t under status c; `theta_given_c[t][c]` = p(theta_t | c).
ReceiverBelief receiver_inference_constrained(const std::array<double, kNumMessages>& message_marginal,
                                              const std::vector<std::array<double, kNumStatuses>>& sq_error,
                                              const std::vector<std::array<double, kNumStatuses>>& theta_given_c,
                                              double lambda2,
                                              DistortionSign sign = DistortionSign::kAsPrinted);

/// Surprise -ln p(c|m); infinite for zero-probability events.
double surprise(const ReceiverBelief& belief, TrueStatus status, Message message);

struct DeceptionLevel {
    double overall = 0.0;  // persons, in [|K_s|, K]
    double vaccination = 0.0;
    double masking = 0.0;
    double overall_rate = 0.0;  // divided by K
    double vaccination_rate = 0.0;
    double masking_rate = 0.0;
    double responder_rate = 0.0;  // overall component among responders only
};

/// Aggregate deception: half the strategy-weighted Hamming distance over
/// responders plus full weight for every silent individual. Components use
/// the bit-restricted distances (no half factor).
DeceptionLevel deception_level(const SenderStrategy& strategy,
                               const StatusDistribution& responder_type_counts, double silent_count);

/// Mutual information (bits) between type and message:
/// H(pi) - sum_m P(m) H(p(.|m)).
double information_content_bits(const StatusDistribution& pi, const ReceiverBelief& belief);

/// Entropy of a distribution in bits.
double entropy_bits(const StatusDistribution& pi);

/// Strategy where each non-compliant bit is independently misreported with
/// the given per-bit probabilities. Compliant bits are always truthful.
SenderStrategy per_bit_strategy(double vaccine_lie_probability, double mask_lie_probability);

/// Product-form type distribution from the compliant-bit marginals.
StatusDistribution status_distribution_from_fractions(double vaccinated_fraction,
                                                      double masking_fraction);

struct PerBitLieRates {
    double vaccine = 0.0;  // P(claim compliant | non-compliant), vaccine bit
    double mask = 0.0;
};

/// Strategy-implied per-bit misreporting rates among the non-compliant,
/// weighted by the prior mass of the non-compliant statuses.
PerBitLieRates per_bit_lie_rates(const SenderStrategy& strategy, const StatusDistribution& pi);

}  // namespace episignal
