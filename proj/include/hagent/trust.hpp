#pragma once

#include <compare>
#include <optional>

namespace hagent {

/// Trustworthiness percentage in [0, 100].
class TrustScore {
public:
    static constexpr int kMin = 0;
    static constexpr int kMax = 100;

    /// Throws Error(OutOfRange) outside [0, 100].
    static TrustScore make(int value);

    static constexpr bool inRange(long long value) noexcept { return value >= kMin && value <= kMax; }

    constexpr int value() const noexcept { return value_; }

    auto operator<=>(const TrustScore&) const = default;

private:
    explicit constexpr TrustScore(int value) noexcept : value_(value) {}

    friend TrustScore propagateTrust(std::optional<TrustScore>, std::optional<TrustScore>,
                                     std::optional<TrustScore>) noexcept;

    int value_;
};

inline TrustScore mkTrustScore(int value) { return TrustScore::make(value); }

/// Minimum over the present scores; 100 when none is present.
///
/// This is a deliberately small propagation rule: the effective trust of a
/// task output can never exceed the trust of the agent lane that produced
/// it, the trust attached to the task, or the output's own confidence.
TrustScore propagateTrust(std::optional<TrustScore> laneTrust,
                          std::optional<TrustScore> taskTrust,
                          std::optional<TrustScore> outputConfidence) noexcept;

} // namespace hagent
