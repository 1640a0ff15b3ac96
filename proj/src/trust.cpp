#include "hagent/trust.hpp"

#include <algorithm>
#include <string>

#include "hagent/error.hpp"

namespace hagent {

TrustScore TrustScore::make(int value)
{
    if (!inRange(value))
        throw Error(ErrorCode::OutOfRange, "trust score " + std::to_string(value) + " outside 0..100");
    return TrustScore(value);
}

TrustScore propagateTrust(std::optional<TrustScore> laneTrust,
                          std::optional<TrustScore> taskTrust,
                          std::optional<TrustScore> outputConfidence) noexcept
{
    int result = TrustScore::kMax;
    for (const auto& score : {laneTrust, taskTrust, outputConfidence})
        if (score)
            result = std::min(result, score->value());
    return TrustScore(result);
}

} // namespace hagent
