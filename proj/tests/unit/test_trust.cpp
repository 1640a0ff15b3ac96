#include "doctest.h"

#include <random>

#include "hagent/error.hpp"
#include "hagent/trust.hpp"

using namespace hagent;

TEST_SUITE("trust") {

TEST_CASE("range is enforced at construction")
{
    CHECK(TrustScore::make(0).value() == 0);
    CHECK(TrustScore::make(100).value() == 100);
    for (int bad : {-1, 101, 1000, -100}) {
        try {
            TrustScore::make(bad);
            FAIL("accepted " << bad);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::OutOfRange);
        }
    }
    CHECK(TrustScore::inRange(50));
    CHECK_FALSE(TrustScore::inRange(-1));
}

TEST_CASE("propagateTrust takes the minimum of present scores")
{
    auto t = [](int v) { return std::optional<TrustScore>(TrustScore::make(v)); };
    CHECK(propagateTrust(t(90), t(80), t(70)).value() == 70);
    CHECK(propagateTrust(t(40), std::nullopt, t(70)).value() == 40);
    CHECK(propagateTrust(std::nullopt, t(55), std::nullopt).value() == 55);
    CHECK(propagateTrust(std::nullopt, std::nullopt, std::nullopt).value() == 100);
    CHECK(propagateTrust(t(0), t(100), t(100)).value() == 0);
}

TEST_CASE("propagateTrust never exceeds an input and ignores argument order")
{
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> score(0, 100), present(0, 1);
    for (int i = 0; i < 500; ++i) {
        std::optional<TrustScore> a, b, c;
        if (present(rng)) a = TrustScore::make(score(rng));
        if (present(rng)) b = TrustScore::make(score(rng));
        if (present(rng)) c = TrustScore::make(score(rng));
        auto r = propagateTrust(a, b, c);
        for (const auto& x : {a, b, c})
            if (x)
                CHECK(r <= *x);
        CHECK(r == propagateTrust(c, a, b));
        CHECK(r == propagateTrust(b, c, a));
        CHECK(r == propagateTrust(a, c, b));
    }
}

}
