#include <cmath>
#include <initializer_list>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "qae/schedules.hpp"

using namespace qae;

namespace {

std::vector<std::uint64_t> powers(const Schedule& s) {
    std::vector<std::uint64_t> out;
    for (const auto& e : s.entries) out.push_back(e.k);
    return out;
}

// Direct transcription of the hybrid definition, used as the reference.
std::vector<std::uint64_t> expand_runs(const std::vector<std::uint64_t>& base, unsigned j) {
    std::vector<std::uint64_t> out;
    for (auto k : base)
        for (unsigned i = 0; i <= j; ++i) out.push_back(k + i);
    return out;
}

}  // namespace

TEST_CASE("generated schedules follow their defining powers") {
    auto lin = make_schedule("linear", 4, 100);
    CHECK(powers(lin) == std::vector<std::uint64_t>{0, 1, 2, 3});
    for (const auto& e : lin.entries) CHECK(e.shots == 100);

    CHECK(powers(make_schedule("exponential", 5, 100)) == std::vector<std::uint64_t>{0, 1, 2, 4, 8});
    CHECK(powers(make_schedule("poly:2", 4, 1)) == std::vector<std::uint64_t>{0, 1, 4, 9});
    CHECK(powers(make_schedule("classical", 3, 100)) == std::vector<std::uint64_t>{0, 0, 0});
    CHECK(powers(make_schedule("cubic", 4, 1)) == std::vector<std::uint64_t>{0, 1, 8, 27});
}

TEST_CASE("closed forms regenerate every stored power") {
    for (const char* label : {"linear", "quadratic", "cubic", "poly:4", "exponential"}) {
        const auto kind = ScheduleKind::parse(label);
        const auto s = make_schedule(kind, 20, 7);
        for (std::size_t i = 0; i < s.size(); ++i) {
            std::uint64_t expected = 0;
            switch (kind.family) {
                case ScheduleFamily::linear: expected = i; break;
                case ScheduleFamily::polynomial: {
                    expected = 1;
                    for (unsigned d = 0; d < kind.degree; ++d) expected *= i;
                    break;
                }
                case ScheduleFamily::exponential: expected = i == 0 ? 0 : (std::uint64_t{1} << (i - 1)); break;
                default: FAIL("unexpected family");
            }
            CHECK(s.entries[i].k == expected);
        }
    }
}

TEST_CASE("linear and exponential agree on their first three experiments") {
    auto lin = make_schedule("linear", 3, 1);
    auto ex = make_schedule("exponential", 3, 1);
    CHECK(lin.entries == ex.entries);
}

TEST_CASE("hybrid expansion") {
    Schedule base{"custom", {{0, 1}, {4, 1}}};
    CHECK(powers(hybridize(base, 2)) == std::vector<std::uint64_t>{0, 1, 2, 4, 5, 6});

    auto quad = make_schedule("quadratic", 4, 1);
    CHECK(powers(hybridize(quad)) == std::vector<std::uint64_t>{0, 1, 2, 1, 2, 3, 4, 5, 6, 9, 10, 11});

    SUBCASE("matches the brute-force run expansion for random bases") {
        std::mt19937_64 rng(17);
        for (int rep = 0; rep < 50; ++rep) {
            Schedule b{"custom", {}};
            const auto len = 1 + rng() % 10;
            for (std::size_t i = 0; i < len; ++i) b.entries.push_back({rng() % 100, 1 + rng() % 5});
            const unsigned j = 1 + rng() % 4;
            auto h = hybridize(b, j);
            CHECK(h.size() == (j + 1) * b.size());
            CHECK(powers(h) == expand_runs(powers(b), j));
            for (std::size_t i = 0; i < h.size(); ++i) CHECK(h.entries[i].shots == b.entries[i / (j + 1)].shots);
        }
    }

    SUBCASE("hybrid labels build the same schedule") {
        auto direct = make_schedule("hybrid:2:exponential", 5, 3);
        auto composed = hybridize(make_schedule("exponential", 5, 3), 2);
        CHECK(direct.entries == composed.entries);
        CHECK(direct.kind == "hybrid:2:exponential");
    }
}

TEST_CASE("oracle call accounting") {
    CHECK(oracle_calls(make_schedule("linear", 3, 1), 2) == 9);
    CHECK(oracle_calls(make_schedule("exponential", 5, 1), 4) == 35);
    CHECK(oracle_calls(make_schedule("linear", 2, 100), 1) == 400);
    CHECK_THROWS_AS(oracle_calls(make_schedule("linear", 3, 1), 3), std::out_of_range);

    auto s = make_schedule("quadratic", 12, 9);
    auto cum = cumulative_calls(s);
    REQUIRE(cum.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(cum[i] == oracle_calls(s, i));
}

TEST_CASE("invalid requests are rejected") {
    CHECK_THROWS(make_schedule("linear", 0, 1));
    CHECK_THROWS(make_schedule("linear", 3, 0));
    CHECK_THROWS(make_schedule("fibonacci", 3, 1));
    CHECK_THROWS(make_schedule("poly:0", 3, 1));
    CHECK_THROWS(ScheduleKind::parse("hybrid:0:linear"));
    CHECK_THROWS(ScheduleKind::parse("hybrid:2"));
    CHECK_THROWS(make_schedule("exponential", 80, 1));
}

TEST_CASE("kind labels round-trip") {
    for (const char* label : {"classical", "linear", "quadratic", "cubic", "poly:5", "exponential", "hybrid:2:linear",
                              "hybrid:3:quadratic"}) {
        CHECK(ScheduleKind::parse(label).label() == label);
    }
    CHECK(ScheduleKind::parse("poly:2").label() == "quadratic");
    CHECK(ScheduleKind::parse("exp").label() == "exponential");
}

TEST_CASE("budget-driven schedule reaches the budget with the fewest entries") {
    auto s = make_schedule_for_budget(ScheduleKind::parse("linear"), 1000, 10);
    CHECK(oracle_calls(s, s.size() - 1) >= 1000);
    CHECK(oracle_calls(s, s.size() - 2) < 1000);
}

TEST_CASE("json round trip") {
    auto s = hybridize(make_schedule("cubic", 5, 4), 2);
    nlohmann::json j = s;
    CHECK(j["kind"] == "hybrid:2:cubic");
    CHECK(j["entries"][3] == nlohmann::json::array({1, 4}));
    CHECK(j.get<Schedule>() == s);
}
