#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "emphasis/aspects.hpp"
#include "emphasis/traits.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using emphasis::Keying;
using emphasis::ScoringKey;
using emphasis::SurveyResponse;
using emphasis::TraitKind;
using emphasis::TraitProfile;

namespace {

// Block key: personality item i belongs to trait i/10; value items are split
// 3/4/4/5/5 across the five dimensions in order.
ScoringKey block_key(Keying keying) {
    ScoringKey key;
    for (std::size_t i = 0; i < emphasis::kPersonalityItemCount; ++i) {
        key.personality[i].trait = static_cast<TraitKind>(i / 10);
        key.personality[i].keying = keying;
    }
    const std::size_t sizes[] = {3, 4, 4, 5, 5};
    std::size_t item = 0;
    for (std::size_t d = 0; d < 5; ++d) {
        for (std::size_t k = 0; k < sizes[d]; ++k) {
            key.values[item++] = static_cast<TraitKind>(emphasis::kPersonalityTraitCount + d);
        }
    }
    return key;
}

std::vector<int> block_personality_answers() {
    std::vector<int> a;
    const int first_block[] = {3, 3, 3, 3, 3, 4, 2, 5, 1, 3};  // sums to 30
    a.insert(a.end(), std::begin(first_block), std::end(first_block));
    a.insert(a.end(), 10, 5);  // conscientiousness: 50
    a.insert(a.end(), 10, 1);  // extraversion: 10
    a.insert(a.end(), 10, 4);  // neuroticism: 40
    a.insert(a.end(), 10, 2);  // openness: 20
    return a;
}

}  // namespace

TEST_CASE("trait and aspect names round-trip in canonical order", "[traits]") {
    const char* expected_traits[] = {
        "agreeableness",    "conscientiousness", "extraversion",     "neuroticism",
        "openness",         "conservation",      "hedonism",         "openness_to_change",
        "self_enhancement", "self_transcendence",
    };
    for (std::size_t i = 0; i < emphasis::kTraitCount; ++i) {
        const auto t = static_cast<TraitKind>(i);
        REQUIRE(emphasis::trait_name(t) == expected_traits[i]);
        REQUIRE(emphasis::trait_from_name(expected_traits[i]) == t);
        REQUIRE(emphasis::is_personality_trait(t) == (i < 5));
        REQUIRE(emphasis::all_traits()[i] == t);
    }
    REQUIRE_THROWS_AS(emphasis::trait_from_name("charisma"), std::invalid_argument);

    const char* expected_aspects[] = {"safety", "fuel_economy", "quality",     "style",
                                      "price",  "luxury",       "performance", "durability"};
    const char* expected_labels[] = {"Safety", "FuelEconomy", "Quality",     "Style",
                                     "Price",  "Luxury",      "Performance", "Durability"};
    for (std::size_t i = 0; i < emphasis::kAspectCount; ++i) {
        const auto a = static_cast<emphasis::AspectKind>(i);
        REQUIRE(emphasis::aspect_name(a) == expected_aspects[i]);
        REQUIRE(emphasis::aspect_label(a) == expected_labels[i]);
        REQUIRE(emphasis::aspect_from_name(expected_aspects[i]) == a);
        REQUIRE(emphasis::all_aspects()[i] == a);
    }
    REQUIRE_THROWS_AS(emphasis::aspect_from_name("Safety"), std::invalid_argument);
}

TEST_CASE("aspect ranking permutation check", "[traits]") {
    emphasis::AspectRanking r{{1, 2, 3, 4, 5, 6, 7, 8}};
    REQUIRE(r.is_permutation());
    REQUIRE_NOTHROW(r.validate());

    r.rank_of[3] = 1;  // duplicate
    REQUIRE_FALSE(r.is_permutation());
    REQUIRE_THROWS_AS(r.validate(), std::invalid_argument);

    r.rank_of[3] = 9;  // out of range
    REQUIRE_FALSE(r.is_permutation());
    r.rank_of[3] = 0;
    REQUIRE_FALSE(r.is_permutation());
}

TEST_CASE("car spec validation", "[traits]") {
    emphasis::CarSpec car{{3, 5, 1, 2, 4, 3, 3, 3}};
    REQUIRE_NOTHROW(car.validate());
    car.value[2] = 0;
    REQUIRE_THROWS_WITH(car.validate(), Catch::Matchers::ContainsSubstring("quality"));
    car.value[2] = 6;
    REQUIRE_THROWS_AS(car.validate(), std::invalid_argument);
}

TEST_CASE("scoring key validation", "[traits]") {
    REQUIRE_NOTHROW(block_key(Keying::positive).validate());

    // Unbalanced personality items.
    auto bad = block_key(Keying::positive);
    bad.personality[0].trait = TraitKind::conscientiousness;
    REQUIRE_THROWS_WITH(bad.validate(), Catch::Matchers::ContainsSubstring("agreeableness"));

    // Personality item pointing at a value dimension.
    bad = block_key(Keying::positive);
    bad.personality[0].trait = TraitKind::hedonism;
    REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);

    // Value item pointing at a personality trait.
    bad = block_key(Keying::positive);
    bad.values[0] = TraitKind::openness;
    REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);

    // A value dimension with no items.
    bad = block_key(Keying::positive);
    for (auto& v : bad.values) v = TraitKind::hedonism;
    REQUIRE_THROWS_WITH(bad.validate(), Catch::Matchers::ContainsSubstring("conservation"));
}

TEST_CASE("personality scoring sums keyed answers", "[traits]") {
    const auto key = block_key(Keying::positive);
    const auto answers = block_personality_answers();
    const auto scores = emphasis::score_personality(answers, key);
    REQUIRE(scores[0] == 30.0);  // 3+3+3+3+3+4+2+5+1+3
    REQUIRE(scores[1] == 50.0);
    REQUIRE(scores[2] == 10.0);
    REQUIRE(scores[3] == 40.0);
    REQUIRE(scores[4] == 20.0);

    // Reversing every item maps each trait sum s to 60 - s.
    const auto reversed = emphasis::score_personality(answers, block_key(Keying::reversed));
    for (std::size_t t = 0; t < 5; ++t) {
        REQUIRE(reversed[t] == 60.0 - scores[t]);
    }

    REQUIRE_THROWS_AS(emphasis::score_personality(std::vector<int>(49, 3), key),
                      std::invalid_argument);
    auto out_of_range = answers;
    out_of_range[7] = 6;
    REQUIRE_THROWS_WITH(emphasis::score_personality(out_of_range, key),
                        Catch::Matchers::ContainsSubstring("item 8"));
    out_of_range[7] = 0;
    REQUIRE_THROWS_AS(emphasis::score_personality(out_of_range, key), std::invalid_argument);
}

TEST_CASE("value scoring averages per dimension", "[traits]") {
    const auto key = block_key(Keying::positive);
    std::vector<int> answers{1, 4, 6,              // conservation: mean 11/3
                             2, 2, 2, 2,           // hedonism: 2
                             6, 6, 6, 6,           // openness_to_change: 6
                             1, 1, 1, 1, 1,        // self_enhancement: 1
                             3, 4, 3, 4, 1};       // self_transcendence: 3
    const auto scores = emphasis::score_values(answers, key);
    REQUIRE_THAT(scores[0], WithinRel(11.0 / 3.0, 1e-15));
    REQUIRE(scores[1] == 2.0);
    REQUIRE(scores[2] == 6.0);
    REQUIRE(scores[3] == 1.0);
    REQUIRE(scores[4] == 3.0);

    REQUIRE_THROWS_AS(emphasis::score_values(std::vector<int>(20, 3), key), std::invalid_argument);
    answers[2] = 7;
    REQUIRE_THROWS_WITH(emphasis::score_values(answers, key),
                        Catch::Matchers::ContainsSubstring("item 3"));
}

TEST_CASE("survey scoring fills personality then value slots", "[traits]") {
    SurveyResponse r;
    r.id = "r1";
    r.personality_answers = block_personality_answers();
    r.value_answers = {1, 4, 6, 2, 2, 2, 2, 6, 6, 6, 6, 1, 1, 1, 1, 1, 3, 4, 3, 4, 1};
    const auto profile = emphasis::score_survey(r, block_key(Keying::positive));
    REQUIRE(profile.raw[0] == 30.0);
    REQUIRE(profile.raw[4] == 20.0);
    REQUIRE_THAT(profile.raw[5], WithinRel(11.0 / 3.0, 1e-15));
    REQUIRE(profile.raw[9] == 3.0);
    REQUIRE_FALSE(profile.is_normalized);
}

TEST_CASE("survey validation rejects inconsistent paraphrase pairs", "[traits]") {
    SurveyResponse r;
    r.validation_answers = {{"calm_a", 4}, {"calm_b", 2}, {"risk_a", 1}, {"risk_b", 5}};
    const std::vector<emphasis::ValidationPair> pairs{{"calm_a", "calm_b"}, {"risk_a", "risk_b"}};

    const auto bad = emphasis::validate_survey(r, pairs, 2);
    REQUIRE_FALSE(bad.valid);
    REQUIRE(bad.reason ==
            "validation pair (risk_a, risk_b): |1 - 5| = 4 exceeds max gap 2");

    r.validation_answers = {{"calm_a", 4}, {"calm_b", 2}, {"risk_a", 3}, {"risk_b", 5}};
    const auto good = emphasis::validate_survey(r, pairs, 2);
    REQUIRE(good.valid);
    REQUIRE(good.reason.empty());

    // Gap exactly at the limit passes; one past fails.
    const auto at_limit = emphasis::validate_survey(r, pairs, 1);
    REQUIRE_FALSE(at_limit.valid);

    REQUIRE_THROWS_AS(emphasis::validate_survey(r, {{"calm_a", "missing"}}, 2),
                      std::invalid_argument);
}

TEST_CASE("rank percentile normalization", "[traits]") {
    auto make = [](double v) {
        TraitProfile p;
        for (auto& x : p.raw) x = v;
        return p;
    };
    // raw [10, 10, 50]: tied pair takes avg rank 1.5 -> 0.25, max -> 1.
    const std::vector<TraitProfile> profiles{make(10), make(10), make(50)};
    const auto [normalized, stats] = emphasis::normalize_population(profiles);
    REQUIRE(normalized.size() == 3);
    for (std::size_t t = 0; t < emphasis::kTraitCount; ++t) {
        REQUIRE_THAT(normalized[0].normalized[t], WithinAbs(0.25, 1e-15));
        REQUIRE_THAT(normalized[1].normalized[t], WithinAbs(0.25, 1e-15));
        REQUIRE_THAT(normalized[2].normalized[t], WithinAbs(1.0, 1e-15));
    }
    REQUIRE(normalized[0].is_normalized);
    REQUIRE(stats.size == 3);
    REQUIRE_THAT(stats.mean[0], WithinRel(0.5, 1e-15));
    // sample sd of {0.25, 0.25, 1.0}
    REQUIRE_THAT(stats.stddev[0], WithinRel(std::sqrt((2 * 0.0625 + 0.25) / 2.0), 1e-12));

    // Raw values untouched.
    REQUIRE(normalized[2].raw[0] == 50.0);
}

TEST_CASE("normalization maps extremes to 0 and 1 and all-ties to 0.5", "[traits]") {
    std::vector<TraitProfile> profiles(5);
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        profiles[i].raw[0] = static_cast<double>(i * i);  // distinct
        profiles[i].raw[1] = 7.0;                         // all tied
    }
    const auto [normalized, stats] = emphasis::normalize_population(profiles);
    REQUIRE(normalized[0].normalized[0] == 0.0);
    REQUIRE(normalized[4].normalized[0] == 1.0);
    REQUIRE_THAT(normalized[1].normalized[0], WithinAbs(0.25, 1e-15));
    for (const auto& p : normalized) {
        REQUIRE(p.normalized[1] == 0.5);
    }
    REQUIRE(stats.stddev[1] == 0.0);

    REQUIRE_THROWS_AS(emphasis::normalize_population({profiles[0]}), std::invalid_argument);
}

TEST_CASE("cosine similarity", "[traits]") {
    const std::vector<double> e1{1, 0, 0, 0};
    const std::vector<double> diag{1, 1, 0, 0};
    REQUIRE_THAT(emphasis::cosine_similarity(e1, diag), WithinRel(1.0 / std::sqrt(2.0), 1e-15));
    REQUIRE_THAT(emphasis::cosine_similarity(e1, e1), WithinRel(1.0, 1e-15));

    const std::vector<double> neg{-1, 0, 0, 0};
    REQUIRE_THAT(emphasis::cosine_similarity(e1, neg), WithinRel(-1.0, 1e-15));

    const std::vector<double> zero{0, 0, 0, 0};
    REQUIRE_THROWS_AS(emphasis::cosine_similarity(e1, zero), std::domain_error);
    REQUIRE_THROWS_AS(emphasis::cosine_similarity(e1, std::vector<double>{1, 2}),
                      std::invalid_argument);
}

TEST_CASE("nearest profile by cosine similarity", "[traits]") {
    auto make = [](std::array<double, emphasis::kTraitCount> values) {
        TraitProfile p;
        p.normalized = values;
        p.is_normalized = true;
        return p;
    };
    const TraitProfile target = make({1, 0, 0, 0, 0, 0, 0, 0, 0, 0.01});
    const std::vector<TraitProfile> population{
        make({0, 1, 0, 0, 0, 0, 0, 0, 0, 0.2}),   // nearly orthogonal
        make({1, 0.2, 0, 0, 0, 0, 0, 0, 0, 0}),   // close
        make({1, 0.1, 0, 0, 0, 0, 0, 0, 0, 0}),   // closest
    };
    const auto most = emphasis::nearest_profile(target, population);
    REQUIRE(most.index == 2);
    const auto least =
        emphasis::nearest_profile(target, population, emphasis::SimilarityMode::least_similar);
    REQUIRE(least.index == 0);

    // Ties keep the lowest index: duplicate the winner at the end.
    auto with_dup = population;
    with_dup.push_back(population[2]);
    REQUIRE(emphasis::nearest_profile(target, with_dup).index == 2);

    TraitProfile raw_only;
    REQUIRE_THROWS_AS(emphasis::nearest_profile(raw_only, population), std::invalid_argument);
    REQUIRE_THROWS_AS(emphasis::nearest_profile(target, std::vector<TraitProfile>{}),
                      std::invalid_argument);
}
