#pragma once

// Receiver trait model: five personality factors plus five portrait-value
// dimensions, scored from two fixed-length surveys and normalized to rank
// percentiles over a population.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace emphasis {

// Canonical trait order. Everything keyed by trait (profiles, regression
// slopes, rule conditions) uses this order.
enum class TraitKind : int {
    agreeableness = 0,
    conscientiousness,
    extraversion,
    neuroticism,
    openness,
    conservation,
    hedonism,
    openness_to_change,
    self_enhancement,
    self_transcendence,
};

inline constexpr std::size_t kTraitCount = 10;
inline constexpr std::size_t kPersonalityTraitCount = 5;
inline constexpr std::size_t kPersonalityItemCount = 50;
inline constexpr std::size_t kPersonalityItemsPerTrait = 10;
inline constexpr std::size_t kValueItemCount = 21;

inline constexpr std::array<std::string_view, kTraitCount> kTraitNames = {
    "agreeableness",    "conscientiousness", "extraversion",     "neuroticism",
    "openness",         "conservation",      "hedonism",         "openness_to_change",
    "self_enhancement", "self_transcendence",
};

inline std::string_view trait_name(TraitKind t) {
    return kTraitNames[static_cast<std::size_t>(t)];
}

inline TraitKind trait_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kTraitCount; ++i) {
        if (kTraitNames[i] == name) return static_cast<TraitKind>(i);
    }
    throw std::invalid_argument("unknown trait name: " + std::string(name));
}

inline bool is_personality_trait(TraitKind t) {
    return static_cast<std::size_t>(t) < kPersonalityTraitCount;
}

inline std::array<TraitKind, kTraitCount> all_traits() {
    std::array<TraitKind, kTraitCount> out{};
    for (std::size_t i = 0; i < kTraitCount; ++i) out[i] = static_cast<TraitKind>(i);
    return out;
}

struct SurveyResponse {
    std::string id;
    std::vector<int> personality_answers;  // 50 items, each 1..5
    std::vector<int> value_answers;        // 21 items, each 1..6
    // Attention-check items: (item name, answer), paired up by the caller.
    std::vector<std::pair<std::string, int>> validation_answers;
};

enum class Keying { positive, reversed };

// Maps survey items to traits. Personality items are keyed positive or
// reversed (reversed items contribute 6 - answer); value items contribute
// their raw answer to the mean of one value dimension.
struct ScoringKey {
    struct PersonalityItem {
        TraitKind trait = TraitKind::agreeableness;
        Keying keying = Keying::positive;
    };
    std::array<PersonalityItem, kPersonalityItemCount> personality{};
    std::array<TraitKind, kValueItemCount> values{};

    void validate() const {
        std::array<std::size_t, kPersonalityTraitCount> per_trait{};
        for (const auto& item : personality) {
            if (!is_personality_trait(item.trait)) {
                throw std::invalid_argument("scoring key assigns a personality item to a value dimension");
            }
            ++per_trait[static_cast<std::size_t>(item.trait)];
        }
        for (std::size_t t = 0; t < kPersonalityTraitCount; ++t) {
            if (per_trait[t] != kPersonalityItemsPerTrait) {
                throw std::invalid_argument("scoring key must assign exactly 10 items to trait '" +
                                            std::string(kTraitNames[t]) + "'");
            }
        }
        std::array<std::size_t, kTraitCount> per_value{};
        for (TraitKind t : values) {
            if (is_personality_trait(t)) {
                throw std::invalid_argument("scoring key assigns a value item to a personality trait");
            }
            ++per_value[static_cast<std::size_t>(t)];
        }
        for (std::size_t t = kPersonalityTraitCount; t < kTraitCount; ++t) {
            if (per_value[t] == 0) {
                throw std::invalid_argument("scoring key leaves value dimension '" +
                                            std::string(kTraitNames[t]) + "' without items");
            }
        }
    }
};

struct TraitProfile {
    std::array<double, kTraitCount> raw{};
    std::array<double, kTraitCount> normalized{};
    bool is_normalized = false;
};

struct PopulationStats {
    std::array<double, kTraitCount> mean{};
    std::array<double, kTraitCount> stddev{};
    std::size_t size = 0;
};

// Sum of keyed answers per personality trait; each trait lands in [10, 50].
inline std::array<double, kPersonalityTraitCount> score_personality(
    std::span<const int> answers, const ScoringKey& key) {
    if (answers.size() != kPersonalityItemCount) {
        throw std::invalid_argument("score_personality: expected 50 answers");
    }
    std::array<double, kPersonalityTraitCount> scores{};
    for (std::size_t i = 0; i < kPersonalityItemCount; ++i) {
        const int a = answers[i];
        if (a < 1 || a > 5) {
            throw std::invalid_argument("score_personality: answer for item " + std::to_string(i + 1) +
                                        " out of range 1..5");
        }
        const auto& item = key.personality[i];
        const int keyed = (item.keying == Keying::positive) ? a : 6 - a;
        scores[static_cast<std::size_t>(item.trait)] += keyed;
    }
    return scores;
}

// Mean answer per value dimension; each dimension lands in [1, 6].
inline std::array<double, kPersonalityTraitCount> score_values(std::span<const int> answers,
                                                               const ScoringKey& key) {
    if (answers.size() != kValueItemCount) {
        throw std::invalid_argument("score_values: expected 21 answers");
    }
    std::array<double, kPersonalityTraitCount> sums{};
    std::array<std::size_t, kPersonalityTraitCount> counts{};
    for (std::size_t i = 0; i < kValueItemCount; ++i) {
        const int a = answers[i];
        if (a < 1 || a > 6) {
            throw std::invalid_argument("score_values: answer for item " + std::to_string(i + 1) +
                                        " out of range 1..6");
        }
        const std::size_t dim = static_cast<std::size_t>(key.values[i]) - kPersonalityTraitCount;
        sums[dim] += a;
        ++counts[dim];
    }
    std::array<double, kPersonalityTraitCount> scores{};
    for (std::size_t d = 0; d < kPersonalityTraitCount; ++d) {
        if (counts[d] == 0) {
            throw std::invalid_argument("score_values: no items keyed to dimension '" +
                                        std::string(kTraitNames[d + kPersonalityTraitCount]) + "'");
        }
        scores[d] = sums[d] / static_cast<double>(counts[d]);
    }
    return scores;
}

// Full raw profile: personality sums in slots 0..4, value means in 5..9.
inline TraitProfile score_survey(const SurveyResponse& response, const ScoringKey& key) {
    TraitProfile profile;
    const auto p = score_personality(response.personality_answers, key);
    const auto v = score_values(response.value_answers, key);
    for (std::size_t i = 0; i < kPersonalityTraitCount; ++i) {
        profile.raw[i] = p[i];
        profile.raw[i + kPersonalityTraitCount] = v[i];
    }
    return profile;
}

struct ValidationPair {
    std::string item_a;
    std::string item_b;
};

struct SurveyValidation {
    bool valid = true;
    std::string reason;
};

// A response is rejected when any paraphrase pair disagrees by more than
// max_gap points.
inline SurveyValidation validate_survey(const SurveyResponse& response,
                                        const std::vector<ValidationPair>& pairs,
                                        int max_gap = 2) {
    auto find_answer = [&](const std::string& item) -> int {
        for (const auto& [name, answer] : response.validation_answers) {
            if (name == item) return answer;
        }
        throw std::invalid_argument("validate_survey: response has no answer for item '" + item + "'");
    };
    for (const auto& pair : pairs) {
        const int a = find_answer(pair.item_a);
        const int b = find_answer(pair.item_b);
        const int gap = std::abs(a - b);
        if (gap > max_gap) {
            return {false, "validation pair (" + pair.item_a + ", " + pair.item_b + "): |" +
                               std::to_string(a) + " - " + std::to_string(b) + "| = " +
                               std::to_string(gap) + " exceeds max gap " + std::to_string(max_gap)};
        }
    }
    return {true, ""};
}

// Rank-percentile normalization per trait: normalized = (avg rank - 1)/(N-1),
// ties sharing the average of the ranks they span. The population extremes
// map to 0 and 1 exactly; an all-tied trait maps everyone to 0.5.
inline std::pair<std::vector<TraitProfile>, PopulationStats> normalize_population(
    const std::vector<TraitProfile>& profiles) {
    const std::size_t n = profiles.size();
    if (n < 2) throw std::invalid_argument("normalize_population: need at least two profiles");

    std::vector<TraitProfile> out = profiles;
    for (std::size_t t = 0; t < kTraitCount; ++t) {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t lhs, std::size_t rhs) {
            if (profiles[lhs].raw[t] != profiles[rhs].raw[t]) {
                return profiles[lhs].raw[t] < profiles[rhs].raw[t];
            }
            return lhs < rhs;
        });
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && profiles[order[j + 1]].raw[t] == profiles[order[i]].raw[t]) ++j;
            // 1-based ranks i+1 .. j+1 share their average.
            const double avg_rank = 0.5 * static_cast<double>(i + j) + 1.0;
            const double value = (avg_rank - 1.0) / static_cast<double>(n - 1);
            for (std::size_t k = i; k <= j; ++k) out[order[k]].normalized[t] = value;
            i = j + 1;
        }
    }
    for (auto& p : out) p.is_normalized = true;

    PopulationStats stats;
    stats.size = n;
    for (std::size_t t = 0; t < kTraitCount; ++t) {
        double s = 0.0;
        for (const auto& p : out) s += p.normalized[t];
        stats.mean[t] = s / static_cast<double>(n);
        double ss = 0.0;
        for (const auto& p : out) {
            const double d = p.normalized[t] - stats.mean[t];
            ss += d * d;
        }
        stats.stddev[t] = std::sqrt(ss / static_cast<double>(n - 1));
    }
    return {std::move(out), stats};
}

inline double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.empty()) {
        throw std::invalid_argument("cosine_similarity: vectors must share a positive length");
    }
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) {
        throw std::domain_error("cosine_similarity: undefined for a zero-norm vector");
    }
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

enum class SimilarityMode { most_similar, least_similar };

struct NearestResult {
    std::size_t index = 0;
    double similarity = 0.0;
};

// Finds the best cosine match over normalized profiles; ties keep the lowest
// index.
inline NearestResult nearest_profile(const TraitProfile& target,
                                     std::span<const TraitProfile> population,
                                     SimilarityMode mode = SimilarityMode::most_similar) {
    if (population.empty()) throw std::invalid_argument("nearest_profile: empty population");
    if (!target.is_normalized) throw std::invalid_argument("nearest_profile: target is not normalized");
    NearestResult best;
    bool found = false;
    for (std::size_t i = 0; i < population.size(); ++i) {
        if (!population[i].is_normalized) {
            throw std::invalid_argument("nearest_profile: population profile " + std::to_string(i) +
                                        " is not normalized");
        }
        const double sim = cosine_similarity(target.normalized, population[i].normalized);
        const bool better = mode == SimilarityMode::most_similar ? sim > best.similarity
                                                                 : sim < best.similarity;
        if (!found || better) {
            best.index = i;
            best.similarity = sim;
            found = true;
        }
    }
    return best;
}

}  // namespace emphasis
