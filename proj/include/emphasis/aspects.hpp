#pragma once

// Product aspects for the car domain: eight aspects, Likert values 1..5 on a
// given car, and per-respondent importance rankings (a permutation of 1..8,
// rank 1 = most important).

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace emphasis {

enum class AspectKind : int {
    safety = 0,
    fuel_economy,
    quality,
    style,
    price,
    luxury,
    performance,
    durability,
};

inline constexpr std::size_t kAspectCount = 8;

inline constexpr std::array<std::string_view, kAspectCount> kAspectNames = {
    "safety", "fuel_economy", "quality", "style", "price", "luxury", "performance", "durability",
};

// Display labels, used in tables and rule ids ("Safety-1").
inline constexpr std::array<std::string_view, kAspectCount> kAspectLabels = {
    "Safety", "FuelEconomy", "Quality", "Style", "Price", "Luxury", "Performance", "Durability",
};

inline std::string_view aspect_name(AspectKind a) {
    return kAspectNames[static_cast<std::size_t>(a)];
}

inline std::string_view aspect_label(AspectKind a) {
    return kAspectLabels[static_cast<std::size_t>(a)];
}

inline AspectKind aspect_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kAspectCount; ++i) {
        if (kAspectNames[i] == name) return static_cast<AspectKind>(i);
    }
    throw std::invalid_argument("unknown aspect name: " + std::string(name));
}

inline std::array<AspectKind, kAspectCount> all_aspects() {
    std::array<AspectKind, kAspectCount> out{};
    for (std::size_t i = 0; i < kAspectCount; ++i) out[i] = static_cast<AspectKind>(i);
    return out;
}

// rank_of[aspect index] = importance rank, 1 (most) .. 8 (least).
struct AspectRanking {
    std::array<int, kAspectCount> rank_of{};

    bool is_permutation() const {
        std::array<bool, kAspectCount> seen{};
        for (int r : rank_of) {
            if (r < 1 || r > static_cast<int>(kAspectCount) || seen[r - 1]) return false;
            seen[r - 1] = true;
        }
        return true;
    }

    void validate() const {
        if (!is_permutation()) {
            throw std::invalid_argument("aspect ranking must be a permutation of 1..8");
        }
    }
};

// Aspect values for one car, each on a 1..5 scale.
struct CarSpec {
    std::array<int, kAspectCount> value{};

    void validate() const {
        for (std::size_t i = 0; i < kAspectCount; ++i) {
            if (value[i] < 1 || value[i] > 5) {
                throw std::invalid_argument("car aspect '" + std::string(kAspectNames[i]) +
                                            "' must be in 1..5");
            }
        }
    }
};

}  // namespace emphasis
