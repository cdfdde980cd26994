#pragma once

// Shared utilities: deterministic RNG, seed mixing, hashing, number formatting.
// Nothing in the library reads the clock or any other ambient state; all
// randomness flows from explicit seeds so repeated runs are byte-identical.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace emphasis {

inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr int kBundleFormatVersion = 1;

// splitmix64: used to derive independent child seeds from (seed, stream ids).
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed) { return splitmix64(seed); }

template <typename... Rest>
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t first, Rest... rest) {
    return mix_seed(splitmix64(seed ^ splitmix64(first)), static_cast<std::uint64_t>(rest)...);
}

// Deterministic RNG. mt19937_64's output sequence is fixed by the standard;
// we avoid std distributions (implementation-defined) and map raw words
// ourselves so results are identical across platforms and library versions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1): top 53 bits of the word.
    double next_double() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform in {0, ..., n-1}, unbiased via rejection.
    std::size_t next_index(std::size_t n) {
        if (n == 0) throw std::invalid_argument("next_index: n must be positive");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        for (;;) {
            const std::uint64_t r = engine_();
            if (r < limit) return static_cast<std::size_t>(r % n);
        }
    }

    int next_int(int lo, int hi) {
        if (lo > hi) throw std::invalid_argument("next_int: empty range");
        return lo + static_cast<int>(next_index(static_cast<std::size_t>(hi - lo) + 1));
    }

    // Standard normal via Box-Muller, caching the paired deviate.
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = next_double();
        } while (u1 <= 0.0);
        const double u2 = next_double();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * 3.14159265358979323846 * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const std::size_t j = next_index(i);
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// FNV-1a 64-bit, used for dataset/model fingerprints.
inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

inline void fnv1a_feed(std::uint64_t& h, const void* data, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= bytes[i];
        h *= kFnvPrime;
    }
}

inline void fnv1a_feed(std::uint64_t& h, double v) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof bits);
    fnv1a_feed(h, &bits, sizeof bits);
}

inline void fnv1a_feed(std::uint64_t& h, std::int64_t v) {
    fnv1a_feed(h, &v, sizeof v);
}

inline void fnv1a_feed(std::uint64_t& h, std::string_view s) {
    fnv1a_feed(h, s.data(), s.size());
}

inline std::string to_hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return std::string(buf);
}

// Fixed significant-digit formatting for reports. %g keeps integers short
// and trims trailing zeros, so output stays readable and deterministic.
inline std::string format_number(double v, int significant_digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", significant_digits, v);
    return std::string(buf);
}

inline std::string format_full(double v) { return format_number(v, 17); }

}  // namespace emphasis
