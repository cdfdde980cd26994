#pragma once

// Benchmark protocol: top-n agreement against ground truth, a value-only
// baseline with seeded random tie-breaking, a paired-t benchmark report, and
// a synthetic population generator with planted linear effects and planted
// trait-band clusters so recovery can be checked against a known answer.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "emphasis/aspects.hpp"
#include "emphasis/cascade.hpp"
#include "emphasis/common.hpp"
#include "emphasis/patterns.hpp"
#include "emphasis/regression.hpp"
#include "emphasis/stats.hpp"
#include "emphasis/traits.hpp"

namespace emphasis {

// |selected ∩ truth| / n, where n is the (shared) size of both sets.
inline double top_n_agreement(std::span<const AspectKind> selected,
                              std::span<const AspectKind> truth) {
    if (selected.size() != truth.size() || selected.empty()) {
        throw std::invalid_argument("top_n_agreement: sets must share a positive size");
    }
    std::array<bool, kAspectCount> in_truth{};
    for (AspectKind a : truth) {
        auto& seen = in_truth[static_cast<std::size_t>(a)];
        if (seen) throw std::invalid_argument("top_n_agreement: duplicate aspect in truth set");
        seen = true;
    }
    std::array<bool, kAspectCount> in_selected{};
    std::size_t overlap = 0;
    for (AspectKind a : selected) {
        auto& seen = in_selected[static_cast<std::size_t>(a)];
        if (seen) throw std::invalid_argument("top_n_agreement: duplicate aspect in selected set");
        seen = true;
        if (in_truth[static_cast<std::size_t>(a)]) ++overlap;
    }
    return static_cast<double>(overlap) / static_cast<double>(selected.size());
}

// Top n by value with ties inside each value group broken uniformly at
// random from the caller's stream.
inline std::vector<AspectKind> value_baseline(const CarSpec& car, int n, Rng& rng) {
    if (n < 1 || n > static_cast<int>(kAspectCount)) {
        throw std::invalid_argument("value_baseline: n must be in 1..8");
    }
    ValueRanking ranking = rank_by_value(car);
    std::vector<AspectKind> flat;
    for (auto& group : ranking.groups) {
        rng.shuffle(group);
        flat.insert(flat.end(), group.begin(), group.end());
    }
    flat.resize(static_cast<std::size_t>(n));
    return flat;
}

inline std::vector<AspectKind> value_baseline(const CarSpec& car, int n, std::uint64_t seed) {
    Rng rng(seed);
    return value_baseline(car, n, rng);
}

struct GroundTruthInstance {
    CarSpec car;
    TraitProfile receiver;
    std::vector<AspectKind> top1;  // size 1
    std::vector<AspectKind> top3;  // size 3
};

struct BenchmarkReport {
    struct PerInstance {
        double cascade_top1 = 0.0;
        double baseline_top1 = 0.0;
        double baseline_top1_avg = 0.0;
        double cascade_top3 = 0.0;
        double baseline_top3 = 0.0;
        double baseline_top3_avg = 0.0;
    };
    std::vector<PerInstance> per_instance;
    double cascade_top1_mean = 0.0;
    double baseline_top1_mean = 0.0;
    double baseline_top1_avg_mean = 0.0;
    double cascade_top3_mean = 0.0;
    double baseline_top3_mean = 0.0;
    double baseline_top3_avg_mean = 0.0;
    TestResult paired_top1;
    TestResult paired_top3;
    std::uint64_t seed = 0;
    int baseline_draws = 100;
};

// Runs the cascade and the value-only baseline over every instance at n = 1
// and n = 3. The baseline is reported twice: the seeded single draw that the
// paired t-test uses, and a mean over `baseline_draws` independent draws.
// Baseline streams derive from (seed, instance, n, draw), so reports are
// reproducible and instances are order-independent.
inline BenchmarkReport run_benchmark(std::span<const GroundTruthInstance> instances,
                                     const ModelSet& models,
                                     std::span<const InteractionRule> rules,
                                     const PopulationStats& pop, const CascadeConfig& config,
                                     std::uint64_t seed, int baseline_draws = 100) {
    if (instances.empty()) throw std::invalid_argument("run_benchmark: no instances");
    if (baseline_draws < 1) throw std::invalid_argument("run_benchmark: baseline_draws must be positive");

    BenchmarkReport report;
    report.seed = seed;
    report.baseline_draws = baseline_draws;
    report.per_instance.reserve(instances.size());
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const auto& inst = instances[i];
        if (inst.top1.size() != 1 || inst.top3.size() != 3) {
            throw std::invalid_argument("run_benchmark: instance " + std::to_string(i) +
                                        " has malformed truth sets");
        }
        BenchmarkReport::PerInstance row;
        for (int n : {1, 3}) {
            CascadeConfig cfg = config;
            cfg.n = n;
            const auto selection = cascade_select(inst.car, inst.receiver, models, rules, pop, cfg);
            const auto& truth = (n == 1) ? inst.top1 : inst.top3;
            const double cascade_agreement = top_n_agreement(selection.selected, truth);

            double first_draw = 0.0;
            double sum = 0.0;
            for (int d = 0; d < baseline_draws; ++d) {
                Rng rng(mix_seed(seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(n),
                                 static_cast<std::uint64_t>(d)));
                const auto pick = value_baseline(inst.car, n, rng);
                const double agreement = top_n_agreement(pick, truth);
                if (d == 0) first_draw = agreement;
                sum += agreement;
            }
            const double avg = sum / static_cast<double>(baseline_draws);
            if (n == 1) {
                row.cascade_top1 = cascade_agreement;
                row.baseline_top1 = first_draw;
                row.baseline_top1_avg = avg;
            } else {
                row.cascade_top3 = cascade_agreement;
                row.baseline_top3 = first_draw;
                row.baseline_top3_avg = avg;
            }
        }
        report.per_instance.push_back(row);
    }

    const std::size_t count = report.per_instance.size();
    std::vector<double> c1(count), b1(count), c3(count), b3(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto& row = report.per_instance[i];
        c1[i] = row.cascade_top1;
        b1[i] = row.baseline_top1;
        c3[i] = row.cascade_top3;
        b3[i] = row.baseline_top3;
        report.cascade_top1_mean += row.cascade_top1;
        report.baseline_top1_mean += row.baseline_top1;
        report.baseline_top1_avg_mean += row.baseline_top1_avg;
        report.cascade_top3_mean += row.cascade_top3;
        report.baseline_top3_mean += row.baseline_top3;
        report.baseline_top3_avg_mean += row.baseline_top3_avg;
    }
    const double denom = static_cast<double>(count);
    report.cascade_top1_mean /= denom;
    report.baseline_top1_mean /= denom;
    report.baseline_top1_avg_mean /= denom;
    report.cascade_top3_mean /= denom;
    report.baseline_top3_mean /= denom;
    report.baseline_top3_avg_mean /= denom;
    if (count >= 2) {
        report.paired_top1 = t_test_paired(c1, b1);
        report.paired_top3 = t_test_paired(c3, b3);
    }
    return report;
}

// Reference results from the original human-subject evaluation of this
// protocol. They depend on a crowdsourced ground-truth panel and are not
// reproducible in this artifact; they appear in reports for orientation only.
struct ReferenceResults {
    double cascade_top1 = 0.62;
    double cascade_top3 = 0.87;
    double baseline_top1 = 0.54;
    double baseline_top3 = 0.46;
};

inline std::string render_benchmark_report(const BenchmarkReport& report,
                                           int significant_digits = 6) {
    auto fmt = [&](double v) { return format_number(v, significant_digits); };
    std::ostringstream out;
    out << "benchmark report\n";
    out << "instances: " << report.per_instance.size() << "\n";
    out << "seed: " << report.seed << "\n";
    out << "baseline draws: " << report.baseline_draws << "\n";
    out << "top-1 agreement: cascade " << fmt(report.cascade_top1_mean) << ", baseline "
        << fmt(report.baseline_top1_mean) << " (single draw), "
        << fmt(report.baseline_top1_avg_mean) << " (" << report.baseline_draws << "-draw mean)\n";
    out << "top-3 agreement: cascade " << fmt(report.cascade_top3_mean) << ", baseline "
        << fmt(report.baseline_top3_mean) << " (single draw), "
        << fmt(report.baseline_top3_avg_mean) << " (" << report.baseline_draws << "-draw mean)\n";
    auto test_line = [&](const char* name, const TestResult& t) {
        out << "paired t-test (" << name << ", cascade vs single-draw baseline): t = "
            << fmt(t.statistic) << ", df = " << fmt(t.df.value_or(0.0)) << ", p = "
            << fmt(t.p_value) << "\n";
    };
    test_line("top-1", report.paired_top1);
    test_line("top-3", report.paired_top3);
    const ReferenceResults ref;
    out << "reference (human-subject evaluation; external, not reproduced here): cascade "
        << fmt(ref.cascade_top1) << "/" << fmt(ref.cascade_top3) << ", baseline "
        << fmt(ref.baseline_top1) << "/" << fmt(ref.baseline_top3) << " (top-1/top-3)\n";
    return out.str();
}

inline std::string benchmark_report_csv(const BenchmarkReport& report,
                                        int significant_digits = 6) {
    auto fmt = [&](double v) { return format_number(v, significant_digits); };
    std::ostringstream out;
    out << "instance,cascade_top1,baseline_top1,baseline_top1_avg,cascade_top3,baseline_top3,"
           "baseline_top3_avg\n";
    for (std::size_t i = 0; i < report.per_instance.size(); ++i) {
        const auto& row = report.per_instance[i];
        out << i << "," << fmt(row.cascade_top1) << "," << fmt(row.baseline_top1) << ","
            << fmt(row.baseline_top1_avg) << "," << fmt(row.cascade_top3) << ","
            << fmt(row.baseline_top3) << "," << fmt(row.baseline_top3_avg) << "\n";
    }
    return out.str();
}

// Planted per-aspect linear model for the synthetic population.
struct PlantedSlopes {
    std::array<double, kAspectCount> intercept{};
    std::array<std::array<double, kTraitCount>, kAspectCount> slope{};
};

inline PlantedSlopes default_planted_slopes() {
    PlantedSlopes planted;
    planted.intercept = {4.0, 2.0, 5.0, 8.0, 1.0, 6.0, 7.0, 3.0};
    for (std::size_t a = 0; a < kAspectCount; ++a) {
        planted.slope[a][(a * 3) % kTraitCount] = 2.0;
        planted.slope[a][(a * 3 + 5) % kTraitCount] = -2.0;
    }
    return planted;
}

// A planted trait-band cluster: a block of consecutive respondents whose
// trait quantiles are drawn from a tight band (high for '+', low for '-')
// and whose latent score for one aspect is shifted according to the label.
struct PlantedPattern {
    AspectKind aspect = AspectKind::safety;
    PreferenceClass label = PreferenceClass::important;
    std::vector<std::pair<TraitKind, ConditionSign>> conditions;
    double effect = 3.0;          // latent shift magnitude; sign follows the label
    std::size_t group_size = 0;
    std::pair<double, double> band_above = {0.86, 0.94};  // quantile band for '+'
    std::pair<double, double> band_below = {0.20, 0.26};  // quantile band for '-'
};

struct SyntheticSpec {
    std::size_t n_respondents = 594;
    std::size_t n_receivers = 38;
    std::size_t n_cars = 10;
    double noise = 0.3;
    std::uint64_t seed = 0;
    PlantedSlopes slopes = default_planted_slopes();
    std::vector<PlantedPattern> patterns;  // assigned to consecutive blocks from index 0
};

struct SyntheticDataset {
    std::vector<SurveyResponse> responses;
    std::vector<TraitProfile> profiles;  // normalized
    std::vector<AspectRanking> rankings;
    PopulationStats population;
    std::vector<std::array<double, kAspectCount>> latents;
    std::vector<CarSpec> cars;
    std::vector<GroundTruthInstance> instances;
};

namespace detail {

// Spread a target sum across `items` answers each within [1, levels],
// round-robin so answers stay balanced. The per-item keyed contributions
// reproduce the target exactly when scored back.
inline std::vector<int> distribute_target(int target, std::size_t items, int levels) {
    std::vector<int> out(items, 1);
    int extra = target - static_cast<int>(items);
    while (extra > 0) {
        for (std::size_t j = 0; j < items && extra > 0; ++j) {
            if (out[j] < levels) {
                ++out[j];
                --extra;
            }
        }
    }
    return out;
}

}  // namespace detail

// Deterministic synthetic population. Survey answers are generated first
// (from per-trait quantile targets) and scored with the default key, so the
// written CSV and the in-memory dataset agree exactly. Latent aspect scores
// are the planted linear functions of the normalized traits, plus planted
// cluster effects and Gaussian noise; rankings sort latents ascending
// (lower = more important). Ground truth for an instance orders aspects by
// value first and breaks value ties by the receiver's latent importances,
// mirroring how the cascade's stages consume value and rank information.
inline SyntheticDataset generate_synthetic_population(const SyntheticSpec& spec,
                                                      const ScoringKey& key) {
    if (spec.n_respondents < kTraitCount + 2) {
        throw std::invalid_argument("synthetic spec: need at least 12 respondents");
    }
    if (spec.noise < 0.0) throw std::invalid_argument("synthetic spec: negative noise");
    if (spec.n_receivers > spec.n_respondents) {
        throw std::invalid_argument("synthetic spec: more receivers than respondents");
    }
    key.validate();

    // Pattern blocks: consecutive respondent index ranges from 0.
    std::vector<std::pair<std::size_t, std::size_t>> blocks;  // [start, end) per pattern
    std::size_t cursor = 0;
    for (const auto& pattern : spec.patterns) {
        if (pattern.conditions.empty()) {
            throw std::invalid_argument("synthetic spec: planted pattern without conditions");
        }
        blocks.emplace_back(cursor, cursor + pattern.group_size);
        cursor += pattern.group_size;
    }
    if (cursor > spec.n_respondents) {
        throw std::invalid_argument("synthetic spec: planted groups exceed the population size");
    }

    SyntheticDataset data;
    const std::size_t n = spec.n_respondents;

    // Per-value-dimension item lists from the key, for answer distribution.
    std::array<std::vector<std::size_t>, kPersonalityTraitCount> value_items;
    for (std::size_t i = 0; i < kValueItemCount; ++i) {
        value_items[static_cast<std::size_t>(key.values[i]) - kPersonalityTraitCount].push_back(i);
    }
    std::array<std::vector<std::size_t>, kPersonalityTraitCount> personality_items;
    for (std::size_t i = 0; i < kPersonalityItemCount; ++i) {
        personality_items[static_cast<std::size_t>(key.personality[i].trait)].push_back(i);
    }

    Rng trait_rng(mix_seed(spec.seed, 1));
    std::vector<TraitProfile> raw_profiles(n);
    data.responses.reserve(n);
    for (std::size_t r = 0; r < n; ++r) {
        // Quantile target per trait, overridden inside planted blocks.
        std::array<double, kTraitCount> quantile{};
        for (std::size_t t = 0; t < kTraitCount; ++t) quantile[t] = trait_rng.next_double();
        for (std::size_t p = 0; p < spec.patterns.size(); ++p) {
            if (r < blocks[p].first || r >= blocks[p].second) continue;
            for (const auto& [trait, sign] : spec.patterns[p].conditions) {
                const auto band = (sign == ConditionSign::above) ? spec.patterns[p].band_above
                                                                 : spec.patterns[p].band_below;
                quantile[static_cast<std::size_t>(trait)] =
                    band.first + trait_rng.next_double() * (band.second - band.first);
            }
        }

        SurveyResponse resp;
        resp.id = "r" + std::to_string(r + 1);
        resp.personality_answers.assign(kPersonalityItemCount, 1);
        resp.value_answers.assign(kValueItemCount, 1);
        for (std::size_t t = 0; t < kPersonalityTraitCount; ++t) {
            const int target = 10 + static_cast<int>(std::lround(quantile[t] * 40.0));
            const auto contributions =
                detail::distribute_target(target, kPersonalityItemsPerTrait, 5);
            for (std::size_t j = 0; j < kPersonalityItemsPerTrait; ++j) {
                const std::size_t item = personality_items[t][j];
                const int c = contributions[j];
                resp.personality_answers[item] =
                    (key.personality[item].keying == Keying::positive) ? c : 6 - c;
            }
        }
        for (std::size_t d = 0; d < kPersonalityTraitCount; ++d) {
            const std::size_t items = value_items[d].size();
            const int target = static_cast<int>(items) +
                               static_cast<int>(std::lround(quantile[d + kPersonalityTraitCount] *
                                                            5.0 * static_cast<double>(items)));
            const auto contributions = detail::distribute_target(target, items, 6);
            for (std::size_t j = 0; j < items; ++j) {
                resp.value_answers[value_items[d][j]] = contributions[j];
            }
        }
        // Attention checks: paired answers never more than one point apart.
        for (int pair_index = 1; pair_index <= 2; ++pair_index) {
            const int base = trait_rng.next_int(1, 5);
            const int offset = trait_rng.next_int(-1, 1);
            const int partner = std::clamp(base + offset, 1, 5);
            const std::string stem = "val_" + std::to_string(pair_index);
            resp.validation_answers.emplace_back(stem + "_a", base);
            resp.validation_answers.emplace_back(stem + "_b", partner);
        }
        raw_profiles[r] = score_survey(resp, key);
        data.responses.push_back(std::move(resp));
    }

    auto [profiles, population] = normalize_population(raw_profiles);
    data.profiles = std::move(profiles);
    data.population = population;

    Rng latent_rng(mix_seed(spec.seed, 2));
    data.latents.assign(n, {});
    data.rankings.assign(n, {});
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t a = 0; a < kAspectCount; ++a) {
            double latent = spec.slopes.intercept[a];
            for (std::size_t t = 0; t < kTraitCount; ++t) {
                latent += spec.slopes.slope[a][t] * data.profiles[r].normalized[t];
            }
            for (std::size_t p = 0; p < spec.patterns.size(); ++p) {
                if (r < blocks[p].first || r >= blocks[p].second) continue;
                if (spec.patterns[p].aspect != static_cast<AspectKind>(a)) continue;
                if (spec.patterns[p].label == PreferenceClass::important) {
                    latent -= spec.patterns[p].effect;
                } else if (spec.patterns[p].label == PreferenceClass::not_important) {
                    latent += spec.patterns[p].effect;
                }
            }
            latent += spec.noise * latent_rng.next_normal();
            data.latents[r][a] = latent;
        }
        std::array<std::size_t, kAspectCount> order{};
        for (std::size_t a = 0; a < kAspectCount; ++a) order[a] = a;
        std::sort(order.begin(), order.end(), [&](std::size_t lhs, std::size_t rhs) {
            if (data.latents[r][lhs] != data.latents[r][rhs]) {
                return data.latents[r][lhs] < data.latents[r][rhs];
            }
            return lhs < rhs;
        });
        for (std::size_t pos = 0; pos < kAspectCount; ++pos) {
            data.rankings[r].rank_of[order[pos]] = static_cast<int>(pos) + 1;
        }
    }

    Rng car_rng(mix_seed(spec.seed, 3));
    data.cars.reserve(spec.n_cars);
    for (std::size_t c = 0; c < spec.n_cars; ++c) {
        CarSpec car;
        for (std::size_t a = 0; a < kAspectCount; ++a) car.value[a] = car_rng.next_int(1, 5);
        data.cars.push_back(car);
    }

    for (std::size_t r = 0; r < spec.n_receivers; ++r) {
        for (const auto& car : data.cars) {
            GroundTruthInstance inst;
            inst.car = car;
            inst.receiver = data.profiles[r];
            std::array<std::size_t, kAspectCount> order{};
            for (std::size_t a = 0; a < kAspectCount; ++a) order[a] = a;
            std::sort(order.begin(), order.end(), [&](std::size_t lhs, std::size_t rhs) {
                if (car.value[lhs] != car.value[rhs]) return car.value[lhs] > car.value[rhs];
                if (data.latents[r][lhs] != data.latents[r][rhs]) {
                    return data.latents[r][lhs] < data.latents[r][rhs];
                }
                return lhs < rhs;
            });
            inst.top1 = {static_cast<AspectKind>(order[0])};
            inst.top3 = {static_cast<AspectKind>(order[0]), static_cast<AspectKind>(order[1]),
                         static_cast<AspectKind>(order[2])};
            data.instances.push_back(std::move(inst));
        }
    }
    return data;
}

}  // namespace emphasis
