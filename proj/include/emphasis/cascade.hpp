#pragma once

// Cascade content selection: pick the n aspects to emphasize for a receiver.
// Stage 1 ranks by aspect value and stops when the value gap at the cut is
// decisive. Otherwise the aspects whose values tie with the cut are re-ranked
// by the regression models, and interaction rules nudge the scores of aspects
// within delta2 of the cut before the final sort.

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "emphasis/aspects.hpp"
#include "emphasis/common.hpp"
#include "emphasis/patterns.hpp"
#include "emphasis/regression.hpp"
#include "emphasis/traits.hpp"

namespace emphasis {

struct CascadeConfig {
    int n = 3;
    double delta1 = 0.0;  // value gaps larger than this are decisive
    double delta2 = 0.5;  // predicted-rank gaps larger than this are decisive; also the rule step
    double tau = 0.2;     // rule-applicability margin around the population mean

    void validate() const {
        if (n < 1 || n > static_cast<int>(kAspectCount)) {
            throw std::invalid_argument("cascade config: n must be in 1..8");
        }
        if (delta1 < 0.0 || delta2 < 0.0 || tau < 0.0) {
            throw std::invalid_argument("cascade config: thresholds must be non-negative");
        }
    }
};

// Descending value order with explicit tie groups; canonical aspect order
// inside each group.
struct ValueRanking {
    std::vector<std::vector<AspectKind>> groups;

    std::vector<AspectKind> flat() const {
        std::vector<AspectKind> out;
        for (const auto& g : groups) out.insert(out.end(), g.begin(), g.end());
        return out;
    }
};

inline ValueRanking rank_by_value(const CarSpec& car) {
    car.validate();
    ValueRanking out;
    for (int v = 5; v >= 1; --v) {
        std::vector<AspectKind> group;
        for (auto a : all_aspects()) {
            if (car.value[static_cast<std::size_t>(a)] == v) group.push_back(a);
        }
        if (!group.empty()) out.groups.push_back(std::move(group));
    }
    return out;
}

// Rules whose every condition holds for the receiver at margin tau.
inline std::vector<InteractionRule> applicable_rules(std::span<const InteractionRule> rules,
                                                     const TraitProfile& profile,
                                                     const PopulationStats& pop, double tau) {
    if (!profile.is_normalized) {
        throw std::invalid_argument("applicable_rules: profile is not normalized");
    }
    std::vector<InteractionRule> out;
    for (const auto& rule : rules) {
        if (rule_matches(rule, profile.normalized, pop, tau)) out.push_back(rule);
    }
    return out;
}

struct AppliedAdjustment {
    AspectKind aspect = AspectKind::safety;
    std::string rule_id;
    PreferenceClass label = PreferenceClass::neutral;
    double delta = 0.0;
    double before = 0.0;
    double after = 0.0;
};

struct SelectionTrace {
    ValueRanking value_ranking;
    int exit_stage = 1;
    std::vector<AspectKind> locked;
    std::vector<AspectKind> excluded;
    // Contested aspects with unadjusted predicted ranks, in stage-3 order.
    std::vector<std::pair<AspectKind, double>> contested;
    int slots = 0;         // m = n - |locked|
    double rank_cut = 0.0; // r_m, the m-th predicted rank (stages 3+)
    std::vector<AppliedAdjustment> adjustments;
    // Post-adjustment scores, in final order (stage 5 only).
    std::vector<std::pair<AspectKind, double>> final_scores;
    std::vector<AspectKind> selected;
};

struct SelectionResult {
    std::vector<AspectKind> selected;
    SelectionTrace trace;
};

inline SelectionResult cascade_select(const CarSpec& car, const TraitProfile& profile,
                                      const ModelSet& models,
                                      std::span<const InteractionRule> rules,
                                      const PopulationStats& pop, const CascadeConfig& config) {
    config.validate();
    car.validate();
    if (!profile.is_normalized) {
        throw std::invalid_argument("cascade_select: profile is not normalized");
    }

    SelectionResult result;
    SelectionTrace& trace = result.trace;
    trace.value_ranking = rank_by_value(car);
    const std::vector<AspectKind> by_value = trace.value_ranking.flat();
    const std::size_t n = static_cast<std::size_t>(config.n);
    auto value_of = [&](AspectKind a) { return car.value[static_cast<std::size_t>(a)]; };

    // Stage 1: decisive value gap at the cut. With n = 8 there is no (n+1)-th
    // aspect to compare against, so the full set is the answer.
    if (n == kAspectCount ||
        value_of(by_value[n - 1]) - value_of(by_value[n]) > config.delta1) {
        trace.exit_stage = 1;
        trace.selected.assign(by_value.begin(), by_value.begin() + n);
        result.selected = trace.selected;
        return result;
    }
    const int vn = value_of(by_value[n - 1]);

    // Stage 2: partition around v_n.
    std::vector<AspectKind> contested;
    for (AspectKind a : by_value) {
        if (value_of(a) - vn > config.delta1) {
            trace.locked.push_back(a);
        } else if (vn - value_of(a) > config.delta1) {
            trace.excluded.push_back(a);
        } else {
            contested.push_back(a);
        }
    }
    const std::size_t m = n - trace.locked.size();
    trace.slots = static_cast<int>(m);

    // Stage 3: order contested by predicted rank (lower = more important).
    std::vector<std::pair<AspectKind, double>> ranked;
    ranked.reserve(contested.size());
    for (AspectKind a : contested) {
        ranked.emplace_back(a, predict_rank(models.for_aspect(a), profile));
    }
    auto tie_order = [&](const std::pair<AspectKind, double>& lhs,
                         const std::pair<AspectKind, double>& rhs) {
        // Shared tie policy: higher value, then lower unadjusted predicted
        // rank, then canonical aspect order.
        if (value_of(lhs.first) != value_of(rhs.first)) {
            return value_of(lhs.first) > value_of(rhs.first);
        }
        if (lhs.second != rhs.second) return lhs.second < rhs.second;
        return lhs.first < rhs.first;
    };
    std::sort(ranked.begin(), ranked.end(), [&](const auto& lhs, const auto& rhs) {
        if (lhs.second != rhs.second) return lhs.second < rhs.second;
        return tie_order(lhs, rhs);
    });
    trace.contested = ranked;

    // Stage-1 non-exit guarantees contested reaches past the cut.
    const double rm = ranked[m - 1].second;
    trace.rank_cut = rm;
    if (ranked[m].second - rm > config.delta2) {
        trace.exit_stage = 3;
        trace.selected = trace.locked;
        for (std::size_t i = 0; i < m; ++i) trace.selected.push_back(ranked[i].first);
        result.selected = trace.selected;
        return result;
    }

    // Stage 4: adjust every contested aspect near the cut by its single
    // highest-accuracy applicable rule (earlier rule wins accuracy ties).
    std::vector<std::pair<AspectKind, double>> adjusted = ranked;
    for (auto& [aspect, score] : adjusted) {
        if (score > rm + config.delta2) continue;
        const InteractionRule* best = nullptr;
        for (const auto& rule : rules) {
            if (rule.aspect != aspect) continue;
            if (!rule_matches(rule, profile.normalized, pop, config.tau)) continue;
            if (best == nullptr || rule.accuracy > best->accuracy ||
                (rule.accuracy == best->accuracy && rule.id < best->id)) {
                best = &rule;
            }
        }
        if (best == nullptr) continue;
        double delta = 0.0;
        if (best->label == PreferenceClass::important) delta = -config.delta2;
        if (best->label == PreferenceClass::not_important) delta = config.delta2;
        AppliedAdjustment adj;
        adj.aspect = aspect;
        adj.rule_id = best->id;
        adj.label = best->label;
        adj.delta = delta;
        adj.before = score;
        adj.after = score + delta;
        trace.adjustments.push_back(std::move(adj));
        score += delta;
    }

    // Stage 5: final sort by adjusted score. Ties break by the shared
    // policy, using the unadjusted rank from stage 3.
    std::vector<std::size_t> order(adjusted.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t lhs, std::size_t rhs) {
        if (adjusted[lhs].second != adjusted[rhs].second) {
            return adjusted[lhs].second < adjusted[rhs].second;
        }
        return tie_order(ranked[lhs], ranked[rhs]);
    });
    trace.exit_stage = 5;
    for (std::size_t i : order) trace.final_scores.push_back(adjusted[i]);
    trace.selected = trace.locked;
    for (std::size_t i = 0; i < m; ++i) trace.selected.push_back(trace.final_scores[i].first);
    result.selected = trace.selected;
    return result;
}

// Renders the staged decision table: value rank, regression rank, rule
// adjustment, final rank, and a selected marker per aspect.
inline std::string render_trace(const CarSpec& car, const SelectionTrace& trace,
                                int significant_digits = 6) {
    auto fmt = [&](double v) { return format_number(v, significant_digits); };

    std::array<int, kAspectCount> value_rank{};
    {
        int rank = 1;
        for (const auto& group : trace.value_ranking.groups) {
            for (AspectKind a : group) value_rank[static_cast<std::size_t>(a)] = rank;
            rank += static_cast<int>(group.size());
        }
    }
    std::array<std::string, kAspectCount> regression_col, adjust_col, final_col, status_col;
    regression_col.fill("-");
    adjust_col.fill("-");
    final_col.fill("-");
    for (AspectKind a : trace.locked) status_col[static_cast<std::size_t>(a)] = "locked";
    for (AspectKind a : trace.excluded) status_col[static_cast<std::size_t>(a)] = "excluded";
    for (const auto& [a, r] : trace.contested) {
        regression_col[static_cast<std::size_t>(a)] = fmt(r);
        status_col[static_cast<std::size_t>(a)] = "contested";
        final_col[static_cast<std::size_t>(a)] = fmt(r);
    }
    for (const auto& adj : trace.adjustments) {
        std::string text = adj.rule_id + " (" + std::string(preference_class_name(adj.label)) + ") ";
        if (adj.delta > 0.0) text += "+";
        text += fmt(adj.delta);
        adjust_col[static_cast<std::size_t>(adj.aspect)] = text;
    }
    for (const auto& [a, score] : trace.final_scores) {
        final_col[static_cast<std::size_t>(a)] = fmt(score);
    }

    std::array<bool, kAspectCount> selected{};
    for (AspectKind a : trace.selected) selected[static_cast<std::size_t>(a)] = true;

    std::vector<std::array<std::string, 7>> rows;
    rows.push_back({"aspect", "value", "value_rank", "regression_rank", "adjustment", "final_rank",
                    "selected"});
    for (AspectKind a : trace.value_ranking.flat()) {
        const std::size_t i = static_cast<std::size_t>(a);
        rows.push_back({std::string(aspect_name(a)), std::to_string(car.value[i]),
                        std::to_string(value_rank[i]), regression_col[i], adjust_col[i],
                        final_col[i], selected[i] ? "*" : ""});
    }

    std::array<std::size_t, 7> width{};
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    }
    std::ostringstream out;
    out << "exit stage: " << trace.exit_stage << "\n";
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            out << row[c] << std::string(width[c] - row[c].size(), ' ');
            out << (c + 1 < row.size() ? "  " : "");
        }
        out << "\n";
    }
    out << "selected:";
    for (AspectKind a : trace.selected) out << " " << aspect_name(a);
    out << "\n";
    return out.str();
}

}  // namespace emphasis
