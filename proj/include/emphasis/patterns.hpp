#pragma once

// Interaction-pattern mining: metric pairwise-constrained k-means over trait
// profiles with cannot-link constraints between respondents who put an
// aspect in different preference classes, followed by extraction of
// trait-condition rules from clusters that separate cleanly.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "emphasis/aspects.hpp"
#include "emphasis/common.hpp"
#include "emphasis/stats.hpp"
#include "emphasis/traits.hpp"

namespace emphasis {

enum class PreferenceClass { important, neutral, not_important };

inline std::string_view preference_class_name(PreferenceClass c) {
    switch (c) {
        case PreferenceClass::important: return "Important";
        case PreferenceClass::neutral: return "Neutral";
        case PreferenceClass::not_important: return "NotImportant";
    }
    throw std::invalid_argument("unknown preference class");
}

inline PreferenceClass preference_class_from_name(std::string_view name) {
    if (name == "Important") return PreferenceClass::important;
    if (name == "Neutral") return PreferenceClass::neutral;
    if (name == "NotImportant") return PreferenceClass::not_important;
    throw std::invalid_argument("unknown preference class: " + std::string(name));
}

// Ranks 1-3 -> Important, 4-5 -> Neutral, 6-8 -> NotImportant.
inline std::array<PreferenceClass, kAspectCount> ranks_to_classes(const AspectRanking& ranking) {
    ranking.validate();
    std::array<PreferenceClass, kAspectCount> out{};
    for (std::size_t a = 0; a < kAspectCount; ++a) {
        const int r = ranking.rank_of[a];
        out[a] = r <= 3   ? PreferenceClass::important
                 : r <= 5 ? PreferenceClass::neutral
                          : PreferenceClass::not_important;
    }
    return out;
}

// Cannot-link constraints, stored as unique (i, j) pairs with i < j.
struct CannotLinkSet {
    std::vector<std::pair<int, int>> pairs;

    void add(int i, int j) {
        if (i == j) throw std::invalid_argument("cannot-link: a point cannot be linked to itself");
        if (i > j) std::swap(i, j);
        pairs.emplace_back(i, j);
    }

    void finalize() {
        std::sort(pairs.begin(), pairs.end());
        pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    }
};

// Links every pair of respondents whose classes for the aspect differ.
inline CannotLinkSet build_cannot_links(
    std::span<const std::array<PreferenceClass, kAspectCount>> classes, AspectKind aspect) {
    CannotLinkSet links;
    const std::size_t a = static_cast<std::size_t>(aspect);
    for (std::size_t i = 0; i < classes.size(); ++i) {
        for (std::size_t j = i + 1; j < classes.size(); ++j) {
            if (classes[i][a] != classes[j][a]) {
                links.pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
            }
        }
    }
    return links;
}

enum class ConstraintMode { soft_penalty, hard };

struct ClusterParams {
    int k = 3;
    double penalty_weight = 1.0;
    int max_iterations = 100;
    std::uint64_t seed = 0;
    ConstraintMode mode = ConstraintMode::soft_penalty;
};

struct ClusterModel {
    std::vector<int> assignments;
    std::vector<std::vector<double>> centroids;
    // Per-cluster diagonal metric weights; distance is sum_d a_d (x_d - c_d)^2.
    std::vector<std::vector<double>> metric_weights;
    double objective = 0.0;
    int violated_constraints = 0;
    int iterations = 0;
    std::vector<double> objective_history;  // one entry per completed iteration
};

namespace detail {

// Metric weights are capped so single-point and zero-spread clusters keep a
// finite objective.
inline constexpr double kMetricCap = 1e12;

inline double metric_distance(std::span<const double> x, std::span<const double> c,
                              std::span<const double> w) {
    double s = 0.0;
    for (std::size_t d = 0; d < x.size(); ++d) {
        const double diff = x[d] - c[d];
        s += w[d] * diff * diff;
    }
    return s;
}

inline double log_det_diag(std::span<const double> w) {
    double s = 0.0;
    for (double v : w) s += std::log(v);
    return s;
}

inline int count_violations(std::span<const int> assignments, const CannotLinkSet& links) {
    int v = 0;
    for (const auto& [i, j] : links.pairs) {
        if (assignments[i] == assignments[j]) ++v;
    }
    return v;
}

// Closed-form centroids (means; empty clusters keep the fallback centroid)
// and diagonal metric weights a_d = n_h / S_hd capped at kMetricCap, which
// jointly minimize sum[dist - log det] for a fixed assignment.
inline void fit_cluster_params(const std::vector<std::vector<double>>& points,
                               std::span<const int> assignments, int k,
                               std::vector<std::vector<double>>& centroids,
                               std::vector<std::vector<double>>& weights) {
    const std::size_t dim = points[0].size();
    std::vector<std::size_t> count(k, 0);
    std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
    for (std::size_t i = 0; i < points.size(); ++i) {
        const int h = assignments[i];
        ++count[h];
        for (std::size_t d = 0; d < dim; ++d) sums[h][d] += points[i][d];
    }
    for (int h = 0; h < k; ++h) {
        if (count[h] == 0) continue;  // empty cluster: centroid and metric unchanged
        for (std::size_t d = 0; d < dim; ++d) {
            centroids[h][d] = sums[h][d] / static_cast<double>(count[h]);
        }
    }
    std::vector<std::vector<double>> sq(k, std::vector<double>(dim, 0.0));
    for (std::size_t i = 0; i < points.size(); ++i) {
        const int h = assignments[i];
        for (std::size_t d = 0; d < dim; ++d) {
            const double diff = points[i][d] - centroids[h][d];
            sq[h][d] += diff * diff;
        }
    }
    for (int h = 0; h < k; ++h) {
        if (count[h] == 0) continue;
        for (std::size_t d = 0; d < dim; ++d) {
            weights[h][d] = (sq[h][d] > 0.0)
                                ? std::min(static_cast<double>(count[h]) / sq[h][d], kMetricCap)
                                : kMetricCap;
        }
    }
}

}  // namespace detail

// Objective for a full assignment with its closed-form optimal centroids and
// metrics: sum_i [d_{A_h}(x_i, mu_h) - log det A_h] + w * (violated links).
inline double cluster_objective(const std::vector<std::vector<double>>& points,
                                const CannotLinkSet& links, std::span<const int> assignments,
                                int k, double penalty_weight) {
    const std::size_t dim = points[0].size();
    std::vector<std::vector<double>> centroids(k, std::vector<double>(dim, 0.0));
    std::vector<std::vector<double>> weights(k, std::vector<double>(dim, 1.0));
    detail::fit_cluster_params(points, assignments, k, centroids, weights);
    double j = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const int h = assignments[i];
        j += detail::metric_distance(points[i], centroids[h], weights[h]) -
             detail::log_det_diag(weights[h]);
    }
    return j + penalty_weight * detail::count_violations(assignments, links);
}

// Metric pairwise-constrained k-means, cannot-links only. Points are
// assigned one at a time in index order against the full objective (distance
// under the cluster metric, minus the cluster's log-det, plus the penalty for
// already-assigned link partners), then centroids and metrics are refit in
// closed form. Every step minimizes the same objective, so it never
// increases between iterations. In hard mode an assignment that violates a
// link is forbidden outright; when every cluster is forbidden for a point,
// the conflicting partners in the cheapest cluster are evicted and re-queued
// (bounded; exceeding the bound reports the constraints as infeasible).
inline ClusterModel mpck_means(const std::vector<std::vector<double>>& points,
                               const CannotLinkSet& links, const ClusterParams& params) {
    const std::size_t n = points.size();
    if (n == 0) throw std::invalid_argument("mpck_means: no points");
    const std::size_t dim = points[0].size();
    if (dim == 0) throw std::invalid_argument("mpck_means: points must have dimensions");
    for (const auto& p : points) {
        if (p.size() != dim) throw std::invalid_argument("mpck_means: ragged point dimensions");
    }
    const int k = params.k;
    if (k < 1) throw std::invalid_argument("mpck_means: k must be positive");
    if (static_cast<std::size_t>(k) > n) {
        throw std::invalid_argument("mpck_means: k exceeds the number of points");
    }
    if (params.max_iterations < 1) throw std::invalid_argument("mpck_means: max_iterations must be positive");
    if (params.penalty_weight < 0.0) throw std::invalid_argument("mpck_means: negative penalty weight");
    for (const auto& [i, j] : links.pairs) {
        if (i < 0 || j < 0 || static_cast<std::size_t>(i) >= n || static_cast<std::size_t>(j) >= n) {
            throw std::invalid_argument("mpck_means: cannot-link index out of range");
        }
        if (i == j) throw std::invalid_argument("mpck_means: self cannot-link");
    }

    std::vector<std::vector<int>> adjacency(n);
    for (const auto& [i, j] : links.pairs) {
        adjacency[i].push_back(j);
        adjacency[j].push_back(i);
    }

    // k-means++ seeding under the identity metric.
    Rng rng(mix_seed(params.seed, 0x6b6d7070ULL));
    std::vector<std::vector<double>> centroids;
    centroids.reserve(k);
    centroids.push_back(points[rng.next_index(n)]);
    std::vector<double> dist2(n);
    while (static_cast<int>(centroids.size()) < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : centroids) {
                double s = 0.0;
                for (std::size_t d = 0; d < dim; ++d) {
                    const double diff = points[i][d] - c[d];
                    s += diff * diff;
                }
                best = std::min(best, s);
            }
            dist2[i] = best;
            total += best;
        }
        std::size_t pick;
        if (total > 0.0) {
            const double target = rng.next_double() * total;
            double acc = 0.0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                acc += dist2[i];
                if (acc >= target) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = rng.next_index(n);
        }
        centroids.push_back(points[pick]);
    }
    std::vector<std::vector<double>> weights(k, std::vector<double>(dim, 1.0));

    std::vector<int> assignments(n, -1);
    std::vector<double> log_dets(k, 0.0);
    std::vector<int> conflicts(k, 0);

    const bool hard = params.mode == ConstraintMode::hard;
    const std::size_t eviction_budget = 10 * n + 100;

    ClusterModel model;
    double prev_objective = std::numeric_limits<double>::infinity();
    for (int iter = 1; iter <= params.max_iterations; ++iter) {
        for (int h = 0; h < k; ++h) log_dets[h] = detail::log_det_diag(weights[h]);

        // One ICM sweep in index order; hard-mode evictions are re-queued.
        std::vector<std::size_t> queue(n);
        for (std::size_t i = 0; i < n; ++i) queue[i] = i;
        std::size_t processed = 0;
        bool changed = false;
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
            if (queue.size() > n + eviction_budget) {
                throw std::domain_error("mpck_means: cannot-link constraints are infeasible for k = " +
                                        std::to_string(k));
            }
            const std::size_t i = queue[qi];
            std::fill(conflicts.begin(), conflicts.end(), 0);
            for (int partner : adjacency[i]) {
                if (assignments[partner] >= 0 && static_cast<std::size_t>(partner) != i) {
                    ++conflicts[assignments[partner]];
                }
            }
            const int current = assignments[i];
            int best_h = -1;
            double best_cost = std::numeric_limits<double>::infinity();
            double current_cost = std::numeric_limits<double>::infinity();
            for (int h = 0; h < k; ++h) {
                if (hard && conflicts[h] > 0) continue;
                const double cost = detail::metric_distance(points[i], centroids[h], weights[h]) -
                                    log_dets[h] +
                                    params.penalty_weight * static_cast<double>(conflicts[h]);
                if (h == current) current_cost = cost;
                if (cost < best_cost) {
                    best_cost = cost;
                    best_h = h;
                }
            }
            if (best_h < 0) {
                // Hard mode with every cluster in conflict: evict the
                // partners from the least-conflicted cluster and retry them.
                int evict_h = 0;
                for (int h = 1; h < k; ++h) {
                    if (conflicts[h] < conflicts[evict_h]) evict_h = h;
                }
                for (int partner : adjacency[i]) {
                    if (assignments[partner] == evict_h) {
                        assignments[partner] = -1;
                        queue.push_back(static_cast<std::size_t>(partner));
                    }
                }
                assignments[i] = evict_h;
                changed = true;
                ++processed;
                continue;
            }
            // Move only on strict improvement so ties cannot oscillate.
            if (current < 0 || best_cost < current_cost) {
                if (assignments[i] != best_h) changed = true;
                assignments[i] = best_h;
            }
            ++processed;
        }
        (void)processed;

        detail::fit_cluster_params(points, assignments, k, centroids, weights);
        const double objective =
            cluster_objective(points, links, assignments, k, params.penalty_weight);
        model.objective_history.push_back(objective);
        model.iterations = iter;
        if (!changed && iter > 1) break;
        if (iter > 1 && objective == prev_objective) break;
        prev_objective = objective;
    }

    model.assignments = assignments;
    model.violated_constraints = detail::count_violations(assignments, links);
    if (hard && model.violated_constraints > 0) {
        throw std::domain_error("mpck_means: hard mode ended with violated cannot-links");
    }
    model.objective = model.objective_history.back();

    // Canonical cluster ids: relabel by order of first appearance in the
    // assignment vector; unused ids (empty clusters) come last.
    std::vector<int> relabel(k, -1);
    int next_id = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (relabel[assignments[i]] < 0) relabel[assignments[i]] = next_id++;
    }
    for (int h = 0; h < k; ++h) {
        if (relabel[h] < 0) relabel[h] = next_id++;
    }
    model.centroids.assign(k, {});
    model.metric_weights.assign(k, {});
    for (int h = 0; h < k; ++h) {
        model.centroids[relabel[h]] = centroids[h];
        model.metric_weights[relabel[h]] = weights[h];
    }
    for (std::size_t i = 0; i < n; ++i) model.assignments[i] = relabel[assignments[i]];
    return model;
}

struct PatternCriteria {
    double cv_max = 0.12;    // coefficient of variation must stay below this
    double p_max = 0.001;    // Welch test vs the full population
    double diff_min = 0.2;   // |cluster mean - population mean| must exceed this
};

enum class ConditionSign { above, below };

inline char condition_sign_char(ConditionSign s) { return s == ConditionSign::above ? '+' : '-'; }

inline ConditionSign condition_sign_from_char(char c) {
    if (c == '+') return ConditionSign::above;
    if (c == '-') return ConditionSign::below;
    throw std::invalid_argument("condition sign must be '+' or '-'");
}

// A mined rule: receivers matching every trait condition tend to put the
// aspect in `label`. Conditions are kept sorted by trait.
struct InteractionRule {
    AspectKind aspect = AspectKind::safety;
    std::string id;
    PreferenceClass label = PreferenceClass::neutral;
    double accuracy = 0.0;
    std::vector<std::pair<TraitKind, ConditionSign>> conditions;
};

// A profile matches when every condition's trait deviates from the
// population mean in the stated direction by at least tau.
inline bool rule_matches(const InteractionRule& rule, std::span<const double> traits,
                         const PopulationStats& pop, double tau) {
    if (traits.size() != kTraitCount) {
        throw std::invalid_argument("rule_matches: expected a ten-trait vector");
    }
    for (const auto& [trait, sign] : rule.conditions) {
        const std::size_t t = static_cast<std::size_t>(trait);
        if (sign == ConditionSign::above) {
            if (traits[t] < pop.mean[t] + tau) return false;
        } else {
            if (traits[t] > pop.mean[t] - tau) return false;
        }
    }
    return true;
}

// Precision of the rule over a labelled dataset: among points matching all
// conditions, the fraction whose class equals the rule label.
inline double rule_accuracy(const InteractionRule& rule,
                            const std::vector<std::vector<double>>& points,
                            std::span<const PreferenceClass> classes, const PopulationStats& pop,
                            double tau) {
    if (points.size() != classes.size()) {
        throw std::invalid_argument("rule_accuracy: point and class counts differ");
    }
    std::size_t matched = 0, correct = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!rule_matches(rule, points[i], pop, tau)) continue;
        ++matched;
        if (classes[i] == rule.label) ++correct;
    }
    if (matched == 0) {
        throw std::domain_error("rule_accuracy: rule '" + rule.id + "' matches no respondents");
    }
    return static_cast<double>(correct) / static_cast<double>(matched);
}

struct ExtractionNotes {
    std::vector<int> skipped_small;       // clusters below two members
    std::vector<int> skipped_tied_label;  // no majority class
    std::vector<int> skipped_no_conditions;
    std::vector<int> skipped_no_support;  // rule matched nobody at tau
};

// Turns clusters into rules. A trait becomes a condition when the cluster is
// tight (CV below cv_max), significantly shifted versus the population
// (Welch p below p_max), and shifted by more than diff_min. Clusters with no
// majority class, no conditions, or no support at tau are dropped.
inline std::vector<InteractionRule> extract_patterns(
    const ClusterModel& model, const std::vector<std::vector<double>>& points,
    std::span<const PreferenceClass> classes, const PopulationStats& pop,
    const PatternCriteria& criteria, AspectKind aspect, double tau,
    ExtractionNotes* notes = nullptr) {
    const std::size_t n = points.size();
    if (model.assignments.size() != n || classes.size() != n) {
        throw std::invalid_argument("extract_patterns: model, points, and classes disagree on size");
    }
    if (n == 0) throw std::invalid_argument("extract_patterns: empty dataset");
    for (const auto& p : points) {
        if (p.size() != kTraitCount) {
            throw std::invalid_argument("extract_patterns: points must have ten traits");
        }
    }

    int k = 0;
    for (int a : model.assignments) k = std::max(k, a + 1);

    std::array<std::vector<double>, kTraitCount> population_columns;
    for (std::size_t t = 0; t < kTraitCount; ++t) {
        population_columns[t].reserve(n);
        for (const auto& p : points) population_columns[t].push_back(p[t]);
    }

    std::vector<InteractionRule> rules;
    int ordinal = 0;
    for (int h = 0; h < k; ++h) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < n; ++i) {
            if (model.assignments[i] == h) members.push_back(i);
        }
        if (members.size() < 2) {
            if (notes) notes->skipped_small.push_back(h);
            continue;
        }

        std::array<std::size_t, 3> class_counts{};
        for (std::size_t i : members) ++class_counts[static_cast<std::size_t>(classes[i])];
        std::size_t best_class = 0;
        bool tied = false;
        for (std::size_t c = 1; c < 3; ++c) {
            if (class_counts[c] > class_counts[best_class]) {
                best_class = c;
                tied = false;
            } else if (class_counts[c] == class_counts[best_class]) {
                tied = true;
            }
        }
        if (tied) {
            if (notes) notes->skipped_tied_label.push_back(h);
            continue;
        }

        InteractionRule rule;
        rule.aspect = aspect;
        rule.label = static_cast<PreferenceClass>(best_class);
        std::vector<double> column(members.size());
        for (std::size_t t = 0; t < kTraitCount; ++t) {
            for (std::size_t m = 0; m < members.size(); ++m) column[m] = points[members[m]][t];
            const double cluster_mean = mean(column);
            const double sd = sample_stddev(column);
            // CV is undefined at mean zero; such a trait cannot qualify.
            if (cluster_mean == 0.0) continue;
            const double cv = sd / std::fabs(cluster_mean);
            if (!(cv < criteria.cv_max)) continue;
            const TestResult test = t_test_independent(column, population_columns[t]);
            if (!(test.p_value < criteria.p_max)) continue;
            const double diff = cluster_mean - pop.mean[t];
            if (!(std::fabs(diff) > criteria.diff_min)) continue;
            rule.conditions.emplace_back(static_cast<TraitKind>(t),
                                         diff > 0.0 ? ConditionSign::above : ConditionSign::below);
        }
        if (rule.conditions.empty()) {
            if (notes) notes->skipped_no_conditions.push_back(h);
            continue;
        }
        rule.id = std::string(aspect_label(aspect)) + "-" + std::to_string(ordinal + 1);
        try {
            rule.accuracy = rule_accuracy(rule, points, classes, pop, tau);
        } catch (const std::domain_error&) {
            if (notes) notes->skipped_no_support.push_back(h);
            continue;
        }
        ++ordinal;
        rules.push_back(std::move(rule));
    }
    return rules;
}

struct SweepResult {
    ClusterModel model;
    int k = 0;
    std::vector<InteractionRule> rules;
};

// Tries every k in [k_lo, k_hi] (truncated to the point count), running
// several seeds per k and keeping the best objective, then picks the k whose
// best model yields the most rules; ties go to the smallest k. The rule ids
// in the result are numbered for the chosen k's model.
inline SweepResult sweep_k(const std::vector<std::vector<double>>& points,
                           const CannotLinkSet& links, std::span<const PreferenceClass> classes,
                           const PopulationStats& pop, const PatternCriteria& criteria,
                           AspectKind aspect, double tau, int k_lo, int k_hi, int seeds_per_k,
                           const ClusterParams& base_params) {
    if (k_lo < 1 || k_hi < k_lo) throw std::invalid_argument("sweep_k: bad k range");
    if (seeds_per_k < 1) throw std::invalid_argument("sweep_k: seeds_per_k must be positive");
    const int k_cap = static_cast<int>(points.size());
    const int hi = std::min(k_hi, k_cap);
    if (hi < k_lo) {
        throw std::domain_error("sweep_k: no feasible k in [" + std::to_string(k_lo) + ", " +
                                std::to_string(k_hi) + "] for " + std::to_string(points.size()) +
                                " points");
    }

    SweepResult chosen;
    std::size_t chosen_rule_count = 0;
    bool have_chosen = false;
    for (int k = k_lo; k <= hi; ++k) {
        ClusterModel best;
        bool have_best = false;
        for (int s = 0; s < seeds_per_k; ++s) {
            ClusterParams params = base_params;
            params.k = k;
            params.seed = mix_seed(base_params.seed, static_cast<std::uint64_t>(k),
                                   static_cast<std::uint64_t>(s));
            ClusterModel model;
            try {
                model = mpck_means(points, links, params);
            } catch (const std::domain_error&) {
                continue;  // infeasible seed in hard mode
            }
            if (!have_best || model.objective < best.objective) {
                best = std::move(model);
                have_best = true;
            }
        }
        if (!have_best) continue;
        auto rules = extract_patterns(best, points, classes, pop, criteria, aspect, tau);
        if (!have_chosen || rules.size() > chosen_rule_count) {
            chosen.model = std::move(best);
            chosen.k = k;
            chosen.rules = std::move(rules);
            chosen_rule_count = chosen.rules.size();
            have_chosen = true;
        }
    }
    if (!have_chosen) {
        throw std::domain_error("sweep_k: no feasible clustering in the requested k range");
    }
    return chosen;
}

}  // namespace emphasis
