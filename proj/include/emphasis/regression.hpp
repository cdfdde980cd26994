#pragma once

// Per-aspect rank regression: for each aspect, an OLS model predicting the
// importance rank (1..8, lower = more important) from the ten normalized
// traits plus an intercept.

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "emphasis/aspects.hpp"
#include "emphasis/common.hpp"
#include "emphasis/stats.hpp"
#include "emphasis/traits.hpp"

namespace emphasis {

struct RegressionModel {
    AspectKind aspect = AspectKind::safety;
    double intercept = 0.0;
    double intercept_se = 0.0;
    double intercept_p = 1.0;
    std::array<double, kTraitCount> slope{};
    std::array<double, kTraitCount> slope_se{};
    std::array<double, kTraitCount> slope_p{};
    std::size_t train_size = 0;
};

struct ModelSet {
    std::array<RegressionModel, kAspectCount> models{};
    std::string fingerprint;

    const RegressionModel& for_aspect(AspectKind a) const {
        return models[static_cast<std::size_t>(a)];
    }
};

// Digest of the training data (normalized traits + ranks); load and fit both
// use it so a bundle can be checked against the data it was built from.
inline std::string population_fingerprint(std::span<const TraitProfile> profiles,
                                          std::span<const AspectRanking> rankings) {
    std::uint64_t h = kFnvOffset;
    fnv1a_feed(h, static_cast<std::int64_t>(profiles.size()));
    for (const auto& p : profiles) {
        for (double v : p.normalized) fnv1a_feed(h, v);
    }
    for (const auto& r : rankings) {
        for (int v : r.rank_of) fnv1a_feed(h, static_cast<std::int64_t>(v));
    }
    return to_hex(h);
}

// Fits all eight aspect models. Profiles must be normalized; rankings pair
// up with profiles by index. Constant trait columns are rejected up front
// with the trait named, since they make the design matrix singular.
inline ModelSet fit_aspect_models(std::span<const TraitProfile> profiles,
                                  std::span<const AspectRanking> rankings) {
    const std::size_t n = profiles.size();
    if (rankings.size() != n) {
        throw std::invalid_argument("fit_aspect_models: profile and ranking counts differ");
    }
    if (n < kTraitCount + 2) {
        throw std::invalid_argument("fit_aspect_models: need at least " +
                                    std::to_string(kTraitCount + 2) + " respondents, got " +
                                    std::to_string(n));
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!profiles[i].is_normalized) {
            throw std::invalid_argument("fit_aspect_models: profile " + std::to_string(i) +
                                        " is not normalized");
        }
        rankings[i].validate();
    }
    for (std::size_t t = 0; t < kTraitCount; ++t) {
        double lo = profiles[0].normalized[t], hi = lo;
        for (const auto& p : profiles) {
            lo = std::min(lo, p.normalized[t]);
            hi = std::max(hi, p.normalized[t]);
        }
        if (lo == hi) {
            throw std::invalid_argument("fit_aspect_models: trait '" +
                                        std::string(trait_name(static_cast<TraitKind>(t))) +
                                        "' is constant across the population");
        }
    }

    std::vector<std::vector<double>> X(n, std::vector<double>(kTraitCount + 1, 1.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t t = 0; t < kTraitCount; ++t) X[i][t + 1] = profiles[i].normalized[t];
    }

    ModelSet set;
    std::vector<double> y(n);
    for (std::size_t a = 0; a < kAspectCount; ++a) {
        for (std::size_t i = 0; i < n; ++i) y[i] = rankings[i].rank_of[a];
        OlsFit fit;
        try {
            fit = ols_fit(X, y);
        } catch (const std::domain_error&) {
            throw std::domain_error(
                "fit_aspect_models: traits are collinear; cannot fit aspect '" +
                std::string(aspect_name(static_cast<AspectKind>(a))) + "'");
        }
        RegressionModel m;
        m.aspect = static_cast<AspectKind>(a);
        m.intercept = fit.beta[0];
        m.intercept_se = fit.std_error[0];
        m.intercept_p = fit.p_value[0];
        for (std::size_t t = 0; t < kTraitCount; ++t) {
            m.slope[t] = fit.beta[t + 1];
            m.slope_se[t] = fit.std_error[t + 1];
            m.slope_p[t] = fit.p_value[t + 1];
        }
        m.train_size = n;
        set.models[a] = m;
    }
    set.fingerprint = population_fingerprint(profiles, rankings);
    return set;
}

// Predicted importance rank for one receiver; lower = more important. The
// output is a score on the rank scale and is deliberately not clamped to
// [1, 8].
inline double predict_rank(const RegressionModel& model, const TraitProfile& profile) {
    if (!profile.is_normalized) {
        throw std::invalid_argument("predict_rank: profile is not normalized");
    }
    double r = model.intercept;
    for (std::size_t t = 0; t < kTraitCount; ++t) r += model.slope[t] * profile.normalized[t];
    return r;
}

inline std::string significance_stars(double p) {
    if (p < 0.0001) return "***";
    if (p < 0.005) return "**";
    if (p < 0.05) return "*";
    return "";
}

struct CoefficientCell {
    double slope = 0.0;
    double p_value = 1.0;
    std::string stars;
};

// cells[trait][aspect].
struct CoefficientTable {
    std::array<std::array<CoefficientCell, kAspectCount>, kTraitCount> cells{};
};

inline CoefficientTable coefficient_table(const ModelSet& set) {
    CoefficientTable table;
    for (std::size_t a = 0; a < kAspectCount; ++a) {
        const auto& m = set.models[a];
        for (std::size_t t = 0; t < kTraitCount; ++t) {
            table.cells[t][a] = {m.slope[t], m.slope_p[t], significance_stars(m.slope_p[t])};
        }
    }
    return table;
}

enum class TableFormat { text, csv };

inline std::string render_coefficient_table(const ModelSet& set, TableFormat format,
                                            int significant_digits = 6) {
    const CoefficientTable table = coefficient_table(set);
    std::ostringstream out;
    if (format == TableFormat::csv) {
        out << "trait";
        for (auto a : all_aspects()) out << "," << aspect_name(a);
        out << "\n";
        for (std::size_t t = 0; t < kTraitCount; ++t) {
            out << trait_name(static_cast<TraitKind>(t));
            for (std::size_t a = 0; a < kAspectCount; ++a) {
                const auto& c = table.cells[t][a];
                out << "," << format_number(c.slope, significant_digits) << c.stars;
            }
            out << "\n";
        }
        return out.str();
    }

    std::array<std::string, kTraitCount> row_names;
    std::size_t name_width = 0;
    for (std::size_t t = 0; t < kTraitCount; ++t) {
        row_names[t] = std::string(trait_name(static_cast<TraitKind>(t)));
        name_width = std::max(name_width, row_names[t].size());
    }
    std::array<std::array<std::string, kAspectCount>, kTraitCount> body;
    std::array<std::size_t, kAspectCount> col_width{};
    for (std::size_t a = 0; a < kAspectCount; ++a) {
        col_width[a] = aspect_label(static_cast<AspectKind>(a)).size();
        for (std::size_t t = 0; t < kTraitCount; ++t) {
            const auto& c = table.cells[t][a];
            body[t][a] = format_number(c.slope, significant_digits) + c.stars;
            col_width[a] = std::max(col_width[a], body[t][a].size());
        }
    }
    auto pad = [](const std::string& s, std::size_t w) {
        return s + std::string(w - s.size(), ' ');
    };
    out << pad("", name_width);
    for (std::size_t a = 0; a < kAspectCount; ++a) {
        out << "  " << pad(std::string(aspect_label(static_cast<AspectKind>(a))), col_width[a]);
    }
    out << "\n";
    for (std::size_t t = 0; t < kTraitCount; ++t) {
        out << pad(row_names[t], name_width);
        for (std::size_t a = 0; a < kAspectCount; ++a) out << "  " << pad(body[t][a], col_width[a]);
        out << "\n";
    }
    out << "significance: * p<0.05, ** p<0.005, *** p<0.0001 (two-sided t)\n";
    return out.str();
}

}  // namespace emphasis
