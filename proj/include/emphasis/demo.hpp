#pragma once

// The showcase scenario used by the demo-figure command and its tests: one
// car, one receiver high on extraversion and neuroticism, intercept-only
// rank models, and the published rule catalog for the car domain.

#include <vector>

#include "emphasis/aspects.hpp"
#include "emphasis/cascade.hpp"
#include "emphasis/patterns.hpp"
#include "emphasis/regression.hpp"
#include "emphasis/traits.hpp"

namespace emphasis {

struct DemoScenario {
    CarSpec car;
    TraitProfile receiver;
    PopulationStats population;
    ModelSet models;
    std::vector<InteractionRule> rules;
    CascadeConfig config;
};

namespace detail {

inline InteractionRule make_rule(AspectKind aspect, int ordinal, PreferenceClass label,
                                 double accuracy,
                                 std::vector<std::pair<TraitKind, ConditionSign>> conditions) {
    InteractionRule rule;
    rule.aspect = aspect;
    rule.id = std::string(aspect_label(aspect)) + "-" + std::to_string(ordinal);
    rule.label = label;
    rule.accuracy = accuracy;
    rule.conditions = std::move(conditions);
    return rule;
}

}  // namespace detail

// Mined rule catalog for the car domain (trait conditions, majority label,
// precision). Used as the fixed rule set of the demo scenario.
inline std::vector<InteractionRule> demo_rule_catalog() {
    using detail::make_rule;
    constexpr auto A = ConditionSign::above;
    constexpr auto B = ConditionSign::below;
    constexpr auto imp = PreferenceClass::important;
    constexpr auto neu = PreferenceClass::neutral;
    constexpr auto nim = PreferenceClass::not_important;
    std::vector<InteractionRule> rules;
    rules.push_back(make_rule(AspectKind::safety, 1, imp, 0.70,
                              {{TraitKind::extraversion, A}, {TraitKind::neuroticism, A}}));
    rules.push_back(make_rule(AspectKind::safety, 2, neu, 0.64,
                              {{TraitKind::conscientiousness, A},
                               {TraitKind::hedonism, A},
                               {TraitKind::openness, A},
                               {TraitKind::self_enhancement, A}}));
    rules.push_back(make_rule(AspectKind::safety, 3, imp, 0.71,
                              {{TraitKind::conscientiousness, A}, {TraitKind::openness, B}}));
    rules.push_back(make_rule(AspectKind::fuel_economy, 1, neu, 0.54,
                              {{TraitKind::openness, B}, {TraitKind::self_enhancement, B}}));
    rules.push_back(make_rule(AspectKind::fuel_economy, 2, nim, 0.54,
                              {{TraitKind::hedonism, A},
                               {TraitKind::openness, A},
                               {TraitKind::self_enhancement, A}}));
    rules.push_back(make_rule(AspectKind::quality, 1, imp, 0.43,
                              {{TraitKind::extraversion, A}, {TraitKind::neuroticism, A}}));
    rules.push_back(make_rule(AspectKind::quality, 2, nim, 0.45,
                              {{TraitKind::hedonism, A},
                               {TraitKind::openness, A},
                               {TraitKind::self_enhancement, A}}));
    rules.push_back(make_rule(AspectKind::quality, 3, nim, 0.45,
                              {{TraitKind::conscientiousness, A}, {TraitKind::openness, B}}));
    rules.push_back(make_rule(AspectKind::style, 1, nim, 0.50,
                              {{TraitKind::hedonism, B}, {TraitKind::openness, B}}));
    rules.push_back(make_rule(AspectKind::style, 2, neu, 0.55,
                              {{TraitKind::conscientiousness, A},
                               {TraitKind::extraversion, A},
                               {TraitKind::neuroticism, A}}));
    rules.push_back(make_rule(AspectKind::style, 3, neu, 0.62,
                              {{TraitKind::conscientiousness, A},
                               {TraitKind::hedonism, A},
                               {TraitKind::openness, A},
                               {TraitKind::self_enhancement, A}}));
    rules.push_back(make_rule(AspectKind::style, 4, nim, 0.74,
                              {{TraitKind::conscientiousness, A}, {TraitKind::openness, B}}));
    rules.push_back(make_rule(AspectKind::performance, 1, neu, 0.73,
                              {{TraitKind::extraversion, A}, {TraitKind::neuroticism, A}}));
    rules.push_back(make_rule(AspectKind::performance, 2, neu, 0.50,
                              {{TraitKind::conscientiousness, A}, {TraitKind::openness, B}}));
    rules.push_back(make_rule(AspectKind::performance, 3, nim, 0.40,
                              {{TraitKind::hedonism, B}, {TraitKind::openness, B}}));
    rules.push_back(make_rule(AspectKind::durability, 1, nim, 0.56,
                              {{TraitKind::extraversion, A},
                               {TraitKind::hedonism, A},
                               {TraitKind::self_enhancement, A}}));
    rules.push_back(make_rule(AspectKind::durability, 2, imp, 0.36,
                              {{TraitKind::conscientiousness, A},
                               {TraitKind::hedonism, A},
                               {TraitKind::openness, A},
                               {TraitKind::self_enhancement, A}}));
    return rules;
}

// Scenario: fuel economy and luxury stand clearly above a four-way value tie
// at 3; the regression puts price (2.2) just ahead of safety (2.5); the
// receiver's high extraversion and neuroticism make the Important-labeled
// Safety-1 rule applicable, which pulls safety past price for the last slot.
inline DemoScenario make_demo_scenario() {
    DemoScenario demo;
    auto set_value = [&](AspectKind a, int v) { demo.car.value[static_cast<std::size_t>(a)] = v; };
    set_value(AspectKind::fuel_economy, 5);
    set_value(AspectKind::luxury, 5);
    set_value(AspectKind::safety, 3);
    set_value(AspectKind::quality, 3);
    set_value(AspectKind::price, 3);
    set_value(AspectKind::durability, 3);
    set_value(AspectKind::style, 1);
    set_value(AspectKind::performance, 1);

    for (std::size_t t = 0; t < kTraitCount; ++t) demo.receiver.normalized[t] = 0.5;
    demo.receiver.normalized[static_cast<std::size_t>(TraitKind::extraversion)] = 0.90;
    demo.receiver.normalized[static_cast<std::size_t>(TraitKind::neuroticism)] = 0.85;
    demo.receiver.is_normalized = true;

    demo.population.size = 836;
    for (std::size_t t = 0; t < kTraitCount; ++t) {
        demo.population.mean[t] = 0.5;
        demo.population.stddev[t] = 0.29;
    }

    auto set_intercept = [&](AspectKind a, double r) {
        RegressionModel m;
        m.aspect = a;
        m.intercept = r;
        m.train_size = 594;
        demo.models.models[static_cast<std::size_t>(a)] = m;
    };
    set_intercept(AspectKind::safety, 2.5);
    set_intercept(AspectKind::fuel_economy, 1.5);
    set_intercept(AspectKind::quality, 4.2);
    set_intercept(AspectKind::style, 6.0);
    set_intercept(AspectKind::price, 2.2);
    set_intercept(AspectKind::luxury, 1.8);
    set_intercept(AspectKind::performance, 5.5);
    set_intercept(AspectKind::durability, 3.8);
    demo.models.fingerprint = "demo-scenario";

    demo.rules = demo_rule_catalog();

    demo.config.n = 3;
    demo.config.delta1 = 1.0;
    demo.config.delta2 = 0.5;
    demo.config.tau = 0.2;
    return demo;
}

}  // namespace emphasis
