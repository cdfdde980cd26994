#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "emphasis/evaluation.hpp"
#include "emphasis/io.hpp"

using Catch::Matchers::ContainsSubstring;
using emphasis::AspectKind;
using emphasis::ConditionSign;
using emphasis::InteractionRule;
using emphasis::PreferenceClass;
using emphasis::TraitKind;

namespace {

// One survey row for hand-built CSV fixtures. Defaults are in range and pass
// every check.
struct RowSpec {
    std::string id = "r1";
    std::array<int, emphasis::kPersonalityItemCount> p;
    std::array<int, emphasis::kValueItemCount> v;
    std::optional<std::pair<int, int>> val;  // val_1_a / val_1_b
    std::optional<std::array<int, emphasis::kAspectCount>> ranks;

    RowSpec() {
        p.fill(3);
        v.fill(4);
    }
};

std::string make_csv(const std::vector<RowSpec>& rows, bool with_val, bool with_ranks) {
    std::ostringstream out;
    out << "id";
    for (std::size_t i = 1; i <= emphasis::kPersonalityItemCount; ++i) out << ",p" << i;
    for (std::size_t i = 1; i <= emphasis::kValueItemCount; ++i) out << ",v" << i;
    if (with_val) out << ",val_1_a,val_1_b";
    if (with_ranks) {
        for (auto a : emphasis::all_aspects()) out << ",rank_" << emphasis::aspect_name(a);
    }
    out << "\n";
    for (const auto& row : rows) {
        out << row.id;
        for (int a : row.p) out << "," << a;
        for (int a : row.v) out << "," << a;
        if (with_val) {
            const auto pair = row.val.value_or(std::make_pair(3, 3));
            out << "," << pair.first << "," << pair.second;
        }
        if (with_ranks) {
            std::array<int, emphasis::kAspectCount> ranks = {1, 2, 3, 4, 5, 6, 7, 8};
            if (row.ranks) ranks = *row.ranks;
            for (int r : ranks) out << "," << r;
        }
        out << "\n";
    }
    return out.str();
}

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("emphasis_io_test_" + name);
}

}  // namespace

TEST_CASE("default scoring key scores uniform surveys to flat profiles", "[io]") {
    const auto key = emphasis::default_scoring_key();
    REQUIRE_NOTHROW(key.validate());

    emphasis::SurveyResponse resp;
    resp.id = "u";
    resp.personality_answers.assign(emphasis::kPersonalityItemCount, 3);
    resp.value_answers.assign(emphasis::kValueItemCount, 4);
    const auto profile = emphasis::score_survey(resp, key);
    for (std::size_t t = 0; t < emphasis::kPersonalityTraitCount; ++t) {
        REQUIRE(profile.raw[t] == 30.0);  // reversed items flip 3 to 3
    }
    for (std::size_t t = emphasis::kPersonalityTraitCount; t < emphasis::kTraitCount; ++t) {
        REQUIRE(profile.raw[t] == 4.0);
    }
}

TEST_CASE("scoring key CSV round-trips", "[io]") {
    const auto key = emphasis::default_scoring_key();
    const auto csv = emphasis::render_scoring_key_csv(key);
    REQUIRE_THAT(csv, ContainsSubstring("item,trait,direction\n"));

    const auto parsed = emphasis::parse_scoring_key_csv(csv, "key.csv");
    for (std::size_t i = 0; i < emphasis::kPersonalityItemCount; ++i) {
        REQUIRE(parsed.personality[i].trait == key.personality[i].trait);
        REQUIRE(parsed.personality[i].keying == key.personality[i].keying);
    }
    for (std::size_t i = 0; i < emphasis::kValueItemCount; ++i) {
        REQUIRE(parsed.values[i] == key.values[i]);
    }
}

TEST_CASE("scoring key CSV parse errors carry line numbers", "[io]") {
    auto parse = [](const std::string& content) {
        return emphasis::parse_scoring_key_csv(content, "key.csv");
    };
    REQUIRE_THROWS_WITH(parse(""), ContainsSubstring("key.csv:1: empty"));
    REQUIRE_THROWS_WITH(parse("a,b,c\n"), ContainsSubstring("header must be item,trait,direction"));
    REQUIRE_THROWS_WITH(parse("item,trait,direction\np1,extraversion\n"),
                        ContainsSubstring("key.csv:2: expected 3 fields, got 2"));
    REQUIRE_THROWS_WITH(parse("item,trait,direction\np0,extraversion,positive\n"),
                        ContainsSubstring("bad personality item 'p0'"));
    REQUIRE_THROWS_WITH(parse("item,trait,direction\nq1,extraversion,positive\n"),
                        ContainsSubstring("unknown item 'q1'"));
    REQUIRE_THROWS_WITH(parse("item,trait,direction\np1,extraversion,sideways\n"),
                        ContainsSubstring("direction must be positive or reversed"));
    REQUIRE_THROWS_WITH(
        parse("item,trait,direction\nv1,conservation,reversed\n"),
        ContainsSubstring("value items must be keyed positive"));

    const auto full = emphasis::render_scoring_key_csv(emphasis::default_scoring_key());
    REQUIRE_THROWS_WITH(parse(full + "p1,extraversion,positive\n"),
                        ContainsSubstring("duplicate item 'p1'"));
    const auto truncated = full.substr(0, full.rfind("v21"));
    REQUIRE_THROWS_WITH(parse(truncated), ContainsSubstring("missing item v21"));
}

TEST_CASE("survey CSV render and parse round-trip the synthetic dataset", "[io]") {
    emphasis::SyntheticSpec spec;
    spec.n_respondents = 25;
    spec.n_receivers = 3;
    spec.n_cars = 2;
    spec.seed = 13;
    const auto key = emphasis::default_scoring_key();
    const auto data = emphasis::generate_synthetic_population(spec, key);

    const auto csv = emphasis::render_survey_csv(data.responses, data.rankings);
    const auto dataset = emphasis::parse_dataset_csv(csv, "synthetic.csv", key);

    REQUIRE(dataset.exclusions.empty());
    REQUIRE(dataset.has_rankings);
    REQUIRE(dataset.responses.size() == 25);
    REQUIRE(dataset.ids[7] == "r8");
    REQUIRE(dataset.fingerprint ==
            emphasis::population_fingerprint(data.profiles, data.rankings));
    REQUIRE(dataset.file_digest == emphasis::file_digest(csv));
    for (std::size_t r = 0; r < dataset.profiles.size(); ++r) {
        REQUIRE(dataset.profiles[r].normalized == data.profiles[r].normalized);
        REQUIRE(dataset.rankings[r].rank_of == data.rankings[r].rank_of);
    }

    // Without rankings the dataset still loads.
    const auto plain = emphasis::parse_dataset_csv(
        emphasis::render_survey_csv(data.responses, {}), "plain.csv", key);
    REQUIRE_FALSE(plain.has_rankings);
    REQUIRE(plain.rankings.empty());

    REQUIRE_THROWS_AS(emphasis::render_survey_csv({}, {}), std::invalid_argument);
    REQUIRE_THROWS_AS(emphasis::render_survey_csv(data.responses,
                                                  std::span<const emphasis::AspectRanking>(
                                                      data.rankings.data(), 3)),
                      std::invalid_argument);
}

TEST_CASE("survey CSV structural errors fail the whole load", "[io]") {
    const auto key = emphasis::default_scoring_key();
    auto parse = [&](const std::string& content) {
        return emphasis::parse_dataset_csv(content, "data.csv", key);
    };

    REQUIRE_THROWS_WITH(parse(""), ContainsSubstring("data.csv:1: empty dataset"));

    const auto good = make_csv({RowSpec{}, RowSpec{}}, false, false);
    const auto no_v21 = good.substr(0, good.find(",v21")) + good.substr(good.find("\n"));
    REQUIRE_THROWS_WITH(parse(no_v21), ContainsSubstring("missing required column 'v21'"));

    auto dup = good;
    dup.insert(dup.find("\n"), ",id");
    REQUIRE_THROWS_WITH(parse(dup), ContainsSubstring("duplicate column 'id'"));

    auto short_row = good;
    short_row.resize(short_row.rfind(",4") );
    short_row += "\n";
    REQUIRE_THROWS_WITH(parse(short_row), ContainsSubstring("data.csv:3: expected 72 fields"));

    auto not_a_number = good;
    not_a_number.replace(not_a_number.find("r1,3"), 4, "r1,x");
    REQUIRE_THROWS_WITH(parse(not_a_number),
                        ContainsSubstring("column 'p1': 'x' is not an integer"));

    // Validation columns must pair up and rank columns are all-or-none; both
    // checks happen while reading the header.
    auto orphan = good;
    orphan.insert(orphan.find("\n"), ",val_1_a");
    REQUIRE_THROWS_WITH(parse(orphan),
                        ContainsSubstring("validation column 'val_1_a' has no partner 'val_1_b'"));

    auto half_ranked = good;
    half_ranked.insert(half_ranked.find("\n"), ",rank_safety");
    REQUIRE_THROWS_WITH(parse(half_ranked),
                        ContainsSubstring("rank columns must cover all eight aspects or none"));
}

TEST_CASE("survey CSV excludes bad rows with reasons", "[io]") {
    const auto key = emphasis::default_scoring_key();

    RowSpec bad_personality;
    bad_personality.id = "bad-p";
    bad_personality.p[2] = 7;
    RowSpec bad_value;
    bad_value.id = "bad-v";
    bad_value.v[1] = 0;
    RowSpec careless;
    careless.id = "careless";
    careless.val = std::make_pair(1, 5);
    RowSpec double_rank;
    double_rank.id = "double-rank";
    double_rank.ranks = std::array<int, emphasis::kAspectCount>{1, 1, 3, 4, 5, 6, 7, 8};
    RowSpec fine_a;
    fine_a.id = "ok-1";
    fine_a.p.fill(2);
    RowSpec fine_b;
    fine_b.id = "ok-2";
    fine_b.v.fill(5);

    const auto csv = make_csv({bad_personality, bad_value, careless, double_rank, fine_a, fine_b},
                              true, true);
    const auto dataset = emphasis::parse_dataset_csv(csv, "data.csv", key);

    REQUIRE(dataset.ids == std::vector<std::string>{"ok-1", "ok-2"});
    REQUIRE(dataset.exclusions ==
            std::vector<std::string>{
                "row 2 (id bad-p): answer p3=7 out of range 1..5",
                "row 3 (id bad-v): answer v2=0 out of range 1..6",
                "row 4 (id careless): validation pair (val_1_a, val_1_b): |1 - 5| = 4 exceeds "
                "max gap 2",
                "row 5 (id double-rank): duplicate rank (ranks must be a permutation of 1..8)",
            });

    // A wider gap tolerance keeps the careless row.
    const auto lax = emphasis::parse_dataset_csv(csv, "data.csv", key, 4);
    REQUIRE(lax.ids.size() == 3);
    REQUIRE(lax.exclusions.size() == 3);

    // Dropping below two valid rows fails the load.
    const auto tiny = make_csv({bad_personality, fine_a}, true, true);
    REQUIRE_THROWS_WITH(emphasis::parse_dataset_csv(tiny, "data.csv", key),
                        ContainsSubstring("fewer than two valid respondents"));
}

TEST_CASE("car JSON round-trips and rejects malformed documents", "[io]") {
    emphasis::CarSpec car;
    car.value = {5, 3, 4, 2, 1, 5, 1, 2};
    const auto j = emphasis::car_to_json(car);
    REQUIRE(j.at("safety").get<int>() == 5);
    REQUIRE(emphasis::car_from_json(j).value == car.value);

    auto unknown = j;
    unknown["mileage"] = 3;
    REQUIRE_THROWS(emphasis::car_from_json(unknown));

    auto non_integer = j;
    non_integer["price"] = 2.5;
    REQUIRE_THROWS_WITH(emphasis::car_from_json(non_integer),
                        ContainsSubstring("'price' must be an integer"));

    auto missing = j;
    missing.erase("luxury");
    REQUIRE_THROWS_WITH(emphasis::car_from_json(missing),
                        ContainsSubstring("must list all eight aspects"));

    auto out_of_range = j;
    out_of_range["style"] = 6;
    REQUIRE_THROWS(emphasis::car_from_json(out_of_range));

    REQUIRE_THROWS_WITH(emphasis::car_from_json(nlohmann::json::array()),
                        ContainsSubstring("must be a JSON object"));
}

TEST_CASE("profile JSON round-trips and validates the range", "[io]") {
    emphasis::TraitProfile profile;
    for (std::size_t t = 0; t < emphasis::kTraitCount; ++t) {
        profile.normalized[t] = static_cast<double>(t) / 9.0;
    }
    profile.is_normalized = true;
    const auto j = emphasis::profile_to_json(profile);
    const auto back = emphasis::profile_from_json(j);
    REQUIRE(back.is_normalized);
    REQUIRE(back.normalized == profile.normalized);

    auto high = j;
    high["openness"] = 1.5;
    REQUIRE_THROWS_WITH(emphasis::profile_from_json(high),
                        ContainsSubstring("normalized score in [0, 1]"));
    auto text = j;
    text["hedonism"] = "lots";
    REQUIRE_THROWS_WITH(emphasis::profile_from_json(text),
                        ContainsSubstring("'hedonism' must be a number"));
    auto missing = j;
    missing.erase("conservation");
    REQUIRE_THROWS_WITH(emphasis::profile_from_json(missing),
                        ContainsSubstring("must list all ten traits"));
    auto unknown = j;
    unknown["bravery"] = 0.5;
    REQUIRE_THROWS(emphasis::profile_from_json(unknown));
}

TEST_CASE("ground truth JSON round-trips", "[io]") {
    emphasis::SyntheticSpec spec;
    spec.n_respondents = 15;
    spec.n_receivers = 2;
    spec.n_cars = 2;
    spec.seed = 3;
    const auto data =
        emphasis::generate_synthetic_population(spec, emphasis::default_scoring_key());

    const auto j = emphasis::truth_to_json(data.instances);
    const auto back = emphasis::truth_from_json(j);
    REQUIRE(back.size() == data.instances.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        REQUIRE(back[i].car.value == data.instances[i].car.value);
        REQUIRE(back[i].receiver.normalized == data.instances[i].receiver.normalized);
        REQUIRE(back[i].top1 == data.instances[i].top1);
        REQUIRE(back[i].top3 == data.instances[i].top3);
    }

    auto malformed = j;
    malformed[0]["top3"].erase(2);
    REQUIRE_THROWS_WITH(emphasis::truth_from_json(malformed),
                        ContainsSubstring("must carry 1 top-1 and 3 top-3 aspects"));
    REQUIRE_THROWS_WITH(emphasis::truth_from_json(nlohmann::json::object()),
                        ContainsSubstring("must be a JSON array"));
}

TEST_CASE("rules text round-trips losslessly", "[io]") {
    InteractionRule first;
    first.id = "Safety-1";
    first.aspect = AspectKind::safety;
    first.label = PreferenceClass::important;
    first.accuracy = 2.0 / 3.0;
    first.conditions = {{TraitKind::extraversion, ConditionSign::above},
                        {TraitKind::openness, ConditionSign::below}};
    InteractionRule second;
    second.id = "Luxury-2";
    second.aspect = AspectKind::luxury;
    second.label = PreferenceClass::not_important;
    second.accuracy = 0.1 + 0.2;  // deliberately not representable as a short decimal
    second.conditions = {{TraitKind::hedonism, ConditionSign::below}};

    const std::vector<InteractionRule> rules{first, second};
    const auto text = emphasis::render_rules_text(rules);
    REQUIRE_THAT(text,
                 ContainsSubstring("# interaction rules: id aspect label accuracy conditions"));
    REQUIRE_THAT(text, ContainsSubstring("rule Safety-1 aspect=safety label=Important"));
    REQUIRE_THAT(text, ContainsSubstring("conditions=extraversion:+,openness:-"));

    const auto parsed = emphasis::parse_rules_text(text);
    REQUIRE(parsed.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        REQUIRE(parsed[i].id == rules[i].id);
        REQUIRE(parsed[i].aspect == rules[i].aspect);
        REQUIRE(parsed[i].label == rules[i].label);
        REQUIRE(parsed[i].accuracy == rules[i].accuracy);  // bit-exact at 17 digits
        REQUIRE(parsed[i].conditions == rules[i].conditions);
    }

    // Comments, blank lines, and CRLF endings are tolerated.
    const auto relaxed = emphasis::parse_rules_text("# comment\r\n\r\n" + text);
    REQUIRE(relaxed.size() == 2);
}

TEST_CASE("rules text parse errors carry line numbers", "[io]") {
    auto parse = [](const std::string& s) { return emphasis::parse_rules_text(s); };
    REQUIRE_THROWS_WITH(parse("junk\n"), ContainsSubstring("line 1: expected 'rule'"));
    REQUIRE_THROWS_WITH(parse("rule\n"), ContainsSubstring("line 1: missing rule id"));
    REQUIRE_THROWS_WITH(parse("rule R1 aspect safety\n"),
                        ContainsSubstring("expected key=value, got 'aspect'"));
    REQUIRE_THROWS_WITH(
        parse("rule R1 aspect=safety label=Important accuracy=fast conditions=openness:+\n"),
        ContainsSubstring("bad accuracy 'fast'"));
    REQUIRE_THROWS_WITH(
        parse("rule R1 aspect=safety label=Important accuracy=0.5 conditions=openness\n"),
        ContainsSubstring("bad condition 'openness'"));
    REQUIRE_THROWS_WITH(
        parse("rule R1 aspect=safety label=Important accuracy=0.5 wing=left\n"),
        ContainsSubstring("unknown field 'wing'"));
    REQUIRE_THROWS_WITH(parse("rule R1 aspect=safety label=Important accuracy=0.5\n"),
                        ContainsSubstring("line 1: incomplete rule"));
    REQUIRE_THROWS(parse("rule R1 aspect=engine label=Important accuracy=0.5 "
                         "conditions=openness:+\n"));
}

TEST_CASE("workspace bundle round-trips through JSON", "[io]") {
    emphasis::WorkspaceBundle bundle;
    bundle.data_digest = "abc123";
    bundle.key_digest = "def456";
    bundle.seed = 99;
    bundle.population.size = 40;
    for (std::size_t t = 0; t < emphasis::kTraitCount; ++t) {
        bundle.population.mean[t] = 0.5 + 0.01 * static_cast<double>(t);
        bundle.population.stddev[t] = 0.29 - 0.003 * static_cast<double>(t);
    }
    bundle.has_models = true;
    bundle.models.fingerprint = "fp-models";
    for (auto a : emphasis::all_aspects()) {
        auto& m = bundle.models.models[static_cast<std::size_t>(a)];
        const double base = static_cast<double>(a);
        m.aspect = a;
        m.intercept = 4.5 + base / 7.0;
        m.intercept_se = 0.25 + base * 0.01;
        m.intercept_p = 0.001 * (base + 1.0);
        for (std::size_t t = 0; t < emphasis::kTraitCount; ++t) {
            m.slope[t] = (base - 3.5) * 0.1 + static_cast<double>(t) / 13.0;
            m.slope_se[t] = 0.05 + static_cast<double>(t) * 0.001;
            m.slope_p[t] = 0.5 / (static_cast<double>(t) + 1.0);
        }
        m.train_size = 40;
    }
    InteractionRule rule;
    rule.id = "Quality-1";
    rule.aspect = AspectKind::quality;
    rule.label = PreferenceClass::neutral;
    rule.accuracy = 0.875;
    rule.conditions = {{TraitKind::conscientiousness, ConditionSign::above}};
    bundle.rules = {rule};
    bundle.rules_fingerprint = "fp-models";
    bundle.config.n = 3;
    bundle.config.delta1 = 0.5;
    bundle.config.delta2 = 0.25;
    bundle.config.tau = 0.2;

    const auto path = temp_path("bundle.json");
    emphasis::save_bundle(bundle, path.string());
    const auto loaded = emphasis::load_bundle(path.string());
    std::filesystem::remove(path);

    REQUIRE(loaded.format_version == bundle.format_version);
    REQUIRE(loaded.tool_version == bundle.tool_version);
    REQUIRE(loaded.data_digest == "abc123");
    REQUIRE(loaded.key_digest == "def456");
    REQUIRE(loaded.seed == 99);
    REQUIRE(loaded.population.size == 40);
    REQUIRE(loaded.population.mean == bundle.population.mean);
    REQUIRE(loaded.population.stddev == bundle.population.stddev);
    REQUIRE(loaded.has_models);
    REQUIRE(loaded.models.fingerprint == "fp-models");
    for (auto a : emphasis::all_aspects()) {
        const auto& lhs = loaded.models.for_aspect(a);
        const auto& rhs = bundle.models.for_aspect(a);
        REQUIRE(lhs.intercept == rhs.intercept);
        REQUIRE(lhs.intercept_se == rhs.intercept_se);
        REQUIRE(lhs.intercept_p == rhs.intercept_p);
        REQUIRE(lhs.slope == rhs.slope);
        REQUIRE(lhs.slope_se == rhs.slope_se);
        REQUIRE(lhs.slope_p == rhs.slope_p);
        REQUIRE(lhs.train_size == rhs.train_size);
    }
    REQUIRE(loaded.rules.size() == 1);
    REQUIRE(loaded.rules[0].id == "Quality-1");
    REQUIRE(loaded.rules[0].label == PreferenceClass::neutral);
    REQUIRE(loaded.rules[0].accuracy == 0.875);
    REQUIRE(loaded.rules[0].conditions == rule.conditions);
    REQUIRE(loaded.rules_fingerprint == "fp-models");
    REQUIRE(loaded.config.n == 3);
    REQUIRE(loaded.config.delta1 == 0.5);
    REQUIRE(loaded.config.delta2 == 0.25);
    REQUIRE(loaded.config.tau == 0.2);
    REQUIRE(emphasis::bundle_consistency_warnings(loaded).empty());
}

TEST_CASE("bundle edge cases", "[io]") {
    emphasis::WorkspaceBundle bundle;
    bundle.population.size = 10;
    bundle.population.mean.fill(0.5);
    bundle.population.stddev.fill(0.2);

    // No models: serialized as null, restored as absent.
    auto j = emphasis::bundle_to_json(bundle);
    REQUIRE(j.at("models").is_null());
    REQUIRE_FALSE(emphasis::bundle_from_json(j).has_models);

    auto newer = j;
    newer["format_version"] = bundle.format_version + 1;
    REQUIRE_THROWS_WITH(emphasis::bundle_from_json(newer),
                        ContainsSubstring("newer than the supported version"));

    auto bad_config = j;
    bad_config["config"]["n"] = 0;
    REQUIRE_THROWS(emphasis::bundle_from_json(bad_config));

    // Conditions come back sorted canonically even when the JSON object's
    // alphabetical key order disagrees (conservation sorts before
    // extraversion alphabetically but after it canonically).
    InteractionRule rule;
    rule.id = "Style-1";
    rule.aspect = AspectKind::style;
    rule.label = PreferenceClass::important;
    rule.accuracy = 0.75;
    rule.conditions = {{TraitKind::conservation, ConditionSign::above},
                       {TraitKind::extraversion, ConditionSign::below}};
    bundle.rules = {rule};
    const auto loaded = emphasis::bundle_from_json(emphasis::bundle_to_json(bundle));
    REQUIRE(loaded.rules[0].conditions ==
            std::vector<std::pair<TraitKind, ConditionSign>>{
                {TraitKind::extraversion, ConditionSign::below},
                {TraitKind::conservation, ConditionSign::above}});

    auto bad_sign = emphasis::bundle_to_json(bundle);
    bad_sign["rules"]["items"][0]["conditions"]["conservation"] = "++";
    REQUIRE_THROWS_WITH(emphasis::bundle_from_json(bad_sign),
                        ContainsSubstring("bad condition sign '++'"));

    InteractionRule bare;
    bare.id = "Bare-1";
    bare.aspect = AspectKind::price;
    bare.label = PreferenceClass::important;
    bare.accuracy = 0.8;
    bundle.rules = {bare};
    REQUIRE_THROWS_WITH(emphasis::bundle_from_json(emphasis::bundle_to_json(bundle)),
                        ContainsSubstring("rule 'Bare-1' has no conditions"));

    const auto path = temp_path("garbage.json");
    emphasis::write_file(path.string(), "not json");
    REQUIRE_THROWS_WITH(emphasis::load_bundle(path.string()), ContainsSubstring("bundle"));
    std::filesystem::remove(path);
}

TEST_CASE("fingerprint mismatches raise a consistency warning", "[io]") {
    emphasis::WorkspaceBundle bundle;
    bundle.has_models = true;
    bundle.models.fingerprint = "fp-a";
    InteractionRule rule;
    rule.id = "Price-1";
    rule.aspect = AspectKind::price;
    rule.label = PreferenceClass::important;
    rule.accuracy = 0.9;
    rule.conditions = {{TraitKind::hedonism, ConditionSign::above}};
    bundle.rules = {rule};
    bundle.rules_fingerprint = "fp-b";

    const auto warnings = emphasis::bundle_consistency_warnings(bundle);
    REQUIRE(warnings.size() == 1);
    REQUIRE_THAT(warnings[0], ContainsSubstring("fp-b does not match the models fingerprint fp-a"));

    bundle.rules_fingerprint = "fp-a";
    REQUIRE(emphasis::bundle_consistency_warnings(bundle).empty());
    bundle.rules_fingerprint = "";
    REQUIRE(emphasis::bundle_consistency_warnings(bundle).empty());
    bundle.rules_fingerprint = "fp-b";
    bundle.has_models = false;
    REQUIRE(emphasis::bundle_consistency_warnings(bundle).empty());
}

TEST_CASE("file helpers", "[io]") {
    const auto path = temp_path("roundtrip.txt");
    emphasis::write_file(path.string(), "line one\nline two\n");
    REQUIRE(emphasis::read_file(path.string()) == "line one\nline two\n");
    std::filesystem::remove(path);

    REQUIRE_THROWS_WITH(emphasis::read_file((path.parent_path() / "no_such_file_xyz").string()),
                        ContainsSubstring("cannot open file"));

    const auto digest = emphasis::file_digest("content");
    REQUIRE(digest == emphasis::file_digest("content"));
    REQUIRE(digest != emphasis::file_digest("Content"));
    REQUIRE(digest.size() == 16);
}
