#pragma once

// File formats: survey CSV ingestion with validation and per-row exclusion
// reasons, scoring-key CSV, car/profile/ground-truth JSON documents, a rules
// text document, and the workspace bundle that carries population stats,
// fitted models, mined rules, config, and provenance digests between
// commands.

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "emphasis/aspects.hpp"
#include "emphasis/cascade.hpp"
#include "emphasis/common.hpp"
#include "emphasis/evaluation.hpp"
#include "emphasis/patterns.hpp"
#include "emphasis/regression.hpp"
#include "emphasis/traits.hpp"

namespace emphasis {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::string file_digest(const std::string& content) {
    std::uint64_t h = kFnvOffset;
    fnv1a_feed(h, content.data(), content.size());
    return to_hex(h);
}

namespace detail {

inline std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.emplace_back(line.substr(start));
            break;
        }
        fields.emplace_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    if (!fields.empty() && !fields.back().empty() && fields.back().back() == '\r') {
        fields.back().pop_back();
    }
    return fields;
}

inline std::optional<int> parse_int(std::string_view s) {
    int value = 0;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || s.empty()) return std::nullopt;
    return value;
}

inline std::optional<double> parse_double(std::string_view s) {
    double value = 0.0;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || s.empty()) return std::nullopt;
    return value;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Scoring key
// ---------------------------------------------------------------------------

// Built-in key. Personality items cycle through extraversion, agreeableness,
// conscientiousness, neuroticism, openness (items 1-5, 6-10, ...), with the
// standard alternating positive/reversed keying per factor. Value items map
// onto the four higher-order dimensions plus hedonism.
inline ScoringKey default_scoring_key() {
    ScoringKey key;
    // Keying per factor for its ten items, in item order.
    const std::array<std::string_view, kPersonalityTraitCount> keying = {
        "+-+-+-+-+-",  // extraversion
        "-+-+-+-+++",  // agreeableness
        "+-+-+-+-++",  // conscientiousness
        "+-+-++++++",  // neuroticism
        "+-+-+-++++",  // openness
    };
    const std::array<TraitKind, kPersonalityTraitCount> factor_order = {
        TraitKind::extraversion, TraitKind::agreeableness, TraitKind::conscientiousness,
        TraitKind::neuroticism, TraitKind::openness,
    };
    std::array<std::size_t, kPersonalityTraitCount> seen{};
    for (std::size_t i = 0; i < kPersonalityItemCount; ++i) {
        const std::size_t f = i % kPersonalityTraitCount;
        key.personality[i].trait = factor_order[f];
        key.personality[i].keying =
            keying[f][seen[f]] == '+' ? Keying::positive : Keying::reversed;
        ++seen[f];
    }
    const auto otc = TraitKind::openness_to_change;
    const auto se = TraitKind::self_enhancement;
    const auto con = TraitKind::conservation;
    const auto st = TraitKind::self_transcendence;
    const auto hed = TraitKind::hedonism;
    key.values = {otc, se,  st,  se,  con, otc, con, st,  con, hed, otc,
                  st,  se,  con, otc, con, se,  st,  st,  con, hed};
    key.validate();
    return key;
}

inline std::string render_scoring_key_csv(const ScoringKey& key) {
    std::ostringstream out;
    out << "item,trait,direction\n";
    for (std::size_t i = 0; i < kPersonalityItemCount; ++i) {
        out << "p" << (i + 1) << "," << trait_name(key.personality[i].trait) << ","
            << (key.personality[i].keying == Keying::positive ? "positive" : "reversed") << "\n";
    }
    for (std::size_t i = 0; i < kValueItemCount; ++i) {
        out << "v" << (i + 1) << "," << trait_name(key.values[i]) << ",positive\n";
    }
    return out.str();
}

inline void write_scoring_key(const std::string& path, const ScoringKey& key) {
    write_file(path, render_scoring_key_csv(key));
}

inline ScoringKey parse_scoring_key_csv(const std::string& content, const std::string& origin) {
    std::istringstream in(content);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(origin + ":1: empty scoring key");
    {
        const auto header = detail::split_csv_line(line);
        if (header != std::vector<std::string>{"item", "trait", "direction"}) {
            throw std::runtime_error(origin + ":1: scoring key header must be item,trait,direction");
        }
    }
    ScoringKey key;
    std::array<bool, kPersonalityItemCount> seen_p{};
    std::array<bool, kValueItemCount> seen_v{};
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != 3) {
            throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                                     ": expected 3 fields, got " + std::to_string(fields.size()));
        }
        const std::string& item = fields[0];
        const TraitKind trait = trait_from_name(fields[1]);
        if (item.size() >= 2 && item[0] == 'p') {
            const auto idx = detail::parse_int(std::string_view(item).substr(1));
            if (!idx || *idx < 1 || *idx > static_cast<int>(kPersonalityItemCount)) {
                throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                                         ": bad personality item '" + item + "'");
            }
            if (seen_p[*idx - 1]) {
                throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                                         ": duplicate item '" + item + "'");
            }
            seen_p[*idx - 1] = true;
            Keying keying;
            if (fields[2] == "positive") {
                keying = Keying::positive;
            } else if (fields[2] == "reversed") {
                keying = Keying::reversed;
            } else {
                throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                                         ": direction must be positive or reversed");
            }
            key.personality[*idx - 1] = {trait, keying};
        } else if (item.size() >= 2 && item[0] == 'v') {
            const auto idx = detail::parse_int(std::string_view(item).substr(1));
            if (!idx || *idx < 1 || *idx > static_cast<int>(kValueItemCount)) {
                throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                                         ": bad value item '" + item + "'");
            }
            if (seen_v[*idx - 1]) {
                throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                                         ": duplicate item '" + item + "'");
            }
            seen_v[*idx - 1] = true;
            if (fields[2] != "positive") {
                throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                                         ": value items must be keyed positive");
            }
            key.values[*idx - 1] = trait;
        } else {
            throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": unknown item '" +
                                     item + "' (expected p1..p50 or v1..v21)");
        }
    }
    for (std::size_t i = 0; i < kPersonalityItemCount; ++i) {
        if (!seen_p[i]) {
            throw std::runtime_error(origin + ": scoring key is missing item p" +
                                     std::to_string(i + 1));
        }
    }
    for (std::size_t i = 0; i < kValueItemCount; ++i) {
        if (!seen_v[i]) {
            throw std::runtime_error(origin + ": scoring key is missing item v" +
                                     std::to_string(i + 1));
        }
    }
    key.validate();
    return key;
}

inline ScoringKey load_scoring_key(const std::string& path) {
    return parse_scoring_key_csv(read_file(path), path);
}

// ---------------------------------------------------------------------------
// Survey dataset CSV
// ---------------------------------------------------------------------------

struct Dataset {
    std::vector<std::string> ids;
    std::vector<SurveyResponse> responses;
    std::vector<TraitProfile> profiles;  // normalized
    std::vector<AspectRanking> rankings;
    bool has_rankings = false;
    PopulationStats population;
    std::vector<std::string> exclusions;  // one human-readable reason per dropped row
    std::string fingerprint;              // digest of normalized traits + ranks
    std::string file_digest;              // digest of the raw bytes (provenance)
};

// Parses, validates, scores, and normalizes a survey CSV. Required columns:
// id, p1..p50, v1..v21; optional paired validation columns val_<stem>_a /
// val_<stem>_b; optional rank_<aspect> columns (all eight or none). Rows with
// out-of-range answers, failed validation pairs, or malformed rank
// permutations are excluded with a logged reason; structural problems
// (missing columns, non-numeric fields) fail the whole load with a line
// number.
inline Dataset parse_dataset_csv(const std::string& content, const std::string& origin,
                                 const ScoringKey& key, int max_gap = 2) {
    key.validate();
    std::istringstream in(content);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(origin + ":1: empty dataset");
    const auto header = detail::split_csv_line(line);
    std::map<std::string, std::size_t> col_of;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (!col_of.emplace(header[c], c).second) {
            throw std::runtime_error(origin + ":1: duplicate column '" + header[c] + "'");
        }
    }
    auto require = [&](const std::string& name) {
        const auto it = col_of.find(name);
        if (it == col_of.end()) {
            throw std::runtime_error(origin + ":1: missing required column '" + name + "'");
        }
        return it->second;
    };
    const std::size_t id_col = require("id");
    std::array<std::size_t, kPersonalityItemCount> p_col{};
    for (std::size_t i = 0; i < kPersonalityItemCount; ++i) {
        p_col[i] = require("p" + std::to_string(i + 1));
    }
    std::array<std::size_t, kValueItemCount> v_col{};
    for (std::size_t i = 0; i < kValueItemCount; ++i) {
        v_col[i] = require("v" + std::to_string(i + 1));
    }

    // Validation pairs from val_<stem>_a / val_<stem>_b columns.
    std::vector<ValidationPair> pairs;
    std::vector<std::pair<std::string, std::size_t>> validation_cols;
    for (const auto& [name, c] : col_of) {
        if (name.rfind("val_", 0) != 0) continue;
        validation_cols.emplace_back(name, c);
        if (name.size() > 2 && name.compare(name.size() - 2, 2, "_a") == 0) {
            const std::string partner = name.substr(0, name.size() - 2) + "_b";
            if (col_of.find(partner) == col_of.end()) {
                throw std::runtime_error(origin + ":1: validation column '" + name +
                                         "' has no partner '" + partner + "'");
            }
            pairs.push_back({name, partner});
        } else if (name.size() > 2 && name.compare(name.size() - 2, 2, "_b") == 0) {
            const std::string partner = name.substr(0, name.size() - 2) + "_a";
            if (col_of.find(partner) == col_of.end()) {
                throw std::runtime_error(origin + ":1: validation column '" + name +
                                         "' has no partner '" + partner + "'");
            }
        } else {
            throw std::runtime_error(origin + ":1: validation column '" + name +
                                     "' must end in _a or _b");
        }
    }

    bool has_rankings = false;
    std::array<std::size_t, kAspectCount> rank_col{};
    {
        std::size_t present = 0;
        for (auto a : all_aspects()) {
            if (col_of.count("rank_" + std::string(aspect_name(a)))) ++present;
        }
        if (present > 0 && present < kAspectCount) {
            throw std::runtime_error(origin +
                                     ":1: rank columns must cover all eight aspects or none");
        }
        has_rankings = present == kAspectCount;
        if (has_rankings) {
            for (auto a : all_aspects()) {
                rank_col[static_cast<std::size_t>(a)] =
                    col_of.at("rank_" + std::string(aspect_name(a)));
            }
        }
    }

    Dataset out;
    out.has_rankings = has_rankings;
    out.file_digest = file_digest(content);
    std::vector<TraitProfile> raw_profiles;

    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != header.size()) {
            throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": expected " +
                                     std::to_string(header.size()) + " fields, got " +
                                     std::to_string(fields.size()));
        }
        auto int_at = [&](std::size_t col) {
            const auto v = detail::parse_int(fields[col]);
            if (!v) {
                throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": column '" +
                                         header[col] + "': '" + fields[col] +
                                         "' is not an integer");
            }
            return *v;
        };

        SurveyResponse resp;
        resp.id = fields[id_col];
        const std::string row_tag = "row " + std::to_string(line_no) + " (id " + resp.id + "): ";

        std::string reason;
        resp.personality_answers.resize(kPersonalityItemCount);
        for (std::size_t i = 0; i < kPersonalityItemCount && reason.empty(); ++i) {
            const int a = int_at(p_col[i]);
            if (a < 1 || a > 5) {
                reason = row_tag + "answer p" + std::to_string(i + 1) + "=" + std::to_string(a) +
                         " out of range 1..5";
            }
            resp.personality_answers[i] = a;
        }
        resp.value_answers.resize(kValueItemCount);
        for (std::size_t i = 0; i < kValueItemCount && reason.empty(); ++i) {
            const int a = int_at(v_col[i]);
            if (a < 1 || a > 6) {
                reason = row_tag + "answer v" + std::to_string(i + 1) + "=" + std::to_string(a) +
                         " out of range 1..6";
            }
            resp.value_answers[i] = a;
        }
        for (const auto& [name, c] : validation_cols) {
            resp.validation_answers.emplace_back(name, int_at(c));
        }

        AspectRanking ranking;
        if (reason.empty() && has_rankings) {
            for (auto a : all_aspects()) {
                ranking.rank_of[static_cast<std::size_t>(a)] =
                    int_at(rank_col[static_cast<std::size_t>(a)]);
            }
            if (!ranking.is_permutation()) {
                reason = row_tag + "duplicate rank (ranks must be a permutation of 1..8)";
            }
        }
        if (reason.empty()) {
            const SurveyValidation check = validate_survey(resp, pairs, max_gap);
            if (!check.valid) reason = row_tag + check.reason;
        }
        if (!reason.empty()) {
            out.exclusions.push_back(reason);
            continue;
        }

        raw_profiles.push_back(score_survey(resp, key));
        out.ids.push_back(resp.id);
        out.responses.push_back(std::move(resp));
        if (has_rankings) out.rankings.push_back(ranking);
    }

    if (raw_profiles.size() < 2) {
        throw std::runtime_error(origin + ": fewer than two valid respondents after exclusions");
    }
    auto [profiles, population] = normalize_population(raw_profiles);
    out.profiles = std::move(profiles);
    out.population = population;
    out.fingerprint = population_fingerprint(out.profiles, out.rankings);
    return out;
}

inline Dataset load_dataset(const std::string& data_path, const ScoringKey& key, int max_gap = 2) {
    return parse_dataset_csv(read_file(data_path), data_path, key, max_gap);
}

inline std::string render_survey_csv(std::span<const SurveyResponse> responses,
                                     std::span<const AspectRanking> rankings) {
    if (responses.empty()) throw std::invalid_argument("render_survey_csv: no responses");
    if (!rankings.empty() && rankings.size() != responses.size()) {
        throw std::invalid_argument("render_survey_csv: ranking count mismatch");
    }
    std::ostringstream out;
    out << "id";
    for (std::size_t i = 1; i <= kPersonalityItemCount; ++i) out << ",p" << i;
    for (std::size_t i = 1; i <= kValueItemCount; ++i) out << ",v" << i;
    for (const auto& [name, answer] : responses[0].validation_answers) out << "," << name;
    if (!rankings.empty()) {
        for (auto a : all_aspects()) out << ",rank_" << aspect_name(a);
    }
    out << "\n";
    for (std::size_t r = 0; r < responses.size(); ++r) {
        const auto& resp = responses[r];
        out << resp.id;
        for (int a : resp.personality_answers) out << "," << a;
        for (int a : resp.value_answers) out << "," << a;
        for (const auto& [name, answer] : resp.validation_answers) out << "," << answer;
        if (!rankings.empty()) {
            for (int rank : rankings[r].rank_of) out << "," << rank;
        }
        out << "\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// JSON documents: car, profile, ground truth
// ---------------------------------------------------------------------------

inline nlohmann::json car_to_json(const CarSpec& car) {
    nlohmann::json j = nlohmann::json::object();
    for (auto a : all_aspects()) {
        j[std::string(aspect_name(a))] = car.value[static_cast<std::size_t>(a)];
    }
    return j;
}

inline CarSpec car_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::runtime_error("car document must be a JSON object");
    CarSpec car;
    for (const auto& [name, value] : j.items()) {
        const AspectKind a = aspect_from_name(name);  // rejects unknown keys
        if (!value.is_number_integer()) {
            throw std::runtime_error("car aspect '" + name + "' must be an integer");
        }
        car.value[static_cast<std::size_t>(a)] = value.get<int>();
    }
    if (j.size() != kAspectCount) {
        throw std::runtime_error("car document must list all eight aspects");
    }
    car.validate();
    return car;
}

inline nlohmann::json profile_to_json(const TraitProfile& profile) {
    nlohmann::json j = nlohmann::json::object();
    for (std::size_t t = 0; t < kTraitCount; ++t) {
        j[std::string(kTraitNames[t])] = profile.normalized[t];
    }
    return j;
}

// Profiles exchanged as JSON hold normalized scores in [0, 1].
inline TraitProfile profile_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::runtime_error("profile document must be a JSON object");
    TraitProfile profile;
    for (const auto& [name, value] : j.items()) {
        const TraitKind t = trait_from_name(name);
        if (!value.is_number()) {
            throw std::runtime_error("trait '" + name + "' must be a number");
        }
        const double v = value.get<double>();
        if (v < 0.0 || v > 1.0) {
            throw std::runtime_error("trait '" + name + "' must be a normalized score in [0, 1]");
        }
        profile.normalized[static_cast<std::size_t>(t)] = v;
    }
    if (j.size() != kTraitCount) {
        throw std::runtime_error("profile document must list all ten traits");
    }
    profile.is_normalized = true;
    return profile;
}

inline CarSpec load_car_json(const std::string& path) {
    return car_from_json(nlohmann::json::parse(read_file(path)));
}

inline TraitProfile load_profile_json(const std::string& path) {
    return profile_from_json(nlohmann::json::parse(read_file(path)));
}

inline nlohmann::json truth_to_json(std::span<const GroundTruthInstance> instances) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& inst : instances) {
        nlohmann::json j;
        j["car"] = car_to_json(inst.car);
        j["receiver"] = profile_to_json(inst.receiver);
        nlohmann::json top1 = nlohmann::json::array();
        for (auto a : inst.top1) top1.push_back(std::string(aspect_name(a)));
        nlohmann::json top3 = nlohmann::json::array();
        for (auto a : inst.top3) top3.push_back(std::string(aspect_name(a)));
        j["top1"] = top1;
        j["top3"] = top3;
        arr.push_back(std::move(j));
    }
    return arr;
}

inline std::vector<GroundTruthInstance> truth_from_json(const nlohmann::json& arr) {
    if (!arr.is_array()) throw std::runtime_error("ground truth document must be a JSON array");
    std::vector<GroundTruthInstance> out;
    out.reserve(arr.size());
    for (const auto& j : arr) {
        GroundTruthInstance inst;
        inst.car = car_from_json(j.at("car"));
        inst.receiver = profile_from_json(j.at("receiver"));
        for (const auto& name : j.at("top1")) {
            inst.top1.push_back(aspect_from_name(name.get<std::string>()));
        }
        for (const auto& name : j.at("top3")) {
            inst.top3.push_back(aspect_from_name(name.get<std::string>()));
        }
        if (inst.top1.size() != 1 || inst.top3.size() != 3) {
            throw std::runtime_error("ground truth instance must carry 1 top-1 and 3 top-3 aspects");
        }
        out.push_back(std::move(inst));
    }
    return out;
}

inline void save_truth_json(const std::string& path,
                            std::span<const GroundTruthInstance> instances) {
    write_file(path, truth_to_json(instances).dump(2) + "\n");
}

inline std::vector<GroundTruthInstance> load_truth_json(const std::string& path) {
    return truth_from_json(nlohmann::json::parse(read_file(path)));
}

// ---------------------------------------------------------------------------
// Rules text document
// ---------------------------------------------------------------------------

inline std::string render_rules_text(std::span<const InteractionRule> rules,
                                     int significant_digits = 17) {
    std::ostringstream out;
    out << "# interaction rules: id aspect label accuracy conditions\n";
    for (const auto& rule : rules) {
        out << "rule " << rule.id << " aspect=" << aspect_name(rule.aspect)
            << " label=" << preference_class_name(rule.label)
            << " accuracy=" << format_number(rule.accuracy, significant_digits) << " conditions=";
        for (std::size_t c = 0; c < rule.conditions.size(); ++c) {
            if (c > 0) out << ",";
            out << trait_name(rule.conditions[c].first) << ":"
                << condition_sign_char(rule.conditions[c].second);
        }
        out << "\n";
    }
    return out.str();
}

inline std::vector<InteractionRule> parse_rules_text(const std::string& content) {
    std::vector<InteractionRule> rules;
    std::istringstream in(content);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::istringstream tokens(line);
        std::string word;
        tokens >> word;
        if (word != "rule") {
            throw std::runtime_error("rules document line " + std::to_string(line_no) +
                                     ": expected 'rule'");
        }
        InteractionRule rule;
        if (!(tokens >> rule.id)) {
            throw std::runtime_error("rules document line " + std::to_string(line_no) +
                                     ": missing rule id");
        }
        bool has_aspect = false, has_label = false, has_accuracy = false, has_conditions = false;
        while (tokens >> word) {
            const std::size_t eq = word.find('=');
            if (eq == std::string::npos) {
                throw std::runtime_error("rules document line " + std::to_string(line_no) +
                                         ": expected key=value, got '" + word + "'");
            }
            const std::string field = word.substr(0, eq);
            const std::string value = word.substr(eq + 1);
            if (field == "aspect") {
                rule.aspect = aspect_from_name(value);
                has_aspect = true;
            } else if (field == "label") {
                rule.label = preference_class_from_name(value);
                has_label = true;
            } else if (field == "accuracy") {
                const auto v = detail::parse_double(value);
                if (!v) {
                    throw std::runtime_error("rules document line " + std::to_string(line_no) +
                                             ": bad accuracy '" + value + "'");
                }
                rule.accuracy = *v;
                has_accuracy = true;
            } else if (field == "conditions") {
                std::size_t start = 0;
                while (start < value.size()) {
                    std::size_t comma = value.find(',', start);
                    if (comma == std::string::npos) comma = value.size();
                    const std::string item = value.substr(start, comma - start);
                    const std::size_t colon = item.find(':');
                    if (colon == std::string::npos || colon + 2 != item.size()) {
                        throw std::runtime_error("rules document line " + std::to_string(line_no) +
                                                 ": bad condition '" + item + "'");
                    }
                    rule.conditions.emplace_back(trait_from_name(item.substr(0, colon)),
                                                 condition_sign_from_char(item[colon + 1]));
                    start = comma + 1;
                }
                has_conditions = true;
            } else {
                throw std::runtime_error("rules document line " + std::to_string(line_no) +
                                         ": unknown field '" + field + "'");
            }
        }
        if (!has_aspect || !has_label || !has_accuracy || !has_conditions ||
            rule.conditions.empty()) {
            throw std::runtime_error("rules document line " + std::to_string(line_no) +
                                     ": incomplete rule");
        }
        rules.push_back(std::move(rule));
    }
    return rules;
}

// ---------------------------------------------------------------------------
// Workspace bundle
// ---------------------------------------------------------------------------

struct WorkspaceBundle {
    int format_version = kBundleFormatVersion;
    std::string tool_version = std::string(kToolVersion);
    std::string data_digest;  // raw bytes of the survey CSV the bundle came from
    std::string key_digest;   // raw bytes of the scoring key
    std::uint64_t seed = 0;
    PopulationStats population;
    bool has_models = false;
    ModelSet models;
    std::vector<InteractionRule> rules;
    std::string rules_fingerprint;  // dataset fingerprint the rules were mined from
    CascadeConfig config;
};

namespace detail {

inline nlohmann::json trait_map_to_json(const std::array<double, kTraitCount>& values) {
    nlohmann::json j = nlohmann::json::object();
    for (std::size_t t = 0; t < kTraitCount; ++t) j[std::string(kTraitNames[t])] = values[t];
    return j;
}

inline std::array<double, kTraitCount> trait_map_from_json(const nlohmann::json& j) {
    std::array<double, kTraitCount> values{};
    if (!j.is_object() || j.size() != kTraitCount) {
        throw std::runtime_error("bundle: trait map must list all ten traits");
    }
    for (const auto& [name, value] : j.items()) {
        values[static_cast<std::size_t>(trait_from_name(name))] = value.get<double>();
    }
    return values;
}

}  // namespace detail

inline nlohmann::json bundle_to_json(const WorkspaceBundle& bundle) {
    nlohmann::json j;
    j["format_version"] = bundle.format_version;
    j["tool_version"] = bundle.tool_version;
    j["provenance"] = {{"data_digest", bundle.data_digest},
                       {"key_digest", bundle.key_digest},
                       {"seed", bundle.seed}};
    j["population"] = {{"size", bundle.population.size},
                       {"mean", detail::trait_map_to_json(bundle.population.mean)},
                       {"stddev", detail::trait_map_to_json(bundle.population.stddev)}};
    if (bundle.has_models) {
        nlohmann::json per_aspect = nlohmann::json::object();
        for (auto a : all_aspects()) {
            const auto& m = bundle.models.for_aspect(a);
            per_aspect[std::string(aspect_name(a))] = {
                {"intercept", m.intercept},
                {"intercept_se", m.intercept_se},
                {"intercept_p", m.intercept_p},
                {"slope", detail::trait_map_to_json(m.slope)},
                {"slope_se", detail::trait_map_to_json(m.slope_se)},
                {"slope_p", detail::trait_map_to_json(m.slope_p)},
                {"n", m.train_size}};
        }
        j["models"] = {{"fingerprint", bundle.models.fingerprint}, {"per_aspect", per_aspect}};
    } else {
        j["models"] = nullptr;
    }
    nlohmann::json items = nlohmann::json::array();
    for (const auto& rule : bundle.rules) {
        nlohmann::json conditions = nlohmann::json::object();
        for (const auto& [trait, sign] : rule.conditions) {
            conditions[std::string(trait_name(trait))] = std::string(1, condition_sign_char(sign));
        }
        items.push_back({{"id", rule.id},
                         {"aspect", std::string(aspect_name(rule.aspect))},
                         {"label", std::string(preference_class_name(rule.label))},
                         {"accuracy", rule.accuracy},
                         {"conditions", conditions}});
    }
    j["rules"] = {{"fingerprint", bundle.rules_fingerprint}, {"items", items}};
    j["config"] = {{"n", bundle.config.n},
                   {"delta1", bundle.config.delta1},
                   {"delta2", bundle.config.delta2},
                   {"tau", bundle.config.tau}};
    return j;
}

inline WorkspaceBundle bundle_from_json(const nlohmann::json& j) {
    WorkspaceBundle bundle;
    bundle.format_version = j.at("format_version").get<int>();
    if (bundle.format_version > kBundleFormatVersion) {
        throw std::runtime_error("bundle format version " + std::to_string(bundle.format_version) +
                                 " is newer than the supported version " +
                                 std::to_string(kBundleFormatVersion));
    }
    bundle.tool_version = j.at("tool_version").get<std::string>();
    const auto& prov = j.at("provenance");
    bundle.data_digest = prov.at("data_digest").get<std::string>();
    bundle.key_digest = prov.at("key_digest").get<std::string>();
    bundle.seed = prov.at("seed").get<std::uint64_t>();
    const auto& pop = j.at("population");
    bundle.population.size = pop.at("size").get<std::size_t>();
    bundle.population.mean = detail::trait_map_from_json(pop.at("mean"));
    bundle.population.stddev = detail::trait_map_from_json(pop.at("stddev"));
    const auto& models = j.at("models");
    if (!models.is_null()) {
        bundle.has_models = true;
        bundle.models.fingerprint = models.at("fingerprint").get<std::string>();
        const auto& per_aspect = models.at("per_aspect");
        if (per_aspect.size() != kAspectCount) {
            throw std::runtime_error("bundle: models must cover all eight aspects");
        }
        for (const auto& [name, mj] : per_aspect.items()) {
            const AspectKind a = aspect_from_name(name);
            RegressionModel m;
            m.aspect = a;
            m.intercept = mj.at("intercept").get<double>();
            m.intercept_se = mj.at("intercept_se").get<double>();
            m.intercept_p = mj.at("intercept_p").get<double>();
            m.slope = detail::trait_map_from_json(mj.at("slope"));
            m.slope_se = detail::trait_map_from_json(mj.at("slope_se"));
            m.slope_p = detail::trait_map_from_json(mj.at("slope_p"));
            m.train_size = mj.at("n").get<std::size_t>();
            bundle.models.models[static_cast<std::size_t>(a)] = std::move(m);
        }
    }
    const auto& rules = j.at("rules");
    bundle.rules_fingerprint = rules.at("fingerprint").get<std::string>();
    for (const auto& rj : rules.at("items")) {
        InteractionRule rule;
        rule.id = rj.at("id").get<std::string>();
        rule.aspect = aspect_from_name(rj.at("aspect").get<std::string>());
        rule.label = preference_class_from_name(rj.at("label").get<std::string>());
        rule.accuracy = rj.at("accuracy").get<double>();
        for (const auto& [name, sign] : rj.at("conditions").items()) {
            const std::string s = sign.get<std::string>();
            if (s.size() != 1) throw std::runtime_error("bundle: bad condition sign '" + s + "'");
            rule.conditions.emplace_back(trait_from_name(name), condition_sign_from_char(s[0]));
        }
        std::sort(rule.conditions.begin(), rule.conditions.end(),
                  [](const auto& lhs, const auto& rhs) { return lhs.first < rhs.first; });
        if (rule.conditions.empty()) {
            throw std::runtime_error("bundle: rule '" + rule.id + "' has no conditions");
        }
        bundle.rules.push_back(std::move(rule));
    }
    const auto& config = j.at("config");
    bundle.config.n = config.at("n").get<int>();
    bundle.config.delta1 = config.at("delta1").get<double>();
    bundle.config.delta2 = config.at("delta2").get<double>();
    bundle.config.tau = config.at("tau").get<double>();
    bundle.config.validate();
    return bundle;
}

inline void save_bundle(const WorkspaceBundle& bundle, const std::string& path) {
    write_file(path, bundle_to_json(bundle).dump(2) + "\n");
}

inline WorkspaceBundle load_bundle(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("bundle " + path + ": " + e.what());
    }
    return bundle_from_json(j);
}

// Cross-component consistency: rules mined from different data than the
// models were fitted on are suspicious. Callers decide whether warnings are
// fatal (--strict).
inline std::vector<std::string> bundle_consistency_warnings(const WorkspaceBundle& bundle) {
    std::vector<std::string> warnings;
    if (bundle.has_models && !bundle.rules.empty() && !bundle.rules_fingerprint.empty() &&
        bundle.rules_fingerprint != bundle.models.fingerprint) {
        warnings.push_back("rules fingerprint " + bundle.rules_fingerprint +
                           " does not match the models fingerprint " + bundle.models.fingerprint +
                           " (rules were mined from different data)");
    }
    return warnings;
}

}  // namespace emphasis
