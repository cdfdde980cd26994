// Command-line front door for the emphasis-selection library: survey scoring
// and normalization, model fitting, pattern mining, cascade selection,
// benchmark evaluation, synthetic data generation, and the worked example.
//
// Conventions: logs on stderr, results on stdout (or --out); exit 0 on
// success, 1 on domain errors, 2 on usage errors; all randomness comes from
// explicit --seed flags (default 0), so identical invocations produce
// byte-identical outputs.

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "emphasis/cascade.hpp"
#include "emphasis/common.hpp"
#include "emphasis/demo.hpp"
#include "emphasis/evaluation.hpp"
#include "emphasis/io.hpp"
#include "emphasis/patterns.hpp"
#include "emphasis/regression.hpp"
#include "emphasis/stats.hpp"
#include "emphasis/traits.hpp"

namespace {

using namespace emphasis;

struct OutputOptions {
    std::string out_path;
    bool full_precision = false;

    int digits() const { return full_precision ? 17 : 6; }

    void emit(const std::string& text) const {
        if (out_path.empty()) {
            std::cout << text;
        } else {
            write_file(out_path, text);
        }
    }
};

void add_output_flags(CLI::App* cmd, OutputOptions& out) {
    cmd->add_option("--out", out.out_path, "write the result to this file instead of stdout");
    cmd->add_flag("--full-precision", out.full_precision,
                  "print numbers with 17 significant digits instead of 6");
}

std::vector<double> parse_number_list(const std::string& text, std::size_t count,
                                      const std::string& flag) {
    std::vector<double> values;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        if (comma == std::string::npos) comma = text.size();
        const auto v = emphasis::detail::parse_double(text.substr(start, comma - start));
        if (!v) throw CLI::ValidationError(flag, "expected a comma-separated list of numbers");
        values.push_back(*v);
        start = comma + 1;
    }
    if (values.size() != count) {
        throw CLI::ValidationError(flag, "expected exactly " + std::to_string(count) + " values");
    }
    return values;
}

CascadeConfig parse_config_flag(const std::string& text) {
    const auto v = parse_number_list(text, 4, "--config");
    CascadeConfig config;
    config.n = static_cast<int>(v[0]);
    if (static_cast<double>(config.n) != v[0]) {
        throw CLI::ValidationError("--config", "n must be an integer");
    }
    config.delta1 = v[1];
    config.delta2 = v[2];
    config.tau = v[3];
    return config;
}

PatternCriteria parse_criteria_flag(const std::string& text) {
    const auto v = parse_number_list(text, 3, "--criteria");
    return {v[0], v[1], v[2]};
}

std::pair<int, int> parse_k_range_flag(const std::string& text) {
    const auto v = parse_number_list(text, 2, "--k-range");
    if (v[0] != static_cast<int>(v[0]) || v[1] != static_cast<int>(v[1])) {
        throw CLI::ValidationError("--k-range", "bounds must be integers");
    }
    return {static_cast<int>(v[0]), static_cast<int>(v[1])};
}

struct KeySource {
    std::string path;  // empty = built-in key

    ScoringKey load() const { return path.empty() ? default_scoring_key() : load_scoring_key(path); }

    std::string digest() const {
        return file_digest(path.empty() ? render_scoring_key_csv(default_scoring_key())
                                        : read_file(path));
    }
};

void log_exclusions(const Dataset& data) {
    for (const auto& reason : data.exclusions) std::cerr << "note: excluded " << reason << "\n";
    std::cerr << "loaded " << data.profiles.size() << " valid respondents";
    if (!data.exclusions.empty()) std::cerr << " (" << data.exclusions.size() << " excluded)";
    std::cerr << "\n";
}

std::string render_score_csv(const Dataset& data, bool normalized, int digits) {
    std::ostringstream out;
    out << "id";
    for (auto name : kTraitNames) out << "," << name;
    out << "\n";
    for (std::size_t i = 0; i < data.profiles.size(); ++i) {
        out << data.ids[i];
        for (std::size_t t = 0; t < kTraitCount; ++t) {
            const double v =
                normalized ? data.profiles[i].normalized[t] : data.profiles[i].raw[t];
            out << "," << format_number(v, digits);
        }
        out << "\n";
    }
    return out.str();
}

// Shared by cluster/rules: classes and points for one aspect.
struct AspectDataset {
    std::vector<std::vector<double>> points;
    std::vector<PreferenceClass> classes;
    CannotLinkSet links;
};

AspectDataset aspect_dataset(const Dataset& data, AspectKind aspect) {
    if (!data.has_rankings) {
        throw std::runtime_error("dataset has no rank_<aspect> columns; cannot derive preference classes");
    }
    AspectDataset out;
    out.points.reserve(data.profiles.size());
    for (const auto& p : data.profiles) {
        out.points.emplace_back(p.normalized.begin(), p.normalized.end());
    }
    std::vector<std::array<PreferenceClass, kAspectCount>> all_classes;
    all_classes.reserve(data.rankings.size());
    for (const auto& r : data.rankings) all_classes.push_back(ranks_to_classes(r));
    out.classes.reserve(all_classes.size());
    for (const auto& c : all_classes) out.classes.push_back(c[static_cast<std::size_t>(aspect)]);
    out.links = build_cannot_links(all_classes, aspect);
    return out;
}

int run_app(int argc, char** argv) {
    CLI::App app{"personalized emphasis selection toolkit"};
    app.require_subcommand(1);

    // --- score / normalize ---------------------------------------------
    struct {
        std::string data;
        KeySource key;
        int max_gap = 2;
        OutputOptions out;
    } score_opts, normalize_opts;
    for (auto [name, desc, opts] :
         {std::tuple{"score", "score raw trait values from a survey CSV", &score_opts},
          std::tuple{"normalize", "rank-percentile normalized trait scores", &normalize_opts}}) {
        auto* cmd = app.add_subcommand(name, desc);
        cmd->add_option("--data", opts->data, "survey CSV path")->required();
        cmd->add_option("--key", opts->key.path, "scoring key CSV (default: built-in key)");
        cmd->add_option("--max-gap", opts->max_gap, "largest allowed validation-pair gap");
        add_output_flags(cmd, opts->out);
        const bool normalized = std::string(name) == "normalize";
        cmd->callback([opts, normalized]() {
            const Dataset data = load_dataset(opts->data, opts->key.load(), opts->max_gap);
            log_exclusions(data);
            opts->out.emit(render_score_csv(data, normalized, opts->out.digits()));
        });
    }

    // --- fit -------------------------------------------------------------
    struct {
        std::string data;
        KeySource key;
        int max_gap = 2;
        std::string bundle;
        std::string config_text;
        std::uint64_t seed = 0;
        std::string format = "text";
        OutputOptions out;
    } fit_opts;
    {
        auto* cmd = app.add_subcommand("fit", "fit per-aspect rank regression models");
        cmd->add_option("--data", fit_opts.data, "survey CSV path (must include rank columns)")
            ->required();
        cmd->add_option("--key", fit_opts.key.path, "scoring key CSV (default: built-in key)");
        cmd->add_option("--max-gap", fit_opts.max_gap, "largest allowed validation-pair gap");
        cmd->add_option("--bundle", fit_opts.bundle, "write the fitted workspace bundle here")
            ->required();
        cmd->add_option("--config", fit_opts.config_text,
                        "selection config as n,delta1,delta2,tau (default 3,0,0.5,0.2)");
        cmd->add_option("--seed", fit_opts.seed, "seed recorded in the bundle");
        cmd->add_option("--format", fit_opts.format, "coefficient table format: text or csv")
            ->check(CLI::IsMember({"text", "csv"}));
        add_output_flags(cmd, fit_opts.out);
        cmd->callback([&]() {
            const CascadeConfig config = fit_opts.config_text.empty()
                                             ? CascadeConfig{}
                                             : parse_config_flag(fit_opts.config_text);
            config.validate();
            const ScoringKey key = fit_opts.key.load();
            const Dataset data = load_dataset(fit_opts.data, key, fit_opts.max_gap);
            log_exclusions(data);
            if (!data.has_rankings) {
                throw std::runtime_error("dataset has no rank_<aspect> columns; cannot fit models");
            }
            const ModelSet models = fit_aspect_models(data.profiles, data.rankings);
            WorkspaceBundle bundle;
            bundle.data_digest = data.file_digest;
            bundle.key_digest = fit_opts.key.digest();
            bundle.seed = fit_opts.seed;
            bundle.population = data.population;
            bundle.has_models = true;
            bundle.models = models;
            bundle.config = config;
            save_bundle(bundle, fit_opts.bundle);
            std::cerr << "bundle written: " << fit_opts.bundle << "\n";
            const TableFormat format =
                fit_opts.format == "csv" ? TableFormat::csv : TableFormat::text;
            fit_opts.out.emit(render_coefficient_table(models, format, fit_opts.out.digits()));
        });
    }

    // --- cluster -----------------------------------------------------------
    struct {
        std::string data;
        KeySource key;
        int max_gap = 2;
        std::string aspect;
        int k = 3;
        double w = 1.0;
        int max_iters = 100;
        std::string mode = "soft";
        std::uint64_t seed = 0;
        OutputOptions out;
    } cluster_opts;
    {
        auto* cmd = app.add_subcommand("cluster", "constrained clustering diagnostic for one aspect");
        cmd->add_option("--data", cluster_opts.data, "survey CSV path (with rank columns)")
            ->required();
        cmd->add_option("--key", cluster_opts.key.path, "scoring key CSV (default: built-in key)");
        cmd->add_option("--max-gap", cluster_opts.max_gap, "largest allowed validation-pair gap");
        cmd->add_option("--aspect", cluster_opts.aspect, "aspect name, e.g. safety")->required();
        cmd->add_option("--k", cluster_opts.k, "number of clusters")->required();
        cmd->add_option("--w", cluster_opts.w, "cannot-link penalty weight");
        cmd->add_option("--max-iters", cluster_opts.max_iters, "iteration cap");
        cmd->add_option("--mode", cluster_opts.mode, "constraint mode: soft or hard")
            ->check(CLI::IsMember({"soft", "hard"}));
        cmd->add_option("--seed", cluster_opts.seed, "seeding RNG");
        add_output_flags(cmd, cluster_opts.out);
        cmd->callback([&]() {
            const AspectKind aspect = aspect_from_name(cluster_opts.aspect);
            const Dataset data =
                load_dataset(cluster_opts.data, cluster_opts.key.load(), cluster_opts.max_gap);
            log_exclusions(data);
            const AspectDataset ds = aspect_dataset(data, aspect);
            ClusterParams params;
            params.k = cluster_opts.k;
            params.penalty_weight = cluster_opts.w;
            params.max_iterations = cluster_opts.max_iters;
            params.seed = cluster_opts.seed;
            params.mode = cluster_opts.mode == "hard" ? ConstraintMode::hard
                                                      : ConstraintMode::soft_penalty;
            const ClusterModel model = mpck_means(ds.points, ds.links, params);
            std::ostringstream text;
            const int digits = cluster_opts.out.digits();
            text << "aspect: " << aspect_name(aspect) << "\n";
            text << "points: " << ds.points.size() << "\n";
            text << "cannot-links: " << ds.links.pairs.size() << "\n";
            text << "k: " << params.k << "\n";
            text << "iterations: " << model.iterations << "\n";
            text << "objective: " << format_number(model.objective, digits) << "\n";
            text << "violated: " << model.violated_constraints << "\n";
            std::vector<std::size_t> sizes(params.k, 0);
            std::array<std::vector<std::size_t>, 3> by_class;
            for (auto& v : by_class) v.assign(params.k, 0);
            for (std::size_t i = 0; i < ds.points.size(); ++i) {
                ++sizes[model.assignments[i]];
                ++by_class[static_cast<std::size_t>(ds.classes[i])][model.assignments[i]];
            }
            for (int h = 0; h < params.k; ++h) {
                text << "cluster " << h << ": size " << sizes[h] << " (Important "
                     << by_class[0][h] << ", Neutral " << by_class[1][h] << ", NotImportant "
                     << by_class[2][h] << ")\n";
            }
            cluster_opts.out.emit(text.str());
        });
    }

    // --- rules ---------------------------------------------------------------
    struct {
        std::string data;
        KeySource key;
        int max_gap = 2;
        std::string bundle;
        std::string bundle_out;
        std::string k_range_text = "3,20";
        int seeds_per_k = 10;
        std::string criteria_text;
        double tau = 0.2;
        double w = 1.0;
        int max_iters = 100;
        std::string mode = "soft";
        std::uint64_t seed = 0;
        std::vector<std::string> aspects;
        bool strict = false;
        OutputOptions out;
    } rules_opts;
    {
        auto* cmd = app.add_subcommand("rules", "mine interaction rules into a bundle");
        cmd->add_option("--data", rules_opts.data, "survey CSV path (with rank columns)")
            ->required();
        cmd->add_option("--key", rules_opts.key.path, "scoring key CSV (default: built-in key)");
        cmd->add_option("--max-gap", rules_opts.max_gap, "largest allowed validation-pair gap");
        cmd->add_option("--bundle", rules_opts.bundle, "bundle with fitted models")->required();
        cmd->add_option("--bundle-out", rules_opts.bundle_out,
                        "where to write the updated bundle (default: --bundle in place)");
        cmd->add_option("--k-range", rules_opts.k_range_text, "cluster count range, e.g. 3,20");
        cmd->add_option("--seeds-per-k", rules_opts.seeds_per_k, "restarts per k");
        cmd->add_option("--criteria", rules_opts.criteria_text,
                        "pattern criteria as cv_max,p_max,diff_min (default 0.12,0.001,0.2)");
        cmd->add_option("--tau", rules_opts.tau, "rule-matching margin");
        cmd->add_option("--w", rules_opts.w, "cannot-link penalty weight");
        cmd->add_option("--max-iters", rules_opts.max_iters, "iteration cap");
        cmd->add_option("--mode", rules_opts.mode, "constraint mode: soft or hard")
            ->check(CLI::IsMember({"soft", "hard"}));
        cmd->add_option("--seed", rules_opts.seed, "clustering seed");
        cmd->add_option("--aspect", rules_opts.aspects, "mine only these aspects (default: all)");
        cmd->add_flag("--strict", rules_opts.strict, "treat provenance warnings as errors");
        add_output_flags(cmd, rules_opts.out);
        cmd->callback([&]() {
            const auto [k_lo, k_hi] = parse_k_range_flag(rules_opts.k_range_text);
            const PatternCriteria criteria = rules_opts.criteria_text.empty()
                                                 ? PatternCriteria{}
                                                 : parse_criteria_flag(rules_opts.criteria_text);
            WorkspaceBundle bundle = load_bundle(rules_opts.bundle);
            const Dataset data =
                load_dataset(rules_opts.data, rules_opts.key.load(), rules_opts.max_gap);
            log_exclusions(data);
            if (bundle.data_digest != data.file_digest) {
                const std::string message =
                    "data file digest " + data.file_digest +
                    " differs from the bundle's provenance digest " + bundle.data_digest;
                if (rules_opts.strict) throw std::runtime_error(message);
                std::cerr << "warning: " << message << "\n";
            }
            std::vector<AspectKind> aspects;
            if (rules_opts.aspects.empty()) {
                for (auto a : all_aspects()) aspects.push_back(a);
            } else {
                for (const auto& name : rules_opts.aspects) aspects.push_back(aspect_from_name(name));
            }
            ClusterParams base;
            base.penalty_weight = rules_opts.w;
            base.max_iterations = rules_opts.max_iters;
            base.seed = rules_opts.seed;
            base.mode = rules_opts.mode == "hard" ? ConstraintMode::hard
                                                  : ConstraintMode::soft_penalty;
            std::vector<InteractionRule> mined;
            for (AspectKind aspect : aspects) {
                const AspectDataset ds = aspect_dataset(data, aspect);
                const SweepResult sweep =
                    sweep_k(ds.points, ds.links, ds.classes, data.population, criteria, aspect,
                            rules_opts.tau, k_lo, k_hi, rules_opts.seeds_per_k, base);
                std::cerr << "aspect " << aspect_name(aspect) << ": chose k = " << sweep.k
                          << ", " << sweep.rules.size() << " rule(s)\n";
                mined.insert(mined.end(), sweep.rules.begin(), sweep.rules.end());
            }
            bundle.rules = mined;
            bundle.rules_fingerprint = data.fingerprint;
            const std::string out_path =
                rules_opts.bundle_out.empty() ? rules_opts.bundle : rules_opts.bundle_out;
            save_bundle(bundle, out_path);
            std::cerr << "bundle written: " << out_path << "\n";
            rules_opts.out.emit(render_rules_text(mined, rules_opts.out.digits()));
        });
    }

    // --- select ---------------------------------------------------------------
    struct {
        std::string bundle;
        std::string car;
        std::string profile;
        std::string config_text;
        bool strict = false;
        OutputOptions out;
    } select_opts;
    {
        auto* cmd = app.add_subcommand("select", "run the cascade for one car and receiver");
        cmd->add_option("--bundle", select_opts.bundle, "bundle with models (and rules)")
            ->required();
        cmd->add_option("--car", select_opts.car, "car JSON document")->required();
        cmd->add_option("--profile", select_opts.profile, "receiver profile JSON (normalized)")
            ->required();
        cmd->add_option("--config", select_opts.config_text,
                        "override the bundle config: n,delta1,delta2,tau");
        cmd->add_flag("--strict", select_opts.strict, "treat bundle warnings as errors");
        add_output_flags(cmd, select_opts.out);
        cmd->callback([&]() {
            const WorkspaceBundle bundle = load_bundle(select_opts.bundle);
            for (const auto& warning : bundle_consistency_warnings(bundle)) {
                if (select_opts.strict) throw std::runtime_error(warning);
                std::cerr << "warning: " << warning << "\n";
            }
            if (!bundle.has_models) {
                throw std::runtime_error("bundle has no fitted models; run fit first");
            }
            const CascadeConfig config = select_opts.config_text.empty()
                                             ? bundle.config
                                             : parse_config_flag(select_opts.config_text);
            const CarSpec car = load_car_json(select_opts.car);
            const TraitProfile profile = load_profile_json(select_opts.profile);
            const SelectionResult result = cascade_select(car, profile, bundle.models,
                                                          bundle.rules, bundle.population, config);
            select_opts.out.emit(render_trace(car, result.trace, select_opts.out.digits()));
        });
    }

    // --- eval ---------------------------------------------------------------
    struct {
        std::string bundle;
        std::string truth;
        std::string config_text;
        std::uint64_t seed = 0;
        int draws = 100;
        std::string per_instance;
        bool strict = false;
        OutputOptions out;
    } eval_opts;
    {
        auto* cmd = app.add_subcommand("eval", "benchmark the cascade against ground truth");
        cmd->add_option("--bundle", eval_opts.bundle, "bundle with models (and rules)")->required();
        cmd->add_option("--truth", eval_opts.truth, "ground-truth JSON document")->required();
        cmd->add_option("--config", eval_opts.config_text,
                        "override the bundle config: n,delta1,delta2,tau");
        cmd->add_option("--seed", eval_opts.seed, "baseline tie-breaking seed");
        cmd->add_option("--draws", eval_opts.draws, "baseline draws for the averaged column");
        cmd->add_option("--per-instance", eval_opts.per_instance,
                        "also write per-instance agreements as CSV to this path");
        cmd->add_flag("--strict", eval_opts.strict, "treat bundle warnings as errors");
        add_output_flags(cmd, eval_opts.out);
        cmd->callback([&]() {
            const WorkspaceBundle bundle = load_bundle(eval_opts.bundle);
            for (const auto& warning : bundle_consistency_warnings(bundle)) {
                if (eval_opts.strict) throw std::runtime_error(warning);
                std::cerr << "warning: " << warning << "\n";
            }
            if (!bundle.has_models) {
                throw std::runtime_error("bundle has no fitted models; run fit first");
            }
            const CascadeConfig config = eval_opts.config_text.empty()
                                             ? bundle.config
                                             : parse_config_flag(eval_opts.config_text);
            const auto instances = load_truth_json(eval_opts.truth);
            const BenchmarkReport report =
                run_benchmark(instances, bundle.models, bundle.rules, bundle.population, config,
                              eval_opts.seed, eval_opts.draws);
            if (!eval_opts.per_instance.empty()) {
                write_file(eval_opts.per_instance,
                           benchmark_report_csv(report, eval_opts.out.digits()));
            }
            eval_opts.out.emit(render_benchmark_report(report, eval_opts.out.digits()));
        });
    }

    // --- synth ---------------------------------------------------------------
    struct {
        std::string out_dir;
        std::size_t n = 594;
        std::size_t receivers = 38;
        std::size_t cars = 10;
        double noise = 0.3;
        std::uint64_t seed = 0;
    } synth_opts;
    {
        auto* cmd = app.add_subcommand("synth", "generate a synthetic survey + ground truth");
        cmd->add_option("--out-dir", synth_opts.out_dir, "directory for survey.csv, key.csv, truth.json")
            ->required();
        cmd->add_option("--n", synth_opts.n, "respondent count");
        cmd->add_option("--receivers", synth_opts.receivers, "receiver count for ground truth");
        cmd->add_option("--cars", synth_opts.cars, "car count for ground truth");
        cmd->add_option("--noise", synth_opts.noise, "latent noise level");
        cmd->add_option("--seed", synth_opts.seed, "generation seed");
        cmd->callback([&]() {
            SyntheticSpec spec;
            spec.n_respondents = synth_opts.n;
            spec.n_receivers = synth_opts.receivers;
            spec.n_cars = synth_opts.cars;
            spec.noise = synth_opts.noise;
            spec.seed = synth_opts.seed;
            const ScoringKey key = default_scoring_key();
            const SyntheticDataset data = generate_synthetic_population(spec, key);
            std::filesystem::create_directories(synth_opts.out_dir);
            const std::string dir = synth_opts.out_dir;
            const std::string survey = render_survey_csv(data.responses, data.rankings);
            write_file(dir + "/survey.csv", survey);
            const std::string key_csv = render_scoring_key_csv(key);
            write_file(dir + "/key.csv", key_csv);
            const std::string truth = truth_to_json(data.instances).dump(2) + "\n";
            write_file(dir + "/truth.json", truth);
            std::cout << "wrote " << dir << "/survey.csv (digest " << file_digest(survey) << ", "
                      << data.responses.size() << " rows)\n";
            std::cout << "wrote " << dir << "/key.csv (digest " << file_digest(key_csv) << ")\n";
            std::cout << "wrote " << dir << "/truth.json (digest " << file_digest(truth) << ", "
                      << data.instances.size() << " instances)\n";
        });
    }

    // --- demo-figure ------------------------------------------------------------
    struct {
        OutputOptions out;
    } demo_opts;
    {
        auto* cmd = app.add_subcommand("demo-figure", "run the built-in worked example");
        add_output_flags(cmd, demo_opts.out);
        cmd->callback([&]() {
            const DemoScenario demo = make_demo_scenario();
            const SelectionResult result = cascade_select(
                demo.car, demo.receiver, demo.models, demo.rules, demo.population, demo.config);
            std::ostringstream text;
            const int digits = demo_opts.out.digits();
            text << "worked example: n = " << demo.config.n << ", delta1 = "
                 << format_number(demo.config.delta1, digits) << ", delta2 = "
                 << format_number(demo.config.delta2, digits) << ", tau = "
                 << format_number(demo.config.tau, digits) << "\n";
            text << "receiver (normalized):";
            for (std::size_t t = 0; t < kTraitCount; ++t) {
                text << " " << kTraitNames[t] << "=" << format_number(demo.receiver.normalized[t], digits);
            }
            text << "\n";
            const auto applicable =
                applicable_rules(demo.rules, demo.receiver, demo.population, demo.config.tau);
            text << "applicable rules:";
            for (const auto& rule : applicable) text << " " << rule.id;
            text << "\n\n";
            text << render_trace(demo.car, result.trace, digits);
            demo_opts.out.emit(text.str());
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        const bool informational = dynamic_cast<const CLI::CallForHelp*>(&e) != nullptr ||
                                   dynamic_cast<const CLI::CallForAllHelp*>(&e) != nullptr ||
                                   dynamic_cast<const CLI::CallForVersion*>(&e) != nullptr;
        return informational ? code : 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_app(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
