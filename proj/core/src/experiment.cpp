#include "fairsense/experiment.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "fairsense/digest.hpp"
#include "fairsense/errors.hpp"
#include "fairsense/rng.hpp"

namespace fairsense {

using nlohmann::json;

namespace {

// Seed streams so the per-trial draws (data, splits, model inits, shuffles)
// are independent but fully determined by the trial seed.
enum SeedStream : std::uint64_t {
    kFairData = 10,
    kBiasedData = 11,
    kBiasInjection = 12,
    kFairSplit = 13,
    kBiasedSplit = 14,
    kInitClassifier = 20,
    kInitReference = 21,
    kInitProtected = 22,
    kShuffleClassifier = 30,
    kShuffleReference = 31,
    kShuffleProtected = 32,
};

json recipe_to_json(const ExperimentRecipe& r) {
    json j;
    j["name"] = r.name;
    j["kind"] = r.kind == ExperimentKind::Synthetic ? "synthetic" : "real";
    j["trials"] = r.trials;
    j["seed"] = r.seed;
    if (r.kind == ExperimentKind::Synthetic) {
        json s = json::parse(r.synthetic.base.to_json_string());
        s["test_fraction"] = r.synthetic.test_fraction;
        s.erase("seed"); // trial seeds drive generation
        j["synthetic"] = s;
    } else {
        j["real"] = {{"data_csv", r.real.data_csv.string()},
                     {"schema", r.real.schema_path.string()},
                     {"test_fraction", r.real.test_fraction}};
    }
    j["hidden_widths"] = r.hidden_widths;
    j["train"] = {{"learning_rate", r.train.learning_rate},
                  {"epochs", r.train.epochs},
                  {"batch_size", r.train.batch_size},
                  {"adam_beta1", r.train.adam_beta1},
                  {"adam_beta2", r.train.adam_beta2},
                  {"adam_epsilon", r.train.adam_epsilon}};
    j["fhat_source"] = r.fhat_source == FhatSource::FairGraph ? "fair" : "augmented";
    j["test_set"] = r.test_mode == TestSetMode::Original ? "original" : "augmented";
    j["include_records"] = r.include_records;
    return j;
}

TrainConfig with_shuffle(TrainConfig cfg, std::uint64_t seed) {
    cfg.shuffle_seed = seed;
    return cfg;
}

struct TrialData {
    TabularDataset classifier_train; // biased/original distribution
    TabularDataset reference_train;  // fair or augmented
    TabularDataset test;             // from the classifier's distribution
};

TrialData prepare_synthetic_trial(const ExperimentRecipe& recipe, std::uint64_t trial_seed) {
    const SyntheticPlan& plan = recipe.synthetic;

    CausalModelSpec biased_base = plan.base;
    biased_base.bias.reset();
    biased_base.seed = derive_seed(trial_seed, kBiasedData);
    TabularDataset biased = inject_label_bias(
        generate_fair_synthetic(biased_base), plan.base.bias->p_protected_given_positive,
        plan.base.bias->p_protected_given_negative, derive_seed(trial_seed, kBiasInjection));
    auto [biased_train, biased_test] =
        train_test_split(biased, plan.test_fraction, derive_seed(trial_seed, kBiasedSplit));

    TrialData data;
    if (recipe.fhat_source == FhatSource::FairGraph) {
        CausalModelSpec fair = plan.base;
        fair.bias.reset();
        fair.seed = derive_seed(trial_seed, kFairData);
        data.reference_train = train_test_split(generate_fair_synthetic(fair),
                                                plan.test_fraction,
                                                derive_seed(trial_seed, kFairSplit))
                                   .first;
    } else {
        data.reference_train = counterfactual_augment(biased_train);
    }
    data.classifier_train = std::move(biased_train);
    data.test = std::move(biased_test);
    return data;
}

TrialData prepare_real_trial(const RawTable& table, const Schema& schema,
                             const ExperimentRecipe& recipe, std::uint64_t trial_seed) {
    auto [train_ids, test_ids] = split_indices(table.n_rows(), recipe.real.test_fraction,
                                               derive_seed(trial_seed, kBiasedSplit));
    const Encoder encoder = Encoder::fit(table, schema, train_ids);
    const TabularDataset all = encoder.encode(table);

    TrialData data;
    data.classifier_train = subset(all, train_ids);
    data.reference_train = counterfactual_augment(data.classifier_train);
    data.test = subset(all, test_ids);
    return data;
}

} // namespace

void ExperimentRecipe::validate() const {
    if (trials < 1) throw ConfigError("experiment needs at least one trial");
    if (hidden_widths.empty())
        throw ConfigError("experiment models need at least one hidden layer width");
    train.validate();
    if (kind == ExperimentKind::Synthetic) {
        synthetic.base.validate();
        if (!synthetic.base.bias)
            throw ConfigError("synthetic experiments need the biased-graph probabilities");
        if (!(synthetic.test_fraction > 0.0 && synthetic.test_fraction < 1.0))
            throw ConfigError("test_fraction must be in (0, 1)");
    } else {
        if (real.data_csv.empty() || real.schema_path.empty())
            throw ConfigError("real experiments need data_csv and schema paths");
        if (fhat_source != FhatSource::Augmented)
            throw ConfigError("real experiments train the reference model on "
                              "augmented data (no fair graph is available)");
        if (!(real.test_fraction > 0.0 && real.test_fraction < 1.0))
            throw ConfigError("test_fraction must be in (0, 1)");
    }
}

ExperimentRecipe ExperimentRecipe::parse(const std::string& json_text) {
    json j = json::parse(json_text, nullptr, false);
    if (j.is_discarded()) throw ConfigError("experiment recipe is not valid JSON");
    ExperimentRecipe r;
    try {
        r.name = j.value("name", "experiment");
        const std::string kind = j.value("kind", "synthetic");
        if (kind == "synthetic") r.kind = ExperimentKind::Synthetic;
        else if (kind == "real") r.kind = ExperimentKind::Real;
        else throw ConfigError("experiment kind must be \"synthetic\" or \"real\"");
        r.trials = j.value("trials", std::size_t{30});
        r.seed = j.value("seed", std::uint64_t{0});
        if (j.contains("synthetic")) {
            json s = j["synthetic"];
            const double fraction = s.value("test_fraction", 0.2);
            s.erase("test_fraction");
            if (!s.contains("seed")) s["seed"] = 0;
            r.synthetic.base = CausalModelSpec::parse(s.dump());
            r.synthetic.test_fraction = fraction;
        }
        if (j.contains("real")) {
            const json& real = j["real"];
            r.real.data_csv = real.value("data_csv", "");
            r.real.schema_path = real.value("schema", "");
            r.real.test_fraction = real.value("test_fraction", 0.2);
        }
        if (j.contains("hidden_widths"))
            r.hidden_widths = j["hidden_widths"].get<std::vector<std::size_t>>();
        if (j.contains("train")) {
            const json& t = j["train"];
            r.train.learning_rate = t.value("learning_rate", r.train.learning_rate);
            r.train.epochs = t.value("epochs", r.train.epochs);
            r.train.batch_size = t.value("batch_size", r.train.batch_size);
            r.train.adam_beta1 = t.value("adam_beta1", r.train.adam_beta1);
            r.train.adam_beta2 = t.value("adam_beta2", r.train.adam_beta2);
            r.train.adam_epsilon = t.value("adam_epsilon", r.train.adam_epsilon);
        }
        const std::string source =
            j.value("fhat_source", r.kind == ExperimentKind::Real ? "augmented" : "fair");
        if (source == "fair") r.fhat_source = FhatSource::FairGraph;
        else if (source == "augmented") r.fhat_source = FhatSource::Augmented;
        else throw ConfigError("fhat_source must be \"fair\" or \"augmented\"");
        const std::string mode = j.value("test_set", "original");
        if (mode == "original") r.test_mode = TestSetMode::Original;
        else if (mode == "augmented") r.test_mode = TestSetMode::Augmented;
        else throw ConfigError("test_set must be \"original\" or \"augmented\"");
        r.include_records = j.value("include_records", false);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed experiment recipe: ") + e.what());
    }
    r.validate();
    return r;
}

ExperimentRecipe ExperimentRecipe::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open experiment recipe " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

std::string ExperimentRecipe::to_json_string() const {
    return recipe_to_json(*this).dump(2) + "\n";
}

std::string ExperimentRecipe::digest() const {
    return digest_hex(recipe_to_json(*this).dump());
}

std::size_t ExperimentSummary::trials_with_auc() const {
    std::size_t n = 0;
    for (const TrialResult& t : trials) n += t.auc.has_value() ? 1 : 0;
    return n;
}

double ExperimentSummary::mean_auc() const {
    double sum = 0.0;
    std::size_t n = 0;
    for (const TrialResult& t : trials) {
        if (t.auc) {
            sum += *t.auc;
            ++n;
        }
    }
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

double ExperimentSummary::std_auc() const {
    const double mean = mean_auc();
    double sq = 0.0;
    std::size_t n = 0;
    for (const TrialResult& t : trials) {
        if (t.auc) {
            sq += (*t.auc - mean) * (*t.auc - mean);
            ++n;
        }
    }
    return n == 0 ? 0.0 : std::sqrt(sq / static_cast<double>(n));
}

double ExperimentSummary::mean_classifier_accuracy() const {
    double sum = 0.0;
    for (const TrialResult& t : trials) sum += t.classifier_accuracy;
    return trials.empty() ? 0.0 : sum / static_cast<double>(trials.size());
}

double ExperimentSummary::mean_reference_accuracy() const {
    double sum = 0.0;
    for (const TrialResult& t : trials) sum += t.reference_accuracy;
    return trials.empty() ? 0.0 : sum / static_cast<double>(trials.size());
}

std::size_t ExperimentSummary::trials_ps_ordered() const {
    std::size_t n = 0;
    for (const TrialResult& t : trials) {
        if (t.non_members > 0 && t.mean_ps_non_members > t.mean_ps_members) ++n;
    }
    return n;
}

std::size_t ExperimentSummary::spd_improved_trials() const {
    std::size_t n = 0;
    for (const TrialResult& t : trials) {
        if (t.classifier_metrics.statistical_parity &&
            t.reference_metrics.statistical_parity &&
            std::abs(*t.reference_metrics.statistical_parity) <
                std::abs(*t.classifier_metrics.statistical_parity))
            ++n;
    }
    return n;
}

std::size_t ExperimentSummary::dir_improved_trials() const {
    std::size_t n = 0;
    for (const TrialResult& t : trials) {
        if (t.classifier_metrics.disparate_impact && t.reference_metrics.disparate_impact &&
            std::abs(1.0 - *t.reference_metrics.disparate_impact) <
                std::abs(1.0 - *t.classifier_metrics.disparate_impact))
            ++n;
    }
    return n;
}

ExperimentSummary run_experiment(const ExperimentRecipe& recipe,
                                 const std::optional<std::filesystem::path>& out_dir,
                                 const ExperimentCallbacks& callbacks) {
    recipe.validate();
    ExperimentSummary summary;
    summary.recipe_digest = recipe.digest();

    RawTable raw;
    Schema schema;
    if (recipe.kind == ExperimentKind::Real) {
        raw = read_csv(recipe.real.data_csv);
        schema = Schema::load(recipe.real.schema_path);
    }

    if (out_dir) std::filesystem::create_directories(*out_dir);

    for (std::size_t t = 0; t < recipe.trials; ++t) {
        const std::uint64_t trial_seed = recipe.seed + t;
        TrialData data = recipe.kind == ExperimentKind::Synthetic
                             ? prepare_synthetic_trial(recipe, trial_seed)
                             : prepare_real_trial(raw, schema, recipe, trial_seed);
        if (recipe.test_mode == TestSetMode::Augmented)
            data.test = counterfactual_augment(data.test);

        NetworkSpec spec;
        spec.input_dim = data.classifier_train.n_cols();
        spec.hidden_widths = recipe.hidden_widths;

        spec.seed = derive_seed(trial_seed, kInitClassifier);
        NetworkParams classifier = train(
            init_network(spec), data.classifier_train,
            with_shuffle(recipe.train, derive_seed(trial_seed, kShuffleClassifier)),
            TrainTarget::Label);

        spec.seed = derive_seed(trial_seed, kInitReference);
        NetworkParams reference = train(
            init_network(spec), data.reference_train,
            with_shuffle(recipe.train, derive_seed(trial_seed, kShuffleReference)),
            TrainTarget::Label);

        spec.seed = derive_seed(trial_seed, kInitProtected);
        NetworkParams protected_model = train(
            init_network(spec), data.classifier_train,
            with_shuffle(recipe.train, derive_seed(trial_seed, kShuffleProtected)),
            TrainTarget::ProtectedAttribute);

        AuditOptions options;
        options.include_records = recipe.include_records;
        options.config_digest = summary.recipe_digest;
        const AuditReport report =
            audit_report(classifier, reference, protected_model, data.test, options);

        TrialResult result;
        result.seed = trial_seed;
        result.members = report.match.members;
        result.non_members = report.match.non_members;
        if (report.roc) result.auc = report.roc->auc;
        result.mean_ps_members = report.ps_members.mean;
        result.mean_ps_non_members = report.ps_non_members.mean;
        result.classifier_accuracy = accuracy(classifier, data.test, TrainTarget::Label);
        result.reference_accuracy = accuracy(reference, data.test, TrainTarget::Label);
        result.classifier_metrics = report.classifier_metrics;
        result.reference_metrics = report.reference_metrics;

        if (out_dir) {
            std::ostringstream dir_name;
            dir_name << "trial_" << std::setw(3) << std::setfill('0') << t;
            const std::filesystem::path trial_dir = *out_dir / dir_name.str();
            std::filesystem::create_directories(trial_dir);
            std::ofstream report_file(trial_dir / "report.json", std::ios::binary);
            report_file << audit_report_to_json(report, data.test.column_names(), options);
            if (report.roc) write_roc_csv(*report.roc, trial_dir / "roc.csv");
        }

        summary.trials.push_back(result);
        if (callbacks.on_trial)
            callbacks.on_trial(result, t, recipe.trials, callbacks.user);
    }

    if (out_dir) {
        std::ofstream summary_file(*out_dir / "summary.json", std::ios::binary);
        summary_file << summary_to_json(summary);
    }
    return summary;
}

std::string summary_to_json(const ExperimentSummary& summary) {
    json trials = json::array();
    for (const TrialResult& t : summary.trials) {
        json jt{{"seed", t.seed},
                {"members", t.members},
                {"non_members", t.non_members},
                {"auc", t.auc ? json(*t.auc) : json(nullptr)},
                {"mean_ps_members", t.mean_ps_members},
                {"mean_ps_non_members", t.mean_ps_non_members},
                {"classifier_accuracy", t.classifier_accuracy},
                {"reference_accuracy", t.reference_accuracy}};
        auto metric = [](const std::optional<double>& v) {
            return v ? json(*v) : json(nullptr);
        };
        jt["classifier_statistical_parity"] = metric(t.classifier_metrics.statistical_parity);
        jt["classifier_disparate_impact"] = metric(t.classifier_metrics.disparate_impact);
        jt["reference_statistical_parity"] = metric(t.reference_metrics.statistical_parity);
        jt["reference_disparate_impact"] = metric(t.reference_metrics.disparate_impact);
        trials.push_back(std::move(jt));
    }
    json j{{"format", "fairsense-experiment-summary"},
           {"version", 1},
           {"recipe_digest", summary.recipe_digest},
           {"trials", std::move(trials)},
           {"aggregate",
            {{"trials_total", summary.trials.size()},
             {"trials_with_auc", summary.trials_with_auc()},
             {"mean_auc", summary.mean_auc()},
             {"std_auc", summary.std_auc()},
             {"mean_classifier_accuracy", summary.mean_classifier_accuracy()},
             {"mean_reference_accuracy", summary.mean_reference_accuracy()},
             {"trials_ps_ordered", summary.trials_ps_ordered()},
             {"spd_improved_trials", summary.spd_improved_trials()},
             {"dir_improved_trials", summary.dir_improved_trials()}}}};
    return j.dump(2) + "\n";
}

} // namespace fairsense
