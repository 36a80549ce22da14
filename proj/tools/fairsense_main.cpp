// fairsense CLI: synthesize data, augment, train models, audit classifiers,
// compute monitoring baselines, and run the deployment monitor or a full
// multi-trial experiment recipe.
//
// Exit codes: 0 success (monitor: no alarms), 1 configuration/data error,
// 2 (monitor only) at least one alarm was raised.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fairsense/audit.hpp"
#include "fairsense/digest.hpp"
#include "fairsense/errors.hpp"
#include "fairsense/experiment.hpp"
#include "fairsense/model_io.hpp"
#include "fairsense/monitor.hpp"
#include "fairsense/nn.hpp"
#include "fairsense/rng.hpp"
#include "fairsense/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fairsense;

namespace {

struct GlobalFlags {
    bool quiet = false;
    std::uint64_t seed = 0;
    bool seed_given = false;
};

json load_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError("config file " + path.string() + " is not valid JSON");
    return j;
}

// --config supplies defaults; options given on the command line win.
template <typename T>
void overlay(const CLI::App* cmd, const json& cfg, const std::string& opt, T& var) {
    const std::string key = opt.substr(2);
    if (cmd->count(opt) == 0 && cfg.contains(key)) var = cfg.at(key).get<T>();
}

void overlay_path(const CLI::App* cmd, const json& cfg, const std::string& opt, fs::path& var) {
    const std::string key = opt.substr(2);
    if (cmd->count(opt) == 0 && cfg.contains(key)) var = cfg.at(key).get<std::string>();
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << text;
}

// Deterministic outputs must not carry timestamps; runs append one line to a
// sidecar log next to the main output instead.
void append_run_log(const fs::path& main_output, const std::string& command,
                    const std::string& digest) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%S", std::gmtime(&now));
    fs::path log = main_output;
    log += ".log";
    std::ofstream out(log, std::ios::app);
    out << stamp << "Z " << command << " config_digest=" << digest << "\n";
}

void write_meta(const fs::path& out_prefix, const std::string& command, const json& config) {
    const std::string digest = digest_hex(config.dump());
    json meta{{"command", command}, {"config_digest", digest}, {"config", config}};
    fs::path meta_path = out_prefix;
    meta_path += ".meta.json";
    write_text(meta_path, meta.dump(2) + "\n");
    append_run_log(out_prefix, command, digest);
}

Encoder encoder_for(const ModelFile& model, const std::optional<fs::path>& schema_path,
                    const RawTable& table) {
    if (model.encoder) return *model.encoder;
    if (!schema_path)
        throw ConfigError("model file has no embedded encoder; pass --schema");
    return Encoder::fit(table, Schema::load(*schema_path));
}

// ---- synth ---------------------------------------------------------------

int cmd_synth(const fs::path& spec_path, const fs::path& out_prefix,
              const GlobalFlags& global) {
    CausalModelSpec spec = CausalModelSpec::load(spec_path);
    if (global.seed_given) spec.seed = global.seed;

    const TabularDataset data = generate_synthetic(spec);
    const Schema schema = synthetic_schema();

    fs::path csv = out_prefix;
    csv += ".csv";
    fs::path schema_path = out_prefix;
    schema_path += ".schema.json";
    if (out_prefix.has_parent_path()) fs::create_directories(out_prefix.parent_path());
    save_dataset_csv(data, schema, csv);
    schema.save(schema_path);
    write_meta(out_prefix, "synth", json::parse(spec.to_json_string()));

    if (!global.quiet)
        std::cout << "wrote " << csv.string() << " (" << data.n_rows() << " rows, "
                  << provenance_name(data.provenance) << ")\n";
    return 0;
}

// ---- augment ---------------------------------------------------------------

int cmd_augment(const fs::path& data_path, const fs::path& schema_path,
                const fs::path& out_csv, const GlobalFlags& global) {
    const Schema schema = Schema::load(schema_path);
    const RawTable table = read_csv(data_path);
    const RawTable augmented = counterfactual_augment_raw(table, schema);
    if (out_csv.has_parent_path()) fs::create_directories(out_csv.parent_path());
    write_csv(augmented, out_csv);
    write_meta(out_csv, "augment",
               json{{"data", data_path.string()}, {"schema", schema_path.string()}});
    if (!global.quiet)
        std::cout << "wrote " << out_csv.string() << " (" << table.rows.size() << " -> "
                  << augmented.rows.size() << " rows)\n";
    return 0;
}

// ---- train -----------------------------------------------------------------

struct TrainArgs {
    fs::path data;
    fs::path schema;
    fs::path out;
    std::string target = "label";
    std::vector<std::size_t> hidden{16};
    double test_fraction = 0.2;
    bool augment_train = false;
    TrainConfig config;
};

int cmd_train(TrainArgs args, const GlobalFlags& global) {
    const std::uint64_t base_seed = global.seed;
    const Schema schema = Schema::load(args.schema);
    const RawTable table = read_csv(args.data);

    std::vector<std::size_t> train_ids, test_ids;
    if (args.test_fraction > 0.0) {
        std::tie(train_ids, test_ids) =
            split_indices(table.n_rows(), args.test_fraction, derive_seed(base_seed, 1));
    } else {
        train_ids.resize(table.n_rows());
        std::iota(train_ids.begin(), train_ids.end(), 0);
    }

    const Encoder encoder = Encoder::fit(table, schema, train_ids);
    EncodeReport encode_report;
    const TabularDataset all = encoder.encode(table, &encode_report);
    TabularDataset train_set = subset(all, train_ids);
    if (args.augment_train) train_set = counterfactual_augment(train_set);

    const TrainTarget target = args.target == "protected"
                                   ? TrainTarget::ProtectedAttribute
                                   : TrainTarget::Label;

    NetworkSpec net;
    net.input_dim = train_set.n_cols();
    net.hidden_widths = args.hidden;
    net.seed = derive_seed(base_seed, 2);
    args.config.shuffle_seed = derive_seed(base_seed, 3);

    json config{{"data", args.data.string()},
                {"schema", args.schema.string()},
                {"target", args.target},
                {"hidden", args.hidden},
                {"test_fraction", args.test_fraction},
                {"augment_train", args.augment_train},
                {"learning_rate", args.config.learning_rate},
                {"epochs", args.config.epochs},
                {"batch_size", args.config.batch_size},
                {"seed", base_seed}};

    TrainSummary summary;
    ModelFile model;
    model.params = train(init_network(net), train_set, args.config, target, &summary);
    model.encoder = encoder;
    TrainingMeta meta;
    meta.config = args.config;
    meta.target = args.target;
    meta.final_loss = summary.epoch_loss.empty() ? 0.0 : summary.epoch_loss.back();
    meta.config_digest = digest_hex(config.dump());
    model.training = meta;
    save_model(model, args.out);
    append_run_log(args.out, "train", meta.config_digest);

    if (!global.quiet) {
        std::cout << "model " << args.out.string() << " digest " << model_digest(model)
                  << "\n";
        std::cout << "train_accuracy " << accuracy(model.params, train_set, target) << "\n";
        if (!test_ids.empty()) {
            const TabularDataset test_set = subset(all, test_ids);
            std::cout << "test_accuracy " << accuracy(model.params, test_set, target)
                      << "\n";
        }
        if (encode_report.unseen_level_cells > 0)
            std::cout << "unseen_level_cells " << encode_report.unseen_level_cells << "\n";
    }
    return 0;
}

// ---- audit -----------------------------------------------------------------

struct AuditArgs {
    fs::path classifier;
    fs::path reference;
    fs::path protected_model;
    fs::path data;
    std::optional<fs::path> schema;
    fs::path out;
    std::optional<fs::path> roc_csv;
    bool include_records = false;
    bool augment_test = false;
};

int cmd_audit(const AuditArgs& args, const GlobalFlags& global) {
    const ModelFile classifier = load_model(args.classifier);
    const ModelFile reference = load_model(args.reference);
    const ModelFile protected_model = load_model(args.protected_model);

    const RawTable table = read_csv(args.data);
    const Encoder encoder = encoder_for(classifier, args.schema, table);
    EncodeReport encode_report;
    TabularDataset test = encoder.encode(table, &encode_report);
    if (args.augment_test) test = counterfactual_augment(test);

    json config{{"classifier", model_digest(classifier)},
                {"reference", model_digest(reference)},
                {"protected_model", model_digest(protected_model)},
                {"data", args.data.string()},
                {"augment_test", args.augment_test}};

    AuditOptions options;
    options.include_records = args.include_records;
    options.config_digest = digest_hex(config.dump());
    const AuditReport report = audit_report(classifier.params, reference.params,
                                            protected_model.params, test, options);

    write_text(args.out, audit_report_to_json(report, test.column_names(), options));
    if (args.roc_csv && report.roc) write_roc_csv(*report.roc, *args.roc_csv);
    append_run_log(args.out, "audit", options.config_digest);

    if (!global.quiet) {
        std::cout << "members " << report.match.members << " non_members "
                  << report.match.non_members << "\n";
        if (report.roc) std::cout << "auc " << report.roc->auc << "\n";
        else std::cout << "auc n/a (" << report.roc_note << ")\n";
        if (encode_report.unseen_level_cells > 0)
            std::cout << "unseen_level_cells " << encode_report.unseen_level_cells << "\n";
    }
    return 0;
}

// ---- baseline ----------------------------------------------------------------

int cmd_baseline(const fs::path& classifier_path, const fs::path& protected_path,
                 const fs::path& data_path, const std::optional<fs::path>& schema_path,
                 const fs::path& out, const GlobalFlags& global) {
    const ModelFile classifier = load_model(classifier_path);
    const ModelFile protected_model = load_model(protected_path);
    const RawTable table = read_csv(data_path);
    const Encoder encoder = encoder_for(classifier, schema_path, table);
    // Deployment-mode encoding keeps the baseline comparable with the
    // monitor's stream when the protected column is deploy-absent.
    EncodeReport encode_report;
    const TabularDataset reference = encoder.encode_for_deployment(table, &encode_report);

    json config{{"classifier", model_digest(classifier)},
                {"protected_model", model_digest(protected_model)},
                {"data", data_path.string()}};

    Baseline baseline =
        compute_baseline(classifier.params, protected_model.params, reference);
    baseline.config_digest = digest_hex(config.dump());
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    baseline.save(out);
    append_run_log(out, "baseline", baseline.config_digest);

    if (!global.quiet) {
        std::cout << "baseline mean_ps " << baseline.mean_ps << " std_ps "
                  << baseline.std_ps << " n " << baseline.n << "\n";
        if (encode_report.unseen_level_cells > 0)
            std::cout << "unseen_level_cells " << encode_report.unseen_level_cells << "\n";
    }
    return 0;
}

// ---- monitor ----------------------------------------------------------------

struct MonitorArgs {
    fs::path classifier;
    fs::path protected_model;
    fs::path baseline;
    std::optional<fs::path> input;
    std::optional<fs::path> out;
    std::string format = "ndjson";
    double k_sigma = 3.0;
    std::size_t top_k = 5;
};

int cmd_monitor(const MonitorArgs& args) {
    const ModelFile classifier = load_model(args.classifier);
    const ModelFile protected_model = load_model(args.protected_model);
    if (!classifier.encoder)
        throw ConfigError("monitor needs the classifier's embedded encoder");
    const Baseline baseline = Baseline::load(args.baseline);

    // Digest mismatch throws here, before any event is emitted.
    const Monitor monitor(classifier.params, protected_model.params, baseline,
                          MonitorConfig{args.k_sigma, args.top_k});

    std::ifstream file_in;
    if (args.input) {
        file_in.open(*args.input, std::ios::binary);
        if (!file_in) throw ConfigError("cannot open input stream " + args.input->string());
    }
    std::istream& in = args.input ? file_in : std::cin;

    std::ofstream file_out;
    if (args.out) {
        if (args.out->has_parent_path()) fs::create_directories(args.out->parent_path());
        file_out.open(*args.out, std::ios::binary);
        if (!file_out) throw ConfigError("cannot write events to " + args.out->string());
    }
    std::ostream& out = args.out ? static_cast<std::ostream&>(file_out) : std::cout;

    const StreamFormat format =
        args.format == "csv" ? StreamFormat::Csv : StreamFormat::Ndjson;
    const StreamStats stats = monitor_stream(monitor, *classifier.encoder, in, format, out);

    std::cerr << "rows " << stats.rows << " alarms " << stats.alarms << " errors "
              << stats.errors << "\n";
    return stats.alarms > 0 ? 2 : 0;
}

// ---- experiment ----------------------------------------------------------------

int cmd_experiment(const fs::path& recipe_path, const fs::path& out_dir,
                   std::optional<std::size_t> trials_override, const GlobalFlags& global) {
    ExperimentRecipe recipe = ExperimentRecipe::load(recipe_path);
    if (trials_override) recipe.trials = *trials_override;
    if (global.seed_given) recipe.seed = global.seed;

    struct Progress {
        bool quiet;
    } progress{global.quiet};
    ExperimentCallbacks callbacks;
    callbacks.user = &progress;
    callbacks.on_trial = [](const TrialResult& t, std::size_t index, std::size_t total,
                            void* user) {
        if (static_cast<Progress*>(user)->quiet) return;
        std::cout << "trial " << (index + 1) << "/" << total << " seed " << t.seed
                  << " members " << t.members << " non_members " << t.non_members;
        if (t.auc) std::cout << " auc " << *t.auc;
        std::cout << " acc " << t.classifier_accuracy << "\n";
    };

    const ExperimentSummary summary = run_experiment(recipe, out_dir, callbacks);
    append_run_log(out_dir / "summary.json", "experiment", summary.recipe_digest);

    if (!global.quiet) {
        std::cout << "trials " << summary.trials.size() << " mean_auc "
                  << summary.mean_auc() << " std_auc " << summary.std_auc()
                  << " mean_accuracy " << summary.mean_classifier_accuracy() << "\n";
        std::cout << "summary " << (out_dir / "summary.json").string() << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"counterfactual-fairness audit toolkit"};
    app.require_subcommand(1);

    GlobalFlags global;
    app.add_flag("--quiet", global.quiet, "suppress progress output")->configurable(false);
    auto* seed_opt =
        app.add_option("--seed", global.seed, "override the seed of the invoked command");
    app.fallthrough();

    // synth
    std::string synth_spec, synth_out;
    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset (CSV + schema)");
    synth->add_option("--spec,--config", synth_spec, "CausalModelSpec JSON file")->required();
    synth->add_option("--out", synth_out, "output prefix (<out>.csv, <out>.schema.json)")
        ->required();

    // augment
    std::string aug_data, aug_schema, aug_out;
    auto* augment =
        app.add_subcommand("augment", "counterfactually augment a CSV (size doubles)");
    augment->add_option("--data", aug_data, "input CSV")->required();
    augment->add_option("--schema", aug_schema, "schema JSON")->required();
    augment->add_option("--out", aug_out, "output CSV")->required();

    // train
    TrainArgs train_args;
    auto* train_cmd = app.add_subcommand("train", "train a classifier or protected-status model");
    train_cmd->add_option("--data", train_args.data, "training CSV");
    train_cmd->add_option("--schema", train_args.schema, "schema JSON");
    train_cmd->add_option("--out", train_args.out, "output model JSON");
    train_cmd->add_option("--target", train_args.target, "label|protected")
        ->check(CLI::IsMember({"label", "protected"}));
    train_cmd->add_option("--hidden", train_args.hidden, "hidden layer widths")
        ->delimiter(',');
    train_cmd->add_option("--test-fraction", train_args.test_fraction,
                          "held-out fraction (0 trains on everything)");
    train_cmd->add_flag("--augment-train", train_args.augment_train,
                        "counterfactually augment the training split");
    train_cmd->add_option("--lr", train_args.config.learning_rate, "Adam learning rate");
    train_cmd->add_option("--epochs", train_args.config.epochs, "training epochs");
    train_cmd->add_option("--batch", train_args.config.batch_size, "mini-batch size");
    std::string train_config_path;
    train_cmd->add_option("--config", train_config_path,
                          "JSON file with defaults for these options");

    // audit
    AuditArgs audit_args;
    std::string audit_schema, audit_roc;
    auto* audit_cmd = app.add_subcommand("audit", "audit a classifier against a reference");
    audit_cmd->add_option("--classifier", audit_args.classifier, "model F");
    audit_cmd->add_option("--reference", audit_args.reference, "reference model F-hat");
    audit_cmd->add_option("--protected-model", audit_args.protected_model, "model A");
    audit_cmd->add_option("--data", audit_args.data, "test CSV");
    audit_cmd->add_option("--schema", audit_schema, "schema JSON (when models lack one)");
    audit_cmd->add_option("--out", audit_args.out, "audit report JSON");
    audit_cmd->add_option("--roc-csv", audit_roc, "also write ROC points as CSV");
    audit_cmd->add_flag("--records", audit_args.include_records,
                        "embed per-row sensitivity records");
    audit_cmd->add_flag("--augment-test", audit_args.augment_test,
                        "counterfactually augment the test set");
    std::string audit_config_path;
    audit_cmd->add_option("--config", audit_config_path,
                          "JSON file with defaults for these options");

    // baseline
    std::string base_classifier, base_protected, base_data, base_schema, base_out;
    auto* baseline_cmd =
        app.add_subcommand("baseline", "compute the monitoring baseline over a reference set");
    baseline_cmd->add_option("--classifier", base_classifier, "model F");
    baseline_cmd->add_option("--protected-model", base_protected, "model A");
    baseline_cmd->add_option("--data", base_data, "reference CSV");
    baseline_cmd->add_option("--schema", base_schema, "schema JSON (when models lack one)");
    baseline_cmd->add_option("--out", base_out, "baseline JSON");
    std::string baseline_config_path;
    baseline_cmd->add_option("--config", baseline_config_path,
                             "JSON file with defaults for these options");

    // monitor
    MonitorArgs monitor_args;
    std::string monitor_in, monitor_out;
    auto* monitor_cmd =
        app.add_subcommand("monitor", "score a stream of rows against the baseline");
    monitor_cmd->add_option("--classifier", monitor_args.classifier, "model F");
    monitor_cmd->add_option("--protected-model", monitor_args.protected_model, "model A");
    monitor_cmd->add_option("--baseline", monitor_args.baseline, "baseline JSON");
    monitor_cmd->add_option("--input", monitor_in, "row stream (default: stdin)");
    monitor_cmd->add_option("--out", monitor_out, "event stream (default: stdout)");
    monitor_cmd->add_option("--format", monitor_args.format, "ndjson|csv")
        ->check(CLI::IsMember({"ndjson", "csv"}));
    monitor_cmd->add_option("--k-sigma", monitor_args.k_sigma, "alarm threshold multiplier");
    monitor_cmd->add_option("--top-k", monitor_args.top_k, "features attached to alarms");
    std::string monitor_config_path;
    monitor_cmd->add_option("--config", monitor_config_path,
                            "JSON file with defaults for these options");

    // experiment
    std::string exp_recipe, exp_out;
    std::size_t exp_trials = 0;
    auto* experiment_cmd =
        app.add_subcommand("experiment", "run a full multi-trial experiment recipe");
    experiment_cmd->add_option("--recipe,--config", exp_recipe, "experiment recipe JSON")
        ->required();
    experiment_cmd->add_option("--out", exp_out, "output directory")->required();
    experiment_cmd->add_option("--trials", exp_trials, "override the recipe's trial count");

    CLI11_PARSE(app, argc, argv);
    global.seed_given = seed_opt->count() > 0;

    try {
        if (synth->parsed()) return cmd_synth(synth_spec, synth_out, global);
        if (augment->parsed()) return cmd_augment(aug_data, aug_schema, aug_out, global);
        if (train_cmd->parsed()) {
            if (!train_config_path.empty()) {
                const json cfg = load_json_file(train_config_path);
                overlay_path(train_cmd, cfg, "--data", train_args.data);
                overlay_path(train_cmd, cfg, "--schema", train_args.schema);
                overlay_path(train_cmd, cfg, "--out", train_args.out);
                overlay(train_cmd, cfg, "--target", train_args.target);
                overlay(train_cmd, cfg, "--hidden", train_args.hidden);
                overlay(train_cmd, cfg, "--test-fraction", train_args.test_fraction);
                overlay(train_cmd, cfg, "--augment-train", train_args.augment_train);
                overlay(train_cmd, cfg, "--lr", train_args.config.learning_rate);
                overlay(train_cmd, cfg, "--epochs", train_args.config.epochs);
                overlay(train_cmd, cfg, "--batch", train_args.config.batch_size);
            }
            for (const auto& [value, name] :
                 {std::pair<const fs::path&, const char*>{train_args.data, "--data"},
                  {train_args.schema, "--schema"},
                  {train_args.out, "--out"}}) {
                if (value.empty())
                    throw ConfigError(std::string(name) + " is required (flag or config)");
            }
            return cmd_train(train_args, global);
        }
        if (audit_cmd->parsed()) {
            if (!audit_config_path.empty()) {
                const json cfg = load_json_file(audit_config_path);
                overlay_path(audit_cmd, cfg, "--classifier", audit_args.classifier);
                overlay_path(audit_cmd, cfg, "--reference", audit_args.reference);
                overlay_path(audit_cmd, cfg, "--protected-model", audit_args.protected_model);
                overlay_path(audit_cmd, cfg, "--data", audit_args.data);
                overlay_path(audit_cmd, cfg, "--out", audit_args.out);
                overlay(audit_cmd, cfg, "--records", audit_args.include_records);
                overlay(audit_cmd, cfg, "--augment-test", audit_args.augment_test);
                overlay(audit_cmd, cfg, "--schema", audit_schema);
                overlay(audit_cmd, cfg, "--roc-csv", audit_roc);
            }
            if (!audit_schema.empty()) audit_args.schema = audit_schema;
            if (!audit_roc.empty()) audit_args.roc_csv = audit_roc;
            for (const auto& [value, name] :
                 {std::pair<const fs::path&, const char*>{audit_args.classifier, "--classifier"},
                  {audit_args.reference, "--reference"},
                  {audit_args.protected_model, "--protected-model"},
                  {audit_args.data, "--data"},
                  {audit_args.out, "--out"}}) {
                if (value.empty())
                    throw ConfigError(std::string(name) + " is required (flag or config)");
            }
            return cmd_audit(audit_args, global);
        }
        if (baseline_cmd->parsed()) {
            if (!baseline_config_path.empty()) {
                const json cfg = load_json_file(baseline_config_path);
                overlay(baseline_cmd, cfg, "--classifier", base_classifier);
                overlay(baseline_cmd, cfg, "--protected-model", base_protected);
                overlay(baseline_cmd, cfg, "--data", base_data);
                overlay(baseline_cmd, cfg, "--schema", base_schema);
                overlay(baseline_cmd, cfg, "--out", base_out);
            }
            for (const auto& [value, name] :
                 {std::pair<const std::string&, const char*>{base_classifier, "--classifier"},
                  {base_protected, "--protected-model"},
                  {base_data, "--data"},
                  {base_out, "--out"}}) {
                if (value.empty())
                    throw ConfigError(std::string(name) + " is required (flag or config)");
            }
            std::optional<fs::path> schema;
            if (!base_schema.empty()) schema = base_schema;
            return cmd_baseline(base_classifier, base_protected, base_data, schema,
                                base_out, global);
        }
        if (monitor_cmd->parsed()) {
            if (!monitor_config_path.empty()) {
                const json cfg = load_json_file(monitor_config_path);
                overlay_path(monitor_cmd, cfg, "--classifier", monitor_args.classifier);
                overlay_path(monitor_cmd, cfg, "--protected-model", monitor_args.protected_model);
                overlay_path(monitor_cmd, cfg, "--baseline", monitor_args.baseline);
                overlay(monitor_cmd, cfg, "--input", monitor_in);
                overlay(monitor_cmd, cfg, "--out", monitor_out);
                overlay(monitor_cmd, cfg, "--format", monitor_args.format);
                overlay(monitor_cmd, cfg, "--k-sigma", monitor_args.k_sigma);
                overlay(monitor_cmd, cfg, "--top-k", monitor_args.top_k);
            }
            if (!monitor_in.empty()) monitor_args.input = monitor_in;
            if (!monitor_out.empty()) monitor_args.out = monitor_out;
            for (const auto& [value, name] :
                 {std::pair<const fs::path&, const char*>{monitor_args.classifier, "--classifier"},
                  {monitor_args.protected_model, "--protected-model"},
                  {monitor_args.baseline, "--baseline"}}) {
                if (value.empty())
                    throw ConfigError(std::string(name) + " is required (flag or config)");
            }
            return cmd_monitor(monitor_args);
        }
        if (experiment_cmd->parsed()) {
            return cmd_experiment(exp_recipe, exp_out,
                                  exp_trials > 0 ? std::optional<std::size_t>(exp_trials)
                                                 : std::nullopt,
                                  global);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
