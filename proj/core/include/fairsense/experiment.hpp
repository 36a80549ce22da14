#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fairsense/audit.hpp"
#include "fairsense/synthetic.hpp"

namespace fairsense {

// ---------------------------------------------------------------------------
// Experiment recipes: the seeded multi-trial protocol that trains F (on
// original/biased data), F_hat (on fair or counterfactually augmented data)
// and A (protected-status model), audits F against F_hat on the test set,
// and aggregates per-trial results.
// ---------------------------------------------------------------------------

enum class ExperimentKind { Synthetic, Real };
enum class FhatSource { FairGraph, Augmented };
enum class TestSetMode { Original, Augmented };

struct SyntheticPlan {
    CausalModelSpec base;                 // bias field supplies the biased graph
    double test_fraction = 0.2;
};

struct RealPlan {
    std::filesystem::path data_csv;       // full dataset; split per trial
    std::filesystem::path schema_path;
    double test_fraction = 0.2;
};

struct ExperimentRecipe {
    std::string name = "experiment";
    ExperimentKind kind = ExperimentKind::Synthetic;
    std::size_t trials = 30;
    std::uint64_t seed = 0;               // trial t uses seed + t
    SyntheticPlan synthetic;
    RealPlan real;
    std::vector<std::size_t> hidden_widths{16};
    TrainConfig train;
    FhatSource fhat_source = FhatSource::FairGraph; // Augmented is the real-data protocol
    TestSetMode test_mode = TestSetMode::Original;
    bool include_records = false;

    static ExperimentRecipe parse(const std::string& json_text);
    static ExperimentRecipe load(const std::filesystem::path& path);
    std::string to_json_string() const;
    std::string digest() const;
    void validate() const;
};

struct TrialResult {
    std::uint64_t seed = 0;
    std::size_t members = 0;
    std::size_t non_members = 0;
    std::optional<double> auc;            // absent when the match set is single-class
    double mean_ps_members = 0.0;
    double mean_ps_non_members = 0.0;
    double classifier_accuracy = 0.0;     // F on the test labels
    double reference_accuracy = 0.0;      // F_hat on the test labels
    GroupMetrics classifier_metrics;
    GroupMetrics reference_metrics;
};

struct ExperimentSummary {
    std::string recipe_digest;
    std::vector<TrialResult> trials;

    std::size_t trials_with_auc() const;
    double mean_auc() const;              // over trials that have one
    double std_auc() const;
    double mean_classifier_accuracy() const;
    double mean_reference_accuracy() const;
    std::size_t trials_ps_ordered() const;  // mean ps non-members > members
    std::size_t spd_improved_trials() const; // |spd(F_hat)| < |spd(F)|
    std::size_t dir_improved_trials() const; // dir(F_hat) closer to 1
};

struct ExperimentCallbacks {
    // Called after each trial; used by the CLI for progress lines.
    void (*on_trial)(const TrialResult&, std::size_t index, std::size_t total,
                     void* user) = nullptr;
    void* user = nullptr;
};

// Runs every trial sequentially with derived seeds. When out_dir is given,
// writes trial_NNN/report.json (+ roc.csv when defined) and summary.json;
// outputs are byte-identical across reruns with the same recipe.
ExperimentSummary run_experiment(const ExperimentRecipe& recipe,
                                 const std::optional<std::filesystem::path>& out_dir,
                                 const ExperimentCallbacks& callbacks = {});

std::string summary_to_json(const ExperimentSummary& summary);

} // namespace fairsense
