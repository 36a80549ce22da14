#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "fairsense/data.hpp"

namespace fairsense {

// ---------------------------------------------------------------------------
// Synthetic causal-model data: two Gaussian clusters (one per label) in two
// features, plus a binary protected attribute. Without bias the protected
// attribute is a fair coin independent of everything; with bias it is
// redrawn conditionally on the label, which injects a causal path from
// protected status to outcome.
// ---------------------------------------------------------------------------

struct BiasSpec {
    double p_protected_given_positive = 0.25;
    double p_protected_given_negative = 0.75;
};

struct CausalModelSpec {
    std::size_t n_samples = 0;
    std::array<double, 2> negative_mean{-1.0, -1.0};
    std::array<double, 2> positive_mean{+1.0, +1.0};
    double class_stddev = 1.0;
    std::optional<BiasSpec> bias; // absent: fair graph; present: biased graph
    std::uint64_t seed = 0;

    void validate() const; // throws InputError

    static CausalModelSpec parse(const std::string& json_text);
    static CausalModelSpec load(const std::filesystem::path& path);
    std::string to_json_string() const;
};

// Columns: feature_0, feature_1 (numeric), protected (binary). Labels are a
// fair coin, features N(class_mean, stddev^2 I), protected a fair coin
// independent of both. Requires spec.bias to be absent.
TabularDataset generate_fair_synthetic(const CausalModelSpec& spec);

// Redraws the protected column per row: Pr(protected=1) = p_pos when the
// label is positive, p_neg otherwise. Everything else is untouched.
// Requires fair-synthetic provenance.
TabularDataset inject_label_bias(const TabularDataset& data, double p_pos, double p_neg,
                                 std::uint64_t seed);

// Fair generation followed by bias injection when spec.bias is present.
TabularDataset generate_synthetic(const CausalModelSpec& spec);

// The schema matching generated datasets, for persisting them as CSV+schema.
Schema synthetic_schema();

} // namespace fairsense
