#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fairsense/sensitivity.hpp"

namespace fairsense {

// ---------------------------------------------------------------------------
// Audit: match sets from two classifiers, the threshold distinguisher, ROC /
// AUC, group-fairness metrics, and the consolidated report.
// ---------------------------------------------------------------------------

struct MatchSet {
    std::vector<std::uint8_t> flags; // 1 = member: F and F_hat agree at 0.5
    std::size_t members = 0;
    std::size_t non_members = 0;
};

MatchSet build_match_set(const NetworkParams& classifier,
                         const NetworkParams& reference_classifier,
                         const TabularDataset& test);

enum class Membership { Member, NonMember };

// Threshold distinguisher D(p, theta): member iff ps <= theta.
inline Membership distinguish(double ps, double theta) {
    return ps <= theta ? Membership::Member : Membership::NonMember;
}

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocCurve {
    std::vector<RocPoint> points; // (0,0) ... (1,1), both coordinates non-decreasing
    double auc = 0.0;             // trapezoidal integral of points
};

// Sweeps the threshold over distinct score values (tied scores advance the
// sweep in one step, which makes the trapezoidal AUC equal the pairwise
// probability statistic exactly). Throws UndefinedMetricError unless both a
// positive and a negative are present.
RocCurve roc_curve(std::span<const double> scores,
                   const std::vector<std::uint8_t>& positives);

// Pr(pred positive | protected=1) - Pr(pred positive | protected=0).
// Throws UndefinedMetricError if either group is empty.
double statistical_parity_difference(const std::vector<std::uint8_t>& preds,
                                     const std::vector<std::uint8_t>& protected_flags);

// min(rate1/rate0, rate0/rate1): group-symmetric, <= 1, and 1 at parity.
// One group at zero rate gives 0; both at zero is an UndefinedMetricError.
double disparate_impact_ratio(const std::vector<std::uint8_t>& preds,
                              const std::vector<std::uint8_t>& protected_flags);

std::vector<std::uint8_t> hard_predictions(const NetworkParams& params,
                                           const TabularDataset& data);

struct GroupMetrics {
    std::optional<double> statistical_parity; // nullopt when a group is empty
    std::optional<double> disparate_impact;   // nullopt when undefined
};

GroupMetrics group_metrics(const NetworkParams& params, const TabularDataset& data);

struct PsSummary {
    std::size_t n = 0;
    double mean = 0.0;
    double stddev = 0.0; // population
    double min = 0.0;
    double q25 = 0.0;
    double median = 0.0;
    double q75 = 0.0;
    double max = 0.0;
};

PsSummary summarize(std::span<const double> values);

struct AuditReport {
    std::string config_digest;
    MatchSet match;
    std::vector<double> ps;                  // per test row, under (A, F)
    std::vector<SensitivityRecord> records;  // populated when requested
    std::optional<RocCurve> roc;             // nullopt when the match set is single-class
    std::string roc_note;                    // why the ROC is unavailable, if it is
    GroupMetrics classifier_metrics;
    GroupMetrics reference_metrics;
    PsSummary ps_members;
    PsSummary ps_non_members;
};

struct AuditOptions {
    bool include_records = false;
    std::size_t top_k = 5;          // per-record top features in the JSON
    std::string config_digest;      // stamped into the report
};

// Runs the full audit: per-row sensitivity under (A, F), the match set
// against the reference classifier, ROC/AUC of ps versus non-membership
// (non-member is the positive class), group metrics for both models, and ps
// summaries split by membership. Deterministic; rows are processed in order.
AuditReport audit_report(const NetworkParams& classifier,
                         const NetworkParams& reference_classifier,
                         const NetworkParams& protected_model,
                         const TabularDataset& test,
                         const AuditOptions& options = {});

std::string audit_report_to_json(const AuditReport& report,
                                 const std::vector<std::string>& column_names,
                                 const AuditOptions& options = {});

// ROC points as "fpr,tpr" CSV for external plotting.
void write_roc_csv(const RocCurve& curve, const std::filesystem::path& path);

} // namespace fairsense
