#include "fairsense/audit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "fairsense/errors.hpp"

namespace fairsense {

using nlohmann::json;

std::vector<std::uint8_t> hard_predictions(const NetworkParams& params,
                                           const TabularDataset& data) {
    std::vector<std::uint8_t> preds(data.n_rows());
    for (std::size_t i = 0; i < data.n_rows(); ++i)
        preds[i] = hard_prediction(forward(params, data.features.row(i))) ? 1 : 0;
    return preds;
}

MatchSet build_match_set(const NetworkParams& classifier,
                         const NetworkParams& reference_classifier,
                         const TabularDataset& test) {
    if (classifier.spec.input_dim != test.n_cols() ||
        reference_classifier.spec.input_dim != test.n_cols())
        throw ConfigError("match set: model input dimension does not match the test data");

    MatchSet set;
    set.flags.resize(test.n_rows());
    for (std::size_t i = 0; i < test.n_rows(); ++i) {
        const auto row = test.features.row(i);
        const bool same = hard_prediction(forward(classifier, row)) ==
                          hard_prediction(forward(reference_classifier, row));
        set.flags[i] = same ? 1 : 0;
        ++(same ? set.members : set.non_members);
    }
    return set;
}

RocCurve roc_curve(std::span<const double> scores,
                   const std::vector<std::uint8_t>& positives) {
    if (scores.size() != positives.size())
        throw InputError("scores and labels differ in length");
    std::size_t total_pos = 0;
    for (std::uint8_t p : positives) total_pos += p;
    const std::size_t total_neg = positives.size() - total_pos;
    if (total_pos == 0 || total_neg == 0)
        throw UndefinedMetricError(
            "AUC undefined: need at least one positive and one negative");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocCurve curve;
    curve.points.push_back({0.0, 0.0});
    std::size_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        // Tied scores advance the sweep in one step; this makes the
        // trapezoidal area equal the pairwise probability statistic exactly.
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            if (positives[order[j]]) ++tp;
            else ++fp;
            ++j;
        }
        curve.points.push_back({static_cast<double>(fp) / static_cast<double>(total_neg),
                                static_cast<double>(tp) / static_cast<double>(total_pos)});
        i = j;
    }

    double auc = 0.0;
    for (std::size_t k = 1; k < curve.points.size(); ++k) {
        const auto& a = curve.points[k - 1];
        const auto& b = curve.points[k];
        auc += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
    }
    curve.auc = auc;
    return curve;
}

namespace {

struct GroupRates {
    double rate1 = 0.0;
    double rate0 = 0.0;
};

GroupRates positive_rates(const std::vector<std::uint8_t>& preds,
                          const std::vector<std::uint8_t>& protected_flags) {
    if (preds.size() != protected_flags.size())
        throw InputError("predictions and protected flags differ in length");
    std::size_t n1 = 0, n0 = 0, pos1 = 0, pos0 = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (protected_flags[i]) {
            ++n1;
            pos1 += preds[i];
        } else {
            ++n0;
            pos0 += preds[i];
        }
    }
    if (n1 == 0 || n0 == 0)
        throw UndefinedMetricError("group metric undefined: a protected group is empty");
    return {static_cast<double>(pos1) / static_cast<double>(n1),
            static_cast<double>(pos0) / static_cast<double>(n0)};
}

} // namespace

double statistical_parity_difference(const std::vector<std::uint8_t>& preds,
                                     const std::vector<std::uint8_t>& protected_flags) {
    const GroupRates rates = positive_rates(preds, protected_flags);
    return rates.rate1 - rates.rate0;
}

double disparate_impact_ratio(const std::vector<std::uint8_t>& preds,
                              const std::vector<std::uint8_t>& protected_flags) {
    const GroupRates rates = positive_rates(preds, protected_flags);
    if (rates.rate1 == 0.0 && rates.rate0 == 0.0)
        throw UndefinedMetricError(
            "disparate impact undefined: zero positive rate in both groups");
    if (rates.rate1 == 0.0 || rates.rate0 == 0.0) return 0.0;
    return std::min(rates.rate1 / rates.rate0, rates.rate0 / rates.rate1);
}

GroupMetrics group_metrics(const NetworkParams& params, const TabularDataset& data) {
    const std::vector<std::uint8_t> preds = hard_predictions(params, data);
    const std::vector<std::uint8_t> flags = data.protected_flags();
    GroupMetrics metrics;
    try {
        metrics.statistical_parity = statistical_parity_difference(preds, flags);
    } catch (const UndefinedMetricError&) {
    }
    try {
        metrics.disparate_impact = disparate_impact_ratio(preds, flags);
    } catch (const UndefinedMetricError&) {
    }
    return metrics;
}

PsSummary summarize(std::span<const double> values) {
    PsSummary s;
    s.n = values.size();
    if (values.empty()) return s;
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    double sum = 0.0;
    for (double v : sorted) sum += v;
    s.mean = sum / static_cast<double>(s.n);
    double sq = 0.0;
    for (double v : sorted) sq += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(s.n));
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(sorted.size() - 1);
        const auto lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
    };
    s.min = sorted.front();
    s.q25 = quantile(0.25);
    s.median = quantile(0.5);
    s.q75 = quantile(0.75);
    s.max = sorted.back();
    return s;
}

AuditReport audit_report(const NetworkParams& classifier,
                         const NetworkParams& reference_classifier,
                         const NetworkParams& protected_model,
                         const TabularDataset& test, const AuditOptions& options) {
    if (protected_model.spec.input_dim != classifier.spec.input_dim)
        throw ConfigError("audit: protected-status model and classifier disagree on input dim");
    AuditReport report;
    report.config_digest = options.config_digest;
    report.match = build_match_set(classifier, reference_classifier, test);

    report.ps.reserve(test.n_rows());
    for (std::size_t i = 0; i < test.n_rows(); ++i) {
        SensitivityRecord record =
            prediction_sensitivity(protected_model, classifier, test.features.row(i));
        report.ps.push_back(record.ps);
        if (options.include_records) report.records.push_back(std::move(record));
    }

    // The distinguisher's positive class is "non-member" (suspected unfair
    // prediction), so high ps should score high.
    std::vector<std::uint8_t> non_member(test.n_rows());
    for (std::size_t i = 0; i < test.n_rows(); ++i) non_member[i] = report.match.flags[i] ? 0 : 1;
    try {
        report.roc = roc_curve(report.ps, non_member);
    } catch (const UndefinedMetricError& e) {
        report.roc_note = e.what();
    }

    report.classifier_metrics = group_metrics(classifier, test);
    report.reference_metrics = group_metrics(reference_classifier, test);

    std::vector<double> member_ps, non_member_ps;
    for (std::size_t i = 0; i < test.n_rows(); ++i)
        (report.match.flags[i] ? member_ps : non_member_ps).push_back(report.ps[i]);
    report.ps_members = summarize(member_ps);
    report.ps_non_members = summarize(non_member_ps);
    return report;
}

namespace {

json summary_json(const PsSummary& s) {
    return json{{"n", s.n},     {"mean", s.mean}, {"stddev", s.stddev},
                {"min", s.min}, {"q25", s.q25},   {"median", s.median},
                {"q75", s.q75}, {"max", s.max}};
}

json metrics_json(const GroupMetrics& m) {
    json j;
    j["statistical_parity"] =
        m.statistical_parity ? json(*m.statistical_parity) : json(nullptr);
    j["disparate_impact"] =
        m.disparate_impact ? json(*m.disparate_impact) : json(nullptr);
    return j;
}

} // namespace

std::string audit_report_to_json(const AuditReport& report,
                                 const std::vector<std::string>& column_names,
                                 const AuditOptions& options) {
    json j;
    j["format"] = "fairsense-audit";
    j["version"] = 1;
    j["config_digest"] = report.config_digest;
    j["rows"] = report.ps.size();
    j["match"] = {{"members", report.match.members},
                  {"non_members", report.match.non_members}};
    if (report.roc) {
        j["auc"] = report.roc->auc;
        json points = json::array();
        for (const RocPoint& p : report.roc->points) points.push_back({p.fpr, p.tpr});
        j["roc"] = points;
    } else {
        j["auc"] = nullptr;
        j["roc_note"] = report.roc_note;
    }
    j["group_metrics"] = {{"classifier", metrics_json(report.classifier_metrics)},
                          {"reference", metrics_json(report.reference_metrics)}};
    j["ps_summary"] = {{"members", summary_json(report.ps_members)},
                       {"non_members", summary_json(report.ps_non_members)}};
    if (options.include_records) {
        json records = json::array();
        for (std::size_t i = 0; i < report.records.size(); ++i) {
            json r = json::parse(
                record_to_json(report.records[i], column_names, options.top_k));
            r["row_id"] = i;
            r["member"] = report.match.flags[i] != 0;
            records.push_back(std::move(r));
        }
        j["records"] = std::move(records);
    }
    return j.dump(2) + "\n";
}

void write_roc_csv(const RocCurve& curve, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write ROC CSV " + path.string());
    out << "fpr,tpr\n";
    char buf[64];
    for (const RocPoint& p : curve.points) {
        auto [p1, ec1] = std::to_chars(buf, buf + sizeof(buf), p.fpr);
        out.write(buf, p1 - buf);
        out.put(',');
        auto [p2, ec2] = std::to_chars(buf, buf + sizeof(buf), p.tpr);
        out.write(buf, p2 - buf);
        out.put('\n');
    }
}

} // namespace fairsense
