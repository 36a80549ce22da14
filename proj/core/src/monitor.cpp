#include "fairsense/monitor.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "fairsense/errors.hpp"

namespace fairsense {

using nlohmann::json;

Baseline Baseline::parse(const std::string& json_text) {
    json j = json::parse(json_text, nullptr, false);
    if (j.is_discarded()) throw ConfigError("baseline file is not valid JSON");
    if (j.value("format", "") != std::string("fairsense-baseline"))
        throw ConfigError("not a fairsense baseline file");
    Baseline b;
    try {
        b.mean_ps = j.at("mean_ps").get<double>();
        b.std_ps = j.at("std_ps").get<double>();
        b.n = j.at("n").get<std::size_t>();
        b.classifier_digest = j.at("classifier_digest").get<std::string>();
        b.protected_model_digest = j.at("protected_model_digest").get<std::string>();
        b.config_digest = j.value("config_digest", "");
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed baseline: ") + e.what());
    }
    return b;
}

Baseline Baseline::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open baseline file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

std::string Baseline::to_json_string() const {
    json j{{"format", "fairsense-baseline"},
           {"version", 1},
           {"mean_ps", mean_ps},
           {"std_ps", std_ps},
           {"n", n},
           {"classifier_digest", classifier_digest},
           {"protected_model_digest", protected_model_digest},
           {"config_digest", config_digest}};
    return j.dump(2) + "\n";
}

void Baseline::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write baseline file " + path.string());
    out << to_json_string();
}

Baseline compute_baseline(const NetworkParams& classifier,
                          const NetworkParams& protected_model,
                          const TabularDataset& reference) {
    if (reference.n_rows() == 0)
        throw InputError("baseline needs a non-empty reference set");
    double sum = 0.0;
    std::vector<double> ps_values;
    ps_values.reserve(reference.n_rows());
    for (std::size_t i = 0; i < reference.n_rows(); ++i) {
        const SensitivityRecord record =
            prediction_sensitivity(protected_model, classifier, reference.features.row(i));
        ps_values.push_back(record.ps);
        sum += record.ps;
    }
    Baseline b;
    b.n = reference.n_rows();
    b.mean_ps = sum / static_cast<double>(b.n);
    double sq = 0.0;
    for (double v : ps_values) sq += (v - b.mean_ps) * (v - b.mean_ps);
    b.std_ps = std::sqrt(sq / static_cast<double>(b.n)); // population std
    b.classifier_digest = model_digest(classifier);
    b.protected_model_digest = model_digest(protected_model);
    return b;
}

Verdict check(double ps, const Baseline& baseline, double k_sigma) {
    return ps > baseline.threshold(k_sigma) ? Verdict::Alarm : Verdict::Ok;
}

Monitor::Monitor(NetworkParams classifier, NetworkParams protected_model, Baseline baseline,
                 MonitorConfig config)
    : classifier_(std::move(classifier)),
      protected_model_(std::move(protected_model)),
      baseline_(std::move(baseline)),
      config_(config) {
    if (model_digest(classifier_) != baseline_.classifier_digest)
        throw ConfigError("baseline was computed from a different classifier "
                          "(digest mismatch); refusing to monitor");
    if (model_digest(protected_model_) != baseline_.protected_model_digest)
        throw ConfigError("baseline was computed from a different protected-status "
                          "model (digest mismatch); refusing to monitor");
}

AlarmEvent Monitor::score(std::size_t row_id, std::span<const double> encoded_row,
                          const std::vector<std::string>& column_names) const {
    AlarmEvent event;
    event.row_id = row_id;
    event.threshold_used = threshold();
    const SensitivityRecord record =
        prediction_sensitivity(protected_model_, classifier_, encoded_row);
    event.probability = forward(classifier_, encoded_row);
    event.prediction = hard_prediction(event.probability);
    event.ps = record.ps;
    event.verdict = check(record.ps, baseline_, config_.k_sigma);
    if (event.verdict == Verdict::Alarm) {
        const std::size_t k = std::min(config_.top_k, column_names.size());
        event.top_features = top_features(record, k, column_names);
    }
    return event;
}

std::string event_to_json(const AlarmEvent& event) {
    json j;
    j["row_id"] = event.row_id;
    if (!event.error.empty()) {
        j["error"] = event.error;
        return j.dump();
    }
    j["probability"] = event.probability;
    j["prediction"] = event.prediction ? 1 : 0;
    j["ps"] = event.ps;
    j["verdict"] = event.verdict == Verdict::Alarm ? "alarm" : "ok";
    j["threshold"] = event.threshold_used;
    if (event.verdict == Verdict::Alarm) {
        json top = json::array();
        for (const auto& [name, value] : event.top_features)
            top.push_back({{"name", name}, {"value", value}});
        j["top_features"] = std::move(top);
    }
    return j.dump();
}

namespace {

// Converts one NDJSON object into (column, cell-text) pairs. Numbers keep
// their shortest round-trip form via dump(); strings pass through unquoted.
std::vector<std::pair<std::string, std::string>> cells_from_json(const json& row) {
    std::vector<std::pair<std::string, std::string>> cells;
    for (const auto& [key, value] : row.items()) {
        if (value.is_string()) cells.emplace_back(key, value.get<std::string>());
        else cells.emplace_back(key, value.dump());
    }
    return cells;
}

} // namespace

StreamStats monitor_stream(const Monitor& monitor, const Encoder& encoder,
                           std::istream& in, StreamFormat format, std::ostream& out) {
    StreamStats stats;
    const std::vector<std::string> names = [&] {
        std::vector<std::string> n;
        for (const EncodedColumn& c : encoder.encoded_columns()) n.push_back(c.name);
        return n;
    }();

    std::vector<std::string> csv_header;
    std::string line;
    std::size_t row_id = 0;
    bool saw_csv_header = false;

    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        if (format == StreamFormat::Csv && !saw_csv_header) {
            std::stringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ',')) {
                while (!cell.empty() && (cell.front() == ' ')) cell.erase(cell.begin());
                while (!cell.empty() && (cell.back() == ' ')) cell.pop_back();
                csv_header.push_back(cell);
            }
            saw_csv_header = true;
            continue;
        }

        AlarmEvent event;
        event.row_id = row_id;
        try {
            std::vector<std::pair<std::string, std::string>> cells;
            if (format == StreamFormat::Ndjson) {
                json j = json::parse(line, nullptr, false);
                if (j.is_discarded() || !j.is_object())
                    throw DataError("line is not a JSON object");
                cells = cells_from_json(j);
            } else {
                std::stringstream ss(line);
                std::string cell;
                std::size_t i = 0;
                while (std::getline(ss, cell, ',')) {
                    if (i >= csv_header.size()) throw DataError("row has too many cells");
                    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
                    while (!cell.empty() && cell.back() == ' ') cell.pop_back();
                    cells.emplace_back(csv_header[i], cell);
                    ++i;
                }
            }
            const std::vector<double> encoded = encoder.encode_row(cells);
            event = monitor.score(row_id, encoded, names);
        } catch (const Error& e) {
            event.error = e.what();
        }

        out << event_to_json(event) << '\n';
        ++stats.rows;
        if (!event.error.empty()) ++stats.errors;
        else if (event.verdict == Verdict::Alarm) ++stats.alarms;
        ++row_id;
    }
    return stats;
}

StreamStats monitor_encoded(const Monitor& monitor, const TabularDataset& rows,
                            std::ostream& out) {
    StreamStats stats;
    const std::vector<std::string> names = rows.column_names();
    for (std::size_t i = 0; i < rows.n_rows(); ++i) {
        const AlarmEvent event = monitor.score(i, rows.features.row(i), names);
        out << event_to_json(event) << '\n';
        ++stats.rows;
        if (event.verdict == Verdict::Alarm) ++stats.alarms;
    }
    return stats;
}

} // namespace fairsense
