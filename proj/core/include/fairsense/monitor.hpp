#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fairsense/audit.hpp"
#include "fairsense/model_io.hpp"

namespace fairsense {

// ---------------------------------------------------------------------------
// Deployment-time monitor: a baseline (mean/std of prediction sensitivity
// over a reference set) is computed at training time; live predictions whose
// sensitivity exceeds mean + k*std raise an alarm.
// ---------------------------------------------------------------------------

struct Baseline {
    double mean_ps = 0.0;
    double std_ps = 0.0; // population standard deviation
    std::size_t n = 0;
    std::string classifier_digest;
    std::string protected_model_digest;
    std::string config_digest;

    double threshold(double k_sigma) const { return mean_ps + k_sigma * std_ps; }

    static Baseline parse(const std::string& json_text);
    static Baseline load(const std::filesystem::path& path);
    std::string to_json_string() const;
    void save(const std::filesystem::path& path) const;
};

enum class Verdict { Ok, Alarm };

struct AlarmEvent {
    std::size_t row_id = 0;
    double probability = 0.0;
    bool prediction = false;
    double ps = 0.0;
    double threshold_used = 0.0;
    Verdict verdict = Verdict::Ok;
    std::vector<std::pair<std::string, double>> top_features; // filled on alarm
    std::string error; // non-empty: the row failed and no score was produced
};

// Mean and population std of ps over the reference rows, stamped with both
// model digests. Empty reference is an InputError.
Baseline compute_baseline(const NetworkParams& classifier,
                          const NetworkParams& protected_model,
                          const TabularDataset& reference);

// Alarm iff ps > mean + k_sigma * std.
Verdict check(double ps, const Baseline& baseline, double k_sigma = 3.0);

struct MonitorConfig {
    double k_sigma = 3.0;
    std::size_t top_k = 5; // feature attributions attached to alarms
};

// Scores rows one at a time against a fixed (classifier, protected model,
// baseline) triple. Construction fails with ConfigError if the baseline's
// digests do not match the models; after that no event is ever emitted.
class Monitor {
public:
    Monitor(NetworkParams classifier, NetworkParams protected_model, Baseline baseline,
            MonitorConfig config = {});

    AlarmEvent score(std::size_t row_id, std::span<const double> encoded_row,
                     const std::vector<std::string>& column_names) const;

    const Baseline& baseline() const { return baseline_; }
    double threshold() const { return baseline_.threshold(config_.k_sigma); }
    const MonitorConfig& config() const { return config_; }

private:
    NetworkParams classifier_;
    NetworkParams protected_model_;
    Baseline baseline_;
    MonitorConfig config_;
};

enum class StreamFormat { Ndjson, Csv };

struct StreamStats {
    std::size_t rows = 0;
    std::size_t alarms = 0;
    std::size_t errors = 0;
};

// Reads raw rows (newline-delimited JSON objects keyed by column name, or
// CSV with a header), encodes them with the frozen encoder, and writes one
// JSON event per row to `out` in input order. Malformed rows produce an
// error event and the stream continues.
StreamStats monitor_stream(const Monitor& monitor, const Encoder& encoder,
                           std::istream& in, StreamFormat format, std::ostream& out);

// Scores already-encoded rows; used by tests and the synthetic pipeline.
StreamStats monitor_encoded(const Monitor& monitor, const TabularDataset& rows,
                            std::ostream& out);

std::string event_to_json(const AlarmEvent& event);

} // namespace fairsense
