#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "fairsense/data.hpp"
#include "fairsense/nn.hpp"

namespace fairsense {

// ---------------------------------------------------------------------------
// Model persistence: a versioned JSON document holding the network spec,
// row-major weights and biases, training metadata, and (when the model was
// trained through the CLI) the frozen encoder. Weights are written with
// 17 significant digits, which round-trips doubles bit-exactly.
// ---------------------------------------------------------------------------

struct TrainingMeta {
    TrainConfig config;
    std::string target;        // "label" or "protected"
    double final_loss = 0.0;
    std::string config_digest; // digest of the run configuration
};

struct ModelFile {
    NetworkParams params;
    std::optional<TrainingMeta> training;
    std::optional<Encoder> encoder; // frozen training-split encoding
};

std::string model_to_json_string(const ModelFile& model);
ModelFile model_from_json_string(const std::string& json_text);

void save_model(const ModelFile& model, const std::filesystem::path& path);
ModelFile load_model(const std::filesystem::path& path);

// Content digest of the model function (spec + layers + encoder when
// present). Training metadata does not participate, so re-saving a model
// with different bookkeeping keeps its identity.
std::string model_digest(const ModelFile& model);
std::string model_digest(const NetworkParams& params);

} // namespace fairsense
