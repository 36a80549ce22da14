#include "fairsense/model_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fairsense/digest.hpp"
#include "fairsense/errors.hpp"

namespace fairsense {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

json params_to_json(const NetworkParams& params) {
    json layers = json::array();
    for (const Layer& layer : params.layers) {
        layers.push_back({{"out_dim", layer.out_dim},
                          {"in_dim", layer.in_dim},
                          {"weights", layer.weights},
                          {"bias", layer.bias}});
    }
    return json{{"spec",
                 {{"input_dim", params.spec.input_dim},
                  {"hidden_widths", params.spec.hidden_widths},
                  {"hidden_activation", "relu"},
                  {"output_activation", "sigmoid"},
                  {"seed", params.spec.seed}}},
                {"layers", layers}};
}

NetworkParams params_from_json(const json& j) {
    NetworkParams params;
    const json& spec = j.at("spec");
    params.spec.input_dim = spec.at("input_dim").get<std::size_t>();
    params.spec.hidden_widths = spec.at("hidden_widths").get<std::vector<std::size_t>>();
    params.spec.seed = spec.at("seed").get<std::uint64_t>();
    if (spec.value("hidden_activation", "relu") != std::string("relu") ||
        spec.value("output_activation", "sigmoid") != std::string("sigmoid"))
        throw ConfigError("model file uses an unsupported activation");
    for (const json& jl : j.at("layers")) {
        Layer layer;
        layer.out_dim = jl.at("out_dim").get<std::size_t>();
        layer.in_dim = jl.at("in_dim").get<std::size_t>();
        layer.weights = jl.at("weights").get<std::vector<double>>();
        layer.bias = jl.at("bias").get<std::vector<double>>();
        if (layer.weights.size() != layer.out_dim * layer.in_dim ||
            layer.bias.size() != layer.out_dim)
            throw ConfigError("model file layer dimensions are inconsistent");
        params.layers.push_back(std::move(layer));
    }
    // layers must realize the declared architecture
    std::vector<std::size_t> dims;
    dims.push_back(params.spec.input_dim);
    dims.insert(dims.end(), params.spec.hidden_widths.begin(),
                params.spec.hidden_widths.end());
    dims.push_back(1);
    if (params.layers.size() + 1 != dims.size())
        throw ConfigError("model file layer count does not match its spec");
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        if (params.layers[l].in_dim != dims[l] || params.layers[l].out_dim != dims[l + 1])
            throw ConfigError("model file layer shapes do not match its spec");
    }
    if (!params.all_finite()) throw ConfigError("model file contains non-finite values");
    return params;
}

// The digest covers the function the model computes (spec + layers), so a
// baseline stamped from a model file matches one stamped from bare
// parameters. dump() emits doubles with shortest round-trip formatting, so
// equal models digest equally.
std::string digest_payload(const NetworkParams& params) {
    return params_to_json(params).dump();
}

} // namespace

std::string model_to_json_string(const ModelFile& model) {
    json j = params_to_json(model.params);
    j["format"] = "fairsense-model";
    j["version"] = kFormatVersion;
    j["precision"] = 17; // significant digits for weight round-trip
    if (model.training) {
        const TrainingMeta& t = *model.training;
        j["training"] = {{"learning_rate", t.config.learning_rate},
                         {"epochs", t.config.epochs},
                         {"batch_size", t.config.batch_size},
                         {"adam_beta1", t.config.adam_beta1},
                         {"adam_beta2", t.config.adam_beta2},
                         {"adam_epsilon", t.config.adam_epsilon},
                         {"shuffle_seed", t.config.shuffle_seed},
                         {"target", t.target},
                         {"final_loss", t.final_loss},
                         {"config_digest", t.config_digest}};
    }
    if (model.encoder) j["encoder"] = json::parse(model.encoder->to_json_string());
    j["digest"] = digest_hex(digest_payload(model.params));
    return j.dump(2) + "\n";
}

ModelFile model_from_json_string(const std::string& json_text) {
    json j = json::parse(json_text, nullptr, false);
    if (j.is_discarded()) throw ConfigError("model file is not valid JSON");
    if (j.value("format", "") != std::string("fairsense-model"))
        throw ConfigError("not a fairsense model file");
    if (j.value("version", 0) != kFormatVersion)
        throw ConfigError("unsupported model file version");
    ModelFile model;
    try {
        model.params = params_from_json(j);
        if (j.contains("training")) {
            const json& t = j["training"];
            TrainingMeta meta;
            meta.config.learning_rate = t.at("learning_rate").get<double>();
            meta.config.epochs = t.at("epochs").get<std::size_t>();
            meta.config.batch_size = t.at("batch_size").get<std::size_t>();
            meta.config.adam_beta1 = t.at("adam_beta1").get<double>();
            meta.config.adam_beta2 = t.at("adam_beta2").get<double>();
            meta.config.adam_epsilon = t.at("adam_epsilon").get<double>();
            meta.config.shuffle_seed = t.at("shuffle_seed").get<std::uint64_t>();
            meta.target = t.at("target").get<std::string>();
            meta.final_loss = t.at("final_loss").get<double>();
            meta.config_digest = t.value("config_digest", "");
            model.training = std::move(meta);
        }
        if (j.contains("encoder")) model.encoder = Encoder::parse(j["encoder"].dump());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed model file: ") + e.what());
    }
    return model;
}

void save_model(const ModelFile& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write model file " + path.string());
    out << model_to_json_string(model);
}

ModelFile load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open model file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return model_from_json_string(buffer.str());
}

std::string model_digest(const ModelFile& model) {
    return model_digest(model.params);
}

std::string model_digest(const NetworkParams& params) {
    return digest_hex(digest_payload(params));
}

} // namespace fairsense
