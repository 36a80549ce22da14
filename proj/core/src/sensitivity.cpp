#include "fairsense/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "fairsense/errors.hpp"

namespace fairsense {

using nlohmann::json;

std::vector<double> protected_status_weights(const NetworkParams& protected_model,
                                             std::span<const double> x) {
    InputGradient grad = input_gradient(protected_model, x);
    for (double& g : grad) g = std::abs(g);
    return grad;
}

SensitivityRecord prediction_sensitivity(const NetworkParams& protected_model,
                                         const NetworkParams& classifier,
                                         std::span<const double> x) {
    if (protected_model.spec.input_dim != classifier.spec.input_dim) {
        std::ostringstream msg;
        msg << "protected-status model expects " << protected_model.spec.input_dim
            << " inputs but the classifier expects " << classifier.spec.input_dim;
        throw ConfigError(msg.str());
    }
    SensitivityRecord record;
    record.psw = protected_status_weights(protected_model, x);
    record.pred_grad_abs = input_gradient(classifier, x);
    for (double& g : record.pred_grad_abs) g = std::abs(g);

    record.featurewise.resize(record.psw.size());
    // Fixed ascending-index accumulation keeps reports bit-reproducible.
    double ps = 0.0;
    for (std::size_t i = 0; i < record.psw.size(); ++i) {
        record.featurewise[i] = record.psw[i] * record.pred_grad_abs[i];
        ps += record.featurewise[i];
    }
    record.ps = ps;
    return record;
}

std::vector<std::pair<std::string, double>>
top_features(const SensitivityRecord& record, std::size_t k,
             const std::vector<std::string>& names) {
    const std::size_t dim = record.featurewise.size();
    if (k > dim) {
        std::ostringstream msg;
        msg << "k=" << k << " exceeds the feature count " << dim;
        throw InputError(msg.str());
    }
    if (names.size() != dim)
        throw InputError("column name count does not match the feature count");

    std::vector<std::size_t> order(dim);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return record.featurewise[a] > record.featurewise[b]; // ties keep ascending index
    });

    std::vector<std::pair<std::string, double>> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i)
        out.emplace_back(names[order[i]], record.featurewise[order[i]]);
    return out;
}

std::string record_to_json(const SensitivityRecord& record,
                           const std::vector<std::string>& names, std::size_t top_k) {
    json top = json::array();
    for (const auto& [name, value] : top_features(record, std::min(top_k, names.size()), names))
        top.push_back({{"name", name}, {"value", value}});
    json j{{"ps", record.ps},
           {"psw", record.psw},
           {"grad_abs", record.pred_grad_abs},
           {"featurewise", record.featurewise},
           {"top_features", top}};
    return j.dump();
}

} // namespace fairsense
