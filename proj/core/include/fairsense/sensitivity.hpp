#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fairsense/nn.hpp"

namespace fairsense {

// ---------------------------------------------------------------------------
// Prediction sensitivity: protected-status feature weights (PSW), the scalar
// sensitivity score (PS), and the feature-wise breakdown used for diagnosis.
//
//   psw[i]         = |d A(x) / d x_i|
//   featurewise[i] = psw[i] * |d F(x) / d x_i|
//   ps             = sum_i featurewise[i]   (ascending index order)
// ---------------------------------------------------------------------------

struct SensitivityRecord {
    std::vector<double> psw;           // |grad A(x)|
    std::vector<double> pred_grad_abs; // |grad F(x)|
    std::vector<double> featurewise;   // element-wise product
    double ps = 0.0;
};

// Element-wise absolute value of A's input gradient.
std::vector<double> protected_status_weights(const NetworkParams& protected_model,
                                             std::span<const double> x);

// Full record for one example. A and F must share the input dimension;
// mismatch is a ConfigError.
SensitivityRecord prediction_sensitivity(const NetworkParams& protected_model,
                                         const NetworkParams& classifier,
                                         std::span<const double> x);

// The k largest feature-wise contributions, descending, ties broken by
// ascending column index. k == 0 gives an empty list; k > input_dim is an
// InputError.
std::vector<std::pair<std::string, double>>
top_features(const SensitivityRecord& record, std::size_t k,
             const std::vector<std::string>& names);

// One JSON object per example: {ps, psw, grad_abs, featurewise, top_features}.
std::string record_to_json(const SensitivityRecord& record,
                           const std::vector<std::string>& names, std::size_t top_k);

} // namespace fairsense
