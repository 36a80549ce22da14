#include "fairsense/synthetic.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fairsense/errors.hpp"
#include "fairsense/rng.hpp"

namespace fairsense {

using nlohmann::json;

void CausalModelSpec::validate() const {
    if (n_samples == 0) throw InputError("n_samples must be >= 1");
    if (!(class_stddev > 0.0)) throw InputError("class_stddev must be > 0");
    if (negative_mean == positive_mean)
        throw InputError("class means must be distinct");
    if (bias) {
        auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
        if (!in_unit(bias->p_protected_given_positive) ||
            !in_unit(bias->p_protected_given_negative))
            throw InputError("bias probabilities must be in [0, 1]");
    }
}

CausalModelSpec CausalModelSpec::parse(const std::string& json_text) {
    json j = json::parse(json_text, nullptr, false);
    if (j.is_discarded()) throw InputError("synthetic spec is not valid JSON");
    CausalModelSpec spec;
    try {
        spec.n_samples = j.at("n_samples").get<std::size_t>();
        if (j.contains("negative_mean"))
            spec.negative_mean = j["negative_mean"].get<std::array<double, 2>>();
        if (j.contains("positive_mean"))
            spec.positive_mean = j["positive_mean"].get<std::array<double, 2>>();
        if (j.contains("class_stddev")) spec.class_stddev = j["class_stddev"].get<double>();
        if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("bias") && !j["bias"].is_null()) {
            BiasSpec b;
            b.p_protected_given_positive =
                j["bias"].value("p_protected_given_positive", 0.25);
            b.p_protected_given_negative =
                j["bias"].value("p_protected_given_negative", 0.75);
            spec.bias = b;
        }
    } catch (const json::exception& e) {
        std::ostringstream msg;
        msg << "malformed synthetic spec: " << e.what();
        throw InputError(msg.str());
    }
    spec.validate();
    return spec;
}

CausalModelSpec CausalModelSpec::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open synthetic spec " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

std::string CausalModelSpec::to_json_string() const {
    json j{{"n_samples", n_samples},
           {"negative_mean", negative_mean},
           {"positive_mean", positive_mean},
           {"class_stddev", class_stddev},
           {"seed", seed}};
    if (bias) {
        j["bias"] = {{"p_protected_given_positive", bias->p_protected_given_positive},
                     {"p_protected_given_negative", bias->p_protected_given_negative}};
    }
    return j.dump(2) + "\n";
}

Schema synthetic_schema() {
    Schema schema;
    schema.columns = {{"feature_0", ColumnKind::Numeric, {}, {}},
                      {"feature_1", ColumnKind::Numeric, {}, {}},
                      {"protected", ColumnKind::Binary, {}, "1"}};
    schema.label_column = "label";
    schema.positive_label_value = "1";
    schema.protected_column = "protected";
    schema.protected_one_value = "1";
    return schema;
}

TabularDataset generate_fair_synthetic(const CausalModelSpec& spec) {
    spec.validate();
    if (spec.bias)
        throw InputError("generate_fair_synthetic requires a spec without bias");

    TabularDataset data;
    data.columns = {{"feature_0", ColumnKind::Numeric, {}},
                    {"feature_1", ColumnKind::Numeric, {}},
                    {"protected", ColumnKind::Binary, {}}};
    data.protected_index = 2;
    data.provenance = Provenance::FairSynthetic;
    data.features = Matrix(spec.n_samples, 3);
    data.labels.resize(spec.n_samples);

    // Per-row draw order is fixed (label, x0, x1, protected) so datasets are
    // reproducible from the seed alone.
    Rng rng(spec.seed);
    for (std::size_t i = 0; i < spec.n_samples; ++i) {
        const bool positive = rng.bernoulli(0.5);
        const auto& mean = positive ? spec.positive_mean : spec.negative_mean;
        data.labels[i] = positive ? 1 : 0;
        data.features.at(i, 0) = rng.normal(mean[0], spec.class_stddev);
        data.features.at(i, 1) = rng.normal(mean[1], spec.class_stddev);
        data.features.at(i, 2) = rng.bernoulli(0.5) ? 1.0 : 0.0;
    }
    return data;
}

TabularDataset inject_label_bias(const TabularDataset& data, double p_pos, double p_neg,
                                 std::uint64_t seed) {
    if (data.provenance != Provenance::FairSynthetic)
        throw InputError("inject_label_bias expects fair-synthetic data");
    if (!(p_pos >= 0.0 && p_pos <= 1.0 && p_neg >= 0.0 && p_neg <= 1.0))
        throw InputError("bias probabilities must be in [0, 1]");

    TabularDataset out = data;
    out.provenance = Provenance::BiasedSynthetic;
    Rng rng(seed);
    for (std::size_t i = 0; i < out.n_rows(); ++i) {
        const double p = out.labels[i] ? p_pos : p_neg;
        out.features.at(i, out.protected_index) = rng.bernoulli(p) ? 1.0 : 0.0;
    }
    return out;
}

TabularDataset generate_synthetic(const CausalModelSpec& spec) {
    spec.validate();
    CausalModelSpec fair = spec;
    fair.bias.reset();
    TabularDataset data = generate_fair_synthetic(fair);
    if (spec.bias) {
        data = inject_label_bias(data, spec.bias->p_protected_given_positive,
                                 spec.bias->p_protected_given_negative,
                                 derive_seed(spec.seed, /*stream=*/1));
    }
    return data;
}

} // namespace fairsense
