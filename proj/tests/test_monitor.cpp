#include <doctest.h>

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "fairsense/audit.hpp"
#include "fairsense/errors.hpp"
#include "fairsense/monitor.hpp"
#include "fairsense/rng.hpp"
#include "fairsense/synthetic.hpp"
#include "oracles.hpp"

using namespace fairsense;
using nlohmann::json;

namespace {

// Two-input network with a single gating hidden unit h = relu(x0) and an
// output unit v*h + c. With c = -v*5 the pre-activation is 0 at x0 = 5, so
// the input gradient there is exactly [v/4, 0]; at x0 = -5 the gate is dead
// and the gradient is exactly zero.
NetworkParams gated_model(double v) {
    NetworkParams params;
    params.spec.input_dim = 2;
    params.spec.hidden_widths = {1};
    params.layers.resize(2);
    params.layers[0] = {1, 2, {1.0, 0.0}, {0.0}};
    params.layers[1] = {1, 1, {v}, {-v * 5.0}};
    return params;
}

TabularDataset two_row_reference() {
    TabularDataset data;
    data.columns = {{"x0", ColumnKind::Numeric, {}}, {"protected", ColumnKind::Binary, {}}};
    data.protected_index = 1;
    data.features = Matrix(2, 2);
    data.features.at(0, 0) = 5.0;  // ps = 2 here
    data.features.at(1, 0) = -5.0; // ps = 0 here
    data.labels = {1, 0};
    return data;
}

NetworkParams zero_model(std::size_t input_dim) {
    NetworkParams params;
    params.spec.input_dim = input_dim;
    Layer layer;
    layer.out_dim = 1;
    layer.in_dim = input_dim;
    layer.weights.assign(input_dim, 0.0);
    layer.bias = {0.0};
    params.layers.push_back(std::move(layer));
    return params;
}

struct TrainedSetup {
    NetworkParams classifier;
    NetworkParams reference;
    NetworkParams protected_model;
    TabularDataset train;
    TabularDataset test;
};

TrainedSetup trained_synthetic(std::uint64_t seed) {
    CausalModelSpec spec;
    spec.n_samples = 2000;
    spec.seed = seed;
    const TabularDataset biased =
        inject_label_bias(generate_fair_synthetic(spec), 0.25, 0.75, seed + 100);
    auto [train_rows, test_rows] = train_test_split(biased, 0.2, seed + 200);

    CausalModelSpec fair_spec = spec;
    fair_spec.seed = seed + 300;
    const TabularDataset fair_train =
        train_test_split(generate_fair_synthetic(fair_spec), 0.2, seed + 400).first;

    NetworkSpec net;
    net.input_dim = 3;
    net.hidden_widths = {8};
    TrainConfig cfg;
    cfg.epochs = 10;

    TrainedSetup setup;
    net.seed = seed + 1;
    cfg.shuffle_seed = seed + 2;
    setup.classifier = train(init_network(net), train_rows, cfg, TrainTarget::Label);
    net.seed = seed + 3;
    cfg.shuffle_seed = seed + 4;
    setup.reference = train(init_network(net), fair_train, cfg, TrainTarget::Label);
    net.seed = seed + 5;
    cfg.shuffle_seed = seed + 6;
    setup.protected_model =
        train(init_network(net), train_rows, cfg, TrainTarget::ProtectedAttribute);
    setup.train = std::move(train_rows);
    setup.test = std::move(test_rows);
    return setup;
}

} // namespace

TEST_SUITE("monitor") {

TEST_CASE("baseline of a zero-weight protected model is exactly zero") {
    CausalModelSpec spec;
    spec.n_samples = 25;
    spec.seed = 6;
    const TabularDataset reference = generate_fair_synthetic(spec);
    Rng rng(7);
    const NetworkParams f = oracles::random_network(rng, 3, {4});
    const Baseline baseline = compute_baseline(f, zero_model(3), reference);
    CHECK(baseline.mean_ps == 0.0);
    CHECK(baseline.std_ps == 0.0);
    CHECK(baseline.n == 25);
}

TEST_CASE("baseline over hand-set ps values {0, 2} has mean 1 and std 1") {
    const Baseline baseline =
        compute_baseline(gated_model(8.0), gated_model(4.0), two_row_reference());
    CHECK(baseline.mean_ps == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(baseline.std_ps == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("baseline is bit-identical across runs") {
    const TrainedSetup setup = trained_synthetic(12);
    const Baseline a =
        compute_baseline(setup.classifier, setup.protected_model, setup.test);
    const Baseline b =
        compute_baseline(setup.classifier, setup.protected_model, setup.test);
    CHECK(a.to_json_string() == b.to_json_string());
}

TEST_CASE("empty reference set is an input error") {
    TabularDataset empty;
    empty.columns = {{"x", ColumnKind::Numeric, {}}, {"p", ColumnKind::Binary, {}}};
    empty.protected_index = 1;
    empty.features = Matrix(0, 2);
    CHECK_THROWS_AS(compute_baseline(zero_model(2), zero_model(2), empty), InputError);
}

TEST_CASE("check alarms strictly above mean + k sigma") {
    Baseline baseline;
    baseline.mean_ps = 1.0;
    baseline.std_ps = 0.5;
    CHECK(check(1.0, baseline, 3.0) == Verdict::Ok);
    CHECK(check(1.0 + 3.5 * 0.5, baseline, 3.0) == Verdict::Alarm);
    CHECK(check(2.5, baseline, 3.0) == Verdict::Ok); // exactly the threshold

    Baseline tight;
    tight.mean_ps = 1.0;
    tight.std_ps = 0.0;
    CHECK(check(1.0, tight, 3.0) == Verdict::Ok);
    CHECK(check(1.0 + 1e-12, tight, 3.0) == Verdict::Alarm);
}

TEST_CASE("alarms are monotone in k_sigma") {
    Baseline baseline;
    baseline.mean_ps = 0.4;
    baseline.std_ps = 0.2;
    Rng rng(9);
    for (int i = 0; i < 200; ++i) {
        const double ps = rng.uniform(0.0, 2.0);
        for (double k = 1.0; k < 4.0; k += 1.0) {
            if (check(ps, baseline, k) == Verdict::Ok)
                CHECK(check(ps, baseline, k + 1.0) == Verdict::Ok);
        }
    }
}

TEST_CASE("a digest mismatch stops the monitor before any event") {
    const TrainedSetup setup = trained_synthetic(13);
    const Baseline baseline =
        compute_baseline(setup.classifier, setup.protected_model, setup.test);
    // wrong classifier: reference model instead of the audited one
    CHECK_THROWS_AS(Monitor(setup.reference, setup.protected_model, baseline),
                    ConfigError);
    CHECK_THROWS_AS(Monitor(setup.classifier, setup.reference, baseline), ConfigError);
}

TEST_CASE("an empty stream produces an empty output") {
    const Baseline baseline =
        compute_baseline(gated_model(8.0), gated_model(4.0), two_row_reference());
    const Monitor monitor(gated_model(8.0), gated_model(4.0), baseline);
    TabularDataset empty = two_row_reference();
    empty.features = Matrix(0, 2);
    empty.labels.clear();
    std::ostringstream out;
    const StreamStats stats = monitor_encoded(monitor, empty, out);
    CHECK(stats.rows == 0);
    CHECK(out.str().empty());
}

TEST_CASE("events keep input order and satisfy their own verdict rule") {
    const TrainedSetup setup = trained_synthetic(14);
    const Baseline baseline =
        compute_baseline(setup.classifier, setup.protected_model, setup.test);
    const Monitor monitor(setup.classifier, setup.protected_model, baseline,
                          MonitorConfig{1.0, 5});
    std::ostringstream out;
    monitor_encoded(monitor, setup.test, out);

    std::istringstream lines(out.str());
    std::string line;
    std::size_t row = 0;
    while (std::getline(lines, line)) {
        const json event = json::parse(line);
        CHECK(event.at("row_id") == row);
        const bool alarm = event.at("verdict") == "alarm";
        CHECK(alarm == (event.at("ps").get<double>() >
                        event.at("threshold").get<double>()));
        if (alarm) CHECK(event.contains("top_features"));
        ++row;
    }
    CHECK(row == setup.test.n_rows());
}

TEST_CASE("identical streams produce identical event sequences") {
    const TrainedSetup setup = trained_synthetic(16);
    const Baseline baseline =
        compute_baseline(setup.classifier, setup.protected_model, setup.test);
    const Monitor monitor(setup.classifier, setup.protected_model, baseline,
                          MonitorConfig{2.0, 5});
    std::ostringstream first, second;
    monitor_encoded(monitor, setup.test, first);
    monitor_encoded(monitor, setup.test, second);
    CHECK(first.str() == second.str());
}

TEST_CASE("alarm recall is higher on match-set non-members") {
    const TrainedSetup setup = trained_synthetic(15);
    const MatchSet match = build_match_set(setup.classifier, setup.reference, setup.test);
    REQUIRE(match.non_members > 0);

    const Baseline baseline =
        compute_baseline(setup.classifier, setup.protected_model, setup.test);
    const Monitor monitor(setup.classifier, setup.protected_model, baseline,
                          MonitorConfig{1.0, 5});

    std::size_t alarms_members = 0, alarms_non_members = 0;
    const auto names = setup.test.column_names();
    for (std::size_t i = 0; i < setup.test.n_rows(); ++i) {
        const AlarmEvent event = monitor.score(i, setup.test.features.row(i), names);
        if (event.verdict == Verdict::Alarm)
            ++(match.flags[i] ? alarms_members : alarms_non_members);
    }
    const double recall_members =
        static_cast<double>(alarms_members) / static_cast<double>(match.members);
    const double recall_non_members =
        static_cast<double>(alarms_non_members) / static_cast<double>(match.non_members);
    CHECK(recall_non_members > recall_members);
}

TEST_CASE("raw NDJSON rows stream through the frozen encoder") {
    // Train-side: fit an encoder over a tiny raw table, then monitor rows
    // arriving as JSON objects keyed by raw column names.
    RawTable raw;
    raw.header = {"feature_0", "feature_1", "protected", "label"};
    raw.rows = {{"1.0", "2.0", "1", "1"},
                {"-1.0", "0.5", "0", "0"},
                {"0.25", "-0.75", "1", "0"},
                {"2.0", "1.0", "0", "1"}};
    const Encoder encoder = Encoder::fit(raw, synthetic_schema());
    const TabularDataset reference = encoder.encode(raw);

    Rng rng(77);
    const NetworkParams f = oracles::random_network(rng, 3, {4});
    const NetworkParams a = oracles::random_network(rng, 3, {4});
    const Baseline baseline = compute_baseline(f, a, reference);
    const Monitor monitor(f, a, baseline);

    std::istringstream in(
        "{\"feature_0\": 1.5, \"feature_1\": -0.5, \"protected\": \"1\"}\n"
        "{\"feature_0\": \"oops\", \"feature_1\": 0.0, \"protected\": \"0\"}\n"
        "{\"feature_0\": -2.0, \"feature_1\": 0.25, \"protected\": \"0\"}\n");
    std::ostringstream out;
    const StreamStats stats = monitor_stream(monitor, encoder, in, StreamFormat::Ndjson, out);
    CHECK(stats.rows == 3);
    CHECK(stats.errors == 1);

    std::istringstream lines(out.str());
    std::string line;
    std::getline(lines, line);
    CHECK(!json::parse(line).contains("error"));
    std::getline(lines, line);
    CHECK(json::parse(line).contains("error")); // malformed row, stream continued
    std::getline(lines, line);
    CHECK(json::parse(line).at("row_id") == 2);
}

TEST_CASE("deploy-absent protected columns are imputed as 0.5") {
    RawTable raw;
    raw.header = {"feature_0", "feature_1", "protected", "label"};
    raw.rows = {{"1.0", "2.0", "1", "1"}, {"-1.0", "0.5", "0", "0"}};
    Schema schema = synthetic_schema();
    schema.protected_deploy_absent = true;
    const Encoder encoder = Encoder::fit(raw, schema);

    // rows may omit the protected key entirely
    const std::vector<double> encoded =
        encoder.encode_row({{"feature_0", "1.0"}, {"feature_1", "2.0"}});
    CHECK(encoded[encoder.protected_index()] == 0.5);

    // and a supplied value is still pinned to the neutral constant
    const std::vector<double> with_value = encoder.encode_row(
        {{"feature_0", "1.0"}, {"feature_1", "2.0"}, {"protected", "1"}});
    CHECK(with_value[encoder.protected_index()] == 0.5);
}

} // TEST_SUITE
