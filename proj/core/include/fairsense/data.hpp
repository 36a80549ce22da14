#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fairsense/matrix.hpp"

namespace fairsense {

// ---------------------------------------------------------------------------
// Tabular data: schemas, CSV ingestion, one-hot encoding, splits, and
// counterfactual augmentation.
// ---------------------------------------------------------------------------

enum class ColumnKind { Numeric, Categorical, Binary };

enum class Provenance { Original, FairSynthetic, BiasedSynthetic, Augmented };

std::string provenance_name(Provenance p);

// One column of the *encoded* feature matrix. Categorical source columns
// expand to one encoded column per level (a one-hot group); numeric and
// binary columns map 1:1.
struct EncodedColumn {
    std::string name;                                   // "age" or "workclass=Private"
    ColumnKind kind = ColumnKind::Numeric;
    std::size_t group = std::numeric_limits<std::size_t>::max(); // one-hot group id
};

struct TabularDataset {
    std::vector<EncodedColumn> columns;
    Matrix features;                    // n_rows x n_cols, encoded values
    std::vector<std::uint8_t> labels;   // binary {0,1}, one per row
    std::size_t protected_index = std::numeric_limits<std::size_t>::max();
    Provenance provenance = Provenance::Original;

    std::size_t n_rows() const { return features.rows; }
    std::size_t n_cols() const { return features.cols; }
    double protected_value(std::size_t row) const {
        return features.at(row, protected_index);
    }
    std::vector<std::string> column_names() const;
    std::vector<std::uint8_t> protected_flags() const; // encoded {0,1} per row

    // Throws if row/label counts disagree, the protected index is out of
    // range, or protected values are not {0,1}.
    void validate() const;
};

// ---------------------------------------------------------------------------
// Schema: declares how a raw CSV maps onto features, label, and protected
// column. Serialized as JSON (see docs/formats.md).
// ---------------------------------------------------------------------------

struct SchemaColumn {
    std::string name;
    ColumnKind kind = ColumnKind::Numeric;
    std::vector<std::string> levels; // optional for categorical; observed if empty
    std::string one_value;           // required for binary columns
};

struct Schema {
    std::vector<SchemaColumn> columns; // feature columns, in encoding order
    std::string label_column;
    std::string positive_label_value;
    std::string protected_column;
    std::string protected_one_value;
    bool protected_deploy_absent = false;

    const SchemaColumn* find(const std::string& name) const;
    void validate() const;

    static Schema parse(const std::string& json_text);
    static Schema load(const std::filesystem::path& path);
    std::string to_json_string() const;
    void save(const std::filesystem::path& path) const;
};

// ---------------------------------------------------------------------------
// Raw CSV table (cells as text) and the fitted encoder.
// ---------------------------------------------------------------------------

struct RawTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column_index(const std::string& name) const; // throws SchemaError
    std::size_t n_rows() const { return rows.size(); }
};

RawTable read_csv(const std::filesystem::path& path);
void write_csv(const RawTable& table, const std::filesystem::path& path);

// Counts reported by Encoder::encode.
struct EncodeReport {
    std::size_t rows = 0;
    std::size_t unseen_level_cells = 0; // categorical cells mapped to all-zeros
};

// Fitted encoding: per-numeric-column standardization statistics (always
// from the rows the encoder was fitted on, normally the training split)
// plus categorical level tables. Frozen into model files so deployment-time
// rows are encoded exactly as training rows were.
class Encoder {
public:
    struct Codec {
        SchemaColumn column;
        std::size_t raw_index = 0;   // column index in the fitted table
        std::size_t offset = 0;      // first encoded column
        std::size_t width = 1;       // encoded columns spanned
        double mean = 0.0;           // numeric only
        double stddev = 1.0;         // numeric only; 1 when the column is constant
    };

    static Encoder fit(const RawTable& table, const Schema& schema,
                       const std::vector<std::size_t>& row_ids);
    static Encoder fit(const RawTable& table, const Schema& schema);

    TabularDataset encode(const RawTable& table, EncodeReport* report = nullptr) const;

    // Same as encode(), but applies the deploy-absent convention: when the
    // schema marks the protected column deploy-absent, its slot is the
    // constant 0.5. Baselines must be computed this way so they compare
    // against deployment-time scores. Training always uses encode().
    TabularDataset encode_for_deployment(const RawTable& table,
                                         EncodeReport* report = nullptr) const;

    // Encodes one row given (column name, cell text) pairs; missing
    // categorical levels map to the all-zeros group. If the schema marks the
    // protected column deploy-absent its slot is always filled with 0.5.
    std::vector<double> encode_row(
        const std::vector<std::pair<std::string, std::string>>& cells) const;

    // Recovers the categorical level encoded by a one-hot group; used by the
    // round-trip checks. Returns nullopt for the all-zeros (unseen) group.
    std::optional<std::string> decode_level(std::size_t codec_index,
                                            std::span<const double> encoded_row) const;

    const Schema& schema() const { return schema_; }
    const std::vector<Codec>& codecs() const { return codecs_; }
    const std::vector<EncodedColumn>& encoded_columns() const { return encoded_columns_; }
    std::size_t encoded_dim() const { return encoded_columns_.size(); }
    std::size_t protected_index() const { return protected_index_; }

    std::string to_json_string() const;
    static Encoder parse(const std::string& json_text);

private:
    Encoder() = default;

    TabularDataset encode_impl(const RawTable& table, EncodeReport* report,
                               bool deploy) const;

    Schema schema_;
    std::vector<Codec> codecs_;
    std::vector<EncodedColumn> encoded_columns_;
    std::size_t protected_index_ = 0;

    friend struct EncoderAccess;
};

// Loads a CSV and encodes it, fitting standardization statistics on the
// loaded rows themselves. Use this for files that are already a training
// split (or for synthetic data); pipelines that split afterwards should fit
// the Encoder on the training rows explicitly.
TabularDataset load_csv(const std::filesystem::path& path, const Schema& schema,
                        EncodeReport* report = nullptr);

// Writes the dataset in raw CSV form (features + label column). Binary and
// numeric values are emitted with shortest round-trip formatting.
void save_dataset_csv(const TabularDataset& data, const Schema& schema,
                      const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Splitting and counterfactual augmentation.
// ---------------------------------------------------------------------------

// Seeded shuffle of [0, n); the first n - round(n * test_fraction) indices
// are the training split. Disjoint and exhaustive by construction.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
split_indices(std::size_t n, double test_fraction, std::uint64_t seed);

TabularDataset subset(const TabularDataset& data, const std::vector<std::size_t>& row_ids);

std::pair<TabularDataset, TabularDataset>
train_test_split(const TabularDataset& data, double test_fraction, std::uint64_t seed);

// Appends, for every row, a copy with the protected value negated and
// everything else (label included) unchanged. Output size is exactly 2x.
TabularDataset counterfactual_augment(const TabularDataset& data);

// Raw-level augmentation for the CLI: duplicates CSV rows flipping the
// protected column between its two observed values. Throws DataError if the
// protected column does not have exactly two distinct raw values.
RawTable counterfactual_augment_raw(const RawTable& table, const Schema& schema);

} // namespace fairsense
