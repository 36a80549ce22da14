#include "fairsense/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fairsense/errors.hpp"
#include "fairsense/rng.hpp"

namespace fairsense {

using nlohmann::json;

namespace {

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

double parse_double(const std::string& text, std::size_t row, const std::string& column) {
    const char* first = text.data();
    const char* last = text.data() + text.size();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        std::ostringstream msg;
        msg << "unparseable numeric cell \"" << text << "\" at row " << row
            << ", column \"" << column << "\"";
        throw DataError(msg.str());
    }
    return value;
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
}

std::string kind_name(ColumnKind kind) {
    switch (kind) {
        case ColumnKind::Numeric: return "numeric";
        case ColumnKind::Categorical: return "categorical";
        case ColumnKind::Binary: return "binary";
    }
    return "numeric";
}

ColumnKind kind_from_name(const std::string& name) {
    if (name == "numeric") return ColumnKind::Numeric;
    if (name == "categorical") return ColumnKind::Categorical;
    if (name == "binary") return ColumnKind::Binary;
    throw SchemaError("unknown column kind \"" + name + "\"");
}

json schema_to_json(const Schema& schema) {
    json cols = json::array();
    for (const SchemaColumn& c : schema.columns) {
        json jc{{"name", c.name}, {"kind", kind_name(c.kind)}};
        if (!c.levels.empty()) jc["levels"] = c.levels;
        if (!c.one_value.empty()) jc["one_value"] = c.one_value;
        cols.push_back(jc);
    }
    json j{{"columns", cols},
           {"label", schema.label_column},
           {"positive_label_value", schema.positive_label_value},
           {"protected", schema.protected_column},
           {"protected_one_value", schema.protected_one_value}};
    if (schema.protected_deploy_absent) j["protected_deploy_absent"] = true;
    return j;
}

Schema schema_from_json(const json& j) {
    Schema schema;
    if (!j.contains("columns") || !j["columns"].is_array())
        throw SchemaError("schema is missing the \"columns\" array");
    for (const json& jc : j["columns"]) {
        SchemaColumn c;
        c.name = jc.at("name").get<std::string>();
        c.kind = kind_from_name(jc.at("kind").get<std::string>());
        if (jc.contains("levels")) c.levels = jc["levels"].get<std::vector<std::string>>();
        if (jc.contains("one_value")) c.one_value = jc["one_value"].get<std::string>();
        schema.columns.push_back(std::move(c));
    }
    auto field = [&](const char* name) -> std::string {
        if (!j.contains(name))
            throw SchemaError(std::string("schema is missing the \"") + name + "\" field");
        return j.at(name).get<std::string>();
    };
    schema.label_column = field("label");
    schema.positive_label_value = field("positive_label_value");
    schema.protected_column = field("protected");
    schema.protected_one_value = field("protected_one_value");
    schema.protected_deploy_absent = j.value("protected_deploy_absent", false);
    schema.validate();
    return schema;
}

} // namespace

std::string provenance_name(Provenance p) {
    switch (p) {
        case Provenance::Original: return "original";
        case Provenance::FairSynthetic: return "fair-synthetic";
        case Provenance::BiasedSynthetic: return "biased-synthetic";
        case Provenance::Augmented: return "augmented";
    }
    return "original";
}

std::vector<std::string> TabularDataset::column_names() const {
    std::vector<std::string> names;
    names.reserve(columns.size());
    for (const EncodedColumn& c : columns) names.push_back(c.name);
    return names;
}

std::vector<std::uint8_t> TabularDataset::protected_flags() const {
    std::vector<std::uint8_t> flags(n_rows());
    for (std::size_t i = 0; i < n_rows(); ++i)
        flags[i] = protected_value(i) == 1.0 ? 1 : 0;
    return flags;
}

void TabularDataset::validate() const {
    if (labels.size() != n_rows())
        throw DataError("dataset row count does not match label count");
    if (columns.size() != n_cols())
        throw DataError("dataset column metadata does not match feature width");
    if (protected_index >= n_cols())
        throw DataError("protected column index out of range");
    for (std::uint8_t y : labels)
        if (y > 1) throw DataError("labels must be binary {0,1}");
    for (std::size_t i = 0; i < n_rows(); ++i) {
        const double v = protected_value(i);
        if (v != 0.0 && v != 1.0)
            throw DataError("protected column values must be exactly 0 or 1");
    }
    // One-hot groups sum to 1 per row (0 allowed: the unseen-level group).
    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (columns[c].kind == ColumnKind::Categorical) groups[columns[c].group].push_back(c);
    }
    for (std::size_t i = 0; i < n_rows(); ++i) {
        for (const auto& [group, cols] : groups) {
            double sum = 0.0;
            for (std::size_t c : cols) sum += features.at(i, c);
            if (sum != 0.0 && sum != 1.0)
                throw DataError("one-hot group does not sum to 1");
        }
    }
}

const SchemaColumn* Schema::find(const std::string& name) const {
    for (const SchemaColumn& c : columns)
        if (c.name == name) return &c;
    return nullptr;
}

void Schema::validate() const {
    if (columns.empty()) throw SchemaError("schema declares no feature columns");
    if (label_column.empty()) throw SchemaError("schema is missing the label column name");
    if (protected_column.empty())
        throw SchemaError("schema is missing the protected column name");
    const SchemaColumn* prot = find(protected_column);
    if (prot == nullptr)
        throw SchemaError("protected column \"" + protected_column +
                          "\" is not among the feature columns");
    if (prot->kind != ColumnKind::Binary)
        throw SchemaError("protected column \"" + protected_column +
                          "\" must be declared binary");
    if (find(label_column) != nullptr)
        throw SchemaError("label column \"" + label_column +
                          "\" must not also be a feature column");
    std::set<std::string> seen;
    for (const SchemaColumn& c : columns) {
        if (c.name.empty()) throw SchemaError("schema has a feature column with no name");
        if (!seen.insert(c.name).second)
            throw SchemaError("duplicate feature column \"" + c.name + "\"");
        if (c.kind == ColumnKind::Binary && c.name != protected_column && c.one_value.empty())
            throw SchemaError("binary column \"" + c.name + "\" needs a one_value");
    }
}

Schema Schema::parse(const std::string& json_text) {
    json j = json::parse(json_text, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) throw SchemaError("schema is not valid JSON");
    try {
        return schema_from_json(j);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("malformed schema: ") + e.what());
    }
}

Schema Schema::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open schema file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

std::string Schema::to_json_string() const {
    return schema_to_json(*this).dump(2) + "\n";
}

void Schema::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw SchemaError("cannot write schema file " + path.string());
    out << to_json_string();
}

std::size_t RawTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw SchemaError("column \"" + name + "\" not found in the CSV header");
}

// RFC-4180-style CSV: quoted fields may contain commas, quotes ("" escape),
// and newlines. Unquoted cells are trimmed, which copes with the common
// comma-space delimiter style of the Adult dataset.
RawTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open CSV file " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    RawTable table;
    std::vector<std::string> row;
    std::string cell;
    bool quoted = false;
    bool cell_was_quoted = false;
    bool header_done = false;

    auto end_cell = [&]() {
        row.push_back(cell_was_quoted ? cell : trim(cell));
        cell.clear();
        cell_was_quoted = false;
    };
    auto end_row = [&]() {
        end_cell();
        const bool blank = row.size() == 1 && row[0].empty();
        if (!blank) {
            if (!header_done) {
                table.header = std::move(row);
                header_done = true;
            } else {
                table.rows.push_back(std::move(row));
            }
        }
        row = {};
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cell.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell.push_back(c);
            }
        } else if (c == '"' && cell.empty()) {
            quoted = true;
            cell_was_quoted = true;
        } else if (c == ',') {
            end_cell();
        } else if (c == '\n') {
            end_row();
        } else {
            cell.push_back(c);
        }
    }
    if (!cell.empty() || !row.empty()) end_row();
    if (!header_done) throw DataError("CSV file " + path.string() + " has no header row");
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        if (table.rows[i].size() != table.header.size()) {
            std::ostringstream msg;
            msg << "CSV row " << i << " has " << table.rows[i].size()
                << " cells, header has " << table.header.size();
            throw DataError(msg.str());
        }
    }
    return table;
}

namespace {

std::string csv_escape(const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

} // namespace

void write_csv(const RawTable& table, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write CSV file " + path.string());
    auto write_row = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out << ',';
            out << csv_escape(cells[i]);
        }
        out << '\n';
    };
    write_row(table.header);
    for (const auto& row : table.rows) write_row(row);
}

// ---------------------------------------------------------------------------
// Encoder
// ---------------------------------------------------------------------------

Encoder Encoder::fit(const RawTable& table, const Schema& schema) {
    std::vector<std::size_t> all(table.n_rows());
    std::iota(all.begin(), all.end(), 0);
    return fit(table, schema, all);
}

Encoder Encoder::fit(const RawTable& table, const Schema& schema,
                     const std::vector<std::size_t>& row_ids) {
    schema.validate();
    table.column_index(schema.label_column); // presence check
    Encoder enc;
    enc.schema_ = schema;

    std::size_t offset = 0;
    std::size_t group_id = 0;
    for (const SchemaColumn& col : schema.columns) {
        Codec codec;
        codec.column = col;
        codec.raw_index = table.column_index(col.name);
        codec.offset = offset;
        if (col.kind == ColumnKind::Numeric) {
            double sum = 0.0, sum_sq = 0.0;
            for (std::size_t r : row_ids) {
                const double v = parse_double(table.rows[r][codec.raw_index], r, col.name);
                sum += v;
                sum_sq += v * v;
            }
            const double n = std::max<double>(1.0, static_cast<double>(row_ids.size()));
            codec.mean = sum / n;
            const double var = std::max(0.0, sum_sq / n - codec.mean * codec.mean);
            codec.stddev = std::sqrt(var);
            if (codec.stddev == 0.0) codec.stddev = 1.0; // constant column
            codec.width = 1;
            enc.encoded_columns_.push_back({col.name, ColumnKind::Numeric, {}});
        } else if (col.kind == ColumnKind::Binary) {
            codec.width = 1;
            if (col.name == schema.protected_column && codec.column.one_value.empty())
                codec.column.one_value = schema.protected_one_value;
            if (codec.column.one_value.empty())
                throw SchemaError("binary column \"" + col.name + "\" needs a one_value");
            enc.encoded_columns_.push_back({col.name, ColumnKind::Binary, {}});
        } else {
            if (col.levels.empty()) {
                std::set<std::string> observed;
                for (std::size_t r : row_ids) observed.insert(table.rows[r][codec.raw_index]);
                codec.column.levels.assign(observed.begin(), observed.end());
            }
            if (codec.column.levels.empty())
                throw SchemaError("categorical column \"" + col.name + "\" has no levels");
            codec.width = codec.column.levels.size();
            for (const std::string& level : codec.column.levels) {
                enc.encoded_columns_.push_back(
                    {col.name + "=" + level, ColumnKind::Categorical, group_id});
            }
            ++group_id;
        }
        offset += codec.width;
        if (col.name == schema.protected_column) enc.protected_index_ = codec.offset;
        enc.codecs_.push_back(std::move(codec));
    }
    return enc;
}

TabularDataset Encoder::encode(const RawTable& table, EncodeReport* report) const {
    return encode_impl(table, report, /*deploy=*/false);
}

TabularDataset Encoder::encode_for_deployment(const RawTable& table,
                                              EncodeReport* report) const {
    return encode_impl(table, report, /*deploy=*/true);
}

TabularDataset Encoder::encode_impl(const RawTable& table, EncodeReport* report,
                                    bool deploy) const {
    const std::size_t label_index = table.column_index(schema_.label_column);
    TabularDataset data;
    data.columns = encoded_columns_;
    data.protected_index = protected_index_;
    data.features = Matrix(table.n_rows(), encoded_columns_.size());
    data.labels.resize(table.n_rows());
    EncodeReport stats;
    stats.rows = table.n_rows();

    for (std::size_t r = 0; r < table.n_rows(); ++r) {
        const auto& row = table.rows[r];
        data.labels[r] = row[label_index] == schema_.positive_label_value ? 1 : 0;
        for (const Codec& codec : codecs_) {
            if (deploy && schema_.protected_deploy_absent &&
                codec.column.name == schema_.protected_column) {
                data.features.at(r, codec.offset) = 0.5;
                continue;
            }
            const std::string& cell = row[codec.raw_index];
            switch (codec.column.kind) {
                case ColumnKind::Numeric:
                    data.features.at(r, codec.offset) =
                        (parse_double(cell, r, codec.column.name) - codec.mean) / codec.stddev;
                    break;
                case ColumnKind::Binary:
                    data.features.at(r, codec.offset) =
                        cell == codec.column.one_value ? 1.0 : 0.0;
                    break;
                case ColumnKind::Categorical: {
                    const auto& levels = codec.column.levels;
                    auto it = std::find(levels.begin(), levels.end(), cell);
                    if (it == levels.end()) {
                        ++stats.unseen_level_cells; // all-zeros group
                    } else {
                        const auto k = static_cast<std::size_t>(it - levels.begin());
                        data.features.at(r, codec.offset + k) = 1.0;
                    }
                    break;
                }
            }
        }
    }
    if (report) *report = stats;
    if (!deploy || !schema_.protected_deploy_absent) data.validate();
    return data;
}

std::vector<double> Encoder::encode_row(
    const std::vector<std::pair<std::string, std::string>>& cells) const {
    std::map<std::string, const std::string*> lookup;
    for (const auto& [name, value] : cells) lookup[name] = &value;

    std::vector<double> encoded(encoded_dim(), 0.0);
    for (const Codec& codec : codecs_) {
        const bool is_protected = codec.column.name == schema_.protected_column;
        if (is_protected && schema_.protected_deploy_absent) {
            encoded[codec.offset] = 0.5; // neutral imputation, dimensions stay fixed
            continue;
        }
        auto it = lookup.find(codec.column.name);
        if (it == lookup.end())
            throw DataError("row is missing column \"" + codec.column.name + "\"");
        const std::string& cell = *it->second;
        switch (codec.column.kind) {
            case ColumnKind::Numeric:
                encoded[codec.offset] =
                    (parse_double(cell, 0, codec.column.name) - codec.mean) / codec.stddev;
                break;
            case ColumnKind::Binary:
                encoded[codec.offset] = cell == codec.column.one_value ? 1.0 : 0.0;
                break;
            case ColumnKind::Categorical: {
                const auto& levels = codec.column.levels;
                auto lit = std::find(levels.begin(), levels.end(), cell);
                if (lit != levels.end())
                    encoded[codec.offset + static_cast<std::size_t>(lit - levels.begin())] = 1.0;
                break;
            }
        }
    }
    return encoded;
}

std::optional<std::string> Encoder::decode_level(std::size_t codec_index,
                                                 std::span<const double> encoded_row) const {
    const Codec& codec = codecs_.at(codec_index);
    if (codec.column.kind != ColumnKind::Categorical)
        throw InputError("decode_level expects a categorical column");
    for (std::size_t k = 0; k < codec.width; ++k) {
        if (encoded_row[codec.offset + k] == 1.0) return codec.column.levels[k];
    }
    return std::nullopt;
}

std::string Encoder::to_json_string() const {
    json codecs = json::array();
    for (const Codec& c : codecs_) {
        json jc{{"name", c.column.name},
                {"kind", kind_name(c.column.kind)},
                {"raw_index", c.raw_index},
                {"offset", c.offset},
                {"width", c.width}};
        if (c.column.kind == ColumnKind::Numeric) {
            jc["mean"] = c.mean;
            jc["stddev"] = c.stddev;
        }
        if (c.column.kind == ColumnKind::Categorical) jc["levels"] = c.column.levels;
        if (c.column.kind == ColumnKind::Binary) jc["one_value"] = c.column.one_value;
        codecs.push_back(jc);
    }
    json j{{"schema", schema_to_json(schema_)}, {"codecs", codecs}};
    return j.dump();
}

struct EncoderAccess {
    static Encoder make(const json& j) {
        Encoder enc;
        enc.schema_ = schema_from_json(j.at("schema"));
        std::size_t group_id = 0;
        for (const json& jc : j.at("codecs")) {
            Encoder::Codec codec;
            codec.column.name = jc.at("name").get<std::string>();
            codec.column.kind = kind_from_name(jc.at("kind").get<std::string>());
            codec.raw_index = jc.at("raw_index").get<std::size_t>();
            codec.offset = jc.at("offset").get<std::size_t>();
            codec.width = jc.at("width").get<std::size_t>();
            switch (codec.column.kind) {
                case ColumnKind::Numeric:
                    codec.mean = jc.at("mean").get<double>();
                    codec.stddev = jc.at("stddev").get<double>();
                    enc.encoded_columns_.push_back({codec.column.name, ColumnKind::Numeric, {}});
                    break;
                case ColumnKind::Binary:
                    codec.column.one_value = jc.at("one_value").get<std::string>();
                    enc.encoded_columns_.push_back({codec.column.name, ColumnKind::Binary, {}});
                    break;
                case ColumnKind::Categorical:
                    codec.column.levels = jc.at("levels").get<std::vector<std::string>>();
                    for (const std::string& level : codec.column.levels)
                        enc.encoded_columns_.push_back(
                            {codec.column.name + "=" + level, ColumnKind::Categorical, group_id});
                    ++group_id;
                    break;
            }
            if (codec.column.name == enc.schema_.protected_column)
                enc.protected_index_ = codec.offset;
            enc.codecs_.push_back(std::move(codec));
        }
        return enc;
    }
};

Encoder Encoder::parse(const std::string& json_text) {
    json j = json::parse(json_text, nullptr, false);
    if (j.is_discarded()) throw SchemaError("encoder JSON is malformed");
    try {
        return EncoderAccess::make(j);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("malformed encoder: ") + e.what());
    }
}

TabularDataset load_csv(const std::filesystem::path& path, const Schema& schema,
                        EncodeReport* report) {
    const RawTable table = read_csv(path);
    const Encoder encoder = Encoder::fit(table, schema);
    return encoder.encode(table, report);
}

void save_dataset_csv(const TabularDataset& data, const Schema& schema,
                      const std::filesystem::path& path) {
    for (const EncodedColumn& c : data.columns) {
        if (c.kind == ColumnKind::Categorical)
            throw InputError(
                "save_dataset_csv writes identity-encoded datasets only; "
                "one-hot groups cannot be written back as raw CSV");
    }
    RawTable table;
    table.header = data.column_names();
    table.header.push_back(schema.label_column);
    table.rows.reserve(data.n_rows());
    for (std::size_t r = 0; r < data.n_rows(); ++r) {
        std::vector<std::string> row;
        row.reserve(data.n_cols() + 1);
        for (std::size_t c = 0; c < data.n_cols(); ++c)
            row.push_back(format_double(data.features.at(r, c)));
        row.push_back(data.labels[r] ? "1" : "0");
        table.rows.push_back(std::move(row));
    }
    write_csv(table, path);
}

// ---------------------------------------------------------------------------
// Splits and augmentation
// ---------------------------------------------------------------------------

std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
split_indices(std::size_t n, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw InputError("test fraction must be strictly between 0 and 1");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);
    const auto test_count = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(n)));
    const std::size_t train_count = n - test_count;
    std::vector<std::size_t> train(order.begin(),
                                   order.begin() + static_cast<std::ptrdiff_t>(train_count));
    std::vector<std::size_t> test(order.begin() + static_cast<std::ptrdiff_t>(train_count),
                                  order.end());
    return {std::move(train), std::move(test)};
}

TabularDataset subset(const TabularDataset& data, const std::vector<std::size_t>& row_ids) {
    TabularDataset out;
    out.columns = data.columns;
    out.protected_index = data.protected_index;
    out.provenance = data.provenance;
    out.features = Matrix(row_ids.size(), data.n_cols());
    out.labels.resize(row_ids.size());
    for (std::size_t i = 0; i < row_ids.size(); ++i) {
        const auto src = data.features.row(row_ids[i]);
        std::copy(src.begin(), src.end(), out.features.row(i).begin());
        out.labels[i] = data.labels[row_ids[i]];
    }
    return out;
}

std::pair<TabularDataset, TabularDataset>
train_test_split(const TabularDataset& data, double test_fraction, std::uint64_t seed) {
    auto [train_ids, test_ids] = split_indices(data.n_rows(), test_fraction, seed);
    return {subset(data, train_ids), subset(data, test_ids)};
}

TabularDataset counterfactual_augment(const TabularDataset& data) {
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
        const double v = data.protected_value(i);
        if (v != 0.0 && v != 1.0)
            throw DataError("counterfactual augmentation needs a binary protected column");
    }
    TabularDataset out;
    out.columns = data.columns;
    out.protected_index = data.protected_index;
    out.provenance = Provenance::Augmented;
    const std::size_t n = data.n_rows();
    out.features = Matrix(2 * n, data.n_cols());
    out.labels.resize(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto src = data.features.row(i);
        std::copy(src.begin(), src.end(), out.features.row(i).begin());
        std::copy(src.begin(), src.end(), out.features.row(n + i).begin());
        out.features.at(n + i, out.protected_index) =
            1.0 - data.protected_value(i); // negated counterfactual twin
        out.labels[i] = data.labels[i];
        out.labels[n + i] = data.labels[i];
    }
    return out;
}

RawTable counterfactual_augment_raw(const RawTable& table, const Schema& schema) {
    const std::size_t prot = table.column_index(schema.protected_column);
    std::set<std::string> values;
    for (const auto& row : table.rows) values.insert(row[prot]);
    if (values.size() != 2) {
        std::ostringstream msg;
        msg << "protected column \"" << schema.protected_column << "\" has "
            << values.size() << " distinct values; augmentation needs exactly 2";
        throw DataError(msg.str());
    }
    auto it = values.begin();
    const std::string a = *it++;
    const std::string b = *it;

    RawTable out;
    out.header = table.header;
    out.rows = table.rows;
    out.rows.reserve(table.rows.size() * 2);
    for (const auto& row : table.rows) {
        auto twin = row;
        twin[prot] = twin[prot] == a ? b : a;
        out.rows.push_back(std::move(twin));
    }
    return out;
}

} // namespace fairsense
