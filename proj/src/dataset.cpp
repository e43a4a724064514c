#include "sgrf/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "sgrf/csv.hpp"
#include "sgrf/errors.hpp"
#include "sgrf/rng.hpp"

namespace sgrf {

using nlohmann::json;
using nlohmann::ordered_json;

std::string feature_kind_name(FeatureKind kind) {
    switch (kind) {
        case FeatureKind::Binary: return "binary";
        case FeatureKind::Categorical: return "categorical";
        case FeatureKind::Continuous: return "continuous";
    }
    throw Error("unreachable feature kind");
}

FeatureKind feature_kind_from_name(const std::string& name) {
    if (name == "binary") return FeatureKind::Binary;
    if (name == "categorical") return FeatureKind::Categorical;
    if (name == "continuous") return FeatureKind::Continuous;
    throw InputError("unknown feature kind: '" + name + "'");
}

bool Dataset::has_missing() const {
    return std::any_of(missing.begin(), missing.end(), [](std::uint8_t m) { return m != 0; });
}

std::vector<std::size_t> Dataset::class_counts() const {
    std::vector<std::size_t> counts(label_names.size(), 0);
    for (int label : y) counts.at(static_cast<std::size_t>(label))++;
    return counts;
}

std::vector<std::string> Dataset::feature_names() const {
    std::vector<std::string> names;
    names.reserve(specs.size());
    for (const auto& s : specs) names.push_back(s.name);
    return names;
}

namespace {

void validate_spec(const FeatureSpec& spec) {
    if (spec.name.empty()) throw InputError("schema: feature name must not be empty");
    if (spec.name.find(',') != std::string::npos)
        throw InputError("schema: feature name must not contain ',': '" + spec.name + "'");
    if (spec.kind == FeatureKind::Categorical && spec.cardinality < 2)
        throw InputError("schema: categorical feature '" + spec.name + "' needs cardinality >= 2");
    if (spec.range) {
        if (!(spec.range->first < spec.range->second))
            throw InputError("schema: feature '" + spec.name + "' range must satisfy lo < hi");
    }
}

void validate_unique_names(const std::vector<FeatureSpec>& specs, const std::string& label_column) {
    std::set<std::string> seen;
    for (const auto& s : specs) {
        if (!seen.insert(s.name).second)
            throw InputError("schema: duplicate feature name '" + s.name + "'");
    }
    if (label_column.empty() || label_column.find(',') != std::string::npos)
        throw InputError("schema: invalid label column name '" + label_column + "'");
    if (seen.count(label_column))
        throw InputError("schema: label column '" + label_column + "' collides with a feature name");
}

FeatureSpec spec_from_json(const json& j) {
    FeatureSpec spec;
    spec.name = j.at("name").get<std::string>();
    spec.kind = feature_kind_from_name(j.at("kind").get<std::string>());
    if (spec.kind == FeatureKind::Binary) {
        spec.cardinality = 2;
    } else if (spec.kind == FeatureKind::Categorical) {
        spec.cardinality = j.at("cardinality").get<int>();
    }
    if (j.contains("range") && !j.at("range").is_null()) {
        const auto& r = j.at("range");
        if (!r.is_array() || r.size() != 2)
            throw InputError("schema: feature '" + spec.name + "' range must be [lo, hi]");
        spec.range = std::make_pair(r.at(0).get<double>(), r.at(1).get<double>());
    }
    return spec;
}

}  // namespace

Schema parse_schema(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw InputError(std::string("schema json: ") + e.what());
    }
    Schema schema;
    try {
        schema.label_column = j.at("label_column").get<std::string>();
        for (const auto& f : j.at("features")) schema.features.push_back(spec_from_json(f));
    } catch (const json::exception& e) {
        throw InputError(std::string("schema json: ") + e.what());
    }
    if (schema.features.empty()) throw InputError("schema: needs at least one feature");
    for (const auto& s : schema.features) validate_spec(s);
    validate_unique_names(schema.features, schema.label_column);
    return schema;
}

std::string schema_to_json(const Schema& schema) {
    ordered_json j;
    j["label_column"] = schema.label_column;
    j["features"] = ordered_json::array();
    for (const auto& s : schema.features) {
        ordered_json f;
        f["name"] = s.name;
        f["kind"] = feature_kind_name(s.kind);
        if (s.kind == FeatureKind::Categorical) f["cardinality"] = s.cardinality;
        if (s.range) f["range"] = {s.range->first, s.range->second};
        j["features"].push_back(std::move(f));
    }
    return j.dump(2) + "\n";
}

Schema schema_of(const Dataset& ds) {
    Schema schema;
    schema.features = ds.specs;
    schema.label_column = ds.label_column;
    return schema;
}

Dataset load_csv(const std::string& path, const Schema& schema) {
    return load_csv_text(csv::read_file(path), schema);
}

Dataset load_csv_text(const std::string& text, const Schema& schema) {
    for (const auto& s : schema.features) validate_spec(s);
    validate_unique_names(schema.features, schema.label_column);

    csv::Table table = csv::parse(text);

    std::unordered_map<std::string, std::size_t> header_pos;
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (!header_pos.emplace(table.header[i], i).second)
            throw InputError("csv: duplicate column '" + table.header[i] + "'");
    }
    std::set<std::string> known;
    for (const auto& s : schema.features) known.insert(s.name);
    known.insert(schema.label_column);
    for (const auto& name : table.header) {
        if (!known.count(name)) throw InputError("csv: unknown column '" + name + "'");
    }
    std::vector<std::size_t> feature_cols;
    for (const auto& s : schema.features) {
        auto it = header_pos.find(s.name);
        if (it == header_pos.end()) throw InputError("csv: missing column '" + s.name + "'");
        feature_cols.push_back(it->second);
    }
    auto label_it = header_pos.find(schema.label_column);
    if (label_it == header_pos.end())
        throw InputError("csv: missing label column '" + schema.label_column + "'");
    std::size_t label_col = label_it->second;

    Dataset ds;
    ds.specs = schema.features;
    ds.label_column = schema.label_column;
    const std::size_t f = ds.specs.size();
    ds.x.reserve(table.rows.size() * f);
    ds.missing.reserve(table.rows.size() * f);

    std::unordered_map<std::string, int> label_index;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& cells = table.rows[r];
        const std::string where = "data row " + std::to_string(r + 1);
        if (cells.size() != table.header.size())
            throw InputError("csv: " + where + ": expected " +
                             std::to_string(table.header.size()) + " cells, got " +
                             std::to_string(cells.size()));
        for (std::size_t j = 0; j < f; ++j) {
            const std::string& cell = cells[feature_cols[j]];
            if (cell.empty()) {
                ds.x.push_back(0.0);
                ds.missing.push_back(1);
                continue;
            }
            auto v = csv::parse_double(cell);
            if (!v || !std::isfinite(*v))
                throw InputError("csv: " + where + ", column '" + ds.specs[j].name +
                                 "': non-numeric cell '" + cell + "'");
            if (ds.specs[j].kind != FeatureKind::Continuous && *v != std::floor(*v))
                throw InputError("csv: " + where + ", column '" + ds.specs[j].name +
                                 "': non-integer code '" + cell + "'");
            ds.x.push_back(*v);
            ds.missing.push_back(0);
        }
        const std::string& label_cell = cells[label_col];
        if (label_cell.empty())
            throw InputError("csv: " + where + ": label cell missing");
        auto [it, inserted] =
            label_index.emplace(label_cell, static_cast<int>(ds.label_names.size()));
        if (inserted) ds.label_names.push_back(label_cell);
        ds.y.push_back(it->second);
    }
    return ds;
}

std::string to_csv(const Dataset& ds) {
    std::string out;
    const std::size_t f = ds.n_features();
    for (std::size_t j = 0; j < f; ++j) {
        out += ds.specs[j].name;
        out += ',';
    }
    out += ds.label_column;
    out += '\n';
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
        for (std::size_t j = 0; j < f; ++j) {
            if (!ds.is_missing(r, j)) out += csv::format_double(ds.at(r, j));
            out += ',';
        }
        out += ds.label_names.at(static_cast<std::size_t>(ds.y[r]));
        out += '\n';
    }
    return out;
}

ImputeParams fit_impute(const Dataset& ds) {
    ImputeParams params;
    const std::size_t f = ds.n_features();
    params.fill.resize(f, 0.0);
    for (std::size_t j = 0; j < f; ++j) {
        if (ds.specs[j].kind == FeatureKind::Continuous) {
            double sum = 0.0;
            std::size_t n = 0;
            for (std::size_t r = 0; r < ds.n_rows(); ++r) {
                if (ds.is_missing(r, j)) continue;
                sum += ds.at(r, j);
                ++n;
            }
            if (n == 0)
                throw ComputeError("impute: column '" + ds.specs[j].name +
                                   "' is fully missing; run drop_degenerate first");
            params.fill[j] = sum / static_cast<double>(n);
        } else {
            // Mode; std::map iteration order breaks ties toward the smallest code.
            std::map<double, std::size_t> counts;
            for (std::size_t r = 0; r < ds.n_rows(); ++r) {
                if (!ds.is_missing(r, j)) counts[ds.at(r, j)]++;
            }
            if (counts.empty())
                throw ComputeError("impute: column '" + ds.specs[j].name +
                                   "' is fully missing; run drop_degenerate first");
            double mode = 0.0;
            std::size_t best = 0;
            for (const auto& [value, count] : counts) {
                if (count > best) {
                    best = count;
                    mode = value;
                }
            }
            params.fill[j] = mode;
        }
    }
    return params;
}

Dataset apply_impute(const Dataset& ds, const ImputeParams& params) {
    if (params.fill.size() != ds.n_features())
        throw ComputeError("impute: params fitted on a different feature count");
    Dataset out = ds;
    const std::size_t f = ds.n_features();
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
        for (std::size_t j = 0; j < f; ++j) {
            std::size_t idx = r * f + j;
            if (out.missing[idx]) {
                out.x[idx] = params.fill[j];
                out.missing[idx] = 0;
            }
        }
    }
    return out;
}

Dataset impute(const Dataset& ds) { return apply_impute(ds, fit_impute(ds)); }

ScaleParams fit_scale(const Dataset& ds) {
    if (ds.has_missing()) throw ComputeError("fit_scale: dataset still has missing values");
    if (ds.n_rows() == 0) throw ComputeError("fit_scale: empty dataset");
    ScaleParams params;
    const std::size_t f = ds.n_features();
    params.min.resize(f);
    params.max.resize(f);
    params.degenerate.resize(f, 0);
    for (std::size_t j = 0; j < f; ++j) {
        double lo = ds.at(0, j), hi = ds.at(0, j);
        for (std::size_t r = 1; r < ds.n_rows(); ++r) {
            lo = std::min(lo, ds.at(r, j));
            hi = std::max(hi, ds.at(r, j));
        }
        params.min[j] = lo;
        params.max[j] = hi;
        params.degenerate[j] = (lo == hi) ? 1 : 0;
    }
    return params;
}

Dataset apply_scale(const Dataset& ds, const ScaleParams& params) {
    if (params.min.size() != ds.n_features())
        throw ComputeError("apply_scale: params fitted on a different feature count");
    if (ds.has_missing()) throw ComputeError("apply_scale: dataset still has missing values");
    Dataset out = ds;
    const std::size_t f = ds.n_features();
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
        for (std::size_t j = 0; j < f; ++j) {
            std::size_t idx = r * f + j;
            out.x[idx] = params.degenerate[j]
                             ? 0.0
                             : (ds.x[idx] - params.min[j]) / (params.max[j] - params.min[j]);
        }
    }
    // Rescaled columns are plain reals; coded kinds no longer describe the
    // values, so a written-out dataset must not claim integer codes.
    for (auto& spec : out.specs) {
        spec.kind = FeatureKind::Continuous;
        spec.cardinality = 0;
        spec.range.reset();
    }
    return out;
}

DegenerateScan find_degenerate(const Dataset& ds) {
    DegenerateScan scan;
    const std::size_t f = ds.n_features();
    for (std::size_t j = 0; j < f; ++j) {
        bool seen = false;
        double first = 0.0;
        bool constant = true;
        for (std::size_t r = 0; r < ds.n_rows(); ++r) {
            if (ds.is_missing(r, j)) continue;
            if (!seen) {
                seen = true;
                first = ds.at(r, j);
            } else if (ds.at(r, j) != first) {
                constant = false;
                break;
            }
        }
        if (!seen || constant) {
            scan.drop_indices.push_back(j);
            scan.drop_names.push_back(ds.specs[j].name);
        }
    }
    return scan;
}

Dataset drop_columns(const Dataset& ds, const std::vector<std::size_t>& sorted_indices) {
    std::vector<std::uint8_t> drop(ds.n_features(), 0);
    for (std::size_t idx : sorted_indices) {
        if (idx >= ds.n_features()) throw ComputeError("drop_columns: index out of range");
        drop[idx] = 1;
    }
    std::vector<std::size_t> keep;
    for (std::size_t j = 0; j < ds.n_features(); ++j) {
        if (!drop[j]) keep.push_back(j);
    }
    return select_columns(ds, keep);
}

std::pair<Dataset, std::vector<std::string>> drop_degenerate(const Dataset& ds) {
    DegenerateScan scan = find_degenerate(ds);
    return {drop_columns(ds, scan.drop_indices), scan.drop_names};
}

Dataset select_rows(const Dataset& ds, const std::vector<std::size_t>& rows) {
    Dataset out;
    out.specs = ds.specs;
    out.label_names = ds.label_names;
    out.label_column = ds.label_column;
    const std::size_t f = ds.n_features();
    out.x.reserve(rows.size() * f);
    out.missing.reserve(rows.size() * f);
    out.y.reserve(rows.size());
    for (std::size_t r : rows) {
        if (r >= ds.n_rows()) throw ComputeError("select_rows: index out of range");
        out.x.insert(out.x.end(), ds.x.begin() + r * f, ds.x.begin() + (r + 1) * f);
        out.missing.insert(out.missing.end(), ds.missing.begin() + r * f,
                           ds.missing.begin() + (r + 1) * f);
        out.y.push_back(ds.y[r]);
    }
    return out;
}

Dataset select_columns(const Dataset& ds, const std::vector<std::size_t>& cols) {
    Dataset out;
    out.y = ds.y;
    out.label_names = ds.label_names;
    out.label_column = ds.label_column;
    for (std::size_t c : cols) {
        if (c >= ds.n_features()) throw ComputeError("select_columns: index out of range");
        out.specs.push_back(ds.specs[c]);
    }
    const std::size_t f = ds.n_features();
    out.x.reserve(ds.n_rows() * cols.size());
    out.missing.reserve(ds.n_rows() * cols.size());
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
        for (std::size_t c : cols) {
            out.x.push_back(ds.x[r * f + c]);
            out.missing.push_back(ds.missing[r * f + c]);
        }
    }
    return out;
}

// ---- synthetic data ----

namespace {

GeneratorBlock block_from_json(const json& j) {
    GeneratorBlock b;
    b.name = j.at("name").get<std::string>();
    b.count = j.value("count", 1);
    b.kind = feature_kind_from_name(j.value("kind", std::string("continuous")));
    if (b.kind == FeatureKind::Binary) b.cardinality = 2;
    if (b.kind == FeatureKind::Categorical) b.cardinality = j.at("cardinality").get<int>();
    b.base_mean = j.value("base_mean", 0.0);
    b.stddev = j.value("stddev", 1.0);
    b.separation = j.value("separation", 0.0);
    b.skew = j.value("skew", 0.0);
    b.flip = j.value("flip", 0.5);
    if (j.contains("range") && !j.at("range").is_null()) {
        const auto& r = j.at("range");
        b.range = std::make_pair(r.at(0).get<double>(), r.at(1).get<double>());
    }
    if (j.contains("constant") && !j.at("constant").is_null())
        b.constant = j.at("constant").get<double>();
    if (j.contains("missing_rate") && !j.at("missing_rate").is_null())
        b.missing_rate = j.at("missing_rate").get<double>();
    return b;
}

void validate_generator(const GeneratorConfig& cfg) {
    if (cfg.class_counts.empty())
        throw InputError("generator: class_counts must list at least one class");
    long long total = 0;
    for (long long c : cfg.class_counts) {
        if (c < 0) throw InputError("generator: class counts must be non-negative");
        if (c == 0) throw InputError("generator: class counts must be >= 1");
        total += c;
    }
    if (total == 0) throw InputError("generator: total row count is zero");
    if (!cfg.class_labels.empty() && cfg.class_labels.size() != cfg.class_counts.size())
        throw InputError("generator: class_labels and class_counts length mismatch");
    for (const auto& label : cfg.class_labels) {
        if (label.empty() || label.find(',') != std::string::npos)
            throw InputError("generator: invalid class label '" + label + "'");
    }
    if (cfg.blocks.empty()) throw InputError("generator: needs at least one feature block");
    if (cfg.missing_rate < 0.0 || cfg.missing_rate > 1.0)
        throw InputError("generator: missing_rate must be in [0,1]");
    for (const auto& b : cfg.blocks) {
        if (b.name.empty()) throw InputError("generator: block name must not be empty");
        if (b.count < 1) throw InputError("generator: block count must be >= 1");
        if (b.kind == FeatureKind::Categorical && b.cardinality < 2)
            throw InputError("generator: categorical block '" + b.name +
                             "' needs cardinality >= 2");
        if (b.stddev <= 0.0 && b.kind == FeatureKind::Continuous && !b.constant)
            throw InputError("generator: block '" + b.name + "' stddev must be > 0");
        if (b.skew < 0.0 || b.skew > 1.0)
            throw InputError("generator: block '" + b.name + "' skew must be in [0,1]");
        if (b.flip < 0.0 || b.flip > 1.0)
            throw InputError("generator: block '" + b.name + "' flip must be in [0,1]");
        if (b.missing_rate && (*b.missing_rate < 0.0 || *b.missing_rate > 1.0))
            throw InputError("generator: block '" + b.name + "' missing_rate must be in [0,1]");
        if (b.range && !(b.range->first < b.range->second))
            throw InputError("generator: block '" + b.name + "' range must satisfy lo < hi");
    }
}

}  // namespace

GeneratorConfig parse_generator_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw InputError(std::string("generator json: ") + e.what());
    }
    GeneratorConfig cfg;
    try {
        cfg.seed = j.value("seed", 0ULL);
        cfg.class_counts = j.at("class_counts").get<std::vector<long long>>();
        if (j.contains("class_labels"))
            cfg.class_labels = j.at("class_labels").get<std::vector<std::string>>();
        cfg.label_column = j.value("label_column", std::string("label"));
        cfg.missing_rate = j.value("missing_rate", 0.0);
        for (const auto& b : j.at("blocks")) cfg.blocks.push_back(block_from_json(b));
    } catch (const json::exception& e) {
        throw InputError(std::string("generator json: ") + e.what());
    }
    validate_generator(cfg);
    return cfg;
}

Dataset generate_synthetic(const GeneratorConfig& cfg, std::uint64_t seed_override) {
    GeneratorConfig c = cfg;
    c.seed = seed_override;
    return generate_synthetic(c);
}

Dataset generate_synthetic(const GeneratorConfig& cfg) {
    validate_generator(cfg);

    Dataset ds;
    ds.label_column = cfg.label_column;
    const std::size_t n_classes = cfg.class_counts.size();
    for (std::size_t c = 0; c < n_classes; ++c) {
        ds.label_names.push_back(cfg.class_labels.empty() ? "class" + std::to_string(c)
                                                          : cfg.class_labels[c]);
    }

    for (const auto& b : cfg.blocks) {
        for (int i = 0; i < b.count; ++i) {
            FeatureSpec spec;
            spec.name = (b.count == 1) ? b.name : b.name + "_" + std::to_string(i);
            spec.kind = b.kind;
            spec.cardinality = (b.kind == FeatureKind::Binary) ? 2 : b.cardinality;
            if (b.kind == FeatureKind::Continuous) spec.range = b.range;
            ds.specs.push_back(spec);
        }
    }
    validate_unique_names(ds.specs, ds.label_column);

    Rng rng(cfg.seed);
    const std::size_t f = ds.n_features();
    for (std::size_t c = 0; c < n_classes; ++c) {
        for (long long i = 0; i < cfg.class_counts[c]; ++i) {
            ds.y.push_back(static_cast<int>(c));
            for (const auto& b : cfg.blocks) {
                for (int k = 0; k < b.count; ++k) {
                    double value;
                    if (b.constant) {
                        value = *b.constant;
                    } else if (b.kind == FeatureKind::Continuous) {
                        double mean =
                            b.base_mean + static_cast<double>(c) * b.separation * b.stddev;
                        value = mean + b.stddev * rng.normal();
                        if (b.range) value = std::clamp(value, b.range->first, b.range->second);
                    } else if (b.kind == FeatureKind::Binary) {
                        int base = static_cast<int>(c % 2);
                        value = rng.bernoulli(b.flip) ? 1 - base : base;
                    } else {
                        int preferred = static_cast<int>(c % static_cast<std::size_t>(b.cardinality));
                        if (b.skew <= 0.0) {
                            value = static_cast<double>(rng.uniform_index(
                                static_cast<std::size_t>(b.cardinality)));
                        } else {
                            double u = rng.uniform01();
                            if (u < b.skew) {
                                value = preferred;
                            } else {
                                // Remaining mass spread uniformly over the other codes.
                                double rest = (u - b.skew) / (1.0 - b.skew);
                                int other = std::min(
                                    b.cardinality - 2,
                                    static_cast<int>(rest * (b.cardinality - 1)));
                                value = (other >= preferred) ? other + 1 : other;
                            }
                        }
                    }
                    double rate = b.missing_rate ? *b.missing_rate : cfg.missing_rate;
                    bool miss = rate > 0.0 && rng.bernoulli(rate);
                    ds.x.push_back(miss ? 0.0 : value);
                    ds.missing.push_back(miss ? 1 : 0);
                }
            }
        }
    }
    (void)f;
    return ds;
}

}  // namespace sgrf
