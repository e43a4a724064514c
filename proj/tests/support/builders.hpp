#pragma once

// Shared helpers for constructing datasets and generator configs in tests.

#include <string>
#include <vector>

#include "sgrf/dataset.hpp"
#include "sgrf/forest.hpp"

namespace builders {

// Dense dataset from row-major values, all features continuous.
inline sgrf::Dataset dataset(const std::vector<std::vector<double>>& rows,
                             const std::vector<int>& labels, int n_classes = 2) {
    sgrf::Dataset ds;
    const std::size_t f = rows.empty() ? 0 : rows[0].size();
    for (std::size_t j = 0; j < f; ++j) {
        sgrf::FeatureSpec spec;
        spec.name = "f" + std::to_string(j);
        spec.kind = sgrf::FeatureKind::Continuous;
        ds.specs.push_back(spec);
    }
    for (int c = 0; c < n_classes; ++c) ds.label_names.push_back("class" + std::to_string(c));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (double v : rows[r]) {
            ds.x.push_back(v);
            ds.missing.push_back(0);
        }
        ds.y.push_back(labels[r]);
    }
    return ds;
}

// Two Gaussian blobs separated along every informative axis, plus noise axes.
inline sgrf::GeneratorConfig blobs(long long n0, long long n1, int informative, int noise,
                                   double separation, std::uint64_t seed) {
    sgrf::GeneratorConfig cfg;
    cfg.seed = seed;
    cfg.class_counts = {n0, n1};
    if (informative > 0) {
        sgrf::GeneratorBlock inf;
        inf.name = "inf";
        inf.count = informative;
        inf.kind = sgrf::FeatureKind::Continuous;
        inf.separation = separation;
        cfg.blocks.push_back(inf);
    }
    if (noise > 0) {
        sgrf::GeneratorBlock nz;
        nz.name = "noise";
        nz.count = noise;
        nz.kind = sgrf::FeatureKind::Continuous;
        nz.separation = 0.0;
        cfg.blocks.push_back(nz);
    }
    return cfg;
}

inline std::vector<std::vector<double>> to_rows(const sgrf::Dataset& ds) {
    std::vector<std::vector<double>> rows(ds.n_rows());
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
        for (std::size_t c = 0; c < ds.n_features(); ++c) rows[r].push_back(ds.at(r, c));
    }
    return rows;
}

// Generator configuration shaped like a small spitzoid-lesion cohort:
// 47 SN / 7 AST rows, 29 mixed-type features of which two are degenerate
// (P16 constant, ALK_Fish entirely missing), leaving 27 usable columns.
inline std::string clinic54_json(std::uint64_t seed = 42) {
    return std::string(R"({
  "seed": )") + std::to_string(seed) + R"(,
  "label_column": "diagnosis",
  "class_labels": ["SN", "AST"],
  "class_counts": [47, 7],
  "missing_rate": 0.02,
  "blocks": [
    {"name": "Gender", "kind": "binary", "flip": 0.5},
    {"name": "Localization", "kind": "categorical", "cardinality": 5, "skew": 0.25},
    {"name": "Age", "kind": "continuous", "range": [2, 54], "base_mean": 18, "stddev": 8, "separation": 0.4},
    {"name": "Format", "kind": "categorical", "cardinality": 3, "skew": 0.3},
    {"name": "SizeOfSpitz", "kind": "continuous", "range": [0.3, 1.4], "base_mean": 0.6, "stddev": 0.2, "separation": 0.4},
    {"name": "Thickness", "kind": "continuous", "range": [0.1, 6], "base_mean": 1.8, "stddev": 0.9, "separation": 0},
    {"name": "MitoticIndex", "kind": "continuous", "range": [0, 2.2], "base_mean": 0.3, "stddev": 0.3, "separation": 0.5},
    {"name": "CytonuclearAtypia", "kind": "binary", "flip": 0.25},
    {"name": "DeepMitosis", "kind": "binary", "flip": 0.28},
    {"name": "AtypicalMitosis", "kind": "binary", "flip": 0.3},
    {"name": "InfiltrationHypodermis", "kind": "binary", "flip": 0.28},
    {"name": "Asymmetry", "kind": "binary", "flip": 0.3},
    {"name": "BlurredBoundaries", "kind": "binary", "flip": 0.5},
    {"name": "PagetoidSpread", "kind": "binary", "flip": 0.3},
    {"name": "LymphocyticInfiltrate", "kind": "categorical", "cardinality": 3, "skew": 0.0},
    {"name": "Hypercellularity", "kind": "binary", "flip": 0.28},
    {"name": "Ulceration", "kind": "binary", "flip": 0.5},
    {"name": "KaminoBody", "kind": "binary", "flip": 0.5},
    {"name": "DesmoplasticCells", "kind": "binary", "flip": 0.5},
    {"name": "EpidermalAlteration", "kind": "binary", "flip": 0.3},
    {"name": "GrenzZone", "kind": "binary", "flip": 0.5},
    {"name": "IrregularNests", "kind": "binary", "flip": 0.3},
    {"name": "LackMaturation", "kind": "binary", "flip": 0.28},
    {"name": "P16", "kind": "binary", "constant": 0, "missing_rate": 0},
    {"name": "KI67", "kind": "continuous", "range": [0, 18], "base_mean": 2.5, "stddev": 2, "separation": 0.5},
    {"name": "BRAF", "kind": "binary", "flip": 0.5},
    {"name": "ALK_IH", "kind": "binary", "flip": 0.3},
    {"name": "ALK_Fish", "kind": "continuous", "missing_rate": 1.0},
    {"name": "MelaninPigmentation", "kind": "categorical", "cardinality": 4, "skew": 0.25}
  ]
})";
}

}  // namespace builders
