#include "sgrf/smote.hpp"

#include <algorithm>
#include <cmath>

#include "sgrf/csv.hpp"
#include "sgrf/errors.hpp"
#include "sgrf/rng.hpp"

namespace sgrf {

namespace {

// Minority = least frequent class; ties toward the lower label.
int minority_class(const std::vector<std::size_t>& counts) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < counts.size(); ++c) {
        if (counts[c] < counts[best]) best = c;
    }
    return static_cast<int>(best);
}

}  // namespace

NeighborTable minority_neighbors(const Dataset& ds, int k) {
    if (k < 1) throw ComputeError("smote: k_neighbors must be >= 1");
    if (ds.n_classes() < 2) throw ComputeError("smote: need at least two classes");
    if (ds.has_missing()) throw ComputeError("smote: dataset must be imputed first");

    auto counts = ds.class_counts();
    int minority = minority_class(counts);

    NeighborTable table;
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
        if (ds.y[r] == minority) table.minority_rows.push_back(r);
    }
    const std::size_t m = table.minority_rows.size();
    if (m < 2) throw ComputeError("smote: minority class has fewer than 2 samples");

    table.k_used = k;
    if (static_cast<std::size_t>(k) > m - 1) {
        table.k_used = static_cast<int>(m - 1);
        table.warnings.push_back("smote: k_neighbors " + std::to_string(k) + " capped to " +
                                 std::to_string(table.k_used) + " (minority count " +
                                 std::to_string(m) + ")");
    }

    const std::size_t f = ds.n_features();
    table.neighbors.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<std::pair<double, std::size_t>> dist;
        dist.reserve(m - 1);
        for (std::size_t j = 0; j < m; ++j) {
            if (j == i) continue;
            double d2 = 0.0;
            const double* a = ds.x.data() + table.minority_rows[i] * f;
            const double* b = ds.x.data() + table.minority_rows[j] * f;
            for (std::size_t c = 0; c < f; ++c) {
                double diff = a[c] - b[c];
                d2 += diff * diff;
            }
            dist.emplace_back(d2, table.minority_rows[j]);
        }
        std::sort(dist.begin(), dist.end());  // ties fall to the lower row index
        table.neighbors[i].reserve(table.k_used);
        for (int n = 0; n < table.k_used; ++n) table.neighbors[i].push_back(dist[n].second);
    }
    return table;
}

SmoteResult oversample(const Dataset& ds, const SmoteConfig& cfg) {
    if (cfg.k_neighbors < 1) throw ComputeError("smote: k_neighbors must be >= 1");
    if (!(cfg.target_ratio > 0.0 && cfg.target_ratio <= 1.0))
        throw ComputeError("smote: target_ratio must be in (0,1]");
    if (cfg.fixed_gap && (*cfg.fixed_gap < 0.0 || *cfg.fixed_gap > 1.0))
        throw ComputeError("smote: fixed_gap must be in [0,1]");
    if (ds.n_classes() != 2) throw ComputeError("smote: exactly two classes required");

    auto counts = ds.class_counts();
    int minority = minority_class(counts);
    std::size_t minority_count = counts[minority];
    std::size_t majority_count = counts[1 - minority];

    long long target =
        static_cast<long long>(std::ceil(cfg.target_ratio * static_cast<double>(majority_count)));
    long long n_new = target - static_cast<long long>(minority_count);

    SmoteResult result;
    result.data = ds;
    result.k_used = cfg.k_neighbors;
    if (n_new <= 0) return result;  // already balanced

    NeighborTable table = minority_neighbors(ds, cfg.k_neighbors);
    result.k_used = table.k_used;
    result.warnings = table.warnings;

    const std::size_t f = ds.n_features();
    const std::size_t m = table.minority_rows.size();
    result.data.x.reserve((ds.n_rows() + n_new) * f);
    result.provenance.reserve(n_new);

    for (long long s = 0; s < n_new; ++s) {
        // Independent substream per synthetic row: output does not depend on
        // evaluation order, so this loop is parallelizable.
        Rng rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(s)));
        std::size_t base_pos = static_cast<std::size_t>(s) % m;
        std::size_t base = table.minority_rows[base_pos];
        std::size_t neighbor =
            table.neighbors[base_pos][rng.uniform_index(table.neighbors[base_pos].size())];
        double gap = cfg.fixed_gap ? *cfg.fixed_gap : rng.uniform01();

        const double* xb = ds.x.data() + base * f;
        const double* xn = ds.x.data() + neighbor * f;
        for (std::size_t c = 0; c < f; ++c) {
            result.data.x.push_back(xb[c] + gap * (xn[c] - xb[c]));
        }
        result.data.missing.insert(result.data.missing.end(), f, 0);
        result.data.y.push_back(minority);
        result.provenance.push_back({base, neighbor, gap});
    }
    // Interpolation yields real values between integer codes; the schema of
    // the oversampled dataset is continuous throughout.
    for (auto& spec : result.data.specs) {
        spec.kind = FeatureKind::Continuous;
        spec.cardinality = 0;
        spec.range.reset();
    }
    return result;
}

std::string provenance_to_csv(const std::vector<SyntheticProvenance>& provenance) {
    std::string out = "base_index,neighbor_index,gap\n";
    for (const auto& p : provenance) {
        out += std::to_string(p.base_index);
        out += ',';
        out += std::to_string(p.neighbor_index);
        out += ',';
        out += csv::format_double(p.gap);
        out += '\n';
    }
    return out;
}

}  // namespace sgrf
