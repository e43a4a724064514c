#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sgrf/dataset.hpp"

namespace sgrf {

struct SmoteConfig {
    int k_neighbors = 6;
    double target_ratio = 1.0;  // minority/majority count after oversampling, (0,1]
    std::uint64_t seed = 0;
    std::optional<double> fixed_gap;  // test hook: forces the interpolation factor
};

// One record per synthetic row; indices refer to rows of the input dataset.
struct SyntheticProvenance {
    std::size_t base_index;
    std::size_t neighbor_index;
    double gap;  // in [0,1]
};

struct NeighborTable {
    std::vector<std::size_t> minority_rows;        // ascending input-row order
    std::vector<std::vector<std::size_t>> neighbors;  // per minority row, k nearest
    int k_used = 0;
    std::vector<std::string> warnings;
};

// k nearest minority-class rows per minority row, Euclidean distance,
// self excluded, ties broken by lower row index. k is capped at
// minority_count - 1 with a warning.
NeighborTable minority_neighbors(const Dataset& ds, int k);

struct SmoteResult {
    Dataset data;
    std::vector<SyntheticProvenance> provenance;
    int k_used = 0;
    std::vector<std::string> warnings;
};

// Appends ceil(target_ratio * majority) - minority synthetic minority rows,
// each interpolated between a base row (cycled round-robin) and one of its k
// nearest minority neighbors. Input rows are preserved unchanged, in order.
SmoteResult oversample(const Dataset& ds, const SmoteConfig& cfg);

std::string provenance_to_csv(const std::vector<SyntheticProvenance>& provenance);

}  // namespace sgrf
