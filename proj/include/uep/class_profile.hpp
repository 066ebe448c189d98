#pragma once

#include <vector>

#include "uep/block_partition.hpp"

namespace uep {

// merge[a-1][b-1] = product class (1-based) of level pair {a,b}; symmetric.
using MergeTable = std::vector<std::vector<int>>;

// Classes {1,1} -> 1, {1,2} -> 2, every other pair -> 3.
MergeTable three_class_merge(int levels);
// Every unordered pair its own class, ordered by (sum of levels, lower level).
// L = S(S+1)/2.
MergeTable pairwise_merge(int levels);

enum class ClassifyMode { Quantile, Thresholds };

// Assigns each block a level in [1, S]; level 1 holds the largest Frobenius
// norms. Quantile mode buckets the descending-norm order into S near-equal
// groups, stable by original index on ties. Threshold mode takes S-1 strictly
// decreasing cutoffs; a block gets the first level whose cutoff its norm
// reaches, else level S.
std::vector<int> classify_by_norm(const std::vector<double>& norms, int levels,
                                  ClassifyMode mode,
                                  const std::vector<double>& thresholds = {});
std::vector<int> classify_by_norm(const BlockPartition& part, int levels,
                                  ClassifyMode mode,
                                  const std::vector<double>& thresholds = {});

// Mapping of row/column blocks to importance levels and of block pairs to
// product classes, with per-class sub-product counts.
struct ClassProfile {
    int levels = 1;  // S
    int classes = 1; // L
    std::vector<int> row_level;  // size N, values 1..S
    std::vector<int> col_level;  // size P
    MergeTable merge;

    std::vector<int> class_count;                 // k_l, index l-1
    std::vector<std::vector<int>> row_blocks_at;  // per level s-1 -> block indices
    std::vector<std::vector<int>> col_blocks_at;

    // Ordered level pair contributing sub-products to a class.
    struct LevelPair {
        int row_level = 0;
        int col_level = 0;
        int subproducts = 0;
    };
    std::vector<std::vector<LevelPair>> class_pairs;  // index l-1

    int num_row_blocks() const { return static_cast<int>(row_level.size()); }
    int num_col_blocks() const { return static_cast<int>(col_level.size()); }
    int class_of_levels(int sa, int sb) const { return merge[sa - 1][sb - 1]; }
    int class_of_block(int n, int p) const {
        return class_of_levels(row_level[n], col_level[p]);
    }
};

// Throws std::invalid_argument on empty level assignments or an incomplete
// or non-symmetric merge table.
ClassProfile build_class_profile(std::vector<int> row_levels,
                                 std::vector<int> col_levels,
                                 MergeTable merge);

}  // namespace uep
