#include "uep/class_profile.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace uep {

MergeTable three_class_merge(int levels) {
    if (levels < 1) throw std::invalid_argument("three_class_merge: levels < 1");
    MergeTable merge(levels, std::vector<int>(levels, 3));
    merge[0][0] = 1;
    if (levels > 1) {
        merge[0][1] = merge[1][0] = 2;
    }
    return merge;
}

MergeTable pairwise_merge(int levels) {
    if (levels < 1) throw std::invalid_argument("pairwise_merge: levels < 1");
    struct Pair { int a, b; };
    std::vector<Pair> pairs;
    for (int a = 1; a <= levels; ++a)
        for (int b = a; b <= levels; ++b) pairs.push_back({a, b});
    std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
        if (x.a + x.b != y.a + y.b) return x.a + x.b < y.a + y.b;
        return x.a < y.a;
    });
    MergeTable merge(levels, std::vector<int>(levels, 0));
    int cls = 1;
    for (const Pair& p : pairs) {
        merge[p.a - 1][p.b - 1] = cls;
        merge[p.b - 1][p.a - 1] = cls;
        ++cls;
    }
    return merge;
}

std::vector<int> classify_by_norm(const std::vector<double>& norms, int levels,
                                  ClassifyMode mode,
                                  const std::vector<double>& thresholds) {
    if (levels < 1) throw std::invalid_argument("classify_by_norm: levels < 1");
    const int n = static_cast<int>(norms.size());
    std::vector<int> level(n, levels);

    if (mode == ClassifyMode::Quantile) {
        std::vector<int> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](int a, int b) { return norms[a] > norms[b]; });
        for (int rank = 0; rank < n; ++rank)
            level[idx[rank]] = 1 + static_cast<int>((static_cast<long>(rank) * levels) / n);
        return level;
    }

    if (static_cast<int>(thresholds.size()) != levels - 1)
        throw std::invalid_argument("classify_by_norm: need S-1 thresholds");
    for (std::size_t i = 1; i < thresholds.size(); ++i)
        if (!(thresholds[i] < thresholds[i - 1]))
            throw std::invalid_argument("classify_by_norm: thresholds must strictly decrease");
    for (int i = 0; i < n; ++i) {
        int s = levels;
        for (int t = 0; t < levels - 1; ++t) {
            if (norms[i] >= thresholds[t]) {
                s = t + 1;
                break;
            }
        }
        level[i] = s;
    }
    return level;
}

std::vector<int> classify_by_norm(const BlockPartition& part, int levels,
                                  ClassifyMode mode,
                                  const std::vector<double>& thresholds) {
    return classify_by_norm(part.block_norms(), levels, mode, thresholds);
}

ClassProfile build_class_profile(std::vector<int> row_levels,
                                 std::vector<int> col_levels, MergeTable merge) {
    if (row_levels.empty() || col_levels.empty())
        throw std::invalid_argument("build_class_profile: empty level assignment");
    const int levels = static_cast<int>(merge.size());
    if (levels < 1) throw std::invalid_argument("build_class_profile: empty merge table");

    int classes = 0;
    for (int a = 0; a < levels; ++a) {
        if (static_cast<int>(merge[a].size()) != levels)
            throw std::invalid_argument("build_class_profile: merge table not square");
        for (int b = 0; b < levels; ++b) {
            if (merge[a][b] < 1)
                throw std::invalid_argument("build_class_profile: incomplete merge table");
            if (merge[a][b] != merge[b][a])
                throw std::invalid_argument("build_class_profile: merge table not symmetric");
            classes = std::max(classes, merge[a][b]);
        }
    }
    for (int s : row_levels)
        if (s < 1 || s > levels)
            throw std::invalid_argument("build_class_profile: row level out of range");
    for (int s : col_levels)
        if (s < 1 || s > levels)
            throw std::invalid_argument("build_class_profile: column level out of range");

    ClassProfile profile;
    profile.levels = levels;
    profile.classes = classes;
    profile.row_level = std::move(row_levels);
    profile.col_level = std::move(col_levels);
    profile.merge = std::move(merge);

    profile.row_blocks_at.assign(levels, {});
    profile.col_blocks_at.assign(levels, {});
    for (int n = 0; n < profile.num_row_blocks(); ++n)
        profile.row_blocks_at[profile.row_level[n] - 1].push_back(n);
    for (int p = 0; p < profile.num_col_blocks(); ++p)
        profile.col_blocks_at[profile.col_level[p] - 1].push_back(p);

    profile.class_count.assign(classes, 0);
    profile.class_pairs.assign(classes, {});
    for (int sa = 1; sa <= levels; ++sa) {
        for (int sb = 1; sb <= levels; ++sb) {
            const int count = static_cast<int>(profile.row_blocks_at[sa - 1].size() *
                                               profile.col_blocks_at[sb - 1].size());
            if (count == 0) continue;
            const int cls = profile.class_of_levels(sa, sb);
            profile.class_count[cls - 1] += count;
            profile.class_pairs[cls - 1].push_back({sa, sb, count});
        }
    }
    return profile;
}

}  // namespace uep
