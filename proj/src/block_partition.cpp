#include "uep/block_partition.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace uep {

BlockPartition partition(Matrix m, Side role, int num_blocks, int block_span) {
    if (num_blocks < 1 || block_span < 1)
        throw std::invalid_argument("partition: block counts must be positive");
    const long dim = role == Side::Left ? m.rows() : m.cols();
    if (dim != static_cast<long>(num_blocks) * block_span)
        throw std::invalid_argument(
            "partition: dimension " + std::to_string(dim) + " is not " +
            std::to_string(num_blocks) + " blocks of " + std::to_string(block_span));
    BlockPartition part;
    part.elements = std::move(m);
    part.role = role;
    part.num_blocks = num_blocks;
    part.block_span = block_span;
    return part;
}

NormPermutation norm_permutation(const Matrix& m, Axis axis) {
    const int n = axis == Axis::Rows ? static_cast<int>(m.rows())
                                     : static_cast<int>(m.cols());
    std::vector<double> norms(n);
    for (int i = 0; i < n; ++i)
        norms[i] = axis == Axis::Rows ? m.row(i).norm() : m.col(i).norm();

    NormPermutation perm;
    perm.order.resize(n);
    std::iota(perm.order.begin(), perm.order.end(), 0);
    std::stable_sort(perm.order.begin(), perm.order.end(),
                     [&](int a, int b) { return norms[a] > norms[b]; });
    perm.inverse.resize(n);
    for (int i = 0; i < n; ++i) perm.inverse[perm.order[i]] = i;
    return perm;
}

Matrix apply_permutation(const Matrix& m, const std::vector<int>& order, Axis axis) {
    Matrix out(m.rows(), m.cols());
    if (axis == Axis::Rows) {
        for (std::size_t i = 0; i < order.size(); ++i) out.row(i) = m.row(order[i]);
    } else {
        for (std::size_t i = 0; i < order.size(); ++i) out.col(i) = m.col(order[i]);
    }
    return out;
}

}  // namespace uep
