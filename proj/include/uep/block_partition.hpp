#pragma once

#include <Eigen/Dense>
#include <vector>

namespace uep {

using Matrix = Eigen::MatrixXd;

// Which factor of the product a partition describes.
//  Left:  (N*U) x M matrix cut into N row blocks of U rows each.
//  Right: M x (P*Q) matrix cut into P column blocks of Q columns each.
enum class Side { Left, Right };

// A dense matrix together with its block decomposition. Blocks tile the
// matrix with no overlap; reassembling them reproduces the input exactly.
struct BlockPartition {
    Matrix elements;
    Side role = Side::Left;
    int num_blocks = 0;  // N (Left) or P (Right)
    int block_span = 0;  // U rows per block (Left) or Q columns per block (Right)

    int inner_dim() const {
        return role == Side::Left ? static_cast<int>(elements.cols())
                                  : static_cast<int>(elements.rows());
    }

    Eigen::Block<const Matrix> block(int i) const {
        if (role == Side::Left)
            return elements.block(i * block_span, 0, block_span, elements.cols());
        return elements.block(0, i * block_span, elements.rows(), block_span);
    }

    double block_norm(int i) const { return block(i).norm(); }

    std::vector<double> block_norms() const {
        std::vector<double> norms(num_blocks);
        for (int i = 0; i < num_blocks; ++i) norms[i] = block_norm(i);
        return norms;
    }
};

// Cuts `m` into `num_blocks` blocks of `block_span` rows (Left) or columns
// (Right). Throws std::invalid_argument when the dimensions do not divide.
BlockPartition partition(Matrix m, Side role, int num_blocks, int block_span);

// Sorting permutation of rows or columns by descending Euclidean norm,
// ties broken by original index. order[i] is the original index placed at
// position i; inverse undoes it.
struct NormPermutation {
    std::vector<int> order;
    std::vector<int> inverse;
};
enum class Axis { Rows, Columns };
NormPermutation norm_permutation(const Matrix& m, Axis axis);

Matrix apply_permutation(const Matrix& m, const std::vector<int>& order, Axis axis);

}  // namespace uep
