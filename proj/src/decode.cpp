#include "uep/decode.hpp"

#include <Eigen/SVD>
#include <numeric>
#include <stdexcept>

namespace uep {

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

bool recoverable(const std::vector<std::vector<double>>& rows, int target,
                 const DecodeOptions& opts) {
    if (rows.empty()) return false;
    const int k = static_cast<int>(rows.front().size());
    Matrix g(rows.size(), k);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (int j = 0; j < k; ++j) g(i, j) = rows[i][j];
    Eigen::JacobiSVD<Matrix> svd(g, Eigen::ComputeThinV);
    const auto& sigma = svd.singularValues();
    if (sigma.size() == 0 || sigma(0) <= 0) return false;
    int rank = 0;
    for (int i = 0; i < sigma.size(); ++i)
        if (sigma(i) > opts.rank_rtol * sigma(0)) ++rank;
    if (rank == 0) return false;
    const double proj = svd.matrixV().row(target).head(rank).squaredNorm();
    return 1.0 - proj <= opts.membership_tol;
}

DecodeReport decode(const ReceivedSet& received, const DecodeOptions& opts) {
    const int unknowns = received.row_blocks * received.col_blocks;
    const int value_len = received.block_rows * received.block_cols;

    DecodeReport report;
    report.recovered.assign(unknowns, 0);
    report.estimate = Matrix::Zero(
        static_cast<long>(received.row_blocks) * received.block_rows,
        static_cast<long>(received.col_blocks) * received.block_cols);

    // group unknowns that share a coefficient row
    UnionFind uf(unknowns);
    for (const auto& rp : received.products) {
        if (static_cast<int>(rp.coeff.size()) != unknowns)
            throw std::invalid_argument("decode: coefficient row length mismatch");
        if (rp.value.rows() != received.block_rows || rp.value.cols() != received.block_cols)
            throw std::invalid_argument("decode: product shape mismatch");
        int first = -1;
        for (int j = 0; j < unknowns; ++j) {
            if (rp.coeff[j] == 0.0) continue;
            if (first < 0)
                first = j;
            else
                uf.unite(first, j);
        }
    }

    std::vector<std::vector<int>> group_unknowns(unknowns);
    for (int j = 0; j < unknowns; ++j) group_unknowns[uf.find(j)].push_back(j);
    std::vector<std::vector<int>> group_rows(unknowns);
    for (std::size_t i = 0; i < received.products.size(); ++i) {
        for (int j = 0; j < unknowns; ++j) {
            if (received.products[i].coeff[j] != 0.0) {
                group_rows[uf.find(j)].push_back(static_cast<int>(i));
                break;
            }
        }
    }

    for (int root = 0; root < unknowns; ++root) {
        const auto& cols = group_unknowns[root];
        const auto& rows = group_rows[root];
        if (cols.empty() || rows.empty()) continue;

        const int m = static_cast<int>(rows.size());
        const int k = static_cast<int>(cols.size());
        Matrix g(m, k);
        Matrix y(m, value_len);
        for (int i = 0; i < m; ++i) {
            const auto& rp = received.products[rows[i]];
            for (int j = 0; j < k; ++j) g(i, j) = rp.coeff[cols[j]];
            for (int r = 0; r < received.block_rows; ++r)
                for (int c = 0; c < received.block_cols; ++c)
                    y(i, r * received.block_cols + c) = rp.value(r, c);
        }

        Eigen::JacobiSVD<Matrix> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sigma = svd.singularValues();
        if (sigma.size() == 0 || sigma(0) <= 0) continue;
        int rank = 0;
        for (int i = 0; i < sigma.size(); ++i)
            if (sigma(i) > opts.rank_rtol * sigma(0)) ++rank;
        if (rank == 0) continue;
        report.group_rank.push_back(rank);
        report.rank += rank;

        // min-norm least squares solution for the whole subsystem
        Matrix ut_y = svd.matrixU().leftCols(rank).transpose() * y;
        for (int i = 0; i < rank; ++i) ut_y.row(i) /= sigma(i);
        const Matrix v_r = svd.matrixV().leftCols(rank);

        for (int j = 0; j < k; ++j) {
            const double proj = v_r.row(j).squaredNorm();
            if (1.0 - proj > opts.membership_tol) continue;
            const int unknown = cols[j];
            report.recovered[unknown] = 1;
            const Eigen::RowVectorXd solved = v_r.row(j) * ut_y;
            const int n = unknown / received.col_blocks;
            const int p = unknown % received.col_blocks;
            for (int r = 0; r < received.block_rows; ++r)
                for (int c = 0; c < received.block_cols; ++c)
                    report.estimate(n * received.block_rows + r,
                                    p * received.block_cols + c) =
                        solved(r * received.block_cols + c);
        }
    }
    return report;
}

std::vector<std::uint8_t> fp_recoverable_mask(
    const std::vector<std::vector<std::uint32_t>>& rows, int unknowns) {
    std::vector<std::uint8_t> mask(unknowns, 0);
    if (rows.empty()) return mask;
    FpMatrix g(static_cast<int>(rows.size()), unknowns);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (int j = 0; j < unknowns; ++j) g.at(static_cast<int>(i), j) = rows[i][j];
    fp_rref(g);
    for (int i = 0; i < g.rows; ++i) {
        int nonzeros = 0, last = -1;
        for (int j = 0; j < unknowns; ++j) {
            if (g.at(i, j) != 0) {
                ++nonzeros;
                last = j;
            }
        }
        if (nonzeros == 1) mask[last] = 1;
    }
    return mask;
}

FpDecodeReport fp_decode(const std::vector<std::vector<std::uint32_t>>& rows,
                         const FpMatrix& products, int unknowns) {
    FpDecodeReport report;
    report.recovered.assign(unknowns, 0);
    report.values = FpMatrix(unknowns, products.cols);
    if (rows.empty()) return report;
    if (products.rows != static_cast<int>(rows.size()))
        throw std::invalid_argument("fp_decode: row count mismatch");

    FpMatrix aug(static_cast<int>(rows.size()), unknowns + products.cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (int j = 0; j < unknowns; ++j) aug.at(static_cast<int>(i), j) = rows[i][j];
        for (int c = 0; c < products.cols; ++c)
            aug.at(static_cast<int>(i), unknowns + c) = products.at(static_cast<int>(i), c);
    }
    // eliminate on the coefficient columns only
    int rank = 0;
    for (int col = 0; col < unknowns && rank < aug.rows; ++col) {
        int pivot = -1;
        for (int r = rank; r < aug.rows; ++r)
            if (aug.at(r, col) != 0) { pivot = r; break; }
        if (pivot < 0) continue;
        if (pivot != rank)
            for (int c = 0; c < aug.cols; ++c) std::swap(aug.at(pivot, c), aug.at(rank, c));
        const std::uint32_t scale = fp::inv(aug.at(rank, col));
        for (int c = 0; c < aug.cols; ++c) aug.at(rank, c) = fp::mul(aug.at(rank, c), scale);
        for (int r = 0; r < aug.rows; ++r) {
            if (r == rank) continue;
            const std::uint32_t factor = aug.at(r, col);
            if (factor == 0) continue;
            for (int c = 0; c < aug.cols; ++c)
                aug.at(r, c) = fp::sub(aug.at(r, c), fp::mul(factor, aug.at(rank, c)));
        }
        ++rank;
    }
    for (int i = 0; i < aug.rows; ++i) {
        int nonzeros = 0, last = -1;
        for (int j = 0; j < unknowns; ++j)
            if (aug.at(i, j) != 0) { ++nonzeros; last = j; }
        if (nonzeros != 1) continue;
        report.recovered[last] = 1;
        for (int c = 0; c < products.cols; ++c)
            report.values.at(last, c) = aug.at(i, unknowns + c);
    }
    return report;
}

double squared_loss(const Matrix& c, const Matrix& c_hat) {
    return (c - c_hat).squaredNorm();
}

double normalized_loss(const Matrix& c, const Matrix& c_hat) {
    const double denom = c.squaredNorm();
    const double loss = squared_loss(c, c_hat);
    if (denom == 0.0)
        return loss == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return loss / denom;
}

}  // namespace uep
