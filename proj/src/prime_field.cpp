#include "uep/prime_field.hpp"

#include <stdexcept>

namespace uep {

FpMatrix fp_matmul(const FpMatrix& a, const FpMatrix& b) {
    if (a.cols != b.rows) throw std::invalid_argument("fp_matmul: shape mismatch");
    FpMatrix c(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i) {
        for (int k = 0; k < a.cols; ++k) {
            const std::uint64_t aik = a.at(i, k);
            if (aik == 0) continue;
            for (int j = 0; j < b.cols; ++j) {
                std::uint64_t acc = c.at(i, j) + aik * b.at(k, j) % fp::kPrime;
                if (acc >= fp::kPrime) acc -= fp::kPrime;
                c.at(i, j) = static_cast<std::uint32_t>(acc);
            }
        }
    }
    return c;
}

int fp_rref(FpMatrix& m) {
    int rank = 0;
    for (int col = 0; col < m.cols && rank < m.rows; ++col) {
        int pivot = -1;
        for (int r = rank; r < m.rows; ++r) {
            if (m.at(r, col) != 0) {
                pivot = r;
                break;
            }
        }
        if (pivot < 0) continue;
        if (pivot != rank)
            for (int c = 0; c < m.cols; ++c) std::swap(m.at(pivot, c), m.at(rank, c));
        const std::uint32_t scale = fp::inv(m.at(rank, col));
        for (int c = col; c < m.cols; ++c) m.at(rank, c) = fp::mul(m.at(rank, c), scale);
        for (int r = 0; r < m.rows; ++r) {
            if (r == rank) continue;
            const std::uint32_t factor = m.at(r, col);
            if (factor == 0) continue;
            for (int c = col; c < m.cols; ++c)
                m.at(r, c) = fp::sub(m.at(r, c), fp::mul(factor, m.at(rank, c)));
        }
        ++rank;
    }
    return rank;
}

int fp_rank(FpMatrix m) { return fp_rref(m); }

}  // namespace uep
