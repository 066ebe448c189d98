#pragma once

#include <limits>
#include <vector>

#include "uep/block_partition.hpp"
#include "uep/prime_field.hpp"

namespace uep {

// One worker response: the coefficient view of its product plus the product
// itself and its arrival time.
struct ReceivedProduct {
    std::vector<double> coeff;  // length N*P, g[n*P+p]
    Matrix value;               // U x Q
    double arrival = 0.0;
};

// Responses that made the deadline, plus the block geometry of the target.
struct ReceivedSet {
    int row_blocks = 0;  // N
    int col_blocks = 0;  // P
    int block_rows = 0;  // U
    int block_cols = 0;  // Q
    double deadline = std::numeric_limits<double>::infinity();
    std::vector<ReceivedProduct> products;
};

struct DecodeOptions {
    // Singular values below rank_rtol * sigma_max count as zero.
    double rank_rtol = 1e-10;
    // A unit vector whose squared projection onto the row space falls short of
    // 1 by more than this is treated as outside it. In-span residuals sit at
    // (eps * condition)^2, so there is headroom up to conditioning ~1e6.
    double membership_tol = 1e-10;
};

struct DecodeReport {
    std::vector<std::uint8_t> recovered;  // N*P mask, index n*P+p
    Matrix estimate;                      // (N*U) x (P*Q), zeros where unrecovered
    int rank = 0;                         // summed across solved subsystems
    std::vector<int> group_rank;          // rank of each independent subsystem

    bool block_recovered(int n, int p, int col_blocks) const {
        return recovered[static_cast<std::size_t>(n) * col_blocks + p] != 0;
    }
};

// True iff the unit vector of `target` lies in the row space of the stacked
// coefficient rows.
bool recoverable(const std::vector<std::vector<double>>& rows, int target,
                 const DecodeOptions& opts = {});

// Linear elimination over the received coefficient rows. Rows with disjoint
// unknown supports split into independent subsystems (one per window pair for
// non-overlapping windows, one global system when windows overlap). Every
// sub-product whose indicator lies in the row space is solved; the rest stay
// zero. Singular-within-tolerance systems mark blocks unrecovered, never throw.
DecodeReport decode(const ReceivedSet& received, const DecodeOptions& opts = {});

// Exact prime-field variant: which unknowns are recoverable from the given
// coefficient rows, and optionally their values from stacked products.
std::vector<std::uint8_t> fp_recoverable_mask(const std::vector<std::vector<std::uint32_t>>& rows,
                                              int unknowns);
struct FpDecodeReport {
    std::vector<std::uint8_t> recovered;
    FpMatrix values;  // one row per unknown, zeros where unrecovered
};
FpDecodeReport fp_decode(const std::vector<std::vector<std::uint32_t>>& rows,
                         const FpMatrix& products, int unknowns);

double squared_loss(const Matrix& c, const Matrix& c_hat);
// squared_loss divided by |C|_F^2.
double normalized_loss(const Matrix& c, const Matrix& c_hat);

}  // namespace uep
