#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "uep/block_partition.hpp"
#include "uep/class_profile.hpp"
#include "uep/prime_field.hpp"

namespace uep {

enum class Strategy { Now, Ew, Mds, Uncoded, BlockRep };
enum class FieldKind { Real, Prime };

const char* strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& name);

// Window selection probabilities over the L product classes.
struct WindowDistribution {
    std::vector<double> gamma;
    void validate() const;  // nonnegative, sums to 1 within 1e-12
};

// How a window is turned into a (row window, column window) pair.
//  PerClass: draw the product class from gamma, then a constituent ordered
//            level pair inside the class, weighted by sub-product count.
//  PerSide:  draw the row and column levels independently from gamma
//            (gamma then must have one entry per side level).
enum class WindowSampling { PerClass, PerSide };

struct WindowChoice {
    int cls = 0;        // product class, 1-based
    int row_level = 0;  // selected row window, 1-based
    int col_level = 0;  // selected column window, 1-based
};

WindowChoice sample_window(const WindowDistribution& dist, const ClassProfile& profile,
                           std::mt19937_64& rng,
                           WindowSampling sampling = WindowSampling::PerClass);

// One worker's coding coefficients. alpha spans all N row blocks and beta all
// P column blocks; entries outside the encoding window are zero. Exactly one
// of the real or prime-field coefficient sets is populated, per `field`.
struct CodedTask {
    int worker = 0;
    Strategy strategy = Strategy::Now;
    FieldKind field = FieldKind::Real;
    int cls = 0;  // sampled class, 0 when the strategy is not window based
    int row_window = 0;
    int col_window = 0;
    std::vector<double> alpha, beta;
    std::vector<std::uint32_t> alpha_fp, beta_fp;
};

// Window supported exactly on the blocks of the chosen level.
CodedTask encode_now(const ClassProfile& profile, const WindowChoice& choice,
                     FieldKind field, std::mt19937_64& rng);
// Window supported on all blocks of level <= the chosen level.
CodedTask encode_ew(const ClassProfile& profile, const WindowChoice& choice,
                    FieldKind field, std::mt19937_64& rng);
// Dense random coefficients; any N*P tasks decode all sub-products with
// probability 1 - O(N*P/p) over the prime field (checked probabilistically).
CodedTask encode_mds(int row_blocks, int col_blocks, FieldKind field,
                     std::mt19937_64& rng);
// One distinct sub-product per worker; requires workers == N*P overall.
CodedTask encode_uncoded(int row_blocks, int col_blocks, int worker);
// Sub-products handed out round robin: worker w computes block w mod N*P.
CodedTask encode_block_rep(int row_blocks, int col_blocks, int worker);

// Flattened outer product g[n*P + p] = alpha[n] * beta[p]: the decoder's view
// of the worker's product as a linear combination of all C_np.
std::vector<double> coefficient_row(const CodedTask& task);
std::vector<std::uint32_t> coefficient_row_fp(const CodedTask& task);

// Coded factor matrices and their product (Real-field tasks).
Matrix coded_left(const BlockPartition& a, const CodedTask& task);
Matrix coded_right(const BlockPartition& b, const CodedTask& task);
Matrix coded_product(const BlockPartition& a, const BlockPartition& b,
                     const CodedTask& task);

}  // namespace uep
