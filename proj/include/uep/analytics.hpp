#pragma once

#include <cstdint>
#include <vector>

#include "uep/class_profile.hpp"
#include "uep/coding.hpp"
#include "uep/decode.hpp"
#include "uep/latency.hpp"

namespace uep {

// P(Binomial(n, p) >= k).
double binomial_tail(int n, double p, int k);

// Decoding-probability bound per class after `received` packets: the chance
// that at least k_l of them drew class l. Equals the multinomial sum over
// class splits with an indicator on class l (marginalization to a binomial;
// verified against direct enumeration in the test suite).
std::vector<double> now_decoding_bound(const std::vector<double>& gamma,
                                       const std::vector<int>& class_count,
                                       int received);

// Second moments of synthetic block matrices: entries of row block n are
// zero-mean with variance row_var[n], column blocks likewise, so
// E|C_np|_F^2 = M*U*Q * row_var[n] * col_var[p].
struct VarianceProfile {
    std::vector<double> row_var;  // per row block
    std::vector<double> col_var;  // per column block
    int inner_dim = 0;            // M
    int block_rows = 0;           // U
    int block_cols = 0;           // Q

    double expected_block_norm2(int n, int p) const {
        return static_cast<double>(inner_dim) * block_rows * block_cols *
               row_var[n] * col_var[p];
    }
    double total() const;
};

// Gaussian block matrix with the given per-block variances.
BlockPartition synthetic_partition(Side role, int num_blocks, int block_span,
                                   int inner_dim,
                                   const std::vector<double>& block_variance,
                                   std::mt19937_64& rng);

// Expected normalized loss after exactly `received` packets, using the
// class-decoding bound: sum_l (1 - P_dl) * sum_{(n,p) in l} E|C_np|^2,
// normalized by the expected squared norm of C.
double now_conditional_loss(const WindowDistribution& gamma, const ClassProfile& profile,
                            const VarianceProfile& variances, int received);

// Expected normalized loss at deadline t: the arrival pmf composed with
// now_conditional_loss. packet_lag = 1 evaluates the conditional loss at one
// packet fewer than received, which is the convention behind the published
// loss-vs-time reference tables this tool reproduces; packet_lag = 0 is the
// plain composition.
double expected_loss_now(const WindowDistribution& gamma, const ClassProfile& profile,
                         const VarianceProfile& variances, const LatencyModel& latency,
                         int workers, double t, int packet_lag = 0);

// Threshold code: loss 1 below k received packets, 0 at or above.
double expected_loss_mds(int k, const LatencyModel& latency, int workers, double t);
double mds_conditional_loss(int k, int received);

struct McEstimate {
    double mean = 0.0;
    double ci_half = 0.0;  // 95% normal-approximation half width
    long trials = 0;
};

struct PipelineMcOptions {
    Strategy strategy = Strategy::Ew;
    WindowSampling sampling = WindowSampling::PerClass;
    long trials = 10000;
    std::uint64_t seed = 1;
    int threads = 1;
    DecodeOptions decode{};
};

// One full-pipeline trial: fresh Gaussian factors, one task per worker,
// sampled arrivals, a decode per deadline (arrivals shared across deadlines),
// loss |C - Chat|_F^2 / |C|_F^2 of the realized product. Trial `trial` of a
// run is fully determined by options.seed and `trial`.
struct PipelineTrial {
    std::vector<double> losses;
    std::vector<DecodeReport> reports;
    double expected_norm2 = 0.0;  // from the variance profile
    double realized_norm2 = 0.0;  // |C|_F^2 of this trial's factors
};
PipelineTrial pipeline_trial(const WindowDistribution& gamma, const ClassProfile& profile,
                             const VarianceProfile& variances, const LatencyModel& latency,
                             int workers, const std::vector<double>& deadlines,
                             const PipelineMcOptions& options, std::uint64_t trial);

// Monte Carlo over pipeline_trial. Deterministic given the seed, independent
// of thread count.
std::vector<McEstimate> pipeline_loss_mc(const WindowDistribution& gamma,
                                         const ClassProfile& profile,
                                         const VarianceProfile& variances,
                                         const LatencyModel& latency, int workers,
                                         const std::vector<double>& deadlines,
                                         const PipelineMcOptions& options);

// Same pipeline conditioned on an exact received-packet count instead of a
// deadline. For worker-indexed strategies (uncoded, block repetition) the
// received subset is drawn uniformly among the `workers` tasks.
std::vector<McEstimate> pipeline_loss_vs_received_mc(
    const WindowDistribution& gamma, const ClassProfile& profile,
    const VarianceProfile& variances, int workers, const std::vector<int>& counts,
    const PipelineMcOptions& options);

// Prime-field variant: coefficients live in GF(p), decoding is exact, and a
// block is either recovered or lost, so the loss of a trial is the
// expected-norm share of the unrecovered blocks.
std::vector<McEstimate> prime_field_loss_mc(const WindowDistribution& gamma,
                                            const ClassProfile& profile,
                                            const VarianceProfile& variances,
                                            const LatencyModel& latency, int workers,
                                            const std::vector<double>& deadlines,
                                            const PipelineMcOptions& options);

// Spec'd convenience wrapper: EW strategy at a single deadline.
McEstimate ew_expected_loss_mc(const WindowDistribution& gamma,
                               const ClassProfile& profile,
                               const VarianceProfile& variances,
                               const LatencyModel& latency, int workers, double t,
                               long trials, std::uint64_t seed, int threads = 1);

}  // namespace uep
