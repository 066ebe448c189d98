#include "uep/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "uep/rng.hpp"

namespace uep {

double binomial_tail(int n, double p, int k) {
    if (k <= 0) return 1.0;
    if (k > n) return 0.0;
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    const double log_p = std::log(p);
    const double log_q = std::log1p(-p);
    const double lg_n = std::lgamma(n + 1.0);
    double tail = 0.0;
    for (int i = k; i <= n; ++i) {
        const double lchoose = lg_n - std::lgamma(i + 1.0) - std::lgamma(n - i + 1.0);
        tail += std::exp(lchoose + i * log_p + (n - i) * log_q);
    }
    return std::min(tail, 1.0);
}

std::vector<double> now_decoding_bound(const std::vector<double>& gamma,
                                       const std::vector<int>& class_count,
                                       int received) {
    if (gamma.size() != class_count.size())
        throw std::invalid_argument("now_decoding_bound: gamma/count size mismatch");
    if (received < 0) throw std::invalid_argument("now_decoding_bound: received < 0");
    std::vector<double> pd(gamma.size());
    for (std::size_t l = 0; l < gamma.size(); ++l)
        pd[l] = binomial_tail(received, gamma[l], class_count[l]);
    return pd;
}

double VarianceProfile::total() const {
    double sum = 0.0;
    for (std::size_t n = 0; n < row_var.size(); ++n)
        for (std::size_t p = 0; p < col_var.size(); ++p)
            sum += expected_block_norm2(static_cast<int>(n), static_cast<int>(p));
    return sum;
}

BlockPartition synthetic_partition(Side role, int num_blocks, int block_span,
                                   int inner_dim,
                                   const std::vector<double>& block_variance,
                                   std::mt19937_64& rng) {
    if (static_cast<int>(block_variance.size()) != num_blocks)
        throw std::invalid_argument("synthetic_partition: one variance per block");
    Matrix m = role == Side::Left
                   ? Matrix(static_cast<long>(num_blocks) * block_span, inner_dim)
                   : Matrix(inner_dim, static_cast<long>(num_blocks) * block_span);
    std::normal_distribution<double> unit(0.0, 1.0);
    for (int b = 0; b < num_blocks; ++b) {
        const double sd = std::sqrt(block_variance[b]);
        if (role == Side::Left) {
            for (int r = b * block_span; r < (b + 1) * block_span; ++r)
                for (int c = 0; c < inner_dim; ++c) m(r, c) = sd * unit(rng);
        } else {
            for (int c = b * block_span; c < (b + 1) * block_span; ++c)
                for (int r = 0; r < inner_dim; ++r) m(r, c) = sd * unit(rng);
        }
    }
    return partition(std::move(m), role, num_blocks, block_span);
}

namespace {

void check_profile_sizes(const ClassProfile& profile, const VarianceProfile& variances) {
    if (static_cast<int>(variances.row_var.size()) != profile.num_row_blocks() ||
        static_cast<int>(variances.col_var.size()) != profile.num_col_blocks())
        throw std::invalid_argument("variance profile does not match class profile");
}

// sum of E|C_np|^2 over each class
std::vector<double> class_weights(const ClassProfile& profile,
                                  const VarianceProfile& variances) {
    std::vector<double> weights(profile.classes, 0.0);
    for (int n = 0; n < profile.num_row_blocks(); ++n)
        for (int p = 0; p < profile.num_col_blocks(); ++p)
            weights[profile.class_of_block(n, p) - 1] += variances.expected_block_norm2(n, p);
    return weights;
}

}  // namespace

double now_conditional_loss(const WindowDistribution& gamma, const ClassProfile& profile,
                            const VarianceProfile& variances, int received) {
    gamma.validate();
    check_profile_sizes(profile, variances);
    if (static_cast<int>(gamma.gamma.size()) != profile.classes)
        throw std::invalid_argument("now_conditional_loss: gamma size != classes");
    const std::vector<double> weights = class_weights(profile, variances);
    const std::vector<double> pd =
        now_decoding_bound(gamma.gamma, profile.class_count, std::max(received, 0));
    double loss = 0.0;
    for (int l = 0; l < profile.classes; ++l) loss += weights[l] * (1.0 - pd[l]);
    return loss / variances.total();
}

double expected_loss_now(const WindowDistribution& gamma, const ClassProfile& profile,
                         const VarianceProfile& variances, const LatencyModel& latency,
                         int workers, double t, int packet_lag) {
    const std::vector<double> pmf = arrival_pmf(latency, workers, t);
    double loss = 0.0;
    for (int w = 0; w <= workers; ++w) {
        if (pmf[w] == 0.0) continue;
        loss += pmf[w] * now_conditional_loss(gamma, profile, variances,
                                              std::max(w - packet_lag, 0));
    }
    return loss;
}

double mds_conditional_loss(int k, int received) { return received < k ? 1.0 : 0.0; }

double expected_loss_mds(int k, const LatencyModel& latency, int workers, double t) {
    if (k > workers) throw std::invalid_argument("expected_loss_mds: k > workers");
    const std::vector<double> pmf = arrival_pmf(latency, workers, t);
    double loss = 0.0;
    for (int w = 0; w < k; ++w) loss += pmf[w];
    return loss;
}

namespace {

struct TrialEngine {
    const WindowDistribution& gamma;
    const ClassProfile& profile;
    const VarianceProfile& variances;
    const PipelineMcOptions& options;
    int workers;

    CodedTask make_task(int worker, std::mt19937_64& rng) const {
        const int n = profile.num_row_blocks();
        const int p = profile.num_col_blocks();
        switch (options.strategy) {
            case Strategy::Now:
                return encode_now(profile, sample_window(gamma, profile, rng, options.sampling),
                                  FieldKind::Real, rng);
            case Strategy::Ew:
                return encode_ew(profile, sample_window(gamma, profile, rng, options.sampling),
                                 FieldKind::Real, rng);
            case Strategy::Mds:
                return encode_mds(n, p, FieldKind::Real, rng);
            case Strategy::Uncoded:
                if (workers != n * p)
                    throw std::invalid_argument("uncoded needs exactly N*P workers");
                return encode_uncoded(n, p, worker);
            case Strategy::BlockRep:
                if (workers % (n * p) != 0)
                    throw std::invalid_argument("block repetition needs workers divisible by N*P");
                return encode_block_rep(n, p, worker);
        }
        throw std::logic_error("unreachable");
    }
};

void run_parallel(long trials, int threads, const std::function<void(long)>& body) {
    const int n_threads = std::max(1, threads);
    if (n_threads == 1) {
        for (long i = 0; i < trials; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    const long chunk = (trials + n_threads - 1) / n_threads;
    for (int w = 0; w < n_threads; ++w) {
        const long begin = w * chunk;
        const long end = std::min(trials, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&body, begin, end] {
            for (long i = begin; i < end; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

std::vector<McEstimate> summarize(const std::vector<std::vector<double>>& losses) {
    std::vector<McEstimate> estimates(losses.size());
    for (std::size_t d = 0; d < losses.size(); ++d) {
        const auto& xs = losses[d];
        const long n = static_cast<long>(xs.size());
        double mean = 0.0;
        for (double x : xs) mean += x;
        mean /= n;
        double var = 0.0;
        for (double x : xs) var += (x - mean) * (x - mean);
        var = n > 1 ? var / (n - 1) : 0.0;
        estimates[d] = {mean, n > 1 ? 1.96 * std::sqrt(var / n) : 0.0, n};
    }
    return estimates;
}

}  // namespace

PipelineTrial pipeline_trial(const WindowDistribution& gamma, const ClassProfile& profile,
                             const VarianceProfile& variances, const LatencyModel& latency,
                             int workers, const std::vector<double>& deadlines,
                             const PipelineMcOptions& options, std::uint64_t trial) {
    check_profile_sizes(profile, variances);
    const TrialEngine engine{gamma, profile, variances, options, workers};
    const double norm = variances.total();

    std::mt19937_64 rng = substream(options.seed, trial);
    const BlockPartition a =
        synthetic_partition(Side::Left, profile.num_row_blocks(), variances.block_rows,
                            variances.inner_dim, variances.row_var, rng);
    const BlockPartition b =
        synthetic_partition(Side::Right, profile.num_col_blocks(), variances.block_cols,
                            variances.inner_dim, variances.col_var, rng);
    const Matrix c = a.elements * b.elements;

    std::vector<CodedTask> tasks;
    std::vector<Matrix> products;
    tasks.reserve(workers);
    products.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        tasks.push_back(engine.make_task(w, rng));
        products.push_back(coded_product(a, b, tasks.back()));
    }
    const std::vector<double> arrivals = sample_arrivals(latency, workers, rng);

    PipelineTrial result;
    result.losses.resize(deadlines.size());
    result.reports.resize(deadlines.size());
    result.expected_norm2 = norm;
    result.realized_norm2 = c.squaredNorm();
    const double denom = result.realized_norm2 > 0 ? result.realized_norm2 : 1.0;
    for (std::size_t d = 0; d < deadlines.size(); ++d) {
        ReceivedSet received;
        received.row_blocks = profile.num_row_blocks();
        received.col_blocks = profile.num_col_blocks();
        received.block_rows = variances.block_rows;
        received.block_cols = variances.block_cols;
        received.deadline = deadlines[d];
        for (int w = 0; w < workers; ++w) {
            if (arrivals[w] < deadlines[d])
                received.products.push_back(
                    {coefficient_row(tasks[w]), products[w], arrivals[w]});
        }
        result.reports[d] = decode(received, options.decode);
        result.losses[d] = squared_loss(c, result.reports[d].estimate) / denom;
    }
    return result;
}

std::vector<McEstimate> pipeline_loss_mc(const WindowDistribution& gamma,
                                         const ClassProfile& profile,
                                         const VarianceProfile& variances,
                                         const LatencyModel& latency, int workers,
                                         const std::vector<double>& deadlines,
                                         const PipelineMcOptions& options) {
    check_profile_sizes(profile, variances);
    if (options.trials < 1) throw std::invalid_argument("pipeline_loss_mc: trials < 1");
    std::vector<std::vector<double>> losses(deadlines.size(),
                                            std::vector<double>(options.trials, 0.0));
    run_parallel(options.trials, options.threads, [&](long trial) {
        const PipelineTrial result =
            pipeline_trial(gamma, profile, variances, latency, workers, deadlines,
                           options, static_cast<std::uint64_t>(trial));
        for (std::size_t d = 0; d < deadlines.size(); ++d)
            losses[d][trial] = result.losses[d];
    });
    return summarize(losses);
}

std::vector<McEstimate> pipeline_loss_vs_received_mc(
    const WindowDistribution& gamma, const ClassProfile& profile,
    const VarianceProfile& variances, int workers, const std::vector<int>& counts,
    const PipelineMcOptions& options) {
    check_profile_sizes(profile, variances);
    const TrialEngine engine{gamma, profile, variances, options, workers};
    const bool worker_indexed = options.strategy == Strategy::Uncoded ||
                                options.strategy == Strategy::BlockRep;
    int max_count = 0;
    for (int c : counts) {
        if (c < 0) throw std::invalid_argument("received count < 0");
        max_count = std::max(max_count, c);
    }
    if (worker_indexed && max_count > workers)
        throw std::invalid_argument("received count exceeds worker count");
    const int universe = worker_indexed ? workers : max_count;

    std::vector<std::vector<double>> losses(counts.size(),
                                            std::vector<double>(options.trials, 0.0));
    run_parallel(options.trials, options.threads, [&](long trial) {
        std::mt19937_64 rng = substream(options.seed, static_cast<std::uint64_t>(trial));
        const BlockPartition a =
            synthetic_partition(Side::Left, profile.num_row_blocks(), variances.block_rows,
                                variances.inner_dim, variances.row_var, rng);
        const BlockPartition b =
            synthetic_partition(Side::Right, profile.num_col_blocks(), variances.block_cols,
                                variances.inner_dim, variances.col_var, rng);
        const Matrix c = a.elements * b.elements;
        const double denom = c.squaredNorm() > 0 ? c.squaredNorm() : 1.0;

        std::vector<CodedTask> tasks;
        std::vector<Matrix> products;
        for (int w = 0; w < universe; ++w) {
            tasks.push_back(engine.make_task(w, rng));
            products.push_back(coded_product(a, b, tasks.back()));
        }
        // iid task streams take a prefix; worker-indexed strategies take a
        // uniform subset via a shuffled order
        std::vector<int> order(universe);
        std::iota(order.begin(), order.end(), 0);
        if (worker_indexed) {
            for (int i = universe - 1; i > 0; --i) {
                std::uniform_int_distribution<int> pick(0, i);
                std::swap(order[i], order[pick(rng)]);
            }
        }

        for (std::size_t d = 0; d < counts.size(); ++d) {
            ReceivedSet received;
            received.row_blocks = profile.num_row_blocks();
            received.col_blocks = profile.num_col_blocks();
            received.block_rows = variances.block_rows;
            received.block_cols = variances.block_cols;
            for (int i = 0; i < counts[d]; ++i) {
                const int w = order[i];
                received.products.push_back(
                    {coefficient_row(tasks[w]), products[w], 0.0});
            }
            const DecodeReport report = decode(received, options.decode);
            losses[d][trial] = squared_loss(c, report.estimate) / denom;
        }
    });
    return summarize(losses);
}

std::vector<McEstimate> prime_field_loss_mc(const WindowDistribution& gamma,
                                            const ClassProfile& profile,
                                            const VarianceProfile& variances,
                                            const LatencyModel& latency, int workers,
                                            const std::vector<double>& deadlines,
                                            const PipelineMcOptions& options) {
    check_profile_sizes(profile, variances);
    const int n = profile.num_row_blocks();
    const int p = profile.num_col_blocks();
    const double total = variances.total();

    std::vector<std::vector<double>> losses(deadlines.size(),
                                            std::vector<double>(options.trials, 0.0));
    run_parallel(options.trials, options.threads, [&](long trial) {
        std::mt19937_64 rng = substream(options.seed, static_cast<std::uint64_t>(trial));
        std::vector<std::vector<std::uint32_t>> rows;
        rows.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            CodedTask task;
            switch (options.strategy) {
                case Strategy::Now:
                    task = encode_now(profile, sample_window(gamma, profile, rng, options.sampling),
                                      FieldKind::Prime, rng);
                    break;
                case Strategy::Ew:
                    task = encode_ew(profile, sample_window(gamma, profile, rng, options.sampling),
                                     FieldKind::Prime, rng);
                    break;
                case Strategy::Mds:
                    task = encode_mds(n, p, FieldKind::Prime, rng);
                    break;
                case Strategy::Uncoded:
                    if (workers != n * p)
                        throw std::invalid_argument("uncoded needs exactly N*P workers");
                    task = encode_uncoded(n, p, w);
                    break;
                case Strategy::BlockRep:
                    if (workers % (n * p) != 0)
                        throw std::invalid_argument(
                            "block repetition needs workers divisible by N*P");
                    task = encode_block_rep(n, p, w);
                    break;
            }
            rows.push_back(coefficient_row_fp(task));
        }
        const std::vector<double> arrivals = sample_arrivals(latency, workers, rng);

        for (std::size_t d = 0; d < deadlines.size(); ++d) {
            std::vector<std::vector<std::uint32_t>> received;
            for (int w = 0; w < workers; ++w)
                if (arrivals[w] < deadlines[d]) received.push_back(rows[w]);
            const auto mask = fp_recoverable_mask(received, n * p);
            double loss = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < p; ++j)
                    if (!mask[i * p + j]) loss += variances.expected_block_norm2(i, j);
            losses[d][trial] = loss / total;
        }
    });
    return summarize(losses);
}

McEstimate ew_expected_loss_mc(const WindowDistribution& gamma,
                               const ClassProfile& profile,
                               const VarianceProfile& variances,
                               const LatencyModel& latency, int workers, double t,
                               long trials, std::uint64_t seed, int threads) {
    PipelineMcOptions options;
    options.strategy = Strategy::Ew;
    options.trials = trials;
    options.seed = seed;
    options.threads = threads;
    return pipeline_loss_mc(gamma, profile, variances, latency, workers, {t}, options)[0];
}

}  // namespace uep
