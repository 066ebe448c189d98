#include "uep/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "uep/class_profile.hpp"
#include "uep/decode.hpp"
#include "uep/rng.hpp"

namespace uep {

DenseNet DenseNet::init(int in, int h1, int h2, int out, std::uint64_t seed) {
    std::mt19937_64 rng = substream(seed, 0xd15e);
    std::normal_distribution<double> unit(0.0, 1.0);
    auto he = [&](int fan_in, int fan_out) {
        Matrix w(fan_in, fan_out);
        const double sd = std::sqrt(2.0 / fan_in);
        for (long r = 0; r < w.rows(); ++r)
            for (long c = 0; c < w.cols(); ++c) w(r, c) = sd * unit(rng);
        return w;
    };
    DenseNet net;
    net.w1 = he(in, h1);
    net.w2 = he(h1, h2);
    net.w3 = he(h2, out);
    return net;
}

ForwardResult forward(const DenseNet& net, const Matrix& x, const std::vector<int>& y,
                      ForwardCache* cache) {
    if (x.cols() != net.w1.rows()) throw std::invalid_argument("forward: feature width mismatch");
    if (static_cast<long>(y.size()) != x.rows())
        throw std::invalid_argument("forward: label count mismatch");

    Matrix z1 = x * net.w1;
    Matrix a1 = z1.cwiseMax(0.0);
    Matrix z2 = a1 * net.w2;
    Matrix a2 = z2.cwiseMax(0.0);
    Matrix logits = a2 * net.w3;

    Matrix probs = logits;
    for (long r = 0; r < probs.rows(); ++r) {
        const double m = probs.row(r).maxCoeff();
        probs.row(r) = (probs.row(r).array() - m).exp();
        probs.row(r) /= probs.row(r).sum();
    }

    ForwardResult result;
    long correct = 0;
    for (long r = 0; r < probs.rows(); ++r) {
        Eigen::Index argmax;
        probs.row(r).maxCoeff(&argmax);
        if (static_cast<int>(argmax) == y[r]) ++correct;
        result.loss -= std::log(std::max(probs(r, y[r]), 1e-300));
    }
    result.loss /= static_cast<double>(probs.rows());
    result.accuracy = static_cast<double>(correct) / static_cast<double>(probs.rows());

    if (cache) {
        cache->z1 = std::move(z1);
        cache->a1 = std::move(a1);
        cache->z2 = std::move(z2);
        cache->a2 = std::move(a2);
        cache->probs = std::move(probs);
    }
    return result;
}

namespace {

Matrix softmax_delta(const Matrix& probs, const std::vector<int>& y) {
    Matrix d = probs;
    for (long r = 0; r < d.rows(); ++r) d(r, y[r]) -= 1.0;
    return d / static_cast<double>(d.rows());
}

}  // namespace

Gradients backward(const DenseNet& net, const Matrix& x, const std::vector<int>& y,
                   const ForwardCache& cache) {
    const Matrix d3 = softmax_delta(cache.probs, y);
    Gradients grads;
    grads.g3 = cache.a2.transpose() * d3;
    Matrix d2 = (d3 * net.w3.transpose()).cwiseProduct(
        (cache.z2.array() > 0.0).cast<double>().matrix());
    grads.g2 = cache.a1.transpose() * d2;
    Matrix d1 = (d2 * net.w2.transpose()).cwiseProduct(
        (cache.z1.array() > 0.0).cast<double>().matrix());
    grads.g1 = x.transpose() * d1;
    return grads;
}

CodedMatmulConfig encoding_defaults(Strategy strategy, int grid) {
    CodedMatmulConfig config;
    config.strategy = strategy;
    config.grid = grid;
    const int blocks = grid * grid;
    switch (strategy) {
        case Strategy::Uncoded:
            config.workers = blocks;
            config.time_scale = 1.0;
            break;
        case Strategy::Now:
        case Strategy::Ew:
        case Strategy::Mds:
            config.workers = blocks + 6;  // 15 for the 3x3 grid
            config.time_scale = static_cast<double>(blocks) / config.workers;
            break;
        case Strategy::BlockRep:
            config.workers = 2 * blocks;
            // budget share per worker, with the replication overhead on top:
            // the duplicated work buys no new information, so each worker runs
            // at half its budget-normalized speed
            config.time_scale = static_cast<double>(blocks) / config.workers / 2.0;
            break;
    }
    return config;
}

namespace {

int padded(int dim, int grid) { return (dim + grid - 1) / grid * grid; }

}  // namespace

Matrix coded_matmul(const Matrix& left, const Matrix& right,
                    const CodedMatmulConfig& config, double rate, double t_max,
                    std::mt19937_64& rng) {
    if (left.cols() != right.rows()) throw std::invalid_argument("coded_matmul: shape mismatch");
    const int rows = static_cast<int>(left.rows());
    const int cols = static_cast<int>(right.cols());
    const int grid = config.grid;

    const NormPermutation row_perm = norm_permutation(left, Axis::Rows);
    const NormPermutation col_perm = norm_permutation(right, Axis::Columns);

    const int rows_pad = padded(rows, grid);
    const int cols_pad = padded(cols, grid);
    Matrix l = Matrix::Zero(rows_pad, left.cols());
    l.topRows(rows) = apply_permutation(left, row_perm.order, Axis::Rows);
    Matrix r = Matrix::Zero(right.rows(), cols_pad);
    r.leftCols(cols) = apply_permutation(right, col_perm.order, Axis::Columns);

    const BlockPartition a = partition(std::move(l), Side::Left, grid, rows_pad / grid);
    const BlockPartition b = partition(std::move(r), Side::Right, grid, cols_pad / grid);

    const auto row_levels = classify_by_norm(a, config.levels, ClassifyMode::Quantile);
    const auto col_levels = classify_by_norm(b, config.levels, ClassifyMode::Quantile);
    const ClassProfile profile =
        build_class_profile(row_levels, col_levels, three_class_merge(config.levels));
    const WindowDistribution window{config.gamma};

    std::vector<CodedTask> tasks;
    std::vector<Matrix> products;
    for (int w = 0; w < config.workers; ++w) {
        CodedTask task;
        switch (config.strategy) {
            case Strategy::Now:
                task = encode_now(profile, sample_window(window, profile, rng, config.sampling),
                                  FieldKind::Real, rng);
                break;
            case Strategy::Ew:
                task = encode_ew(profile, sample_window(window, profile, rng, config.sampling),
                                 FieldKind::Real, rng);
                break;
            case Strategy::Mds:
                task = encode_mds(grid, grid, FieldKind::Real, rng);
                break;
            case Strategy::Uncoded:
                if (config.workers != grid * grid)
                    throw std::invalid_argument("uncoded needs exactly grid^2 workers");
                task = encode_uncoded(grid, grid, w);
                break;
            case Strategy::BlockRep:
                if (config.workers % (grid * grid) != 0)
                    throw std::invalid_argument("block repetition needs workers divisible by grid^2");
                task = encode_block_rep(grid, grid, w);
                break;
        }
        task.worker = w;
        tasks.push_back(std::move(task));
        products.push_back(coded_product(a, b, tasks.back()));
    }

    const LatencyModel latency{rate, config.time_scale};
    const std::vector<double> arrivals = sample_arrivals(latency, config.workers, rng);

    ReceivedSet received;
    received.row_blocks = grid;
    received.col_blocks = grid;
    received.block_rows = rows_pad / grid;
    received.block_cols = cols_pad / grid;
    received.deadline = t_max;
    for (int w = 0; w < config.workers; ++w)
        if (arrivals[w] < t_max)
            received.products.push_back({coefficient_row(tasks[w]), products[w], arrivals[w]});
    const DecodeReport report = decode(received);

    const Matrix trimmed = report.estimate.topLeftCorner(rows, cols);
    Matrix out = apply_permutation(trimmed, row_perm.inverse, Axis::Rows);
    return apply_permutation(out, col_perm.inverse, Axis::Columns);
}

void sgd_step(DenseNet& net, const Gradients& grads, double lr) {
    net.w1 -= lr * grads.g1;
    net.w2 -= lr * grads.g2;
    net.w3 -= lr * grads.g3;
}

void coded_grad_step(DenseNet& net, const Matrix& x, const std::vector<int>& y,
                     const CodedMatmulConfig& config, double rate, double t_max,
                     double lr, std::mt19937_64& rng, bool code_grad_inputs) {
    ForwardCache cache;
    forward(net, x, y, &cache);

    const Matrix d3 = softmax_delta(cache.probs, y);
    Gradients grads;
    grads.g3 = coded_matmul(cache.a2.transpose(), d3, config, rate, t_max, rng);

    Matrix upstream2 = code_grad_inputs
                           ? coded_matmul(d3, net.w3.transpose(), config, rate, t_max, rng)
                           : Matrix(d3 * net.w3.transpose());
    Matrix d2 = upstream2.cwiseProduct((cache.z2.array() > 0.0).cast<double>().matrix());
    grads.g2 = coded_matmul(cache.a1.transpose(), d2, config, rate, t_max, rng);

    Matrix upstream1 = code_grad_inputs
                           ? coded_matmul(d2, net.w2.transpose(), config, rate, t_max, rng)
                           : Matrix(d2 * net.w2.transpose());
    Matrix d1 = upstream1.cwiseProduct((cache.z1.array() > 0.0).cast<double>().matrix());
    grads.g1 = coded_matmul(x.transpose(), d1, config, rate, t_max, rng);

    sgd_step(net, grads, lr);
}

std::vector<AccuracyPoint> train_and_evaluate(const TrainConfig& config,
                                              const Dataset& train, const Dataset& test) {
    if (train.size() < config.batch) throw std::invalid_argument("training set smaller than a batch");
    const bool baseline = config.strategy == "baseline";
    CodedMatmulConfig coded;
    if (!baseline) coded = encoding_defaults(strategy_from_name(config.strategy));

    DenseNet net = DenseNet::init(train.dims(), config.hidden1, config.hidden2,
                                  train.num_classes, config.seed);

    const int eval_n = std::min(config.eval_limit > 0 ? config.eval_limit : test.size(),
                                test.size());
    const Matrix eval_x = test.features.topRows(eval_n);
    const std::vector<int> eval_y(test.labels.begin(), test.labels.begin() + eval_n);

    std::vector<AccuracyPoint> curve;
    auto evaluate = [&](int iteration) {
        curve.push_back({iteration, forward(net, eval_x, eval_y).accuracy});
    };

    const int batches_per_epoch = train.size() / config.batch;
    evaluate(0);
    int iteration = 0;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::vector<int> order(train.size());
        std::iota(order.begin(), order.end(), 0);
        {
            std::mt19937_64 shuffle_rng = substream(config.seed, 0x700000000ULL + epoch);
            for (int i = train.size() - 1; i > 0; --i) {
                std::uniform_int_distribution<int> pick(0, i);
                std::swap(order[i], order[pick(shuffle_rng)]);
            }
        }
        for (int bidx = 0; bidx < batches_per_epoch; ++bidx) {
            Matrix x(config.batch, train.dims());
            std::vector<int> y(config.batch);
            for (int i = 0; i < config.batch; ++i) {
                const int s = order[bidx * config.batch + i];
                x.row(i) = train.features.row(s);
                y[i] = train.labels[s];
            }
            std::mt19937_64 step_rng = substream(config.seed, 0x900000000ULL + iteration);
            if (baseline) {
                ForwardCache cache;
                forward(net, x, y, &cache);
                sgd_step(net, backward(net, x, y, cache), config.lr);
            } else {
                coded_grad_step(net, x, y, coded, config.rate, config.t_max, config.lr,
                                step_rng, config.code_grad_inputs);
            }
            ++iteration;
            if (config.eval_every > 0 && iteration % config.eval_every == 0)
                evaluate(iteration);
        }
    }
    if (curve.empty() || curve.back().iteration != iteration) evaluate(iteration);
    return curve;
}

}  // namespace uep
