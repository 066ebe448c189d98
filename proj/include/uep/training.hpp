#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "uep/coding.hpp"
#include "uep/dataset.hpp"
#include "uep/latency.hpp"

namespace uep {

// Dense(in->h1) + ReLU, Dense(h1->h2) + ReLU, Dense(h2->out) + Softmax.
struct DenseNet {
    Matrix w1, w2, w3;

    static DenseNet init(int in, int h1, int h2, int out, std::uint64_t seed);
};

struct ForwardCache {
    Matrix z1, a1, z2, a2, probs;
};

struct ForwardResult {
    double loss = 0.0;      // mean cross entropy
    double accuracy = 0.0;
};

ForwardResult forward(const DenseNet& net, const Matrix& x, const std::vector<int>& y,
                      ForwardCache* cache = nullptr);

struct Gradients {
    Matrix g1, g2, g3;
};

// Exact backprop gradients of the mean cross entropy.
Gradients backward(const DenseNet& net, const Matrix& x, const std::vector<int>& y,
                   const ForwardCache& cache);

// How one gradient product is run through the straggler pipeline.
struct CodedMatmulConfig {
    Strategy strategy = Strategy::Now;
    int workers = 15;
    double time_scale = 1.0;  // per-worker completion-rate multiplier
    std::vector<double> gamma = {0.35, 0.35, 0.3};
    WindowSampling sampling = WindowSampling::PerClass;
    int levels = 3;
    int grid = 3;  // grid x grid sub-products per product
};

// Encoding parameters per strategy: worker count and the rate multiplier that
// keeps the total compute budget of every configuration equal to the
// grid*grid-worker uncoded reference.
CodedMatmulConfig encoding_defaults(Strategy strategy, int grid = 3);

// left*right through the pipeline: rows/columns permuted by descending norm,
// padded to the block grid, blocks classified by norm into `levels` quantile
// levels, encoded, passed through arrival sampling with deadline t_max,
// decoded with zero fill, then unpadded and unpermuted.
Matrix coded_matmul(const Matrix& left, const Matrix& right,
                    const CodedMatmulConfig& config, double rate, double t_max,
                    std::mt19937_64& rng);

// One SGD step with each layer's weight-gradient product computed through the
// coded pipeline. Grad-input products stay exact unless code_grad_inputs.
void coded_grad_step(DenseNet& net, const Matrix& x, const std::vector<int>& y,
                     const CodedMatmulConfig& config, double rate, double t_max,
                     double lr, std::mt19937_64& rng, bool code_grad_inputs = false);

void sgd_step(DenseNet& net, const Gradients& grads, double lr);

struct TrainConfig {
    std::string strategy = "baseline";  // baseline | now | ew | uncoded | blockrep
    double t_max = 1.0;
    double rate = 0.5;
    double lr = 0.01;
    int batch = 64;
    int epochs = 1;
    int eval_every = 50;
    int eval_limit = 2000;
    int hidden1 = 100;
    int hidden2 = 200;
    std::uint64_t seed = 1;
    bool code_grad_inputs = false;
};

struct AccuracyPoint {
    int iteration = 0;
    double accuracy = 0.0;
};

// SGD training loop; accuracy on (a prefix of) the test set every
// eval_every iterations and at the end. The weight initialization, batch
// order and per-step coding randomness depend only on config.seed and the
// step index, so runs with different t_max share their random streams.
std::vector<AccuracyPoint> train_and_evaluate(const TrainConfig& config,
                                              const Dataset& train,
                                              const Dataset& test);

}  // namespace uep
