#include "uep/coding.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace uep {

const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::Now: return "now";
        case Strategy::Ew: return "ew";
        case Strategy::Mds: return "mds";
        case Strategy::Uncoded: return "uncoded";
        case Strategy::BlockRep: return "blockrep";
    }
    return "?";
}

Strategy strategy_from_name(const std::string& name) {
    if (name == "now") return Strategy::Now;
    if (name == "ew") return Strategy::Ew;
    if (name == "mds") return Strategy::Mds;
    if (name == "uncoded") return Strategy::Uncoded;
    if (name == "blockrep") return Strategy::BlockRep;
    throw std::invalid_argument("unknown strategy '" + name +
                                "' (valid: now, ew, mds, uncoded, blockrep)");
}

void WindowDistribution::validate() const {
    if (gamma.empty()) throw std::invalid_argument("window distribution is empty");
    double sum = 0;
    for (double g : gamma) {
        if (g < 0) throw std::invalid_argument("window probability is negative");
        sum += g;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("window probabilities sum to " + std::to_string(sum));
}

namespace {

int sample_categorical(const std::vector<double>& weights, std::mt19937_64& rng) {
    double total = 0;
    for (double w : weights) total += w;
    std::uniform_real_distribution<double> unit(0.0, total);
    double u = unit(rng);
    for (std::size_t i = 0; i < weights.size(); ++i) {
        u -= weights[i];
        if (u <= 0) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size()) - 1;
}

void fill_real(std::vector<double>& coeffs, const std::vector<int>& support,
               std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int i : support) coeffs[i] = dist(rng);
}

void fill_prime(std::vector<std::uint32_t>& coeffs, const std::vector<int>& support,
                std::mt19937_64& rng) {
    std::uniform_int_distribution<std::uint32_t> dist(1u, fp::kPrime - 1);
    for (int i : support) coeffs[i] = dist(rng);
}

std::vector<int> now_support(const std::vector<std::vector<int>>& blocks_at, int level) {
    return blocks_at[level - 1];
}

std::vector<int> ew_support(const std::vector<std::vector<int>>& blocks_at, int level) {
    std::vector<int> support;
    for (int s = 1; s <= level; ++s)
        support.insert(support.end(), blocks_at[s - 1].begin(), blocks_at[s - 1].end());
    return support;
}

CodedTask make_window_task(const ClassProfile& profile, const WindowChoice& choice,
                           FieldKind field, std::mt19937_64& rng, Strategy strategy,
                           const std::vector<int>& row_support,
                           const std::vector<int>& col_support) {
    if (row_support.empty() || col_support.empty())
        throw std::runtime_error("encode: empty window at levels (" +
                                 std::to_string(choice.row_level) + "," +
                                 std::to_string(choice.col_level) + ")");
    CodedTask task;
    task.strategy = strategy;
    task.field = field;
    task.cls = choice.cls;
    task.row_window = choice.row_level;
    task.col_window = choice.col_level;
    if (field == FieldKind::Real) {
        task.alpha.assign(profile.num_row_blocks(), 0.0);
        task.beta.assign(profile.num_col_blocks(), 0.0);
        fill_real(task.alpha, row_support, rng);
        fill_real(task.beta, col_support, rng);
    } else {
        task.alpha_fp.assign(profile.num_row_blocks(), 0u);
        task.beta_fp.assign(profile.num_col_blocks(), 0u);
        fill_prime(task.alpha_fp, row_support, rng);
        fill_prime(task.beta_fp, col_support, rng);
    }
    return task;
}

}  // namespace

WindowChoice sample_window(const WindowDistribution& dist, const ClassProfile& profile,
                           std::mt19937_64& rng, WindowSampling sampling) {
    dist.validate();
    WindowChoice choice;
    if (sampling == WindowSampling::PerSide) {
        if (static_cast<int>(dist.gamma.size()) != profile.levels)
            throw std::invalid_argument("per-side sampling needs one probability per level");
        choice.row_level = 1 + sample_categorical(dist.gamma, rng);
        choice.col_level = 1 + sample_categorical(dist.gamma, rng);
        choice.cls = profile.class_of_levels(choice.row_level, choice.col_level);
        return choice;
    }
    if (static_cast<int>(dist.gamma.size()) != profile.classes)
        throw std::invalid_argument("window distribution size != number of classes");
    choice.cls = 1 + sample_categorical(dist.gamma, rng);
    const auto& pairs = profile.class_pairs[choice.cls - 1];
    if (pairs.empty())
        throw std::runtime_error("sampled class " + std::to_string(choice.cls) +
                                 " holds no sub-products");
    std::vector<double> weights(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i)
        weights[i] = static_cast<double>(pairs[i].subproducts);
    const auto& pair = pairs[sample_categorical(weights, rng)];
    choice.row_level = pair.row_level;
    choice.col_level = pair.col_level;
    return choice;
}

CodedTask encode_now(const ClassProfile& profile, const WindowChoice& choice,
                     FieldKind field, std::mt19937_64& rng) {
    return make_window_task(profile, choice, field, rng, Strategy::Now,
                            now_support(profile.row_blocks_at, choice.row_level),
                            now_support(profile.col_blocks_at, choice.col_level));
}

CodedTask encode_ew(const ClassProfile& profile, const WindowChoice& choice,
                    FieldKind field, std::mt19937_64& rng) {
    return make_window_task(profile, choice, field, rng, Strategy::Ew,
                            ew_support(profile.row_blocks_at, choice.row_level),
                            ew_support(profile.col_blocks_at, choice.col_level));
}

CodedTask encode_mds(int row_blocks, int col_blocks, FieldKind field,
                     std::mt19937_64& rng) {
    CodedTask task;
    task.strategy = Strategy::Mds;
    task.field = field;
    std::vector<int> all_rows(row_blocks), all_cols(col_blocks);
    for (int i = 0; i < row_blocks; ++i) all_rows[i] = i;
    for (int i = 0; i < col_blocks; ++i) all_cols[i] = i;
    if (field == FieldKind::Real) {
        task.alpha.assign(row_blocks, 0.0);
        task.beta.assign(col_blocks, 0.0);
        fill_real(task.alpha, all_rows, rng);
        fill_real(task.beta, all_cols, rng);
    } else {
        task.alpha_fp.assign(row_blocks, 0u);
        task.beta_fp.assign(col_blocks, 0u);
        fill_prime(task.alpha_fp, all_rows, rng);
        fill_prime(task.beta_fp, all_cols, rng);
    }
    return task;
}

namespace {
CodedTask indicator_task(int row_blocks, int col_blocks, int worker, Strategy strategy) {
    CodedTask task;
    task.worker = worker;
    task.strategy = strategy;
    task.field = FieldKind::Real;
    const int block = worker % (row_blocks * col_blocks);
    task.alpha.assign(row_blocks, 0.0);
    task.beta.assign(col_blocks, 0.0);
    task.alpha[block / col_blocks] = 1.0;
    task.beta[block % col_blocks] = 1.0;
    task.alpha_fp.assign(row_blocks, 0u);
    task.beta_fp.assign(col_blocks, 0u);
    task.alpha_fp[block / col_blocks] = 1u;
    task.beta_fp[block % col_blocks] = 1u;
    return task;
}
}  // namespace

CodedTask encode_uncoded(int row_blocks, int col_blocks, int worker) {
    return indicator_task(row_blocks, col_blocks, worker, Strategy::Uncoded);
}

CodedTask encode_block_rep(int row_blocks, int col_blocks, int worker) {
    return indicator_task(row_blocks, col_blocks, worker, Strategy::BlockRep);
}

std::vector<double> coefficient_row(const CodedTask& task) {
    std::vector<double> g(task.alpha.size() * task.beta.size());
    std::size_t k = 0;
    for (double a : task.alpha)
        for (double b : task.beta) g[k++] = a * b;
    return g;
}

std::vector<std::uint32_t> coefficient_row_fp(const CodedTask& task) {
    std::vector<std::uint32_t> g(task.alpha_fp.size() * task.beta_fp.size());
    std::size_t k = 0;
    for (std::uint32_t a : task.alpha_fp)
        for (std::uint32_t b : task.beta_fp) g[k++] = fp::mul(a, b);
    return g;
}

Matrix coded_left(const BlockPartition& a, const CodedTask& task) {
    Matrix w = Matrix::Zero(a.block_span, a.elements.cols());
    for (int n = 0; n < a.num_blocks; ++n)
        if (task.alpha[n] != 0.0) w += task.alpha[n] * a.block(n);
    return w;
}

Matrix coded_right(const BlockPartition& b, const CodedTask& task) {
    Matrix w = Matrix::Zero(b.elements.rows(), b.block_span);
    for (int p = 0; p < b.num_blocks; ++p)
        if (task.beta[p] != 0.0) w += task.beta[p] * b.block(p);
    return w;
}

Matrix coded_product(const BlockPartition& a, const BlockPartition& b,
                     const CodedTask& task) {
    return coded_left(a, task) * coded_right(b, task);
}

}  // namespace uep
