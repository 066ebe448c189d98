#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "uep/analytics.hpp"
#include "uep/class_profile.hpp"
#include "uep/decode.hpp"
#include "uep/latency.hpp"
#include "uep/rng.hpp"
#include "uep/training.hpp"

namespace py = pybind11;
using namespace uep;

namespace {

ClassProfile make_profile(const std::vector<int>& row_levels,
                          const std::vector<int>& col_levels,
                          const std::string& merge) {
    const int levels = *std::max_element(row_levels.begin(), row_levels.end());
    const int col_max = *std::max_element(col_levels.begin(), col_levels.end());
    const int s = std::max(levels, col_max);
    return build_class_profile(row_levels, col_levels,
                               merge == "pairwise" ? pairwise_merge(s)
                                                   : three_class_merge(s));
}

VarianceProfile make_variances(const std::vector<double>& row_var,
                               const std::vector<double>& col_var, int inner_dim,
                               int block_rows, int block_cols) {
    return {row_var, col_var, inner_dim, block_rows, block_cols};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Straggler-resilient coded matrix multiplication: analytics and decoding";

    m.def("binomial_tail", &binomial_tail, py::arg("n"), py::arg("p"), py::arg("k"));

    m.def(
        "now_decoding_bound",
        [](const std::vector<double>& gamma, const std::vector<int>& k, int received) {
            return now_decoding_bound(gamma, k, received);
        },
        py::arg("gamma"), py::arg("k"), py::arg("received"),
        "Per-class decoding-probability bound after `received` packets");

    m.def(
        "expected_loss_now",
        [](const std::vector<double>& gamma, const std::vector<int>& row_levels,
           const std::vector<int>& col_levels, const std::vector<double>& row_var,
           const std::vector<double>& col_var, int inner_dim, int block_rows,
           int block_cols, double rate, double time_scale, int workers, double t,
           int packet_lag) {
            return expected_loss_now({gamma}, make_profile(row_levels, col_levels, "three_class"),
                                     make_variances(row_var, col_var, inner_dim, block_rows,
                                                    block_cols),
                                     {rate, time_scale}, workers, t, packet_lag);
        },
        py::arg("gamma"), py::arg("row_levels"), py::arg("col_levels"),
        py::arg("row_var"), py::arg("col_var"), py::arg("inner_dim"),
        py::arg("block_rows"), py::arg("block_cols"), py::arg("rate"),
        py::arg("time_scale"), py::arg("workers"), py::arg("t"),
        py::arg("packet_lag") = 0);

    m.def(
        "expected_loss_mds",
        [](int k, double rate, double time_scale, int workers, double t) {
            return expected_loss_mds(k, {rate, time_scale}, workers, t);
        },
        py::arg("k"), py::arg("rate"), py::arg("time_scale"), py::arg("workers"),
        py::arg("t"));

    m.def(
        "ew_expected_loss_mc",
        [](const std::vector<double>& gamma, const std::vector<int>& row_levels,
           const std::vector<int>& col_levels, const std::vector<double>& row_var,
           const std::vector<double>& col_var, int inner_dim, int block_rows,
           int block_cols, double rate, double time_scale, int workers, double t,
           long trials, std::uint64_t seed, int threads) {
            const auto estimate = ew_expected_loss_mc(
                {gamma}, make_profile(row_levels, col_levels, "three_class"),
                make_variances(row_var, col_var, inner_dim, block_rows, block_cols),
                {rate, time_scale}, workers, t, trials, seed, threads);
            return py::make_tuple(estimate.mean, estimate.ci_half, estimate.trials);
        },
        py::arg("gamma"), py::arg("row_levels"), py::arg("col_levels"),
        py::arg("row_var"), py::arg("col_var"), py::arg("inner_dim"),
        py::arg("block_rows"), py::arg("block_cols"), py::arg("rate"),
        py::arg("time_scale"), py::arg("workers"), py::arg("t"), py::arg("trials"),
        py::arg("seed"), py::arg("threads") = 1,
        "Full-pipeline Monte Carlo estimate (mean, ci_half, trials)");

    m.def("arrival_pmf",
          [](double rate, double time_scale, int workers, double t) {
              return arrival_pmf({rate, time_scale}, workers, t);
          },
          py::arg("rate"), py::arg("time_scale"), py::arg("workers"), py::arg("t"));

    m.def(
        "decode_products",
        [](const std::vector<std::vector<double>>& coeffs, const std::vector<Matrix>& values,
           int row_blocks, int col_blocks) {
            if (coeffs.size() != values.size())
                throw std::invalid_argument("one coefficient row per product");
            ReceivedSet received;
            received.row_blocks = row_blocks;
            received.col_blocks = col_blocks;
            received.block_rows = values.empty() ? 0 : static_cast<int>(values[0].rows());
            received.block_cols = values.empty() ? 0 : static_cast<int>(values[0].cols());
            for (std::size_t i = 0; i < coeffs.size(); ++i)
                received.products.push_back({coeffs[i], values[i], 0.0});
            const DecodeReport report = decode(received);
            std::vector<bool> mask(report.recovered.begin(), report.recovered.end());
            return py::make_tuple(mask, report.estimate);
        },
        py::arg("coeffs"), py::arg("values"), py::arg("row_blocks"), py::arg("col_blocks"),
        "Recover sub-products from coefficient rows and block products; "
        "returns (mask, assembled estimate with zero fill)");

    m.def(
        "coded_matmul",
        [](const Matrix& left, const Matrix& right, const std::string& strategy,
           double rate, double t_max, std::uint64_t seed) {
            CodedMatmulConfig config = encoding_defaults(strategy_from_name(strategy));
            auto rng = substream(seed, 0);
            return coded_matmul(left, right, config, rate, t_max, rng);
        },
        py::arg("left"), py::arg("right"), py::arg("strategy"), py::arg("rate"),
        py::arg("t_max"), py::arg("seed"),
        "left @ right through the straggler pipeline with zero fill for "
        "unrecovered blocks");

#ifdef UEPMM_VERSION
    m.attr("__version__") = UEPMM_VERSION;
#else
    m.attr("__version__") = "dev";
#endif
}
