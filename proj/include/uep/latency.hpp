#pragma once

#include <random>
#include <vector>

namespace uep {

// Exponential straggler model. The per-worker completion CDF is evaluated as
// F(time_scale * t) = 1 - exp(-rate * time_scale * t); time_scale = 1 leaves
// the per-worker distribution untouched, other values rescale worker speed so
// configurations with different worker counts can share a compute budget.
struct LatencyModel {
    double rate = 1.0;
    double time_scale = 1.0;
};

double completion_cdf(const LatencyModel& model, double t);

// W i.i.d. completion times.
std::vector<double> sample_arrivals(const LatencyModel& model, int workers,
                                    std::mt19937_64& rng);

// P(exactly w of W workers finished by t) for w = 0..W.
std::vector<double> arrival_pmf(const LatencyModel& model, int workers, double t);

}  // namespace uep
