#include "uep/latency.hpp"

#include <cmath>
#include <stdexcept>

namespace uep {

double completion_cdf(const LatencyModel& model, double t) {
    if (model.rate <= 0 || model.time_scale <= 0)
        throw std::invalid_argument("latency model needs positive rate and scale");
    if (t <= 0) return 0.0;
    return -std::expm1(-model.rate * model.time_scale * t);
}

std::vector<double> sample_arrivals(const LatencyModel& model, int workers,
                                    std::mt19937_64& rng) {
    if (workers < 1) throw std::invalid_argument("sample_arrivals: workers < 1");
    if (model.rate <= 0 || model.time_scale <= 0)
        throw std::invalid_argument("latency model needs positive rate and scale");
    std::exponential_distribution<double> dist(model.rate * model.time_scale);
    std::vector<double> arrivals(workers);
    for (double& t : arrivals) t = dist(rng);
    return arrivals;
}

std::vector<double> arrival_pmf(const LatencyModel& model, int workers, double t) {
    std::vector<double> pmf(workers + 1, 0.0);
    if (t <= 0) {
        pmf[0] = 1.0;
        return pmf;
    }
    if (std::isinf(t)) {
        pmf[workers] = 1.0;
        return pmf;
    }
    // survival exponent is known in closed form, which keeps the tail exact
    const double log_sf = -model.rate * model.time_scale * t;
    const double f = -std::expm1(log_sf);
    if (f <= 0.0) {
        pmf[0] = 1.0;
        return pmf;
    }
    const double log_f = std::log(f);
    const double lg_n = std::lgamma(workers + 1.0);
    for (int w = 0; w <= workers; ++w) {
        const double lchoose = lg_n - std::lgamma(w + 1.0) - std::lgamma(workers - w + 1.0);
        pmf[w] = std::exp(lchoose + w * log_f + (workers - w) * log_sf);
    }
    return pmf;
}

}  // namespace uep
