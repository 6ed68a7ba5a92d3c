#include "mcqn/jackson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mcqn {

namespace {

void require_jackson(const Network& network) {
    if (!network.is_jackson()) throw DomainError("not Jackson: some station serves more than one class");
}

}  // namespace

JacksonOracle::JacksonOracle(std::vector<double> deltas, double alpha)
    : deltas_(std::move(deltas)), alpha_(alpha), theta_star_(std::numeric_limits<double>::infinity()) {
    if (!(alpha_ > 0.0)) throw DomainError("alpha must be > 0");
    for (double d : deltas_) {
        if (!(d > 0.0)) throw DomainError("station thresholds must be > 0");
        theta_star_ = std::min(theta_star_, d);
    }
    if (!std::isfinite(theta_star_)) throw DomainError("at least one station threshold must be finite");
}

JacksonOracle JacksonOracle::along_ray(const Network& network, const RayDirection& ray, double alpha) {
    require_jackson(network);
    return JacksonOracle(subcritical_threshold(network, ray).deltas, alpha);
}

double JacksonOracle::phi(double theta) const {
    if (!(theta >= 0.0) || !(theta < theta_star_))
        throw DomainError("closed-form functional is only defined on [0, theta*)");
    const double decay = std::exp(-alpha_);
    double value = 1.0;
    for (double d : deltas_) {
        if (!std::isfinite(d)) continue;
        const double r = theta / d;
        value *= (1.0 - r) / (1.0 - r * decay);
    }
    return value;
}

double JacksonOracle::phi_limit(double theta) const { return theta >= theta_star_ ? 0.0 : phi(std::max(theta, 0.0)); }

double JacksonOracle::theta_eps(double epsilon) const {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw DomainError("epsilon must lie in (0, 1]");
    if (epsilon == 1.0) return 0.0;
    double lo = 0.0;
    double hi = theta_star_;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (phi(mid) > epsilon)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

RegionPredicate exact_stability_region(const Network& network) {
    require_jackson(network);
    return [network](const std::vector<double>& theta) {
        const auto rho = traffic_rates(network, theta);
        return std::all_of(rho.begin(), rho.end(), [](double r) { return r < 1.0; });
    };
}

double geometric_pmf(double utilization, std::size_t n) {
    return (1.0 - utilization) * std::pow(utilization, static_cast<double>(n));
}

std::vector<double> station_utilizations(const Network& network, const std::vector<double>& theta) {
    require_jackson(network);
    return traffic_rates(network, theta);
}

}  // namespace mcqn
