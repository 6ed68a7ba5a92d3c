#pragma once

// Closed-form ground truth for single-class-per-station (Jackson) networks:
// product-form stationary law, the limiting functional lim_t E[exp(-alpha N_t)]
// along a ray, its level-epsilon root and the exact stability region.

#include <functional>
#include <vector>

#include "mcqn/network.hpp"

namespace mcqn {

class JacksonOracle {
public:
    /// Per-station thresholds along the active ray (+inf entries allowed for
    /// unloaded stations; at least one must be finite). Throws DomainError.
    explicit JacksonOracle(std::vector<double> deltas, double alpha = 1.0);

    /// Throws DomainError ("not Jackson") if a station serves several classes.
    static JacksonOracle along_ray(const Network& network, const RayDirection& ray, double alpha = 1.0);

    [[nodiscard]] const std::vector<double>& deltas() const noexcept { return deltas_; }
    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    /// Stability threshold theta* = min delta_i.
    [[nodiscard]] double theta_star() const noexcept { return theta_star_; }

    /// prod_i (1 - theta/delta_i) / (1 - e^{-alpha} theta/delta_i) on [0, theta*).
    /// Throws DomainError at or beyond theta*, or for theta < 0.
    [[nodiscard]] double phi(double theta) const;

    /// phi(theta) for theta < theta*, 0 beyond (the limit of the transient
    /// functional on the unstable side).
    [[nodiscard]] double phi_limit(double theta) const;

    /// Unique root of phi(theta) = epsilon on [0, theta*), by bisection to 1e-12.
    [[nodiscard]] double theta_eps(double epsilon) const;

private:
    std::vector<double> deltas_;
    double alpha_;
    double theta_star_;
};

/// Membership test rho_i(theta) < 1 for every station.
using RegionPredicate = std::function<bool(const std::vector<double>& theta)>;

/// Exact stability region of a Jackson network. Throws DomainError if the
/// network is not Jackson.
RegionPredicate exact_stability_region(const Network& network);

/// Stationary law of a single M/M/1 node with utilization r: P(N = n) = (1 - r) r^n.
double geometric_pmf(double utilization, std::size_t n);

/// Per-station utilizations lambda_k / beta_k at the given external rates.
/// Throws DomainError if the network is not Jackson.
std::vector<double> station_utilizations(const Network& network, const std::vector<double>& theta);

}  // namespace mcqn
