#pragma once

// Robbins-Monro search for the root of E[phi(X_t)] = epsilon along a ray,
// clamped to [0, theta_bar], with iterate averaging.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mcqn/ctmc.hpp"
#include "mcqn/network.hpp"

namespace mcqn {

enum class HorizonGrowth { constant, logarithmic, power };

struct RMSchedule {
    double epsilon = 1e-4;
    double gain_c1 = 100.0;      ///< gain b_n = c1 / n^omega
    double gain_omega = 0.75;
    double horizon_c2 = 1000.0;  ///< t_n = c2, c2 ln(1+n) or c2 n^gamma
    HorizonGrowth horizon_growth = HorizonGrowth::logarithmic;
    double horizon_gamma = 1.0;  ///< exponent for HorizonGrowth::power
    std::size_t iterations = 10'000;
    std::optional<double> theta_init;  ///< defaults to theta_bar / 2
    double averaging_burn_in = 0.1;    ///< fraction of leading iterates not averaged
    double alpha = 1.0;                ///< test functional exp(-alpha * jobs)
    std::uint64_t event_cap = 100'000'000;

    /// Throws DomainError on out-of-range parameters.
    void check() const;
    [[nodiscard]] double gain(std::size_t n) const;
    [[nodiscard]] double horizon(std::size_t n) const;
};

/// One Robbins-Monro update: min(theta_bar, max(theta + b (z - epsilon), 0)).
double rm_step(double theta, double z, double gain, double epsilon, double theta_bar);

struct IterateRecord {
    std::size_t n = 0;
    double theta = 0.0;    ///< iterate at which z was sampled
    double z = 0.0;
    double gain = 0.0;
    double horizon = 0.0;
};

struct ThresholdEstimate {
    double theta_hat = 0.0;
    double final_iterate = 0.0;            ///< iterate after the last update
    std::vector<double> iterate_trace;     ///< iterates 1..n (the sampling points)
    std::vector<IterateRecord> records;    ///< per-step details, same length
    double theta_bar = 0.0;
    std::size_t clamp_events = 0;          ///< updates that hit 0 or theta_bar
    double clamped_fraction = 0.0;         ///< of averaged iterates sitting on a bound
    bool clamp_warning = false;            ///< clamped_fraction > 0.5
    std::uint64_t total_events = 0;

    [[nodiscard]] std::string diagnostics() const;
};

/// Draws Z_n given the current iterate, step index and horizon.
using ZSampler = std::function<double(double theta, std::size_t n, double horizon)>;

/// Runs the recursion with an arbitrary sampler; the engine-backed estimator
/// and the noise-free oracle recursion both go through here.
ThresholdEstimate run_robbins_monro(const RMSchedule& schedule, double theta_bar, const ZSampler& sample);

/// Simulation-backed estimate along `ray`. Iterate n runs a fresh simulation
/// from the empty state to t_n on stream derive_seed(seed, n).
ThresholdEstimate estimate_threshold(const Network& network, const RayDirection& ray, const RMSchedule& schedule,
                                     std::uint64_t seed);

/// CSV: n,theta_n,z_n,b_n,t_n
void write_iterate_trace(std::ostream& out, const ThresholdEstimate& estimate);

struct OracleRoots {
    double theta_star = 0.0;
    double theta_eps = 0.0;
};

struct ErrorReport {
    bool has_oracle = false;
    double absolute_error = 0.0;     ///< |theta_hat - theta_star|
    double random_part = 0.0;        ///< |theta_hat - theta_eps|
    double deterministic_part = 0.0; ///< theta_star - theta_eps
    double trace_std = 0.0;          ///< standard deviation of the averaged iterates
};

ErrorReport error_decomposition(const ThresholdEstimate& estimate, const std::optional<OracleRoots>& oracle);

}  // namespace mcqn
