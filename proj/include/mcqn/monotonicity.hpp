#pragma once

// Monte-Carlo audit of stochastic monotonicity: the transient functional
// phi_t(theta) = E_theta[exp(-alpha N_t)] from the empty state on a
// (theta, t) grid, and a noise-aware check that it is non-increasing in both.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "mcqn/ctmc.hpp"

namespace mcqn {

struct PhiSurface {
    std::vector<double> theta_grid;
    std::vector<double> t_grid;
    std::vector<std::vector<double>> estimates;   ///< [theta index][t index]
    std::vector<std::vector<double>> std_errors;  ///< same shape
    std::size_t replications = 0;
};

struct SurfaceOptions {
    double alpha = 1.0;
    std::uint64_t event_cap = 100'000'000;
    std::size_t jobs = 1;
};

/// Cell (i, j) averages `replications` runs on streams derive_seed(seed, {i, j, r}).
/// Throws DomainError if a grid is empty, not strictly increasing or negative,
/// or replications == 0.
PhiSurface estimate_surface(const Network& network, const RayDirection& ray, const std::vector<double>& theta_grid,
                            const std::vector<double>& t_grid, std::size_t replications, std::uint64_t seed,
                            const SurfaceOptions& options = {});

struct MonotoneFlag {
    enum class Axis { theta, t };
    Axis axis = Axis::theta;
    std::size_t theta_index = 0;  ///< lower cell of the pair
    std::size_t t_index = 0;
    double increase = 0.0;
    double allowance = 0.0;  ///< multiplier * combined standard error
};

struct MonotoneReport {
    bool pass = true;
    double noise_multiplier = 3.0;
    std::vector<MonotoneFlag> flags;
    /// Heuristic view of the large-t limit: the last t column and, per
    /// adjacent theta pair, whether it strictly decreases. Simulation cannot
    /// certify a limit, so this never affects `pass`.
    double limit_t = 0.0;
    std::vector<double> limit_column;
    std::vector<bool> limit_strictly_decreasing;
};

/// Flags every adjacent pair where the estimate rises by more than
/// multiplier * sqrt(se_a^2 + se_b^2). PASS iff nothing is flagged.
MonotoneReport check_monotone(const PhiSurface& surface, double noise_multiplier = 3.0);

/// theta,t,phi_hat,std_err,replications
void write_surface_csv(std::ostream& out, const PhiSurface& surface);
nlohmann::json surface_json(const PhiSurface& surface);
nlohmann::json verdict_json(const MonotoneReport& report);

}  // namespace mcqn
