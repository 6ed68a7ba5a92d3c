#include "mcqn/monotonicity.hpp"

#include <cmath>
#include <ostream>

#include "mcqn/parallel.hpp"
#include "mcqn/rng.hpp"

namespace mcqn {

namespace {

void check_grid(const std::vector<double>& grid, const char* name) {
    if (grid.empty()) throw DomainError(std::string(name) + " grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] >= 0.0) || !std::isfinite(grid[i]))
            throw DomainError(std::string(name) + " grid values must be finite and >= 0");
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw DomainError(std::string(name) + " grid must be strictly increasing");
    }
}

const char* to_string(MonotoneFlag::Axis axis) { return axis == MonotoneFlag::Axis::theta ? "theta" : "t"; }

}  // namespace

PhiSurface estimate_surface(const Network& network, const RayDirection& ray, const std::vector<double>& theta_grid,
                            const std::vector<double>& t_grid, std::size_t replications, std::uint64_t seed,
                            const SurfaceOptions& options) {
    check_grid(theta_grid, "theta");
    check_grid(t_grid, "t");
    if (replications == 0) throw DomainError("replications must be >= 1");
    if (ray.dimension() != network.class_count()) throw DomainError("ray dimension does not match the network");

    PhiSurface surface;
    surface.theta_grid = theta_grid;
    surface.t_grid = t_grid;
    surface.replications = replications;
    const auto rows = theta_grid.size();
    const auto cols = t_grid.size();
    surface.estimates.assign(rows, std::vector<double>(cols, 0.0));
    surface.std_errors.assign(rows, std::vector<double>(cols, 0.0));

    SimulationOptions sim;
    sim.alpha = options.alpha;
    sim.event_cap = options.event_cap;
    parallel_for(rows * cols, options.jobs, [&](std::size_t cell) {
        const auto i = cell / cols;
        const auto j = cell % cols;
        const auto theta = ray.at(theta_grid[i]);
        double sum = 0.0;
        double sum_sq = 0.0;
        for (std::size_t r = 0; r < replications; ++r) {
            const double z = simulate(network, theta, t_grid[j], derive_seed(seed, {i, j, r}), sim).functional_value;
            sum += z;
            sum_sq += z * z;
        }
        const auto n = static_cast<double>(replications);
        const double mean = sum / n;
        surface.estimates[i][j] = mean;
        if (replications > 1) {
            const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
            surface.std_errors[i][j] = std::sqrt(var / n);
        }
    });
    return surface;
}

MonotoneReport check_monotone(const PhiSurface& surface, double noise_multiplier) {
    MonotoneReport report;
    report.noise_multiplier = noise_multiplier;
    const auto rows = surface.estimates.size();
    const auto cols = rows ? surface.estimates.front().size() : 0;
    auto compare = [&](MonotoneFlag::Axis axis, std::size_t i, std::size_t j, std::size_t i2, std::size_t j2) {
        const double rise = surface.estimates[i2][j2] - surface.estimates[i][j];
        const double allowance =
            noise_multiplier * std::hypot(surface.std_errors[i][j], surface.std_errors[i2][j2]);
        if (rise > allowance) report.flags.push_back({axis, i, j, rise, allowance});
    };
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            if (i + 1 < rows) compare(MonotoneFlag::Axis::theta, i, j, i + 1, j);
            if (j + 1 < cols) compare(MonotoneFlag::Axis::t, i, j, i, j + 1);
        }
    report.pass = report.flags.empty();

    if (cols > 0) {
        report.limit_t = surface.t_grid.back();
        for (std::size_t i = 0; i < rows; ++i) report.limit_column.push_back(surface.estimates[i].back());
        for (std::size_t i = 0; i + 1 < rows; ++i)
            report.limit_strictly_decreasing.push_back(report.limit_column[i + 1] < report.limit_column[i]);
    }
    return report;
}

void write_surface_csv(std::ostream& out, const PhiSurface& surface) {
    out << "theta,t,phi_hat,std_err,replications\n";
    const auto precision = out.precision(10);
    for (std::size_t i = 0; i < surface.theta_grid.size(); ++i)
        for (std::size_t j = 0; j < surface.t_grid.size(); ++j)
            out << surface.theta_grid[i] << ',' << surface.t_grid[j] << ',' << surface.estimates[i][j] << ','
                << surface.std_errors[i][j] << ',' << surface.replications << '\n';
    out.precision(precision);
}

nlohmann::json surface_json(const PhiSurface& surface) {
    return {
        {"theta_grid", surface.theta_grid},
        {"t_grid", surface.t_grid},
        {"estimates", surface.estimates},
        {"std_errors", surface.std_errors},
        {"replications", surface.replications},
    };
}

nlohmann::json verdict_json(const MonotoneReport& report) {
    nlohmann::json flags = nlohmann::json::array();
    for (const auto& f : report.flags)
        flags.push_back({
            {"axis", to_string(f.axis)},
            {"theta_index", f.theta_index + 1},
            {"t_index", f.t_index + 1},
            {"increase", f.increase},
            {"allowance", f.allowance},
        });
    return {
        {"verdict", report.pass ? "PASS" : "FAIL"},
        {"noise_multiplier", report.noise_multiplier},
        {"flags", std::move(flags)},
        {"limit_heuristic",
         {
             {"note", "large-t column only; a limit cannot be certified by finite-horizon simulation"},
             {"t", report.limit_t},
             {"column", report.limit_column},
             {"strictly_decreasing", report.limit_strictly_decreasing},
         }},
    };
}

}  // namespace mcqn
