#include "mcqn/region.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>

#include "mcqn/parallel.hpp"
#include "mcqn/rng.hpp"

namespace mcqn {

namespace {

constexpr double kDegree = std::numbers::pi / 180.0;

double angle_in(const std::vector<double>& p, CoordinatePlane plane) {
    return std::atan2(p[plane.second], p[plane.first]) / kDegree;
}

}  // namespace

std::vector<RayDirection> generate_rays(std::size_t dim, CoordinatePlane plane, std::size_t count,
                                        bool include_axes) {
    if (dim < 2) throw DomainError("ray generation needs dimension >= 2");
    if (count < 1) throw DomainError("ray count must be >= 1");
    if (plane.first >= dim || plane.second >= dim || plane.first == plane.second)
        throw DomainError("plane must name two distinct classes of the network");
    std::vector<double> angles;
    if (include_axes) angles.push_back(0.0);
    for (std::size_t j = 1; j <= count; ++j)
        angles.push_back(90.0 * static_cast<double>(j) / static_cast<double>(count + 1));
    if (include_axes) angles.push_back(90.0);

    std::vector<RayDirection> rays;
    for (double a : angles) {
        std::vector<double> v(dim, 0.0);
        // Exact zeros on the axes rather than cos(90 deg) roundoff.
        v[plane.first] = a == 90.0 ? 0.0 : std::cos(a * kDegree);
        v[plane.second] = a == 0.0 ? 0.0 : std::sin(a * kDegree);
        rays.emplace_back(std::move(v));
    }
    return rays;
}

std::size_t RaySweepResult::failures() const {
    return static_cast<std::size_t>(std::count_if(errors.begin(), errors.end(), [](const auto& e) { return !e.empty(); }));
}

RaySweepResult sweep(const Network& network, const std::vector<RayDirection>& rays, const RMSchedule& schedule,
                     std::uint64_t seed, std::size_t jobs) {
    schedule.check();
    RaySweepResult result;
    result.rays = rays;
    result.thresholds.resize(rays.size());
    result.boundary_points.resize(rays.size());
    result.errors.resize(rays.size());
    parallel_for(rays.size(), jobs, [&](std::size_t j) {
        try {
            auto estimate = estimate_threshold(network, rays[j], schedule, derive_seed(seed, j));
            result.boundary_points[j] = rays[j].at(estimate.theta_hat);
            result.thresholds[j] = std::move(estimate);
        } catch (const Error& e) {
            result.errors[j] = e.what();
        }
    });
    return result;
}

std::optional<CoordinatePlane> common_plane(const std::vector<std::vector<double>>& points) {
    if (points.empty()) return std::nullopt;
    const auto dim = points.front().size();
    std::vector<ClassId> support;
    for (ClassId k = 0; k < dim; ++k) {
        const bool used = std::any_of(points.begin(), points.end(), [&](const auto& p) {
            return p.size() != dim || p[k] != 0.0;
        });
        if (used) support.push_back(k);
    }
    if (support.size() > 2 || dim < 2) return std::nullopt;
    if (support.size() == 2) return CoordinatePlane{support[0], support[1]};
    if (support.empty()) return CoordinatePlane{0, 1};
    const auto k = support[0];
    return k + 1 < dim ? CoordinatePlane{k, k + 1} : CoordinatePlane{k - 1, k};
}

BoundaryPolyline interpolate_boundary(const RaySweepResult& result) {
    std::vector<std::vector<double>> valid;
    for (std::size_t j = 0; j < result.rays.size(); ++j)
        if (result.ok(j)) valid.push_back(result.boundary_points[j]);
    if (valid.size() < 2) throw DomainError("boundary interpolation needs at least two valid points");
    const auto plane = common_plane(valid);
    if (!plane) throw DomainError("dimension error: boundary points do not lie in one coordinate 2-plane");

    std::vector<std::size_t> order(valid.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> angles(valid.size());
    for (std::size_t j = 0; j < valid.size(); ++j) angles[j] = angle_in(valid[j], *plane);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return angles[a] < angles[b]; });

    BoundaryPolyline line;
    line.plane = *plane;
    for (auto j : order) {
        line.points.push_back({valid[j][plane->first], valid[j][plane->second]});
        line.angles_degrees.push_back(angles[j]);
    }
    line.axis_start = {std::hypot(line.points.front()[0], line.points.front()[1]), 0.0};
    line.axis_end = {0.0, std::hypot(line.points.back()[0], line.points.back()[1])};
    return line;
}

void write_sweep_csv(std::ostream& out, const RaySweepResult& result) {
    const auto dim = result.rays.empty() ? 0 : result.rays.front().dimension();
    std::vector<std::vector<double>> directions;
    for (const auto& r : result.rays) directions.push_back(r.direction());
    const auto plane = common_plane(directions);

    out << "ray_index,angle_degrees";
    for (std::size_t k = 1; k <= dim; ++k) out << ",v_" << k;
    out << ",theta_bar,theta_hat";
    for (std::size_t k = 1; k <= dim; ++k) out << ",b_" << k;
    out << ",error\n";
    const auto precision = out.precision(10);
    for (std::size_t j = 0; j < result.rays.size(); ++j) {
        const auto& v = result.rays[j].direction();
        out << j + 1 << ',';
        if (plane) out << angle_in(v, *plane);
        for (double x : v) out << ',' << x;
        if (result.ok(j)) {
            out << ',' << result.thresholds[j].theta_bar << ',' << result.thresholds[j].theta_hat;
            for (double x : result.boundary_points[j]) out << ',' << x;
            out << ",\n";
        } else {
            out << ",,";
            for (std::size_t k = 0; k < dim; ++k) out << ',';
            std::string message = result.errors[j];
            std::replace(message.begin(), message.end(), '"', '\'');
            out << ",\"" << message << "\"\n";
        }
    }
    out.precision(precision);
}

nlohmann::json sweep_json(const RaySweepResult& result, const std::optional<BoundaryPolyline>& polyline) {
    nlohmann::json rays = nlohmann::json::array();
    for (std::size_t j = 0; j < result.rays.size(); ++j) {
        nlohmann::json ray{{"index", j + 1}, {"direction", result.rays[j].direction()}};
        if (result.ok(j)) {
            const auto& t = result.thresholds[j];
            ray["theta_bar"] = t.theta_bar;
            ray["theta_hat"] = t.theta_hat;
            ray["final_iterate"] = t.final_iterate;
            ray["clamped_fraction"] = t.clamped_fraction;
            ray["boundary_point"] = result.boundary_points[j];
        } else {
            ray["error"] = result.errors[j];
        }
        rays.push_back(std::move(ray));
    }
    nlohmann::json doc{{"rays", std::move(rays)}};
    if (polyline) {
        doc["polyline"] = {
            {"plane", {polyline->plane.first + 1, polyline->plane.second + 1}},
            {"points", polyline->points},
            {"angles_degrees", polyline->angles_degrees},
            {"axis_start", polyline->axis_start},
            {"axis_end", polyline->axis_end},
        };
    }
    return doc;
}

}  // namespace mcqn
