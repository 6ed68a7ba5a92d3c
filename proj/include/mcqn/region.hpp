#pragma once

// Star-shaped stability region recovery: thresholds along a fan of rays in a
// two-class coordinate plane, joined into a boundary polyline.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "mcqn/robbins_monro.hpp"

namespace mcqn {

/// Two distinct classes spanning the plane (0-based, first < second not required).
struct CoordinatePlane {
    ClassId first = 0;
    ClassId second = 1;
};

/// `count` rays (cos psi_j, sin psi_j) with psi_j = j * 90 / (count + 1)
/// degrees, embedded in `plane` of R^dim. With `include_axes` the rays at 0
/// and 90 degrees are added at the ends. Throws DomainError on bad input.
std::vector<RayDirection> generate_rays(std::size_t dim, CoordinatePlane plane, std::size_t count,
                                        bool include_axes = false);

struct RaySweepResult {
    std::vector<RayDirection> rays;
    std::vector<ThresholdEstimate> thresholds;       ///< default-constructed where the ray failed
    std::vector<std::vector<double>> boundary_points;  ///< empty where the ray failed
    std::vector<std::string> errors;                  ///< empty string where the ray succeeded

    [[nodiscard]] bool ok(std::size_t j) const { return errors[j].empty(); }
    [[nodiscard]] std::size_t failures() const;
};

/// Estimates the threshold on every ray, ray j on stream derive_seed(seed, j).
/// Per-ray errors are recorded in the result; the sweep continues.
RaySweepResult sweep(const Network& network, const std::vector<RayDirection>& rays, const RMSchedule& schedule,
                     std::uint64_t seed, std::size_t jobs = 1);

/// The single coordinate plane containing every point, if there is one.
/// Points on one axis are assigned the plane with the next class index.
std::optional<CoordinatePlane> common_plane(const std::vector<std::vector<double>>& points);

struct BoundaryPolyline {
    CoordinatePlane plane;
    std::vector<std::array<double, 2>> points;  ///< in-plane coordinates, by increasing angle
    std::vector<double> angles_degrees;
    std::array<double, 2> axis_start{};  ///< closure on the first axis: (|p_first|, 0)
    std::array<double, 2> axis_end{};    ///< closure on the second axis: (0, |p_last|)
};

/// Sorts the valid boundary points by angle and closes the curve to both
/// axes with the radii of the extreme points. Throws DomainError with fewer
/// than two valid points, or if they do not share one coordinate 2-plane.
BoundaryPolyline interpolate_boundary(const RaySweepResult& result);

/// ray_index,angle_degrees,v_1..v_d,theta_bar,theta_hat,b_1..b_d,error
void write_sweep_csv(std::ostream& out, const RaySweepResult& result);
nlohmann::json sweep_json(const RaySweepResult& result, const std::optional<BoundaryPolyline>& polyline);

}  // namespace mcqn
