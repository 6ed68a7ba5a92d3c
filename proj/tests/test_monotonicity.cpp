#include "doctest.h"

#include <cmath>
#include <sstream>

#include "mcqn/jackson.hpp"
#include "mcqn/monotonicity.hpp"
#include "networks.hpp"

using namespace mcqn;
using namespace mcqn::testing;

namespace {

PhiSurface flat_surface(double value, double se) {
    PhiSurface s;
    s.theta_grid = {0.1, 0.2, 0.3};
    s.t_grid = {0.0, 10.0, 20.0};
    s.estimates.assign(3, std::vector<double>(3, value));
    s.std_errors.assign(3, std::vector<double>(3, se));
    s.replications = 100;
    return s;
}

double mean_se(const PhiSurface& s) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& row : s.std_errors)
        for (double x : row) {
            sum += x;
            ++n;
        }
    return sum / static_cast<double>(n);
}

}  // namespace

TEST_SUITE("monotonicity audit") {
    TEST_CASE("t = 0 from the empty state is exactly one") {
        const Network n(bramson_dai_spec());
        const auto s = estimate_surface(n, RayDirection({1, 0, 0, 0, 0, 0}), {0.3, 0.6}, {0.0}, 20, 1);
        for (const auto& row : s.estimates) CHECK(row[0] == 1.0);
        for (const auto& row : s.std_errors) CHECK(row[0] == 0.0);
        CHECK(check_monotone(s).pass);
    }

    TEST_CASE("Kelly line cell at theta 0.30, t = 40") {
        const Network n(lu_kumar_kelly());
        const auto s = estimate_surface(n, RayDirection({1, 0, 0, 0}), {0.3}, {40.0}, 4000, 8);
        CHECK(s.estimates[0][0] == doctest::Approx(0.44).epsilon(0.02 / 0.44));
    }

    TEST_CASE("surface estimates stay in [0, 1] and a single replication still works") {
        const Network n(lu_kumar_classic());
        const auto s = estimate_surface(n, RayDirection({1, 0, 0, 0}), {0.2, 0.9}, {0.0, 5.0, 30.0}, 1, 4);
        for (const auto& row : s.estimates)
            for (double x : row) {
                CHECK(x >= 0.0);
                CHECK(x <= 1.0);
            }
        const auto report = check_monotone(s);
        CHECK(report.limit_column.size() == 2);
    }

    TEST_CASE("grid and replication errors") {
        const Network n(lu_kumar_classic());
        const RayDirection ray({1, 0, 0, 0});
        CHECK_THROWS_AS(estimate_surface(n, ray, {0.2, 0.2}, {1.0}, 1, 1), DomainError);
        CHECK_THROWS_AS(estimate_surface(n, ray, {0.2}, {}, 1, 1), DomainError);
        CHECK_THROWS_AS(estimate_surface(n, ray, {0.2}, {-1.0}, 1, 1), DomainError);
        CHECK_THROWS_AS(estimate_surface(n, ray, {0.2}, {1.0}, 0, 1), DomainError);
    }

    TEST_CASE("constant surface passes") {
        const auto report = check_monotone(flat_surface(0.4, 0.0));
        CHECK(report.pass);
        CHECK(report.flags.empty());
    }

    TEST_CASE("a single jump fails and names the pair") {
        auto s = flat_surface(0.4, 1e-4);
        s.estimates[2][1] = 0.9;
        const auto report = check_monotone(s);
        CHECK_FALSE(report.pass);
        bool theta_pair = false, t_pair = false;
        for (const auto& f : report.flags) {
            if (f.axis == MonotoneFlag::Axis::theta && f.theta_index == 1 && f.t_index == 1) theta_pair = true;
            if (f.axis == MonotoneFlag::Axis::t && f.theta_index == 2 && f.t_index == 0) t_pair = true;
        }
        CHECK(theta_pair);
        CHECK(t_pair);
        CHECK(report.flags.size() == 2);
        CHECK(verdict_json(report)["verdict"] == "FAIL");
    }

    TEST_CASE("rises within the noise allowance are not flagged") {
        auto s = flat_surface(0.4, 0.01);
        s.estimates[1][1] = 0.44;  // below 3 * sqrt(2) * 0.01
        CHECK(check_monotone(s).pass);
        CHECK_FALSE(check_monotone(s, 2.0).pass);
    }

    TEST_CASE("strict-decrease heuristic on the last column") {
        auto s = flat_surface(0.4, 0.0);
        s.estimates[0][2] = 0.5;
        const auto report = check_monotone(s);
        CHECK(report.limit_t == 20.0);
        CHECK(report.limit_strictly_decreasing == std::vector<bool>{true, false});
    }

    TEST_CASE("property: large-t estimates match the closed form within three standard errors") {
        const Network n(jackson2_spec());
        const RayDirection ray({1.0, 1.0});
        const auto oracle = JacksonOracle::along_ray(n, ray);
        const std::vector<double> grid = {0.3, 0.7, 1.0};
        const auto s = estimate_surface(n, ray, grid, {300.0}, 3000, 21);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            CAPTURE(grid[i]);
            CHECK(std::abs(s.estimates[i][0] - oracle.phi(grid[i])) <= 3.0 * s.std_errors[i][0]);
        }
    }

    TEST_CASE("property: doubling replications shrinks the standard error by 1/sqrt(2)") {
        const Network n(lu_kumar_kelly());
        const RayDirection ray({1, 0, 0, 0});
        const std::vector<double> grid = {0.2, 0.3, 0.4, 0.5};
        const auto a = estimate_surface(n, ray, grid, {10.0, 20.0}, 2000, 5);
        const auto b = estimate_surface(n, ray, grid, {10.0, 20.0}, 4000, 6);
        CHECK(mean_se(b) / mean_se(a) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.15));
    }

    TEST_CASE("deterministic and independent of the worker count") {
        const Network n(lu_kumar_classic());
        const RayDirection ray({1, 0, 0, 0});
        SurfaceOptions serial, parallel;
        parallel.jobs = 4;
        const auto a = estimate_surface(n, ray, {0.2, 0.5}, {0.0, 10.0}, 50, 3, serial);
        const auto b = estimate_surface(n, ray, {0.2, 0.5}, {0.0, 10.0}, 50, 3, parallel);
        CHECK(a.estimates == b.estimates);
        CHECK(a.std_errors == b.std_errors);
    }

    TEST_CASE("CSV dump") {
        std::ostringstream out;
        write_surface_csv(out, flat_surface(0.5, 0.1));
        std::istringstream in(out.str());
        std::string line;
        std::getline(in, line);
        CHECK(line == "theta,t,phi_hat,std_err,replications");
        std::getline(in, line);
        CHECK(line == "0.1,0,0.5,0.1,100");
    }
}
