#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "mcqn/jackson.hpp"
#include "mcqn/rng.hpp"
#include "mcqn/robbins_monro.hpp"
#include "networks.hpp"

using namespace mcqn;
using namespace mcqn::testing;

namespace {

double mean(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double variance(const std::vector<double>& x) {
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

}  // namespace

TEST_SUITE("robbins-monro") {
    TEST_CASE("rm_step arithmetic and clamps") {
        CHECK(rm_step(0.5, 0.3, 0.1, 0.01, 2.0) == doctest::Approx(0.529));
        CHECK(rm_step(2.0, 0.5, 0.1, 0.01, 2.0) == 2.0);
        CHECK(rm_step(0.001, 0.0, 1.0, 0.01, 2.0) == 0.0);
    }

    TEST_CASE("property: rm_step is monotone in z and stays in [0, theta_bar]") {
        std::mt19937_64 gen(1);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int i = 0; i < 10000; ++i) {
            const double bar = 0.1 + 3.0 * u(gen);
            const double theta = bar * u(gen);
            const double b = 10.0 * u(gen);
            const double eps = u(gen) * 0.1;
            double z1 = u(gen), z2 = u(gen);
            if (z1 > z2) std::swap(z1, z2);
            const double a = rm_step(theta, z1, b, eps, bar);
            const double c = rm_step(theta, z2, b, eps, bar);
            CHECK(a <= c);
            CHECK(a >= 0.0);
            CHECK(c <= bar);
        }
    }

    TEST_CASE("schedule parameters") {
        RMSchedule s;
        s.gain_c1 = 4.0;
        s.gain_omega = 0.5 + 1e-9;
        CHECK_NOTHROW(s.check());
        CHECK(s.gain(4) == doctest::Approx(2.0));
        s.horizon_c2 = 10.0;
        CHECK(s.horizon(1) == doctest::Approx(10.0 * std::log(2.0)));
        s.horizon_growth = HorizonGrowth::constant;
        CHECK(s.horizon(1000) == 10.0);
        s.horizon_growth = HorizonGrowth::power;
        s.horizon_gamma = 0.5;
        CHECK(s.horizon(100) == doctest::Approx(100.0));
        s.gain_omega = 0.5;
        CHECK_THROWS_AS(s.check(), DomainError);
        s.gain_omega = 1.2;
        CHECK_THROWS_AS(s.check(), DomainError);
        s.gain_omega = 1.0;
        s.averaging_burn_in = 1.0;
        CHECK_THROWS_AS(s.check(), DomainError);
    }

    TEST_CASE("property: every iterate lies in [0, theta_bar]") {
        RMSchedule s;
        s.epsilon = 0.2;
        s.gain_c1 = 50.0;
        s.iterations = 5000;
        Rng rng(9);
        const auto e = run_robbins_monro(s, 1.5, [&](double, std::size_t, double) { return rng.uniform_open(); });
        for (double x : e.iterate_trace) {
            CHECK(x >= 0.0);
            CHECK(x <= 1.5);
        }
        CHECK(e.theta_hat >= 0.0);
        CHECK(e.theta_hat <= 1.5);
        CHECK(e.clamp_events > 0);
        CHECK(e.records.size() == 5000);
    }

    TEST_CASE("clamp diagnostic when epsilon is unreachable") {
        RMSchedule s;
        s.epsilon = 1e-3;
        s.gain_c1 = 1.0;
        s.iterations = 200;
        // Z is always far above epsilon, so the iterate pins to theta_bar.
        const auto e = run_robbins_monro(s, 1.0, [](double, std::size_t, double) { return 1.0; });
        CHECK(e.clamp_warning);
        CHECK(e.theta_hat == doctest::Approx(1.0));
        CHECK(e.diagnostics().find("epsilon") != std::string::npos);
    }

    TEST_CASE("averaging skips the burn-in") {
        RMSchedule s;
        s.iterations = 10;
        s.averaging_burn_in = 0.5;
        s.gain_c1 = 1.0;
        s.gain_omega = 1.0;
        s.epsilon = 0.5;
        s.theta_init = 0.5;
        const auto e = run_robbins_monro(s, 10.0, [](double, std::size_t n, double) { return n <= 5 ? 1.5 : 0.5; });
        // Iterates 1..6 climb by 1/n, then stay flat.
        double expected = 0.5;
        for (int n = 1; n <= 5; ++n) expected += 1.0 / n;
        CHECK(e.theta_hat == doctest::Approx(expected));
        s.averaging_burn_in = 0.0;
        const auto all = run_robbins_monro(s, 10.0, [](double, std::size_t n, double) { return n <= 5 ? 1.5 : 0.5; });
        CHECK(all.theta_hat == doctest::Approx(mean(all.iterate_trace)));
    }

    TEST_CASE("noise-free recursion on the closed form converges to its root") {
        const Network n(jackson2_spec());
        for (double v : jackson_slopes()) {
            const auto oracle = JacksonOracle::along_ray(n, RayDirection({1.0, v}));
            for (double eps : {1e-2, 1e-4, 1e-6}) {
                RMSchedule s;
                s.epsilon = eps;
                s.gain_c1 = std::sqrt(1.0 / eps);
                s.gain_omega = 0.75;
                s.iterations = 100'000;
                const auto e = run_robbins_monro(s, oracle.theta_star(),
                                                 [&](double theta, std::size_t, double) { return oracle.phi_limit(theta); });
                CAPTURE(v);
                CAPTURE(eps);
                CHECK(std::abs(e.final_iterate - oracle.theta_eps(eps)) < 1e-4);
            }
        }
    }

    TEST_CASE("property: the averaged estimate varies less than the final iterate") {
        const auto oracle = JacksonOracle::along_ray(Network(jackson2_spec()), RayDirection({1.0, 1.0}));
        RMSchedule s;
        s.epsilon = 0.2;
        s.gain_c1 = 1.0;
        s.gain_omega = 0.6;
        s.iterations = 2000;
        std::vector<double> averaged, last;
        for (std::uint64_t seed = 0; seed < 40; ++seed) {
            Rng rng(seed);
            // Bernoulli observations with mean phi: unbiased and noisy.
            const auto e = run_robbins_monro(s, oracle.theta_star(), [&](double theta, std::size_t, double) {
                return rng.uniform_open() < oracle.phi_limit(theta) ? 1.0 : 0.0;
            });
            averaged.push_back(e.theta_hat);
            last.push_back(e.final_iterate);
        }
        CHECK(variance(averaged) < variance(last));
    }

    TEST_CASE("simulated estimates are reproducible and near the oracle root") {
        const Network n(jackson2_spec());
        const RayDirection ray({1.0, 1.0});
        const auto oracle = JacksonOracle::along_ray(n, ray);
        RMSchedule s;
        s.epsilon = 0.2;
        s.gain_c1 = 1.0;
        s.gain_omega = 0.75;
        s.horizon_c2 = 30.0;
        s.iterations = 400;
        const auto a = estimate_threshold(n, ray, s, 1);
        const auto b = estimate_threshold(n, ray, s, 1);
        CHECK(a.iterate_trace == b.iterate_trace);
        CHECK(a.theta_hat == b.theta_hat);

        std::vector<double> hats;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) hats.push_back(estimate_threshold(n, ray, s, seed).theta_hat);
        const double spread = std::sqrt(variance(hats));
        for (double h : hats) CHECK(std::abs(h - oracle.theta_eps(s.epsilon)) <= 3.0 * spread);
    }

    TEST_CASE("iterate trace CSV") {
        RMSchedule s;
        s.iterations = 3;
        const auto e = run_robbins_monro(s, 1.0, [](double, std::size_t, double) { return 0.5; });
        std::ostringstream out;
        write_iterate_trace(out, e);
        std::istringstream in(out.str());
        std::string line;
        std::getline(in, line);
        CHECK(line == "n,theta_n,z_n,b_n,t_n");
        int rows = 0;
        while (std::getline(in, line)) ++rows;
        CHECK(rows == 3);
    }

    TEST_CASE("error decomposition") {
        ThresholdEstimate e;
        e.theta_hat = 1.997;
        e.iterate_trace = {1.99, 2.0, 2.001};
        const auto r = error_decomposition(e, OracleRoots{2.0, 1.9984});
        CHECK(r.has_oracle);
        CHECK(r.deterministic_part == doctest::Approx(0.0016));
        CHECK(r.random_part == doctest::Approx(0.0014));
        CHECK(r.absolute_error == doctest::Approx(0.003));
        e.theta_hat = 1.9984;
        CHECK(error_decomposition(e, OracleRoots{2.0, 1.9984}).random_part == 0.0);
        const auto none = error_decomposition(e, std::nullopt);
        CHECK_FALSE(none.has_oracle);
        CHECK(none.trace_std > 0.0);
    }
}
