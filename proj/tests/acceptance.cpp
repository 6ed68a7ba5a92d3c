// Acceptance run: one PASS/FAIL line per criterion.
//   acceptance              all criteria
//   acceptance --criterion N

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include <boost/math/distributions/chi_squared.hpp>

#include "CLI11.hpp"

#include "mcqn/config.hpp"
#include "mcqn/ctmc.hpp"
#include "mcqn/jackson.hpp"
#include "mcqn/monotonicity.hpp"
#include "mcqn/parallel.hpp"
#include "mcqn/region.hpp"
#include "mcqn/rng.hpp"
#include "mcqn/robbins_monro.hpp"
#include "networks.hpp"

using namespace mcqn;
using namespace mcqn::testing;

namespace {

const std::filesystem::path config_dir = MCQN_CONFIG_DIR;

struct Verdict {
    bool pass;
    std::string detail;
};

std::string fmt(double x, int digits = 4) {
    std::ostringstream s;
    s.precision(digits);
    s << std::fixed << x;
    return s.str();
}

double elapsed_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Verdict oracle_identity() {
    const auto start = std::chrono::steady_clock::now();
    const Network n(jackson2_spec());
    double worst = 0.0;
    for (double v : jackson_slopes()) {
        const auto o = JacksonOracle::along_ray(n, RayDirection({1.0, v}));
        for (double eps : {1e-2, 1e-4, 1e-6}) worst = std::max(worst, std::abs(o.phi(o.theta_eps(eps)) - eps));
    }
    const double seconds = elapsed_since(start);
    char buf[128];
    std::snprintf(buf, sizeof buf, "max |phi(theta_eps) - eps| = %.2e over 18 cases, %.3f s", worst, seconds);
    return {worst <= 1e-9 && seconds < 1.0, buf};
}

Verdict jackson_table(std::size_t jobs) {
    const auto cfg = load_experiment(config_dir / "jackson2_region.cfg");
    const Network n(cfg.network);
    std::vector<RayDirection> rays;
    for (const auto& r : cfg.region->rays) rays.emplace_back(r);
    const auto result = sweep(n, rays, cfg.schedule, cfg.seed, jobs);
    bool pass = result.failures() == 0;
    std::string detail;
    for (std::size_t j = 0; j < rays.size(); ++j) {
        if (!result.ok(j)) {
            detail += " ray " + std::to_string(j + 1) + " failed: " + result.errors[j] + ";";
            continue;
        }
        const auto root = JacksonOracle::along_ray(n, rays[j]).theta_eps(cfg.schedule.epsilon);
        const double hat = result.thresholds[j].theta_hat;
        pass = pass && std::abs(hat - root) <= 0.03;
        detail += " v=" + fmt(rays[j].direction()[1], 2) + " " + fmt(hat) + " vs " + fmt(root) + ";";
    }
    return {pass, "theta_hat vs root at eps=1e-4:" + detail};
}

Verdict threshold_band(const std::string& config, double lo, double hi, double min_gap) {
    const auto cfg = load_experiment(config_dir / config);
    const Network n(cfg.network);
    const auto e = estimate_threshold(n, RayDirection(*cfg.ray), cfg.schedule, cfg.seed);
    const bool in_band = e.theta_hat >= lo && e.theta_hat <= hi;
    const bool gap = e.theta_bar - e.theta_hat >= min_gap;
    std::string detail = "theta_hat = " + fmt(e.theta_hat) + ", theta_bar = " + fmt(e.theta_bar) + ", band [" +
                         fmt(lo, 3) + ", " + fmt(hi, 3) + "]";
    if (min_gap > 0.0) detail += ", gap " + fmt(e.theta_bar - e.theta_hat) + " (need >= " + fmt(min_gap, 2) + ")";
    detail += ", " + std::to_string(e.total_events) + " events";
    return {in_band && (min_gap <= 0.0 || gap), detail};
}

struct PrintedTable {
    std::string config;
    std::vector<std::vector<double>> cells;  ///< rows by theta, columns t = 20, 40, 60, 80
};

Verdict monotonicity_tables(std::size_t jobs) {
    const std::vector<PrintedTable> tables = {
        {"bramson_dai_mono.cfg",
         {{.86, .86, .86, .86}, {.70, .70, .70, .70}, {.54, .52, .52, .52}, {.36, .32, .32, .31},
          {.23, .17, .14, .12}, {.13, .07, .04, .04}, {.07, .02, .01, .01}, {.03, .01, .00, .00}}},
        {"lu_kumar_mono.cfg",
         {{.88, .88, .88, .88}, {.76, .76, .76, .76}, {.63, .63, .63, .63}, {.39, .38, .37, .37},
          {.19, .15, .14, .13}, {.12, .08, .06, .05}, {.07, .04, .02, .02}}},
        {"lu_kumar_kelly_mono.cfg",
         {{.81, .81, .81, .81}, {.63, .62, .62, .62}, {.45, .44, .44, .43}, {.29, .27, .26, .25},
          {.18, .13, .12, .11}, {.10, .05, .04, .03}, {.05, .02, .01, .00}}},
    };
    bool pass = true;
    std::string detail;
    for (const auto& table : tables) {
        const auto cfg = load_experiment(config_dir / table.config);
        const auto& m = *cfg.monotonicity;
        SurfaceOptions options;
        options.jobs = jobs;
        const auto s = estimate_surface(Network(cfg.network), RayDirection(*cfg.ray), m.theta_grid, m.t_grid,
                                        m.replications, cfg.seed, options);
        double worst = 0.0;
        std::string where;
        for (std::size_t i = 0; i < s.theta_grid.size(); ++i) {
            worst = std::max(worst, std::abs(s.estimates[i][0] - 1.0));
            for (std::size_t j = 1; j < s.t_grid.size(); ++j) {
                const double d = std::abs(s.estimates[i][j] - table.cells[i][j - 1]);
                if (d > worst) {
                    worst = d;
                    where = "theta=" + fmt(s.theta_grid[i], 2) + ",t=" + fmt(s.t_grid[j], 0) + ": " +
                            fmt(s.estimates[i][j], 3) + " vs " + fmt(table.cells[i][j - 1], 2);
                }
            }
        }
        const auto audit = check_monotone(s, 3.0);
        pass = pass && worst <= 0.03 && audit.pass && s.replications >= 10'000;
        detail += " " + table.config + ": max dev " + fmt(worst, 3) + " (" + where + "), monotone " +
                  (audit.pass ? "PASS" : "FAIL") + ";";
    }
    return {pass, "printed cells at 1e4 reps:" + detail};
}

/// Chi-square p-value of counts against geometric(rho), pooling the tail so
/// every bin expects at least five observations.
double geometric_p_value(const std::vector<std::size_t>& counts, double rho) {
    const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::size_t{0}));
    double stat = 0.0;
    double tail_p = 1.0;
    std::size_t tail_count = static_cast<std::size_t>(total);
    std::size_t bins = 0;
    for (std::size_t k = 0;; ++k) {
        const double p = geometric_pmf(rho, k);
        if ((tail_p - p) * total < 5.0) break;
        const double observed = k < counts.size() ? static_cast<double>(counts[k]) : 0.0;
        stat += (observed - p * total) * (observed - p * total) / (p * total);
        tail_p -= p;
        tail_count -= static_cast<std::size_t>(observed);
        ++bins;
    }
    stat += (tail_count - tail_p * total) * (tail_count - tail_p * total) / (tail_p * total);
    const boost::math::chi_squared dist(static_cast<double>(bins));
    return boost::math::cdf(boost::math::complement(dist, stat));
}

Verdict product_form(std::size_t jobs) {
    constexpr std::size_t samples = 10'000;
    constexpr double horizon = 1e5;
    struct Case {
        std::string name;
        NetworkSpec spec;
    };
    const std::vector<Case> cases = {{"M/M/1", mm1_spec(1.0, 2.0)}, {"two-node", jackson2_spec()}};
    bool pass = true;
    std::string detail;
    for (std::size_t c = 0; c < cases.size(); ++c) {
        const Network n(cases[c].spec);
        const auto rho = station_utilizations(n, n.spec().arrival_rates);
        std::vector<NetworkState> finals(samples);
        parallel_for(samples, jobs, [&](std::size_t r) {
            finals[r] = simulate(n, n.spec().arrival_rates, horizon, derive_seed(2026, {c, r})).terminal_state;
        });
        for (StationId i = 0; i < n.station_count(); ++i) {
            std::vector<std::size_t> counts;
            for (const auto& st : finals) {
                const auto k = job_count(st.configs[i]);
                if (k >= counts.size()) counts.resize(k + 1, 0);
                ++counts[k];
            }
            const double p = geometric_p_value(counts, rho[i]);
            pass = pass && p > 0.01;
            detail += " " + cases[c].name + " station " + std::to_string(i + 1) + " rho=" + fmt(rho[i], 2) +
                      " p=" + fmt(p, 4) + ";";
        }
    }
    return {pass, "chi-square vs geometric, 1e4 replications at horizon 1e5:" + detail};
}

Verdict properties() {
    std::mt19937_64 gen(7);
    std::vector<std::string> failed;
    auto require = [&](bool ok, const std::string& what) {
        if (!ok && std::find(failed.begin(), failed.end(), what) == failed.end()) failed.push_back(what);
    };

    std::vector<NetworkSpec> specs = {bramson_dai_spec(), lu_kumar_classic(), jackson2_spec()};
    for (auto d : {Discipline::ps_equalitarian, Discipline::ps_proportional, Discipline::ps_preferential})
        specs.push_back(lu_kumar_spec({2.0, 1.25, 8.0, 2.5}, d));

    for (const auto& spec : specs) {
        const Network n(spec);
        std::vector<double> theta(n.class_count(), 0.0);
        for (auto& x : theta) x = static_cast<double>(gen() % 100) / 50.0;
        theta[0] = 0.7;
        for (int trial = 0; trial < 2000; ++trial) {
            auto st = empty_state(n);
            for (StationId i = 0; i < n.station_count(); ++i) {
                const auto& s = n.station(i);
                const auto jobs = gen() % 7;
                for (std::size_t j = 0; j < jobs; ++j) insert_job(s, st.configs[i], s.classes()[gen() % s.size()]);
                const auto w = service_allocation(s, st.configs[i]);
                const double sum = std::accumulate(w.begin(), w.end(), 0.0);
                require(jobs == 0 ? sum == 0.0 : std::abs(sum - 1.0) <= 1e-12, "weight normalization");
            }
            const auto dist = jump_distribution(n, st, theta);
            double total = 0.0;
            for (const auto& j : dist) total += j.probability;
            require(std::abs(total - 1.0) <= 1e-12, "jump normalization");
        }

        SimulationOptions o;
        std::size_t previous = 0;
        o.trace = [&](double, const TransitionEvent& e, std::size_t jobs) {
            const long delta = static_cast<long>(jobs) - static_cast<long>(previous);
            require(delta >= -1 && delta <= 1 && delta == e.job_delta(), "job deltas");
            previous = jobs;
        };
        simulate(n, theta, 500.0, 11, o);

        const auto a = simulate(n, theta, 500.0, 12);
        const auto b = simulate(n, theta, 500.0, 12);
        require(a.terminal_state == b.terminal_state && a.event_count == b.event_count &&
                    a.elapsed_model_time == b.elapsed_model_time,
                "seed replay");
    }

    {
        RMSchedule s;
        s.epsilon = 0.2;
        s.gain_c1 = 50.0;
        s.iterations = 5000;
        Rng rng(3);
        const auto e = run_robbins_monro(s, 1.5, [&](double, std::size_t, double) { return rng.uniform_open(); });
        for (double x : e.iterate_trace) require(x >= 0.0 && x <= 1.5, "iterate clamping");
    }
    {
        const Network n(jackson2_spec());
        RMSchedule s;
        s.epsilon = 0.2;
        s.gain_c1 = 1.0;
        s.horizon_c2 = 20.0;
        s.iterations = 100;
        const RayDirection ray({1.0, 1.0});
        require(estimate_threshold(n, ray, s, 5).iterate_trace == estimate_threshold(n, ray, s, 5).iterate_trace,
                "seed replay");
    }

    double worst_rm = 0.0;
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
                                             [&](double t, std::size_t, double) { return oracle.phi_limit(t); });
            worst_rm = std::max(worst_rm, std::abs(e.final_iterate - oracle.theta_eps(eps)));
        }
    }
    require(worst_rm <= 1e-4, "noise-free recursion");

    char buf[160];
    std::snprintf(buf, sizeof buf, "six suites; noise-free recursion max error %.1e", worst_rm);
    std::string detail = buf;
    for (const auto& f : failed) detail += "; failed: " + f;
    return {failed.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    int only = 0;
    std::size_t jobs = default_jobs();
    app.add_option("--criterion", only, "Run a single criterion (1-7)")->check(CLI::Range(1, 7));
    app.add_option("--jobs", jobs, "Worker threads");
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::function<Verdict()>> criteria = {
        oracle_identity,
        [&] { return jackson_table(jobs); },
        [] { return threshold_band("lu_kumar_kelly.cfg", 0.585, 0.605, 0.0); },
        [] { return threshold_band("bramson_dai.cfg", 0.88, 0.96, 0.1); },
        [&] { return monotonicity_tables(jobs); },
        [&] { return product_form(jobs); },
        properties,
    };
    bool all = true;
    for (std::size_t c = 0; c < criteria.size(); ++c) {
        if (only != 0 && static_cast<std::size_t>(only) != c + 1) continue;
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[c]();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        all = all && v.pass;
        std::cout << "criterion " << c + 1 << ": " << (v.pass ? "PASS" : "FAIL") << ": " << v.detail << " ["
                  << fmt(elapsed_since(start), 1) << " s]" << std::endl;
    }
    return all ? 0 : 1;
}
