#include "mcqn/robbins_monro.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "mcqn/rng.hpp"

namespace mcqn {

void RMSchedule::check() const {
    if (!(epsilon > 0.0)) throw DomainError("epsilon must be > 0");
    if (!(gain_c1 > 0.0)) throw DomainError("gain c1 must be > 0");
    if (!(gain_omega > 0.5 && gain_omega <= 1.0)) throw DomainError("gain exponent omega must lie in (1/2, 1]");
    if (!(horizon_c2 > 0.0)) throw DomainError("horizon c2 must be > 0");
    if (horizon_growth == HorizonGrowth::power && !(horizon_gamma > 0.0))
        throw DomainError("power horizon exponent must be > 0");
    if (iterations == 0) throw DomainError("iterations must be positive");
    if (!(averaging_burn_in >= 0.0 && averaging_burn_in < 1.0)) throw DomainError("burn-in fraction must lie in [0, 1)");
    if (!(alpha > 0.0)) throw DomainError("alpha must be > 0");
}

double RMSchedule::gain(std::size_t n) const { return gain_c1 / std::pow(static_cast<double>(n), gain_omega); }

double RMSchedule::horizon(std::size_t n) const {
    const auto x = static_cast<double>(n);
    switch (horizon_growth) {
        case HorizonGrowth::constant: return horizon_c2;
        case HorizonGrowth::logarithmic: return horizon_c2 * std::log1p(x);
        case HorizonGrowth::power: return horizon_c2 * std::pow(x, horizon_gamma);
    }
    return horizon_c2;
}

double rm_step(double theta, double z, double gain, double epsilon, double theta_bar) {
    return std::min(theta_bar, std::max(theta + gain * (z - epsilon), 0.0));
}

std::string ThresholdEstimate::diagnostics() const {
    std::ostringstream out;
    out << "clamp events: " << clamp_events << ", averaged iterates on a bound: " << clamped_fraction * 100.0 << "%";
    if (clamp_warning) out << " (more than half: epsilon is likely outside the achievable range)";
    return out.str();
}

ThresholdEstimate run_robbins_monro(const RMSchedule& schedule, double theta_bar, const ZSampler& sample) {
    schedule.check();
    if (!(theta_bar > 0.0) || !std::isfinite(theta_bar)) throw DomainError("theta_bar must be finite and > 0");
    double theta = schedule.theta_init.value_or(theta_bar / 2.0);
    if (!(theta > 0.0 && theta < theta_bar)) throw DomainError("initial iterate must lie in (0, theta_bar)");

    ThresholdEstimate out;
    out.theta_bar = theta_bar;
    out.iterate_trace.reserve(schedule.iterations);
    out.records.reserve(schedule.iterations);
    for (std::size_t n = 1; n <= schedule.iterations; ++n) {
        const double t = schedule.horizon(n);
        const double b = schedule.gain(n);
        const double z = sample(theta, n, t);
        out.iterate_trace.push_back(theta);
        out.records.push_back({n, theta, z, b, t});
        const double raw = theta + b * (z - schedule.epsilon);
        if (raw <= 0.0 || raw >= theta_bar) ++out.clamp_events;
        theta = rm_step(theta, z, b, schedule.epsilon, theta_bar);
    }
    out.final_iterate = theta;

    const auto skip = static_cast<std::size_t>(std::floor(schedule.averaging_burn_in * static_cast<double>(schedule.iterations)));
    const auto first = out.iterate_trace.begin() + static_cast<std::ptrdiff_t>(std::min(skip, schedule.iterations - 1));
    const auto count = static_cast<double>(out.iterate_trace.end() - first);
    double sum = 0.0;
    std::size_t on_bound = 0;
    for (auto it = first; it != out.iterate_trace.end(); ++it) {
        sum += *it;
        if (*it <= 0.0 || *it >= theta_bar) ++on_bound;
    }
    out.theta_hat = sum / count;
    out.clamped_fraction = static_cast<double>(on_bound) / count;
    out.clamp_warning = out.clamped_fraction > 0.5;
    return out;
}

ThresholdEstimate estimate_threshold(const Network& network, const RayDirection& ray, const RMSchedule& schedule,
                                     std::uint64_t seed) {
    schedule.check();
    const auto bar = subcritical_threshold(network, ray).theta_bar;
    SimulationOptions options;
    options.alpha = schedule.alpha;
    options.event_cap = schedule.event_cap;
    std::uint64_t events = 0;
    auto estimate = run_robbins_monro(schedule, bar, [&](double theta, std::size_t n, double horizon) {
        const auto outcome = simulate(network, ray.at(theta), horizon, derive_seed(seed, n), options);
        events += outcome.event_count;
        return outcome.functional_value;
    });
    estimate.total_events = events;
    return estimate;
}

void write_iterate_trace(std::ostream& out, const ThresholdEstimate& estimate) {
    out << "n,theta_n,z_n,b_n,t_n\n";
    const auto precision = out.precision(17);
    for (const auto& r : estimate.records)
        out << r.n << ',' << r.theta << ',' << r.z << ',' << r.gain << ',' << r.horizon << '\n';
    out.precision(precision);
}

ErrorReport error_decomposition(const ThresholdEstimate& estimate, const std::optional<OracleRoots>& oracle) {
    ErrorReport report;
    const auto& trace = estimate.iterate_trace;
    if (!trace.empty()) {
        double mean = 0.0;
        for (double v : trace) mean += v;
        mean /= static_cast<double>(trace.size());
        double ss = 0.0;
        for (double v : trace) ss += (v - mean) * (v - mean);
        report.trace_std = trace.size() > 1 ? std::sqrt(ss / static_cast<double>(trace.size() - 1)) : 0.0;
    }
    if (oracle) {
        report.has_oracle = true;
        report.absolute_error = std::abs(estimate.theta_hat - oracle->theta_star);
        report.random_part = std::abs(estimate.theta_hat - oracle->theta_eps);
        report.deterministic_part = oracle->theta_star - oracle->theta_eps;
    }
    return report;
}

}  // namespace mcqn
