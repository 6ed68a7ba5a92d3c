#include "mcqn/network.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace mcqn {

namespace {

constexpr double kRowSumSlack = 1e-12;

void add(ValidationReport& report, std::string name, bool passed, std::string message = {}) {
    report.checks.push_back({std::move(name), passed, passed ? std::string{} : std::move(message)});
}

std::string one_based(std::size_t i) { return std::to_string(i + 1); }

/// Iterates y <- R' y from the all-ones vector. Returns the iteration at
/// which max|y| fell below tolerance, or npos if it never did within the cap.
std::size_t neumann_contraction(const std::vector<std::vector<double>>& routing,
                                const ValidationOptions& options) {
    const auto d = routing.size();
    std::vector<double> y(d, 1.0), next(d);
    for (std::size_t m = 1; m <= options.neumann_iteration_cap; ++m) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t k = 0; k < d; ++k)
            for (std::size_t l = 0; l < d; ++l) next[l] += routing[k][l] * y[k];
        y.swap(next);
        double norm = 0.0;
        for (double v : y) norm = std::max(norm, std::abs(v));
        if (norm < options.neumann_tolerance) return m;
        if (!std::isfinite(norm)) return npos;
    }
    return npos;
}

}  // namespace

bool ValidationReport::ok() const noexcept {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

std::string ValidationReport::failures() const {
    std::ostringstream out;
    for (const auto& c : checks)
        if (!c.passed) out << c.name << ": " << c.message << '\n';
    return out.str();
}

ValidationReport validate(const NetworkSpec& spec, const ValidationOptions& options) {
    ValidationReport report;
    const auto d = spec.class_count;
    const auto stations = spec.station_count;

    add(report, "station count", stations >= 1, "at least one station is required");
    add(report, "class count", d >= stations && d >= 1,
        "class count " + std::to_string(d) + " is smaller than station count " + std::to_string(stations));

    const bool sizes = spec.station_of.size() == d && spec.arrival_rates.size() == d &&
                       spec.service_rates.size() == d && spec.routing.size() == d &&
                       std::all_of(spec.routing.begin(), spec.routing.end(),
                                   [d](const auto& row) { return row.size() == d; }) &&
                       spec.station_policies.size() == stations;
    add(report, "dimensions", sizes,
        "station_of, arrival_rates, service_rates and routing must have class_count entries; "
        "station_policies must have station_count entries");
    if (!sizes || stations == 0 || d == 0) return report;

    {
        std::vector<bool> used(stations, false);
        std::string bad;
        for (std::size_t k = 0; k < d; ++k) {
            if (spec.station_of[k] >= stations)
                bad = "class " + one_based(k) + " maps to unknown station " + one_based(spec.station_of[k]);
            else
                used[spec.station_of[k]] = true;
        }
        add(report, "station mapping", bad.empty(), bad);
        std::string idle;
        for (std::size_t i = 0; i < stations; ++i)
            if (!used[i]) idle = "station " + one_based(i) + " serves no class";
        add(report, "station mapping surjective", idle.empty(), idle);
        if (!bad.empty()) return report;
    }

    {
        std::string bad;
        for (std::size_t k = 0; k < d; ++k)
            if (!(spec.arrival_rates[k] >= 0.0) || !std::isfinite(spec.arrival_rates[k]))
                bad = "arrival rate of class " + one_based(k) + " must be finite and >= 0";
        add(report, "arrival rates", bad.empty(), bad);
    }
    {
        std::string bad;
        for (std::size_t k = 0; k < d; ++k)
            if (!(spec.service_rates[k] > 0.0) || !std::isfinite(spec.service_rates[k]))
                bad = "service rate of class " + one_based(k) + " must be finite and > 0";
        add(report, "service rates", bad.empty(), bad);
    }

    bool routing_ok = true;
    {
        std::string bad;
        for (std::size_t k = 0; k < d; ++k)
            for (std::size_t l = 0; l < d; ++l)
                if (!(spec.routing[k][l] >= 0.0 && spec.routing[k][l] <= 1.0))
                    bad = "routing entry (" + one_based(k) + "," + one_based(l) + ") outside [0,1]";
        add(report, "routing entries", bad.empty(), bad);
        routing_ok = bad.empty();
    }
    {
        std::string bad;
        for (std::size_t k = 0; k < d; ++k) {
            const double sum = std::accumulate(spec.routing[k].begin(), spec.routing[k].end(), 0.0);
            if (sum > 1.0 + kRowSumSlack) {
                std::ostringstream msg;
                msg << "routing row sum > 1 (row " << k + 1 << " sums to " << sum << ")";
                bad = msg.str();
                break;
            }
        }
        add(report, "routing row sums", bad.empty(), bad);
        routing_ok = routing_ok && bad.empty();
    }
    if (routing_ok) {
        const auto m = neumann_contraction(spec.routing, options);
        add(report, "open network", m != npos,
            "Neumann series divergent: (R')^m 1 did not contract below tolerance within " +
                std::to_string(options.neumann_iteration_cap) + " iterations");
    }

    {
        std::string bad;
        for (std::size_t i = 0; i < stations; ++i) {
            std::vector<ClassId> classes;
            for (std::size_t k = 0; k < d; ++k)
                if (spec.station_of[k] == i) classes.push_back(k);
            const auto& policy = spec.station_policies[i];
            if (policy.priority.empty()) continue;
            auto sorted = policy.priority;
            std::sort(sorted.begin(), sorted.end());
            if (sorted != classes) bad = "priority order of station " + one_based(i) + " is not a permutation of its classes";
        }
        add(report, "priority orders", bad.empty(), bad);
    }
    return report;
}

Network::Network(NetworkSpec spec, const ValidationOptions& options) : spec_(std::move(spec)) {
    auto report = validate(spec_, options);
    if (!report.ok()) throw ValidationError(std::move(report));

    const auto d = spec_.class_count;
    stations_.reserve(spec_.station_count);
    for (std::size_t i = 0; i < spec_.station_count; ++i) {
        std::vector<ClassId> classes;
        for (std::size_t k = 0; k < d; ++k)
            if (spec_.station_of[k] == i) classes.push_back(k);
        stations_.emplace_back(std::move(classes), spec_.station_policies[i]);
    }
    routes_.resize(d);
    exit_.resize(d);
    for (std::size_t k = 0; k < d; ++k) {
        double sum = 0.0;
        for (std::size_t l = 0; l < d; ++l) {
            if (spec_.routing[k][l] > 0.0) routes_[k].push_back({l, spec_.routing[k][l]});
            sum += spec_.routing[k][l];
        }
        exit_[k] = std::max(0.0, 1.0 - sum);
        if (exit_[k] > 0.0) routes_[k].push_back({npos, exit_[k]});
    }
}

bool Network::is_jackson() const noexcept {
    return std::all_of(stations_.begin(), stations_.end(), [](const auto& s) { return s.size() == 1; });
}

Network Network::with_arrival_rates(std::vector<double> rates) const {
    auto spec = spec_;
    spec.arrival_rates = std::move(rates);
    return Network(std::move(spec));
}

RayDirection::RayDirection(std::vector<double> direction) : direction_(std::move(direction)) {
    bool positive = false;
    for (double v : direction_) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("ray direction components must be finite and >= 0");
        positive = positive || v > 0.0;
    }
    if (!positive) throw DomainError("ray direction must have a strictly positive component");
}

std::vector<double> RayDirection::at(double theta) const {
    std::vector<double> out(direction_.size());
    std::transform(direction_.begin(), direction_.end(), out.begin(), [theta](double v) { return theta * v; });
    return out;
}

std::vector<double> effective_arrival_rates(const Network& network, const std::vector<double>& theta) {
    const auto d = network.class_count();
    if (theta.size() != d) throw DomainError("arrival-rate vector has wrong dimension");
    Eigen::MatrixXd system = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t k = 0; k < d; ++k)
        for (std::size_t l = 0; l < d; ++l)
            system(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k)) -= network.spec().routing[k][l];
    const Eigen::Map<const Eigen::VectorXd> rhs(theta.data(), static_cast<Eigen::Index>(d));
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
    if (!(std::abs(lu.determinant()) > 0.0)) throw SingularSystemError("traffic equations (I - R') are singular");
    const Eigen::VectorXd solution = lu.solve(rhs);
    std::vector<double> lambda(d);
    for (std::size_t k = 0; k < d; ++k) {
        const double v = solution(static_cast<Eigen::Index>(k));
        if (!std::isfinite(v)) throw SingularSystemError("traffic equations produced a non-finite solution");
        // Roundoff can leave -1e-17 where the exact value is 0.
        lambda[k] = std::max(0.0, v);
    }
    return lambda;
}

std::vector<double> traffic_rates(const Network& network, const std::vector<double>& theta) {
    const auto lambda = effective_arrival_rates(network, theta);
    std::vector<double> rho(network.station_count(), 0.0);
    for (std::size_t k = 0; k < network.class_count(); ++k)
        rho[network.station_of(k)] += lambda[k] / network.service_rate(k);
    return rho;
}

SubcriticalThreshold subcritical_threshold(const Network& network, const RayDirection& ray) {
    if (ray.dimension() != network.class_count())
        throw DomainError("ray dimension " + std::to_string(ray.dimension()) + " differs from class count " +
                          std::to_string(network.class_count()));
    const auto load = traffic_rates(network, ray.direction());
    SubcriticalThreshold out;
    out.theta_bar = std::numeric_limits<double>::infinity();
    out.deltas.resize(load.size());
    for (std::size_t i = 0; i < load.size(); ++i) {
        out.deltas[i] = load[i] > 0.0 ? 1.0 / load[i] : std::numeric_limits<double>::infinity();
        out.theta_bar = std::min(out.theta_bar, out.deltas[i]);
    }
    if (!std::isfinite(out.theta_bar)) throw DomainError("degenerate ray: direction puts no load on any station");
    return out;
}

}  // namespace mcqn
