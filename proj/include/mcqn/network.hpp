#pragma once

// Multiclass queueing network description, validation, and the traffic
// algebra: effective arrival rates, station utilizations and per-ray
// subcritical thresholds.

#include <cstddef>
#include <string>
#include <vector>

#include "mcqn/errors.hpp"
#include "mcqn/queue_policy.hpp"

namespace mcqn {

/// Plain description of a network. All indices are 0-based.
struct NetworkSpec {
    std::size_t station_count = 0;
    std::size_t class_count = 0;
    std::vector<StationId> station_of;             ///< class -> station, surjective
    std::vector<double> arrival_rates;             ///< external Poisson rate per class
    std::vector<double> service_rates;             ///< exponential service rate per class
    std::vector<std::vector<double>> routing;      ///< class_count x class_count, substochastic
    std::vector<StationPolicy> station_policies;   ///< one per station
};

struct ValidationCheck {
    std::string name;
    bool passed = true;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;

    [[nodiscard]] bool ok() const noexcept;
    /// Messages of the failed checks, one per line.
    [[nodiscard]] std::string failures() const;
};

struct ValidationOptions {
    std::size_t neumann_iteration_cap = 1'000'000;
    double neumann_tolerance = 1e-12;
};

ValidationReport validate(const NetworkSpec& spec, const ValidationOptions& options = {});

class ValidationError : public DomainError {
public:
    explicit ValidationError(ValidationReport report)
        : DomainError("invalid network:\n" + report.failures()), report_(std::move(report)) {}
    [[nodiscard]] const ValidationReport& report() const noexcept { return report_; }

private:
    ValidationReport report_;
};

/// One outgoing routing branch of a class: destination class (npos = exit)
/// and its probability.
struct Route {
    ClassId to = npos;
    double probability = 0.0;
};

/// A validated network. Construction is the only way to obtain one, so every
/// downstream operation runs on a spec that passed `validate`.
class Network {
public:
    /// Throws ValidationError carrying the failed report.
    explicit Network(NetworkSpec spec, const ValidationOptions& options = {});

    [[nodiscard]] const NetworkSpec& spec() const noexcept { return spec_; }
    [[nodiscard]] std::size_t station_count() const noexcept { return spec_.station_count; }
    [[nodiscard]] std::size_t class_count() const noexcept { return spec_.class_count; }
    [[nodiscard]] StationId station_of(ClassId k) const { return spec_.station_of[k]; }
    [[nodiscard]] double service_rate(ClassId k) const { return spec_.service_rates[k]; }
    [[nodiscard]] const StationLayout& station(StationId i) const { return stations_[i]; }
    [[nodiscard]] const std::vector<StationLayout>& stations() const noexcept { return stations_; }

    /// Nonzero routing branches of class k, class changes first (ascending
    /// destination), then the exit branch if its probability is positive.
    [[nodiscard]] const std::vector<Route>& routes(ClassId k) const { return routes_[k]; }
    [[nodiscard]] double exit_probability(ClassId k) const { return exit_[k]; }

    /// True when every station serves exactly one class.
    [[nodiscard]] bool is_jackson() const noexcept;

    /// Copy with the external arrival rates replaced.
    [[nodiscard]] Network with_arrival_rates(std::vector<double> rates) const;

private:
    NetworkSpec spec_;
    std::vector<StationLayout> stations_;
    std::vector<std::vector<Route>> routes_;
    std::vector<double> exit_;
};

/// Nonnegative, nonzero direction in arrival-rate space. Not normalized.
class RayDirection {
public:
    /// Throws DomainError if a component is negative/non-finite or all are zero.
    explicit RayDirection(std::vector<double> direction);

    [[nodiscard]] const std::vector<double>& direction() const noexcept { return direction_; }
    [[nodiscard]] std::size_t dimension() const noexcept { return direction_.size(); }
    /// theta * direction.
    [[nodiscard]] std::vector<double> at(double theta) const;

private:
    std::vector<double> direction_;
};

/// Solves (I - R') lambda = theta by dense LU with partial pivoting.
std::vector<double> effective_arrival_rates(const Network& network, const std::vector<double>& theta);
inline std::vector<double> effective_arrival_rates(const Network& network) {
    return effective_arrival_rates(network, network.spec().arrival_rates);
}

/// rho_i = sum over classes at station i of lambda_k / beta_k.
std::vector<double> traffic_rates(const Network& network, const std::vector<double>& theta);
inline std::vector<double> traffic_rates(const Network& network) {
    return traffic_rates(network, network.spec().arrival_rates);
}

struct SubcriticalThreshold {
    double theta_bar = 0.0;        ///< min over stations of delta_i
    std::vector<double> deltas;    ///< per station; +inf where the ray puts no load
};

/// Largest multiplier theta keeping every station subcritical along the ray.
/// NetworkSpec::arrival_rates are ignored. Throws DomainError when the ray
/// loads no station, or its dimension differs from the class count.
SubcriticalThreshold subcritical_threshold(const Network& network, const RayDirection& ray);

}  // namespace mcqn
