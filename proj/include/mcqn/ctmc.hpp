#pragma once

// Continuous-time Markov chain of a multiclass network, simulated through its
// embedded jump chain: exponential holding times with rate equal to the sum
// of transition rates, then one transition drawn proportionally to its rate.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "mcqn/network.hpp"
#include "mcqn/queue_policy.hpp"

namespace mcqn {

/// Joint configuration of all stations.
struct NetworkState {
    std::vector<QueueConfig> configs;
    bool operator==(const NetworkState&) const = default;
};

NetworkState empty_state(const Network& network);
std::size_t total_jobs(const NetworkState& state);
/// Each config matches its station's discipline and class set.
bool is_valid_state(const Network& network, const NetworkState& state);

struct TransitionEvent {
    enum class Kind { arrival, class_change, departure };

    Kind kind = Kind::arrival;
    ClassId from = npos;  ///< serving class; npos for arrivals
    ClassId to = npos;    ///< destination class; npos for departures

    static TransitionEvent arrival(ClassId l) { return {Kind::arrival, npos, l}; }
    static TransitionEvent class_change(ClassId k, ClassId l) { return {Kind::class_change, k, l}; }
    static TransitionEvent departure(ClassId k) { return {Kind::departure, k, npos}; }

    /// Change in total job count caused by the transition.
    [[nodiscard]] int job_delta() const noexcept {
        return kind == Kind::arrival ? 1 : kind == Kind::departure ? -1 : 0;
    }
    bool operator==(const TransitionEvent&) const = default;
};

const char* to_string(TransitionEvent::Kind kind);

/// Total transition rate out of `state` under external rates `theta`.
double holding_rate(const Network& network, const NetworkState& state, const std::vector<double>& theta);

struct JumpProbability {
    TransitionEvent event;
    double probability = 0.0;
};

/// Distribution of the next transition. Zero-rate transitions are omitted.
/// Order: arrivals by class, then service completions by station, class and
/// destination (exit last). Throws StalledStateError if the holding rate is 0.
std::vector<JumpProbability> jump_distribution(const Network& network, const NetworkState& state,
                                               const std::vector<double>& theta);

/// Applies a transition. Service transitions require the class to be in
/// service and the routing branch to be possible; otherwise IllegalEventError.
NetworkState apply_event(const Network& network, NetworkState state, const TransitionEvent& event);

/// exp(-alpha * total jobs).
double test_functional(const NetworkState& state, double alpha = 1.0);

/// Called after each applied transition with the jump epoch and the new
/// total job count.
using EventTrace = std::function<void(double time, const TransitionEvent& event, std::size_t total_jobs)>;

/// CSV trace writer: model_time,event_kind,from_class,to_class,total_jobs
/// (1-based classes, 0 where not applicable). Writes the header immediately.
EventTrace csv_event_trace(std::ostream& out);

struct SimulationOptions {
    std::uint64_t event_cap = 100'000'000;
    double alpha = 1.0;
    EventTrace trace;
};

struct SimOutcome {
    NetworkState terminal_state;
    std::uint64_t event_count = 0;
    std::uint64_t arrivals = 0;
    std::uint64_t departures = 0;
    double functional_value = 1.0;
    double elapsed_model_time = 0.0;  ///< epoch of the last applied transition
};

/// Runs the chain from `initial` up to `horizon`. The result depends only on
/// the arguments. Throws EventBudgetError when more than options.event_cap
/// transitions would be applied.
SimOutcome simulate(const Network& network, const std::vector<double>& theta, double horizon,
                    std::uint64_t seed, NetworkState initial, const SimulationOptions& options = {});

/// Same, starting from the empty network.
SimOutcome simulate(const Network& network, const std::vector<double>& theta, double horizon,
                    std::uint64_t seed, const SimulationOptions& options = {});

}  // namespace mcqn
