#include "mcqn/ctmc.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <optional>
#include <ostream>

#include "mcqn/rng.hpp"

namespace mcqn {

namespace {

/// A class currently receiving service and its completion rate W_k * beta_k.
struct ActiveClass {
    ClassId k;
    double rate;
};

/// Mutable simulation state with per-station caches of the completion rates.
/// Only the stations touched by a transition are refreshed.
class Kernel {
public:
    Kernel(const Network& network, const std::vector<double>& theta, NetworkState state)
        : network_(network), state_(std::move(state)) {
        if (theta.size() != network.class_count()) throw DomainError("arrival-rate vector has wrong dimension");
        for (std::size_t l = 0; l < theta.size(); ++l) {
            if (!(theta[l] >= 0.0) || !std::isfinite(theta[l]))
                throw DomainError("arrival rates must be finite and >= 0");
            if (theta[l] > 0.0) arrivals_.push_back({l, theta[l]});
        }
        arrival_total_ = std::accumulate(theta.begin(), theta.end(), 0.0);
        const auto stations = network.station_count();
        active_.resize(stations);
        station_rate_.assign(stations, 0.0);
        std::size_t widest = 0;
        for (const auto& s : network.stations()) widest = std::max(widest, s.size());
        weights_.resize(widest);
        for (StationId i = 0; i < stations; ++i) refresh(i);
    }

    [[nodiscard]] double rate() const noexcept {
        double total = arrival_total_;
        for (double r : station_rate_) total += r;
        return total;
    }

    [[nodiscard]] const NetworkState& state() const noexcept { return state_; }
    NetworkState release() { return std::move(state_); }

    /// Enumerates (event, rate) for every positive-rate transition in the
    /// canonical order.
    template <class Visitor>
    void for_each_transition(Visitor&& visit) const {
        for (const auto& a : arrivals_) visit(TransitionEvent::arrival(a.k), a.rate);
        for (const auto& station : active_)
            for (const auto& a : station)
                for (const auto& route : network_.routes(a.k))
                    visit(route.to == npos ? TransitionEvent::departure(a.k)
                                           : TransitionEvent::class_change(a.k, route.to),
                          a.rate * route.probability);
    }

    /// Selects the transition whose cumulative-rate interval contains u * total.
    [[nodiscard]] TransitionEvent select(double u, double total) const {
        double r = u * total;
        TransitionEvent last{};
        for (const auto& a : arrivals_) {
            if (r < a.rate) return TransitionEvent::arrival(a.k);
            r -= a.rate;
            last = TransitionEvent::arrival(a.k);
        }
        for (StationId i = 0; i < active_.size(); ++i) {
            const auto& list = active_[i];
            if (list.empty()) continue;
            last = final_route(list.back().k);
            if (r >= station_rate_[i]) {
                r -= station_rate_[i];
                continue;
            }
            for (const auto& a : list) {
                if (r >= a.rate) {
                    r -= a.rate;
                    continue;
                }
                for (const auto& route : network_.routes(a.k)) {
                    const double h = a.rate * route.probability;
                    if (r < h) return make(a.k, route.to);
                    r -= h;
                }
                return final_route(a.k);
            }
            return last;
        }
        // Roundoff pushed r past the last interval.
        return last;
    }

    void apply(const TransitionEvent& e) {
        switch (e.kind) {
            case TransitionEvent::Kind::arrival: {
                const auto i = network_.station_of(e.to);
                insert_job(network_.station(i), state_.configs[i], e.to);
                refresh(i);
                break;
            }
            case TransitionEvent::Kind::departure: {
                const auto i = network_.station_of(e.from);
                remove(i, e.from);
                refresh(i);
                break;
            }
            case TransitionEvent::Kind::class_change: {
                const auto i = network_.station_of(e.from);
                const auto j = network_.station_of(e.to);
                remove(i, e.from);
                insert_job(network_.station(j), state_.configs[j], e.to);
                refresh(i);
                if (j != i) refresh(j);
                break;
            }
        }
    }

private:
    static TransitionEvent make(ClassId k, ClassId to) {
        return to == npos ? TransitionEvent::departure(k) : TransitionEvent::class_change(k, to);
    }

    [[nodiscard]] TransitionEvent final_route(ClassId k) const { return make(k, network_.routes(k).back().to); }

    void remove(StationId i, ClassId k) {
        [[maybe_unused]] const auto before = job_count(state_.configs[i]);
        remove_job(network_.station(i), state_.configs[i], k);
        // The kernel only ever removes a class that is in service.
        assert(job_count(state_.configs[i]) + 1 == before);
    }

    void refresh(StationId i) {
        const auto& config = state_.configs[i];
        auto& list = active_[i];
        list.clear();
        // Head-of-queue stations serve exactly one class at full rate.
        std::optional<ClassId> head;
        if (const auto* fcfs = std::get_if<FcfsConfig>(&config)) {
            if (!fcfs->jobs.empty()) head = fcfs->jobs.front();
        } else if (const auto* sbp = std::get_if<SbpConfig>(&config)) {
            head = sbp->head;
        } else {
            const auto& station = network_.station(i);
            const std::span<double> w(weights_.data(), station.size());
            service_allocation(station, config, w);
            double sum = 0.0;
            for (std::size_t j = 0; j < station.size(); ++j) {
                if (w[j] <= 0.0) continue;
                const auto k = station.classes()[j];
                const double r = w[j] * network_.service_rate(k);
                list.push_back({k, r});
                sum += r;
            }
            station_rate_[i] = sum;
            return;
        }
        if (head) {
            const double r = network_.service_rate(*head);
            list.push_back({*head, r});
            station_rate_[i] = r;
        } else {
            station_rate_[i] = 0.0;
        }
    }

    const Network& network_;
    NetworkState state_;
    std::vector<ActiveClass> arrivals_;
    double arrival_total_ = 0.0;
    std::vector<std::vector<ActiveClass>> active_;
    std::vector<double> station_rate_;
    std::vector<double> weights_;
};

void require_valid(const Network& network, const NetworkState& state) {
    if (!is_valid_state(network, state)) throw DomainError("network state does not match the network's stations");
}

}  // namespace

NetworkState empty_state(const Network& network) {
    NetworkState state;
    state.configs.reserve(network.station_count());
    for (const auto& s : network.stations()) state.configs.push_back(empty_config(s));
    return state;
}

std::size_t total_jobs(const NetworkState& state) {
    std::size_t total = 0;
    for (const auto& c : state.configs) total += job_count(c);
    return total;
}

bool is_valid_state(const Network& network, const NetworkState& state) {
    if (state.configs.size() != network.station_count()) return false;
    for (StationId i = 0; i < network.station_count(); ++i)
        if (!is_consistent(network.station(i), state.configs[i])) return false;
    return true;
}

const char* to_string(TransitionEvent::Kind kind) {
    switch (kind) {
        case TransitionEvent::Kind::arrival: return "arrival";
        case TransitionEvent::Kind::class_change: return "class_change";
        case TransitionEvent::Kind::departure: return "departure";
    }
    return "?";
}

double holding_rate(const Network& network, const NetworkState& state, const std::vector<double>& theta) {
    require_valid(network, state);
    return Kernel(network, theta, state).rate();
}

std::vector<JumpProbability> jump_distribution(const Network& network, const NetworkState& state,
                                               const std::vector<double>& theta) {
    require_valid(network, state);
    const Kernel kernel(network, theta, state);
    const double total = kernel.rate();
    if (!(total > 0.0)) throw StalledStateError("holding rate is zero: no transition is possible");
    std::vector<JumpProbability> out;
    kernel.for_each_transition([&](const TransitionEvent& e, double h) {
        if (h > 0.0) out.push_back({e, h / total});
    });
    return out;
}

NetworkState apply_event(const Network& network, NetworkState state, const TransitionEvent& event) {
    require_valid(network, state);
    const auto d = network.class_count();
    auto in_service = [&](ClassId k) {
        const auto i = network.station_of(k);
        const auto w = service_allocation(network.station(i), state.configs[i]);
        return w[network.station(i).local_index(k)] > 0.0;
    };
    switch (event.kind) {
        case TransitionEvent::Kind::arrival:
            if (event.to >= d) throw IllegalEventError("arrival to unknown class");
            break;
        case TransitionEvent::Kind::departure:
            if (event.from >= d || !in_service(event.from) || !(network.exit_probability(event.from) > 0.0))
                throw IllegalEventError("departure of class " + std::to_string(event.from + 1) + " has zero rate");
            break;
        case TransitionEvent::Kind::class_change:
            if (event.from >= d || event.to >= d || !in_service(event.from) ||
                !(network.spec().routing[event.from][event.to] > 0.0))
                throw IllegalEventError("class change " + std::to_string(event.from + 1) + "->" +
                                        std::to_string(event.to + 1) + " has zero rate");
            break;
    }
    const std::vector<double> no_arrivals(d, 0.0);
    Kernel kernel(network, no_arrivals, std::move(state));
    kernel.apply(event);
    return kernel.release();
}

double test_functional(const NetworkState& state, double alpha) {
    return std::exp(-alpha * static_cast<double>(total_jobs(state)));
}

EventTrace csv_event_trace(std::ostream& out) {
    out << "model_time,event_kind,from_class,to_class,total_jobs\n";
    out.precision(12);
    return [&out](double time, const TransitionEvent& e, std::size_t jobs) {
        const auto label = [](ClassId k) { return k == npos ? std::size_t{0} : k + 1; };
        out << time << ',' << to_string(e.kind) << ',' << label(e.from) << ',' << label(e.to) << ',' << jobs << '\n';
    };
}

SimOutcome simulate(const Network& network, const std::vector<double>& theta, double horizon,
                    std::uint64_t seed, NetworkState initial, const SimulationOptions& options) {
    if (!(horizon >= 0.0)) throw DomainError("horizon must be >= 0");
    require_valid(network, initial);
    Kernel kernel(network, theta, std::move(initial));
    Rng rng(seed);
    SimOutcome out;
    double now = 0.0;
    std::size_t jobs = total_jobs(kernel.state());
    while (true) {
        const double total = kernel.rate();
        if (!(total > 0.0)) break;
        const double hold = rng.exponential(total);
        if (now + hold > horizon) break;
        now += hold;
        const auto event = kernel.select(rng.uniform_open(), total);
        if (out.event_count >= options.event_cap)
            throw EventBudgetError("simulation exceeded the event budget of " + std::to_string(options.event_cap) +
                                   " transitions");
        kernel.apply(event);
        ++out.event_count;
        jobs = static_cast<std::size_t>(static_cast<long long>(jobs) + event.job_delta());
        if (event.kind == TransitionEvent::Kind::arrival) ++out.arrivals;
        if (event.kind == TransitionEvent::Kind::departure) ++out.departures;
        out.elapsed_model_time = now;
        if (options.trace) options.trace(now, event, jobs);
    }
    out.terminal_state = kernel.release();
    out.functional_value = std::exp(-options.alpha * static_cast<double>(jobs));
    return out;
}

SimOutcome simulate(const Network& network, const std::vector<double>& theta, double horizon,
                    std::uint64_t seed, const SimulationOptions& options) {
    return simulate(network, theta, horizon, seed, empty_state(network), options);
}

}  // namespace mcqn
