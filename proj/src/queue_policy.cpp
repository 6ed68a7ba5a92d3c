#include "mcqn/queue_policy.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "mcqn/errors.hpp"

namespace mcqn {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::size_t local_or_throw(const StationLayout& station, ClassId k) {
    const auto local = station.local_index(k);
    if (local == npos)
        throw ForeignClassError("class " + std::to_string(k + 1) + " is not served at this station");
    return local;
}

/// Highest-priority local class with a nonzero count, or npos.
std::size_t top_present(const StationLayout& station, const std::vector<std::size_t>& counts) {
    for (auto local : station.priority_order())
        if (counts[local] > 0) return local;
    return npos;
}

}  // namespace

std::string_view to_string(Discipline d) {
    switch (d) {
        case Discipline::fcfs: return "fcfs";
        case Discipline::sbp: return "sbp";
        case Discipline::ps_equalitarian: return "ps-equalitarian";
        case Discipline::ps_proportional: return "ps-proportional";
        case Discipline::ps_preferential: return "ps-preferential";
    }
    return "?";
}

StationLayout::StationLayout(std::vector<ClassId> classes, StationPolicy policy)
    : classes_(std::move(classes)), policy_(std::move(policy)) {
    std::sort(classes_.begin(), classes_.end());
    classes_.erase(std::unique(classes_.begin(), classes_.end()), classes_.end());
    if (!classes_.empty()) local_of_.assign(classes_.back() + 1, npos);
    for (std::size_t j = 0; j < classes_.size(); ++j) local_of_[classes_[j]] = j;
    rank_.assign(classes_.size(), npos);
    if (policy_.priority.empty()) {
        order_.resize(classes_.size());
        std::iota(order_.begin(), order_.end(), std::size_t{0});
    } else {
        for (auto k : policy_.priority) {
            const auto local = local_index(k);
            if (local == npos || rank_[local] != npos)
                throw DomainError("priority order is not a permutation of the station's classes");
            rank_[local] = order_.size();
            order_.push_back(local);
        }
        if (order_.size() != classes_.size())
            throw DomainError("priority order is not a permutation of the station's classes");
    }
    for (std::size_t r = 0; r < order_.size(); ++r) rank_[order_[r]] = r;
}

QueueConfig empty_config(const StationLayout& station) {
    switch (station.discipline()) {
        case Discipline::fcfs: return FcfsConfig{};
        case Discipline::sbp: return SbpConfig{std::nullopt, std::vector<std::size_t>(station.size(), 0)};
        default: return PsConfig{std::vector<std::size_t>(station.size(), 0)};
    }
}

std::size_t job_count(const QueueConfig& config) {
    return std::visit(overloaded{
                          [](const FcfsConfig& c) { return c.jobs.size(); },
                          [](const SbpConfig& c) {
                              if (!c.head) return std::size_t{0};
                              return 1 + std::accumulate(c.buffer.begin(), c.buffer.end(), std::size_t{0});
                          },
                          [](const PsConfig& c) {
                              return std::accumulate(c.counts.begin(), c.counts.end(), std::size_t{0});
                          },
                      },
                      config);
}

std::size_t class_count(const StationLayout& station, const QueueConfig& config, ClassId k) {
    const auto local = station.local_index(k);
    if (local == npos) return 0;
    return std::visit(overloaded{
                          [&](const FcfsConfig& c) {
                              return static_cast<std::size_t>(std::count(c.jobs.begin(), c.jobs.end(), k));
                          },
                          [&](const SbpConfig& c) {
                              if (!c.head) return std::size_t{0};
                              return c.buffer[local] + (*c.head == k ? 1 : 0);
                          },
                          [&](const PsConfig& c) { return c.counts[local]; },
                      },
                      config);
}

bool is_consistent(const StationLayout& station, const QueueConfig& config) {
    const bool ps = station.discipline() != Discipline::fcfs && station.discipline() != Discipline::sbp;
    return std::visit(overloaded{
                          [&](const FcfsConfig& c) {
                              return station.discipline() == Discipline::fcfs &&
                                     std::all_of(c.jobs.begin(), c.jobs.end(),
                                                 [&](ClassId k) { return station.serves(k); });
                          },
                          [&](const SbpConfig& c) {
                              if (station.discipline() != Discipline::sbp) return false;
                              if (c.buffer.size() != station.size()) return false;
                              if (c.head) return station.serves(*c.head);
                              return std::all_of(c.buffer.begin(), c.buffer.end(),
                                                 [](std::size_t x) { return x == 0; });
                          },
                          [&](const PsConfig& c) { return ps && c.counts.size() == station.size(); },
                      },
                      config);
}

void insert_job(const StationLayout& station, QueueConfig& config, ClassId k) {
    const auto local = local_or_throw(station, k);
    std::visit(overloaded{
                   [&](FcfsConfig& c) { c.jobs.push_back(k); },
                   [&](SbpConfig& c) {
                       if (!c.head)
                           c.head = k;
                       else
                           ++c.buffer[local];
                   },
                   [&](PsConfig& c) { ++c.counts[local]; },
               },
               config);
}

void remove_job(const StationLayout& station, QueueConfig& config, ClassId k) {
    const auto local = local_or_throw(station, k);
    std::visit(overloaded{
                   [&](FcfsConfig& c) {
                       if (c.jobs.empty()) throw EmptyDeleteError("delete from an empty FCFS queue");
                       if (c.jobs.front() == k) {
                           c.jobs.pop_front();
                           return;
                       }
                       if (std::find(c.jobs.begin(), c.jobs.end(), k) == c.jobs.end())
                           throw EmptyDeleteError("class " + std::to_string(k + 1) + " absent from FCFS queue");
                   },
                   [&](SbpConfig& c) {
                       if (!c.head) throw EmptyDeleteError("delete from an empty SBP queue");
                       if (*c.head != k) {
                           if (c.buffer[local] == 0)
                               throw EmptyDeleteError("class " + std::to_string(k + 1) + " absent from SBP queue");
                           return;
                       }
                       const auto next = top_present(station, c.buffer);
                       if (next == npos) {
                           c.head.reset();
                       } else {
                           --c.buffer[next];
                           c.head = station.classes()[next];
                       }
                   },
                   [&](PsConfig& c) {
                       if (c.counts[local] == 0)
                           throw EmptyDeleteError("class " + std::to_string(k + 1) + " absent from PS queue");
                       --c.counts[local];
                   },
               },
               config);
}

QueueConfig inserted(const StationLayout& station, QueueConfig config, ClassId k) {
    insert_job(station, config, k);
    return config;
}

QueueConfig removed(const StationLayout& station, QueueConfig config, ClassId k) {
    remove_job(station, config, k);
    return config;
}

void service_allocation(const StationLayout& station, const QueueConfig& config,
                        std::span<double> weights) {
    std::fill(weights.begin(), weights.end(), 0.0);
    std::visit(overloaded{
                   [&](const FcfsConfig& c) {
                       if (!c.jobs.empty()) weights[station.local_index(c.jobs.front())] = 1.0;
                   },
                   [&](const SbpConfig& c) {
                       if (c.head) weights[station.local_index(*c.head)] = 1.0;
                   },
                   [&](const PsConfig& c) {
                       switch (station.discipline()) {
                           case Discipline::ps_equalitarian: {
                               const auto support = static_cast<std::size_t>(
                                   std::count_if(c.counts.begin(), c.counts.end(),
                                                 [](std::size_t x) { return x > 0; }));
                               if (support == 0) return;
                               const double share = 1.0 / static_cast<double>(support);
                               for (std::size_t j = 0; j < c.counts.size(); ++j)
                                   if (c.counts[j] > 0) weights[j] = share;
                               break;
                           }
                           case Discipline::ps_proportional: {
                               const auto total =
                                   std::accumulate(c.counts.begin(), c.counts.end(), std::size_t{0});
                               if (total == 0) return;
                               for (std::size_t j = 0; j < c.counts.size(); ++j)
                                   weights[j] = static_cast<double>(c.counts[j]) / static_cast<double>(total);
                               break;
                           }
                           default: {
                               const auto top = top_present(station, c.counts);
                               if (top != npos) weights[top] = 1.0;
                               break;
                           }
                       }
                   },
               },
               config);
}

std::vector<double> service_allocation(const StationLayout& station, const QueueConfig& config) {
    std::vector<double> weights(station.size());
    service_allocation(station, config, weights);
    return weights;
}

std::string describe(const StationLayout& station, const QueueConfig& config) {
    std::ostringstream out;
    auto counts = [&](const std::vector<std::size_t>& x) {
        out << '[';
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (j) out << ',';
            out << (station.classes()[j] + 1) << ':' << x[j];
        }
        out << ']';
    };
    std::visit(overloaded{
                   [&](const FcfsConfig& c) {
                       out << '(';
                       for (std::size_t j = 0; j < c.jobs.size(); ++j) out << (j ? "," : "") << c.jobs[j] + 1;
                       out << ')';
                   },
                   [&](const SbpConfig& c) {
                       if (!c.head) {
                           out << "empty";
                           return;
                       }
                       out << "head=" << *c.head + 1 << " buffer=";
                       counts(c.buffer);
                   },
                   [&](const PsConfig& c) { counts(c.counts); },
               },
               config);
    return out.str();
}

}  // namespace mcqn
