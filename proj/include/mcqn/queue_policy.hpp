#pragma once

// Per-station queue configurations and the insertion / deletion / service
// allocation rules for head-of-queue (FCFS, non-preemptive SBP) and
// processor-sharing (equalitarian, proportional, preferential) stations.

#include <cstddef>
#include <deque>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mcqn {

using ClassId = std::size_t;
using StationId = std::size_t;

inline constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

enum class Discipline {
    fcfs,             ///< head-of-queue, first come first served
    sbp,              ///< head-of-queue, non-preemptive static buffer priority
    ps_equalitarian,  ///< processor sharing, equal split over classes present
    ps_proportional,  ///< processor sharing, split proportional to class counts
    ps_preferential,  ///< processor sharing, all capacity to top-priority class (preemptive)
};

std::string_view to_string(Discipline d);

/// Station policy tag. `priority` lists the station's classes from highest
/// to lowest priority; it is only meaningful for sbp and ps_preferential.
/// Empty means ascending class index.
struct StationPolicy {
    Discipline discipline = Discipline::fcfs;
    std::vector<ClassId> priority;
};

/// Static description of one station: which classes it serves and how.
/// Class-indexed vectors inside configs use the *local* index, i.e. the
/// position of the class in `classes()` (ascending global class id).
class StationLayout {
public:
    StationLayout(std::vector<ClassId> classes, StationPolicy policy);

    [[nodiscard]] const std::vector<ClassId>& classes() const noexcept { return classes_; }
    [[nodiscard]] std::size_t size() const noexcept { return classes_.size(); }
    [[nodiscard]] Discipline discipline() const noexcept { return policy_.discipline; }
    [[nodiscard]] const StationPolicy& policy() const noexcept { return policy_; }

    /// Local index of a global class id, or npos when not served here.
    [[nodiscard]] std::size_t local_index(ClassId k) const noexcept {
        return k < local_of_.size() ? local_of_[k] : npos;
    }
    [[nodiscard]] bool serves(ClassId k) const noexcept { return local_index(k) != npos; }

    /// Priority rank of a local index; 0 is highest.
    [[nodiscard]] std::size_t rank(std::size_t local) const noexcept { return rank_[local]; }
    /// Local indices ordered highest priority first.
    [[nodiscard]] const std::vector<std::size_t>& priority_order() const noexcept { return order_; }

private:
    std::vector<ClassId> classes_;
    StationPolicy policy_;
    std::vector<std::size_t> rank_;
    std::vector<std::size_t> order_;
    std::vector<std::size_t> local_of_;
};

/// FCFS queue: global class labels in arrival order, head at the front.
struct FcfsConfig {
    std::deque<ClassId> jobs;
    bool operator==(const FcfsConfig&) const = default;
};

/// SBP queue: the job in service (head) plus waiting-buffer counts per local
/// class index. No head means the station is empty.
struct SbpConfig {
    std::optional<ClassId> head;
    std::vector<std::size_t> buffer;
    bool operator==(const SbpConfig&) const = default;
};

/// PS queue: job counts per local class index.
struct PsConfig {
    std::vector<std::size_t> counts;
    bool operator==(const PsConfig&) const = default;
};

using QueueConfig = std::variant<FcfsConfig, SbpConfig, PsConfig>;

/// Empty configuration matching the station's discipline.
QueueConfig empty_config(const StationLayout& station);

std::size_t job_count(const QueueConfig& config);

/// Number of jobs of global class `k` present (queued or in service).
std::size_t class_count(const StationLayout& station, const QueueConfig& config, ClassId k);

/// Checks the config against the station: variant matches discipline, labels
/// belong to the station, SBP head present iff nonempty.
bool is_consistent(const StationLayout& station, const QueueConfig& config);

/// Arrival of a class-`k` job (the insertion operator).
/// Throws ForeignClassError when k is not served at the station.
void insert_job(const StationLayout& station, QueueConfig& config, ClassId k);

/// Service completion of a class-`k` job (the deletion operator).
/// FCFS/SBP with `k` present but not at the head leave the config unchanged.
/// Throws ForeignClassError, or EmptyDeleteError when the queue is empty or
/// holds no class-`k` job.
void remove_job(const StationLayout& station, QueueConfig& config, ClassId k);

[[nodiscard]] QueueConfig inserted(const StationLayout& station, QueueConfig config, ClassId k);
[[nodiscard]] QueueConfig removed(const StationLayout& station, QueueConfig config, ClassId k);

/// Service weights W_k by local index, written to `weights` (size = station
/// size). All zero iff the config is empty; otherwise they sum to one.
void service_allocation(const StationLayout& station, const QueueConfig& config,
                        std::span<double> weights);

[[nodiscard]] std::vector<double> service_allocation(const StationLayout& station,
                                                     const QueueConfig& config);

/// Human-readable rendering with 1-based class labels, e.g. "(1,3,2)".
std::string describe(const StationLayout& station, const QueueConfig& config);

}  // namespace mcqn
