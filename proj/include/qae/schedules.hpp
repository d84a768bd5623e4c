// Grover-power schedules and oracle-call accounting.
//
// A schedule is an ordered list of experiments. Entry s runs k_s Grover
// iterations on the prepared state and is measured N_s times. One shot of
// entry s costs 2*k_s + 1 calls to the encoding operator (A or A^dagger).

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace qae {

struct ScheduleEntry {
    std::uint64_t k = 0;      // Grover power
    std::uint64_t shots = 1;  // N_s

    friend bool operator==(const ScheduleEntry&, const ScheduleEntry&) = default;
};

enum class ScheduleFamily { classical, linear, polynomial, exponential, hybrid };

// Parsed form of a schedule-kind label.
//
// Accepted labels: "classical", "linear", "quadratic", "cubic", "poly:<d>",
// "exponential" (alias "exp"), and "hybrid:<j>:<base label>".
struct ScheduleKind {
    ScheduleFamily family = ScheduleFamily::linear;
    unsigned degree = 1;          // polynomial only
    unsigned hybrid_span = 0;     // hybrid only: j
    std::string hybrid_base;      // hybrid only: canonical base label

    static ScheduleKind parse(std::string_view label);
    std::string label() const;

    friend bool operator==(const ScheduleKind&, const ScheduleKind&) = default;
};

struct Schedule {
    std::string kind;  // canonical label
    std::vector<ScheduleEntry> entries;

    std::size_t size() const { return entries.size(); }
    bool empty() const { return entries.empty(); }

    friend bool operator==(const Schedule&, const Schedule&) = default;
};

// Builds num_entries entries of the given kind, all with shots_per_entry shots.
// For a hybrid kind, num_entries counts base entries; the result holds
// (j + 1) * num_entries entries.
Schedule make_schedule(const ScheduleKind& kind, std::size_t num_entries, std::uint64_t shots_per_entry);
Schedule make_schedule(std::string_view kind_label, std::size_t num_entries, std::uint64_t shots_per_entry);

// Replaces every base entry k by the run k, k+1, ..., k+j. Duplicate powers
// produced by overlapping runs are kept.
Schedule hybridize(const Schedule& base, unsigned j = 2);

// Sum over s = 0..upto of N_s * (2 k_s + 1).
std::uint64_t oracle_calls(const Schedule& schedule, std::size_t upto);

// Running oracle_calls for every prefix.
std::vector<std::uint64_t> cumulative_calls(const Schedule& schedule);

// Smallest schedule of the given kind whose total calls reach at least
// `budget`, capped at max_entries base entries.
Schedule make_schedule_for_budget(const ScheduleKind& kind, std::uint64_t budget, std::uint64_t shots_per_entry,
                                  std::size_t max_entries = 1u << 20);

void to_json(nlohmann::json& j, const Schedule& schedule);
void from_json(const nlohmann::json& j, Schedule& schedule);

}  // namespace qae
