#include "qae/schedules.hpp"

#include <charconv>
#include <limits>
#include <stdexcept>

namespace qae {

namespace {

constexpr std::uint64_t kMaxPower = std::numeric_limits<std::uint64_t>::max() / 4;

unsigned parse_unsigned(std::string_view text, std::string_view what) {
    unsigned value = 0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || text.empty()) {
        throw std::invalid_argument("bad " + std::string(what) + " in schedule label: '" + std::string(text) + "'");
    }
    return value;
}

// k for entry s of a non-hybrid family.
std::uint64_t power_at(const ScheduleKind& kind, std::uint64_t s) {
    switch (kind.family) {
        case ScheduleFamily::classical:
            return 0;
        case ScheduleFamily::linear:
            return s;
        case ScheduleFamily::polynomial: {
            std::uint64_t k = 1;
            for (unsigned i = 0; i < kind.degree; ++i) {
                if (s != 0 && k > kMaxPower / s) throw std::overflow_error("polynomial schedule power overflows");
                k *= s;
            }
            return k;
        }
        case ScheduleFamily::exponential:
            if (s == 0) return 0;
            if (s - 1 >= 61) throw std::overflow_error("exponential schedule power overflows");
            return std::uint64_t{1} << (s - 1);
        case ScheduleFamily::hybrid:
            break;
    }
    throw std::logic_error("power_at called on hybrid kind");
}

std::uint64_t entry_calls(const ScheduleEntry& e) { return e.shots * (2 * e.k + 1); }

}  // namespace

ScheduleKind ScheduleKind::parse(std::string_view label) {
    ScheduleKind kind;
    if (label == "classical") {
        kind.family = ScheduleFamily::classical;
    } else if (label == "linear") {
        kind.family = ScheduleFamily::linear;
    } else if (label == "quadratic") {
        kind.family = ScheduleFamily::polynomial;
        kind.degree = 2;
    } else if (label == "cubic") {
        kind.family = ScheduleFamily::polynomial;
        kind.degree = 3;
    } else if (label == "exponential" || label == "exp") {
        kind.family = ScheduleFamily::exponential;
    } else if (label.starts_with("poly:")) {
        kind.family = ScheduleFamily::polynomial;
        kind.degree = parse_unsigned(label.substr(5), "degree");
        if (kind.degree < 1) throw std::invalid_argument("polynomial schedule needs degree >= 1");
        if (kind.degree == 1) kind.family = ScheduleFamily::linear;
    } else if (label.starts_with("hybrid:")) {
        auto rest = label.substr(7);
        auto colon = rest.find(':');
        if (colon == std::string_view::npos) {
            throw std::invalid_argument("hybrid schedule label must be hybrid:<j>:<base>, got '" + std::string(label) + "'");
        }
        kind.family = ScheduleFamily::hybrid;
        kind.hybrid_span = parse_unsigned(rest.substr(0, colon), "hybrid span");
        if (kind.hybrid_span < 1) throw std::invalid_argument("hybrid span j must be >= 1");
        auto base = parse(rest.substr(colon + 1));
        if (base.family == ScheduleFamily::hybrid) throw std::invalid_argument("nested hybrid schedules are not supported");
        kind.hybrid_base = base.label();
    } else {
        throw std::invalid_argument("unknown schedule kind '" + std::string(label) + "'");
    }
    return kind;
}

std::string ScheduleKind::label() const {
    switch (family) {
        case ScheduleFamily::classical:
            return "classical";
        case ScheduleFamily::linear:
            return "linear";
        case ScheduleFamily::polynomial:
            if (degree == 2) return "quadratic";
            if (degree == 3) return "cubic";
            return "poly:" + std::to_string(degree);
        case ScheduleFamily::exponential:
            return "exponential";
        case ScheduleFamily::hybrid:
            return "hybrid:" + std::to_string(hybrid_span) + ":" + hybrid_base;
    }
    return {};
}

Schedule make_schedule(const ScheduleKind& kind, std::size_t num_entries, std::uint64_t shots_per_entry) {
    if (num_entries == 0) throw std::invalid_argument("schedule needs at least one entry");
    if (shots_per_entry == 0) throw std::invalid_argument("shots per entry must be >= 1");

    if (kind.family == ScheduleFamily::hybrid) {
        auto base = make_schedule(ScheduleKind::parse(kind.hybrid_base), num_entries, shots_per_entry);
        return hybridize(base, kind.hybrid_span);
    }

    Schedule schedule;
    schedule.kind = kind.label();
    schedule.entries.reserve(num_entries);
    for (std::size_t s = 0; s < num_entries; ++s) {
        schedule.entries.push_back({power_at(kind, s), shots_per_entry});
    }
    return schedule;
}

Schedule make_schedule(std::string_view kind_label, std::size_t num_entries, std::uint64_t shots_per_entry) {
    return make_schedule(ScheduleKind::parse(kind_label), num_entries, shots_per_entry);
}

Schedule hybridize(const Schedule& base, unsigned j) {
    if (base.empty()) throw std::invalid_argument("hybridize needs a non-empty base schedule");
    if (j < 1) throw std::invalid_argument("hybrid span j must be >= 1");

    Schedule out;
    out.kind = "hybrid:" + std::to_string(j) + ":" + base.kind;
    out.entries.reserve(base.size() * (j + 1));
    for (const auto& e : base.entries) {
        for (unsigned i = 0; i <= j; ++i) out.entries.push_back({e.k + i, e.shots});
    }
    return out;
}

std::uint64_t oracle_calls(const Schedule& schedule, std::size_t upto) {
    if (upto >= schedule.size()) {
        throw std::out_of_range("oracle_calls: entry index " + std::to_string(upto) + " out of range for schedule of " +
                                std::to_string(schedule.size()) + " entries");
    }
    std::uint64_t total = 0;
    for (std::size_t s = 0; s <= upto; ++s) total += entry_calls(schedule.entries[s]);
    return total;
}

std::vector<std::uint64_t> cumulative_calls(const Schedule& schedule) {
    std::vector<std::uint64_t> out;
    out.reserve(schedule.size());
    std::uint64_t total = 0;
    for (const auto& e : schedule.entries) {
        total += entry_calls(e);
        out.push_back(total);
    }
    return out;
}

Schedule make_schedule_for_budget(const ScheduleKind& kind, std::uint64_t budget, std::uint64_t shots_per_entry,
                                  std::size_t max_entries) {
    if (shots_per_entry == 0) throw std::invalid_argument("shots per entry must be >= 1");
    const unsigned run = kind.family == ScheduleFamily::hybrid ? kind.hybrid_span : 0;
    const ScheduleKind base = kind.family == ScheduleFamily::hybrid ? ScheduleKind::parse(kind.hybrid_base) : kind;

    Schedule schedule;
    schedule.kind = kind.label();
    std::uint64_t total = 0;
    for (std::size_t s = 0; s < max_entries && (schedule.empty() || total < budget); ++s) {
        const std::uint64_t k0 = power_at(base, s);
        for (unsigned i = 0; i <= run; ++i) {
            ScheduleEntry e{k0 + i, shots_per_entry};
            total += entry_calls(e);
            schedule.entries.push_back(e);
        }
    }
    return schedule;
}

void to_json(nlohmann::json& j, const Schedule& schedule) {
    auto entries = nlohmann::json::array();
    for (const auto& e : schedule.entries) entries.push_back({e.k, e.shots});
    j = nlohmann::json{{"kind", schedule.kind}, {"entries", std::move(entries)}};
}

void from_json(const nlohmann::json& j, Schedule& schedule) {
    schedule.kind = j.at("kind").get<std::string>();
    schedule.entries.clear();
    for (const auto& pair : j.at("entries")) {
        if (!pair.is_array() || pair.size() != 2) throw std::invalid_argument("schedule entry must be [k, N]");
        ScheduleEntry e{pair[0].get<std::uint64_t>(), pair[1].get<std::uint64_t>()};
        if (e.shots == 0) throw std::invalid_argument("schedule entry shot count must be >= 1");
        schedule.entries.push_back(e);
    }
}

}  // namespace qae
