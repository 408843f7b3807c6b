#pragma once

#include "mapf/mdd.hpp"

#include <array>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mapf {

enum class ConflictKind : std::uint8_t { Vertex, Edge };

/// Vertex conflict: agents `a1` and `a2` both occupy `v` at `t`.
/// Edge conflict: `a1` moves u->v while `a2` moves v->u between `t - 1` and `t`.
struct Conflict {
    ConflictKind kind = ConflictKind::Vertex;
    int a1 = 0;
    int a2 = 1;
    Location u;  // unused for vertex conflicts
    Location v;
    int t = 0;

    static Conflict vertex(int a1, int a2, Location v, int t) { return {ConflictKind::Vertex, a1, a2, v, v, t}; }
    static Conflict edge(int a1, int a2, Location u, Location v, int t)
    {
        return {ConflictKind::Edge, a1, a2, u, v, t};
    }

    bool is_vertex() const { return kind == ConflictKind::Vertex; }
    int agent(int side) const { return side == 0 ? a1 : a2; }

    /// Same conflict with the smaller agent id first.
    Conflict normalized() const;

    friend auto operator<=>(const Conflict&, const Conflict&) = default;
};

std::ostream& operator<<(std::ostream& os, const Conflict& c);
std::string to_string(const Conflict& c);

enum class Cardinality : std::uint8_t { Cardinal, SemiCardinal, NonCardinal, Unknown };
enum class HeadonKind : std::uint8_t { HeadOn, SemiHeadOn, NonHeadOn, Unknown };

std::string_view name(Cardinality c);
std::string_view name(HeadonKind k);

/// Side 0 is `a1`, side 1 is `a2`.
struct ConflictClass {
    Cardinality cardinality = Cardinality::Unknown;
    std::array<bool, 2> singleton_for{false, false};
    std::array<bool, 2> headon_for{false, false};
    HeadonKind headon_kind = HeadonKind::Unknown;
    /// Locations of a1 (v_pre) and a2 (v_post) one step before a vertex conflict.
    std::optional<Location> v_pre;
    std::optional<Location> v_post;

    bool cardinal() const { return cardinality == Cardinality::Cardinal; }
};

struct ClassifiedConflict {
    Conflict conflict;
    ConflictClass cls;
};

/// Vertex and edge conflicts with parked agents occupying their goals, sorted by
/// (t, a1, a2). At most one per (pair, t); a vertex conflict wins over an edge one.
std::vector<Conflict> detect_conflicts(const Solution& solution);

/// True iff the solution's paths realize this exact conflict.
bool occurs_in(const Conflict& conflict, const Solution& solution);

/// Cardinality from MDD singletons. `mdd1`/`mdd2` must be built at the agents' current
/// path costs. v_pre/v_post are read from `solution` for vertex conflicts.
ConflictClass classify(const Conflict& conflict, const Mdd& mdd1, const Mdd& mdd2, const Solution& solution);

/// The cardinal conflict a single-constraint split on `side` is guaranteed to produce
/// when the conflict is head-on for that side.
Conflict predicted_conflict(const Conflict& conflict, int side, const ConflictClass& cls);

/// Lower is resolved first: head-on, semi-head-on, cardinal, semi-cardinal, non-cardinal.
int priority_rank(const ConflictClass& cls, bool use_headon);

/// Highest priority conflict, ties by smallest t then smallest agent pair.
const ClassifiedConflict& select_conflict(std::span<const ClassifiedConflict> conflicts, bool use_headon);

/// "conflict kind=... agents=i,j loc=... t=... cardinality=... headon=..."
std::string trace_record(const Conflict& conflict, const ConflictClass& cls);

struct HeadonStats {
    long probe_replans = 0;
    long probe_failures = 0;
    long shortcut_uses = 0;
    long memo_hits = 0;
};

/// Head-on identification for one high-level search. Owns nothing but a memo of probe
/// replanning results; the MDD cache and distances are shared with the search.
class HeadonAnalyzer {
public:
    HeadonAnalyzer(const Instance& instance, const std::vector<DistanceMap>& distances, MddCache& mdds,
                   int horizon);

    /// Condition (2): before both arrivals; for vertex conflicts the agent's previous
    /// location is a singleton one step earlier for it and one step later for the other.
    bool condition2(const Conflict& conflict, int side, std::span<const Constraint> constraints,
                    const Solution& solution);

    /// Constraints the condition (3) probe adds for `side`.
    std::vector<Constraint> probe_constraints(const Conflict& conflict, int side, const Solution& solution) const;

    /// Condition (3) by replanning: the agent's cost with the probe added exceeds l + 1.
    bool condition3_replan(const Conflict& conflict, int side, std::span<const Constraint> constraints,
                           const Solution& solution);

    /// Conditions (1)-(3); condition (3) is assumed for agents without constraints.
    bool headon_for_agent(const Conflict& conflict, int side, const ConflictClass& cls,
                          std::span<const Constraint> constraints, const Solution& solution);

    /// Fills headon_for and headon_kind of a classified conflict.
    void classify_headon(const Conflict& conflict, ConflictClass& cls, std::span<const Constraint> constraints,
                         const Solution& solution);

    const HeadonStats& stats() const { return stats_; }

private:
    std::shared_ptr<const Mdd> mdd_for(int agent, std::span<const Constraint> constraints, const Solution& solution);

    const Instance& instance_;
    const std::vector<DistanceMap>& distances_;
    MddCache& mdds_;
    int horizon_;
    std::map<std::pair<int, std::vector<Constraint>>, int> probe_memo_;  // cost or -1 for none
    HeadonStats stats_;
};

bool has_constraints(std::span<const Constraint> constraints, int agent);

}  // namespace mapf
