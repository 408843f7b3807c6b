#pragma once

#include "mapf/conflict.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace mapf {

enum class Variant : std::uint8_t { Cbs, Icbs, Cg };

std::string_view name(Variant v);
std::optional<Variant> parse_variant(std::string_view text);

class CbsSolver;
struct CTNode;

struct SearchConfig {
    Variant variant = Variant::Cg;
    bool headon = true;
    /// Head-on vertex conflicts split into two children only. Not optimal.
    bool two_way_vertex_unsafe = false;
    double time_limit = 10.0;  // seconds
    int horizon = 0;           // maximum path cost; 0 selects default_horizon()
    std::uint64_t seed = 0;    // conflict choice for the plain CBS variant
    std::ostream* trace = nullptr;
    bool record_splits = false;
    /// Called on every expanded non-goal node after its conflicts are classified.
    std::function<void(CbsSolver&, const CTNode&)> on_expand;
};

/// Path-cost cap that keeps the conflict tree finite: free cells times agents.
int default_horizon(const Instance& instance);

struct CTNode {
    int id = 0;
    int parent = -1;
    int depth = 0;
    std::string label;  // split label this node was created by, e.g. "N_i1"
    std::vector<Constraint> constraints;
    Solution solution;
    int cost = 0;
    int h = 0;
    std::vector<ClassifiedConflict> conflicts;
    bool headon_classified = false;

    int f() const { return cost + h; }
};

struct ConstraintSet {
    std::string label;
    std::vector<Constraint> constraints;
};

struct SplitPlan {
    std::vector<ConstraintSet> sets;
};

/// Constraint sets for a conflict given its head-on flags (and v_pre/v_post for vertex
/// conflicts). Sets are ordered i-side first. Throws std::invalid_argument when the
/// classification is inconsistent with the conflict.
SplitPlan constraint_sets_for(const Conflict& conflict, const ConflictClass& cls, bool two_way_vertex_unsafe = false);

/// One constraint per agent, as plain CBS splits.
SplitPlan standard_split(const Conflict& conflict);

enum class SplitKind : std::uint8_t { Standard, SemiHeadOn, HeadOn };

struct ChildRecord {
    std::string label;
    bool pruned = false;
    int cost = 0;
    std::vector<std::pair<int, int>> replanned;  // (agent, new path cost)
};

struct SplitRecord {
    int node = 0;
    int node_cost = 0;
    Conflict conflict;
    ConflictClass cls;
    SplitKind kind = SplitKind::Standard;
    std::vector<int> path_costs;  // per agent, before the split
    std::vector<ChildRecord> children;
};

struct SearchStats {
    long expanded = 0;
    long generated = 0;
    double runtime = 0.0;
    long low_level_calls = 0;
    long headon_splits = 0;
    long semiheadon_splits = 0;
    long standard_splits = 0;
    long mdd_builds = 0;
    std::optional<int> solution_cost;
};

enum class Outcome : std::uint8_t { Solved, Timeout, Unsolvable };

std::string_view name(Outcome o);

struct SearchResult {
    Outcome outcome = Outcome::Unsolvable;
    std::optional<Solution> solution;
    SearchStats stats;
    std::vector<SplitRecord> splits;
    std::vector<int> expanded_f;  // f of each expanded node, in order
};

/// Exact minimum vertex cover size; branch and bound with degree-one reduction.
int minimum_vertex_cover(int vertex_count, const std::vector<std::pair<int, int>>& edges);

/// Minimum vertex cover of the agent graph whose edges are the cardinal conflicts.
int cg_heuristic(std::span<const ClassifiedConflict> conflicts, int agent_count);

/// Best-first search over the conflict tree. One instance per run; not thread-safe.
class CbsSolver {
public:
    CbsSolver(const Instance& instance, SearchConfig config);
    CbsSolver(const CbsSolver&) = delete;
    CbsSolver& operator=(const CbsSolver&) = delete;

    SearchResult solve();

    // Building blocks, exposed for verification.
    std::optional<CTNode> make_root();
    /// Detects and classifies the node's conflicts (cardinality only) and sets h.
    void evaluate(CTNode& node, const CTNode* parent = nullptr);
    void classify_headon(CTNode& node);
    ClassifiedConflict choose_conflict(const CTNode& node);
    std::vector<CTNode> split(const CTNode& node, const SplitPlan& plan, SplitRecord* record = nullptr);
    std::optional<Path> replan(int agent, std::span<const Constraint> constraints);
    ConflictClass classify_in(const CTNode& node, const Conflict& conflict);

    const Instance& instance() const { return instance_; }
    const SearchConfig& config() const { return config_; }
    int horizon() const { return horizon_; }
    MddCache& mdds() { return mdds_; }
    HeadonAnalyzer& headon() { return headon_; }
    const std::vector<DistanceMap>& distances() const { return distances_; }

private:
    bool needs_classification() const { return config_.variant != Variant::Cbs || config_.headon; }
    void trace_line(const std::string& line);

    const Instance& instance_;
    SearchConfig config_;
    int horizon_;
    std::vector<DistanceMap> distances_;
    MddCache mdds_;
    HeadonAnalyzer headon_;
    std::mt19937_64 rng_;
    long low_level_calls_ = 0;
    int next_id_ = 0;
};

SearchResult search(const Instance& instance, const SearchConfig& config);

/// "agent <id>: (r,c)@0 (r,c)@1 ..." per line.
std::string format_solution(const Solution& solution);

}  // namespace mapf
