#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "confsweep/events.hpp"
#include "confsweep/partitions.hpp"

namespace confsweep {

struct SweepOptions {
    int jobs = 1;
    // log2 of duplicate-state table slots per task; 0 disables suppression.
    int dedup_log2 = 21;
};

struct SweepStats {
    uint64_t nodes = 0;
    uint64_t emitted = 0;
    uint64_t dedup_hits = 0;

    void add(const SweepStats& o) {
        nodes += o.nodes;
        emitted += o.emitted;
        dedup_hits += o.dedup_hits;
    }
};

namespace sweepdetail {

constexpr int MAXM = 24;  // working lines
constexpr int MAXK = 6;

// Per-working-line sweep counters (crossings already swept, split by kind),
// the open segment, and the closed segment lengths in order along the line.
struct LineSt {
    uint8_t frame_k = 0, work_k = 0, frame_2 = 0, work_2 = 0;
    uint8_t cur = 0;     // plain crossings on the segment being swept
    uint8_t piece0 = 0;  // part of the wrap segment swept before the first point
    uint8_t nsegs = 0;
    uint8_t segs[MAXK - 1] = {};
    bool group_init = false;  // base-line crossing is a configuration point
    bool piece0_set = false;

    bool operator==(const LineSt&) const = default;
};

struct State {
    uint8_t order[MAXM] = {};   // line ids as met left-to-right by the sweep line
    uint8_t pos[MAXM] = {};     // inverse of order
    uint32_t crossed[MAXM] = {};  // pair table, bit b of crossed[a]
    LineSt ls[MAXM];
    uint8_t frames_done = 0;  // the base line counts as the first frame sweep
    uint8_t work_done = 0;
    uint16_t work2_total = 0;

    bool operator==(const State&) const = default;
};

// Instance-wide constants shared by all search nodes of one (n,k,lambda) root.
struct Ctx {
    int n = 0, k = 0;
    int m = 0;     // n-k working lines
    int W = 0;     // n-1-k(k-1): working points, and plain crossings per line
    int cap2 = 0;  // (n-2k)W/2: total working plain crossings
    SegmentTuple lambda;
    int lambda0 = 0;
    int rank_lambda = 0;
    const PartitionTable* table = nullptr;
};

Ctx make_ctx(int n, int k, const PartitionTable& table, int lambda_index);

// Sweeps the base line: lambda[0] plain crossings, a point, lambda[1] plain
// crossings, ..., ending with lambda[k-1] plain crossings. Throws if lambda
// is not its own dihedral maximum.
State initial_state(const Ctx& ctx);

// Heap-free event record for the search hot path; expanded to a full Event
// only when a configuration is emitted.
struct PackedEvent {
    uint8_t kind = 0;              // 1 work, 2 frame
    uint8_t order[MAXM] = {};      // pre-event sweep-line order
    uint32_t chosen_mask = 0;      // work: positions of the chosen lines
    uint32_t left_mask = 0;        // work: kernel positions sent left
    uint32_t right_mask = 0;
    uint8_t slot[MAXM] = {};       // frame: slot rank per position (gap j -> 2j, group g -> 2g-1)
};

Event unpack_event(const Ctx& ctx, const PackedEvent& pe);

using SuccessorFn = std::function<void(const State&, const PackedEvent&)>;

// All admissible ways to sweep a working k-point / the next frame pseudoline,
// in deterministic order.
void for_each_work_successor(const Ctx& ctx, const State& s, const SuccessorFn& fn);
void for_each_frame_successor(const Ctx& ctx, const State& s, const SuccessorFn& fn);

enum class CloseStatus { Accepted, InfeasibleClosure, CanonicityReject, NotReady };

// Feasibility of finishing the sweep in the last frame region; fills the
// plain crossings each working line still needs when u_out is non-null.
CloseStatus close_feasible(const Ctx& ctx, const State& s, int* u_out);

// Builds the configuration from a complete event history ending in Close.
Configuration assemble_closed(const Ctx& ctx, const std::vector<Event>& history);

// Convenience for tests: close_feasible + assemble_closed.
CloseStatus try_close(const Ctx& ctx, const State& s, const std::vector<Event>& history,
                      std::unique_ptr<RawRecord>* out);

uint64_t fingerprint(const Ctx& ctx, const State& s, int lambda_index, uint64_t seed);

}  // namespace sweepdetail

// A deterministic function of (n,k): the search tree split into independent
// subtree tasks at a fixed shallow depth. Worker count never changes it.
struct SweepTask {
    sweepdetail::State state;
    std::vector<Event> history;
    int lambda_index = 0;
};

struct SweepPlan {
    int n = 0, k = 0;
    PartitionTable table;
    std::vector<SweepTask> tasks;
    uint64_t plan_nodes = 0;
};

SweepPlan plan_sweep(int n, int k);

// Runs one subtree to exhaustion; emissions appended to *text as JSONL lines
// (and to *records when non-null), in DFS order.
void run_task(const SweepPlan& plan, int index, const SweepOptions& opt, SweepStats* stats,
              std::string* text, std::vector<RawRecord>* records);

// Runs tasks not in `skip` (at most `max_new_tasks` of them when >= 0) on a
// worker pool; on_done fires once per finished task under a lock, in
// completion order. Returns true when every task of the plan is accounted for.
bool run_plan(const SweepPlan& plan, const SweepOptions& opt, const std::set<int>& skip,
              int max_new_tasks, SweepStats* stats,
              const std::function<void(int, const std::string&)>& on_done);

// Convenience wrapper: full enumeration, records in deterministic order.
std::vector<RawRecord> enumerate_sweep(int n, int k, const SweepOptions& opt = {},
                                       SweepStats* stats = nullptr);

}  // namespace confsweep
