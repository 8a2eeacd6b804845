#include "confsweep/sweep.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "confsweep/hashutil.hpp"

namespace confsweep {
namespace sweepdetail {

Ctx make_ctx(int n, int k, const PartitionTable& table, int lambda_index) {
    Ctx ctx;
    ctx.n = n;
    ctx.k = k;
    ctx.m = n - k;
    ctx.W = n - 1 - k * (k - 1);
    ctx.cap2 = (n - 2 * k) * ctx.W / 2;
    ctx.table = &table;
    ctx.lambda = table.table().at(lambda_index);
    ctx.lambda0 = ctx.lambda[0];
    ctx.rank_lambda = lambda_index;
    return ctx;
}

namespace {

// A point was swept on line l: the open segment ends. The part swept before
// the line's first point belongs to the wrap-around segment and is kept
// separately; everything else is a complete segment.
inline void close_segment(LineSt& L, int k) {
    if (!L.group_init && !L.piece0_set) {
        L.piece0 = L.cur;
        L.piece0_set = true;
    } else {
        assert(L.nsegs < k - 1);
        L.segs[L.nsegs++] = L.cur;
    }
    L.cur = 0;
}

// Plain crossings a line can still accept on its open wrap-around segment
// are limited once all its points are swept.
inline int wrap_extra(const LineSt& L, int k) {
    return (L.frame_k + L.work_k == k && !L.group_init) ? L.piece0 : 0;
}

inline bool pair_crossed(const State& s, int a, int b) {
    return (s.crossed[a] >> b) & 1u;
}

inline void mark_crossed(State& s, int a, int b) {
    s.crossed[a] |= 1u << b;
    s.crossed[b] |= 1u << a;
}

inline bool points_feasible(const Ctx& ctx, const State& s) {
    const int budget = (ctx.k - s.frames_done) + (ctx.W - s.work_done);
    for (int l = 0; l < ctx.m; ++l) {
        const LineSt& L = s.ls[l];
        if (ctx.k - L.frame_k - L.work_k > budget) return false;
    }
    return true;
}

struct PairList {
    std::pair<uint8_t, uint8_t> v[MAXM * MAXM / 2];
    int count = 0;
};

// ---------------------------------------------------------------- work event

struct WorkExpander {
    const Ctx& ctx;
    const State& s;
    const SuccessorFn& fn;

    int k, m;
    bool eligible[MAXM] = {};
    bool chosen_pos[MAXM] = {};
    int cp[MAXK] = {};  // chosen positions, ascending
    int kp[MAXM] = {};  // kernel positions, ascending
    int nkernel = 0;
    int8_t dir[MAXM] = {};  // 0 = left, 1 = right, per kernel index
    int add[MAXM] = {};     // forced plain crossings per line, this event
    PairList forced;

    WorkExpander(const Ctx& c, const State& st, const SuccessorFn& f)
        : ctx(c), s(st), fn(f), k(c.k), m(c.m) {}

    void run() {
        if (s.work_done >= ctx.W) return;
        for (int l = 0; l < m; ++l) {
            const LineSt& L = s.ls[l];
            eligible[l] = (L.frame_k + L.work_k < k) && (L.work_k + L.work_2 < ctx.W);
        }
        choose(0, 0, 0u);
    }

    void choose(int start, int count, uint32_t mask) {
        if (count == k) {
            expand_kernel();
            return;
        }
        for (int p = start; p <= m - (k - count); ++p) {
            int l = s.order[p];
            if (!eligible[l]) continue;
            if (s.crossed[l] & mask) continue;
            cp[count] = p;
            chosen_pos[p] = true;
            choose(p + 1, count + 1, mask | (1u << l));
            chosen_pos[p] = false;
        }
    }

    enum Kind { Chosen, Kernel };

    bool cap_ok(int l, Kind kind) const {
        const LineSt& L = s.ls[l];
        const int ad = add[l];
        if (L.frame_2 + L.work_2 + ad > ctx.W) return false;
        if (kind == Chosen) {
            if (L.work_k + 1 + L.work_2 + ad > ctx.W) return false;
            if (L.cur + ad > ctx.lambda0) return false;  // segment closing at the new point
        } else {
            if (L.work_k + L.work_2 + ad > ctx.W) return false;
            if (L.cur + ad + wrap_extra(L, k) > ctx.lambda0) return false;
        }
        return true;
    }

    bool charge(int a, Kind ka, int b, Kind kb) {
        if (pair_crossed(s, a, b)) return false;
        if (s.work2_total + forced.count + 1 > ctx.cap2) return false;
        add[a]++;
        add[b]++;
        forced.v[forced.count++] = {(uint8_t)a, (uint8_t)b};
        return cap_ok(a, ka) && cap_ok(b, kb);
    }

    void rollback(int fmark) {
        while (forced.count > fmark) {
            auto [a, b] = forced.v[--forced.count];
            add[a]--;
            add[b]--;
        }
    }

    void expand_kernel() {
        nkernel = 0;
        for (int p = cp[0] + 1; p < cp[k - 1]; ++p)
            if (!chosen_pos[p]) kp[nkernel++] = p;
        assign(0);
    }

    void assign(int i) {
        if (i == nkernel) {
            emit();
            return;
        }
        const int q = kp[i];
        const int lq = s.order[q];
        for (int d = 0; d < 2; ++d) {
            const int fmark = forced.count;
            bool ok = true;
            if (d == 0) {
                // sent left: crosses chosen lines originally on its left and
                // earlier kernel lines already sent right
                for (int t = 0; t < k && ok; ++t) {
                    if (cp[t] > q) break;
                    ok = charge(lq, Kernel, s.order[cp[t]], Chosen);
                }
                for (int j = 0; j < i && ok; ++j)
                    if (dir[j] == 1) ok = charge(lq, Kernel, s.order[kp[j]], Kernel);
            } else {
                for (int t = k - 1; t >= 0 && ok; --t) {
                    if (cp[t] < q) break;
                    ok = charge(lq, Kernel, s.order[cp[t]], Chosen);
                }
            }
            if (ok) {
                dir[i] = (int8_t)d;
                assign(i + 1);
            }
            rollback(fmark);
        }
    }

    void emit() {
        State c = s;
        for (int t = 0; t < forced.count; ++t) {
            auto [a, b] = forced.v[t];
            mark_crossed(c, a, b);
        }
        for (int l = 0; l < m; ++l) {
            if (!add[l]) continue;
            c.ls[l].work_2 += (uint8_t)add[l];
            c.ls[l].cur += (uint8_t)add[l];
        }
        for (int t = 0; t < k; ++t) {
            const int l = s.order[cp[t]];
            LineSt& L = c.ls[l];
            close_segment(L, k);
            L.work_k += 1;
            for (int t2 = t + 1; t2 < k; ++t2) mark_crossed(c, l, s.order[cp[t2]]);
        }
        c.work2_total += (uint16_t)forced.count;
        c.work_done += 1;

        // new order over the affected span: left kernel, chosen reversed, right kernel
        uint8_t span[MAXM];
        int sn = 0;
        for (int j = 0; j < nkernel; ++j)
            if (dir[j] == 0) span[sn++] = s.order[kp[j]];
        for (int t = k - 1; t >= 0; --t) span[sn++] = s.order[cp[t]];
        for (int j = 0; j < nkernel; ++j)
            if (dir[j] == 1) span[sn++] = s.order[kp[j]];
        for (int t = 0; t < sn; ++t) {
            c.order[cp[0] + t] = span[t];
            c.pos[span[t]] = (uint8_t)(cp[0] + t);
        }

        if (!points_feasible(ctx, c)) return;

        Event e;
        e.kind = Event::Kind::Work;
        for (int t = 0; t < k; ++t) e.chosen.push_back(s.order[cp[t]]);
        for (int j = 0; j < nkernel; ++j)
            (dir[j] == 0 ? e.left : e.right).push_back(s.order[kp[j]]);
        fn(c, e);
    }
};

// --------------------------------------------------------------- frame event

struct FrameExpander {
    const Ctx& ctx;
    const State& s;
    const SuccessorFn& fn;

    int k, m;
    int slot_rank[MAXM];            // per position; gap j -> 2j, group g -> 2g-1
    int grp_members[MAXK][MAXK];    // positions per group, in pre-event order
    int grp_count[MAXK] = {};
    int gap_count[MAXK] = {};
    int grouped_total = 0;
    int add[MAXM] = {};
    PairList forced;
    PairList point_pairs;

    FrameExpander(const Ctx& c, const State& st, const SuccessorFn& f)
        : ctx(c), s(st), fn(f), k(c.k), m(c.m) {
        std::fill(slot_rank, slot_rank + MAXM, -1);
    }

    void run() {
        if (s.frames_done >= k) return;
        assign(0);
    }

    enum Kind { Group, Gap };

    Kind kind_of(int pos) const { return (slot_rank[pos] & 1) ? Group : Gap; }

    bool cap_ok(int l, Kind kind) const {
        const LineSt& L = s.ls[l];
        const int ad = add[l];
        if (L.work_k + L.work_2 + ad > ctx.W) return false;
        if (kind == Group) {
            if (L.frame_2 + L.work_2 + ad > ctx.W) return false;
            if (L.cur + ad > ctx.lambda0) return false;  // segment closing at the frame point
        } else {
            if (L.frame_2 + L.work_2 + ad + 1 > ctx.W) return false;
            if (L.cur + ad + 1 + wrap_extra(L, k) > ctx.lambda0) return false;
        }
        return true;
    }

    bool charge(int a, Kind ka, int b, Kind kb) {
        if (pair_crossed(s, a, b)) return false;
        if (s.work2_total + forced.count + 1 > ctx.cap2) return false;
        add[a]++;
        add[b]++;
        forced.v[forced.count++] = {(uint8_t)a, (uint8_t)b};
        return cap_ok(a, ka) && cap_ok(b, kb);
    }

    void rollback(int fmark, int pmark) {
        while (forced.count > fmark) {
            auto [a, b] = forced.v[--forced.count];
            add[a]--;
            add[b]--;
        }
        point_pairs.count = pmark;
    }

    void assign(int i) {
        const int rem_cap = (k - 1) * (k - 1) - grouped_total;
        if (m - i < rem_cap) return;
        if (i == m) {
            finalize();
            return;
        }
        const int l = s.order[i];
        for (int g = 1; g < k; ++g) try_group(i, l, g);
        for (int j = 0; j < k; ++j) try_gap(i, l, j);
    }

    void try_group(int i, int l, int g) {
        if (grp_count[g] == k - 1) return;
        const LineSt& L = s.ls[l];
        if (L.frame_k + L.work_k >= k) return;
        const int fmark = forced.count, pmark = point_pairs.count;
        const int myrank = 2 * g - 1;
        bool ok = true;
        for (int t = 0; t < grp_count[g] && ok; ++t) {
            const int ml = s.order[grp_members[g][t]];
            if (pair_crossed(s, l, ml))
                ok = false;
            else
                point_pairs.v[point_pairs.count++] = {(uint8_t)l, (uint8_t)ml};
        }
        for (int e = 0; e < i && ok; ++e)
            if (slot_rank[e] > myrank) ok = charge(l, Group, s.order[e], kind_of(e));
        if (ok && cap_ok(l, Group)) {
            slot_rank[i] = myrank;
            grp_members[g][grp_count[g]++] = i;
            ++grouped_total;
            assign(i + 1);
            --grouped_total;
            --grp_count[g];
            slot_rank[i] = -1;
        }
        rollback(fmark, pmark);
    }

    void try_gap(int i, int l, int j) {
        if (j > 0 && grouped_total == 0) return;  // left of every frame point: does not move
        const int rem_cap = (k - 1) * (k - 1) - grouped_total;
        if (j < k - 1 && rem_cap == 0) return;  // right of every frame point: last gap only
        if (gap_count[j] + 1 > ctx.lambda0) return;  // segment of the swept frame line
        if (add[l] == 0 && !cap_ok(l, Gap)) return;
        const int fmark = forced.count, pmark = point_pairs.count;
        const int myrank = 2 * j;
        bool ok = cap_ok(l, Gap);
        for (int e = 0; e < i && ok; ++e)
            if (slot_rank[e] > myrank) ok = charge(l, Gap, s.order[e], kind_of(e));
        if (ok) {
            slot_rank[i] = myrank;
            ++gap_count[j];
            assign(i + 1);
            --gap_count[j];
            slot_rank[i] = -1;
        }
        rollback(fmark, pmark);
    }

    void finalize() {
        assert(grouped_total == (k - 1) * (k - 1));
        SegmentTuple frame_tuple(gap_count, gap_count + k);
        if (ctx.table->rank(frame_tuple) < ctx.rank_lambda) return;

        State c = s;
        for (int t = 0; t < point_pairs.count; ++t) {
            auto [a, b] = point_pairs.v[t];
            mark_crossed(c, a, b);
        }
        for (int t = 0; t < forced.count; ++t) {
            auto [a, b] = forced.v[t];
            mark_crossed(c, a, b);
        }
        for (int p = 0; p < m; ++p) {
            const int l = s.order[p];
            LineSt& L = c.ls[l];
            L.work_2 += (uint8_t)add[l];
            L.cur += (uint8_t)add[l];
            if (slot_rank[p] & 1) {
                close_segment(L, k);
                L.frame_k += 1;
            } else {
                L.cur += 1;
                L.frame_2 += 1;
            }
        }
        c.work2_total += (uint16_t)forced.count;
        c.frames_done += 1;

        int idx = 0;
        for (int r = 0; r <= 2 * (k - 1); ++r) {
            if (r & 1) {
                const int g = (r + 1) / 2;
                for (int t = grp_count[g] - 1; t >= 0; --t)
                    c.order[idx++] = s.order[grp_members[g][t]];
            } else {
                for (int p = 0; p < m; ++p)
                    if (slot_rank[p] == r) c.order[idx++] = s.order[p];
            }
        }
        assert(idx == m);
        for (int p = 0; p < m; ++p) c.pos[c.order[p]] = (uint8_t)p;

        if (!points_feasible(ctx, c)) return;

        Event e;
        e.kind = Event::Kind::Frame;
        e.groups.resize(k - 1);
        e.gaps.resize(k);
        for (int g = 1; g < k; ++g)
            for (int t = 0; t < grp_count[g]; ++t)
                e.groups[g - 1].push_back(s.order[grp_members[g][t]]);
        for (int p = 0; p < m; ++p)
            if (!(slot_rank[p] & 1)) e.gaps[slot_rank[p] / 2].push_back(s.order[p]);
        fn(c, e);
    }
};

}  // namespace

State initial_state(const Ctx& ctx) {
    if (dihedral_max(ctx.lambda) != ctx.lambda)
        throw std::invalid_argument("LambdaNotMaximal: base-line distribution must be its own maximal representative");
    State s{};
    int id = 0;
    for (int seg = 0; seg < ctx.k; ++seg) {
        for (int t = 0; t < ctx.lambda[seg]; ++t) {
            LineSt& L = s.ls[id];
            L.frame_2 = 1;
            L.cur = 1;  // the base-line crossing sits on the wrap-around segment
            ++id;
        }
        if (seg < ctx.k - 1) {
            const int first = id;
            for (int t = 0; t < ctx.k - 1; ++t) {
                LineSt& L = s.ls[id];
                L.frame_k = 1;
                L.group_init = true;
                ++id;
            }
            for (int a = first; a < id; ++a)
                for (int b = a + 1; b < id; ++b) mark_crossed(s, a, b);
        }
    }
    assert(id == ctx.m);
    for (int p = 0; p < ctx.m; ++p) {
        s.order[p] = (uint8_t)p;
        s.pos[p] = (uint8_t)p;
    }
    s.frames_done = 1;
    return s;
}

void for_each_work_successor(const Ctx& ctx, const State& s, const SuccessorFn& fn) {
    WorkExpander(ctx, s, fn).run();
}

void for_each_frame_successor(const Ctx& ctx, const State& s, const SuccessorFn& fn) {
    FrameExpander(ctx, s, fn).run();
}

namespace {

std::vector<std::vector<int>> init_groups(const Ctx& ctx) {
    std::vector<std::vector<int>> groups;
    int id = 0;
    for (int seg = 0; seg < ctx.k; ++seg) {
        id += ctx.lambda[seg];
        if (seg < ctx.k - 1) {
            std::vector<int> g;
            for (int t = 0; t < ctx.k - 1; ++t) g.push_back(id++);
            groups.push_back(std::move(g));
        }
    }
    return groups;
}

Configuration assemble(const Ctx& ctx, const std::vector<Event>& history) {
    const int n = ctx.n, k = ctx.k;
    std::vector<std::vector<int>> lines(n);
    for (int j = 0; j < k; ++j) lines[j].push_back(0);  // base point
    int next_point = 1;
    int frame_no = 0;
    for (const Event& e : history) {
        switch (e.kind) {
            case Event::Kind::Init:
                for (const auto& g : init_groups(ctx)) {
                    const int p = next_point++;
                    lines[0].push_back(p);
                    for (int w : g) lines[k + w].push_back(p);
                }
                break;
            case Event::Kind::Frame:
                ++frame_no;
                for (const auto& g : e.groups) {
                    const int p = next_point++;
                    lines[frame_no].push_back(p);
                    for (int w : g) lines[k + w].push_back(p);
                }
                break;
            case Event::Kind::Work: {
                const int p = next_point++;
                for (int w : e.chosen) lines[k + w].push_back(p);
                break;
            }
            case Event::Kind::Close:
                break;
        }
    }
    if (next_point != n || frame_no != k - 1)
        throw std::logic_error("sweep assembly does not add up to an (n_k)");
    return Configuration(n, k, std::move(lines));
}

}  // namespace

CloseStatus try_close(const Ctx& ctx, const State& s, const std::vector<Event>& history,
                      std::unique_ptr<RawRecord>* out) {
    if (s.frames_done != ctx.k || s.work_done != ctx.W) return CloseStatus::NotReady;
    const int m = ctx.m, k = ctx.k;

    // The sweep returns to the base line with antipodal identification, which
    // reverses the order of distinct base-line crossings; lines through a
    // common base-line crossing point reach its antipode without crossing
    // again, keeping their order. A pair crosses in the last region iff it is
    // still uncrossed, so with ids assigned by initial position:
    //   pos[a] < pos[b]  iff  uncrossed(a,b) or a,b share their base crossing.
    int init_group[MAXM];
    {
        int id = 0, g = 0;
        for (int seg = 0; seg < k; ++seg) {
            for (int t = 0; t < ctx.lambda[seg]; ++t) init_group[id++] = -1;
            if (seg < k - 1) {
                for (int t = 0; t < k - 1; ++t) init_group[id++] = g;
                ++g;
            }
        }
    }
    for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b) {
            const bool unc = !pair_crossed(s, a, b);
            const bool sibling = init_group[a] >= 0 && init_group[a] == init_group[b];
            if ((s.pos[a] < s.pos[b]) != (unc || sibling)) return CloseStatus::InfeasibleClosure;
        }

    int u[MAXM];
    for (int l = 0; l < m; ++l) {
        u[l] = (m - 1) - std::popcount(s.crossed[l]);
        const LineSt& L = s.ls[l];
        assert(L.frame_k + L.work_k == k);
        assert(L.frame_2 + L.work_2 + u[l] == ctx.W);
        assert(L.work_k + L.work_2 + u[l] == ctx.W);
        const int wrap = L.cur + u[l] + (L.group_init ? 0 : L.piece0);
        if (wrap > ctx.lambda0) return CloseStatus::InfeasibleClosure;
    }

    for (int l = 0; l < m; ++l) {
        const LineSt& L = s.ls[l];
        assert(L.nsegs == k - 1);
        SegmentTuple tuple(L.segs, L.segs + (k - 1));
        tuple.push_back(L.cur + u[l] + (L.group_init ? 0 : L.piece0));
        if (ctx.table->rank(tuple) < ctx.rank_lambda) return CloseStatus::CanonicityReject;
    }

    if (out) {
        Event close;
        close.kind = Event::Kind::Close;
        close.closure_counts.assign(u, u + m);
        std::vector<Event> full = history;
        full.push_back(close);
        Configuration cfg = assemble(ctx, full);
        *out = std::make_unique<RawRecord>(RawRecord{std::move(cfg), std::move(full)});
    }
    return CloseStatus::Accepted;
}

uint64_t fingerprint(const Ctx& ctx, const State& s, int lambda_index, uint64_t seed) {
    unsigned char buf[MAXM * 16 + 16];
    size_t o = 0;
    buf[o++] = (unsigned char)lambda_index;
    buf[o++] = s.frames_done;
    buf[o++] = s.work_done;
    buf[o++] = (unsigned char)(s.work2_total & 0xff);
    buf[o++] = (unsigned char)(s.work2_total >> 8);
    for (int p = 0; p < ctx.m; ++p) buf[o++] = s.order[p];
    for (int l = 0; l < ctx.m; ++l) {
        const uint32_t cr = s.crossed[l];
        buf[o++] = (unsigned char)(cr & 0xff);
        buf[o++] = (unsigned char)((cr >> 8) & 0xff);
        buf[o++] = (unsigned char)((cr >> 16) & 0xff);
        const LineSt& L = s.ls[l];
        buf[o++] = L.frame_k;
        buf[o++] = L.work_k;
        buf[o++] = L.frame_2;
        buf[o++] = L.work_2;
        buf[o++] = L.cur;
        buf[o++] = L.piece0;
        buf[o++] = (unsigned char)(L.nsegs | (L.group_init << 6) | (L.piece0_set << 7));
        for (int t = 0; t < ctx.k - 1; ++t) buf[o++] = L.segs[t];
    }
    return hash_bytes(buf, o, seed);
}

}  // namespace sweepdetail

using namespace sweepdetail;

namespace {

Hash128 state_fp(const Ctx& ctx, const State& s, int lambda_index) {
    Hash128 h{fingerprint(ctx, s, lambda_index, 0x6a09e667f3bcc908ULL),
              fingerprint(ctx, s, lambda_index, 0xbb67ae8584caa73bULL)};
    if (h.a == 0 && h.b == 0) h = {1, 1};
    return h;
}

// Fixed-size open-addressing table of state fingerprints. Evictions only cost
// re-exploration; membership answers are a pure function of the insertion
// sequence, which keeps runs reproducible.
class DedupTable {
public:
    explicit DedupTable(int log2_slots) {
        if (log2_slots > 0) {
            mask_ = (size_t(1) << log2_slots) - 1;
            slots_.resize(mask_ + 1);
        }
    }
    bool enabled() const { return !slots_.empty(); }
    void reset() { ++gen_; }

    bool seen_or_insert(const Hash128& h) {
        const size_t base = h.a & mask_;
        for (size_t probe = 0; probe < 8; ++probe) {
            const size_t i = (base + probe) & mask_;
            if (slots_[i].gen != gen_) {
                slots_[i] = {h, gen_};
                return false;
            }
            if (slots_[i].fp == h) return true;
        }
        slots_[base] = {h, gen_};
        return false;
    }

private:
    struct Slot {
        Hash128 fp;
        uint32_t gen = 0;
    };
    std::vector<Slot> slots_;
    size_t mask_ = 0;
    uint32_t gen_ = 1;
};

struct TaskRunner {
    const Ctx& ctx;
    int lambda_index;
    DedupTable* dedup;
    SweepStats stats;
    std::string* text = nullptr;
    std::vector<RawRecord>* records = nullptr;
    std::vector<Event> history;
    SuccessorFn descend;

    void run(const State& root) {
        descend = [this](const State& c, const Event& e) {
            history.push_back(e);
            dfs(c);
            history.pop_back();
        };
        dfs(root);
    }

    void dfs(const State& s) {
        ++stats.nodes;
        if (dedup && dedup->enabled() && dedup->seen_or_insert(state_fp(ctx, s, lambda_index))) {
            ++stats.dedup_hits;
            return;
        }
        if (s.frames_done == ctx.k && s.work_done == ctx.W) {
            std::unique_ptr<RawRecord> rec;
            if (try_close(ctx, s, history, &rec) == CloseStatus::Accepted) {
                ++stats.emitted;
                if (text) {
                    text->append(serialize_raw(*rec));
                    text->push_back('\n');
                }
                if (records) records->push_back(std::move(*rec));
            }
            return;
        }
        for_each_work_successor(ctx, s, descend);
        for_each_frame_successor(ctx, s, descend);
    }
};

}  // namespace

SweepPlan plan_sweep(int n, int k) {
    if (k < 3 || k > 5) throw std::invalid_argument("k must be 3, 4 or 5");
    if (n <= k * (k - 1)) throw std::invalid_argument("n must exceed k(k-1)");
    if (n - k > MAXM) throw std::invalid_argument("n too large for this build");

    SweepPlan plan{n, k, PartitionTable(n, k), {}, 0};
    const int depth_total = (k - 1) + (n - 1 - k * (k - 1));

    std::vector<SweepTask> frontier;
    for (int li = 0; li < (int)plan.table.table().size(); ++li) {
        const Ctx ctx = make_ctx(n, k, plan.table, li);
        Event init;
        init.kind = Event::Kind::Init;
        init.lambda = ctx.lambda;
        frontier.push_back({initial_state(ctx), {init}, li});
    }
    plan.plan_nodes = frontier.size();

    int level = 0;
    while (level < depth_total - 1 && (int)frontier.size() < 256 && !frontier.empty()) {
        std::vector<SweepTask> next;
        std::set<std::pair<uint64_t, uint64_t>> seen;
        for (const SweepTask& t : frontier) {
            const Ctx ctx = make_ctx(n, k, plan.table, t.lambda_index);
            SuccessorFn push = [&](const State& c, const Event& e) {
                const Hash128 fp = state_fp(ctx, c, t.lambda_index);
                if (!seen.insert({fp.a, fp.b}).second) return;
                SweepTask child{c, t.history, t.lambda_index};
                child.history.push_back(e);
                next.push_back(std::move(child));
            };
            for_each_work_successor(ctx, t.state, push);
            for_each_frame_successor(ctx, t.state, push);
        }
        plan.plan_nodes += next.size();
        frontier = std::move(next);
        ++level;
    }
    plan.tasks = std::move(frontier);
    return plan;
}

void run_task(const SweepPlan& plan, int index, const SweepOptions& opt, SweepStats* stats,
              std::string* text, std::vector<RawRecord>* records) {
    const SweepTask& task = plan.tasks.at(index);
    const Ctx ctx = make_ctx(plan.n, plan.k, plan.table, task.lambda_index);
    DedupTable table(opt.dedup_log2);
    TaskRunner runner{ctx, task.lambda_index, &table, {}, text, records, task.history};
    runner.run(task.state);
    if (stats) stats->add(runner.stats);
}

bool run_plan(const SweepPlan& plan, const SweepOptions& opt, const std::set<int>& skip,
              int max_new_tasks, SweepStats* stats,
              const std::function<void(int, const std::string&)>& on_done) {
    const int total = (int)plan.tasks.size();
    std::atomic<int> next{0};
    std::atomic<int> budget{max_new_tasks < 0 ? total + 1 : max_new_tasks};
    std::atomic<int> executed{0};
    std::mutex mu;
    SweepStats agg;
    agg.nodes = plan.plan_nodes;

    const int jobs = std::max(1, opt.jobs);
    auto worker = [&]() {
        DedupTable table(opt.dedup_log2);
        SweepStats local;
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= total) break;
            if (skip.count(i)) continue;
            if (budget.fetch_sub(1) <= 0) break;
            const SweepTask& task = plan.tasks[i];
            const Ctx ctx = make_ctx(plan.n, plan.k, plan.table, task.lambda_index);
            table.reset();
            std::string text;
            TaskRunner runner{ctx, task.lambda_index, &table, {}, &text, nullptr, task.history};
            runner.run(task.state);
            local.add(runner.stats);
            executed.fetch_add(1);
            std::lock_guard<std::mutex> lock(mu);
            on_done(i, text);
        }
        std::lock_guard<std::mutex> lock(mu);
        agg.add(local);
    };

    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    if (stats) stats->add(agg);
    return (int)skip.size() + executed.load() >= total;
}

std::vector<RawRecord> enumerate_sweep(int n, int k, const SweepOptions& opt, SweepStats* stats) {
    SweepPlan plan = plan_sweep(n, k);
    std::vector<std::string> blobs(plan.tasks.size());
    run_plan(plan, opt, {}, -1, stats, [&](int i, const std::string& text) { blobs[i] = text; });
    std::vector<RawRecord> out;
    for (const std::string& blob : blobs) {
        size_t start = 0;
        while (start < blob.size()) {
            size_t end = blob.find('\n', start);
            if (end == std::string::npos) end = blob.size();
            if (end > start) {
                auto rec = parse_raw(blob.substr(start, end - start));
                if (!rec) throw std::logic_error("sweep emitted an unparseable record");
                out.push_back(std::move(*rec));
            }
            start = end + 1;
        }
    }
    return out;
}

}  // namespace confsweep
