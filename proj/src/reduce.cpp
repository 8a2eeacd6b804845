#include "confsweep/reduce.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cassert>
#include <deque>
#include <mutex>
#include <thread>

#include "confsweep/hashutil.hpp"

namespace confsweep {

namespace {

constexpr uint64_t SEED_POINT = 0x709394c6e2b1d3a5ULL;
constexpr uint64_t SEED_LINE = 0x8ad1c2fe9b7e55d3ULL;
constexpr uint64_t SEED_STEP = 0xc3a5c85c97cb3127ULL;
constexpr uint64_t SEED_KEY = 0xff51afd7ed558ccdULL;

uint32_t above_mask(int v) { return ~((v >= 31) ? ~0u : ((1u << (v + 1)) - 1u)); }

void extend_cliques(const std::vector<uint32_t>& adj, std::vector<int>& members, uint32_t allowed,
                    std::vector<std::vector<long long>>& counts, int& maxj) {
    uint32_t rest = allowed;
    while (rest) {
        const int v = std::countr_zero(rest);
        rest &= rest - 1;
        members.push_back(v);
        const int j = (int)members.size();
        if (j >= 3) {
            maxj = std::max(maxj, j);
            for (int p : members) {
                if ((int)counts[p].size() < j - 2) counts[p].resize(j - 2, 0);
                counts[p][j - 3] += 1;
            }
        }
        extend_cliques(adj, members, allowed & adj[v] & above_mask(v), counts, maxj);
        members.pop_back();
    }
}

}  // namespace

std::vector<CliqueVector> clique_vectors(const Configuration& c) {
    const int n = c.n();
    if (n > 32) throw std::invalid_argument("clique enumeration supports n <= 32");
    std::vector<uint32_t> adj(n, 0);
    for (const auto& ln : c.lines())
        for (size_t a = 0; a < ln.size(); ++a)
            for (size_t b = a + 1; b < ln.size(); ++b) {
                adj[ln[a]] |= 1u << ln[b];
                adj[ln[b]] |= 1u << ln[a];
            }
    std::vector<std::vector<long long>> counts(n);
    std::vector<int> members;
    int maxj = 2;
    uint32_t all = (n >= 32) ? ~0u : ((1u << n) - 1u);
    extend_cliques(adj, members, all, counts, maxj);
    for (auto& v : counts) v.resize(std::max(0, maxj - 2), 0);
    return counts;
}

std::vector<CliqueVector> coclique_vectors(const Configuration& c) {
    return clique_vectors(dualize(c));
}

namespace {

uint64_t vec_value(const CliqueVector& v, uint64_t seed) {
    uint64_t h = mix64(seed + v.size());
    for (long long x : v) h = hash_combine(h, (uint64_t)x);
    return h;
}

int distinct_count(std::vector<uint64_t> vals) {
    std::sort(vals.begin(), vals.end());
    return (int)(std::unique(vals.begin(), vals.end()) - vals.begin());
}

std::vector<int> cell_sizes(std::vector<uint64_t> vals) {
    std::sort(vals.begin(), vals.end());
    std::vector<int> sizes;
    for (size_t i = 0; i < vals.size();) {
        size_t j = i;
        while (j < vals.size() && vals[j] == vals[i]) ++j;
        sizes.push_back((int)(j - i));
        i = j;
    }
    std::sort(sizes.begin(), sizes.end());
    return sizes;
}

}  // namespace

InvariantLadder::InvariantLadder(const Configuration& c) : c_(&c) {
    on_point_.resize(c.n());
    for (int i = 0; i < c.n(); ++i)
        for (int p : c.lines()[i]) on_point_[p].push_back(i);
    auto gamma = clique_vectors(c);
    auto delta = coclique_vectors(c);
    point_vals_.resize(c.n());
    line_vals_.resize(c.n());
    for (int p = 0; p < c.n(); ++p) point_vals_[p] = vec_value(gamma[p], SEED_POINT);
    for (int l = 0; l < c.n(); ++l) line_vals_[l] = vec_value(delta[l], SEED_LINE);
}

bool InvariantLadder::refine() {
    const int n = c_->n();
    const int dp_before = distinct_count(point_vals_);
    const int dl_before = distinct_count(line_vals_);
    std::vector<uint64_t> np(n), nl(n);
    std::vector<uint64_t> tmp;
    for (int p = 0; p < n; ++p) {
        tmp.clear();
        for (int l : on_point_[p]) tmp.push_back(line_vals_[l]);
        std::sort(tmp.begin(), tmp.end());
        np[p] = hash_combine(hash_combine(SEED_STEP, point_vals_[p]), hash_u64_vec(tmp, SEED_POINT));
    }
    for (int l = 0; l < n; ++l) {
        tmp.clear();
        for (int p : c_->lines()[l]) tmp.push_back(point_vals_[p]);
        std::sort(tmp.begin(), tmp.end());
        nl[l] = hash_combine(hash_combine(SEED_STEP, line_vals_[l]), hash_u64_vec(tmp, SEED_LINE));
    }
    point_vals_ = std::move(np);
    line_vals_ = std::move(nl);
    ++level_;
    return distinct_count(point_vals_) > dp_before || distinct_count(line_vals_) > dl_before;
}

int InvariantLadder::stabilize() {
    while (refine()) {
    }
    return level_;
}

uint64_t InvariantLadder::key() const {
    std::vector<uint64_t> pv = point_vals_, lv = line_vals_;
    std::sort(pv.begin(), pv.end());
    std::sort(lv.begin(), lv.end());
    uint64_t h = hash_combine(SEED_KEY, (uint64_t)level_);
    h = hash_combine(h, hash_u64_vec(pv, SEED_POINT));
    h = hash_combine(h, hash_u64_vec(lv, SEED_LINE));
    return h;
}

std::vector<int> InvariantLadder::point_cells() const { return cell_sizes(point_vals_); }
std::vector<int> InvariantLadder::line_cells() const { return cell_sizes(line_vals_); }

uint64_t invariant_key(const Configuration& c, int level) {
    InvariantLadder ladder(c);
    for (int i = 0; i < level; ++i) ladder.refine();
    return ladder.key();
}

namespace {

// Backtracking over line images; candidate images share the line's invariant
// value at the jointly stabilized level, and the induced partial point map
// must stay consistent and injective.
struct IsoSearch {
    const Configuration& A;
    const Configuration& B;
    bool count_all = false;

    std::vector<uint64_t> apv, alv, bpv, blv;
    std::vector<int> order;             // processing order of A's lines
    std::vector<int> line_map, line_rmap, point_map, point_rmap;
    std::vector<std::vector<uint64_t>> a_profiles, b_profiles;  // sorted point values per line
    long long count = 0;
    std::optional<Isomorphism> witness;

    IsoSearch(const Configuration& a, const Configuration& b) : A(a), B(b) {}

    bool prepare() {
        if (A.n() != B.n() || A.k() != B.k()) return false;
        InvariantLadder la(A), lb(B);
        for (;;) {
            if (la.key() != lb.key()) return false;
            const bool ra = la.refine();
            const bool rb = lb.refine();
            if (ra != rb) return false;
            if (!ra) break;
        }
        if (la.key() != lb.key()) return false;
        apv = la.point_values();
        alv = la.line_values();
        bpv = lb.point_values();
        blv = lb.line_values();

        const int n = A.n();
        a_profiles.resize(n);
        b_profiles.resize(n);
        for (int i = 0; i < n; ++i) {
            for (int p : A.lines()[i]) a_profiles[i].push_back(apv[p]);
            for (int p : B.lines()[i]) b_profiles[i].push_back(bpv[p]);
            std::sort(a_profiles[i].begin(), a_profiles[i].end());
            std::sort(b_profiles[i].begin(), b_profiles[i].end());
        }

        std::map<uint64_t, int> cell_count;
        for (int i = 0; i < n; ++i) ++cell_count[alv[i]];
        order.resize(n);
        for (int i = 0; i < n; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
            return cell_count[alv[x]] < cell_count[alv[y]];
        });

        line_map.assign(n, -1);
        line_rmap.assign(n, -1);
        point_map.assign(n, -1);
        point_rmap.assign(n, -1);
        return true;
    }

    static int shared_point(const std::vector<int>& x, const std::vector<int>& y) {
        size_t i = 0, j = 0;
        while (i < x.size() && j < y.size()) {
            if (x[i] == y[j]) return x[i];
            (x[i] < y[j]) ? ++i : ++j;
        }
        return -1;
    }

    bool dfs(size_t idx) {
        if (idx == order.size()) return complete();
        const int la = order[idx];
        for (int lb = 0; lb < B.n(); ++lb) {
            if (line_rmap[lb] >= 0) continue;
            if (blv[lb] != alv[la]) continue;
            if (b_profiles[lb] != a_profiles[la]) continue;
            std::vector<std::pair<int, int>> bound;
            if (try_map(la, lb, bound)) {
                line_map[la] = lb;
                line_rmap[lb] = la;
                if (dfs(idx + 1) && !count_all) return true;
                line_map[la] = -1;
                line_rmap[lb] = -1;
            }
            for (auto [p, q] : bound) {
                point_map[p] = -1;
                point_rmap[q] = -1;
            }
        }
        return false;
    }

    bool try_map(int la, int lb, std::vector<std::pair<int, int>>& bound) {
        // already-bound points of la must land on lb, and vice versa
        for (int p : A.lines()[la]) {
            const int q = point_map[p];
            if (q >= 0 && !std::binary_search(B.lines()[lb].begin(), B.lines()[lb].end(), q))
                return false;
        }
        for (int q : B.lines()[lb]) {
            const int p = point_rmap[q];
            if (p >= 0 && !std::binary_search(A.lines()[la].begin(), A.lines()[la].end(), p))
                return false;
        }
        // intersections with previously mapped lines induce point bindings
        for (int la2 = 0; la2 < A.n(); ++la2) {
            const int lb2 = line_map[la2];
            if (lb2 < 0) continue;
            const int p = shared_point(A.lines()[la], A.lines()[la2]);
            const int q = shared_point(B.lines()[lb], B.lines()[lb2]);
            if ((p < 0) != (q < 0)) return false;
            if (p < 0) continue;
            if (point_map[p] >= 0 || point_rmap[q] >= 0) {
                if (point_map[p] != q) return false;
                continue;
            }
            if (apv[p] != bpv[q]) return false;
            point_map[p] = q;
            point_rmap[q] = p;
            bound.push_back({p, q});
        }
        return true;
    }

    bool complete() {
        // every point lies on k >= 2 mapped lines, so the point map is total
        Isomorphism iso{point_map, line_map};
        for (int p = 0; p < A.n(); ++p)
            if (iso.point_map[p] < 0) return false;
        if (!isomorphism_valid(A, B, iso)) return false;
        ++count;
        if (!witness) witness = iso;
        return true;
    }
};

}  // namespace

bool isomorphism_valid(const Configuration& a, const Configuration& b, const Isomorphism& iso) {
    const int n = a.n();
    if ((int)iso.point_map.size() != n || (int)iso.line_map.size() != n) return false;
    std::vector<char> pseen(n, 0), lseen(n, 0);
    for (int i = 0; i < n; ++i) {
        const int p = iso.point_map[i], l = iso.line_map[i];
        if (p < 0 || p >= n || pseen[p]) return false;
        if (l < 0 || l >= n || lseen[l]) return false;
        pseen[p] = lseen[l] = 1;
    }
    for (int i = 0; i < n; ++i) {
        std::vector<int> img;
        for (int p : a.lines()[i]) img.push_back(iso.point_map[p]);
        std::sort(img.begin(), img.end());
        if (img != b.lines()[iso.line_map[i]]) return false;
    }
    return true;
}

std::optional<Isomorphism> are_isomorphic(const Configuration& a, const Configuration& b) {
    IsoSearch search(a, b);
    if (!search.prepare()) return std::nullopt;
    search.dfs(0);
    return search.witness;
}

long long automorphism_count(const Configuration& c) {
    IsoSearch search(c, c);
    search.count_all = true;
    if (!search.prepare()) return 0;
    search.dfs(0);
    return search.count;
}

bool is_self_dual(const Configuration& c) { return are_isomorphic(c, dualize(c)).has_value(); }

namespace {

struct Item {
    Configuration cfg;
    std::string ser;
    long long count = 0;
    InvariantLadder ladder;

    Item(Configuration c, std::string s, long long cnt)
        : cfg(std::move(c)), ser(std::move(s)), count(cnt), ladder(cfg) {}
};

struct BucketOutcome {
    std::vector<EquivalenceClass> classes;
    long long iso_calls = 0;
    long long key_splits = 0;
    int max_level = 0;
    std::map<int, long long> buckets_per_level;
};

void resolve_bucket(std::deque<Item>& items, std::vector<int> members, BucketOutcome& out) {
    for (;;) {
        const int level = items[members.front()].ladder.level();
        out.buckets_per_level[level] += 1;
        out.max_level = std::max(out.max_level, level);
        if (members.size() == 1) break;

        bool refined = false;
        for (int i : members) refined |= items[i].ladder.refine();

        std::vector<std::pair<uint64_t, std::vector<int>>> groups;
        for (int i : members) {
            const uint64_t key = items[i].ladder.key();
            auto it = std::find_if(groups.begin(), groups.end(),
                                   [&](const auto& g) { return g.first == key; });
            if (it == groups.end())
                groups.push_back({key, {i}});
            else
                it->second.push_back(i);
        }
        if (groups.size() > 1) {
            out.key_splits += 1;
            for (auto& g : groups) resolve_bucket(items, std::move(g.second), out);
            return;
        }
        if (!refined) break;
    }

    // stabilized: invariant-guided pairwise merging
    std::vector<std::vector<int>> classes;
    for (int i : members) {
        bool merged = false;
        for (auto& cls : classes) {
            out.iso_calls += 1;
            if (are_isomorphic(items[cls.front()].cfg, items[i].cfg)) {
                cls.push_back(i);
                merged = true;
                break;
            }
        }
        if (!merged) classes.push_back({i});
    }
    for (const auto& cls : classes) {
        const Item* best = &items[cls.front()];
        long long total = 0;
        for (int i : cls) {
            total += items[i].count;
            if (items[i].ser < best->ser) best = &items[i];
        }
        out.classes.push_back({best->cfg, total, is_self_dual(best->cfg)});
    }
}

}  // namespace

std::vector<EquivalenceClass> reduce_all(const std::vector<Configuration>& input, int jobs,
                                         ReduceReport* report) {
    ReduceReport rep;
    rep.inputs = (long long)input.size();
    std::deque<Item> items;
    {
        std::map<std::string, int> seen;
        for (const Configuration& c : input) {
            if (!items.empty() && (c.n() != items.front().cfg.n() || c.k() != items.front().cfg.k()))
                throw MixedParameters("reduce_all inputs mix different (n,k)");
            std::string s = serialize(c);
            auto it = seen.find(s);
            if (it == seen.end()) {
                seen.insert({s, (int)items.size()});
                items.emplace_back(c, std::move(s), 1);
            } else {
                items[it->second].count += 1;
            }
        }
    }
    rep.unique_serializations = (long long)items.size();

    // level-0 buckets, in first-seen order
    std::vector<std::pair<uint64_t, std::vector<int>>> buckets;
    for (int i = 0; i < (int)items.size(); ++i) {
        const uint64_t key = items[i].ladder.key();
        auto it = std::find_if(buckets.begin(), buckets.end(),
                               [&](const auto& b) { return b.first == key; });
        if (it == buckets.end())
            buckets.push_back({key, {i}});
        else
            it->second.push_back(i);
    }

    std::vector<BucketOutcome> outcomes(buckets.size());
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const size_t b = next.fetch_add(1);
            if (b >= buckets.size()) break;
            resolve_bucket(items, buckets[b].second, outcomes[b]);
        }
    };
    const int nthreads = std::max(1, jobs);
    std::vector<std::thread> pool;
    for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    std::vector<EquivalenceClass> classes;
    for (const auto& out : outcomes) {
        for (const auto& c : out.classes) classes.push_back(c);
        rep.iso_calls += out.iso_calls;
        rep.key_splits += out.key_splits;
        rep.max_level = std::max(rep.max_level, out.max_level);
        for (auto [lvl, cnt] : out.buckets_per_level) rep.buckets_per_level[lvl] += cnt;
    }
    std::sort(classes.begin(), classes.end(), [](const EquivalenceClass& a, const EquivalenceClass& b) {
        return serialize(a.representative) < serialize(b.representative);
    });
    rep.classes = (long long)classes.size();
    for (const auto& c : classes) rep.self_dual += c.self_dual ? 1 : 0;
    if (report) *report = rep;
    return classes;
}

}  // namespace confsweep
