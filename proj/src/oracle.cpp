#include "confsweep/oracle.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "confsweep/partitions.hpp"

namespace confsweep {

// ------------------------------------------------------ combinatorial search

namespace {

struct CombSearch {
    int n, k;
    std::vector<std::vector<int>> lines;
    std::vector<int> degree;
    std::vector<std::set<int>> paired;  // points already on a common line
    int used_points = 0;
    std::vector<Configuration> reps;

    CombSearch(int n_, int k_) : n(n_), k(k_), degree(n_, 0), paired(n_) {}

    void search() { next_line(); }

    void next_line() {
        if ((int)lines.size() == n) {
            finish();
            return;
        }
        const int rem = n - (int)lines.size();
        int pmin = -1;
        for (int p = 0; p < used_points; ++p) {
            if (degree[p] < k) {
                if (k - degree[p] > rem) return;  // cannot be completed
                if (pmin < 0) pmin = p;
            }
        }
        std::vector<int> line;
        if (pmin >= 0) {
            // Lines are generated in ascending order, so the smallest
            // unsaturated point can only be covered starting now.
            line.push_back(pmin);
            extend_line(line);
        } else {
            if (used_points >= n) return;
            line.push_back(used_points);
            ++used_points;
            ++degree[line[0]];  // placeholder; fixed below
            --degree[line[0]];
            extend_line(line);
            --used_points;
        }
    }

    void extend_line(std::vector<int>& line) {
        if ((int)line.size() == k) {
            commit(line);
            return;
        }
        const int last = line.back();
        // existing points, ascending
        for (int p = last + 1; p < used_points; ++p) {
            if (degree[p] >= k) continue;
            bool ok = true;
            for (int q : line)
                if (paired[q].count(p)) {
                    ok = false;
                    break;
                }
            if (!ok) continue;
            line.push_back(p);
            extend_line(line);
            line.pop_back();
        }
        // one fresh point (labels assigned in first-use order)
        if (used_points < n) {
            line.push_back(used_points);
            ++used_points;
            extend_line(line);
            --used_points;
            line.pop_back();
        }
    }

    void commit(std::vector<int>& line) {
        if (!lines.empty() && !(lines.back() < line)) return;  // strict lex order
        for (int p : line) ++degree[p];
        for (size_t a = 0; a < line.size(); ++a)
            for (size_t b = a + 1; b < line.size(); ++b) {
                paired[line[a]].insert(line[b]);
                paired[line[b]].insert(line[a]);
            }
        lines.push_back(line);
        next_line();
        lines.pop_back();
        for (int p : line) --degree[p];
        for (size_t a = 0; a < line.size(); ++a)
            for (size_t b = a + 1; b < line.size(); ++b) {
                paired[line[a]].erase(line[b]);
                paired[line[b]].erase(line[a]);
            }
    }

    void finish() {
        if (used_points != n) return;
        for (int p = 0; p < n; ++p)
            if (degree[p] != k) return;
        if (!verify(n, k, lines).valid) return;  // connectivity and the rest
        Configuration cand(n, k, lines);
        for (const Configuration& rep : reps)
            if (oracle_isomorphic(cand, rep)) return;
        reps.push_back(std::move(cand));
    }
};

}  // namespace

std::vector<Configuration> enumerate_combinatorial(int n, int k) {
    const bool in_budget = (k == 3 && n >= 7 && n <= 10) || (k == 4 && n >= 13 && n <= 13);
    if (!in_budget)
        throw BudgetExceeded("enumerate_combinatorial supports k=3, n in 7..10 and k=4, n=13");
    CombSearch search(n, k);
    search.search();
    return search.reps;
}

// ------------------------------------------------------ exhaustive isomorphism

namespace {

struct PointIso {
    const Configuration &A, &B;
    int n, k;
    std::vector<std::vector<int>> line_at_a, line_at_b;  // pair -> line index or -1
    std::vector<int> pmap, prmap, lmap, lrmap;

    PointIso(const Configuration& a, const Configuration& b)
        : A(a), B(b), n(a.n()), k(a.k()) {
        line_at_a = pair_table(a);
        line_at_b = pair_table(b);
        pmap.assign(n, -1);
        prmap.assign(n, -1);
        lmap.assign(n, -1);
        lrmap.assign(n, -1);
    }

    static std::vector<std::vector<int>> pair_table(const Configuration& c) {
        std::vector<std::vector<int>> t(c.n(), std::vector<int>(c.n(), -1));
        for (int i = 0; i < c.n(); ++i)
            for (size_t a = 0; a < c.lines()[i].size(); ++a)
                for (size_t b = a + 1; b < c.lines()[i].size(); ++b) {
                    t[c.lines()[i][a]][c.lines()[i][b]] = i;
                    t[c.lines()[i][b]][c.lines()[i][a]] = i;
                }
        return t;
    }

    bool dfs(int p) {
        if (p == n) return final_check();
        for (int q = 0; q < n; ++q) {
            if (prmap[q] >= 0) continue;
            std::vector<int> bound_lines;
            if (consistent(p, q, bound_lines)) {
                pmap[p] = q;
                prmap[q] = p;
                if (dfs(p + 1)) return true;
                pmap[p] = -1;
                prmap[q] = -1;
            }
            for (int la : bound_lines) {
                lrmap[lmap[la]] = -1;
                lmap[la] = -1;
            }
        }
        return false;
    }

    bool consistent(int p, int q, std::vector<int>& bound_lines) {
        for (int p2 = 0; p2 < p; ++p2) {
            const int la = line_at_a[p][p2];
            const int lb = line_at_b[q][pmap[p2]];
            if ((la < 0) != (lb < 0)) return false;
            if (la < 0) continue;
            if (lmap[la] >= 0) {
                if (lmap[la] != lb) return false;
            } else if (lrmap[lb] >= 0) {
                return false;
            } else {
                lmap[la] = lb;
                lrmap[lb] = la;
                bound_lines.push_back(la);
            }
        }
        return true;
    }

    bool final_check() {
        for (int i = 0; i < n; ++i) {
            std::vector<int> img;
            for (int p : A.lines()[i]) img.push_back(pmap[p]);
            std::sort(img.begin(), img.end());
            bool found = false;
            for (int j = 0; j < n && !found; ++j) found = (B.lines()[j] == img);
            if (!found) return false;
        }
        return true;
    }
};

}  // namespace

bool oracle_isomorphic(const Configuration& a, const Configuration& b) {
    if (a.n() != b.n() || a.k() != b.k()) return false;
    PointIso iso(a, b);
    return iso.dfs(0);
}

// ------------------------------------------------------ rational realization

namespace {

bool proportional(const Rational3& a, const Rational3& b) {
    return a.x * b.y == a.y * b.x && a.x * b.z == a.z * b.x && a.y * b.z == a.z * b.y;
}

}  // namespace

bool verify_realization(const std::vector<Rational3>& pts, const std::vector<Rational3>& lns,
                        const Configuration& c) {
    const int n = c.n();
    if ((int)pts.size() != n || (int)lns.size() != n)
        throw std::invalid_argument("need exactly n points and n lines");
    for (const auto& v : pts)
        if (v.x == 0 && v.y == 0 && v.z == 0) throw ZeroVector("zero point vector");
    for (const auto& v : lns)
        if (v.x == 0 && v.y == 0 && v.z == 0) throw ZeroVector("zero line vector");

    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (proportional(pts[i], pts[j])) return false;
            if (proportional(lns[i], lns[j])) return false;
        }

    std::vector<std::vector<char>> incident(n, std::vector<char>(n, 0));
    for (int j = 0; j < n; ++j)
        for (int p : c.lines()[j]) incident[p][j] = 1;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const bool zero =
                pts[i].x * lns[j].x + pts[i].y * lns[j].y + pts[i].z * lns[j].z == 0;
            if (zero != (bool)incident[i][j]) return false;
        }
    return true;
}

// ------------------------------------------------------------- naive replay

namespace {

struct ReplayLine {
    int fk = 0, wk = 0, f2 = 0, w2 = 0;
    int cur = 0, piece0 = 0;
    bool piece0_set = false, group_init = false;
    std::vector<int> segs;
};

struct Replayer {
    int n, k, m, W, cap2, lambda0, rank_lambda;
    PartitionTable table;
    SegmentTuple lambda;
    std::vector<int> order;
    std::vector<ReplayLine> ls;
    std::set<std::pair<int, int>> crossed;
    int frames = 1, works = 0, w2total = 0;
    ReplayResult res;

    Replayer(int n_, int k_) : n(n_), k(k_), table(n_, k_) {
        m = n - k;
        W = n - 1 - k * (k - 1);
        cap2 = (n - 2 * k) * W / 2;
    }

    bool fail(int idx, const std::string& msg) {
        res.ok = false;
        res.failed_event = idx;
        res.message = msg;
        return false;
    }

    int pos_of(int l) const {
        return (int)(std::find(order.begin(), order.end(), l) - order.begin());
    }

    bool is_crossed(int a, int b) const {
        return crossed.count({std::min(a, b), std::max(a, b)}) > 0;
    }
    void mark(int a, int b) { crossed.insert({std::min(a, b), std::max(a, b)}); }

    bool close_seg(ReplayLine& L) {
        if (!L.group_init && !L.piece0_set) {
            L.piece0 = L.cur;
            L.piece0_set = true;
        } else {
            L.segs.push_back(L.cur);
        }
        L.cur = 0;
        return true;
    }

    bool run(const std::vector<Event>& history) {
        if (history.empty() || history[0].kind != Event::Kind::Init)
            return fail(0, "history must start with the base-line sweep");
        lambda = history[0].lambda;
        if ((int)lambda.size() != k) return fail(0, "base distribution has wrong arity");
        int sum = 0;
        for (int v : lambda) sum += v;
        if (sum != W) return fail(0, "base distribution has wrong total");
        if (dihedral_max(lambda) != lambda) return fail(0, "base distribution not maximal");
        lambda0 = lambda[0];
        rank_lambda = table.rank(lambda);

        ls.assign(m, {});
        int id = 0;
        for (int seg = 0; seg < k; ++seg) {
            for (int t = 0; t < lambda[seg]; ++t) {
                ls[id].f2 = 1;
                ls[id].cur = 1;
                ++id;
            }
            if (seg < k - 1) {
                const int first = id;
                for (int t = 0; t < k - 1; ++t) {
                    ls[id].fk = 1;
                    ls[id].group_init = true;
                    ++id;
                }
                for (int a = first; a < id; ++a)
                    for (int b = a + 1; b < id; ++b) mark(a, b);
            }
        }
        if (id != m) return fail(0, "base layout does not cover the working lines");
        order.resize(m);
        for (int p = 0; p < m; ++p) order[p] = p;
        res.orders.push_back(order);

        bool closed = false;
        for (size_t idx = 1; idx < history.size(); ++idx) {
            if (closed) return fail((int)idx, "events after closure");
            const Event& e = history[idx];
            switch (e.kind) {
                case Event::Kind::Init:
                    return fail((int)idx, "second base-line sweep");
                case Event::Kind::Work:
                    if (!apply_work(e, (int)idx)) return false;
                    break;
                case Event::Kind::Frame:
                    if (!apply_frame(e, (int)idx)) return false;
                    break;
                case Event::Kind::Close:
                    if (!apply_close(e, (int)idx)) return false;
                    closed = true;
                    break;
            }
            res.orders.push_back(order);
        }
        if (!closed) return fail((int)history.size(), "history ends before closure");
        res.ok = true;
        return true;
    }

    bool valid_ids(const std::vector<int>& v) const {
        for (int l : v)
            if (l < 0 || l >= m) return false;
        return true;
    }

    bool ascending_positions(const std::vector<int>& v) const {
        for (size_t i = 1; i < v.size(); ++i)
            if (pos_of(v[i - 1]) >= pos_of(v[i])) return false;
        return true;
    }

    // Applies the pair charges implied by comparing old and new orders; point
    // pairs meet at a crossing of the configuration and are free.
    bool charge_inversions(const std::vector<int>& old_order, const std::vector<int>& new_order,
                           const std::set<std::pair<int, int>>& point_pairs,
                           std::vector<int>& adds, int idx) {
        std::vector<int> oldpos(m), newpos(m);
        for (int p = 0; p < m; ++p) {
            oldpos[old_order[p]] = p;
            newpos[new_order[p]] = p;
        }
        adds.assign(m, 0);
        int forced = 0;
        for (int a = 0; a < m; ++a)
            for (int b = a + 1; b < m; ++b) {
                const bool inverted = (oldpos[a] < oldpos[b]) != (newpos[a] < newpos[b]);
                if (!inverted) continue;
                if (is_crossed(a, b)) return fail(idx, "a pair of pseudolines crosses twice");
                mark(a, b);
                if (point_pairs.count({std::min(a, b), std::max(a, b)})) continue;
                adds[a] += 1;
                adds[b] += 1;
                ++forced;
            }
        w2total += forced;
        if (w2total > cap2) return fail(idx, "total working plain crossings over budget");
        return true;
    }

    bool apply_work(const Event& e, int idx) {
        if (works + 1 > W) return fail(idx, "too many working crossings");
        if ((int)e.chosen.size() != k || !valid_ids(e.chosen) || !valid_ids(e.left) ||
            !valid_ids(e.right))
            return fail(idx, "malformed working crossing event");
        if (!ascending_positions(e.chosen) || !ascending_positions(e.left) ||
            !ascending_positions(e.right))
            return fail(idx, "event lists not in sweep-line order");

        std::set<int> chosen(e.chosen.begin(), e.chosen.end());
        if ((int)chosen.size() != k) return fail(idx, "repeated chosen line");
        const int p0 = pos_of(e.chosen.front()), pk = pos_of(e.chosen.back());
        std::set<int> kernel;
        for (int p = p0 + 1; p < pk; ++p)
            if (!chosen.count(order[p])) kernel.insert(order[p]);
        std::set<int> sides(e.left.begin(), e.left.end());
        for (int l : e.right)
            if (!sides.insert(l).second) return fail(idx, "kernel line sent both ways");
        if (sides != kernel) return fail(idx, "kernel of the event does not match the order");

        for (int l : e.chosen) {
            if (ls[l].fk + ls[l].wk + 1 > k) return fail(idx, "line cannot accept another crossing point");
            if (ls[l].wk + 1 + ls[l].w2 > W) return fail(idx, "line cannot accept a working point");
        }
        std::set<std::pair<int, int>> point_pairs;
        for (size_t a = 0; a < e.chosen.size(); ++a)
            for (size_t b = a + 1; b < e.chosen.size(); ++b)
                point_pairs.insert({std::min(e.chosen[a], e.chosen[b]),
                                    std::max(e.chosen[a], e.chosen[b])});

        std::vector<int> new_order(order.begin(), order.begin() + p0);
        for (int l : e.left) new_order.push_back(l);
        for (auto it = e.chosen.rbegin(); it != e.chosen.rend(); ++it) new_order.push_back(*it);
        for (int l : e.right) new_order.push_back(l);
        for (int p = pk + 1; p < m; ++p) new_order.push_back(order[p]);
        if ((int)new_order.size() != m) return fail(idx, "event drops or duplicates lines");

        std::vector<int> adds;
        if (!charge_inversions(order, new_order, point_pairs, adds, idx)) return false;

        for (int l = 0; l < m; ++l) {
            if (!adds[l] && !chosen.count(l)) continue;
            ReplayLine& L = ls[l];
            L.w2 += adds[l];
            L.cur += adds[l];
            if (L.wk + L.w2 > W) return fail(idx, "working crossings over budget on a line");
            if (L.f2 + L.w2 > W) return fail(idx, "plain crossings over budget on a line");
            if (chosen.count(l)) {
                if (L.cur > lambda0) return fail(idx, "segment longer than the base segment");
                close_seg(L);
                L.wk += 1;
            } else {
                const int wrap = (L.fk + L.wk == k && !L.group_init) ? L.piece0 : 0;
                if (L.cur + wrap > lambda0) return fail(idx, "segment longer than the base segment");
            }
        }
        order = new_order;
        ++works;
        return true;
    }

    bool apply_frame(const Event& e, int idx) {
        if (frames + 1 > k) return fail(idx, "too many frame sweeps");
        if ((int)e.groups.size() != k - 1 || (int)e.gaps.size() != k)
            return fail(idx, "malformed frame sweep event");
        std::set<int> seen;
        for (const auto& g : e.groups) {
            if ((int)g.size() != k - 1 || !valid_ids(g) || !ascending_positions(g))
                return fail(idx, "malformed frame crossing group");
            for (int l : g)
                if (!seen.insert(l).second) return fail(idx, "line in two groups");
        }
        for (const auto& g : e.gaps) {
            if (!valid_ids(g) || !ascending_positions(g)) return fail(idx, "malformed gap list");
            for (int l : g)
                if (!seen.insert(l).second) return fail(idx, "line assigned twice");
        }
        if ((int)seen.size() != m) return fail(idx, "frame sweep must place every line");

        int leftmost = m, rightmost = -1;
        for (const auto& g : e.groups)
            for (int l : g) {
                leftmost = std::min(leftmost, pos_of(l));
                rightmost = std::max(rightmost, pos_of(l));
            }
        for (int j = 0; j < k; ++j)
            for (int l : e.gaps[j]) {
                if (pos_of(l) < leftmost && j != 0)
                    return fail(idx, "line left of every frame crossing must not move");
                if (pos_of(l) > rightmost && j != k - 1)
                    return fail(idx, "line right of every frame crossing must not move");
            }

        SegmentTuple frame_tuple;
        for (const auto& g : e.gaps) frame_tuple.push_back((int)g.size());
        for (int v : frame_tuple)
            if (v > lambda0) return fail(idx, "frame-line segment longer than the base segment");
        if (table.rank(frame_tuple) < rank_lambda)
            return fail(idx, "frame-line distribution precedes the base distribution");

        std::set<std::pair<int, int>> point_pairs;
        for (const auto& g : e.groups) {
            for (size_t a = 0; a < g.size(); ++a)
                for (size_t b = a + 1; b < g.size(); ++b)
                    point_pairs.insert({std::min(g[a], g[b]), std::max(g[a], g[b])});
            for (int l : g)
                if (ls[l].fk + ls[l].wk + 1 > k)
                    return fail(idx, "line cannot accept another crossing point");
        }

        std::vector<int> new_order;
        for (int j = 0; j < k; ++j) {
            for (int l : e.gaps[j]) new_order.push_back(l);
            if (j < k - 1)
                for (auto it = e.groups[j].rbegin(); it != e.groups[j].rend(); ++it)
                    new_order.push_back(*it);
        }
        if ((int)new_order.size() != m) return fail(idx, "frame sweep drops lines");

        std::vector<int> adds;
        if (!charge_inversions(order, new_order, point_pairs, adds, idx)) return false;

        std::set<int> grouped;
        for (const auto& g : e.groups) grouped.insert(g.begin(), g.end());
        for (int l = 0; l < m; ++l) {
            ReplayLine& L = ls[l];
            L.w2 += adds[l];
            L.cur += adds[l];
            if (L.wk + L.w2 > W) return fail(idx, "working crossings over budget on a line");
            if (grouped.count(l)) {
                if (L.f2 + L.w2 > W) return fail(idx, "plain crossings over budget on a line");
                if (L.cur > lambda0) return fail(idx, "segment longer than the base segment");
                close_seg(L);
                L.fk += 1;
            } else {
                L.f2 += 1;
                L.cur += 1;
                if (L.f2 + L.w2 > W) return fail(idx, "plain crossings over budget on a line");
                const int wrap = (L.fk + L.wk == k && !L.group_init) ? L.piece0 : 0;
                if (L.cur + wrap > lambda0) return fail(idx, "segment longer than the base segment");
            }
        }
        order = new_order;
        ++frames;
        return true;
    }

    bool apply_close(const Event& e, int idx) {
        if (frames != k || works != W)
            return fail(idx, "closure before k frame sweeps and all working crossings");
        if ((int)e.closure_counts.size() != m) return fail(idx, "closure counts have wrong arity");

        // Antipodal return: distinct base-line crossings come back reversed;
        // lines through a common base-line crossing keep their order.
        std::vector<int> init_group(m, -1);
        {
            int id = 0, g = 0;
            for (int seg = 0; seg < k; ++seg) {
                id += lambda[seg];
                if (seg < k - 1) {
                    for (int t = 0; t < k - 1; ++t) init_group[id++] = g;
                    ++g;
                }
            }
        }
        std::vector<int> pos(m);
        for (int p = 0; p < m; ++p) pos[order[p]] = p;
        std::vector<int> u(m, 0);
        for (int a = 0; a < m; ++a)
            for (int b = a + 1; b < m; ++b) {
                const bool unc = !is_crossed(a, b);
                const bool sibling = init_group[a] >= 0 && init_group[a] == init_group[b];
                if ((pos[a] < pos[b]) != (unc || sibling))
                    return fail(idx, "uncrossed pairs do not match the closing inversions");
                if (unc) {
                    u[a] += 1;
                    u[b] += 1;
                }
            }
        for (int l = 0; l < m; ++l)
            if (u[l] != e.closure_counts[l])
                return fail(idx, "recorded closure counts do not match the order");

        for (int l = 0; l < m; ++l) {
            ReplayLine& L = ls[l];
            if (L.fk + L.wk != k) return fail(idx, "a line misses crossing points at closure");
            if (L.f2 + L.w2 + u[l] != W || L.wk + L.w2 + u[l] != W)
                return fail(idx, "crossing counts do not close the line");
            const int wrap = L.cur + u[l] + (L.group_init ? 0 : L.piece0);
            if (wrap > lambda0) return fail(idx, "wrap-around segment longer than the base segment");
            SegmentTuple tuple = SegmentTuple(L.segs.begin(), L.segs.end());
            tuple.push_back(wrap);
            if ((int)tuple.size() != k) return fail(idx, "a line has the wrong number of segments");
            if (table.rank(tuple) < rank_lambda)
                return fail(idx, "a line distribution precedes the base distribution");
        }
        return true;
    }

    // Independent assembly of the incidence structure from the events.
    bool assemble(const std::vector<Event>& history, int idx_of_close) {
        std::vector<std::vector<int>> lines(n);
        for (int j = 0; j < k; ++j) lines[j].push_back(0);
        int next_point = 1, frame_no = 0;
        for (const Event& e : history) {
            if (e.kind == Event::Kind::Init) {
                int id = 0;
                for (int seg = 0; seg < k; ++seg) {
                    id += lambda[seg];
                    if (seg < k - 1) {
                        const int p = next_point++;
                        lines[0].push_back(p);
                        for (int t = 0; t < k - 1; ++t) lines[k + id++].push_back(p);
                    }
                }
            } else if (e.kind == Event::Kind::Frame) {
                ++frame_no;
                for (const auto& g : e.groups) {
                    const int p = next_point++;
                    lines[frame_no].push_back(p);
                    for (int w : g) lines[k + w].push_back(p);
                }
            } else if (e.kind == Event::Kind::Work) {
                const int p = next_point++;
                for (int w : e.chosen) lines[k + w].push_back(p);
            }
        }
        if (next_point != n) return fail(idx_of_close, "assembled points do not add up to n");
        VerifyReport rep = verify(n, k, lines);
        if (!rep.valid)
            return fail(idx_of_close,
                        std::string("assembled structure invalid: ") + rep.violations[0].second);
        res.config = Configuration(n, k, std::move(lines));
        return true;
    }
};

}  // namespace

ReplayResult naive_sweep_check(const std::vector<Event>& history, int n, int k) {
    if (k < 3 || n <= k * (k - 1)) {
        ReplayResult res;
        res.failed_event = 0;
        res.message = "parameters out of range";
        return res;
    }
    Replayer rp(n, k);
    if (!rp.run(history)) return rp.res;
    if (!rp.assemble(history, (int)history.size() - 1)) return rp.res;
    rp.res.ok = true;
    return rp.res;
}

}  // namespace confsweep
