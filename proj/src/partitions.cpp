#include "confsweep/partitions.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace confsweep {

SegmentTuple dihedral_max(const SegmentTuple& t) {
    const int k = (int)t.size();
    if (k < 1) throw std::invalid_argument("empty tuple");
    SegmentTuple best = t;
    SegmentTuple cand(k);
    for (int dir = 0; dir < 2; ++dir) {
        for (int shift = 0; shift < k; ++shift) {
            for (int i = 0; i < k; ++i) {
                int idx = dir ? (shift - i % k + 2 * k) % k : (shift + i) % k;
                cand[i] = t[idx];
            }
            if (cand > best) best = cand;
        }
    }
    return best;
}

namespace {

// Partition-major order: compare the sorted-descending multisets first,
// larger first; ties broken by descending tuple order.
bool table_less(const SegmentTuple& a, const SegmentTuple& b) {
    SegmentTuple pa = a, pb = b;
    std::sort(pa.rbegin(), pa.rend());
    std::sort(pb.rbegin(), pb.rend());
    if (pa != pb) return pa > pb;
    return a > b;
}

void compositions(int total, int parts, SegmentTuple& cur, std::set<SegmentTuple>& out) {
    if (parts == 1) {
        cur.push_back(total);
        out.insert(dihedral_max(cur));
        cur.pop_back();
        return;
    }
    for (int v = 0; v <= total; ++v) {
        cur.push_back(v);
        compositions(total - v, parts - 1, cur, out);
        cur.pop_back();
    }
}

}  // namespace

PartitionTable::PartitionTable(int n, int k)
    : n_(n), k_(k), total_(n - 1 - k * (k - 1)) {
    if (k < 1) throw std::invalid_argument("k must be positive");
    if (total_ < 0)
        throw std::invalid_argument("n-1-k(k-1) negative for n=" + std::to_string(n) +
                                    " k=" + std::to_string(k));
    std::set<SegmentTuple> reps;
    SegmentTuple cur;
    compositions(total_, k, cur, reps);
    table_.assign(reps.begin(), reps.end());
    std::sort(table_.begin(), table_.end(), table_less);
}

int PartitionTable::rank(const SegmentTuple& t) const {
    if ((int)t.size() != k_)
        throw NotInTable("tuple has " + std::to_string(t.size()) + " entries, table holds " +
                         std::to_string(k_));
    SegmentTuple m = dihedral_max(t);
    auto it = std::find(table_.begin(), table_.end(), m);
    if (it == table_.end()) throw NotInTable("tuple sum does not match the table");
    return (int)(it - table_.begin());
}

}  // namespace confsweep
