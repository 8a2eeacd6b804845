#pragma once

#include <stdexcept>
#include <vector>

namespace confsweep {

// Circular tuple of segment lengths on a pseudoline, counted in plain
// crossings; on a line of a full (n_k) the k entries sum to n-1-k(k-1).
using SegmentTuple = std::vector<int>;

struct NotInTable : std::runtime_error {
    explicit NotInTable(const std::string& msg) : std::runtime_error(msg) {}
};

// Lexicographic maximum over all rotations and reflections of t.
SegmentTuple dihedral_max(const SegmentTuple& t);

// The ordered list of all distinct dihedral-maximal k-tuples summing to
// n-1-k(k-1). Order: by the underlying multiset partition in descending
// lexicographic order, then by descending lexicographic order of the tuple;
// consequently earlier tuples have a weakly larger leading entry.
class PartitionTable {
public:
    PartitionTable(int n, int k);

    int n() const { return n_; }
    int k() const { return k_; }
    int total() const { return total_; }
    const std::vector<SegmentTuple>& table() const { return table_; }

    // Position of dihedral_max(t); throws NotInTable on wrong length or sum.
    int rank(const SegmentTuple& t) const;

private:
    int n_, k_, total_;
    std::vector<SegmentTuple> table_;
};

}  // namespace confsweep
