#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "confsweep/config.hpp"

namespace confsweep {

// gamma_j(p) for j = 3..max clique size: number of j-cliques of the
// collinearity graph containing p (points pairwise joined by lines; the k
// points of a single line already form cliques). Trailing levels with no
// cliques anywhere are trimmed.
using CliqueVector = std::vector<long long>;

std::vector<CliqueVector> clique_vectors(const Configuration& c);   // per point
std::vector<CliqueVector> coclique_vectors(const Configuration& c); // per line, = cliques of the dual

struct MixedParameters : std::runtime_error {
    explicit MixedParameters(const std::string& m) : std::runtime_error(m) {}
};

// Multiscale invariant ladder. Level 0 carries the clique distribution on
// points and the coclique distribution on lines; each further level hashes an
// element's previous value together with the multiset of its incident
// elements' values, so the induced cell partition only ever refines.
class InvariantLadder {
public:
    explicit InvariantLadder(const Configuration& c);

    int level() const { return level_; }
    // Advances one derivative level; returns true when the cell partition of
    // points or lines strictly refined.
    bool refine();
    // Refines until stable; returns the stable level.
    int stabilize();

    const std::vector<uint64_t>& point_values() const { return point_vals_; }
    const std::vector<uint64_t>& line_values() const { return line_vals_; }
    // Order-free summary of (point multiset, line multiset) at this level.
    uint64_t key() const;
    // Sorted cell sizes, a convenient partition fingerprint.
    std::vector<int> point_cells() const;
    std::vector<int> line_cells() const;

private:
    const Configuration* c_;
    std::vector<std::vector<int>> on_point_;
    std::vector<uint64_t> point_vals_, line_vals_;
    int level_ = 0;
};

uint64_t invariant_key(const Configuration& c, int level);

struct Isomorphism {
    std::vector<int> point_map;  // image of each point of the first configuration
    std::vector<int> line_map;   // image of each line
};

// Incidence-preserving bijection pair, found by backtracking over line images
// restricted to equal invariant cells at the stabilized derivative level.
std::optional<Isomorphism> are_isomorphic(const Configuration& a, const Configuration& b);

long long automorphism_count(const Configuration& c);

// Witness that applying the map to a's line table reproduces b exactly.
bool isomorphism_valid(const Configuration& a, const Configuration& b, const Isomorphism& iso);

bool is_self_dual(const Configuration& c);

struct EquivalenceClass {
    Configuration representative;  // minimal canonical serialization in class
    long long members = 0;         // raw inputs merged, exact duplicates included
    bool self_dual = false;
};

struct ReduceReport {
    long long inputs = 0;
    long long unique_serializations = 0;
    int max_level = 0;
    long long key_splits = 0;     // buckets split by differing derivative keys
    long long iso_calls = 0;
    long long classes = 0;
    long long self_dual = 0;
    std::map<int, long long> buckets_per_level;
};

// Collapses a raw stream into pairwise non-isomorphic classes: exact
// serialization dedup, invariant bucketing, derivative refinement, then
// invariant-guided isomorphism merging. Deterministic; classes ordered by
// representative serialization.
std::vector<EquivalenceClass> reduce_all(const std::vector<Configuration>& input, int jobs = 1,
                                         ReduceReport* report = nullptr);

}  // namespace confsweep
