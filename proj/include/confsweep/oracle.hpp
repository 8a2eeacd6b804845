#pragma once

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "confsweep/config.hpp"
#include "confsweep/events.hpp"

namespace confsweep {

struct BudgetExceeded : std::runtime_error {
    explicit BudgetExceeded(const std::string& m) : std::runtime_error(m) {}
};

struct ZeroVector : std::runtime_error {
    explicit ZeroVector(const std::string& m) : std::runtime_error(m) {}
};

// Exhaustive enumeration of combinatorial (n_k)s up to isomorphism:
// lexicographically ordered line sets with first-appearance point labels,
// isomorph rejection by exhaustive search. Deliberately unoptimized ground
// truth; throws BudgetExceeded beyond n<=10 (k=3) / n<=13 (k=4).
std::vector<Configuration> enumerate_combinatorial(int n, int k);

// Exhaustive point-bijection search, independent of the invariant-guided
// search in the reducer.
bool oracle_isomorphic(const Configuration& a, const Configuration& b);

// Homogeneous coordinates with exact rational components, not all zero.
struct Rational3 {
    mpq_class x, y, z;
};

// True iff point i lies on line j exactly when c says so (exact zero dot
// products), with all points and all lines pairwise distinct as projective
// elements. Scale invariant. Throws ZeroVector on an all-zero triple.
bool verify_realization(const std::vector<Rational3>& pts, const std::vector<Rational3>& lns,
                        const Configuration& c);

struct ReplayResult {
    bool ok = false;
    int failed_event = -1;
    std::string message;
    std::optional<Configuration> config;       // assembled independently on success
    std::vector<std::vector<int>> orders;      // sweep-line order after each event
};

// Replays an event history with a naive quadratic wire simulator, checking
// every budget, forced-crossing set, and the closure condition from scratch.
ReplayResult naive_sweep_check(const std::vector<Event>& history, int n, int k);

}  // namespace confsweep
