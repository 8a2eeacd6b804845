#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "confsweep/events.hpp"

namespace confsweep {

struct MissingHistory : std::runtime_error {
    explicit MissingHistory(const std::string& m) : std::runtime_error(m) {}
};

// Wiring diagram of the working pseudolines: k horizontal frame wires, n-k
// descending working wires permuting at each sweep event, crossing points as
// filled disks, plain crossings as bare wire crossings. Throws MissingHistory
// on an empty history and std::invalid_argument on one that does not replay.
std::string render_wiring_svg(const std::vector<Event>& history, int n, int k);

}  // namespace confsweep
