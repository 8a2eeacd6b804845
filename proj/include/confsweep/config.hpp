#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace confsweep {

enum class Violation {
    WrongLineCount,
    BadPointIndex,
    DuplicatePointInLine,
    RegularityViolation,
    SharedPairViolation,
    Disconnected,
};

const char* violation_name(Violation v);

struct ConfigError : std::runtime_error {
    Violation code;
    ConfigError(Violation c, const std::string& msg)
        : std::runtime_error(msg), code(c) {}
};

struct VerifyReport {
    bool valid = false;
    std::vector<std::pair<Violation, std::string>> violations;
    // Derived counts for any simple topological realization:
    // each line carries n-1-k(k-1) plain crossings, n(n-1-k(k-1))/2 in total.
    long long per_line_two_crossings = 0;
    long long total_two_crossings = 0;
};

// An (n_k) incidence structure: n points, n lines, every point on k lines,
// every line through k points, two lines sharing at most one point, and the
// point-line incidence graph connected. Immutable after construction.
class Configuration {
public:
    Configuration(int n, int k, std::vector<std::vector<int>> lines);

    int n() const { return n_; }
    int k() const { return k_; }
    const std::vector<std::vector<int>>& lines() const { return lines_; }

    bool operator==(const Configuration&) const = default;

private:
    int n_;
    int k_;
    std::vector<std::vector<int>> lines_;  // each sorted ascending
};

// Checks every invariant without throwing; usable on arbitrary line sets.
VerifyReport verify(int n, int k, const std::vector<std::vector<int>>& lines);
VerifyReport verify(const Configuration& c);

// Ingests a table of point labels, one row per line, mapping labels to
// indices in first-appearance order.
Configuration from_line_table(const std::vector<std::vector<std::string>>& rows);

// Splits whitespace-separated label rows, one row per non-empty text line.
std::vector<std::vector<std::string>> parse_table_text(const std::string& text);

// Exchanges points and lines: point i of the dual is line i of c, line j of
// the dual is the pencil of lines of c through point j. Exact involution:
// dualize(dualize(c)) == c.
Configuration dualize(const Configuration& c);

// Stable normal form for byte-exact deduplication (not an isomorphism
// canonical form): lines sorted by their point lists, points renumbered by
// first appearance, iterated until stable.
Configuration canon(const Configuration& c);

// Canonical JSONL record {"n":..,"k":..,"lines":[[..],..]} of canon(c).
std::string serialize(const Configuration& c);

// Parses and validates one JSONL record; returns nullopt with *err set on
// malformed input.
std::optional<Configuration> parse_record(const std::string& line, std::string* err = nullptr);

// Applies a point relabeling and a line reordering; both must be bijections.
Configuration relabel(const Configuration& c,
                      const std::vector<int>& point_map,
                      const std::vector<int>& line_order);

}  // namespace confsweep
