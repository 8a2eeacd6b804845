#include "confsweep/config.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace confsweep {

const char* violation_name(Violation v) {
    switch (v) {
        case Violation::WrongLineCount: return "WrongLineCount";
        case Violation::BadPointIndex: return "BadPointIndex";
        case Violation::DuplicatePointInLine: return "DuplicatePointInLine";
        case Violation::RegularityViolation: return "RegularityViolation";
        case Violation::SharedPairViolation: return "SharedPairViolation";
        case Violation::Disconnected: return "Disconnected";
    }
    return "?";
}

VerifyReport verify(int n, int k, const std::vector<std::vector<int>>& lines) {
    VerifyReport rep;
    rep.per_line_two_crossings = (long long)n - 1 - (long long)k * (k - 1);
    rep.total_two_crossings = (long long)n * rep.per_line_two_crossings / 2;
    auto fail = [&rep](Violation v, const std::string& msg) {
        rep.violations.emplace_back(v, msg);
    };

    if ((int)lines.size() != n) {
        fail(Violation::WrongLineCount,
             "expected " + std::to_string(n) + " lines, got " + std::to_string(lines.size()));
        return rep;
    }
    for (size_t i = 0; i < lines.size(); ++i) {
        if ((int)lines[i].size() != k) {
            fail(Violation::RegularityViolation,
                 "line " + std::to_string(i) + " has " + std::to_string(lines[i].size()) +
                     " points, expected " + std::to_string(k));
            return rep;
        }
        std::set<int> seen;
        for (int p : lines[i]) {
            if (p < 0 || p >= n) {
                fail(Violation::BadPointIndex,
                     "line " + std::to_string(i) + " references point " + std::to_string(p));
                return rep;
            }
            if (!seen.insert(p).second) {
                fail(Violation::DuplicatePointInLine,
                     "line " + std::to_string(i) + " lists point " + std::to_string(p) + " twice");
                return rep;
            }
        }
    }

    std::vector<int> degree(n, 0);
    for (const auto& ln : lines)
        for (int p : ln) ++degree[p];
    for (int p = 0; p < n; ++p) {
        if (degree[p] != k)
            fail(Violation::RegularityViolation,
                 "point " + std::to_string(p) + " lies on " + std::to_string(degree[p]) +
                     " lines, expected " + std::to_string(k));
    }

    std::set<std::pair<int, int>> pairs;
    for (size_t i = 0; i < lines.size(); ++i) {
        for (size_t a = 0; a < lines[i].size(); ++a)
            for (size_t b = a + 1; b < lines[i].size(); ++b) {
                int p = std::min(lines[i][a], lines[i][b]);
                int q = std::max(lines[i][a], lines[i][b]);
                if (!pairs.insert({p, q}).second)
                    fail(Violation::SharedPairViolation,
                         "points " + std::to_string(p) + "," + std::to_string(q) +
                             " lie on two common lines");
            }
    }

    if (rep.violations.empty()) {
        // BFS over the bipartite incidence graph: nodes 0..n-1 points, n..2n-1 lines.
        std::vector<std::vector<int>> on_point(n);
        for (int i = 0; i < n; ++i)
            for (int p : lines[i]) on_point[p].push_back(i);
        std::vector<char> vis(2 * n, 0);
        std::vector<int> stack{0};
        vis[0] = 1;
        int reached = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            if (v < n) {
                for (int ln : on_point[v])
                    if (!vis[n + ln]) {
                        vis[n + ln] = 1;
                        ++reached;
                        stack.push_back(n + ln);
                    }
            } else {
                for (int p : lines[v - n])
                    if (!vis[p]) {
                        vis[p] = 1;
                        ++reached;
                        stack.push_back(p);
                    }
            }
        }
        if (reached != 2 * n)
            fail(Violation::Disconnected, "incidence graph has more than one component");
    }

    rep.valid = rep.violations.empty();
    return rep;
}

VerifyReport verify(const Configuration& c) { return verify(c.n(), c.k(), c.lines()); }

Configuration::Configuration(int n, int k, std::vector<std::vector<int>> lines)
    : n_(n), k_(k), lines_(std::move(lines)) {
    for (auto& ln : lines_) std::sort(ln.begin(), ln.end());
    VerifyReport rep = verify(n_, k_, lines_);
    if (!rep.valid)
        throw ConfigError(rep.violations.front().first, rep.violations.front().second);
}

Configuration from_line_table(const std::vector<std::vector<std::string>>& rows) {
    if (rows.empty()) throw std::invalid_argument("empty line table");
    const size_t k = rows.front().size();
    for (const auto& r : rows)
        if (r.size() != k) throw std::invalid_argument("rows of unequal length");
    std::map<std::string, int> index;
    std::vector<std::vector<int>> lines;
    for (const auto& r : rows) {
        std::vector<int> ln;
        for (const auto& label : r) {
            auto it = index.find(label);
            if (it == index.end()) it = index.insert({label, (int)index.size()}).first;
            ln.push_back(it->second);
        }
        lines.push_back(std::move(ln));
    }
    const int n = (int)rows.size();
    if ((int)index.size() != n)
        throw ConfigError(Violation::RegularityViolation,
                          "table names " + std::to_string(index.size()) + " points for " +
                              std::to_string(n) + " lines");
    return Configuration(n, (int)k, std::move(lines));
}

std::vector<std::vector<std::string>> parse_table_text(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] == '#') continue;
        std::istringstream ls(line);
        std::vector<std::string> row;
        std::string tok;
        while (ls >> tok) row.push_back(tok);
        if (!row.empty()) rows.push_back(std::move(row));
    }
    return rows;
}

Configuration dualize(const Configuration& c) {
    std::vector<std::vector<int>> dual(c.n());
    for (int i = 0; i < c.n(); ++i)
        for (int p : c.lines()[i]) dual[p].push_back(i);
    return Configuration(c.n(), c.k(), std::move(dual));
}

namespace {

std::string render_record(int n, int k, const std::vector<std::vector<int>>& lines) {
    nlohmann::ordered_json j;
    j["n"] = n;
    j["k"] = k;
    j["lines"] = lines;
    return j.dump();
}

// One pass of the normal form: sort the line list, renumber points by first
// appearance in that order, re-sort within lines.
std::vector<std::vector<int>> canon_pass(int n, std::vector<std::vector<int>> lines) {
    std::sort(lines.begin(), lines.end());
    std::vector<int> newid(n, -1);
    int next = 0;
    for (const auto& ln : lines)
        for (int p : ln)
            if (newid[p] < 0) newid[p] = next++;
    for (auto& ln : lines) {
        for (int& p : ln) p = newid[p];
        std::sort(ln.begin(), ln.end());
    }
    return lines;
}

}  // namespace

Configuration canon(const Configuration& c) {
    // Iterate until stable; in the unlikely event of a cycle, pick the
    // lexicographically smallest member so the result is still a fixpoint.
    std::vector<std::vector<std::vector<int>>> seen;
    std::vector<std::vector<int>> cur = c.lines();
    for (auto& ln : cur) std::sort(ln.begin(), ln.end());
    std::sort(cur.begin(), cur.end());
    for (;;) {
        auto it = std::find(seen.begin(), seen.end(), cur);
        if (it != seen.end()) {
            auto best = std::min_element(it, seen.end());
            return Configuration(c.n(), c.k(), *best);
        }
        seen.push_back(cur);
        auto next = canon_pass(c.n(), cur);
        std::sort(next.begin(), next.end());
        if (next == cur) break;
        cur = std::move(next);
    }
    return Configuration(c.n(), c.k(), cur);
}

std::string serialize(const Configuration& c) {
    Configuration cc = canon(c);
    return render_record(cc.n(), cc.k(), cc.lines());
}

std::optional<Configuration> parse_record(const std::string& line, std::string* err) {
    try {
        nlohmann::json j = nlohmann::json::parse(line);
        int n = j.at("n").get<int>();
        int k = j.at("k").get<int>();
        auto lines = j.at("lines").get<std::vector<std::vector<int>>>();
        return Configuration(n, k, std::move(lines));
    } catch (const std::exception& e) {
        if (err) *err = e.what();
        return std::nullopt;
    }
}

Configuration relabel(const Configuration& c,
                      const std::vector<int>& point_map,
                      const std::vector<int>& line_order) {
    std::vector<std::vector<int>> lines(c.n());
    for (int i = 0; i < c.n(); ++i) {
        std::vector<int> ln;
        for (int p : c.lines()[line_order[i]]) ln.push_back(point_map[p]);
        lines[i] = std::move(ln);
    }
    return Configuration(c.n(), c.k(), std::move(lines));
}

}  // namespace confsweep
