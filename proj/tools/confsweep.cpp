#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "confsweep/config.hpp"
#include "confsweep/draw.hpp"
#include "confsweep/oracle.hpp"
#include "confsweep/partitions.hpp"
#include "confsweep/reduce.hpp"
#include "confsweep/sweep.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using confsweep::Configuration;

int default_jobs() {
    if (const char* env = std::getenv("CONFSWEEP_JOBS")) {
        const int j = std::atoi(env);
        if (j > 0) return j;
    }
    return 1;
}

std::string manifest_line(const std::string& cmd, int n, int k,
                          const std::map<std::string, long long>& extra = {}) {
    nlohmann::ordered_json m;
    m["tool"] = "confsweep";
    m["version"] = kVersion;
    m["cmd"] = cmd;
    if (n > 0) m["n"] = n;
    if (k > 0) m["k"] = k;
    for (const auto& [key, val] : extra) m[key] = val;
    nlohmann::ordered_json j;
    j["manifest"] = m;
    return j.dump();
}

bool is_meta_line(const std::string& line) {
    return line.rfind("{\"manifest\"", 0) == 0 || line.rfind("{\"checkpoint\"", 0) == 0;
}

std::vector<std::string> read_record_lines(const std::string& path) {
    std::istream* in = &std::cin;
    std::ifstream file;
    if (path != "-") {
        file.open(path);
        if (!file) throw std::runtime_error("cannot open " + path);
        in = &file;
    }
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(*in, line)) {
        if (line.empty() || is_meta_line(line)) continue;
        lines.push_back(line);
    }
    return lines;
}

std::ostream& open_out(std::ofstream& file, const std::string& path) {
    if (path == "-") return std::cout;
    file.open(path);
    if (!file) throw std::runtime_error("cannot open " + path + " for writing");
    return file;
}

// ----------------------------------------------------------- subcommand: partitions

int cmd_partitions(int n, int k) {
    confsweep::PartitionTable table(n, k);
    for (const auto& t : table.table()) {
        for (size_t i = 0; i < t.size(); ++i) {
            if (i) std::cout << ",";
            std::cout << t[i];
        }
        std::cout << "\n";
    }
    return 0;
}

// ----------------------------------------------------------- subcommand: enumerate

struct Checkpoint {
    int n = 0, k = 0, tasks = 0, dedup = 0;
    std::map<int, std::string> done;
};

Checkpoint load_checkpoint(const std::string& path) {
    Checkpoint cp;
    std::ifstream in(path);
    if (!in) return cp;
    std::string line;
    if (!std::getline(in, line)) return cp;
    nlohmann::json head = nlohmann::json::parse(line);
    const auto& h = head.at("checkpoint");
    cp.n = h.at("n").get<int>();
    cp.k = h.at("k").get<int>();
    cp.tasks = h.at("tasks").get<int>();
    cp.dedup = h.at("dedup_log2").get<int>();
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        const int task = j.at("task").get<int>();
        const int count = j.at("count").get<int>();
        std::string text;
        for (int i = 0; i < count; ++i) {
            std::string rec;
            if (!std::getline(in, rec)) throw std::runtime_error("truncated checkpoint");
            text += rec;
            text += "\n";
        }
        cp.done[task] = std::move(text);
    }
    return cp;
}

int cmd_enumerate(int n, int k, int jobs, int dedup_log2, const std::string& out_path,
                  const std::string& checkpoint_path, int stop_after, bool progress) {
    const auto t0 = std::chrono::steady_clock::now();
    confsweep::SweepPlan plan = confsweep::plan_sweep(n, k);
    const int total = (int)plan.tasks.size();

    Checkpoint cp;
    std::ofstream cp_file;
    if (!checkpoint_path.empty()) {
        if (std::filesystem::exists(checkpoint_path)) {
            cp = load_checkpoint(checkpoint_path);
            if (cp.n != n || cp.k != k || cp.tasks != total || cp.dedup != dedup_log2)
                throw std::runtime_error("checkpoint does not match this invocation");
            cp_file.open(checkpoint_path, std::ios::app);
        } else {
            cp_file.open(checkpoint_path);
            nlohmann::ordered_json h;
            h["checkpoint"] = {{"tool", "confsweep"}, {"version", kVersion}, {"n", n},
                               {"k", k},             {"tasks", total},      {"dedup_log2", dedup_log2}};
            cp_file << h.dump() << "\n";
            cp_file.flush();
        }
    }

    std::set<int> skip;
    for (const auto& [i, _] : cp.done) skip.insert(i);

    confsweep::SweepOptions opt;
    opt.jobs = jobs;
    opt.dedup_log2 = dedup_log2;

    confsweep::SweepStats stats;
    std::map<int, std::string> results = cp.done;
    int done_count = (int)skip.size();
    const bool complete = confsweep::run_plan(
        plan, opt, skip, stop_after, &stats, [&](int i, const std::string& text) {
            results[i] = text;
            ++done_count;
            if (cp_file.is_open()) {
                const long long count = std::count(text.begin(), text.end(), '\n');
                nlohmann::ordered_json j;
                j["task"] = i;
                j["count"] = count;
                cp_file << j.dump() << "\n" << text;
                cp_file.flush();
            }
            if (progress)
                std::cerr << "[confsweep] task " << i << " done (" << done_count << "/" << total
                          << ")\n";
        });

    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    std::cerr << "[confsweep] enumerate n=" << n << " k=" << k << " tasks=" << done_count << "/"
              << total << " nodes=" << stats.nodes << " emitted=" << stats.emitted
              << " dedup_hits=" << stats.dedup_hits << " wall_ms=" << ms << "\n";

    if (!complete) {
        std::cerr << "[confsweep] stopped early; resume with the same --checkpoint file\n";
        return 3;
    }

    std::ofstream out_file;
    std::ostream& out = open_out(out_file, out_path);
    out << manifest_line("enumerate", n, k, {{"dedup_log2", dedup_log2}}) << "\n";
    for (int i = 0; i < total; ++i) {
        auto it = results.find(i);
        if (it != results.end()) out << it->second;
    }
    out.flush();
    return 0;
}

// ----------------------------------------------------------- subcommand: reduce

int cmd_reduce(const std::string& in_path, const std::string& out_path, int jobs,
               const std::string& report_path) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<Configuration> configs;
    for (const std::string& line : read_record_lines(in_path)) {
        std::string err;
        auto rec = confsweep::parse_raw(line, &err);
        if (!rec) throw std::runtime_error("bad record: " + err);
        configs.push_back(rec->config);
    }
    confsweep::ReduceReport report;
    auto classes = confsweep::reduce_all(configs, jobs, &report);

    std::ofstream out_file;
    std::ostream& out = open_out(out_file, out_path);
    int n = configs.empty() ? 0 : configs[0].n();
    int k = configs.empty() ? 0 : configs[0].k();
    out << manifest_line("reduce", n, k) << "\n";
    for (const auto& cls : classes) {
        std::string rec = confsweep::serialize(cls.representative);
        rec.pop_back();
        rec += ",\"members\":" + std::to_string(cls.members) +
               ",\"self_dual\":" + (cls.self_dual ? "true" : "false") + "}";
        out << rec << "\n";
    }
    out.flush();

    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    std::cerr << "[confsweep] reduce inputs=" << report.inputs << " classes=" << report.classes
              << " self_dual=" << report.self_dual << " iso_calls=" << report.iso_calls
              << " wall_ms=" << ms << "\n";

    if (!report_path.empty()) {
        nlohmann::ordered_json j;
        j["inputs"] = report.inputs;
        j["unique_serializations"] = report.unique_serializations;
        j["classes"] = report.classes;
        j["self_dual"] = report.self_dual;
        j["iso_calls"] = report.iso_calls;
        j["key_splits"] = report.key_splits;
        j["max_level"] = report.max_level;
        nlohmann::ordered_json levels = nlohmann::ordered_json::array();
        for (const auto& [lvl, cnt] : report.buckets_per_level)
            levels.push_back({{"level", lvl}, {"buckets", cnt}});
        j["buckets_per_level"] = levels;
        std::ofstream rf(report_path);
        rf << j.dump(2) << "\n";
    }
    return 0;
}

// ----------------------------------------------------------- subcommand: verify

int cmd_verify(const std::string& in_path) {
    bool all_valid = true;
    int idx = 0;
    for (const std::string& line : read_record_lines(in_path)) {
        nlohmann::json j = nlohmann::json::parse(line);
        const int n = j.at("n").get<int>();
        const int k = j.at("k").get<int>();
        const auto lines = j.at("lines").get<std::vector<std::vector<int>>>();
        confsweep::VerifyReport rep = confsweep::verify(n, k, lines);
        nlohmann::ordered_json out;
        out["record"] = idx++;
        out["valid"] = rep.valid;
        nlohmann::ordered_json viol = nlohmann::ordered_json::array();
        for (const auto& [code, detail] : rep.violations)
            viol.push_back({{"code", confsweep::violation_name(code)}, {"detail", detail}});
        out["violations"] = viol;
        out["per_line_two_crossings"] = rep.per_line_two_crossings;
        out["total_two_crossings"] = rep.total_two_crossings;
        std::cout << out.dump() << "\n";
        all_valid = all_valid && rep.valid;
    }
    return all_valid ? 0 : 1;
}

// ----------------------------------------------------------- subcommand: oracle

int cmd_oracle(int n, int k, const std::string& out_path) {
    auto reps = confsweep::enumerate_combinatorial(n, k);
    std::cout << reps.size() << "\n";
    if (!out_path.empty()) {
        std::ofstream out_file;
        std::ostream& out = open_out(out_file, out_path);
        out << manifest_line("oracle", n, k) << "\n";
        for (const auto& c : reps) out << confsweep::serialize(c) << "\n";
    }
    return 0;
}

// ----------------------------------------------------------- subcommand: draw

int cmd_draw(const std::string& in_path, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    int idx = 0;
    for (const std::string& line : read_record_lines(in_path)) {
        std::string err;
        auto rec = confsweep::parse_raw(line, &err);
        if (!rec) throw std::runtime_error("bad record: " + err);
        if (rec->history.empty())
            throw confsweep::MissingHistory("record " + std::to_string(idx) +
                                            " carries no sweep history");
        const std::string svg =
            confsweep::render_wiring_svg(rec->history, rec->config.n(), rec->config.k());
        char name[32];
        std::snprintf(name, sizeof(name), "cfg-%06d.svg", idx);
        std::ofstream out(std::filesystem::path(out_dir) / name);
        out << "<!-- " << manifest_line("draw", rec->config.n(), rec->config.k()) << " -->\n";
        out << svg;
        ++idx;
    }
    std::cerr << "[confsweep] draw wrote " << idx << " file(s) to " << out_dir << "\n";
    return 0;
}

// ----------------------------------------------------------- subcommand: verify-real

confsweep::Rational3 parse_triple(const nlohmann::json& j) {
    auto comp = [](const nlohmann::json& v) {
        if (v.is_number_integer()) return mpq_class((long)v.get<long long>());
        return mpq_class(v.get<std::string>());
    };
    return {comp(j.at(0)), comp(j.at(1)), comp(j.at(2))};
}

int cmd_verify_real(const std::string& config_path, const std::string& coords_path) {
    auto lines = read_record_lines(config_path);
    if (lines.empty()) throw std::runtime_error("no configuration record in " + config_path);
    std::string err;
    auto rec = confsweep::parse_raw(lines[0], &err);
    if (!rec) throw std::runtime_error("bad record: " + err);

    std::ifstream cf(coords_path);
    if (!cf) throw std::runtime_error("cannot open " + coords_path);
    nlohmann::json j = nlohmann::json::parse(cf);
    std::vector<confsweep::Rational3> pts, lns;
    for (const auto& t : j.at("points")) pts.push_back(parse_triple(t));
    for (const auto& t : j.at("lines")) lns.push_back(parse_triple(t));

    const bool ok = confsweep::verify_realization(pts, lns, rec->config);
    std::cout << (ok ? "true" : "false") << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"confsweep: enumerates topological incidence configurations by sweeping the projective plane"};
    app.require_subcommand(1);

    int n = 0, k = 0, jobs = default_jobs(), dedup_log2 = 21, stop_after = -1;
    std::string in_path = "-", out_path = "-", checkpoint_path, report_path, out_dir = ".",
                coords_path, oracle_out;
    bool progress = false;

    auto* c_part = app.add_subcommand("partitions", "print the ordered segment-distribution table");
    c_part->add_option("--n", n)->required();
    c_part->add_option("--k", k)->required();

    auto* c_enum = app.add_subcommand("enumerate", "sweep-enumerate topological configurations");
    c_enum->add_option("--n", n)->required();
    c_enum->add_option("--k", k)->required();
    c_enum->add_option("--jobs", jobs);
    c_enum->add_option("--out", out_path);
    c_enum->add_option("--checkpoint", checkpoint_path);
    c_enum->add_option("--stop-after-tasks", stop_after)
        ->description("stop after this many new subtree tasks (requires --checkpoint)");
    c_enum->add_option("--dedup-log2", dedup_log2);
    c_enum->add_flag("--progress", progress);

    auto* c_red = app.add_subcommand("reduce", "collapse raw output into equivalence classes");
    c_red->add_option("--in", in_path);
    c_red->add_option("--out", out_path);
    c_red->add_option("--jobs", jobs);
    c_red->add_option("--report", report_path);

    auto* c_ver = app.add_subcommand("verify", "check configuration invariants of JSONL records");
    c_ver->add_option("--in", in_path);

    auto* c_ora = app.add_subcommand("oracle", "brute-force combinatorial class count");
    c_ora->add_option("--n", n)->required();
    c_ora->add_option("--k", k)->required();
    c_ora->add_option("--out", oracle_out);

    auto* c_draw = app.add_subcommand("draw", "render wiring diagrams as SVG");
    c_draw->add_option("--in", in_path);
    c_draw->add_option("--out-dir", out_dir);

    auto* c_real = app.add_subcommand("verify-real", "exact rational incidence check");
    c_real->add_option("--config", in_path)->required();
    c_real->add_option("--coords", coords_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (c_part->parsed()) return cmd_partitions(n, k);
        if (c_enum->parsed()) {
            if (stop_after >= 0 && checkpoint_path.empty()) {
                std::cerr << "error: --stop-after-tasks requires --checkpoint\n";
                return 2;
            }
            return cmd_enumerate(n, k, jobs, dedup_log2, out_path, checkpoint_path, stop_after,
                                 progress);
        }
        if (c_red->parsed()) return cmd_reduce(in_path, out_path, jobs, report_path);
        if (c_ver->parsed()) return cmd_verify(in_path);
        if (c_ora->parsed()) return cmd_oracle(n, k, oracle_out);
        if (c_draw->parsed()) return cmd_draw(in_path, out_dir);
        if (c_real->parsed()) return cmd_verify_real(in_path, coords_path);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
