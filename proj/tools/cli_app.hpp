#pragma once

// Command-line front end. Every command builds one JSON result object; the
// --json flag prints it verbatim and the default text view is rendered from
// the same object.
//
// Exit codes: 0 success, 1 input error, 2 computation error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <type_traits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include "cachecap/cachecap.hpp"

namespace cachecap::cli {

using nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitCompute = 2;

inline std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw computation_error("sha256 digest failed");
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", md[i]);
        hex += buf;
    }
    return hex;
}

struct LoadedScenario {
    Network net;
    json info;  // {"file", "digest"}
};

// Digest of the canonical (compact, key-sorted) JSON, so formatting changes
// in the file do not change it.
inline LoadedScenario load(const std::string& path) {
    const auto doc = read_json_file(path);
    LoadedScenario s{network_from_json(doc), json::object()};
    s.info["file"] = std::filesystem::path(path).filename().string();
    s.info["digest"] = "sha256:" + sha256_hex(doc.dump());
    return s;
}

inline json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline std::string fmt(double v, int decimals = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

inline std::string fmt(const json& v, int decimals = 6) {
    if (v.is_null()) return "-";
    if (v.is_number_float()) return fmt(v.get<double>(), decimals);
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

// ---------------------------------------------------------------- commands

inline json capacity_json(const LoadedScenario& s, double tol) {
    const auto cr = capacity_report(s.net, tol);
    json out{{"command", "capacity"}, {"scenario", s.info}, {"tolerance", tol}, {"nodes", json::array()}};
    for (const auto& [id, nc] : cr.per_node) {
        out["nodes"].push_back({{"id", id},
                                {"reachable_classes", effective_catalog(s.net, id).entries.size()},
                                {"x0", optional_number(nc.x0)},
                                {"capacity", nc.capacity},
                                {"iterations", nc.iterations},
                                {"residual", nc.residual}});
    }
    out["network_capacity"] = cr.network_capacity;
    return out;
}

inline json optimal_json(const LoadedScenario& s, const std::string& node, double tol) {
    const auto d = optimal_distribution(s.net, node, tol);
    json out{{"command", "optimal"}, {"scenario", s.info}, {"node", node},
             {"x0", d.x0},           {"capacity", std::log2(d.x0)}, {"classes", json::array()}};
    for (const auto& [id, c] : d.classes)
        out["classes"].push_back(
            {{"id", id}, {"count", c.count}, {"tau", c.tau}, {"per_file", c.per_file}, {"mass", c.mass}});
    out["total_mass"] = d.total_mass();
    return out;
}

inline json efficiency_json(const LoadedScenario& s, const std::string& node, const AccessSource& src,
                            json source_info, double tol) {
    const auto r = entropy_efficiency(s.net, node, src, tol);
    json entropy{{"order", r.entropy.order ? json(*r.entropy.order) : json(nullptr)},
                 {"class_level", r.entropy.value},
                 {"method", to_string(r.entropy.method)}};
    return json{{"command", "efficiency"},
                {"scenario", s.info},
                {"node", node},
                {"source", std::move(source_info)},
                {"entropy", std::move(entropy)},
                {"entropy_bits_per_file", r.entropy_bits_per_file},
                {"mean_read_time", r.mean_read_time},
                {"efficiency", r.efficiency_bits_per_time},
                {"capacity", r.capacity_bits_per_time},
                {"utilization", optional_number(r.utilization_ratio)}};
}

inline json oracle_json(const LoadedScenario& s, const std::string& node, std::optional<double> grid,
                        std::uint64_t t_max, double tol) {
    const auto cat = effective_catalog(s.net, node);
    const double g = grid ? *grid : infer_grid(cat);
    const auto q = quantize(cat, g);
    const auto nc = node_capacity_detail(s.net, node, tol);
    const auto rep = convergence_report(q, t_max, nc.x0);
    json out{{"command", "oracle"},
             {"scenario", s.info},
             {"node", node},
             {"grid", g},
             {"gcd", rep.gcd},
             {"t_max", t_max},
             {"solver_x0", optional_number(nc.x0)},
             {"solver_capacity", rep.solver_capacity},
             {"series", json::array()}};
    for (const auto& p : rep.series) out["series"].push_back({{"T", p.t}, {"nu", p.nu.str()}, {"rate", p.rate}});
    out["final_T"] = rep.final_t;
    out["final_gap"] = rep.final_gap;
    return out;
}

inline json compare_json(const LoadedScenario& a, const LoadedScenario& b, double tol) {
    const auto ra = capacity_report(a.net, tol);
    const auto rb = capacity_report(b.net, tol);
    std::set<std::string> ids;
    for (const auto& [id, _] : ra.per_node) ids.insert(id);
    for (const auto& [id, _] : rb.per_node) ids.insert(id);
    json out{{"command", "compare"}, {"scenario_a", a.info}, {"scenario_b", b.info}, {"nodes", json::array()}};
    for (const auto& id : ids) {
        auto ia = ra.per_node.find(id);
        auto ib = rb.per_node.find(id);
        json row{{"id", id}};
        row["capacity_a"] = ia == ra.per_node.end() ? json(nullptr) : json(ia->second.capacity);
        row["capacity_b"] = ib == rb.per_node.end() ? json(nullptr) : json(ib->second.capacity);
        row["delta"] = (ia == ra.per_node.end() || ib == rb.per_node.end())
                           ? json(nullptr)
                           : json(ib->second.capacity - ia->second.capacity);
        out["nodes"].push_back(std::move(row));
    }
    out["network"] = {{"capacity_a", ra.network_capacity},
                      {"capacity_b", rb.network_capacity},
                      {"delta", rb.network_capacity - ra.network_capacity}};
    return out;
}

inline json validate_json(const LoadedScenario& s, const std::optional<std::string>& trace_path) {
    std::uint64_t files = 0;
    for (const auto& c : s.net.classes()) files += c.count;
    json out{{"command", "validate"},
             {"scenario", s.info},
             {"valid", true},
             {"classes", s.net.classes().size()},
             {"nodes", s.net.nodes().size()},
             {"links", s.net.links().size()},
             {"total_files", files}};
    if (trace_path) {
        const auto t = read_trace_file(*trace_path);
        for (const auto& sym : t.symbols)
            if (!s.net.find_class(sym)) throw input_error("trace contains unknown class '" + sym + "'");
        out["trace"] = {{"file", std::filesystem::path(*trace_path).filename().string()}, {"length", t.length()}};
    }
    return out;
}

// ------------------------------------------------------------ text views

inline void render_text(const json& r, std::ostream& os) {
    const std::string cmd = r.at("command");
    auto scenario_line = [&](const json& info, const char* label = "scenario") {
        os << label << ": " << info.at("file").get<std::string>() << "  (" << info.at("digest").get<std::string>()
           << ")\n";
    };
    if (cmd == "capacity") {
        scenario_line(r["scenario"]);
        os << "node                 x0              capacity (bits/time)\n";
        for (const auto& n : r["nodes"]) {
            char line[160];
            std::snprintf(line, sizeof line, "%-20s %-15s %s\n", n["id"].get<std::string>().c_str(),
                          fmt(n["x0"]).c_str(), fmt(n["capacity"]).c_str());
            os << line;
        }
        os << "network capacity: " << fmt(r["network_capacity"]) << " bits/time\n";
    } else if (cmd == "optimal") {
        scenario_line(r["scenario"]);
        os << "node " << r["node"].get<std::string>() << ": x0 = " << fmt(r["x0"]) << ", capacity = "
           << fmt(r["capacity"]) << " bits/time\n";
        os << "class                count        tau          per-file p*      class mass\n";
        for (const auto& c : r["classes"]) {
            char line[200];
            std::snprintf(line, sizeof line, "%-20s %-12s %-12s %-16.6e %s\n", c["id"].get<std::string>().c_str(),
                          c["count"].dump().c_str(), fmt(c["tau"]).c_str(), c["per_file"].get<double>(),
                          fmt(c["mass"]).c_str());
            os << line;
        }
        os << "total mass: " << fmt(r["total_mass"], 12) << "\n";
    } else if (cmd == "efficiency") {
        scenario_line(r["scenario"]);
        os << "node:             " << r["node"].get<std::string>() << "\n";
        os << "source:           " << r["source"]["kind"].get<std::string>() << "\n";
        os << "entropy:          " << fmt(r["entropy_bits_per_file"]) << " bits/file ("
           << r["entropy"]["method"].get<std::string>() << ")\n";
        os << "mean read time:   " << fmt(r["mean_read_time"]) << "\n";
        os << "efficiency:       " << fmt(r["efficiency"]) << " bits/time\n";
        os << "capacity:         " << fmt(r["capacity"]) << " bits/time\n";
        os << "utilization:      " << fmt(r["utilization"], 3) << "\n";
    } else if (cmd == "oracle") {
        scenario_line(r["scenario"]);
        os << "node " << r["node"].get<std::string>() << ", grid " << fmt(r["grid"], 9) << ", T_max "
           << r["t_max"].dump() << "\n";
        os << "T        rate (bits/time)   nu(T)\n";
        for (const auto& p : r["series"]) {
            char line[64];
            std::snprintf(line, sizeof line, "%-8s %-18s ", p["T"].dump().c_str(), fmt(p["rate"]).c_str());
            os << line << p["nu"].get<std::string>() << "\n";
        }
        os << "solver capacity:  " << fmt(r["solver_capacity"]) << "\n";
        os << "final gap:        " << fmt(r["final_gap"], 9) << " at T = " << r["final_T"].dump() << "\n";
    } else if (cmd == "compare") {
        scenario_line(r["scenario_a"], "A");
        scenario_line(r["scenario_b"], "B");
        os << "node                 A            B            delta\n";
        for (const auto& n : r["nodes"]) {
            char line[160];
            std::snprintf(line, sizeof line, "%-20s %-12s %-12s %s\n", n["id"].get<std::string>().c_str(),
                          fmt(n["capacity_a"]).c_str(), fmt(n["capacity_b"]).c_str(), fmt(n["delta"]).c_str());
            os << line;
        }
        const auto& nw = r["network"];
        os << "network              " << fmt(nw["capacity_a"]) << "     " << fmt(nw["capacity_b"]) << "     "
           << fmt(nw["delta"]) << "\n";
    } else if (cmd == "gen-trace") {
        os << "wrote " << r["n"].dump() << " symbols (seed " << r["seed"].dump() << ") to "
           << r["out"].get<std::string>() << "\n";
        for (const auto& [id, f] : r["frequencies"].items()) os << "  " << id << ": " << fmt(f) << "\n";
    } else if (cmd == "validate") {
        scenario_line(r["scenario"]);
        os << "valid: " << r["classes"].dump() << " classes (" << r["total_files"].dump() << " files), "
           << r["nodes"].dump() << " nodes, " << r["links"].dump() << " links\n";
        if (r.contains("trace"))
            os << "trace " << r["trace"]["file"].get<std::string>() << ": " << r["trace"]["length"].dump()
               << " symbols, all known\n";
    }
}

// ---------------------------------------------------------------- driver

/// Runs one command; `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Information-theoretic capacity and entropy efficiency of caching networks", "cachecap"};
    app.require_subcommand(1);

    bool as_json = false;
    double tol = kDefaultRelTol;
    std::string scenario, scenario_b, node, source_path, trace_path, out_path, estimator = "conditional";
    std::optional<double> grid;
    std::uint64_t t_max = 200;
    int order = 0;
    bool force = false, optimal = false;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::optional<std::string> validate_trace;

    auto add_common = [&](CLI::App* sub, bool with_tol) {
        sub->add_flag("--json", as_json, "Print the machine-readable report");
        if (with_tol)
            sub->add_option("--tol", tol, "Relative bisection tolerance")->capture_default_str();
    };

    auto* cap = app.add_subcommand("capacity", "Node and network capacities");
    cap->add_option("scenario", scenario, "Scenario JSON")->required();
    add_common(cap, true);

    auto* opt = app.add_subcommand("optimal", "Capacity-achieving access distribution of a node");
    opt->add_option("scenario", scenario, "Scenario JSON")->required();
    opt->add_option("node", node, "Node id")->required();
    add_common(opt, true);

    auto* eff = app.add_subcommand("efficiency", "Entropy efficiency of a node under an access source");
    eff->add_option("scenario", scenario, "Scenario JSON")->required();
    eff->add_option("node", node, "Node id")->required();
    auto* o_src = eff->add_option("source", source_path, "Source spec JSON");
    auto* o_opt = eff->add_flag("--optimal", optimal, "Use the capacity-achieving i.i.d. source");
    auto* o_trace = eff->add_option("--trace", trace_path, "Trace file (one class id per line)");
    eff->add_option("--order", order, "Block order k for trace estimates")->capture_default_str();
    eff->add_option("--estimator", estimator, "Trace estimator: conditional or block")
        ->check(CLI::IsMember({"conditional", "block"}))
        ->capture_default_str();
    eff->add_flag("--force", force, "Skip the trace undersampling guard");
    o_src->excludes(o_opt)->excludes(o_trace);
    o_opt->excludes(o_trace);
    add_common(eff, true);

    auto* ora = app.add_subcommand("oracle", "Brute-force task counting versus the solver");
    ora->add_option("scenario", scenario, "Scenario JSON")->required();
    ora->add_option("node", node, "Node id")->required();
    ora->add_option("--grid", grid, "Time grid (default: inferred)");
    ora->add_option("--tmax", t_max, "Largest T, in grid steps")->capture_default_str();
    add_common(ora, true);

    auto* cmp = app.add_subcommand("compare", "Side-by-side capacities of two scenarios");
    cmp->add_option("scenario_a", scenario, "Scenario A")->required();
    cmp->add_option("scenario_b", scenario_b, "Scenario B")->required();
    add_common(cmp, true);

    auto* gen = app.add_subcommand("gen-trace", "Sample a trace from an i.i.d. or Markov source");
    gen->add_option("source", source_path, "Source spec JSON")->required();
    gen->add_option("--n", n, "Trace length")->required();
    gen->add_option("--seed", seed, "PRNG seed")->capture_default_str();
    gen->add_option("--out", out_path, "Output file (default: standard output)");
    add_common(gen, false);

    auto* val = app.add_subcommand("validate", "Check a scenario (and optionally a trace against it)");
    val->add_option("scenario", scenario, "Scenario JSON")->required();
    val->add_option("--trace", validate_trace, "Trace whose ids must all be known classes");
    add_common(val, false);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    }

    try {
        json result;
        if (*cap) {
            result = capacity_json(load(scenario), tol);
        } else if (*opt) {
            result = optimal_json(load(scenario), node, tol);
        } else if (*eff) {
            const auto s = load(scenario);
            AccessSource src;
            json info;
            if (optimal) {
                src = optimal_source(optimal_distribution(s.net, node, tol));
                info = {{"kind", "optimal"}};
            } else if (!trace_path.empty()) {
                if (order < 0) throw input_error("--order must be >= 0");
                EmpiricalSource e;
                e.trace = read_trace_file(trace_path);
                e.order = static_cast<unsigned>(order);
                e.estimator = estimator == "block" ? EmpiricalEstimator::block : EmpiricalEstimator::conditional;
                e.force = force;
                src = std::move(e);
                info = {{"kind", "trace"},
                        {"file", std::filesystem::path(trace_path).filename().string()},
                        {"order", order},
                        {"estimator", estimator}};
            } else if (!source_path.empty()) {
                const auto g = load_source(source_path);
                src = to_access_source(g);
                info = {{"kind", std::holds_alternative<IidSource>(g) ? "iid" : "markov"},
                        {"file", std::filesystem::path(source_path).filename().string()}};
            } else {
                throw input_error("efficiency needs a source spec, --optimal, or --trace");
            }
            result = efficiency_json(s, node, src, std::move(info), tol);
        } else if (*ora) {
            result = oracle_json(load(scenario), node, grid, t_max, tol);
        } else if (*cmp) {
            result = compare_json(load(scenario), load(scenario_b), tol);
        } else if (*gen) {
            const auto g = load_source(source_path);
            const Trace t = std::visit(
                [&](const auto& s) {
                    if constexpr (std::is_same_v<std::decay_t<decltype(s)>, IidSource>)
                        return sample_iid(s, n, seed);
                    else
                        return sample_markov(s, n, seed);
                },
                g);
            if (out_path.empty()) {
                write_trace(out, t);
                return kExitOk;
            }
            std::ofstream f(out_path, std::ios::binary);
            if (!f) throw input_error("cannot write '" + out_path + "'");
            write_trace(f, t);
            f.close();
            if (!f) throw input_error("failed writing '" + out_path + "'");
            json freq = json::object();
            if (t.length() > 0)
                for (const auto& [id, c] : empirical_distribution(t).counts)
                    freq[id] = static_cast<double>(c) / static_cast<double>(t.length());
            result = {{"command", "gen-trace"},
                      {"source", std::filesystem::path(source_path).filename().string()},
                      {"n", n},
                      {"seed", seed},
                      {"out", out_path},
                      {"frequencies", std::move(freq)}};
        } else if (*val) {
            result = validate_json(load(scenario), validate_trace);
        }

        if (as_json)
            out << result.dump(2) << "\n";
        else
            render_text(result, out);
        return kExitOk;
    } catch (const input_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const computation_error& e) {
        err << "computation error: " << e.what() << "\n";
        return kExitCompute;
    } catch (const std::exception& e) {
        err << "computation error: " << e.what() << "\n";
        return kExitCompute;
    }
}

}  // namespace cachecap::cli
