#pragma once

/// Synthetic access traces and empirical distributions.
///
/// All sampling goes through `TraceRng`: std::mt19937_64 seeded directly
/// with the 64-bit seed (the engine's output sequence is fixed by the C++
/// standard), with uniforms in [0, 1) formed as (x >> 11) * 2^-53. Category
/// draws invert the cumulative distribution in the order the categories are
/// listed. Identical (source, length, seed) therefore yields identical
/// traces on every conforming platform.

#include <cstdint>
#include <fstream>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cachecap/access_source.hpp"
#include "cachecap/errors.hpp"

namespace cachecap {

class TraceRng {
public:
    explicit TraceRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    double next_unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Index drawn from `p`; zero-mass entries are never returned.
    std::size_t categorical(std::span<const double> p) {
        const double u = next_unit();
        double cum = 0.0;
        std::size_t last_positive = 0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (p[i] <= 0.0) continue;
            cum += p[i];
            last_positive = i;
            if (u < cum) return i;
        }
        return last_positive;  // rounding slack when sum(p) is just below 1
    }

private:
    std::mt19937_64 engine_;
};

inline Trace sample_iid(const IidSource& src, std::size_t n, std::uint64_t seed) {
    validate(src);
    TraceRng rng(seed);
    Trace t;
    t.symbols.reserve(n);
    for (std::size_t i = 0; i < n; ++i) t.symbols.push_back(src.classes[rng.categorical(src.probabilities)]);
    t.provenance = "iid seed=" + std::to_string(seed) + " n=" + std::to_string(n);
    return t;
}

inline Trace sample_markov(const MarkovSource& src, std::size_t n, std::uint64_t seed) {
    validate(src);
    TraceRng rng(seed);
    Trace t;
    t.symbols.reserve(n);
    if (n > 0) {
        std::size_t state = rng.categorical(src.initial);
        t.symbols.push_back(src.states[state]);
        for (std::size_t i = 1; i < n; ++i) {
            state = rng.categorical(src.transition[state]);
            t.symbols.push_back(src.states[state]);
        }
    }
    t.provenance = "markov seed=" + std::to_string(seed) + " n=" + std::to_string(n);
    return t;
}

struct EmpiricalDistribution {
    std::map<std::string, std::uint64_t> counts;
    std::uint64_t total = 0;

    double probability(const std::string& id) const {
        auto it = counts.find(id);
        return it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total);
    }

    IidSource as_iid() const {
        IidSource s;
        for (const auto& [id, c] : counts) {
            s.classes.push_back(id);
            s.probabilities.push_back(static_cast<double>(c) / static_cast<double>(total));
        }
        return s;
    }
};

/// Symbol frequencies; exact integer counts, divided only on access.
inline EmpiricalDistribution empirical_distribution(const Trace& t) {
    if (t.symbols.empty()) throw input_error("empirical distribution of an empty trace");
    EmpiricalDistribution d;
    for (const auto& s : t.symbols) ++d.counts[s];
    d.total = t.symbols.size();
    return d;
}

inline constexpr const char* kTraceHeader = "#cachecap-trace v1";

// One id per line. An optional header line may open the file; blank lines
// and a trailing '\r' are ignored.
inline Trace read_trace(std::istream& in, std::string provenance = {}) {
    Trace t;
    t.provenance = std::move(provenance);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (first && line == kTraceHeader) {
            first = false;
            continue;
        }
        first = false;
        if (line.empty()) continue;
        if (line.front() == '#') throw input_error("unexpected comment line in trace: '" + line + "'");
        t.symbols.push_back(line);
    }
    return t;
}

inline Trace read_trace_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open trace '" + path + "'");
    return read_trace(in, path);
}

inline void write_trace(std::ostream& out, const Trace& t, bool header = true) {
    if (header) out << kTraceHeader << '\n';
    for (const auto& s : t.symbols) out << s << '\n';
}

}  // namespace cachecap
