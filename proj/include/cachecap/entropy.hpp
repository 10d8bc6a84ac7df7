#pragma once

/// Shannon entropy of access processes and the entropy efficiency of nodes:
/// entropy (bits per file) divided by the mean per-file read time, giving
/// bits per time unit. For every i.i.d. source it is at most the node
/// capacity, with equality at the capacity-achieving distribution.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "cachecap/access_source.hpp"
#include "cachecap/capacity.hpp"
#include "cachecap/errors.hpp"
#include "cachecap/network.hpp"
#include "cachecap/sources.hpp"

namespace cachecap {

enum class EntropyMethod { analytic, plugin_block, plugin_conditional };

inline const char* to_string(EntropyMethod m) {
    switch (m) {
        case EntropyMethod::analytic: return "analytic";
        case EntropyMethod::plugin_block: return "plug-in block";
        case EntropyMethod::plugin_conditional: return "plug-in conditional";
    }
    return "?";
}

struct EntropyEstimate {
    std::optional<unsigned> order;  // none: entropy rate (limit order)
    double value = 0.0;             // bits per symbol
    EntropyMethod method = EntropyMethod::analytic;
};

namespace detail {

// -p log2 p with 0 log 0 = 0.
inline double plogp(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

inline double entropy_of(std::span<const double> p) {
    double h = 0.0;
    for (double v : p) h += plogp(v);
    return h;
}

}  // namespace detail

struct ClassMass {
    double mass = 0.0;
    std::uint64_t count = 1;
};

/// Entropy of one draw when class c has mass m_c spread evenly over its
/// count_c files: -sum_c m_c log2(m_c / count_c).
inline EntropyEstimate iid_entropy(std::span<const ClassMass> classes) {
    std::vector<double> p;
    for (const auto& c : classes) {
        if (c.count == 0) throw input_error("i.i.d. entropy: class with zero count");
        p.push_back(c.mass);
    }
    detail::check_distribution(p, "i.i.d. distribution");
    double h = 0.0;
    for (const auto& c : classes) {
        if (c.mass > 0.0) h += -c.mass * (std::log2(c.mass) - std::log2(static_cast<double>(c.count)));
    }
    return {0u, std::max(0.0, h), EntropyMethod::analytic};
}

inline EntropyEstimate iid_entropy(std::span<const double> probabilities) {
    std::vector<ClassMass> cm;
    for (double p : probabilities) cm.push_back({p, 1});
    return iid_entropy(cm);
}

inline bool is_irreducible(const std::vector<std::vector<double>>& p) {
    const std::size_t n = p.size();
    if (n == 0) return false;
    auto reaches_all = [&](bool reverse) {
        std::vector<char> seen(n, 0);
        std::vector<std::size_t> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            const auto i = stack.back();
            stack.pop_back();
            for (std::size_t j = 0; j < n; ++j) {
                const double w = reverse ? p[j][i] : p[i][j];
                if (w > 0.0 && !seen[j]) {
                    seen[j] = 1;
                    stack.push_back(j);
                }
            }
        }
        return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
    };
    return reaches_all(false) && reaches_all(true);
}

/// Stationary distribution pi = pi P of an irreducible chain.
inline std::vector<double> stationary_distribution(const std::vector<std::vector<double>>& p) {
    const auto n = static_cast<Eigen::Index>(p.size());
    if (!is_irreducible(p)) throw input_error("Markov chain is reducible; its entropy rate is not defined here");
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = p[j][i] - (i == j ? 1.0 : 0.0);
    a.row(n - 1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b(n - 1) = 1.0;
    Eigen::VectorXd pi = a.fullPivLu().solve(b);

    std::vector<double> out(p.size());
    for (Eigen::Index i = 0; i < n; ++i) out[i] = std::max(0.0, pi(i));
    double worst = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) s += out[i] * p[i][j];
        worst = std::max(worst, std::abs(s - out[j]));
    }
    if (worst > 1e-12) throw computation_error("stationary distribution did not converge (residual " +
                                               detail::num(worst) + ")");
    return out;
}

/// Entropy rate -sum_i pi_i sum_j P_ij log2 P_ij (bits per transition).
inline EntropyEstimate markov_entropy_rate(const MarkovSource& m) {
    validate(m);
    const auto pi = stationary_distribution(m.transition);
    double h = 0.0;
    for (std::size_t i = 0; i < pi.size(); ++i) h += pi[i] * detail::entropy_of(m.transition[i]);
    return {std::nullopt, std::max(0.0, h), EntropyMethod::analytic};
}

namespace detail {

struct BlockKeyHash {
    std::size_t operator()(const std::vector<std::uint32_t>& v) const noexcept {
        std::uint64_t h = 1469598103934665603ull;
        for (auto x : v) h = (h ^ x) * 1099511628211ull;
        return static_cast<std::size_t>(h);
    }
};

using BlockCounts = std::unordered_map<std::vector<std::uint32_t>, std::uint64_t, BlockKeyHash>;

inline std::vector<std::uint32_t> intern(std::span<const std::string> trace, std::size_t& alphabet) {
    std::unordered_map<std::string, std::uint32_t> ids;
    std::vector<std::uint32_t> out;
    out.reserve(trace.size());
    for (const auto& s : trace) {
        auto [it, inserted] = ids.try_emplace(s, static_cast<std::uint32_t>(ids.size()));
        out.push_back(it->second);
    }
    alphabet = ids.size();
    return out;
}

inline BlockCounts count_blocks(std::span<const std::uint32_t> seq, std::size_t len) {
    BlockCounts counts;
    if (seq.size() < len) return counts;
    std::vector<std::uint32_t> key(len);
    for (std::size_t i = 0; i + len <= seq.size(); ++i) {
        std::copy(seq.begin() + static_cast<std::ptrdiff_t>(i),
                  seq.begin() + static_cast<std::ptrdiff_t>(i + len), key.begin());
        ++counts[key];
    }
    return counts;
}

inline void check_sample_size(std::size_t length, std::size_t alphabet, unsigned order, bool force) {
    if (length == 0) throw input_error("entropy estimate of an empty trace");
    if (length < order + 1u) throw input_error("trace is shorter than one block");
    if (force) return;
    const double needed = 10.0 * std::pow(static_cast<double>(alphabet), order + 1.0);
    if (static_cast<double>(length) < needed)
        throw input_error("trace too short for order " + std::to_string(order) + ": length " +
                          std::to_string(length) + " < 10*|A|^(n+1) = " + detail::num(needed) +
                          " (use force to override)");
}

}  // namespace detail

/// Plug-in estimate of h_n = H(X_1..X_{n+1}) / (n+1) from overlapping
/// (n+1)-blocks of the trace.
inline EntropyEstimate block_entropy_estimate(std::span<const std::string> trace, int order,
                                              bool force = false) {
    if (order < 0) throw input_error("entropy order must be >= 0");
    const auto n = static_cast<unsigned>(order);
    std::size_t alphabet = 0;
    const auto seq = detail::intern(trace, alphabet);
    detail::check_sample_size(seq.size(), alphabet, n, force);
    const auto counts = detail::count_blocks(seq, n + 1);
    const double blocks = static_cast<double>(seq.size() - n);
    double h = 0.0;
    for (const auto& [key, c] : counts) h += detail::plogp(static_cast<double>(c) / blocks);
    h /= static_cast<double>(n + 1);
    return {n, std::clamp(h, 0.0, std::log2(static_cast<double>(alphabet))), EntropyMethod::plugin_block};
}

/// Plug-in estimate of H(X_{k+1} | X_1..X_k); contexts are counted from the
/// same (k+1)-blocks, so the value lies in [0, log2 |A|].
inline EntropyEstimate conditional_entropy_estimate(std::span<const std::string> trace, int order,
                                                    bool force = false) {
    if (order < 0) throw input_error("entropy order must be >= 0");
    const auto k = static_cast<unsigned>(order);
    std::size_t alphabet = 0;
    const auto seq = detail::intern(trace, alphabet);
    detail::check_sample_size(seq.size(), alphabet, k, force);
    const auto joint = detail::count_blocks(seq, k + 1);
    detail::BlockCounts context;
    for (const auto& [key, c] : joint) context[std::vector<std::uint32_t>(key.begin(), key.end() - 1)] += c;
    const double blocks = static_cast<double>(seq.size() - k);
    double h = 0.0;
    for (const auto& [key, c] : joint) {
        const auto ctx = context.at(std::vector<std::uint32_t>(key.begin(), key.end() - 1));
        h -= static_cast<double>(c) / blocks * std::log2(static_cast<double>(c) / static_cast<double>(ctx));
    }
    return {k, std::clamp(h, 0.0, std::log2(static_cast<double>(alphabet))),
            EntropyMethod::plugin_conditional};
}

struct EfficiencyResult {
    std::string node;
    EntropyEstimate entropy;              // class-level estimate of the source
    double entropy_bits_per_file = 0.0;   // includes the uniform split inside classes
    double mean_read_time = 0.0;
    double efficiency_bits_per_time = 0.0;
    double capacity_bits_per_time = 0.0;
    std::optional<double> utilization_ratio;  // efficiency / capacity when capacity > 0
};

namespace detail {

// Per-class marginal of the first symbol, with the class-level entropy.
struct SourceSummary {
    std::vector<std::pair<std::string, double>> marginal;
    EntropyEstimate entropy;
    bool file_level = false;  // entropy already accounts for class counts
};

inline SourceSummary summarize(const Network& net, const EffectiveCatalog&, const IidSource& s) {
    validate(s);
    SourceSummary out;
    std::vector<ClassMass> masses;
    for (std::size_t i = 0; i < s.classes.size(); ++i) {
        const auto* fc = net.find_class(s.classes[i]);
        if (!fc) throw input_error("source refers to unknown class '" + s.classes[i] + "'");
        out.marginal.emplace_back(s.classes[i], s.probabilities[i]);
        masses.push_back({s.probabilities[i], fc->count});
    }
    out.entropy = iid_entropy(masses);
    out.file_level = true;
    return out;
}

inline SourceSummary summarize(const Network& net, const EffectiveCatalog&, const MarkovSource& m) {
    SourceSummary out;
    out.entropy = markov_entropy_rate(m);
    const auto pi = stationary_distribution(m.transition);
    for (std::size_t i = 0; i < m.states.size(); ++i) {
        if (!net.find_class(m.states[i])) throw input_error("source refers to unknown class '" + m.states[i] + "'");
        out.marginal.emplace_back(m.states[i], pi[i]);
    }
    return out;
}

inline SourceSummary summarize(const Network& net, const EffectiveCatalog&, const EmpiricalSource& e) {
    SourceSummary out;
    for (const auto& s : e.trace.symbols)
        if (!net.find_class(s)) throw input_error("trace contains unknown class '" + s + "'");
    const auto order = static_cast<int>(e.order);
    out.entropy = e.estimator == EmpiricalEstimator::conditional
                      ? conditional_entropy_estimate(e.trace.symbols, order, e.force)
                      : block_entropy_estimate(e.trace.symbols, order, e.force);
    const auto dist = empirical_distribution(e.trace);
    for (const auto& [id, c] : dist.counts) out.marginal.emplace_back(id, dist.probability(id));
    return out;
}

}  // namespace detail

/// Entropy efficiency of `node` under `src`: entropy per file over the mean
/// read time of one file, with the node capacity attached for comparison.
inline EfficiencyResult entropy_efficiency(const Network& net, const std::string& node_id, const AccessSource& src,
                                           double rel_tol = kDefaultRelTol) {
    const auto cat = effective_catalog(net, node_id);
    const auto summary = std::visit([&](const auto& s) { return detail::summarize(net, cat, s); }, src);

    EfficiencyResult r;
    r.node = node_id;
    r.entropy = summary.entropy;
    double within_class = 0.0;
    for (const auto& [cid, p] : summary.marginal) {
        if (p <= 0.0) continue;
        auto it = cat.entries.find(cid);
        if (it == cat.entries.end())
            throw input_error("source assigns probability to class '" + cid + "', unreachable from node '" +
                              node_id + "'");
        r.mean_read_time += p * it->second.min_time;
        within_class += p * std::log2(static_cast<double>(it->second.count));
    }
    if (!(r.mean_read_time > 0.0)) throw computation_error("mean read time is zero");
    r.entropy_bits_per_file = summary.file_level ? summary.entropy.value : summary.entropy.value + within_class;
    r.efficiency_bits_per_time = r.entropy_bits_per_file / r.mean_read_time;
    r.capacity_bits_per_time = node_capacity(net, node_id, rel_tol);
    if (r.capacity_bits_per_time > 0.0) r.utilization_ratio = r.efficiency_bits_per_time / r.capacity_bits_per_time;
    return r;
}

/// Source that draws files i.i.d. from the capacity-achieving distribution.
inline IidSource optimal_source(const OptimalDistribution& d) {
    IidSource s;
    for (const auto& [id, c] : d.classes) {
        s.classes.push_back(id);
        s.probabilities.push_back(c.mass);
    }
    return s;
}

struct NetworkEfficiency {
    std::map<std::string, EfficiencyResult> per_node;
    double total = 0.0;
};

/// Sum of node efficiencies; nodes without a source contribute nothing.
inline NetworkEfficiency network_entropy_efficiency(const Network& net,
                                                    const std::map<std::string, AccessSource>& sources,
                                                    double rel_tol = kDefaultRelTol) {
    NetworkEfficiency out;
    for (const auto& [node_id, src] : sources) {
        auto r = entropy_efficiency(net, node_id, src, rel_tol);
        out.total += r.efficiency_bits_per_time;
        out.per_node.emplace(node_id, std::move(r));
    }
    return out;
}

}  // namespace cachecap
