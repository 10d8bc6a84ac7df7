#pragma once

/// Caching capacity of nodes and networks.
///
/// A node whose reachable files have minimal read times tau(f) has capacity
/// log2(X0) bits per time unit, where X0 is the largest real root of
///
///     sum_f X^(-tau(f)) = 1.
///
/// The left-hand side is strictly decreasing on [1, inf) whenever it has at
/// least one term, so the root is unique there and bisection finds it. The
/// network capacity is the plain sum of node capacities.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cachecap/errors.hpp"
#include "cachecap/network.hpp"

namespace cachecap {

inline constexpr double kDefaultRelTol = 1e-12;
inline constexpr int kMaxBisectionIterations = 200;

struct CharTerm {
    std::uint64_t count = 1;
    double tau = 1.0;
};

/// Left-hand side of the characteristic equation, one term per reachable class.
struct CharEquation {
    std::vector<CharTerm> terms;

    static CharEquation from_catalog(const EffectiveCatalog& cat) {
        CharEquation eq;
        for (const auto& [id, e] : cat.entries) eq.terms.push_back({e.count, e.min_time});
        return eq;
    }

    std::uint64_t total_files() const {
        std::uint64_t n = 0;
        for (const auto& t : terms) n += t.count;
        return n;
    }
};

/// sum count * x^(-tau). For x >= 1 each power is at most 1, so the
/// product with a 64-bit count cannot overflow.
inline double char_eq_value(const CharEquation& eq, double x) {
    if (!(x >= 1.0)) throw input_error("characteristic equation is evaluated only for x >= 1");
    const double lx = std::log2(x);
    double sum = 0.0;
    for (const auto& t : eq.terms) sum += static_cast<double>(t.count) * std::exp2(-t.tau * lx);
    return sum;
}

struct SolveResult {
    std::optional<double> x0;  // none: the equation has no terms
    int iterations = 0;
    double residual = 0.0;  // |lhs(x0) - 1|
};

/// Bisection on [lo, hi]: lo starts at 1, hi doubles from 2 until the
/// left-hand side drops below 1, then the bracket is halved until its
/// width is at most rel_tol * hi.
inline SolveResult solve_characteristic_detail(const CharEquation& eq, double rel_tol = kDefaultRelTol) {
    if (!(rel_tol > 0.0) || !std::isfinite(rel_tol))
        throw input_error("solver tolerance must be positive and finite");
    for (const auto& t : eq.terms) {
        if (t.count == 0) throw input_error("characteristic term with zero count");
        if (!(t.tau > 0.0) || !std::isfinite(t.tau))
            throw input_error("characteristic term with non-positive or non-finite time");
    }

    SolveResult r;
    const auto files = eq.total_files();
    if (files == 0) return r;
    if (files == 1) {
        r.x0 = 1.0;
        return r;
    }

    double lo = 1.0;
    double hi = 2.0;
    while (char_eq_value(eq, hi) >= 1.0) {
        lo = hi;
        hi *= 2.0;
        if (!std::isfinite(hi)) throw computation_error("could not bracket the characteristic root");
    }

    int it = 0;
    while (hi - lo > rel_tol * hi) {
        if (++it > kMaxBisectionIterations)
            throw computation_error("bisection did not reach relative width " + detail::num(rel_tol) +
                                    " within " + std::to_string(kMaxBisectionIterations) + " iterations");
        const double mid = lo + 0.5 * (hi - lo);
        if (char_eq_value(eq, mid) >= 1.0)
            lo = mid;
        else
            hi = mid;
    }
    const double x0 = lo + 0.5 * (hi - lo);
    r.x0 = x0;
    r.iterations = it;
    r.residual = std::abs(char_eq_value(eq, x0) - 1.0);
    return r;
}

inline std::optional<double> solve_characteristic(const CharEquation& eq, double rel_tol = kDefaultRelTol) {
    return solve_characteristic_detail(eq, rel_tol).x0;
}

struct NodeCapacity {
    std::optional<double> x0;
    double capacity = 0.0;  // bits per time unit
    int iterations = 0;
    double residual = 0.0;
};

struct CapacityResult {
    std::map<std::string, NodeCapacity> per_node;
    double network_capacity = 0.0;
};

inline NodeCapacity node_capacity_detail(const Network& net, const std::string& node_id,
                                         double rel_tol = kDefaultRelTol) {
    const auto eq = CharEquation::from_catalog(effective_catalog(net, node_id));
    const auto s = solve_characteristic_detail(eq, rel_tol);
    NodeCapacity nc;
    nc.x0 = s.x0;
    nc.capacity = s.x0 ? std::log2(*s.x0) : 0.0;
    nc.iterations = s.iterations;
    nc.residual = s.residual;
    return nc;
}

inline double node_capacity(const Network& net, const std::string& node_id, double rel_tol = kDefaultRelTol) {
    return node_capacity_detail(net, node_id, rel_tol).capacity;
}

inline CapacityResult capacity_report(const Network& net, double rel_tol = kDefaultRelTol) {
    CapacityResult r;
    for (const auto& id : net.sorted_node_ids()) {
        auto nc = node_capacity_detail(net, id, rel_tol);
        r.network_capacity += nc.capacity;
        r.per_node.emplace(id, nc);
    }
    return r;
}

inline double network_capacity(const Network& net, double rel_tol = kDefaultRelTol) {
    return capacity_report(net, rel_tol).network_capacity;
}

struct ClassProbability {
    std::uint64_t count = 1;
    double tau = 1.0;
    double per_file = 0.0;  // X0^(-tau)
    double mass = 0.0;      // count * per_file
};

/// The i.i.d. access distribution that attains the node capacity.
struct OptimalDistribution {
    std::string node;
    double x0 = 1.0;
    std::map<std::string, ClassProbability> classes;

    double total_mass() const {
        double s = 0.0;
        for (const auto& [id, c] : classes) s += c.mass;
        return s;
    }
};

inline OptimalDistribution optimal_distribution(const Network& net, const std::string& node_id,
                                                double rel_tol = kDefaultRelTol) {
    const auto cat = effective_catalog(net, node_id);
    const auto x0 = solve_characteristic(CharEquation::from_catalog(cat), rel_tol);
    if (!x0 || *x0 <= 1.0)
        throw input_error("node '" + node_id + "' has zero capacity; no capacity-achieving distribution exists");
    OptimalDistribution d;
    d.node = node_id;
    d.x0 = *x0;
    const double lx = std::log2(*x0);
    for (const auto& [id, e] : cat.entries) {
        ClassProbability p;
        p.count = e.count;
        p.tau = e.min_time;
        p.per_file = std::exp2(-e.min_time * lx);
        p.mass = static_cast<double>(e.count) * p.per_file;
        d.classes.emplace(id, p);
    }
    return d;
}

}  // namespace cachecap
