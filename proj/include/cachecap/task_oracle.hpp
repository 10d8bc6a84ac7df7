#pragma once

/// Brute-force check of node capacity by counting tasks.
///
/// With read times on a common grid, the number of file sequences whose
/// total time is exactly T grid steps obeys
///
///     nu(0) = 1,   nu(T) = sum_c count_c * nu(T - tau_c),
///
/// and log2(nu(T)) / T approaches the capacity. Counts are exact big
/// integers; this module never touches the characteristic equation.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "cachecap/errors.hpp"
#include "cachecap/network.hpp"

namespace cachecap {

using BigInt = boost::multiprecision::cpp_int;

struct QuantizedTerm {
    std::string class_id;
    std::uint64_t count = 1;
    std::uint64_t tau_int = 1;
};

struct QuantizedCatalog {
    std::vector<QuantizedTerm> terms;
    double grid = 1.0;
    std::uint64_t gcd = 0;  // of all tau_int; 0 when there are no terms

    std::uint64_t max_tau() const {
        std::uint64_t m = 0;
        for (const auto& t : terms) m = std::max(m, t.tau_int);
        return m;
    }
};

inline constexpr double kGridRelTol = 1e-9;

/// Express every min time as an integer number of grid steps. Fails, naming
/// the class, if a time is not an integer multiple of the grid.
inline QuantizedCatalog quantize(const EffectiveCatalog& cat, double grid) {
    if (!(grid > 0.0) || !std::isfinite(grid)) throw input_error("grid must be positive and finite");
    QuantizedCatalog q;
    q.grid = grid;
    for (const auto& [id, e] : cat.entries) {
        const double steps = e.min_time / grid;
        const double rounded = std::round(steps);
        if (rounded < 1.0 || std::abs(steps - rounded) > kGridRelTol * std::max(1.0, rounded))
            throw input_error("time " + detail::num(e.min_time) + " of class '" + id +
                              "' is not an integer multiple of grid " + detail::num(grid));
        if (rounded > 1e15) throw input_error("class '" + id + "' needs too many grid steps");
        const auto tau = static_cast<std::uint64_t>(rounded);
        q.terms.push_back({id, e.count, tau});
        q.gcd = std::gcd(q.gcd, tau);
    }
    return q;
}

namespace detail {

struct Fraction {
    std::uint64_t num;
    std::uint64_t den;
};

// Continued-fraction convergents of x until one is within rel_tol of x.
inline std::optional<Fraction> rational_form(double x, std::uint64_t max_den, double rel_tol) {
    std::uint64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double rest = x;
    for (int i = 0; i < 64; ++i) {
        const double a_d = std::floor(rest);
        if (a_d > 1e18) return std::nullopt;
        const auto a = static_cast<std::uint64_t>(a_d);
        if (q1 > 0 && a > max_den) return std::nullopt;
        const std::uint64_t p2 = a * p1 + p0;
        const std::uint64_t q2 = a * q1 + q0;
        if (q2 > max_den) return std::nullopt;
        if (std::abs(x - static_cast<double>(p2) / static_cast<double>(q2)) <= rel_tol * x)
            return Fraction{p2, q2};
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        const double frac = rest - a_d;
        if (frac <= 0.0) return std::nullopt;
        rest = 1.0 / frac;
    }
    return std::nullopt;
}

}  // namespace detail

/// Largest grid on which every min time of `cat` is an integer, allowing
/// times that are rationals with denominator up to `max_den`. The bound is
/// kept small: with large denominators every real has a convergent within
/// tolerance, and the resulting grids would need millions of DP steps.
inline double infer_grid(const EffectiveCatalog& cat, std::uint64_t max_den = 10'000) {
    if (cat.empty()) return 1.0;
    std::vector<detail::Fraction> fr;
    BigInt lcm = 1;
    for (const auto& [id, e] : cat.entries) {
        auto f = detail::rational_form(e.min_time, max_den, kGridRelTol);
        if (!f)
            throw input_error("time " + detail::num(e.min_time) + " of class '" + id +
                              "' has no rational form with denominator <= " + std::to_string(max_den) +
                              "; pass an explicit grid");
        fr.push_back(*f);
        lcm = boost::multiprecision::lcm(lcm, BigInt(f->den));
    }
    BigInt g = 0;
    for (const auto& f : fr) g = boost::multiprecision::gcd(g, BigInt(f.num) * (lcm / f.den));
    return g.convert_to<double>() / lcm.convert_to<double>();
}

/// nu(0), ..., nu(t_max).
inline std::vector<BigInt> count_series(const QuantizedCatalog& q, std::uint64_t t_max) {
    std::vector<BigInt> nu(t_max + 1);
    nu[0] = 1;
    for (std::uint64_t t = 1; t <= t_max; ++t) {
        BigInt acc = 0;
        for (const auto& term : q.terms) {
            if (term.tau_int <= t) acc += nu[t - term.tau_int] * term.count;
        }
        nu[t] = std::move(acc);
    }
    return nu;
}

/// Number of tasks (file sequences, files within a class distinct) whose
/// quantized execution time is exactly `t`.
inline BigInt count_tasks(const QuantizedCatalog& q, std::uint64_t t) { return count_series(q, t)[t]; }

/// log2 of a positive big integer, accurate to double precision.
inline double log2_big(const BigInt& n) {
    if (n <= 0) throw input_error("log2 of a non-positive integer");
    const auto msb = boost::multiprecision::msb(n);
    if (msb < 63) return std::log2(n.convert_to<double>());
    const auto shift = static_cast<unsigned>(msb - 62);
    const BigInt top = n >> shift;
    return std::log2(top.convert_to<double>()) + static_cast<double>(shift);
}

struct OraclePoint {
    std::uint64_t t = 0;  // grid steps
    BigInt nu;
    double rate = 0.0;  // log2(nu) / (t * grid), bits per time unit
};

struct OracleReport {
    std::vector<OraclePoint> series;
    double grid = 1.0;
    std::uint64_t gcd = 0;
    double solver_capacity = 0.0;
    double final_gap = 0.0;
    std::uint64_t final_t = 0;
};

/// Rates at every achievable T <= t_max that is a multiple of the lattice
/// gcd, plus the gap between the last rate and log2(solver_x0).
inline OracleReport convergence_report(const QuantizedCatalog& q, std::uint64_t t_max,
                                       std::optional<double> solver_x0) {
    if (q.terms.empty()) throw input_error("catalog has no reachable classes; nothing to count");
    if (t_max < q.max_tau())
        throw input_error("T_max " + std::to_string(t_max) + " is below the largest quantized time " +
                          std::to_string(q.max_tau()));
    OracleReport r;
    r.grid = q.grid;
    r.gcd = q.gcd;
    r.solver_capacity = solver_x0 && *solver_x0 > 1.0 ? std::log2(*solver_x0) : 0.0;

    const auto nu = count_series(q, t_max);
    for (std::uint64_t t = q.gcd; t <= t_max; t += q.gcd) {
        if (nu[t] == 0) continue;
        r.series.push_back({t, nu[t], log2_big(nu[t]) / (static_cast<double>(t) * q.grid)});
    }
    if (!r.series.empty()) {
        r.final_t = r.series.back().t;
        r.final_gap = std::abs(r.series.back().rate - r.solver_capacity);
    }
    return r;
}

}  // namespace cachecap
