#pragma once

// Access processes over file classes: i.i.d., first-order Markov, or an
// observed trace. Within a class, files are accessed uniformly.

#include <cmath>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "cachecap/errors.hpp"

namespace cachecap {

inline constexpr double kProbabilityTol = 1e-9;

struct IidSource {
    std::vector<std::string> classes;
    std::vector<double> probabilities;  // per-class mass
};

struct MarkovSource {
    std::vector<std::string> states;             // class ids
    std::vector<std::vector<double>> transition;  // row-stochastic
    std::vector<double> initial;                  // distribution of the first symbol
};

/// Sequence of class ids plus a free-form provenance note.
struct Trace {
    std::vector<std::string> symbols;
    std::string provenance;

    std::size_t length() const noexcept { return symbols.size(); }
};

enum class EmpiricalEstimator {
    conditional,  // H(X_{k+1} | X_1..X_k) from (k+1)- and k-block frequencies
    block,        // H(X_1..X_{k+1}) / (k+1)
};

struct EmpiricalSource {
    Trace trace;
    unsigned order = 0;
    EmpiricalEstimator estimator = EmpiricalEstimator::conditional;
    bool force = false;  // skip the undersampling guard
};

using AccessSource = std::variant<IidSource, MarkovSource, EmpiricalSource>;

namespace detail {

inline void check_distribution(const std::vector<double>& p, const std::string& what) {
    if (p.empty()) throw input_error(what + " is empty");
    double s = 0.0;
    for (double v : p) {
        if (!std::isfinite(v) || v < 0.0) throw input_error(what + " has a negative or non-finite entry");
        s += v;
    }
    if (std::abs(s - 1.0) > kProbabilityTol)
        throw input_error(what + " sums to " + detail::num(s) + ", not 1");
}

inline void check_unique(const std::vector<std::string>& ids, const std::string& what) {
    for (std::size_t i = 0; i < ids.size(); ++i)
        for (std::size_t j = i + 1; j < ids.size(); ++j)
            if (ids[i] == ids[j]) throw input_error(what + " lists '" + ids[i] + "' twice");
}

}  // namespace detail

inline void validate(const IidSource& s) {
    if (s.classes.size() != s.probabilities.size())
        throw input_error("i.i.d. source: classes and probabilities differ in length");
    detail::check_unique(s.classes, "i.i.d. source");
    detail::check_distribution(s.probabilities, "i.i.d. source distribution");
}

inline void validate(const MarkovSource& m) {
    const auto n = m.states.size();
    if (n == 0) throw input_error("Markov source has no states");
    detail::check_unique(m.states, "Markov source");
    if (m.transition.size() != n) throw input_error("Markov transition matrix must be square");
    for (std::size_t i = 0; i < n; ++i) {
        if (m.transition[i].size() != n) throw input_error("Markov transition matrix must be square");
        detail::check_distribution(m.transition[i], "Markov transition row '" + m.states[i] + "'");
    }
    if (m.initial.size() != n) throw input_error("Markov initial distribution has the wrong length");
    detail::check_distribution(m.initial, "Markov initial distribution");
}

}  // namespace cachecap
