#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace cachecap {

// Malformed or inconsistent input: scenario documents, sources, traces,
// arguments that violate an operation's preconditions.
class input_error : public std::runtime_error {
public:
    explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

// A numeric procedure failed to produce a result (e.g. bisection did not
// converge within its iteration cap).
class computation_error : public std::runtime_error {
public:
    explicit computation_error(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

// Shortest-ish rendering for messages (std::to_string prints 1e-300 as 0.000000).
inline std::string num(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

}  // namespace detail

}  // namespace cachecap
