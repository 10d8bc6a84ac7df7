#pragma once

// Source spec documents:
//
//   {"type": "iid", "classes": ["a", "b"], "probabilities": [0.5, 0.5]}
//   {"type": "markov", "states": ["a", "b"],
//    "transitions": [[0.75, 0.25], [0.25, 0.75]], "initial": [1, 0]}
//
// A Markov source without "initial" starts from its stationary distribution.

#include <string>

#include <json.hpp>

#include "cachecap/access_source.hpp"
#include "cachecap/entropy.hpp"
#include "cachecap/errors.hpp"
#include "cachecap/scenario.hpp"

namespace cachecap {

namespace detail {

inline std::vector<double> number_array(const nlohmann::json& v, const std::string& where) {
    if (!v.is_array()) throw input_error(where + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw input_error(where + " must be an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

}  // namespace detail

using GenerativeSource = std::variant<IidSource, MarkovSource>;

inline GenerativeSource source_from_json(const nlohmann::json& doc) {
    using namespace detail;
    if (!doc.is_object()) throw input_error("source spec must be a JSON object");
    const auto type = require_string(doc, "type", "source spec");
    if (type == "iid") {
        reject_unknown_keys(doc, {"type", "classes", "probabilities"}, "iid source");
        IidSource s;
        s.classes = string_array(require(doc, "classes", "iid source"), "iid source classes");
        s.probabilities = number_array(require(doc, "probabilities", "iid source"), "iid source probabilities");
        validate(s);
        return s;
    }
    if (type == "markov") {
        reject_unknown_keys(doc, {"type", "states", "transitions", "initial"}, "markov source");
        MarkovSource m;
        m.states = string_array(require(doc, "states", "markov source"), "markov source states");
        const auto& rows = require(doc, "transitions", "markov source");
        if (!rows.is_array()) throw input_error("markov source transitions must be an array of rows");
        for (const auto& row : rows) m.transition.push_back(number_array(row, "markov transition row"));
        if (auto it = doc.find("initial"); it != doc.end()) {
            m.initial = number_array(*it, "markov initial distribution");
        } else {
            // uniform placeholder so validate() checks the matrix first
            m.initial.assign(m.states.size(), m.states.empty() ? 0.0 : 1.0 / static_cast<double>(m.states.size()));
            validate(m);
            m.initial = stationary_distribution(m.transition);
        }
        validate(m);
        return m;
    }
    throw input_error("unknown source type '" + type + "' (expected \"iid\" or \"markov\")");
}

inline GenerativeSource load_source(const std::string& path) { return source_from_json(read_json_file(path)); }

inline AccessSource to_access_source(const GenerativeSource& g) {
    return std::visit([](const auto& s) -> AccessSource { return s; }, g);
}

}  // namespace cachecap
