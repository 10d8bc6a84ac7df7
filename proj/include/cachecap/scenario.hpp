#pragma once

// Scenario documents: JSON with top-level `classes`, `nodes` and `links`.
//
//   {
//     "classes": [{"id": "lib", "count": 10000000}, {"id": "own", "count": 10}],
//     "nodes":   [{"id": "w1", "stores": ["lib"]}, {"id": "w2", "stores": ["own"]}],
//     "links":   [{"reader": "w2", "provider": "w2", "time": 1},
//                 {"reader": "w2", "provider": "w1", "time": 10, "classes": ["lib"]}]
//   }

#include <cmath>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include <json.hpp>

#include "cachecap/errors.hpp"
#include "cachecap/network.hpp"

namespace cachecap {

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj, std::initializer_list<const char*> allowed,
                                const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw input_error(where + ": unknown field '" + key + "'");
    }
}

inline const nlohmann::json& require(const nlohmann::json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw input_error(where + ": missing field '" + key + "'");
    return *it;
}

inline std::string require_string(const nlohmann::json& obj, const char* key, const std::string& where) {
    const auto& v = require(obj, key, where);
    if (!v.is_string()) throw input_error(where + ": field '" + key + "' must be a string");
    return v.get<std::string>();
}

inline std::vector<std::string> string_array(const nlohmann::json& v, const std::string& where) {
    if (!v.is_array()) throw input_error(where + " must be an array of strings");
    std::vector<std::string> out;
    for (const auto& s : v) {
        if (!s.is_string()) throw input_error(where + " must be an array of strings");
        out.push_back(s.get<std::string>());
    }
    return out;
}

inline std::uint64_t positive_count(const nlohmann::json& v, const std::string& where) {
    if (v.is_number_integer()) {
        if (!v.is_number_unsigned() && v.get<std::int64_t>() < 0) throw input_error(where + " has a negative count");
        auto n = v.get<std::uint64_t>();
        if (n == 0) throw input_error(where + " has zero-count (count must be >= 1)");
        return n;
    }
    if (v.is_number_float()) {
        double d = v.get<double>();
        if (d >= 1.0 && d < 9.2e18 && std::floor(d) == d) return static_cast<std::uint64_t>(d);
        if (d == 0.0) throw input_error(where + " has zero-count (count must be >= 1)");
    }
    throw input_error(where + ": count must be a positive integer");
}

}  // namespace detail

inline Network network_from_json(const nlohmann::json& doc) {
    using namespace detail;
    if (!doc.is_object()) throw input_error("scenario must be a JSON object");
    reject_unknown_keys(doc, {"classes", "nodes", "links"}, "scenario");

    std::vector<FileClass> classes;
    std::vector<Node> nodes;
    std::vector<Link> links;

    const auto& jc = require(doc, "classes", "scenario");
    if (!jc.is_array()) throw input_error("scenario: 'classes' must be an array");
    for (std::size_t i = 0; i < jc.size(); ++i) {
        const std::string where = "classes[" + std::to_string(i) + "]";
        const auto& c = jc[i];
        if (!c.is_object()) throw input_error(where + " must be an object");
        reject_unknown_keys(c, {"id", "count"}, where);
        FileClass fc;
        fc.id = require_string(c, "id", where);
        fc.count = positive_count(require(c, "count", where), "class '" + fc.id + "'");
        classes.push_back(std::move(fc));
    }

    const auto& jn = require(doc, "nodes", "scenario");
    if (!jn.is_array()) throw input_error("scenario: 'nodes' must be an array");
    for (std::size_t i = 0; i < jn.size(); ++i) {
        const std::string where = "nodes[" + std::to_string(i) + "]";
        const auto& n = jn[i];
        if (!n.is_object()) throw input_error(where + " must be an object");
        reject_unknown_keys(n, {"id", "stores"}, where);
        Node node;
        node.id = require_string(n, "id", where);
        if (auto it = n.find("stores"); it != n.end())
            node.stores = string_array(*it, "node '" + node.id + "' stores");
        nodes.push_back(std::move(node));
    }

    const auto& jl = require(doc, "links", "scenario");
    if (!jl.is_array()) throw input_error("scenario: 'links' must be an array");
    for (std::size_t i = 0; i < jl.size(); ++i) {
        const std::string where = "links[" + std::to_string(i) + "]";
        const auto& l = jl[i];
        if (!l.is_object()) throw input_error(where + " must be an object");
        reject_unknown_keys(l, {"reader", "provider", "time", "classes"}, where);
        Link link;
        link.reader = require_string(l, "reader", where);
        link.provider = require_string(l, "provider", where);
        const auto& t = require(l, "time", where);
        if (!t.is_number()) throw input_error(where + ": 'time' must be a number");
        link.time = t.get<double>();
        if (auto it = l.find("classes"); it != l.end())
            link.classes = string_array(*it, where + " classes");
        links.push_back(std::move(link));
    }

    return Network::build(std::move(classes), std::move(nodes), std::move(links));
}

inline nlohmann::json network_to_json(const Network& net) {
    nlohmann::json doc{{"classes", nlohmann::json::array()},
                       {"nodes", nlohmann::json::array()},
                       {"links", nlohmann::json::array()}};
    for (const auto& c : net.classes()) doc["classes"].push_back({{"id", c.id}, {"count", c.count}});
    for (const auto& n : net.nodes()) doc["nodes"].push_back({{"id", n.id}, {"stores", n.stores}});
    for (const auto& l : net.links()) {
        nlohmann::json jl{{"reader", l.reader}, {"provider", l.provider}, {"time", l.time}};
        if (l.classes) jl["classes"] = *l.classes;
        doc["links"].push_back(std::move(jl));
    }
    return doc;
}

inline nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw input_error("'" + path + "' is not valid JSON: " + e.what());
    }
}

inline Network load_scenario(const std::string& path) { return network_from_json(read_json_file(path)); }

}  // namespace cachecap
