#pragma once

/// Network model: nodes storing file classes, directed read links with
/// per-file transfer times, and the per-node minimal read time of every
/// reachable class.
///
/// A file class groups interchangeable files that share storage location
/// and read time, so catalogs with millions of files stay small. A missing
/// (reader, provider) link means the reader cannot obtain the provider's
/// files at all; there is no "infinite time" sentinel anywhere.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cachecap/errors.hpp"

namespace cachecap {

struct FileClass {
    std::string id;
    std::uint64_t count = 1;  // number of distinct files in the class
};

struct Node {
    std::string id;
    std::vector<std::string> stores;  // class ids
};

struct Link {
    std::string reader;
    std::string provider;
    double time = 1.0;  // time units per file
    // Restricts the link to a subset of the provider's classes; when absent
    // the link carries everything the provider stores.
    std::optional<std::vector<std::string>> classes;
};

/// Validated, immutable network. Construct through `Network::build`.
class Network {
public:
    Network() = default;

    static Network build(std::vector<FileClass> classes, std::vector<Node> nodes,
                         std::vector<Link> links);

    const std::vector<FileClass>& classes() const noexcept { return classes_; }
    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    const std::vector<Link>& links() const noexcept { return links_; }

    const FileClass* find_class(const std::string& id) const {
        auto it = class_index_.find(id);
        return it == class_index_.end() ? nullptr : &classes_[it->second];
    }

    const Node* find_node(const std::string& id) const {
        auto it = node_index_.find(id);
        return it == node_index_.end() ? nullptr : &nodes_[it->second];
    }

    const Node& node(const std::string& id) const {
        if (const Node* n = find_node(id)) return *n;
        throw input_error("unknown node '" + id + "'");
    }

    bool stores(const std::string& node_id, const std::string& class_id) const {
        auto it = stored_.find(node_id);
        return it != stored_.end() && it->second.count(class_id) != 0;
    }

    /// Node ids in lexicographic order; every report iterates in this order.
    std::vector<std::string> sorted_node_ids() const {
        std::vector<std::string> ids;
        ids.reserve(nodes_.size());
        for (const auto& [id, idx] : node_index_) ids.push_back(id);
        return ids;
    }

private:
    std::vector<FileClass> classes_;
    std::vector<Node> nodes_;
    std::vector<Link> links_;
    std::map<std::string, std::size_t> class_index_;
    std::map<std::string, std::size_t> node_index_;
    std::map<std::string, std::set<std::string>> stored_;
};

inline Network Network::build(std::vector<FileClass> classes, std::vector<Node> nodes,
                              std::vector<Link> links) {
    Network net;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        const auto& c = classes[i];
        if (c.id.empty()) throw input_error("class #" + std::to_string(i) + " has an empty id");
        if (c.count == 0) throw input_error("class '" + c.id + "' has zero-count (count must be >= 1)");
        if (!net.class_index_.emplace(c.id, i).second)
            throw input_error("duplicate class id '" + c.id + "'");
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& n = nodes[i];
        if (n.id.empty()) throw input_error("node #" + std::to_string(i) + " has an empty id");
        if (!net.node_index_.emplace(n.id, i).second)
            throw input_error("duplicate node id '" + n.id + "'");
        auto& held = net.stored_[n.id];
        for (const auto& cid : n.stores) {
            if (!net.class_index_.count(cid))
                throw input_error("node '" + n.id + "' stores unknown class '" + cid + "'");
            if (!held.insert(cid).second)
                throw input_error("node '" + n.id + "' lists class '" + cid + "' twice (duplicate)");
        }
    }
    for (std::size_t i = 0; i < links.size(); ++i) {
        const auto& l = links[i];
        const std::string name = "link #" + std::to_string(i) + " (" + l.reader + " -> " + l.provider + ")";
        if (!net.node_index_.count(l.reader))
            throw input_error(name + " references unknown reader node '" + l.reader + "'");
        if (!net.node_index_.count(l.provider))
            throw input_error(name + " references unknown provider node '" + l.provider + "'");
        if (!std::isfinite(l.time)) throw input_error(name + " has a non-finite time");
        if (l.time <= 0.0) throw input_error(name + " has non-positive time " + detail::num(l.time));
        if (l.classes) {
            std::set<std::string> seen;
            for (const auto& cid : *l.classes) {
                if (!net.class_index_.count(cid))
                    throw input_error(name + " references unknown class '" + cid + "'");
                if (!net.stored_[l.provider].count(cid))
                    throw input_error(name + " carries class '" + cid + "' not stored by provider '" +
                                      l.provider + "'");
                if (!seen.insert(cid).second)
                    throw input_error(name + " lists class '" + cid + "' twice (duplicate)");
            }
        }
    }
    net.classes_ = std::move(classes);
    net.nodes_ = std::move(nodes);
    net.links_ = std::move(links);
    return net;
}

struct CatalogEntry {
    double min_time = 0.0;
    std::string provider;
    std::uint64_t count = 1;  // copied from the class for convenience
};

/// Minimal read time of every class reachable by one node.
struct EffectiveCatalog {
    std::string node;
    std::map<std::string, CatalogEntry> entries;  // unreachable classes omitted

    bool empty() const noexcept { return entries.empty(); }

    const CatalogEntry& at(const std::string& class_id) const {
        auto it = entries.find(class_id);
        if (it == entries.end())
            throw input_error("class '" + class_id + "' is unreachable from node '" + node + "'");
        return it->second;
    }

    std::uint64_t total_files() const {
        std::uint64_t n = 0;
        for (const auto& [id, e] : entries) n += e.count;
        return n;
    }
};

/// Minimum over all providers of the link time, per class. Equal times
/// resolve to the lexicographically smallest provider id.
inline EffectiveCatalog effective_catalog(const Network& net, const std::string& node_id) {
    net.node(node_id);  // throws on unknown node
    EffectiveCatalog cat;
    cat.node = node_id;

    auto offer = [&](const std::string& cid, double t, const std::string& provider) {
        auto [it, inserted] = cat.entries.try_emplace(cid);
        auto& e = it->second;
        if (inserted || t < e.min_time || (t == e.min_time && provider < e.provider)) {
            e.min_time = t;
            e.provider = provider;
            e.count = net.find_class(cid)->count;
        }
    };

    for (const auto& link : net.links()) {
        if (link.reader != node_id) continue;
        if (link.classes) {
            for (const auto& cid : *link.classes) offer(cid, link.time, link.provider);
        } else {
            for (const auto& cid : net.node(link.provider).stores) offer(cid, link.time, link.provider);
        }
    }
    return cat;
}

/// Execution time of a task: sum of the per-file minimal read times.
inline double task_time(const EffectiveCatalog& catalog, std::span<const std::string> task) {
    double total = 0.0;
    for (const auto& cid : task) total += catalog.at(cid).min_time;
    return total;
}

/// Copy of `net` with every link time multiplied by `factor`.
inline Network scale_times(const Network& net, double factor) {
    if (!(factor > 0.0) || !std::isfinite(factor))
        throw input_error("time scale factor must be positive and finite");
    auto links = net.links();
    for (auto& l : links) l.time *= factor;
    return Network::build(net.classes(), net.nodes(), std::move(links));
}

}  // namespace cachecap
