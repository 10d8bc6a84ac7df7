// Compares a few what-if variants of a small content network: a library
// server, two edge caches that also read from each other, and the effect of
// duplicating content across the caches or speeding up the peer link.

#include <cstdio>

#include "cachecap/cachecap.hpp"

using namespace cachecap;

namespace {

Network edge_network(bool shared_content, double peer_time) {
    std::vector<FileClass> classes{{"lib", 10'000'000}, {"own2", 10}, {"own3", 10}};
    const std::string own3 = shared_content ? "own2" : "own3";
    std::vector<Node> nodes{{"w1", {"lib"}}, {"w2", {"own2"}}, {"w3", {own3}}};
    std::vector<Link> links{
        {"w2", "w2", 1.0, {}}, {"w2", "w1", 10.0, {}}, {"w2", "w3", peer_time, {}},
        {"w3", "w3", 1.0, {}}, {"w3", "w1", 10.0, {}}, {"w3", "w2", peer_time, {}},
    };
    return Network::build(std::move(classes), std::move(nodes), std::move(links));
}

void report(const char* label, const Network& net) {
    const auto r = capacity_report(net);
    std::printf("%-28s", label);
    for (const auto& [id, nc] : r.per_node) std::printf("  %s=%.4f", id.c_str(), nc.capacity);
    std::printf("  network=%.4f\n", r.network_capacity);
}

}  // namespace

int main() {
    report("distinct content, peer 2", edge_network(false, 2.0));
    report("shared content, peer 2", edge_network(true, 2.0));
    report("distinct content, peer 1.5", edge_network(false, 1.5));

    const auto net = edge_network(false, 2.0);
    const auto best = optimal_distribution(net, "w2");
    const auto uniform = IidSource{{"lib", "own2", "own3"}, {1.0 / 3, 1.0 / 3, 1.0 / 3}};
    const auto eff = entropy_efficiency(net, "w2", uniform);
    std::printf("\nw2 optimal mix: ");
    for (const auto& [id, c] : best.classes) std::printf("%s %.6f  ", id.c_str(), c.mass);
    std::printf("\nw2 under a uniform class mix: efficiency %.4f of capacity %.4f (utilization %.3f)\n",
                eff.efficiency_bits_per_time, eff.capacity_bits_per_time, *eff.utilization_ratio);
}
