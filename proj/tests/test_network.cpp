#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "test_support.hpp"

using namespace cachecap;
using namespace cachecap::testing;

namespace {

Network library_user() { return load_scenario(scenario_path("library-user.json")); }

nlohmann::json base_doc() {
    return nlohmann::json::parse(R"({
      "classes": [{"id": "a", "count": 2}],
      "nodes": [{"id": "w", "stores": ["a"]}],
      "links": [{"reader": "w", "provider": "w", "time": 1}]
    })");
}

void require_rejected(const nlohmann::json& doc, const std::string& fragment) {
    try {
        network_from_json(doc);
        FAIL("expected rejection mentioning '" << fragment << "'");
    } catch (const input_error& e) {
        CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring(fragment));
    }
}

}  // namespace

TEST_CASE("build_network accepts the two-node library/user scenario") {
    const auto net = library_user();
    CHECK(net.nodes().size() == 2);
    CHECK(net.classes().size() == 2);
    CHECK(net.find_class("lib")->count == 10'000'000);
    CHECK(net.stores("w2", "own"));
    CHECK_FALSE(net.stores("w2", "lib"));
}

TEST_CASE("build_network accepts an empty network") {
    const auto net = load_scenario(scenario_path("empty.json"));
    CHECK(net.nodes().empty());
    CHECK(network_capacity(net) == 0.0);
}

TEST_CASE("build_network rejects invalid documents, naming the offender") {
    auto doc = base_doc();

    SECTION("non-positive time") {
        doc["links"][0]["time"] = 0;
        require_rejected(doc, "non-positive time");
        doc["links"][0]["time"] = -2.5;
        require_rejected(doc, "non-positive time");
    }
    SECTION("zero-count class") {
        doc["classes"][0]["count"] = 0;
        require_rejected(doc, "zero-count");
    }
    SECTION("duplicate class id") {
        doc["classes"].push_back({{"id", "a"}, {"count", 1}});
        require_rejected(doc, "duplicate class id 'a'");
    }
    SECTION("duplicate node id") {
        doc["nodes"].push_back({{"id", "w"}, {"stores", nlohmann::json::array()}});
        require_rejected(doc, "duplicate node id 'w'");
    }
    SECTION("dangling stored class") {
        doc["nodes"][0]["stores"].push_back("ghost");
        require_rejected(doc, "unknown class 'ghost'");
    }
    SECTION("dangling link endpoint") {
        doc["links"][0]["provider"] = "nowhere";
        require_rejected(doc, "unknown provider node 'nowhere'");
    }
    SECTION("link carries a class the provider does not store") {
        doc["classes"].push_back({{"id", "b"}, {"count", 1}});
        doc["links"][0]["classes"] = {"b"};
        require_rejected(doc, "not stored by provider");
    }
    SECTION("negative and fractional counts") {
        doc["classes"][0]["count"] = -3;
        require_rejected(doc, "negative count");
        doc["classes"][0]["count"] = 1.5;
        require_rejected(doc, "positive integer");
    }
    SECTION("unknown field") {
        doc["link"] = nlohmann::json::array();
        require_rejected(doc, "unknown field 'link'");
    }
    SECTION("missing field") {
        doc.erase("links");
        require_rejected(doc, "missing field 'links'");
    }
}

TEST_CASE("counts written in exponent form are accepted when integral") {
    auto doc = base_doc();
    doc["classes"][0]["count"] = 1e7;
    CHECK(network_from_json(doc).find_class("a")->count == 10'000'000);
}

TEST_CASE("effective_catalog takes the minimum over providers") {
    SECTION("shared content: own class at w2 (time 1) and w3 (time 2)") {
        const auto cat = effective_catalog(load_scenario(scenario_path("edge-pair-shared.json")), "w2");
        REQUIRE(cat.entries.size() == 2);
        CHECK(cat.at("own").min_time == 1.0);
        CHECK(cat.at("own").provider == "w2");
        CHECK(cat.at("lib").min_time == 10.0);
    }
    SECTION("node with no incoming links has an empty catalog") {
        const auto cat = effective_catalog(library_user(), "w1");
        CHECK(cat.empty());
        CHECK(cat.total_files() == 0);
    }
    SECTION("equal times tie-break to the smallest provider id") {
        // Symmetric two-provider scenario built in both link orders.
        for (bool reversed : {false, true}) {
            std::vector<Link> links{{"r", "zeta", 3.0, {}}, {"r", "alpha", 3.0, {}}};
            if (reversed) std::swap(links[0], links[1]);
            const auto net = Network::build({{"x", 4}}, {{"r", {}}, {"alpha", {"x"}}, {"zeta", {"x"}}}, links);
            const auto cat = effective_catalog(net, "r");
            CHECK(cat.at("x").min_time == 3.0);
            CHECK(cat.at("x").provider == "alpha");
        }
    }
    SECTION("unknown node") { CHECK_THROWS_AS(effective_catalog(library_user(), "w9"), input_error); }
}

TEST_CASE("task_time sums per-file minimal times") {
    const auto cat = effective_catalog(library_user(), "w2");
    const std::vector<std::string> mixed{"own", "own", "lib"};
    CHECK(task_time(cat, mixed) == 12.0);
    CHECK(task_time(cat, std::vector<std::string>{}) == 0.0);
    CHECK(task_time(cat, std::vector<std::string>(3, "lib")) == 30.0);

    const auto server = effective_catalog(library_user(), "w1");
    CHECK_THROWS_AS(task_time(server, mixed), input_error);
}

TEST_CASE("effective_catalog matches an exhaustive search over providers") {
    std::mt19937_64 rng(20240501);
    for (int trial = 0; trial < 300; ++trial) {
        const auto net = random_network(rng, uniform_int(rng, 1, 5), uniform_int(rng, 1, 6), 0.5);
        for (const auto& node : net.nodes()) {
            const auto expected = brute_force_min_times(net, node.id);
            const auto cat = effective_catalog(net, node.id);
            REQUIRE(cat.entries.size() == expected.size());
            for (const auto& [cid, t] : expected) CHECK(cat.at(cid).min_time == t);
        }
    }
}

TEST_CASE("adding a link never increases a minimal time; removing never decreases") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const auto net = random_network(rng, 4, 5, 0.35);
        auto links = net.links();
        links.push_back({net.nodes()[uniform_int(rng, 0, 3)].id, net.nodes()[uniform_int(rng, 0, 3)].id,
                         uniform(rng, 0.1, 9.0), {}});
        const auto more = Network::build(net.classes(), net.nodes(), links);
        for (const auto& node : net.nodes()) {
            const auto before = effective_catalog(net, node.id);
            const auto after = effective_catalog(more, node.id);
            for (const auto& [cid, e] : before.entries) CHECK(after.at(cid).min_time <= e.min_time);
            // Read the other way round, dropping that link never shrinks an entry.
            CHECK(after.entries.size() >= before.entries.size());
        }
    }
}

TEST_CASE("task_time is additive over concatenation") {
    std::mt19937_64 rng(5);
    const auto cat = effective_catalog(load_scenario(scenario_path("edge-pair.json")), "w3");
    std::vector<std::string> ids;
    for (const auto& [id, e] : cat.entries) ids.push_back(id);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::string> a, b;
        for (int i = uniform_int(rng, 0, 6); i > 0; --i) a.push_back(ids[uniform_int(rng, 0, 2)]);
        for (int i = uniform_int(rng, 0, 6); i > 0; --i) b.push_back(ids[uniform_int(rng, 0, 2)]);
        auto ab = a;
        ab.insert(ab.end(), b.begin(), b.end());
        CHECK(task_time(cat, ab) == Catch::Approx(task_time(cat, a) + task_time(cat, b)).epsilon(1e-15));
    }
}

TEST_CASE("scenario JSON survives a write/read cycle") {
    const auto net = load_scenario(scenario_path("three-file.json"));
    const auto again = network_from_json(network_to_json(net));
    CHECK(network_to_json(again) == network_to_json(net));
}
