#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "test_support.hpp"

using namespace cachecap;
using namespace cachecap::testing;
using Catch::Approx;

namespace {

double binary_entropy(double p) { return -p * std::log2(p) - (1 - p) * std::log2(1 - p); }

MarkovSource flip() { return {{"a", "b"}, {{0.75, 0.25}, {0.25, 0.75}}, {0.5, 0.5}}; }
MarkovSource two_cycle() { return {{"a", "b"}, {{0.0, 1.0}, {1.0, 0.0}}, {1.0, 0.0}}; }

std::vector<std::string> periodic(std::size_t n) {
    std::vector<std::string> t;
    for (std::size_t i = 0; i < n; ++i) t.push_back(i % 2 ? "b" : "a");
    return t;
}

Network load(const char* name) { return load_scenario(scenario_path(name)); }

}  // namespace

TEST_CASE("iid_entropy") {
    CHECK(iid_entropy(std::vector<double>{0.5, 0.5}).value == 1.0);
    CHECK(iid_entropy(std::vector<double>{1.0, 0.0}).value == 0.0);
    // Mass 1 spread over 8 files: 3 bits.
    CHECK(iid_entropy(std::vector<ClassMass>{{1.0, 8}}).value == Approx(3.0).epsilon(1e-15));
    CHECK_THROWS_AS(iid_entropy(std::vector<double>{0.5, 0.4}), input_error);
    CHECK_THROWS_AS(iid_entropy(std::vector<double>{1.5, -0.5}), input_error);

    SECTION("library/user optimum: h / E[tau] equals the capacity") {
        const auto net = load("library-user.json");
        const auto d = optimal_distribution(net, "w2");
        std::vector<ClassMass> m;
        double mean = 0.0;
        for (const auto& [id, c] : d.classes) {
            m.push_back({c.mass, c.count});
            mean += c.mass * c.tau;
        }
        const double h = iid_entropy(m).value;
        CHECK(h / mean == Approx(node_capacity(net, "w2")).epsilon(1e-12));
        CHECK(h / mean == Approx(3.324).margin(0.001));
    }
}

TEST_CASE("markov_entropy_rate") {
    CHECK(markov_entropy_rate(two_cycle()).value == 0.0);
    CHECK(markov_entropy_rate(flip()).value == Approx(binary_entropy(0.25)).epsilon(1e-12));
    CHECK(markov_entropy_rate(flip()).value == Approx(0.811278).margin(1e-6));
    CHECK_FALSE(markov_entropy_rate(flip()).order.has_value());

    SECTION("identical rows reduce to the i.i.d. entropy of the row") {
        const std::vector<double> row{0.2, 0.5, 0.3};
        const MarkovSource m{{"x", "y", "z"}, {row, row, row}, row};
        CHECK(markov_entropy_rate(m).value == Approx(iid_entropy(row).value).epsilon(1e-14));
    }
    SECTION("reducible chains are rejected") {
        const MarkovSource m{{"a", "b"}, {{1.0, 0.0}, {0.5, 0.5}}, {0.5, 0.5}};
        CHECK_THROWS_AS(markov_entropy_rate(m), input_error);
    }
    SECTION("non-stochastic rows are rejected") {
        const MarkovSource m{{"a", "b"}, {{0.7, 0.2}, {0.5, 0.5}}, {0.5, 0.5}};
        CHECK_THROWS_AS(markov_entropy_rate(m), input_error);
    }
}

TEST_CASE("stationary_distribution") {
    const MarkovSource m{{"a", "b", "c"}, {{0.0, 1.0, 0.0}, {0.5, 0.0, 0.5}, {0.0, 1.0, 0.0}}, {1, 0, 0}};
    const auto pi = stationary_distribution(m.transition);
    CHECK(pi[0] == Approx(0.25).epsilon(1e-12));
    CHECK(pi[1] == Approx(0.5).epsilon(1e-12));
    CHECK(pi[2] == Approx(0.25).epsilon(1e-12));
}

TEST_CASE("block_entropy_estimate follows the per-symbol block entropy") {
    SECTION("alternating trace: block entropy 1/2, conditional entropy 0") {
        const auto t = periodic(10'000);
        CHECK(block_entropy_estimate(t, 1).value == Approx(0.5).margin(1e-4));
        CHECK(conditional_entropy_estimate(t, 1).value < 0.01);
        CHECK(conditional_entropy_estimate(t, 1).value == 0.0);
        CHECK(block_entropy_estimate(t, 0).value == Approx(1.0).margin(1e-6));
    }
    SECTION("constant trace is 0 at every order") {
        const std::vector<std::string> t(5000, "a");
        for (int n = 0; n < 4; ++n) {
            CHECK(block_entropy_estimate(t, n).value == 0.0);
            CHECK(conditional_entropy_estimate(t, n).value == 0.0);
        }
    }
    SECTION("uniform binary i.i.d. trace, n = 0") {
        const auto t = sample_iid({{"a", "b"}, {0.5, 0.5}}, 100'000, 99);
        CHECK(block_entropy_estimate(t.symbols, 0).value == Approx(1.0).margin(0.01));
    }
    SECTION("guards") {
        const auto t = periodic(30);
        CHECK_THROWS_AS(block_entropy_estimate(t, 1), input_error);   // 30 < 10 * 2^2
        CHECK_NOTHROW(block_entropy_estimate(t, 1, true));
        CHECK_THROWS_AS(block_entropy_estimate(t, -1), input_error);
        CHECK_THROWS_AS(conditional_entropy_estimate(std::vector<std::string>{}, 0, true), input_error);
    }
    SECTION("conditional estimate tracks the Markov rate") {
        const auto t = sample_markov(flip(), 200'000, 4);
        CHECK(conditional_entropy_estimate(t.symbols, 1).value == Approx(binary_entropy(0.25)).margin(0.01));
        // The per-symbol block entropy at order 1 sits halfway between h0 and the rate.
        CHECK(block_entropy_estimate(t.symbols, 1).value ==
              Approx((1.0 + binary_entropy(0.25)) / 2).margin(0.01));
    }
}

TEST_CASE("entropy_efficiency") {
    SECTION("two unit-time files, uniform source: matched optimum") {
        const auto r = entropy_efficiency(load("two-unit.json"), "w", IidSource{{"a", "b"}, {0.5, 0.5}});
        CHECK(r.efficiency_bits_per_time == Approx(1.0).epsilon(1e-15));
        CHECK(r.capacity_bits_per_time == Approx(1.0).epsilon(1e-12));
        CHECK(*r.utilization_ratio == Approx(1.0).epsilon(1e-12));
    }
    SECTION("library/user node at its optimal distribution") {
        const auto net = load("library-user.json");
        const auto r = entropy_efficiency(net, "w2", optimal_source(optimal_distribution(net, "w2")));
        CHECK(r.efficiency_bits_per_time == Approx(3.324).margin(0.001));
        CHECK(r.efficiency_bits_per_time == Approx(r.capacity_bits_per_time).epsilon(1e-9));
    }
    SECTION("{1,1,2} uniform over files is strictly suboptimal") {
        const auto r = entropy_efficiency(load("three-file.json"), "w",
                                          IidSource{{"a", "b", "c"}, {1.0 / 3, 1.0 / 3, 1.0 / 3}});
        CHECK(r.entropy_bits_per_file == Approx(std::log2(3.0)).epsilon(1e-12));
        CHECK(r.mean_read_time == Approx(4.0 / 3).epsilon(1e-12));
        CHECK(r.efficiency_bits_per_time == Approx(1.18872).margin(1e-5));
        CHECK(r.efficiency_bits_per_time < r.capacity_bits_per_time);
        CHECK(*r.utilization_ratio == Approx(0.935).margin(5e-4));
    }
    SECTION("class mass spreads uniformly over the class's files") {
        // One class of 8 files at time 3: entropy 3 bits, mean time 3.
        const auto r = entropy_efficiency(load("single-class.json"), "user", IidSource{{"movies"}, {1.0}});
        CHECK(r.entropy_bits_per_file == Approx(3.0).epsilon(1e-15));
        CHECK(r.efficiency_bits_per_time == Approx(1.0).epsilon(1e-15));
    }
    SECTION("Markov source uses the stationary marginal") {
        const auto r = entropy_efficiency(load("markov-pair.json"), "w", flip());
        CHECK(r.mean_read_time == Approx(1.5).epsilon(1e-12));
        CHECK(r.efficiency_bits_per_time == Approx(binary_entropy(0.25) / 1.5).epsilon(1e-12));
    }
    SECTION("trace source with the conditional estimator") {
        const auto t = sample_markov(flip(), 100'000, 17);
        const auto r = entropy_efficiency(load("markov-pair.json"), "w", EmpiricalSource{t, 1});
        CHECK(r.efficiency_bits_per_time == Approx(binary_entropy(0.25) / 1.5).epsilon(0.05));
        CHECK(r.entropy.method == EntropyMethod::plugin_conditional);
    }
    SECTION("mass on an unreachable class is rejected") {
        CHECK_THROWS_AS(entropy_efficiency(load("library-user.json"), "w1", IidSource{{"lib"}, {1.0}}), input_error);
        CHECK_THROWS_AS(entropy_efficiency(load("library-user.json"), "w2", IidSource{{"nope"}, {1.0}}), input_error);
    }
    SECTION("zero-mass entries may name unreachable classes") {
        const auto r = entropy_efficiency(load("library-user.json"), "w2", IidSource{{"own", "lib"}, {1.0, 0.0}});
        CHECK(r.entropy_bits_per_file == Approx(std::log2(10.0)).epsilon(1e-15));
    }
}

TEST_CASE("network_entropy_efficiency") {
    const auto net = load("edge-pair.json");
    std::map<std::string, AccessSource> src;
    src.emplace("w2", optimal_source(optimal_distribution(net, "w2")));
    src.emplace("w3", optimal_source(optimal_distribution(net, "w3")));
    const auto r = network_entropy_efficiency(net, src);
    CHECK(r.total == Approx(6.898).margin(0.002));
    CHECK(r.total == Approx(network_capacity(net)).epsilon(1e-9));

    CHECK(network_entropy_efficiency(net, {}).total == 0.0);

    std::map<std::string, AccessSource> one;
    one.emplace("w2", IidSource{{"own2", "lib"}, {0.9, 0.1}});
    CHECK(network_entropy_efficiency(net, one).total ==
          entropy_efficiency(net, "w2", IidSource{{"own2", "lib"}, {0.9, 0.1}}).efficiency_bits_per_time);
}

TEST_CASE("the optimal distribution attains the capacity and no i.i.d. source beats it") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 60; ++trial) {
        const auto specs = random_catalog(rng, 2, 50, 0.1, 20);
        const auto net = catalog_network(specs);
        const double cap = node_capacity(net, "w");
        const auto opt = entropy_efficiency(net, "w", optimal_source(optimal_distribution(net, "w")));
        CHECK(opt.efficiency_bits_per_time == Approx(cap).epsilon(1e-9));
        for (int k = 0; k < 100; ++k) {
            IidSource s;
            for (std::size_t i = 0; i < specs.size(); ++i) s.classes.push_back("c" + std::to_string(i));
            s.probabilities = random_distribution(rng, specs.size());
            CHECK(entropy_efficiency(net, "w", s).efficiency_bits_per_time <= cap + 1e-9);
        }
    }
}

TEST_CASE("every entropy estimate lies in [0, log2 |A|]") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 100; ++trial) {
        const auto k = static_cast<std::size_t>(uniform_int(rng, 1, 5));
        IidSource s;
        for (std::size_t i = 0; i < k; ++i) s.classes.push_back("s" + std::to_string(i));
        s.probabilities = random_distribution(rng, k);
        const auto h = iid_entropy(s.probabilities).value;
        CHECK(h >= 0.0);
        CHECK(h <= std::log2(static_cast<double>(k)) + 1e-12);

        const auto t = sample_iid(s, 2000, rng());
        const auto alphabet = empirical_distribution(t).counts.size();
        for (int n = 0; n < 3; ++n) {
            for (const auto& e : {block_entropy_estimate(t.symbols, n, true),
                                  conditional_entropy_estimate(t.symbols, n, true)}) {
                CHECK(e.value >= 0.0);
                CHECK(e.value <= std::log2(static_cast<double>(alphabet)) + 1e-12);
            }
        }
    }
}

TEST_CASE("plug-in h0 converges to the i.i.d. entropy within 3 standard errors") {
    const IidSource s{{"a", "b", "c", "d"}, {0.5, 0.25, 0.15, 0.1}};
    const double h = iid_entropy(s.probabilities).value;
    // Var(-log2 p(X)) for the delta-method standard error.
    double second = 0.0;
    for (double p : s.probabilities) second += p * std::log2(p) * std::log2(p);
    const double var = second - h * h;
    for (std::size_t n : {1'000u, 10'000u, 100'000u}) {
        const auto t = sample_iid(s, n, 1234 + n);
        const double se = std::sqrt(var / static_cast<double>(n));
        // Plug-in bias is about (|A|-1)/(2n ln 2).
        const double bias = 3.0 / (2.0 * static_cast<double>(n) * std::log(2.0));
        INFO("n = " << n);
        CHECK(std::abs(block_entropy_estimate(t.symbols, 0).value - h) <= 3 * se + bias);
    }
}
