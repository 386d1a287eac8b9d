#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "evac/dataset.hpp"
#include "evac/error.hpp"
#include "evac/features.hpp"
#include "evac/oracle.hpp"
#include "support.hpp"

using namespace evac;
using namespace testing_support;

TEST(Euclid, Examples) {
    EXPECT_DOUBLE_EQ(euclid({0, 0}, {3.0 / 5, 4.0 / 5}), 1.0);
    EXPECT_EQ(euclid({0.2, 0.2}, {0.2, 0.2}), 0.0);
}

TEST(Cosine, Examples) {
    EXPECT_NEAR(cosine_dir({0, 0}, {1, 0}, {1, 0}).value, 1.0, 1e-15);
    EXPECT_NEAR(cosine_dir({0.5, 0.5}, {0.5, 1}, {1, 0.5}).value, 0.0, 1e-15);
    EXPECT_NEAR(cosine_dir({0.5, 0.5}, {0, 0.5}, {1, 0.5}).value, -1.0, 1e-15);
    EXPECT_NEAR(cosine_dir({0, 0}, {1, 1}, {1, 0}).value, std::sqrt(0.5), 1e-15);
    const auto d = cosine_dir({0.3, 0.3}, {0.6, 0.3}, {0.3, 0.3});
    EXPECT_TRUE(d.degenerate);
    EXPECT_EQ(d.value, 0.0);
}

TEST(Cosine, RandomInRange) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 10000; ++i) {
        const auto c = cosine_dir({u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)});
        ASSERT_GE(c.value, -1.0);
        ASSERT_LE(c.value, 1.0);
    }
}

TEST(Betweenness, PathOfThree) {
    const auto g = make_graph({{0, 0}, {0.5, 0}, {1, 0}}, {{0, 1}, {1, 2}});
    const std::vector<double> w{1, 1};
    const auto b = edge_betweenness(g, w);
    EXPECT_NEAR(b[0], 4.0 / 6, 1e-15);
    EXPECT_NEAR(b[1], 4.0 / 6, 1e-15);
}

TEST(Betweenness, StarMatchesEnumeration) {
    const auto g = make_graph({{0.5, 0.5}, {0, 0}, {1, 0}, {0.5, 1}}, {{0, 1}, {0, 2}, {0, 3}});
    const std::vector<double> w{1, 1, 1};
    const auto b = edge_betweenness(g, w);
    const auto oracle = betweenness_by_enumeration(g, w);
    for (std::size_t e = 0; e < 3; ++e) {
        EXPECT_NEAR(b[e], 0.5, 1e-15);
        EXPECT_NEAR(b[e], oracle[e], 1e-15);
    }
}

TEST(Betweenness, TriangleIsSymmetric) {
    const auto g = make_graph({{0, 0}, {1, 0}, {0.5, 1}}, {{0, 1}, {1, 2}, {0, 2}});
    const std::vector<double> w{1, 1, 1};
    const auto b = edge_betweenness(g, w);
    EXPECT_NEAR(b[0], 2.0 / 6, 1e-15);
    EXPECT_NEAR(b[1], b[0], 1e-15);
    EXPECT_NEAR(b[2], b[0], 1e-15);
}

TEST(Betweenness, MatchesEnumerationOnRandomGraphs) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 25; ++trial) {
        const auto g = random_graph(7, rng);
        // integer weights so ties actually happen
        std::vector<double> w(g.edge_count());
        for (auto &x : w) {
            x = static_cast<double>(std::uniform_int_distribution<int>(1, 3)(rng));
        }
        const auto b = edge_betweenness(g, w);
        const auto oracle = betweenness_by_enumeration(g, w);
        for (std::size_t e = 0; e < w.size(); ++e) {
            ASSERT_NEAR(b[e], oracle[e], 1e-12) << "trial " << trial << " edge " << e;
            ASSERT_GE(b[e], 0.0);
            ASSERT_LE(b[e], 1.0);
        }
    }
}

TEST(Betweenness, DisconnectedPairsContributeNothing) {
    const auto g = make_graph({{0, 0}, {1, 0}, {0, 1}, {1, 1}}, {{0, 1}, {2, 3}});
    const std::vector<double> w{1, 1};
    const auto b = edge_betweenness(g, w);
    EXPECT_NEAR(b[0], 2.0 / 12, 1e-15);
    EXPECT_THROW((void)edge_betweenness(g, std::vector<double>{1}), ArgumentError);
}

TEST(BuildInput, FixtureVectorAndPadding) {
    // node 0 at center with two neighbors; exit is node 2
    const auto g = make_graph({{0.5, 0.5}, {0.5, 1.0}, {1.0, 0.5}}, {{0, 1}, {0, 2}});
    ScenarioConfig sc;
    sc.epicenter = {0.1, 0.2};
    sc.start = 0;
    sc.exits = {2};
    sc.chosen_exit = 2;
    sc.sigma_frac = 0.0;
    Environment env(g, sc, Mechanisms::none());
    const std::vector<double> bt{0.25, 0.75};
    const auto in = build_input(env, 0, bt);
    const double w = nominal_travel_time(1000, 60) / kWeightScale;
    const FeatureVector expected{0.1, 0.2, 0.5, 0.5, 1.0, 0.5,
                                 0.5, 1.0, w, 0.25, std::sqrt(0.5), 0.0,
                                 1.0, 0.5, w, 0.75, 0.0, 1.0,
                                 0, 0, 0, 0, 0, 0,
                                 0, 0, 0, 0, 0, 0,
                                 0, 0, 0, 0, 0, 0};
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        EXPECT_NEAR(in.features[i], expected[i], 1e-15) << "index " << i;
    }
    EXPECT_EQ(in.n_neighbors, 2u);
    EXPECT_EQ(in.neighbors[0], 1);
    EXPECT_EQ(in.neighbors[1], 2);
    const auto m = in.mask();
    EXPECT_TRUE(m[0] && m[1]);
    EXPECT_FALSE(m[2] || m[3] || m[4]);
    const auto main = main_features(in.features);
    EXPECT_EQ(main.size(), 34u);
    EXPECT_EQ(main[0], 0.5);
    const auto film = film_features(in.features);
    EXPECT_EQ(film[0], 0.1);
    EXPECT_EQ(film[1], 0.2);
    EXPECT_THROW((void)build_input(env, 0, std::vector<double>{0.1}), ArgumentError);
}

TEST(BuildInput, RejectsDegreeAboveFive) {
    const auto g = make_graph({{0.5, 0.5}, {0, 0}, {1, 0}, {0, 1}, {1, 1}, {0.5, 0}, {0.5, 1}},
                              {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}, {0, 6}});
    ScenarioConfig sc;
    sc.epicenter = {0.5, 0.5};
    sc.start = 0;
    sc.exits = {1};
    sc.chosen_exit = 1;
    Environment env(g, sc, Mechanisms::none());
    EXPECT_THROW((void)build_input(env, 0, std::vector<double>(6, 0.0)), InvariantError);
}

TEST(BuildInput, WeightsTrackTheDynamicState) {
    const auto g = synth_city(6, 6, 1);
    const auto sc = sample_scenario(g, default_exits(g), 2, 0);
    Environment env(g, sc);
    const auto bt = edge_betweenness(g, nominal_weights(g));
    for (int i = 0; i < 5; ++i) {
        (void)env.advance();
    }
    const auto in = build_input(env, sc.start, bt);
    const auto adj = g.neighbors(sc.start);
    for (std::size_t k = 0; k < adj.size(); ++k) {
        EXPECT_DOUBLE_EQ(in.features[feature::block(k, feature::kBlockWeight)],
                         env.state().weight(adj[k].edge) / kWeightScale);
    }
}

TEST(Dataset, SizeDeterminismAndLabels) {
    const auto g = synth_city(8, 8, 7);
    EXPECT_EQ(g.node_count(), 64u);
    const auto a = generate_dataset(g, 30, 5);
    DatasetOptions opts;
    opts.jobs = 4;
    const auto b = generate_dataset(g, 30, 5, opts);
    ASSERT_EQ(a.samples, b.samples);
    std::set<int> scenarios;
    for (const auto &s : a.samples) {
        ASSERT_GE(s.label, 0);
        ASSERT_LT(s.label, s.n_neighbors);
        ASSERT_LE(s.n_neighbors, 5);
        scenarios.insert(s.scenario_id);
    }
    EXPECT_EQ(scenarios.size(), 30u);
    EXPECT_TRUE(a.skipped.empty());
    EXPECT_NE(generate_dataset(g, 30, 6).samples, a.samples);
}

TEST(Dataset, ScenarioWithKStepsYieldsKSamples) {
    const auto g = synth_city(6, 6, 3);
    const auto exits = default_exits(g);
    const auto data = generate_dataset(g, 10, 11);
    for (int id = 0; id < 10; ++id) {
        const auto sc = sample_scenario(g, exits, 11, id);
        const auto p = nodewise_dijkstra(Environment(g, sc));
        std::size_t k = 0;
        for (const auto &s : data.samples) {
            k += s.scenario_id == id;
        }
        EXPECT_EQ(k, p.steps());
    }
}

TEST(Dataset, JsonlRoundTripAndSplit) {
    const auto g = synth_city(5, 5, 2);
    const auto d = generate_dataset(g, 12, 1);
    const auto back = from_jsonl(to_jsonl(d));
    EXPECT_EQ(back.samples, d.samples);
    const auto split = split_by_scenario(d.samples, 0.25, 3);
    EXPECT_EQ(split.train.size() + split.validation.size(), d.samples.size());
    std::set<int> tr, va;
    for (const auto &s : split.train) {
        tr.insert(s.scenario_id);
    }
    for (const auto &s : split.validation) {
        va.insert(s.scenario_id);
        EXPECT_EQ(tr.count(s.scenario_id), 0u);
    }
    EXPECT_EQ(va.size(), 3u);
}
