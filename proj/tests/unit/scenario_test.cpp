#include <gtest/gtest.h>

#include <random>

#include "ranslice/errors.hpp"
#include "ranslice/scenario.hpp"

using namespace ranslice;

TEST(Scenario, EmptyDocumentGivesDefaults) {
    const Scenario s = parse_scenario("");
    EXPECT_EQ(s, Scenario{});
    EXPECT_EQ(s.mec_capacity_hz, 3e9);
    EXPECT_EQ(s.n_rbgs(), 13);
    EXPECT_NO_THROW(s.validate());
}

TEST(Scenario, LoneKeyOverridesOnlyThatField) {
    const Scenario s = parse_scenario("urllc_load_bps = 4e6\n");
    Scenario expected;
    expected.urllc_load_bps = 4e6;
    EXPECT_EQ(s, expected);
}

TEST(Scenario, GammaOutOfRangeNamesField) {
    try {
        parse_scenario("[learning]\ngamma = 1.5\n");
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.field(), "gamma");
    }
}

TEST(Scenario, SectionsAndComments) {
    const Scenario s = parse_scenario(
        "# comment\n[network]\nn_bs = 3   # trailing\nmec_capacity_hz = 2e9\n\n[traffic]\nembb_load_bps = 1e6\n"
        "[reward]\ndrop_penalty = 2\n");
    EXPECT_EQ(s.n_bs, 3);
    EXPECT_EQ(s.mec_capacity_hz, 2e9);
    EXPECT_EQ(s.embb_load_bps, 1e6);
    EXPECT_EQ(s.drop_penalty, 2.0);
}

TEST(Scenario, UnknownKeyIsError) { EXPECT_THROW(parse_scenario("[network]\nn_bss = 3\n"), ParseError); }

TEST(Scenario, KeyInWrongSectionIsError) { EXPECT_THROW(parse_scenario("[reward]\nn_bs = 3\n"), ParseError); }

TEST(Scenario, DuplicateKeyIsError) { EXPECT_THROW(parse_scenario("n_bs = 3\nn_bs = 4\n"), ParseError); }

TEST(Scenario, MalformedLineReportsLine) {
    try {
        parse_scenario("[network]\n\nn_bs 3\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3);
    }
}

TEST(Scenario, RbgSizesMustCoverBandwidth) {
    EXPECT_THROW(parse_scenario("rbg_sizes = 8,8\n"), ValidationError);
    const Scenario s = parse_scenario("bandwidth_rbs = 16\nrbg_sizes = 8,8\n");
    EXPECT_EQ(s.n_rbgs(), 2);
}

TEST(Scenario, OffloadWaitDefaultsToTarget) {
    EXPECT_EQ(parse_scenario("d_target_s = 3e-3\n").offload_wait_s, 3e-3);
    EXPECT_EQ(parse_scenario("d_target_s = 3e-3\noffload_wait_s = 1e-3\n").offload_wait_s, 1e-3);
}

TEST(Scenario, RenderParseRoundTripProperty) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        Scenario s;
        s.n_bs = 1 + static_cast<int>(rng() % 7);
        s.inter_site_distance_m = 100 + 900 * u(rng);
        s.tx_power_dbm = 20 + 30 * u(rng);
        s.mec_capacity_hz = 1e9 * (0.5 + 4 * u(rng));
        s.embb_load_bps = 1e6 * u(rng);
        s.urllc_load_bps = 1e6 * (0.1 + 4 * u(rng));
        s.lr_alpha = 0.01 + 0.98 * u(rng);
        s.gamma = 0.01 + 0.98 * u(rng);
        s.epsilon = u(rng);
        s.d_target_s = 1e-3 * (1 + 3 * u(rng));
        s.offload_wait_s = 1e-3 * (1 + 3 * u(rng));
        s.fast_fading = rng() % 2 == 0;
        s.master_seed = rng();
        ASSERT_NO_THROW(s.validate());
        EXPECT_EQ(parse_scenario(render_scenario(s)), s) << render_scenario(s);
        EXPECT_EQ(scenario_hash(parse_scenario(render_scenario(s))), scenario_hash(s));
    }
}

TEST(ActionSpace, Sizes) {
    const Scenario s;
    EXPECT_EQ(action_space(s, false).size(), 14u);
    EXPECT_EQ(action_space(s, true).size(), 154u);
}

TEST(ActionSpace, ZeroRbgsHasSingleAction) {
    const ActionSpace a(ActionSpaceDescriptor{0, std::nullopt});
    ASSERT_EQ(a.size(), 1u);
    EXPECT_EQ(a[0].r_embb, 0);
    EXPECT_EQ(a[0].r_urllc, 0);
}

TEST(ActionSpace, LexicographicOrderAndIndexRoundTrip) {
    const ActionSpace a(action_space_descriptor(Scenario{}, true));
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a.index_of(a[i]), i);
        if (i > 0) {
            const auto& p = a[i - 1];
            const auto& c = a[i];
            EXPECT_TRUE(p.r_embb < c.r_embb || (p.r_embb == c.r_embb && p.compute->embb < c.compute->embb));
        }
    }
}

TEST(ActionSpace, EveryActionSatisfiesBudgets) {
    for (int rbgs : {0, 1, 5, 13}) {
        for (int steps : {1, 4, 10}) {
            const ActionSpace a(ActionSpaceDescriptor{rbgs, steps});
            EXPECT_EQ(a.size(), static_cast<std::size_t>((rbgs + 1) * (steps + 1)));
            for (const auto& x : a.actions()) {
                EXPECT_EQ(x.r_embb + x.r_urllc, rbgs);
                EXPECT_GE(x.r_embb, 0);
                EXPECT_GE(x.r_urllc, 0);
                EXPECT_EQ(x.compute->embb + x.compute->urllc, steps);
                EXPECT_GE(x.compute->embb, 0);
            }
        }
    }
}

TEST(ActionSpace, ForeignActionRejected) {
    const ActionSpace a(action_space_descriptor(Scenario{}, false));
    EXPECT_FALSE(a.contains(AllocationAction{5, 5, std::nullopt}));
    EXPECT_THROW(a.index_of(AllocationAction{5, 5, std::nullopt}), ContractViolation);
}
