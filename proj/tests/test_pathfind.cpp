#include <gtest/gtest.h>

#include <random>

#include "graph_oracle.hpp"
#include "orienteer/pathfind.hpp"

using namespace orn;

namespace {

constexpr u64 P = 179;

const Level* F179_2() { return field_extend(prime_field(P), 2); }

FieldElem fe(u64 c0, u64 c1) { return elem_from_flat(F179_2(), {c0, c1}); }

TracedEndo theta47() { return realize_endo_1728(QuatElem(P, 0, 3, 0, 1, 2)); }

TracedEndo theta_2_48() { return suitable_translate_powersmooth(theta47(), 2, 50); }

FieldElem jF(const Curve& E) { return detail::j_low(E); }

// the planted instance two levels below the rim: theta on E_120 with trace
// 20 and norm 288, built by descending twice from the rim vertex 5i+109
TracedEndo planted_theta_120() {
    OrientedPath up = ascend_to_rim(theta_2_48(), 2);
    auto cyc = walk_rim_cycle(up[0].endo, 2);
    if (!cyc) throw math_error("planted_theta_120: rim walk failed");
    const TracedEndo& rim = (*cyc)[1].endo;
    auto dirs = classify_directions(rim, 2);
    const KernelDirection* down = nullptr;
    for (const auto& d : dirs)
        if (d.kind == StepKind::Descending) down = &d;
    if (!down) throw math_error("planted_theta_120: no descent");
    TracedEndo th171 = detail::waterhouse_transfer(rim, velu(rim.E, {down->gen}));
    for (const auto& d : classify_directions(th171, 2)) {
        if (d.kind != StepKind::Descending) continue;
        Isogeny nu2 = velu(th171.E, {d.gen});
        if (jF(nu2.codomain) == fe(120, 0))
            return translate(detail::waterhouse_transfer(th171, nu2), 8);
    }
    throw math_error("planted_theta_120: curve 120 not reached");
}

void expect_edge_valid(const PathEdge& e) {
    Isogeny phi = velu(e.domain, {e.kernel_gen});
    EXPECT_EQ(phi.degree, 2u);
    EXPECT_EQ(jF(phi.codomain), jF(e.codomain));
}

std::vector<FieldElem> edge_js(const PathResult& res) {
    std::vector<FieldElem> js;
    js.push_back(jF(res.edges.front().domain));
    for (const auto& e : res.edges) js.push_back(jF(e.codomain));
    return js;
}

}  // namespace

TEST(Pathfind, OrientationStreamFirstSolution) {
    OrientationStream s(P, -47, 2);
    auto sol = s.next();
    ASSERT_TRUE(sol.has_value());
    // no r = 0 solution exists (smallest x there is 88 > sqrt 47), so the
    // stream opens at depth 1 with (3i + k)/2
    EXPECT_EQ(sol->r, 1u);
    EXPECT_EQ(sol->quat, QuatElem(P, 0, 3, 0, 1, 2));
    EXPECT_EQ(sol->quat.trace(), 0);
    EXPECT_EQ(sol->quat.norm(), 47);
    EXPECT_EQ(sol->disc, -188);
}

TEST(Pathfind, OrientationStreamDeepSolution) {
    OrientationStream s(P, -47, 2);
    bool found = false;
    for (int i = 0; i < 200 && !found; i++) {
        auto sol = s.next();
        ASSERT_TRUE(sol.has_value());
        if (sol->r != 7 || sol->quat.x != 371) continue;
        found = true;
        EXPECT_EQ(sol->quat, QuatElem(P, 0, 371, 58, 13, 2));
        EXPECT_EQ(sol->quat.norm(), 47ll * (1ll << 14) / 4);
    }
    EXPECT_TRUE(found);
}

TEST(Pathfind, OrientationStreamInvariants) {
    OrientationStream s(P, -47, 2);
    unsigned last_r = 0;
    for (int i = 0; i < 12; i++) {
        auto sol = s.next();
        ASSERT_TRUE(sol.has_value());
        EXPECT_GE(sol->r, last_r);  // lanes are drained in increasing depth
        last_r = sol->r;
        EXPECT_TRUE(in_maximal_order(sol->quat));
        i64 t = sol->quat.trace();
        EXPECT_EQ(sol->disc, t * t - 4 * sol->quat.norm());
        i64 expect_disc = -47;
        for (unsigned j = 0; j < sol->r; j++) expect_disc *= 4;
        EXPECT_EQ(sol->disc, expect_disc);
        // primitive: no further division by 2 stays in the maximal order
        auto cls = suitable_translation_class(t, sol->disc, 2);
        QuatElem qt = sol->quat + QuatElem(P, cls.minimal_T, 0, 0, 0);
        EXPECT_FALSE(detail::quat_try_divide(qt, 2).has_value());
    }
}

TEST(Pathfind, OrientationStreamRejectsBadInput) {
    EXPECT_THROW(OrientationStream(P, -48, 2), math_error);  // not 2-fundamental
    EXPECT_THROW(OrientationStream(P, 47, 2), math_error);
    EXPECT_THROW(OrientationStream(181, -47, 2), math_error);  // p = 1 mod 4
}

TEST(Pathfind, EndToEndPlantedExample) {
    TracedEndo th120 = planted_theta_120();
    ASSERT_EQ(th120.t, 20);
    ASSERT_EQ(th120.n, 288);
    PathResult res = path_to_1728(th120, 2);
    ASSERT_EQ(res.edges.size(), 5u);
    std::vector<FieldElem> want = {fe(117, 0), fe(22, 0),  fe(107, 99),
                                   fe(109, 5), fe(171, 0), fe(120, 0)};
    EXPECT_EQ(edge_js(res), want);  // 117 = 1728 mod 179
    EXPECT_EQ(res.ascent_from_1728, 1u);
    EXPECT_EQ(res.rim_steps, 2u);
    EXPECT_EQ(res.descent_to_input, 2u);
    EXPECT_FALSE(res.conjugated);
    EXPECT_EQ(res.orientation.r, 1u);
    EXPECT_EQ(res.orientation.quat, QuatElem(P, 0, 3, 0, 1, 2));
    for (const auto& e : res.edges) expect_edge_valid(e);
    for (size_t i = 0; i + 1 < res.edges.size(); i++)
        EXPECT_EQ(jF(res.edges[i].codomain), jF(res.edges[i + 1].domain));
}

TEST(Pathfind, ClosedSpliceFromInitialCurve) {
    PathResult res = path_to_1728(theta_2_48(), 2);
    ASSERT_FALSE(res.edges.empty());
    EXPECT_EQ(jF(res.edges.front().domain), fe(117, 0));
    EXPECT_EQ(jF(res.edges.back().codomain), fe(117, 0));
    EXPECT_EQ(res.edges.size(), 2u);  // up to the rim at 22 and straight back
    EXPECT_EQ(res.rim_steps, 0u);
    for (const auto& e : res.edges) expect_edge_valid(e);
}

TEST(Pathfind, PlantedWalkMatchesGraphOracle) {
    auto G = oracle::build_graph(P);
    EXPECT_GE(G.js.size(), 10u);
    EXPECT_LE(G.js.size(), 25u);
    EXPECT_TRUE(G.contains(fe(117, 0)));
    EXPECT_TRUE(G.contains(fe(22, 0)));
    EXPECT_TRUE(G.contains(fe(120, 0)));
    EXPECT_TRUE(G.adjacent(fe(117, 0), fe(22, 0)));

    // plant: orient the initial curve, then push the endomorphism along a
    // pseudorandom 3-step walk by Waterhouse transfers
    std::mt19937_64 rng(117);
    TracedEndo cur = theta_2_48();
    for (int step = 0; step < 3; step++) {
        auto subs = detail::ell_subgroup_images(cur, 2);
        const auto& g = subs[rng() % subs.size()].first;
        cur = detail::waterhouse_transfer(cur, velu(cur.E, {g}));
    }
    PathResult res = path_to_1728(cur, 2);
    ASSERT_FALSE(res.edges.empty());
    EXPECT_EQ(jF(res.edges.front().domain), fe(117, 0));
    EXPECT_EQ(jF(res.edges.back().codomain), jF(cur.E));
    for (const auto& e : res.edges) {
        expect_edge_valid(e);
        EXPECT_TRUE(G.adjacent(jF(e.domain), jF(e.codomain)));
    }
}
