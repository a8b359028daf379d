// Small end-to-end tour of the library at p = 179:
//   1. orient the curve j = 1728 by an endomorphism of discriminant -47
//   2. push that endomorphism along a short 2-isogeny walk to a "mystery"
//      curve, forgetting the walk itself
//   3. recover an explicit 2-isogeny path from 1728 to the mystery curve
//      using only the transported endomorphism

#include <iostream>
#include <random>

#include "orienteer/pathfind.hpp"

using namespace orn;

static std::string pretty(const FieldElem& j) {
    auto flat = j.flatten();
    std::string s;
    if (flat.size() > 1 && flat[1] != 0) s = std::to_string(flat[1]) + "i";
    if (flat[0] != 0 || s.empty()) {
        if (!s.empty()) s += "+";
        s += std::to_string(flat[0]);
    }
    return s;
}

int main() {
    const u64 p = 179;

    OrientationStream stream(p, -47, 2);
    auto sol = stream.next();
    std::cout << "orientation of j=1728: (" << sol->quat.w << " + " << sol->quat.x << "i + "
              << sol->quat.y << "j + " << sol->quat.z << "k)/" << sol->quat.den
              << ", norm " << sol->quat.norm() << "\n";

    TracedEndo theta = suitable_translate_powersmooth(realize_endo_1728(sol->quat), 2, 50);
    std::cout << "as an isogeny chain: trace " << theta.t << ", norm " << theta.n << "\n";

    std::mt19937_64 rng(42);
    for (int step = 0; step < 3; step++) {
        auto subs = detail::ell_subgroup_images(theta, 2);
        const auto& gen = subs[rng() % subs.size()].first;
        theta = detail::waterhouse_transfer(theta, velu(theta.E, {gen}));
    }
    std::cout << "mystery curve after a hidden 3-step walk: j = "
              << pretty(detail::j_low(theta.E)) << "\n";

    PathResult res = path_to_1728(theta, 2);
    std::cout << "recovered path (" << res.ascent_from_1728 << " up, " << res.rim_steps
              << " along the rim, " << res.descent_to_input << " down):\n  ";
    if (res.edges.empty()) {
        std::cout << pretty(detail::j_low(theta.E));
    } else {
        std::cout << pretty(detail::j_low(res.edges.front().domain));
        for (const auto& e : res.edges) std::cout << " -> " << pretty(detail::j_low(e.codomain));
    }
    std::cout << "\n";
    return 0;
}
