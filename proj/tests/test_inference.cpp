#include <algorithm>
#include <cmath>

#include "asia_fixture.hpp"
#include "doctest.h"
#include "xbn/error.hpp"
#include "xbn/factor.hpp"
#include "xbn/format.hpp"
#include "xbn/inference.hpp"

using namespace xbn;

using testing::Asia;

TEST_SUITE("inference") {
    TEST_CASE("factor layout keeps the last scope variable fastest") {
        const Factor f({0, 2}, {2, 3}, {1, 2, 3, 4, 5, 6});
        const StateId idx[] = {1, 0};
        CHECK(f.at(idx) == 4);
        CHECK(f.total() == 21);
        CHECK(f.sum_out(2).values() == std::vector<double>{6, 15});
        CHECK(f.sum_out(0).values() == std::vector<double>{5, 7, 9});
        CHECK(f.max_out(2).values() == std::vector<double>{3, 6});
        CHECK(f.reduce(2, 1).values() == std::vector<double>{2, 5});
        const VarId keep[] = {2};
        CHECK(f.marginal(keep).values() == std::vector<double>{5, 7, 9});

        const Factor g({1}, {2}, {10, 100});
        const Factor h = f.product(g);
        CHECK(h.scope() == std::vector<VarId>{0, 1, 2});
        const StateId hi[] = {1, 1, 2};
        CHECK(h.at(hi) == 600);
        CHECK(Factor().total() == 1.0);
        CHECK_THROWS(Factor({0}, {2}, {1, 2, 3}));
    }

    TEST_CASE("Asia marginals match hand computation") {
        Asia a;
        // P(T=yes) = 0.01*0.05 + 0.99*0.01
        CHECK(posterior(a.net, {a.T}, {}).probability(a.T, 0) == doctest::Approx(0.0104).epsilon(1e-12));
        // P(C=yes) = 0.5*0.1 + 0.5*0.01 = 0.055; P(P=yes) = 1 - (1-0.0104)(1-0.055)
        CHECK(posterior(a.net, {a.C}, {}).probability(a.C, 0) == doctest::Approx(0.055).epsilon(1e-12));
        CHECK(posterior(a.net, {a.P}, {}).probability(a.P, 0) == doctest::Approx(0.064828).epsilon(1e-12));
        CHECK(posterior(a.net, {a.S}, {}).probability(a.S, 0) == 0.5);

        // P(S=yes | P=yes) = 0.5*(1 - 0.9896*0.9) / 0.064828
        const auto p = posterior(a.net, {a.S}, Evidence{{a.P, 0}});
        CHECK(p.probability(a.S, 0) == doctest::Approx(0.5 * (1 - 0.9896 * 0.9) / 0.064828).epsilon(1e-12));
        CHECK(p.evidence_probability == doctest::Approx(0.064828).epsilon(1e-12));
    }

    TEST_CASE("joint probability of a full instantiation") {
        Asia a;
        Instantiation all_no(a.net.size(), 1);
        CHECK(joint_probability(a.net, all_no) ==
              doctest::Approx(0.99 * 0.99 * 0.5 * 0.99 * 0.7 * 1.0 * 0.95 * 0.9).epsilon(1e-14));
    }

    TEST_CASE("multi-target posterior equals the enumeration oracle") {
        Asia a;
        const Evidence e{{a.D, 0}, {a.X, 0}};
        const auto ve = posterior(a.net, {a.S, a.B, a.T}, e);
        const Factor full = enumerate_distribution(a.net, e);
        const VarId keep[] = {a.T, a.S, a.B};
        Factor oracle = full.marginal(keep);
        oracle.normalize();
        REQUIRE(ve.distribution.scope() == oracle.scope());
        for (std::size_t i = 0; i < oracle.size(); ++i)
            CHECK(ve.distribution.values()[i] == doctest::Approx(oracle.values()[i]).epsilon(1e-12));
        CHECK(ve.evidence_probability == doctest::Approx(full.total()).epsilon(1e-12));
    }

    TEST_CASE("posterior errors") {
        Asia a;
        // TbOrCancer is a deterministic OR: LungCancer=yes forces it to yes.
        CHECK_THROWS_AS(posterior(a.net, {a.S}, Evidence{{a.C, 0}, {a.P, 1}}), ImpossibleEvidenceError);
        CHECK_THROWS_AS(posterior(a.net, {a.S}, Evidence{{a.S, 0}}), UsageError);
        CHECK_THROWS_AS(posterior(a.net, {}, {}), UsageError);
        CHECK(evidence_probability(a.net, Evidence{{a.C, 0}, {a.P, 1}}) == 0.0);
        CHECK(evidence_probability(a.net, {}) == doctest::Approx(1.0));
    }

    TEST_CASE("max joint assignment") {
        Asia a;
        const auto m = max_joint_assignment(a.net, {});
        CHECK(m.joint == doctest::Approx(0.99 * 0.99 * 0.5 * 0.99 * 0.7 * 0.95 * 0.9).epsilon(1e-12));
        CHECK(m.assignment.size() == a.net.size());
        const auto with_d = max_joint_assignment(a.net, Evidence{{a.D, 0}});
        CHECK(*with_d.assignment.get(a.B) == 0);
        CHECK(*with_d.assignment.get(a.S) == 0);
        const auto full = enumerate_distribution(a.net, Evidence{{a.D, 0}});
        CHECK(with_d.joint == doctest::Approx(*std::max_element(full.values().begin(), full.values().end())));
    }

    TEST_CASE("d-separation on Asia") {
        Asia a;
        CHECK(d_separated(a.net, {a.A}, {a.S}, {}));
        CHECK_FALSE(d_separated(a.net, {a.A}, {a.S}, {a.D}));  // collider descendant observed
        CHECK(d_separated(a.net, {a.T}, {a.C}, {}));
        CHECK_FALSE(d_separated(a.net, {a.T}, {a.C}, {a.P}));
        CHECK_FALSE(d_separated(a.net, {a.T}, {a.C}, {a.X}));
        CHECK(d_separated(a.net, {a.C}, {a.B}, {a.S}));
        CHECK_FALSE(d_separated(a.net, {a.C}, {a.B}, {a.S, a.D}));
        CHECK(d_separated(a.net, {a.A}, {a.X}, {a.P}));
        CHECK_FALSE(d_separated(a.net, {a.A}, {a.X}, {}));
        CHECK_THROWS_AS(d_separated(a.net, {a.A}, {a.A}, {}), UsageError);
        CHECK_THROWS_AS(d_separated(a.net, {a.A}, {a.X}, {a.X}), UsageError);
        CHECK_THROWS_AS(d_separated(a.net, {}, {a.X}, {}), UsageError);
    }

    TEST_CASE("min-fill order is deterministic and breaks ties by id") {
        Asia a;
        std::vector<Factor> factors;
        for (VarId v = 0; v < a.net.size(); ++v) factors.push_back(Factor::from_cpt(a.net, v));
        std::vector<VarId> all(a.net.size());
        for (VarId v = 0; v < all.size(); ++v) all[v] = v;
        const auto order = min_fill_order(factors, all);
        CHECK(order.size() == all.size());
        CHECK(order == min_fill_order(factors, all));
        CHECK(order.front() == a.A);  // no fill-in, smallest id
    }
}
