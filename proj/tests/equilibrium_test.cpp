#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "repomech/equilibrium.hpp"
#include "repomech/errors.hpp"

using namespace repomech;

namespace {
Market ref_market() {
    return make_market(ScheduleModel::analytic(Side::demand, Family::sqrt_curve, 1.0, 6.0),
                       ScheduleModel::analytic(Side::supply, Family::sqrt_curve, 1.0, 6.0));
}
}  // namespace

TEST_CASE("interdealer rate splits the spread at the midpoint") {
    CHECK(interdealer_rate(1.0, 5.0) == doctest::Approx(3.0));
    CHECK(interdealer_rate(2.0, 2.0) == doctest::Approx(2.0));
    CHECK_THROWS_AS((void)interdealer_rate(2.0, 1.0), DomainError);
}

TEST_CASE("peak rates match the closed forms of the reference market") {
    auto m = ref_market();
    // cash side: argmax (r_rm - r) sqrt(r)  =>  r = r_rm / 3
    CHECK(peak_rate_mm(m, 6.0) == doctest::Approx(2.0).epsilon(1e-7));
    CHECK(peak_rate_mm(m, 3.0) == doctest::Approx(1.0).epsilon(1e-7));
    // securities side: argmax (r - r_mm) sqrt(6 - r)  =>  r = (12 + r_mm) / 3
    CHECK(peak_rate_rm(m, 0.0) == doctest::Approx(4.0).epsilon(1e-7));
    CHECK(peak_rate_rm(m, 3.0) == doctest::Approx(5.0).epsilon(1e-7));
}

TEST_CASE("dealer payoffs: spread share minus inventory carry") {
    auto m = ref_market();
    auto p = dealer_payoffs(m, 1.0, 5.0);  // balanced: both execute fully
    CHECK(p.mm == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(p.rm == doctest::Approx(2.0).epsilon(1e-12));

    // unbalanced (1, 4): supply side sources sqrt(2), only 1 executes
    auto q = dealer_payoffs(m, 1.0, 4.0);
    CHECK(q.mm == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(q.rm == doctest::Approx(-0.1568542494923806).epsilon(1e-9));
}

TEST_CASE("classify separates Nash from off-equilibrium pairs") {
    auto m = ref_market();

    auto nash = classify(m, 1.0, 5.0);
    CHECK(nash.balanced);
    CHECK(nash.nash);
    CHECK(nash.volume == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(nash.r_bd == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(nash.joint_profit == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(nash.constrained_mm);  // strictly below the 5/3 peak
    CHECK(nash.constrained_rm);  // strictly above the 13/3 peak

    // both rates exactly at their peaks: Nash, unconstrained
    auto peak = classify(m, 1.5, 4.5);
    CHECK(peak.balanced);
    CHECK(peak.nash);
    CHECK_FALSE(peak.constrained_mm);
    CHECK_FALSE(peak.constrained_rm);

    // unbalanced pair is never Nash
    CHECK_FALSE(classify(m, 2.0, 5.0).balanced);
    CHECK_FALSE(classify(m, 2.0, 5.0).nash);

    // balanced but past the cash-side peak
    auto past = classify(m, 2.5, 3.5);
    CHECK(past.balanced);
    CHECK_FALSE(past.nash);
}

TEST_CASE("seed walk lands on the Nash segment") {
    auto m = ref_market();

    auto a = equilibrium_from_seed(m, 1.0);
    CHECK(a.r_mm == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(a.r_rm == doctest::Approx(5.0).epsilon(1e-9));
    CHECK(a.nash);

    // seed past the peak region gets pulled back: (4/3, 14/3)
    auto b = equilibrium_from_seed(m, 2.0);
    CHECK(b.r_mm == doctest::Approx(4.0 / 3.0).epsilon(1e-7));
    CHECK(b.r_rm == doctest::Approx(14.0 / 3.0).epsilon(1e-7));
    CHECK(b.volume == doctest::Approx(1.1547005383792515).epsilon(1e-7));
    CHECK(b.joint_profit == doctest::Approx(3.849001794597505).epsilon(1e-6));
    CHECK(b.nash);

    // seeding at the crossing rate itself walks to (1, 5)
    auto c = equilibrium_from_seed(m, 3.0);
    CHECK(c.r_mm == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(c.r_rm == doctest::Approx(5.0).epsilon(1e-7));

    CHECK_THROWS_AS((void)equilibrium_from_seed(m, -0.1), DomainError);
    CHECK_THROWS_AS((void)equilibrium_from_seed(m, 3.5), DomainError);
}

TEST_CASE("enumerate walks evenly spaced seeds") {
    auto m = ref_market();

    auto one = enumerate_equilibria(m, 1);
    REQUIRE(one.size() == 1);
    CHECK(one[0].r_mm == doctest::Approx(0.0));
    CHECK(one[0].r_rm == doctest::Approx(6.0).epsilon(1e-9));
    CHECK(one[0].nash);

    auto five = enumerate_equilibria(m, 5);
    REQUIRE(five.size() == 5);
    for (const auto& p : five) {
        CHECK(p.balanced);
        CHECK(p.nash);
    }
    CHECK(five[1].r_mm == doctest::Approx(0.75).epsilon(1e-9));
    CHECK(five[1].volume == doctest::Approx(0.8660254037844386).epsilon(1e-9));
    CHECK(five[3].r_mm == doctest::Approx(1.25).epsilon(1e-7));  // pulled to peak
    CHECK(five[3].r_rm == doctest::Approx(4.75).epsilon(1e-7));
    CHECK(five[4].r_mm == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("joint-profit maximum hits the reference targets") {
    auto m = ref_market();
    auto jpm = max_joint_profit(m);
    CHECK(jpm.volume == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(jpm.r_mm == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(jpm.r_rm == doctest::Approx(5.0).epsilon(1e-6));
    CHECK(jpm.r_bd == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(jpm.joint_profit == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(jpm.nash);
}

TEST_CASE("hurdle-constrained maximum shrinks and then empties") {
    auto m = ref_market();

    auto loose = max_joint_profit(m, 2.0);  // binds exactly at the free optimum
    REQUIRE(loose.has_value());
    CHECK(loose->volume == doctest::Approx(1.0).epsilon(1e-6));

    auto tight = max_joint_profit(m, 2.5);
    REQUIRE(tight.has_value());
    CHECK(tight->volume == doctest::Approx(0.7071067811865476).epsilon(1e-6));
    CHECK(tight->joint_profit == doctest::Approx(3.5355339059327378).epsilon(1e-5));
    CHECK(tight->r_mm == doctest::Approx(0.5).epsilon(1e-5));
    CHECK(tight->r_rm == doctest::Approx(5.5).epsilon(1e-5));

    CHECK_FALSE(max_joint_profit(m, 3.0).has_value());  // hurdle == widest half-spread
    CHECK_FALSE(max_joint_profit(m, 3.1).has_value());
}

TEST_CASE("funding commitments translate volume floors to rate bounds") {
    auto m = ref_market();

    auto fc = derive_commitment(m, 0.25, 0.25);
    CHECK(fc.r_fc_mm == doctest::Approx(0.0625).epsilon(1e-9));
    CHECK(fc.r_fc_rm == doctest::Approx(5.9375).epsilon(1e-9));

    auto none = derive_commitment(m, 0.0, 0.0);
    CHECK(none.r_fc_mm == 0.0);
    CHECK(none.r_fc_rm == 6.0);

    CHECK_THROWS_AS((void)derive_commitment(m, 1.8, 0.0), InfeasibleCommitmentError);
    CHECK_THROWS_AS((void)derive_commitment(m, -0.1, 0.0), DomainError);
}

TEST_CASE("best responses: interior peak when the opponent leaves room") {
    auto m = ref_market();
    auto fc = derive_commitment(m, 0.0, 0.0);
    // S(4.2) = 1.342 exceeds D(1.4) = 1.183, so the interior peak r_rm / 3 is
    // attainable; likewise D(1.8) covers S(4.6) for the securities side.
    CHECK(best_response(m, Side::demand, 4.2, fc) == doctest::Approx(1.4).epsilon(1e-6));
    CHECK(best_response(m, Side::supply, 1.8, fc) == doctest::Approx(4.6).epsilon(1e-6));
    // opponent-limited: S(5) = 1 caps execution, so pushing past the matching
    // rate D(r) = 1 only worsens the split; the response pins to the kink.
    CHECK(best_response(m, Side::demand, 5.0, fc) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(best_response(m, Side::supply, 1.0, fc) == doctest::Approx(5.0).epsilon(1e-6));
}

TEST_CASE("commitment equilibrium converges onto the pledged floor") {
    auto m = ref_market();
    // securities-side floor of 1 pins r_rm at 5; dynamics settle at (1, 5)
    auto fc = derive_commitment(m, 0.0, 1.0);
    auto out = commitment_equilibrium(m, fc);
    CHECK(out.converged);
    CHECK(out.verified);
    CHECK(out.point.r_mm == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(out.point.r_rm == doctest::Approx(5.0).epsilon(1e-6));
}

TEST_CASE("equilibria CSV carries one row per seed") {
    auto m = ref_market();
    std::vector<double> seeds{0.0, 3.0};
    std::vector<EquilibriumPoint> pts{equilibrium_from_seed(m, 0.0),
                                      equilibrium_from_seed(m, 3.0)};
    std::ostringstream out;
    write_equilibria_csv(out, seeds, pts);
    std::string text = out.str();
    CHECK(text.rfind("seed,r_mm,r_rm,volume,spread,joint_profit,nash\n", 0) == 0);
    CHECK(text.find("\n0.000000000,") != std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
}
