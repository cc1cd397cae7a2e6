#include <gtest/gtest.h>

#include "redzone/error.hpp"
#include "redzone/maintenance.hpp"

using namespace redzone;

namespace {

// Two mains in slots, controller_3 on the shelf.
SystemState fresh_state(double t, double age1, double age2, double age3) {
    SystemState s;
    s.time = t;
    s.units = {{UnitId::controller_1, age1, false}, {UnitId::controller_2, age2, false},
               {UnitId::controller_3, age3, false}};
    s.slots = {0, 1};
    s.shelf = 2;
    return s;
}

}  // namespace

TEST(PlanType1, InstallsSpareOnFailure) {
    auto s = fresh_state(220.0, 220.0, 220.0, 2.0);
    s.units[0].failed = true;
    const auto a = plan_type1(s, 0);
    ASSERT_TRUE(a);
    EXPECT_EQ(a->kind, ActionKind::replace_failed);
    EXPECT_EQ(a->slot, 0);
    EXPECT_EQ(a->unit_in, UnitId::controller_3);
    EXPECT_EQ(a->unit_out, UnitId::controller_1);
    EXPECT_EQ(a->time, 220.0);
}

TEST(PlanType1, NothingToInstall) {
    auto s = fresh_state(230.0, 230.0, 230.0, 10.0);
    s.shelf.reset();
    s.units[1].failed = true;
    EXPECT_FALSE(plan_type1(s, 1));
    auto failed_spare = fresh_state(230.0, 230.0, 230.0, 10.0);
    failed_spare.units[2].failed = true;
    EXPECT_FALSE(plan_type1(failed_spare, 0));
    EXPECT_FALSE(plan_type1(fresh_state(1.0, 1.0, 1.0, 2.0), -1));
}

TEST(PlanType2, TieGoesToLowerSlot) {
    const double p = 200.0 / 6.0;
    const auto a = plan_type2(fresh_state(p, p, p, 0.0), p);
    ASSERT_TRUE(a);
    EXPECT_EQ(a->kind, ActionKind::rotate);
    EXPECT_EQ(a->slot, 0);
    EXPECT_EQ(a->unit_in, UnitId::controller_3);
    EXPECT_EQ(a->unit_out, UnitId::controller_1);
}

TEST(PlanType2, OldestIsRotatedOut) {
    // After the first rotation controller_3 sits in slot 0 with age P and
    // controller_2 in slot 1 with age 2P.
    const double p = 200.0 / 6.0;
    SystemState s = fresh_state(2 * p, p, 2 * p, p);
    s.slots = {2, 1};
    s.shelf = 0;
    const auto a = plan_type2(s, 2 * p);
    ASSERT_TRUE(a);
    EXPECT_EQ(a->slot, 1);
    EXPECT_EQ(a->unit_out, UnitId::controller_2);
    EXPECT_EQ(a->unit_in, UnitId::controller_1);
}

TEST(PlanType2, SuspendedWhenShelfEmpty) {
    auto s = fresh_state(100.0, 100.0, 100.0, 0.0);
    s.shelf.reset();
    EXPECT_FALSE(plan_type2(s, 100.0));
}

TEST(DecisionPoint, VendorRule) {
    const auto dp = decision_point_type1(0.0, 200.0, 0.8);
    EXPECT_EQ(dp.time, 160.0);
    EXPECT_EQ(dp.rule, DpRule::vendor_mtbf);
    EXPECT_THROW(decision_point_type1(0.0, 0.0, 0.8), DomainError);
}

TEST(DecisionPoint, ShelfEmptyRuleFromTrace) {
    Trace tr;
    tr.events = {{295.0, EventKind::failure, UnitId::controller_1, 0},
                 {295.0, EventKind::replace, UnitId::controller_3, 0},
                 {295.0, EventKind::dp, std::nullopt, std::nullopt},
                 {300.0, EventKind::failure, UnitId::controller_2, 1},
                 {300.0, EventKind::failure, UnitId::controller_3, 0},
                 {300.0, EventKind::system_death, std::nullopt, std::nullopt}};
    tr.tdt = 300.0;
    const auto dp = decision_point_type2(tr);
    ASSERT_TRUE(dp);
    EXPECT_EQ(dp->time, 295.0);
    EXPECT_EQ(dp->rule, DpRule::shelf_empty);
    EXPECT_EQ(dp->margin, 5.0);

    Trace survivors;
    survivors.censored = true;
    EXPECT_FALSE(decision_point_type2(survivors));
}

TEST(RedZoneCondition, StrictInequality) {
    EXPECT_TRUE(red_zone_condition(10.0, 20.0));
    EXPECT_FALSE(red_zone_condition(30.0, 20.0));
    EXPECT_FALSE(red_zone_condition(20.0, 20.0));
    EXPECT_THROW(red_zone_condition(-1.0, 20.0), DomainError);
    EXPECT_THROW(red_zone_condition(1.0, 0.0), DomainError);
}

TEST(RedZoneCondition, Monotone) {
    for (double th3 : {5.0, 40.0, 100.0}) {
        bool seen_false = false;
        for (double d = 0.0; d < 3 * th3; d += 0.25) {
            const bool c = red_zone_condition(d, th3);
            if (seen_false) EXPECT_FALSE(c);
            seen_false = seen_false || !c;
        }
    }
}

TEST(Policy, Validation) {
    EXPECT_NO_THROW(Policy::type1().validate());
    EXPECT_THROW(Policy::type2(0.0).validate(), ConfigError);
    EXPECT_NO_THROW(Policy::type2(10.0).validate());
    EXPECT_EQ(policy_kind_from_string("type2"), PolicyKind::type2);
    EXPECT_THROW(policy_kind_from_string("type3"), ConfigError);
    EXPECT_NEAR(default_rotation_period(220.0), 220.0 / 6.0, 1e-12);
}
