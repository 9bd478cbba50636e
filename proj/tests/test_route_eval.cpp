#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "helpers.hpp"
#include "uavdc/errors.hpp"
#include "uavdc/route_eval.hpp"

using namespace uavdc;
using testing::make_scenario;

namespace {

bool fits(const Scenario& s, const DistanceMatrix& dm, const UavSpec& u, const std::vector<int>& order) {
    return energy_used(u, route_duration(order, u, s, dm).return_time) <= u.battery_s;
}

}  // namespace

TEST_SUITE("route_eval") {
    TEST_CASE("direct flight") {
        const Scenario s = make_scenario({{50, 50}}, {1}, {{0, 0}}, {0, 100}, 1000, 1.0, 10.0, 0.0);
        const DistanceMatrix dm(s);
        const RouteTiming t = route_duration({}, s.uavs[0], s, dm);
        CHECK(t.return_time == 120.0);
        CHECK(t.total_distance == 100.0);
        CHECK(t.arrival_times.empty());
    }

    TEST_CASE("zero-distance legs") {
        const Scenario s = make_scenario({{5, 5}}, {1}, {{5, 5}}, {5, 5}, 1000, 1.0, 10.0, 20.0);
        const DistanceMatrix dm(s);
        const std::vector<int> order{1};
        const RouteTiming t = route_duration(order, s.uavs[0], s, dm);
        CHECK(t.return_time == 40.0);
        REQUIRE(t.arrival_times.size() == 1);
        CHECK(t.arrival_times[0] == 30.0);
    }

    TEST_CASE("leg-by-leg summation oracle") {
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const Scenario s = testing::random_scenario(6, 1, 400, 5000, seed, 2.5, 7.0, 13.0);
            const DistanceMatrix dm(s);
            std::vector<int> order(6);
            std::iota(order.begin(), order.end(), 1);
            Rng rng(seed);
            for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[rng.index(i + 1)]);
            const RouteTiming t = route_duration(order, s.uavs[0], s, dm);
            CHECK(std::abs(t.return_time - testing::flight_time(s, s.uavs[0], order)) <= 1e-9);
            for (std::size_t k = 1; k < t.arrival_times.size(); ++k) CHECK(t.arrival_times[k] > t.arrival_times[k - 1]);
        }
    }

    TEST_CASE("unknown sensor id") {
        const Scenario s = make_scenario({{1, 1}}, {1}, {{0, 0}}, {0, 0}, 100);
        const DistanceMatrix dm(s);
        const std::vector<int> order{2};
        CHECK_THROWS_AS(route_duration(order, s.uavs[0], s, dm), ValidationError);
    }

    TEST_CASE("random-key decoding") {
        const std::vector<double> keys{0.7, 0.1, 0.4, 0.1};
        const std::vector<int> ids{10, 20, 30, 5};
        CHECK(decode_keys(keys, ids) == std::vector<int>{5, 20, 30, 10});
    }

    TEST_CASE("feasible order passes through truncation") {
        const Scenario s = make_scenario({{10, 0}, {20, 0}}, {3, 4}, {{0, 0}}, {30, 0}, 1000);
        const DistanceMatrix dm(s);
        const std::vector<int> order{1, 2};
        const Truncation t = truncate_to_budget(order, s.uavs[0], s, dm);
        CHECK(t.feasible_order == order);
        CHECK(t.abandoned.empty());
    }

    TEST_CASE("budget for the direct flight only abandons everything") {
        const Scenario s = make_scenario({{0, 50}, {30, 50}, {60, 50}}, {5, 50, 90}, {{0, 0}}, {100, 0}, 100.0);
        const DistanceMatrix dm(s);
        const std::vector<int> order{1, 2, 3};
        const Truncation t = truncate_to_budget(order, s.uavs[0], s, dm);
        CHECK(t.feasible_order.empty());
        CHECK(t.abandoned == std::vector<int>{1, 2, 3});
    }

    TEST_CASE("even the direct flight over budget") {
        const Scenario s = make_scenario({{0, 50}}, {5}, {{0, 0}}, {100, 0}, 99.0);
        const DistanceMatrix dm(s);
        CHECK_THROWS_AS(truncate_to_budget(std::vector<int>{1}, s.uavs[0], s, dm), InfeasibleScenarioError);
    }

    TEST_CASE("equal priorities remove the larger detour first") {
        // Sensor 2 sits far off the line, sensor 1 on it.
        const Scenario s = make_scenario({{50, 0}, {50, 40}}, {10, 10}, {{0, 0}}, {100, 0}, 140.0);
        const DistanceMatrix dm(s);
        const Truncation t = truncate_to_budget(std::vector<int>{1, 2}, s.uavs[0], s, dm);
        CHECK(t.abandoned == std::vector<int>{2});
        CHECK(t.feasible_order == std::vector<int>{1});
    }

    TEST_CASE("truncation properties against exhaustive removal search") {
        for (std::uint64_t seed = 1; seed <= 25; ++seed) {
            const Scenario s = testing::random_scenario(8, 1, 300, 1, seed, 1.0, 5.0, 10.0);
            Scenario tight = s;
            const DistanceMatrix dm(tight);
            std::vector<int> order(8);
            std::iota(order.begin(), order.end(), 1);
            const double direct = route_duration({}, s.uavs[0], s, dm).return_time;
            const double full = route_duration(order, s.uavs[0], s, dm).return_time;
            tight.uavs[0].battery_s = direct + (full - direct) * 0.45;
            const UavSpec& u = tight.uavs[0];

            const Truncation t = truncate_to_budget(order, u, tight, dm);
            REQUIRE(fits(tight, dm, u, t.feasible_order));
            CHECK(t.feasible_order.size() + t.abandoned.size() == order.size());
            CHECK(std::is_sorted(t.feasible_order.begin(), t.feasible_order.end()));

            // Putting the last removed sensor back must break the budget.
            if (!t.abandoned.empty()) {
                std::vector<int> back = t.feasible_order;
                back.push_back(t.abandoned.back());
                std::sort(back.begin(), back.end());
                CHECK_FALSE(fits(tight, dm, u, back));
            }

            // Every subsequence with the survivors' cardinality carries no more priority.
            double mine = 0.0;
            for (const int id : t.feasible_order) mine += tight.sensor(id).priority;
            const std::size_t keep = t.feasible_order.size();
            for (unsigned mask = 0; mask < (1u << 8); ++mask) {
                if (static_cast<std::size_t>(__builtin_popcount(mask)) != keep) continue;
                std::vector<int> sub;
                double rho = 0.0;
                for (int j = 0; j < 8; ++j)
                    if (mask & (1u << j)) {
                        sub.push_back(j + 1);
                        rho += tight.sensor(j + 1).priority;
                    }
                if (fits(tight, dm, u, sub)) CHECK(mine >= rho - 1e-9);
            }
        }
    }

    TEST_CASE("time difference and violation sign conventions") {
        UavSpec u;
        u.battery_s = 3600;
        CHECK(time_difference(u, 3581) == doctest::Approx(19.0));
        CHECK(time_violation(u, 3581) == 0.0);
        CHECK(time_difference(u, 3600) == 0.0);
        CHECK(time_violation(u, 3600) == 0.0);
        CHECK(time_difference(u, 3605) == doctest::Approx(-5.0));
        CHECK(time_violation(u, 3605) == doctest::Approx(5.0));
        u.energy_rate = 2.0;
        CHECK(time_difference(u, 1000) == doctest::Approx(1600.0));
    }

    TEST_CASE("abandonment-only cost") {
        const int n = 6;
        std::vector<Point> pos(n, Point{0, 0});
        const Scenario s = make_scenario(pos, std::vector<double>(n, 1.0), {{0, 0}}, {0, 0}, 100);
        const DistanceMatrix dm(s);
        Plan plan;
        plan.routes.push_back(make_route(1, {}, s, dm));
        for (int j = 1; j <= n; ++j) plan.abandoned.push_back(j);
        const CostBreakdown c = mission_cost(plan, s, dm, {1.0, 1.0, 1000.0, 0.5});
        CHECK(c.total() == doctest::Approx(n));
        CHECK(c.abandon_term == doctest::Approx(n));
    }

    TEST_CASE("feasible non-collaborative plan costs its duration") {
        const Scenario s = make_scenario({{10, 0}, {0, 10}}, {5, 5}, {{0, 0}, {0, 0}}, {0, 0}, 1000, 1.0, 3.0, 2.0);
        const DistanceMatrix dm(s);
        Plan plan;
        plan.routes.push_back(make_route(1, {1}, s, dm));
        plan.routes.push_back(make_route(2, {2}, s, dm));
        check_plan(plan, s);
        const CostBreakdown c = mission_cost(plan, s, dm);
        CHECK(c.total() == doctest::Approx(2 * (3 + 10 + 2 + 10 + 3)));
        CHECK(c.slack_term == 0.0);

        plan.mode = PlanMode::Collaborative;
        const CostBreakdown cc = mission_cost(plan, s, dm);
        CHECK(cc.slack_term == doctest::Approx(0.5 * 2 * (1000 - 28)));
    }

    TEST_CASE("negative weights are a config error") {
        const CostWeights w{1.0, -1.0, 1.0, 1.0};
        CHECK_THROWS_AS(w.validate(), ConfigError);
    }

    TEST_CASE("plan checks") {
        const Scenario s = make_scenario({{1, 0}, {2, 0}, {3, 0}}, {1, 1, 1}, {{0, 0}}, {0, 0}, 1000);
        const DistanceMatrix dm(s);
        Plan plan;
        plan.routes.push_back(make_route(1, {1, 2}, s, dm));
        plan.abandoned = {3};
        CHECK_NOTHROW(check_plan(plan, s));
        plan.abandoned = {2, 3};
        CHECK_THROWS_AS(check_plan(plan, s), ValidationError);
        plan.abandoned = {};
        CHECK_THROWS_AS(check_plan(plan, s), ValidationError);
    }

    TEST_CASE("metrics sum to the fleet row and cost") {
        const Scenario s = testing::random_scenario(9, 3, 300, 700, 4, 1.0, 5.0, 10.0);
        const DistanceMatrix dm(s);
        Plan plan;
        plan.routes.push_back(make_route(1, {1, 2, 3}, s, dm));
        plan.routes.push_back(make_route(2, {4, 5}, s, dm));
        plan.routes.push_back(make_route(3, {6}, s, dm));
        plan.abandoned = {7, 8, 9};
        plan.owner = {1, 1, 1, 2, 2, 3, 2, 3, 0};
        for (const PlanMode mode : {PlanMode::NonCollaborative, PlanMode::Collaborative}) {
            plan.mode = mode;
            const RouteMetrics m = plan_metrics(plan, s, dm);
            const CostBreakdown c = mission_cost(plan, s, dm);
            double cost = 0.0, tdiff = 0.0;
            int visited = 0;
            for (const auto& u : m.per_uav) {
                cost += u.cost;
                tdiff += u.time_difference;
                visited += u.visited;
            }
            // Sensor 9 has no owner, so only the fleet row carries its penalty.
            CHECK(m.fleet.cost == doctest::Approx(cost + 60.0 * s.sensor(9).priority));
            CHECK(m.fleet.cost == doctest::Approx(c.total()));
            CHECK(m.fleet.time_difference == doctest::Approx(tdiff));
            CHECK(m.fleet.visited == visited);
            CHECK(visited == 6);
        }
        const std::string csv = metrics_csv(plan_metrics(plan, s, dm));
        CHECK(csv.rfind("uav,operation_cost,operation_duration_s,time_difference_s,visited_sensors,travelled_distance_m,"
                        "time_violation_s\n",
                        0) == 0);
        CHECK(csv.find("\ntotal,") != std::string::npos);
    }

    TEST_CASE("mode names") {
        CHECK(parse_plan_mode("collaborative") == PlanMode::Collaborative);
        CHECK(parse_plan_mode(to_string(PlanMode::NonCollaborative)) == PlanMode::NonCollaborative);
        CHECK_THROWS_AS(parse_plan_mode("solo"), ValidationError);
    }
}
