#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "helpers.hpp"
#include "uavdc/errors.hpp"
#include "uavdc/oracle.hpp"
#include "uavdc/planner.hpp"

using namespace uavdc;
using testing::make_scenario;

namespace {

PlannerConfig quick_config(std::uint64_t seed) {
    PlannerConfig c;
    c.seed = seed;
    c.de.population_size = 30;
    c.de.max_generations = 120;
    c.cluster_restarts = 10;
    return c;
}

void check_disjoint_cover(const Plan& plan, const Scenario& s) {
    std::vector<int> seen(s.sensors.size(), 0);
    for (const Route& r : plan.routes)
        for (const int id : r.visit_order) ++seen[static_cast<std::size_t>(id - 1)];
    for (const int id : plan.abandoned) ++seen[static_cast<std::size_t>(id - 1)];
    for (const int c : seen) CHECK(c == 1);
    CHECK(std::is_sorted(plan.abandoned.begin(), plan.abandoned.end()));
}

void check_no_violation(const Plan& plan, const Scenario& s, const DistanceMatrix& dm) {
    for (const Route& r : plan.routes) {
        const UavSpec& u = s.uav(r.uav_id);
        const double t = route_duration(r.visit_order, u, s, dm).return_time;
        CHECK(t == r.return_time);
        CHECK(energy_used(u, t) <= u.battery_s);
    }
}

}  // namespace

TEST_SUITE("planner") {
    TEST_CASE("assignment matches permutation search") {
        Rng rng(31);
        for (int trial = 0; trial < 40; ++trial) {
            const std::size_t rows = 1 + rng.index(5);
            const std::size_t cols = rows + rng.index(3);
            std::vector<std::vector<double>> cost(rows, std::vector<double>(cols));
            for (auto& row : cost)
                for (double& c : row) c = std::floor(rng.uniform(0, 20));
            const auto got = solve_assignment(cost);
            std::set<std::size_t> distinct(got.begin(), got.end());
            CHECK(distinct.size() == rows);
            double mine = 0.0;
            for (std::size_t r = 0; r < rows; ++r) mine += cost[r][got[r]];

            std::vector<std::size_t> perm(cols);
            std::iota(perm.begin(), perm.end(), std::size_t{0});
            double best = 1e300;
            do {
                double total = 0.0;
                for (std::size_t r = 0; r < rows; ++r) total += cost[r][perm[r]];
                best = std::min(best, total);
            } while (std::next_permutation(perm.begin(), perm.end()));
            CHECK(mine == best);
        }
        CHECK_THROWS_AS(solve_assignment({{1.0}, {2.0}}), ValidationError);
    }

    TEST_CASE("clusters go to the nearest starts") {
        const Scenario s = make_scenario({{1, 1}}, {1}, {{0, 0}, {100, 0}, {100, 100}}, {50, 50}, 1000);
        const std::vector<Point> centroids{{95, 95}, {5, 5}};
        CHECK(match_clusters_to_uavs(centroids, s) == std::vector<int>{3, 1});
    }

    TEST_CASE("slack budget abandons nothing and collaboration changes nothing") {
        const Scenario s = generate_scenario(30, 3, {1000, 1000}, 4, {6, 1.0 / 12, 1e6, 1.0, 10.0, 15.0, 20.0});
        const PlannerConfig c = quick_config(2);
        const PlanResult nc = plan_non_collaborative(s, c);
        CHECK(nc.plan.abandoned.empty());
        const PlanResult co = plan_collaborative(s, c);
        CHECK(co.plan.routes == nc.plan.routes);
        CHECK(co.plan.abandoned == nc.plan.abandoned);
        CHECK(co.plan.mode == PlanMode::Collaborative);
    }

    TEST_CASE("non-collaborative plans are sound and traced") {
        const Scenario s = generate_scenario(60, 4, {3400, 3400}, 3);
        const DistanceMatrix dm(s);
        const PlannerConfig c = quick_config(5);
        const PlanResult r = plan_non_collaborative(s, c);
        check_disjoint_cover(r.plan, s);
        check_no_violation(r.plan, s, dm);
        CHECK(r.plan.owner.size() == 60);
        for (std::size_t j = 0; j < 60; ++j)
            CHECK(r.plan.owner[j] == r.cluster_uav[static_cast<std::size_t>(r.clusters.labels[j] - 1)]);
        for (const Route& route : r.plan.routes)
            for (const int id : route.visit_order) CHECK(r.plan.owner[static_cast<std::size_t>(id - 1)] == route.uav_id);
        for (const UavTrace& t : r.traces) {
            CHECK(t.stage == "cluster");
            REQUIRE(t.rows.size() == static_cast<std::size_t>(c.de.max_generations + 1));
            for (std::size_t g = 1; g < t.rows.size(); ++g) CHECK(t.rows[g].best_cost <= t.rows[g - 1].best_cost);
            for (const TraceRow& row : t.rows) CHECK(row.violation_sum == 0.0);
        }
        const auto fleet = fleet_trace(r.traces);
        REQUIRE(fleet.size() == static_cast<std::size_t>(c.de.max_generations + 1));
        double last = 0.0;
        for (const UavTrace& t : r.traces) last += t.rows.back().best_cost;
        CHECK(fleet.back().best_cost == doctest::Approx(last));
        CHECK(trace_csv(fleet).rfind("generation,best_cost,mean_cost,violation_sum,tdiff_sum\n", 0) == 0);
    }

    TEST_CASE("collaborative plans stay sound and visit at least as many") {
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            const Scenario s = generate_scenario(80, 4, {3400, 3400}, seed);
            const DistanceMatrix dm(s);
            const PlannerConfig c = quick_config(seed);
            const ComparisonReport rep = compare_modes(s, c);
            check_disjoint_cover(rep.collaborative.plan, s);
            check_no_violation(rep.collaborative.plan, s, dm);
            CHECK(rep.collaborative.metrics.fleet.visited >= rep.non_collaborative.metrics.fleet.visited);
            CHECK(rep.cost_reduction ==
                  doctest::Approx(1.0 - rep.collaborative.metrics.fleet.cost / rep.non_collaborative.metrics.fleet.cost));
            CHECK_FALSE(oracle::any_feasible_insertion(rep.collaborative.plan, s, dm));
        }
    }

    TEST_CASE("single UAV plan matches the permutation oracle") {
        int hits = 0;
        for (std::uint64_t seed = 1; seed <= 6; ++seed) {
            Scenario s = testing::random_scenario(6, 1, 400, 1, seed, 1.0, 5.0, 10.0);
            const DistanceMatrix dm(s);
            s.uavs[0].battery_s = 0.8 * route_duration(std::vector<int>{1, 2, 3, 4, 5, 6}, s.uavs[0], s, dm).return_time;
            const PlannerConfig c = quick_config(seed);
            const PlanResult r = plan_non_collaborative(s, c);
            std::vector<int> ids{1, 2, 3, 4, 5, 6};
            const auto best = oracle::brute_force_route(ids, s.uavs[0], s, dm, c.weights);
            CHECK(r.cost.total() >= best.value * (1 - 1e-12));
            if (r.cost.total() <= best.value * (1 + 1e-12)) ++hits;
        }
        CHECK(hits >= 5);
    }

    TEST_CASE("sensor on the final leg gets inserted") {
        // UAV 1 flies (0,0) -> sensor 1 at (0,50) -> end (0,100); sensor 2 sits on that last leg.
        Scenario s = make_scenario({{0, 50}, {0, 75}}, {10, 10}, {{0, 0}}, {0, 100}, 200.0, 1.0, 0.0, 5.0);
        const DistanceMatrix dm(s);
        Plan plan;
        plan.routes.push_back(make_route(1, {1}, s, dm));
        plan.abandoned = {2};
        const Plan out = reassign_abandoned(plan, s, dm);
        CHECK(out.abandoned.empty());
        CHECK(out.routes[0].visit_order == std::vector<int>{1, 2});
        check_no_violation(out, s, dm);
    }

    TEST_CASE("no slack leaves the plan unchanged") {
        Scenario s = make_scenario({{0, 50}, {10, 60}}, {10, 10}, {{0, 0}}, {0, 100}, 1.0, 1.0, 0.0, 5.0);
        const DistanceMatrix dm(s);
        Plan plan;
        plan.routes.push_back(make_route(1, {1}, s, dm));
        s.uavs[0].battery_s = plan.routes[0].return_time + 4.0;  // less than one dwell
        plan.abandoned = {2};
        CHECK(reassign_abandoned(plan, s, dm) == plan);
    }

    TEST_CASE("hand-built absorption matches exhaustive insertion search") {
        // Two slack UAVs either side of three abandoned sensors; each UAV can take some but not all.
        const Scenario s = make_scenario({{100, 100}, {900, 100}, {480, 500}, {520, 520}, {500, 560}},
                                         {20, 20, 50, 60, 70}, {{0, 0}, {1000, 0}}, {500, 0}, 1.0, 1.0, 0.0, 30.0);
        Scenario tuned = s;
        const DistanceMatrix dm(tuned);
        Plan plan;
        plan.routes.push_back(make_route(1, {1}, tuned, dm));
        plan.routes.push_back(make_route(2, {2}, tuned, dm));
        tuned.uavs[0].battery_s = plan.routes[0].return_time + 900.0;
        tuned.uavs[1].battery_s = plan.routes[1].return_time + 880.0;
        plan.abandoned = {3, 4, 5};
        for (const bool append : {false, true}) {
            const Plan out = reassign_abandoned(plan, tuned, dm, {append});
            const auto best = oracle::max_absorption(plan, tuned, dm, append);
            CHECK(plan.abandoned.size() - out.abandoned.size() == best.witness.size());
            check_disjoint_cover(out, tuned);
            check_no_violation(out, tuned, dm);
        }
    }

    TEST_CASE("failed UAV hands its remainder to the fleet") {
        const Scenario s = generate_scenario(40, 3, {2000, 2000}, 6, {6, 1.0 / 12, 1e5, 1.0, 10.0, 15.0, 20.0});
        const DistanceMatrix dm(s);
        const PlanResult r = plan_non_collaborative(s, quick_config(1));
        const Route& before = r.plan.routes[1];
        REQUIRE(before.visit_order.size() > 3);
        const Plan failed = fail_uav(r.plan, 2, 3, s, dm);
        CHECK(failed.routes[1].failed);
        CHECK(failed.routes[1].visit_order ==
              std::vector<int>(before.visit_order.begin(), before.visit_order.begin() + 3));
        CHECK(failed.abandoned.size() == before.visit_order.size() - 3);
        check_disjoint_cover(failed, s);

        const Plan healed = reassign_abandoned(failed, s, dm);
        check_disjoint_cover(healed, s);
        check_no_violation(healed, s, dm);
        CHECK(healed.abandoned.empty());
        CHECK(healed.routes[1].visit_order == failed.routes[1].visit_order);
        CHECK(healed.routes[1].failed);

        CHECK_THROWS_AS(fail_uav(r.plan, 9, 0, s, dm), ValidationError);
    }

    TEST_CASE("unbounded budgets make both modes equal up to the slack term") {
        const Scenario s = generate_scenario(40, 4, {3400, 3400}, 2, {6, 1.0 / 12, 1e7, 1.0, 10.0, 15.0, 20.0});
        const ComparisonReport rep = compare_modes(s, quick_config(3));
        CHECK(rep.visited_ratio_non_collaborative == 1.0);
        CHECK(rep.visited_ratio_collaborative == 1.0);
        const double nc = rep.non_collaborative.cost.total();
        CHECK(std::abs(rep.cost_reduction) <= rep.collaborative.cost.slack_term / nc + 1e-12);
        CHECK(rep.collaborative.plan.routes == rep.non_collaborative.plan.routes);
    }

    TEST_CASE("comparison is deterministic and its csv schema stable") {
        const Scenario s = generate_scenario(50, 4, {3400, 3400}, 9);
        const PlannerConfig c = quick_config(9);
        const ComparisonReport a = compare_modes(s, c);
        const ComparisonReport b = compare_modes(s, c);
        CHECK(comparison_csv_row("x", a) == comparison_csv_row("x", b));
        CHECK(a.collaborative.plan == b.collaborative.plan);
        const std::string header = comparison_csv_header();
        const std::string row = comparison_csv_row("x", a);
        CHECK(std::count(header.begin(), header.end(), ',') == std::count(row.begin(), row.end(), ','));
        CHECK(comparison_table(a).find("Time difference") != std::string::npos);
    }

    TEST_CASE("thread count does not change the plan") {
        const Scenario s = generate_scenario(50, 4, {3400, 3400}, 12);
        PlannerConfig c = quick_config(4);
        c.mode = PlanMode::Collaborative;
        const PlanResult one = plan_mission(s, c);
        c.threads = 4;
        const PlanResult four = plan_mission(s, c);
        CHECK(one.plan == four.plan);
    }

    TEST_CASE("unreachable end position") {
        const Scenario s = make_scenario({{1, 1}}, {1}, {{0, 0}}, {900, 900}, 100);
        CHECK_THROWS_AS(plan_non_collaborative(s, quick_config(1)), InfeasibleScenarioError);
    }

    TEST_CASE("fewer sensors than UAVs") {
        const Scenario s = make_scenario({{10, 10}, {990, 990}}, {5, 5}, {{0, 0}, {1000, 1000}, {0, 1000}}, {500, 500}, 5000);
        const PlanResult r = plan_non_collaborative(s, quick_config(1));
        CHECK(r.clusters.k == 2);
        CHECK(r.plan.routes.size() == 3);
        CHECK(r.plan.abandoned.empty());
        CHECK(r.plan.routes[2].visit_order.empty());
    }
}

TEST_SUITE("oracle") {
    TEST_CASE("single sensor has one permutation") {
        const Scenario s = make_scenario({{3, 4}}, {5}, {{0, 0}}, {0, 0}, 100);
        const DistanceMatrix dm(s);
        const auto r = oracle::brute_force_route(std::vector<int>{1}, s.uavs[0], s, dm);
        CHECK(r.examined == 1);
        CHECK(r.witness == std::vector<int>{1});
        CHECK(r.value == doctest::Approx(10.0));
    }

    TEST_CASE("collinear sensors are swept in line") {
        const Scenario s = make_scenario({{30, 0}, {10, 0}, {20, 0}}, {5, 5, 5}, {{0, 0}}, {40, 0}, 1000);
        const DistanceMatrix dm(s);
        const auto r = oracle::brute_force_route(std::vector<int>{1, 2, 3}, s.uavs[0], s, dm);
        CHECK(r.witness == std::vector<int>{2, 3, 1});
        CHECK(r.value == doctest::Approx(40.0));
    }

    TEST_CASE("size limits") {
        const Scenario s = testing::random_scenario(11, 1, 100, 1e5, 1);
        const DistanceMatrix dm(s);
        std::vector<int> ids(10);
        std::iota(ids.begin(), ids.end(), 1);
        CHECK_THROWS_AS(oracle::brute_force_route(ids, s.uavs[0], s, dm), OracleSizeError);
        CHECK_THROWS_AS(oracle::brute_force_partition(s, dm, 2), OracleSizeError);
    }

    TEST_CASE("partition enumeration") {
        const Scenario s = testing::random_scenario(6, 1, 100, 1e5, 3);
        const DistanceMatrix dm(s);
        const auto one = oracle::brute_force_partition(s, dm, 1);
        CHECK(one.examined == 1);
        CHECK(one.value == clustering_objective(std::vector<int>(6, 1), 1, s, dm));
        CHECK(oracle::brute_force_partition(s, dm, 2).examined == 31);  // S(6,2)
        CHECK(oracle::brute_force_partition(s, dm, 3).examined == 90);  // S(6,3)
    }
}
