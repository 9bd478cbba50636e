#pragma once

#include <cmath>
#include <vector>

#include "uavdc/rng.hpp"
#include "uavdc/scenario.hpp"

namespace testing {

/// Scenario from explicit sensor positions and priorities with one UAV per
/// start. t0 and dwell default to zero so hand computations stay simple.
inline uavdc::Scenario make_scenario(const std::vector<uavdc::Point>& positions, const std::vector<double>& priorities,
                                     const std::vector<uavdc::Point>& starts, uavdc::Point end, double battery,
                                     double speed = 1.0, double t0 = 0.0, double dwell = 0.0) {
    uavdc::Scenario s;
    s.field = {1000.0, 1000.0};
    s.takeoff_landing_s = t0;
    s.dwell_s = dwell;
    for (std::size_t j = 0; j < positions.size(); ++j)
        s.sensors.push_back({static_cast<int>(j) + 1, positions[j], priorities[j]});
    for (std::size_t i = 0; i < starts.size(); ++i) {
        uavdc::UavSpec u;
        u.id = static_cast<int>(i) + 1;
        u.start = starts[i];
        u.battery_s = battery;
        u.speed_mps = speed;
        s.uavs.push_back(u);
    }
    s.end = end;
    return s;
}

/// Uniformly scattered sensors in a `side` x `side` square with U(1,100)
/// priorities and q UAVs on the boundary.
inline uavdc::Scenario random_scenario(int n, int q, double side, double battery, std::uint64_t seed,
                                       double speed = 1.0, double t0 = 0.0, double dwell = 0.0) {
    uavdc::Rng rng(seed);
    std::vector<uavdc::Point> pos;
    std::vector<double> rho;
    for (int j = 0; j < n; ++j) {
        pos.push_back({rng.uniform(0.0, side), rng.uniform(0.0, side)});
        rho.push_back(rng.uniform(1.0, 100.0));
    }
    std::vector<uavdc::Point> starts;
    for (int i = 0; i < q; ++i) starts.push_back({side * (i + 0.5) / q, 0.0});
    uavdc::Scenario s = make_scenario(pos, rho, starts, {side / 2, side / 2}, battery, speed, t0, dwell);
    s.field = {side, side};
    return s;
}

inline double dist(uavdc::Point a, uavdc::Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Independent flight-time computation straight from coordinates.
inline double flight_time(const uavdc::Scenario& s, const uavdc::UavSpec& u, const std::vector<int>& order) {
    double t = s.takeoff_landing_s;
    uavdc::Point at = u.start;
    for (const int id : order) {
        const uavdc::Point p = s.sensors[static_cast<std::size_t>(id - 1)].position;
        t += dist(at, p) / u.speed_mps + s.dwell_s;
        at = p;
    }
    return t + dist(at, s.end) / u.speed_mps + s.takeoff_landing_s;
}

inline bool close(double a, double b, double rel = 1e-12) {
    return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace testing
