#include "uavdc/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "parallel.hpp"
#include "uavdc/errors.hpp"
#include "uavdc/rng.hpp"

namespace uavdc {

namespace {

/// Dense pairwise weights with objective sum_g S_g / (2 |g|).
class PairwiseObjective {
public:
    PairwiseObjective(std::size_t n, std::vector<double> weights) : n_(n), w_(std::move(weights)) {}

    std::size_t size() const { return n_; }
    double weight(std::size_t a, std::size_t b) const { return w_[a * n_ + b]; }

    /// 0-based labels in [0, k).
    double evaluate(std::span<const int> labels, int k) const {
        std::vector<double> sums(static_cast<std::size_t>(k), 0.0);
        std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
        for (std::size_t a = 0; a < n_; ++a) {
            const auto g = static_cast<std::size_t>(labels[a]);
            ++sizes[g];
            for (std::size_t b = a + 1; b < n_; ++b)
                if (labels[b] == labels[a]) sums[g] += 2.0 * weight(a, b);
        }
        double total = 0.0;
        for (std::size_t g = 0; g < sums.size(); ++g)
            if (sizes[g] > 0) total += sums[g] / (2.0 * static_cast<double>(sizes[g]));
        return total;
    }

private:
    std::size_t n_;
    std::vector<double> w_;
};

double squared(Point a, Point b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

std::vector<Point> kmeanspp_centres(std::span<const Point> pts, int k, Rng& rng) {
    const std::size_t n = pts.size();
    std::vector<Point> centres;
    centres.reserve(static_cast<std::size_t>(k));
    centres.push_back(pts[rng.index(n)]);
    std::vector<double> d2(n);
    for (std::size_t a = 0; a < n; ++a) d2[a] = squared(pts[a], centres[0]);
    while (static_cast<int>(centres.size()) < k) {
        const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
        std::size_t pick = n - 1;
        if (total > 0.0) {
            const double r = rng.uniform() * total;
            double acc = 0.0;
            for (std::size_t a = 0; a < n; ++a) {
                acc += d2[a];
                if (r < acc) {
                    pick = a;
                    break;
                }
            }
        } else {
            pick = rng.index(n);
        }
        centres.push_back(pts[pick]);
        for (std::size_t a = 0; a < n; ++a) d2[a] = std::min(d2[a], squared(pts[a], centres.back()));
    }
    return centres;
}

std::vector<int> assign_nearest(std::span<const Point> pts, const std::vector<Point>& centres) {
    std::vector<int> labels(pts.size(), 0);
    for (std::size_t a = 0; a < pts.size(); ++a) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < centres.size(); ++c) {
            const double d = squared(pts[a], centres[c]);
            if (d < best) {
                best = d;
                labels[a] = static_cast<int>(c);
            }
        }
    }
    return labels;
}

std::vector<Point> group_means(std::span<const Point> pts, const std::vector<int>& labels, int k) {
    std::vector<Point> means(static_cast<std::size_t>(k));
    std::vector<std::size_t> count(static_cast<std::size_t>(k), 0);
    for (std::size_t a = 0; a < pts.size(); ++a) {
        const auto g = static_cast<std::size_t>(labels[a]);
        means[g].x += pts[a].x;
        means[g].y += pts[a].y;
        ++count[g];
    }
    for (std::size_t g = 0; g < means.size(); ++g)
        if (count[g]) {
            means[g].x /= static_cast<double>(count[g]);
            means[g].y /= static_cast<double>(count[g]);
        }
    return means;
}

// Moves the point contributing most to the objective into each empty group.
void repair_empty(std::vector<int>& labels, int k, const PairwiseObjective& obj) {
    const std::size_t n = labels.size();
    for (int e = 0; e < k; ++e) {
        std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
        for (const int l : labels) ++sizes[static_cast<std::size_t>(l)];
        if (sizes[static_cast<std::size_t>(e)] > 0) continue;
        std::size_t pick = n;
        double best = -1.0;
        for (std::size_t a = 0; a < n; ++a) {
            const auto g = static_cast<std::size_t>(labels[a]);
            if (sizes[g] < 2) continue;
            double contribution = 0.0;
            for (std::size_t b = 0; b < n; ++b)
                if (b != a && labels[b] == labels[a]) contribution += obj.weight(a, b);
            contribution /= static_cast<double>(sizes[g]);
            if (contribution > best) {
                best = contribution;
                pick = a;
            }
        }
        if (pick < n) labels[pick] = e;
    }
}

// Single-point moves on the exact objective until no move improves it.
double refine(std::vector<int>& labels, int k, const PairwiseObjective& obj, std::vector<double>& history) {
    const std::size_t n = labels.size();
    const auto K = static_cast<std::size_t>(k);
    std::vector<double> row(n * K, 0.0);  // row[a*K + g] = sum_{b in g} w(a, b)
    std::vector<double> sums(K, 0.0);
    std::vector<std::size_t> sizes(K, 0);
    for (std::size_t a = 0; a < n; ++a) {
        ++sizes[static_cast<std::size_t>(labels[a])];
        for (std::size_t b = 0; b < n; ++b)
            if (b != a) row[a * K + static_cast<std::size_t>(labels[b])] += obj.weight(a, b);
    }
    for (std::size_t a = 0; a < n; ++a) sums[static_cast<std::size_t>(labels[a])] += row[a * K + static_cast<std::size_t>(labels[a])];

    const auto term = [](double s, std::size_t m) { return m ? s / (2.0 * static_cast<double>(m)) : 0.0; };
    double current = obj.evaluate(labels, k);
    for (int pass = 0; pass < 1000; ++pass) {
        bool moved = false;
        for (std::size_t a = 0; a < n; ++a) {
            const auto from = static_cast<std::size_t>(labels[a]);
            if (sizes[from] < 2) continue;
            const double from_after = term(sums[from] - 2.0 * row[a * K + from], sizes[from] - 1);
            const double from_before = term(sums[from], sizes[from]);
            std::size_t best_to = from;
            double best_delta = -1e-12 * current;
            for (std::size_t to = 0; to < K; ++to) {
                if (to == from) continue;
                const double delta = from_after + term(sums[to] + 2.0 * row[a * K + to], sizes[to] + 1) - from_before -
                                     term(sums[to], sizes[to]);
                if (delta < best_delta) {
                    best_delta = delta;
                    best_to = to;
                }
            }
            if (best_to == from) continue;
            sums[from] -= 2.0 * row[a * K + from];
            sums[best_to] += 2.0 * row[a * K + best_to];
            --sizes[from];
            ++sizes[best_to];
            labels[a] = static_cast<int>(best_to);
            for (std::size_t b = 0; b < n; ++b) {
                if (b == a) continue;
                row[b * K + from] -= obj.weight(a, b);
                row[b * K + best_to] += obj.weight(a, b);
            }
            moved = true;
        }
        if (!moved) break;
        // Recount from scratch so the logged values match an independent evaluation.
        current = obj.evaluate(labels, k);
        history.push_back(current);
    }
    return current;
}

struct RestartOutcome {
    std::vector<int> labels;  // canonical, 1-based
    double objective = 0.0;
    RestartLog log;
};

RestartOutcome run_restart(std::span<const Point> features, const PairwiseObjective& obj, int k, int max_iterations,
                           std::uint64_t seed) {
    Rng rng(seed);
    std::vector<int> labels = assign_nearest(features, kmeanspp_centres(features, k, rng));
    repair_empty(labels, k, obj);
    double current = obj.evaluate(labels, k);
    RestartLog log;
    log.objective_history.push_back(current);

    for (int it = 0; it < max_iterations; ++it) {
        std::vector<int> next = assign_nearest(features, group_means(features, labels, k));
        repair_empty(next, k, obj);
        if (next == labels) break;
        const double value = obj.evaluate(next, k);
        if (value > current) break;
        labels = std::move(next);
        current = value;
        log.objective_history.push_back(current);
    }
    refine(labels, k, obj, log.objective_history);

    RestartOutcome out;
    for (int& l : labels) ++l;
    out.labels = canonical_labels(labels);
    std::vector<int> zero_based(out.labels);
    for (int& l : zero_based) --l;
    out.objective = obj.evaluate(zero_based, k);
    log.final_objective = out.objective;
    out.log = std::move(log);
    return out;
}

bool better(const RestartOutcome& a, const RestartOutcome& b) {
    const double scale = std::max(std::abs(a.objective), std::abs(b.objective));
    if (std::abs(a.objective - b.objective) > 1e-12 * scale) return a.objective < b.objective;
    return a.labels < b.labels;
}

ClusteringRun multi_restart(std::span<const Point> features, const PairwiseObjective& obj, int k,
                            const ClusteringOptions& options) {
    const std::size_t n = features.size();
    if (k < 1) throw ValidationError("k", "must be at least 1");
    if (n < static_cast<std::size_t>(k))
        throw ValidationError("k", "cannot split " + std::to_string(n) + " sensors into " + std::to_string(k) +
                                       " non-empty groups; reduce k");
    if (options.restarts < 1) throw ValidationError("restarts", "must be at least 1");

    std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(options.restarts));
    detail::parallel_for(outcomes.size(), options.threads, [&](std::size_t r) {
        outcomes[r] = run_restart(features, obj, k, options.max_iterations, derive_seed(options.seed, "kmeans-restart", r));
    });

    std::size_t best = 0;
    for (std::size_t r = 1; r < outcomes.size(); ++r)
        if (better(outcomes[r], outcomes[best])) best = r;

    ClusteringRun run;
    run.best.labels = outcomes[best].labels;
    run.best.k = k;
    run.best.objective_value = outcomes[best].objective;
    for (auto& o : outcomes) run.restarts.push_back(std::move(o.log));
    return run;
}

PairwiseObjective priority_objective(const Scenario& scenario, const DistanceMatrix& dm) {
    const std::size_t n = scenario.sensors.size();
    std::vector<double> w(n * n, 0.0);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            if (a == b) continue;
            const double scaled = dm(a, b) / (scenario.sensors[a].priority * scenario.sensors[b].priority);
            w[a * n + b] = scaled * scaled;
        }
    return PairwiseObjective(n, std::move(w));
}

}  // namespace

std::vector<int> canonical_labels(std::span<const int> labels) {
    std::vector<int> mapping;
    std::vector<int> out;
    out.reserve(labels.size());
    for (const int l : labels) {
        auto it = std::find(mapping.begin(), mapping.end(), l);
        if (it == mapping.end()) {
            mapping.push_back(l);
            it = mapping.end() - 1;
        }
        out.push_back(static_cast<int>(it - mapping.begin()) + 1);
    }
    return out;
}

double clustering_objective(std::span<const int> labels, int k, const Scenario& scenario, const DistanceMatrix& dm) {
    const std::size_t n = scenario.sensors.size();
    if (k < 1) throw ValidationError("k", "must be at least 1");
    if (labels.size() != n) throw ValidationError("labels", "length must equal the sensor count");
    std::vector<int> zero_based(n);
    std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
    for (std::size_t a = 0; a < n; ++a) {
        if (labels[a] < 1 || labels[a] > k)
            throw ValidationError("labels", "label " + std::to_string(labels[a]) + " is outside 1.." + std::to_string(k));
        zero_based[a] = labels[a] - 1;
        ++sizes[static_cast<std::size_t>(zero_based[a])];
    }
    if (n >= static_cast<std::size_t>(k))
        for (std::size_t g = 0; g < sizes.size(); ++g)
            if (sizes[g] == 0) throw ValidationError("labels", "group " + std::to_string(g + 1) + " is empty");
    return priority_objective(scenario, dm).evaluate(zero_based, k);
}

double clustering_objective(const ClusterAssignment& assignment, const Scenario& scenario, const DistanceMatrix& dm) {
    return clustering_objective(assignment.labels, assignment.k, scenario, dm);
}

ClusteringRun run_clustering(const Scenario& scenario, const DistanceMatrix& dm, int k, const ClusteringOptions& options) {
    std::vector<Point> features;
    features.reserve(scenario.sensors.size());
    for (const Sensor& s : scenario.sensors) features.push_back({s.position.x / s.priority, s.position.y / s.priority});
    return multi_restart(features, priority_objective(scenario, dm), k, options);
}

ClusterAssignment cluster_sensors(const Scenario& scenario, const DistanceMatrix& dm, int k, int restarts,
                                  std::uint64_t seed) {
    ClusteringOptions options;
    options.restarts = restarts;
    options.seed = seed;
    return run_clustering(scenario, dm, k, options).best;
}

ClusterAssignment kmeans(std::span<const Point> points, int k, const ClusteringOptions& options) {
    const std::size_t n = points.size();
    std::vector<double> w(n * n, 0.0);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            const double d = distance(points[a], points[b]);
            w[a * n + b] = d * d;
        }
    return multi_restart(points, PairwiseObjective(n, std::move(w)), k, options).best;
}

std::string assignment_csv(const ClusterAssignment& assignment) {
    std::string out = "sensor_id,label\n";
    for (std::size_t j = 0; j < assignment.labels.size(); ++j)
        out += std::to_string(j + 1) + "," + std::to_string(assignment.labels[j]) + "\n";
    return out;
}

std::vector<Point> cluster_centroids(const ClusterAssignment& assignment, const Scenario& scenario) {
    std::vector<Point> pts;
    pts.reserve(scenario.sensors.size());
    for (const Sensor& s : scenario.sensors) pts.push_back(s.position);
    std::vector<int> zero_based(assignment.labels);
    for (int& l : zero_based) --l;
    return group_means(pts, zero_based, assignment.k);
}

}  // namespace uavdc
