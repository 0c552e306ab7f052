#include <algorithm>
#include <deque>
#include <limits>
#include <numeric>

#include "stackdigest/topics.hpp"

namespace stackdigest {

namespace {

/// Uniform double in [0, 1) from the top 53 bits; std::uniform_real_distribution
/// is not bit-reproducible across standard libraries.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double squared_distance(const EmbeddingMatrix& a, Eigen::Index i, const EmbeddingMatrix& b, Eigen::Index j) {
    return (a.row(i) - b.row(j)).squaredNorm();
}

EmbeddingMatrix kmeans_plus_plus(const EmbeddingMatrix& x, std::size_t k, std::mt19937_64& rng) {
    const auto n = static_cast<std::size_t>(x.rows());
    EmbeddingMatrix centers(static_cast<Eigen::Index>(k), x.cols());
    std::vector<bool> chosen(n, false);
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());

    auto take = [&](std::size_t c, std::size_t idx) {
        centers.row(static_cast<Eigen::Index>(c)) = x.row(static_cast<Eigen::Index>(idx));
        chosen[idx] = true;
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], squared_distance(x, static_cast<Eigen::Index>(i), centers, static_cast<Eigen::Index>(c)));
        }
    };

    take(0, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)));
    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (double v : d2) total += v;
        std::size_t pick = n;
        if (total > 0.0) {
            const double target = uniform01(rng) * total;
            double running = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (d2[i] <= 0.0) continue;
                running += d2[i];
                pick = i;
                if (running > target) break;
            }
        }
        if (pick == n) {
            // Every point already coincides with a center.
            for (std::size_t i = 0; i < n; ++i) {
                if (!chosen[i]) {
                    pick = i;
                    break;
                }
            }
        }
        take(c, pick);
    }
    return centers;
}

}  // namespace

std::string to_string(ClusterAlgorithm algorithm) {
    return algorithm == ClusterAlgorithm::KMeans ? "kmeans" : "dbscan";
}

ClusterAlgorithm cluster_algorithm_from_string(const std::string& name) {
    if (name == "kmeans") return ClusterAlgorithm::KMeans;
    if (name == "dbscan") return ClusterAlgorithm::Dbscan;
    throw std::invalid_argument("unknown cluster algorithm \"" + name + "\"");
}

int TopicAssignment::topic_count() const {
    int t = 0;
    for (int l : labels) t = std::max(t, l);
    return t;
}

std::size_t TopicAssignment::noise_count() const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), kNoiseLabel));
}

std::size_t default_k(std::size_t n) {
    const auto k = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n) / 2.0)));
    return std::max<std::size_t>(2, k);
}

std::vector<int> relabel_by_size(std::span<const int> raw_labels) {
    struct Group {
        int raw;
        std::size_t size;
        std::size_t first;
    };
    std::vector<Group> groups;
    std::vector<int> slot;  // raw label -> index in groups
    for (std::size_t i = 0; i < raw_labels.size(); ++i) {
        const int raw = raw_labels[i];
        if (raw == kNoiseLabel) continue;
        if (raw < 0) throw std::invalid_argument("negative cluster label other than noise");
        if (static_cast<std::size_t>(raw) >= slot.size()) slot.resize(static_cast<std::size_t>(raw) + 1, -1);
        int& g = slot[static_cast<std::size_t>(raw)];
        if (g < 0) {
            g = static_cast<int>(groups.size());
            groups.push_back({raw, 0, i});
        }
        ++groups[static_cast<std::size_t>(g)].size;
    }
    std::vector<std::size_t> order(groups.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (groups[a].size != groups[b].size) return groups[a].size > groups[b].size;
        return groups[a].first < groups[b].first;
    });
    std::vector<int> new_id(groups.size());
    for (std::size_t rank = 0; rank < order.size(); ++rank) new_id[order[rank]] = static_cast<int>(rank) + 1;

    std::vector<int> out(raw_labels.size(), kNoiseLabel);
    for (std::size_t i = 0; i < raw_labels.size(); ++i) {
        if (raw_labels[i] != kNoiseLabel) out[i] = new_id[static_cast<std::size_t>(slot[static_cast<std::size_t>(raw_labels[i])])];
    }
    return out;
}

KMeansResult kmeans(const EmbeddingMatrix& vectors, std::size_t k, std::uint64_t seed, const KMeansOptions& options) {
    const auto n = static_cast<std::size_t>(vectors.rows());
    if (k == 0) throw std::invalid_argument("k must be positive");
    if (k > n) throw std::invalid_argument("k (" + std::to_string(k) + ") exceeds number of vectors (" + std::to_string(n) + ")");

    std::mt19937_64 rng(seed);
    EmbeddingMatrix centers = kmeans_plus_plus(vectors, k, rng);
    std::vector<int> labels(n, 0);
    KMeansResult result;

    auto assign = [&] {
        double objective = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            int best_c = 0;
            for (std::size_t c = 0; c < k; ++c) {
                const double d = squared_distance(vectors, static_cast<Eigen::Index>(i), centers, static_cast<Eigen::Index>(c));
                if (d < best) {
                    best = d;
                    best_c = static_cast<int>(c);
                }
            }
            labels[i] = best_c;
            objective += best;
        }
        if (!result.objective_history.empty()) {
            const double previous = result.objective_history.back();
            if (objective > previous + 1e-9 * std::max(1.0, previous)) {
                throw TopicError("k-means objective increased from " + std::to_string(previous) + " to " +
                                 std::to_string(objective));
            }
        }
        result.objective_history.push_back(objective);
    };

    for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
        assign();
        ++result.iterations;

        EmbeddingMatrix next = EmbeddingMatrix::Zero(static_cast<Eigen::Index>(k), vectors.cols());
        std::vector<std::size_t> sizes(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            next.row(labels[i]) += vectors.row(static_cast<Eigen::Index>(i));
            ++sizes[static_cast<std::size_t>(labels[i])];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] > 0) next.row(static_cast<Eigen::Index>(c)) /= static_cast<double>(sizes[c]);
        }
        // Empty clusters take the point farthest from its own centroid.
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] > 0) continue;
            std::size_t far = n;
            double far_d = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                const auto from = static_cast<std::size_t>(labels[i]);
                if (sizes[from] < 2) continue;
                const double d = squared_distance(vectors, static_cast<Eigen::Index>(i), next, labels[i]);
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            if (far == n) continue;
            const auto from = static_cast<std::size_t>(labels[far]);
            const auto row = static_cast<Eigen::Index>(far);
            next.row(static_cast<Eigen::Index>(from)) =
                (next.row(static_cast<Eigen::Index>(from)) * static_cast<double>(sizes[from]) - vectors.row(row)) /
                static_cast<double>(sizes[from] - 1);
            --sizes[from];
            next.row(static_cast<Eigen::Index>(c)) = vectors.row(row);
            sizes[c] = 1;
            labels[far] = static_cast<int>(c);
        }

        double movement = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            movement = std::max(movement, (next.row(static_cast<Eigen::Index>(c)) - centers.row(static_cast<Eigen::Index>(c))).norm());
        }
        centers = std::move(next);
        if (movement < options.tolerance) break;
    }
    assign();

    result.assignment.labels = relabel_by_size(labels);
    result.assignment.seed = seed;
    result.assignment.algorithm = ClusterAlgorithm::KMeans;

    result.centroids.resize(static_cast<Eigen::Index>(k), vectors.cols());
    std::vector<bool> placed(k, false);
    for (std::size_t i = 0; i < n; ++i) {
        const auto raw = static_cast<std::size_t>(labels[i]);
        if (placed[raw]) continue;
        placed[raw] = true;
        result.centroids.row(result.assignment.labels[i] - 1) = centers.row(static_cast<Eigen::Index>(raw));
    }
    // Clusters left empty after the final assignment keep their centroid at the end.
    int next_slot = result.assignment.topic_count();
    for (std::size_t c = 0; c < k; ++c) {
        if (!placed[c]) result.centroids.row(next_slot++) = centers.row(static_cast<Eigen::Index>(c));
    }
    return result;
}

TopicAssignment dbscan(const EmbeddingMatrix& vectors, double eps, std::size_t min_pts) {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    if (min_pts < 2) throw std::invalid_argument("min_pts must be at least 2");
    const auto n = static_cast<std::size_t>(vectors.rows());
    const double eps2 = eps * eps;

    auto neighbours = [&](std::size_t i) {
        std::vector<std::size_t> out;
        for (std::size_t j = 0; j < n; ++j) {
            if (squared_distance(vectors, static_cast<Eigen::Index>(i), vectors, static_cast<Eigen::Index>(j)) <= eps2) {
                out.push_back(j);
            }
        }
        return out;
    };

    constexpr int kUnvisited = -2;
    std::vector<int> raw(n, kUnvisited);
    int cluster = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (raw[i] != kUnvisited) continue;
        auto seeds = neighbours(i);
        if (seeds.size() < min_pts) {
            raw[i] = kNoiseLabel;
            continue;
        }
        raw[i] = cluster;
        std::deque<std::size_t> queue(seeds.begin(), seeds.end());
        while (!queue.empty()) {
            const std::size_t j = queue.front();
            queue.pop_front();
            if (raw[j] == kNoiseLabel) raw[j] = cluster;  // border point
            if (raw[j] != kUnvisited) continue;
            raw[j] = cluster;
            auto more = neighbours(j);
            if (more.size() >= min_pts) queue.insert(queue.end(), more.begin(), more.end());
        }
        ++cluster;
    }

    TopicAssignment out;
    out.labels = relabel_by_size(raw);
    out.algorithm = ClusterAlgorithm::Dbscan;
    return out;
}

}  // namespace stackdigest
