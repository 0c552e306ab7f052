#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stackdigest/embed.hpp"

namespace stackdigest {

class TopicError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kNoiseLabel = -1;
inline constexpr std::size_t kRepresentationSize = 10;
inline constexpr std::size_t kNameTerms = 4;
inline constexpr std::size_t kDefaultTargetDim = 5;

// --- reduction -------------------------------------------------------------

/// Exact PCA. Rows of `components` are orthonormal principal axes ordered by
/// decreasing variance; each has its largest-magnitude entry positive.
struct ReductionModel {
    Eigen::RowVectorXd mean;
    EmbeddingMatrix components;
    std::size_t target_dim = 0;
    /// Variance captured by each component.
    std::vector<double> variances;
    /// Set when the requested dimension exceeded the data rank.
    bool rank_limited = false;
    std::size_t requested_dim = 0;

    EmbeddingMatrix transform(const EmbeddingMatrix& vectors) const;
};

ReductionModel fit_reduction(const EmbeddingMatrix& vectors, std::size_t target_dim);

// --- clustering ------------------------------------------------------------

enum class ClusterAlgorithm { KMeans, Dbscan };

std::string to_string(ClusterAlgorithm algorithm);
ClusterAlgorithm cluster_algorithm_from_string(const std::string& name);

/// Labels 1..T ordered by descending cluster size (ties: smaller first member
/// index first); kNoiseLabel marks noise.
struct TopicAssignment {
    std::vector<int> labels;
    std::uint64_t seed = 0;
    ClusterAlgorithm algorithm = ClusterAlgorithm::KMeans;

    int topic_count() const;
    std::size_t noise_count() const;
};

struct KMeansOptions {
    std::size_t max_iterations = 100;
    double tolerance = 1e-6;
};

struct KMeansResult {
    TopicAssignment assignment;
    /// Row t-1 is the centroid of label t.
    EmbeddingMatrix centroids;
    /// Within-cluster sum of squares after each assignment step.
    std::vector<double> objective_history;
    std::size_t iterations = 0;

    double objective() const { return objective_history.empty() ? 0.0 : objective_history.back(); }
};

/// k-means++ seeding followed by Lloyd iterations. Throws TopicError if the
/// objective ever increases between iterations.
KMeansResult kmeans(const EmbeddingMatrix& vectors, std::size_t k, std::uint64_t seed,
                    const KMeansOptions& options = {});

/// max(2, floor(sqrt(n / 2)))
std::size_t default_k(std::size_t n);

/// Density clustering, Euclidean distance; neighbourhoods include the point
/// itself and use dist <= eps. Expansion visits points in ascending index order.
TopicAssignment dbscan(const EmbeddingMatrix& vectors, double eps, std::size_t min_pts);

/// Relabels raw cluster ids (>= 0, or kNoiseLabel) into 1..T by descending
/// size, ties by first member index.
std::vector<int> relabel_by_size(std::span<const int> raw_labels);

// --- c-TF-IDF ----------------------------------------------------------------

struct TermScore {
    std::size_t term = 0;  // index into CtfidfWeights::terms
    double tf = 0.0;
    double weight = 0.0;
};

/// Class-based TF-IDF: W(t,c) = tf(t,c) * log(1 + A / f(t)), with tf the raw
/// count of t in class c, f(t) the count of t over all classes and A the mean
/// number of tokens per class. Terms found in fewer than two (non-noise)
/// documents are dropped before weighting; A counts every class token.
struct CtfidfWeights {
    std::vector<int> classes;
    std::vector<std::string> terms;
    std::vector<double> term_totals;
    double average_tokens = 0.0;
    /// Per class (parallel to `classes`), sorted by term index; only tf > 0.
    std::vector<std::vector<TermScore>> scores;
    std::vector<std::size_t> class_sizes;

    double tf(int cls, std::string_view term) const;
    double weight(int cls, std::string_view term) const;
    std::size_t class_index(int cls) const;
};

CtfidfWeights compute_ctfidf(std::span<const std::vector<std::string>> docs, std::span<const int> labels);

// --- topics ------------------------------------------------------------------

struct Topic {
    int id = 0;
    std::size_t count = 0;
    std::vector<std::pair<std::string, double>> top_terms;
    std::string name;
    /// Label this topic carried in the assignment it was built from.
    int source_label = 0;

    bool operator==(const Topic&) const = default;
};

/// Top-10 terms per topic by weight (ties lexicographic), name from the
/// first four; topics ordered by count descending and numbered 1..T.
std::vector<Topic> build_topics(const CtfidfWeights& weights, const TopicAssignment& labels);

std::string topic_name(std::span<const std::pair<std::string, double>> ranked_terms);

/// Maps assignment labels onto topic ids; noise stays kNoiseLabel.
std::vector<int> apply_topic_ids(std::span<const int> labels, std::span<const Topic> topics);

EmbeddingVector topic_centroid(int topic_id, std::span<const int> labels, std::span<const EmbeddingVector> vectors);

/// Argmax cosine over centroids (topic id = index + 1); ties go to the lower
/// id. Throws TopicError on a zero centroid.
int assign_nearest(const EmbeddingVector& vector, std::span<const EmbeddingVector> centroids);

}  // namespace stackdigest
