#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "stackdigest/atomic_file.hpp"

namespace stackdigest {

struct EmbeddingVector {
    std::vector<float> values;

    EmbeddingVector() = default;
    explicit EmbeddingVector(std::vector<float> v) : values(std::move(v)) {}

    std::size_t dim() const { return values.size(); }
    bool is_zero() const;
    double norm() const;

    bool operator==(const EmbeddingVector&) const = default;
};

/// Rows are documents or sentences.
using EmbeddingMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

EmbeddingMatrix to_matrix(std::span<const EmbeddingVector> vectors);
EmbeddingVector from_row(const Eigen::Ref<const Eigen::RowVectorXd>& row);

class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Cosine in [-1, 1]; 0 when either vector is zero.
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::string name() const = 0;
    virtual std::size_t dim() const = 0;
    /// One vector per text, in input order. Same text => identical vector.
    virtual std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) = 0;
};

// --- built-in hashing embedder -----------------------------------------

inline constexpr std::size_t kHashBuckets = std::size_t{1} << 15;

std::uint64_t fnv1a64(std::string_view s);

/// Feature hashing into 2^15 buckets, log(1 + count) weighting, seeded
/// Gaussian random projection to `dim`, L2 normalization. Each bucket's
/// projection column is generated on demand from (seed, bucket).
std::vector<EmbeddingVector> builtin_embed_batch(std::span<const std::string> texts, std::size_t dim,
                                                 std::uint64_t seed);

class BuiltinEmbedder final : public EmbeddingProvider {
public:
    BuiltinEmbedder(std::size_t dim, std::uint64_t seed);
    std::string name() const override;
    std::size_t dim() const override { return dim_; }
    std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) override;

private:
    std::size_t dim_;
    std::uint64_t seed_;
};

// --- HTTP provider -------------------------------------------------------

class EmbedError : public std::runtime_error {
public:
    enum class Kind { Transport, Status, DimMismatch, CountMismatch, Protocol };
    EmbedError(Kind kind, const std::string& endpoint, const std::string& detail);
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

struct HttpEmbedOptions {
    int attempts = 3;
    std::chrono::milliseconds initial_backoff{500};
    std::chrono::seconds timeout{60};
    /// When set, the response's advertised dim must equal this.
    std::optional<std::size_t> expected_dim;
};

/// POST {endpoint}/v1/embed with {"texts": [...]}; expects {"dim", "vectors"}.
std::vector<EmbeddingVector> http_embed_batch(const std::string& endpoint, std::span<const std::string> texts,
                                              const HttpEmbedOptions& options = {});

class HttpEmbedder final : public EmbeddingProvider {
public:
    HttpEmbedder(std::string endpoint, std::size_t dim, HttpEmbedOptions options = {});
    std::string name() const override { return "http:" + endpoint_; }
    std::size_t dim() const override { return dim_; }
    std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) override;

private:
    std::string endpoint_;
    std::size_t dim_;
    HttpEmbedOptions options_;
};

// --- cache ---------------------------------------------------------------

class CacheError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Append-only binary cache keyed by (provider name, SHA-256 of text).
/// Record layout, little-endian: u32 name length, name bytes, 32-byte hash,
/// u32 dim, dim float32 values. Concurrent readers, single writer.
class EmbeddingCache {
public:
    EmbeddingCache() = default;
    /// Loads existing records from `path` (if present); new records append there.
    explicit EmbeddingCache(std::filesystem::path path);

    std::optional<EmbeddingVector> get(const std::string& provider, const Sha256& text_hash) const;
    void put(const std::string& provider, const Sha256& text_hash, const EmbeddingVector& vector);
    std::size_t size() const;

    static void write_record(std::ostream& out, const std::string& provider, const Sha256& text_hash,
                             const EmbeddingVector& vector);

private:
    using Key = std::pair<std::string, Sha256>;
    std::filesystem::path path_;
    std::map<Key, EmbeddingVector> entries_;
    mutable std::shared_mutex mutex_;
};

struct CacheStats {
    std::size_t hits = 0;
    std::size_t misses = 0;
};

/// Wraps a provider with the cache and fixed-size batching.
class CachedEmbedder final : public EmbeddingProvider {
public:
    CachedEmbedder(EmbeddingProvider& inner, EmbeddingCache& cache, std::size_t batch_size = 64);
    std::string name() const override { return inner_.name(); }
    std::size_t dim() const override { return inner_.dim(); }
    std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) override;
    CacheStats stats() const;

private:
    EmbeddingProvider& inner_;
    EmbeddingCache& cache_;
    std::size_t batch_size_;
    mutable std::mutex stats_mutex_;
    CacheStats stats_;
};

}  // namespace stackdigest
