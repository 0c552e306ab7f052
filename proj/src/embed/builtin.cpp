#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "stackdigest/embed.hpp"
#include "stackdigest/preprocess.hpp"

namespace stackdigest {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Standard normals via Box-Muller on a 64-bit Mersenne Twister. Written out
/// because std::normal_distribution output differs between standard libraries.
class GaussianColumn {
public:
    GaussianColumn(std::uint64_t seed, std::uint64_t bucket)
        : rng_(splitmix64(seed ^ splitmix64(bucket))) {}

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // u1 in (0, 1], u2 in [0, 1)
        const double u1 = (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

EmbeddingVector embed_one(const std::string& text, std::size_t dim, std::uint64_t seed) {
    // Single letters count here; the two-letter floor belongs to term weighting.
    std::map<std::uint64_t, std::uint32_t> buckets;
    for (const auto& token : split_alpha_tokens(text, 1)) ++buckets[fnv1a64(token) & (kHashBuckets - 1)];

    std::vector<double> acc(dim, 0.0);
    for (const auto& [bucket, count] : buckets) {
        const double weight = std::log1p(static_cast<double>(count));
        GaussianColumn column(seed, bucket);
        for (std::size_t d = 0; d < dim; ++d) acc[d] += weight * column.next();
    }
    double norm = 0.0;
    for (double v : acc) norm += v * v;
    norm = std::sqrt(norm);

    std::vector<float> values(dim, 0.0f);
    if (norm > 0.0) {
        for (std::size_t d = 0; d < dim; ++d) values[d] = static_cast<float>(acc[d] / norm);
    }
    return EmbeddingVector(std::move(values));
}

}  // namespace

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<EmbeddingVector> builtin_embed_batch(std::span<const std::string> texts, std::size_t dim,
                                                 std::uint64_t seed) {
    if (dim < 8) throw std::invalid_argument("builtin embedder requires dim >= 8");
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& text : texts) out.push_back(embed_one(text, dim, seed));
    return out;
}

BuiltinEmbedder::BuiltinEmbedder(std::size_t dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
    if (dim < 8) throw std::invalid_argument("builtin embedder requires dim >= 8");
}

std::string BuiltinEmbedder::name() const {
    return "builtin-d" + std::to_string(dim_) + "-s" + std::to_string(seed_);
}

std::vector<EmbeddingVector> BuiltinEmbedder::embed_batch(std::span<const std::string> texts) {
    return builtin_embed_batch(texts, dim_, seed_);
}

}  // namespace stackdigest
