#include <bit>
#include <cstring>
#include <fstream>

#include "stackdigest/embed.hpp"

namespace stackdigest {

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
    const unsigned char bytes[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                    static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(bytes), 4);
}

bool get_u32(std::istream& in, std::uint32_t& v) {
    unsigned char bytes[4];
    if (!in.read(reinterpret_cast<char*>(bytes), 4)) return false;
    v = static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
        (static_cast<std::uint32_t>(bytes[2]) << 16) | (static_cast<std::uint32_t>(bytes[3]) << 24);
    return true;
}

constexpr std::uint32_t kMaxNameLength = 1 << 16;
constexpr std::uint32_t kMaxDim = 1 << 20;

}  // namespace

EmbeddingCache::EmbeddingCache(std::filesystem::path path) : path_(std::move(path)) {
    std::ifstream in(path_, std::ios::binary);
    if (!in) return;
    std::uint64_t record = 0;
    while (true) {
        std::uint32_t name_len = 0;
        if (!get_u32(in, name_len)) break;  // clean end of file
        ++record;
        auto fail = [&](const char* why) {
            throw CacheError("embedding cache " + path_.string() + " record " + std::to_string(record) + ": " + why);
        };
        if (name_len > kMaxNameLength) fail("provider name too long");
        std::string name(name_len, '\0');
        Sha256 hash{};
        std::uint32_t dim = 0;
        if (!in.read(name.data(), name_len) || !in.read(reinterpret_cast<char*>(hash.data()), 32) ||
            !get_u32(in, dim)) {
            fail("truncated header");
        }
        if (dim > kMaxDim) fail("implausible dim");
        std::vector<float> values(dim);
        for (auto& v : values) {
            std::uint32_t bits = 0;
            if (!get_u32(in, bits)) fail("truncated vector");
            v = std::bit_cast<float>(bits);
        }
        entries_.insert_or_assign(Key{std::move(name), hash}, EmbeddingVector(std::move(values)));
    }
}

std::optional<EmbeddingVector> EmbeddingCache::get(const std::string& provider, const Sha256& text_hash) const {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(Key{provider, text_hash});
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void EmbeddingCache::write_record(std::ostream& out, const std::string& provider, const Sha256& text_hash,
                                  const EmbeddingVector& vector) {
    put_u32(out, static_cast<std::uint32_t>(provider.size()));
    out.write(provider.data(), static_cast<std::streamsize>(provider.size()));
    out.write(reinterpret_cast<const char*>(text_hash.data()), 32);
    put_u32(out, static_cast<std::uint32_t>(vector.dim()));
    for (float v : vector.values) put_u32(out, std::bit_cast<std::uint32_t>(v));
}

void EmbeddingCache::put(const std::string& provider, const Sha256& text_hash, const EmbeddingVector& vector) {
    std::unique_lock lock(mutex_);
    Key key{provider, text_hash};
    if (entries_.count(key) != 0) return;
    if (!path_.empty()) {
        std::ofstream out(path_, std::ios::binary | std::ios::app);
        if (!out) throw CacheError("cannot append to embedding cache " + path_.string());
        write_record(out, provider, text_hash, vector);
        out.flush();
        if (!out) throw CacheError("write failed for embedding cache " + path_.string());
    }
    entries_.emplace(std::move(key), vector);
}

std::size_t EmbeddingCache::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

CachedEmbedder::CachedEmbedder(EmbeddingProvider& inner, EmbeddingCache& cache, std::size_t batch_size)
    : inner_(inner), cache_(cache), batch_size_(batch_size == 0 ? 64 : batch_size) {}

std::vector<EmbeddingVector> CachedEmbedder::embed_batch(std::span<const std::string> texts) {
    const std::string provider = inner_.name();
    std::vector<EmbeddingVector> out(texts.size());
    std::vector<Sha256> hashes(texts.size());
    std::vector<std::size_t> missing;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        hashes[i] = sha256(texts[i]);
        if (auto hit = cache_.get(provider, hashes[i])) {
            out[i] = std::move(*hit);
        } else {
            missing.push_back(i);
        }
    }
    {
        std::lock_guard lock(stats_mutex_);
        stats_.hits += texts.size() - missing.size();
        stats_.misses += missing.size();
    }

    for (std::size_t start = 0; start < missing.size(); start += batch_size_) {
        const std::size_t end = std::min(missing.size(), start + batch_size_);
        std::vector<std::string> batch;
        for (std::size_t k = start; k < end; ++k) batch.push_back(texts[missing[k]]);
        auto vectors = inner_.embed_batch(batch);
        if (vectors.size() != batch.size()) throw CacheError("provider " + provider + " returned wrong vector count");
        for (std::size_t k = start; k < end; ++k) {
            const std::size_t i = missing[k];
            cache_.put(provider, hashes[i], vectors[k - start]);
            // Re-read so a warm cache and a cold cache hand out the same float bits.
            out[i] = *cache_.get(provider, hashes[i]);
        }
    }
    return out;
}

CacheStats CachedEmbedder::stats() const {
    std::lock_guard lock(stats_mutex_);
    return stats_;
}

}  // namespace stackdigest
