#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stackdigest/ingest.hpp"
#include "stackdigest/report.hpp"
#include "stackdigest/summarize.hpp"
#include "stackdigest/topics.hpp"

namespace stackdigest {

enum class ExitCode : int { Ok = 0, ConfigError = 2, InputError = 3, PipelineError = 4 };

class PipelineFailure : public std::runtime_error {
public:
    PipelineFailure(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ExitCode code() const { return code_; }

private:
    ExitCode code_;
};

enum class EmbedderKind { Builtin, Http };

/// Documents with fewer normalized tokens are kept in the store but not modeled.
inline constexpr std::size_t kMinModelTokens = 5;

/// Stage seeds are the global seed XOR a fixed constant per stage.
inline constexpr std::uint64_t kEmbedStageSeed = 0;
inline constexpr std::uint64_t kClusterStageSeed = 0xC1u;
inline constexpr std::uint64_t kSummaryStageSeed = 0x5Au;

struct PipelineConfig {
    std::filesystem::path dump_path;
    std::filesystem::path store_path;  // empty: <out>/store.ndjson
    std::string tag = "android";
    DateWindow window = DateWindow::default_window();
    bool strict = false;

    EmbedderKind embedder = EmbedderKind::Builtin;
    std::string endpoint;
    std::size_t dim = 256;
    std::size_t batch_size = 64;
    std::uint64_t seed = 42;

    std::size_t reduce_dim = kDefaultTargetDim;
    ClusterAlgorithm cluster = ClusterAlgorithm::KMeans;
    std::optional<std::size_t> k;  // unset: default_k(n)
    double eps = 0.5;
    std::size_t min_pts = 5;

    SummaryParams summary;

    std::filesystem::path out_dir = "out";
    std::vector<OutputFormat> formats = {OutputFormat::Markdown, OutputFormat::Csv, OutputFormat::Json};

    /// Throws PipelineFailure(ConfigError) when a value is out of range.
    void validate() const;
    std::filesystem::path resolved_store_path() const;
    nlohmann::ordered_json to_json() const;
};

/// Progress lines go here (one call per complete line).
using LogSink = std::function<void(const std::string&)>;

struct StageCounts {
    std::size_t posts = 0;
    std::size_t questions = 0;
    std::size_t answers = 0;
    std::size_t orphans = 0;
    std::size_t modeled_documents = 0;
    std::size_t topics = 0;
    std::size_t noise = 0;
    std::size_t cache_hits = 0;
    std::size_t cache_misses = 0;
};

struct ModeledCorpus {
    std::vector<PostId> ids;
    std::vector<CleanDocument> documents;
    std::vector<EmbeddingVector> vectors;
};

class Pipeline {
public:
    explicit Pipeline(PipelineConfig config, LogSink log = {});

    void ingest();
    void topics();
    void summarize();
    void run();

    const StageCounts& counts() const { return counts_; }
    const PipelineConfig& config() const { return config_; }

    std::filesystem::path topics_path() const;
    std::filesystem::path cache_path() const;
    std::filesystem::path manifest_path() const;
    std::filesystem::path report_path(const std::string& stem, OutputFormat format) const;

private:
    std::unique_ptr<EmbeddingProvider> make_provider() const;
    PostStore load_store_checked() const;
    ModeledCorpus model_corpus(const PostStore& store, EmbeddingProvider& provider);
    void update_manifest(const std::string& stage, double seconds,
                         const std::function<void(nlohmann::ordered_json&)>& extra);
    void log(const std::string& line) const;

    PipelineConfig config_;
    LogSink log_;
    StageCounts counts_;
};

}  // namespace stackdigest
