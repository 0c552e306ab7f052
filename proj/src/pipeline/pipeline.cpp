#include "stackdigest/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include "stackdigest/atomic_file.hpp"

namespace stackdigest {

using nlohmann::ordered_json;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw PipelineFailure(ExitCode::ConfigError, what); }
[[noreturn]] void input_error(const std::string& what) { throw PipelineFailure(ExitCode::InputError, what); }
[[noreturn]] void pipeline_error(const std::string& what) { throw PipelineFailure(ExitCode::PipelineError, what); }

std::string dump_json(const ordered_json& j) {
    return j.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
}

/// Runs a stage body, translating library exceptions into exit-coded failures.
template <typename Body>
void guarded(const char* stage, Body&& body) {
    try {
        body();
    } catch (const PipelineFailure&) {
        throw;
    } catch (const ParseError& e) {
        input_error(std::string(stage) + ": " + e.what());
    } catch (const StoreError& e) {
        input_error(std::string(stage) + ": " + e.what());
    } catch (const nlohmann::json::exception& e) {
        input_error(std::string(stage) + ": " + e.what());
    } catch (const std::exception& e) {
        pipeline_error(std::string(stage) + ": " + e.what());
    }
}

class StageTimer {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

}  // namespace

// --- config ------------------------------------------------------------------

void PipelineConfig::validate() const {
    if (tag.empty()) config_error("tag must not be empty");
    if (!(window.from < window.to)) config_error("date window must satisfy from < to");
    if (dim < 8) config_error("dim must be at least 8");
    if (batch_size == 0) config_error("batch size must be positive");
    if (embedder == EmbedderKind::Http && endpoint.empty()) config_error("--embedder http requires --endpoint");
    if (reduce_dim < 2) config_error("reduce-dim must be at least 2");
    if (k && *k == 0) config_error("k must be positive");
    if (!(eps > 0.0)) config_error("eps must be positive");
    if (min_pts < 2) config_error("min-pts must be at least 2");
    if (summary.questions_per_topic == 0 || summary.pool_size == 0 || summary.sentences_question == 0 ||
        summary.sentences_answer == 0 || summary.sentences_digest == 0) {
        config_error("summary sizes must be positive");
    }
    if (formats.empty()) config_error("at least one output format is required");
}

std::filesystem::path PipelineConfig::resolved_store_path() const {
    return store_path.empty() ? out_dir / "store.ndjson" : store_path;
}

ordered_json PipelineConfig::to_json() const {
    ordered_json j;
    j["dump"] = dump_path.string();
    j["store"] = resolved_store_path().string();
    j["tag"] = tag;
    j["from"] = format_rfc3339(window.from);
    j["to"] = format_rfc3339(window.to);
    j["embedder"] = embedder == EmbedderKind::Builtin ? "builtin" : "http";
    j["endpoint"] = endpoint;
    j["dim"] = dim;
    j["seed"] = seed;
    j["reduce_dim"] = reduce_dim;
    j["cluster"] = stackdigest::to_string(cluster);
    j["k"] = k ? ordered_json(*k) : ordered_json(nullptr);
    j["eps"] = eps;
    j["min_pts"] = min_pts;
    j["questions_per_topic"] = summary.questions_per_topic;
    j["pool_size"] = summary.pool_size;
    j["sentences_question"] = summary.sentences_question;
    j["sentences_answer"] = summary.sentences_answer;
    j["sentences_digest"] = summary.sentences_digest;
    j["score_min"] = summary.score_min;
    std::vector<std::string> fmts;
    for (auto f : formats) fmts.push_back(extension(f));
    j["formats"] = fmts;
    return j;
}

// --- pipeline ----------------------------------------------------------------

Pipeline::Pipeline(PipelineConfig config, LogSink log) : config_(std::move(config)), log_(std::move(log)) {
    config_.validate();
}

void Pipeline::log(const std::string& line) const {
    if (log_) log_(line);
}

std::filesystem::path Pipeline::topics_path() const { return config_.out_dir / "topics.json"; }
std::filesystem::path Pipeline::cache_path() const { return config_.out_dir / "embeddings.cache"; }
std::filesystem::path Pipeline::manifest_path() const { return config_.out_dir / "manifest.json"; }

std::filesystem::path Pipeline::report_path(const std::string& stem, OutputFormat format) const {
    return config_.out_dir / (stem + "." + extension(format));
}

std::unique_ptr<EmbeddingProvider> Pipeline::make_provider() const {
    if (config_.embedder == EmbedderKind::Http) {
        return std::make_unique<HttpEmbedder>(config_.endpoint, config_.dim);
    }
    return std::make_unique<BuiltinEmbedder>(config_.dim, config_.seed ^ kEmbedStageSeed);
}

PostStore Pipeline::load_store_checked() const {
    const auto path = config_.resolved_store_path();
    if (!std::filesystem::exists(path)) input_error("store " + path.string() + " not found; run ingest first");
    return load_store(path);
}

void Pipeline::update_manifest(const std::string& stage, double seconds,
                               const std::function<void(ordered_json&)>& extra) {
    ordered_json manifest = ordered_json::object();
    if (std::filesystem::exists(manifest_path())) {
        std::ifstream in(manifest_path());
        try {
            manifest = ordered_json::parse(in);
        } catch (const nlohmann::json::exception&) {
            manifest = ordered_json::object();
        }
    }
    manifest["config"] = config_.to_json();
    manifest["timings"][stage] = seconds;
    auto& counts = manifest["counts"];
    counts["posts"] = counts_.posts;
    counts["questions"] = counts_.questions;
    counts["answers"] = counts_.answers;
    counts["orphans"] = counts_.orphans;
    counts["modeled_documents"] = counts_.modeled_documents;
    counts["topics"] = counts_.topics;
    counts["noise"] = counts_.noise;
    extra(manifest);
    write_file_atomically(manifest_path(), dump_json(manifest));
}

ModeledCorpus Pipeline::model_corpus(const PostStore& store, EmbeddingProvider& provider) {
    ModeledCorpus corpus;
    for (const auto& [id, question] : store.questions) {
        CleanDocument doc = preprocess_post(question);
        if (doc.tokens.size() < kMinModelTokens) continue;
        corpus.ids.push_back(id);
        corpus.documents.push_back(std::move(doc));
    }
    std::vector<std::string> texts;
    texts.reserve(corpus.documents.size());
    for (const auto& doc : corpus.documents) texts.push_back(doc.clean_text);
    corpus.vectors = provider.embed_batch(texts);
    counts_.modeled_documents = corpus.ids.size();
    counts_.questions = store.questions.size();
    counts_.answers = store.answer_count();
    return corpus;
}

void Pipeline::ingest() {
    guarded("ingest", [&] {
        StageTimer timer;
        if (config_.dump_path.empty()) input_error("no dump path given (--dump)");
        std::ifstream in(config_.dump_path, std::ios::binary);
        if (!in) input_error("cannot open dump " + config_.dump_path.string());

        ParseOptions options;
        options.strict = config_.strict;
        DumpReader reader(in, options);
        PostFilter filter(config_.tag, config_.window);
        while (auto post = reader.next()) filter.add(std::move(*post));
        PostStore store = filter.finish();

        const auto& ps = reader.stats();
        counts_.posts = ps.emitted;
        counts_.questions = store.questions.size();
        counts_.answers = store.answer_count();
        counts_.orphans = store.orphan_count;
        if (ps.skipped_malformed > 0) log("ingest: skipped " + std::to_string(ps.skipped_malformed) + " malformed rows");
        if (ps.tag_warnings > 0) log("ingest: " + std::to_string(ps.tag_warnings) + " rows with unbalanced tags");

        std::filesystem::create_directories(config_.out_dir);
        const auto store_path = config_.resolved_store_path();
        if (store_path.has_parent_path()) std::filesystem::create_directories(store_path.parent_path());
        save_store(store, store_path);
        log("ingest: " + std::to_string(counts_.questions) + " questions, " + std::to_string(counts_.answers) +
            " answers, " + std::to_string(counts_.orphans) + " orphans");

        const auto dump_hash = sha256_file_hex(config_.dump_path);
        const auto store_hash = sha256_file_hex(store_path);
        update_manifest("ingest", timer.seconds(), [&](ordered_json& m) {
            m["inputs"]["dump_sha256"] = dump_hash;
            m["inputs"]["store_sha256"] = store_hash;
            m["artifacts"]["store"] = store_path.string();
            m["ingest"] = {{"rows", ps.rows},
                           {"skipped_other_type", ps.skipped_other_type},
                           {"skipped_malformed", ps.skipped_malformed},
                           {"tag_warnings", ps.tag_warnings},
                           {"total_questions", filter.stats().total_questions},
                           {"dropped_questions", filter.stats().dropped_questions},
                           {"total_answers", filter.stats().total_answers}};
        });
    });
}

void Pipeline::topics() {
    guarded("topics", [&] {
        StageTimer timer;
        const PostStore store = load_store_checked();
        std::filesystem::create_directories(config_.out_dir);

        auto provider = make_provider();
        EmbeddingCache cache(cache_path());
        CachedEmbedder embedder(*provider, cache, config_.batch_size);
        const ModeledCorpus corpus = model_corpus(store, embedder);
        const std::size_t n = corpus.ids.size();
        if (n < 2) pipeline_error("only " + std::to_string(n) + " documents qualify for topic modeling");

        std::size_t target = config_.reduce_dim;
        if (target > n) {
            log("topics: reduce-dim " + std::to_string(target) + " exceeds document count, using " + std::to_string(n));
            target = n;
        }
        const EmbeddingMatrix vectors = to_matrix(corpus.vectors);
        const ReductionModel reduction = fit_reduction(vectors, target);
        if (reduction.rank_limited) {
            log("topics: data rank limits reduction to " + std::to_string(reduction.target_dim) + " dimensions");
        }
        const EmbeddingMatrix reduced = reduction.transform(vectors);

        TopicAssignment assignment;
        const std::uint64_t cluster_seed = config_.seed ^ kClusterStageSeed;
        if (config_.cluster == ClusterAlgorithm::KMeans) {
            const std::size_t k = config_.k.value_or(default_k(n));
            if (k > n) config_error("k (" + std::to_string(k) + ") exceeds modeled documents (" + std::to_string(n) + ")");
            assignment = kmeans(reduced, k, cluster_seed).assignment;
        } else {
            assignment = dbscan(reduced, config_.eps, config_.min_pts);
        }

        std::vector<std::vector<std::string>> tokens;
        tokens.reserve(n);
        for (const auto& doc : corpus.documents) tokens.push_back(doc.tokens);
        const CtfidfWeights weights = compute_ctfidf(tokens, assignment.labels);

        TopicModelArtifact artifact;
        artifact.algorithm = assignment.algorithm;
        artifact.seed = assignment.algorithm == ClusterAlgorithm::KMeans ? cluster_seed : 0;
        artifact.target_dim = reduction.target_dim;
        artifact.topics = build_topics(weights, assignment);
        artifact.labels = apply_topic_ids(assignment.labels, artifact.topics);
        for (auto& t : artifact.topics) t.source_label = t.id;

        counts_.topics = artifact.topics.size();
        counts_.noise = assignment.noise_count();
        const auto stats = embedder.stats();
        counts_.cache_hits = stats.hits;
        counts_.cache_misses = stats.misses;

        write_file_atomically(topics_path(), dump_json(to_json(artifact)));
        log("topics: " + std::to_string(counts_.topics) + " topics over " + std::to_string(n) + " documents (" +
            std::to_string(counts_.noise) + " noise)");

        const auto store_hash = sha256_file_hex(config_.resolved_store_path());
        const auto topics_hash = sha256_file_hex(topics_path());
        update_manifest("topics", timer.seconds(), [&](ordered_json& m) {
            m["inputs"]["store_sha256"] = store_hash;
            m["topics"] = {{"store_sha256", store_hash},
                           {"topics_sha256", topics_hash},
                           {"cache_hits", stats.hits},
                           {"cache_misses", stats.misses}};
            m["artifacts"]["topics"] = topics_path().string();
            m["artifacts"]["embedding_cache"] = cache_path().string();
        });
    });
}

void Pipeline::summarize() {
    guarded("summarize", [&] {
        StageTimer timer;
        const PostStore store = load_store_checked();
        if (!std::filesystem::exists(topics_path())) {
            input_error("topic model " + topics_path().string() + " not found; run topics first");
        }
        // Refuse a topic model built from a different store.
        const auto store_hash = sha256_file_hex(config_.resolved_store_path());
        if (std::filesystem::exists(manifest_path())) {
            std::ifstream in(manifest_path());
            const auto manifest = nlohmann::json::parse(in, nullptr, false);
            if (!manifest.is_discarded() && manifest.contains("topics") &&
                manifest["topics"].value("store_sha256", store_hash) != store_hash) {
                pipeline_error("topics.json was built from a different store; rerun topics");
            }
        }
        TopicModelArtifact artifact;
        {
            std::ifstream in(topics_path());
            artifact = topic_model_from_json(nlohmann::json::parse(in));
        }

        auto provider = make_provider();
        EmbeddingCache cache(cache_path());
        CachedEmbedder embedder(*provider, cache, config_.batch_size);
        const ModeledCorpus corpus = model_corpus(store, embedder);
        if (corpus.ids.size() != artifact.labels.size()) {
            pipeline_error("topics.json labels cover " + std::to_string(artifact.labels.size()) +
                           " documents but the store yields " + std::to_string(corpus.ids.size()));
        }

        Summarizer summarizer(store, embedder, config_.summary);
        const std::uint64_t summary_seed = config_.seed ^ kSummaryStageSeed;
        std::vector<TopicReport> reports;
        for (const auto& topic : artifact.topics) {
            std::vector<PostId> ids;
            std::vector<EmbeddingVector> vectors;
            for (std::size_t i = 0; i < artifact.labels.size(); ++i) {
                if (artifact.labels[i] != topic.id) continue;
                ids.push_back(corpus.ids[i]);
                vectors.push_back(corpus.vectors[i]);
            }
            if (ids.empty()) continue;
            reports.push_back(summarizer.build_topic_report(topic, ids, vectors, topic_seed(summary_seed, topic.id)));
        }

        counts_.topics = artifact.topics.size();
        counts_.noise = static_cast<std::size_t>(std::count(artifact.labels.begin(), artifact.labels.end(), kNoiseLabel));
        const auto stats = embedder.stats();
        counts_.cache_hits = stats.hits;
        counts_.cache_misses = stats.misses;

        std::vector<std::string> written;
        for (auto format : config_.formats) {
            // topics.json (the model artifact) already is the JSON topics table.
            if (format != OutputFormat::Json) {
                write_file_atomically(report_path("topics", format), emit_topics_table(artifact, format));
                written.push_back(report_path("topics", format).string());
            }
            const auto path = format == OutputFormat::Json ? report_path("report", format)
                                                            : report_path("summaries", format);
            write_file_atomically(path, emit_summary_document(artifact.topics, reports, format));
            written.push_back(path.string());
        }
        log("summarize: " + std::to_string(reports.size()) + " topic reports; embedding cache " +
            std::to_string(stats.hits) + " hits / " + std::to_string(stats.misses) + " misses");

        update_manifest("summarize", timer.seconds(), [&](ordered_json& m) {
            m["summarize"] = {{"cache_hits", stats.hits}, {"cache_misses", stats.misses}};
            m["artifacts"]["reports"] = written;
        });
    });
}

void Pipeline::run() {
    ingest();
    topics();
    summarize();
}

}  // namespace stackdigest
