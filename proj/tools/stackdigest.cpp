// Command-line front end: ingest, topics, summarize, run.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "stackdigest/pipeline.hpp"

using namespace stackdigest;

namespace {

Timestamp parse_date_flag(const std::string& flag, const std::string& value) {
    auto ts = parse_timestamp(value);
    if (!ts) throw PipelineFailure(ExitCode::ConfigError, flag + ": cannot parse date \"" + value + "\"");
    return *ts;
}

}  // namespace

int main(int argc, char** argv) {
    // Progress goes to stderr one line at a time.
    std::setvbuf(stderr, nullptr, _IOLBF, 0);

    CLI::App app{"Mine a Stack Exchange dump for topics and extractive Q/A summaries"};
    app.set_config("--config", "", "flat key = value configuration file (flags take precedence)");
    app.require_subcommand(1, 1);
    app.fallthrough();

    std::string dump, store, tag = "android", from = "2009-01-01", to = "2022-05-01";
    std::string embedder = "builtin", endpoint, cluster = "kmeans", out = "out";
    std::vector<std::string> formats{"md", "csv", "json"};
    std::size_t dim = 256, reduce_dim = kDefaultTargetDim, k = 0, min_pts = 5, batch = 64;
    std::uint64_t seed = 42;
    double eps = 0.5;
    bool strict = false;
    SummaryParams sp;

    app.add_option("--dump", dump, "Posts.xml dump (uncompressed)");
    app.add_option("--store", store, "NDJSON post store (default <out>/store.ndjson)");
    app.add_option("--tag", tag, "question tag to keep")->capture_default_str();
    app.add_option("--from", from, "window start, inclusive (YYYY-MM-DD)")->capture_default_str();
    app.add_option("--to", to, "window end, exclusive (YYYY-MM-DD)")->capture_default_str();
    app.add_flag("--strict", strict, "fail on malformed rows instead of skipping them");
    app.add_option("--embedder", embedder, "builtin or http")->check(CLI::IsMember({"builtin", "http"}))->capture_default_str();
    app.add_option("--endpoint", endpoint, "embedding service base URL (http embedder)");
    app.add_option("--dim", dim, "embedding dimension")->capture_default_str();
    app.add_option("--batch-size", batch, "texts per embedding request")->capture_default_str();
    app.add_option("--seed", seed, "global seed")->capture_default_str();
    app.add_option("--reduce-dim", reduce_dim, "PCA target dimension")->capture_default_str();
    app.add_option("--cluster", cluster, "kmeans or dbscan")->check(CLI::IsMember({"kmeans", "dbscan"}))->capture_default_str();
    app.add_option("--k", k, "k-means cluster count (default max(2, floor(sqrt(n/2))))");
    app.add_option("--eps", eps, "DBSCAN radius")->capture_default_str();
    app.add_option("--min-pts", min_pts, "DBSCAN core threshold")->capture_default_str();
    app.add_option("--questions-per-topic", sp.questions_per_topic, "Q/A pairs per topic (K)")->capture_default_str();
    app.add_option("--pool-size", sp.pool_size, "questions pooled into the topic digest (M)")->capture_default_str();
    app.add_option("--sentences-question", sp.sentences_question, "sentences per problem summary")->capture_default_str();
    app.add_option("--sentences-answer", sp.sentences_answer, "sentences per solution summary")->capture_default_str();
    app.add_option("--sentences-digest", sp.sentences_digest, "sentences per topic digest")->capture_default_str();
    app.add_option("--score-min", sp.score_min, "minimum score for non-accepted answers")->capture_default_str();
    app.add_option("--out", out, "output directory")->capture_default_str();
    app.add_option("--format", formats, "report formats: md, csv, json")->delimiter(',')->capture_default_str();

    auto* ingest_cmd = app.add_subcommand("ingest", "parse and filter the dump into the post store");
    auto* topics_cmd = app.add_subcommand("topics", "embed, reduce, cluster and weight topic terms");
    auto* summarize_cmd = app.add_subcommand("summarize", "write topic tables and Q/A summaries");
    auto* run_cmd = app.add_subcommand("run", "ingest, topics and summarize end to end");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(ExitCode::ConfigError);
    }

    try {
        PipelineConfig config;
        config.dump_path = dump;
        config.store_path = store;
        config.tag = tag;
        config.window = {parse_date_flag("--from", from), parse_date_flag("--to", to)};
        config.strict = strict;
        config.embedder = embedder == "http" ? EmbedderKind::Http : EmbedderKind::Builtin;
        config.endpoint = endpoint;
        config.dim = dim;
        config.batch_size = batch;
        config.seed = seed;
        config.reduce_dim = reduce_dim;
        config.cluster = cluster_algorithm_from_string(cluster);
        if (k > 0) config.k = k;
        config.eps = eps;
        config.min_pts = min_pts;
        config.summary = sp;
        config.out_dir = out;
        config.formats.clear();
        for (const auto& f : formats) {
            try {
                config.formats.push_back(output_format_from_string(f));
            } catch (const std::invalid_argument& e) {
                throw PipelineFailure(ExitCode::ConfigError, e.what());
            }
        }

        Pipeline pipeline(config, [](const std::string& line) { std::cerr << line << '\n'; });
        if (*ingest_cmd) pipeline.ingest();
        else if (*topics_cmd) pipeline.topics();
        else if (*summarize_cmd) pipeline.summarize();
        else if (*run_cmd) pipeline.run();
    } catch (const PipelineFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::PipelineError);
    }
    return 0;
}
