#pragma once

#include <json.hpp>

#include <span>
#include <string>
#include <vector>

#include "stackdigest/summarize.hpp"
#include "stackdigest/topics.hpp"

namespace stackdigest {

enum class OutputFormat { Markdown, Csv, Json };

OutputFormat output_format_from_string(const std::string& name);
std::string extension(OutputFormat format);

/// Contents of topics.json.
struct TopicModelArtifact {
    ClusterAlgorithm algorithm = ClusterAlgorithm::KMeans;
    std::uint64_t seed = 0;
    std::size_t target_dim = 0;
    std::vector<int> labels;
    std::vector<Topic> topics;

    bool operator==(const TopicModelArtifact&) const = default;
};

nlohmann::ordered_json to_json(const TopicModelArtifact& artifact);
TopicModelArtifact topic_model_from_json(const nlohmann::json& j);

/// Columns Topic, Count, Name, Representation (ten comma-separated terms).
std::string emit_topics_table(std::span<const Topic> topics, OutputFormat format);
std::string emit_topics_table(const TopicModelArtifact& artifact, OutputFormat format);

/// Columns Questions, Answers; one row per pair, sentences joined by spaces.
std::string emit_summary_table(std::span<const QAPairSummary> pairs, OutputFormat format);

nlohmann::ordered_json to_json(const TopicReport& report);
nlohmann::ordered_json to_json(const QAPairSummary& pair);

std::string markdown_cell(std::string_view text);
std::string csv_field(std::string_view text);

/// Every report concatenated: per topic a heading, the digest and the Q/A table.
std::string emit_summary_document(std::span<const Topic> topics, std::span<const TopicReport> reports,
                                  OutputFormat format);

}  // namespace stackdigest
