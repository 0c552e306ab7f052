#include "stackdigest/report.hpp"

#include <sstream>

namespace stackdigest {

using nlohmann::ordered_json;

OutputFormat output_format_from_string(const std::string& name) {
    if (name == "md" || name == "markdown") return OutputFormat::Markdown;
    if (name == "csv") return OutputFormat::Csv;
    if (name == "json") return OutputFormat::Json;
    throw std::invalid_argument("unknown output format \"" + name + "\"");
}

std::string extension(OutputFormat format) {
    switch (format) {
        case OutputFormat::Markdown: return "md";
        case OutputFormat::Csv: return "csv";
        case OutputFormat::Json: return "json";
    }
    return "txt";
}

ordered_json to_json(const TopicModelArtifact& artifact) {
    ordered_json j;
    j["algorithm"] = to_string(artifact.algorithm);
    j["seed"] = artifact.seed;
    j["target_dim"] = artifact.target_dim;
    j["labels"] = artifact.labels;
    j["topics"] = ordered_json::array();
    for (const auto& topic : artifact.topics) {
        ordered_json t;
        t["id"] = topic.id;
        t["count"] = topic.count;
        t["name"] = topic.name;
        t["top_terms"] = ordered_json::array();
        for (const auto& [term, weight] : topic.top_terms) t["top_terms"].push_back(ordered_json::array({term, weight}));
        j["topics"].push_back(std::move(t));
    }
    return j;
}

TopicModelArtifact topic_model_from_json(const nlohmann::json& j) {
    TopicModelArtifact a;
    a.algorithm = cluster_algorithm_from_string(j.at("algorithm").get<std::string>());
    a.seed = j.at("seed").get<std::uint64_t>();
    a.target_dim = j.at("target_dim").get<std::size_t>();
    a.labels = j.at("labels").get<std::vector<int>>();
    for (const auto& t : j.at("topics")) {
        Topic topic;
        topic.id = t.at("id").get<int>();
        topic.source_label = topic.id;
        topic.count = t.at("count").get<std::size_t>();
        topic.name = t.at("name").get<std::string>();
        for (const auto& pair : t.at("top_terms")) {
            topic.top_terms.emplace_back(pair.at(0).get<std::string>(), pair.at(1).get<double>());
        }
        a.topics.push_back(std::move(topic));
    }
    return a;
}

std::string markdown_cell(std::string_view text) {
    std::string out;
    for (char c : text) {
        if (c == '|') out += "\\|";
        else if (c == '\n' || c == '\r') out.push_back(' ');
        else out.push_back(c);
    }
    return out;
}

std::string csv_field(std::string_view text) {
    const bool quote = text.find_first_of(",\"\r\n") != std::string_view::npos;
    if (!quote) return std::string(text);
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

namespace {

std::string representation(const Topic& topic) {
    std::string out;
    for (std::size_t i = 0; i < topic.top_terms.size(); ++i) {
        if (i > 0) out += ", ";
        out += topic.top_terms[i].first;
    }
    return out;
}

std::string join_sentences(const std::vector<std::string>& sentences) {
    std::string out;
    for (const auto& s : sentences) {
        if (!out.empty()) out.push_back(' ');
        out += s;
    }
    return out;
}

std::string solution_text(const QAPairSummary& pair) {
    return pair.solution ? join_sentences(pair.solution->sentences) : std::string();
}

}  // namespace

std::string emit_topics_table(std::span<const Topic> topics, OutputFormat format) {
    std::ostringstream out;
    switch (format) {
        case OutputFormat::Markdown:
            out << "| Topic | Count | Name | Representation |\n";
            out << "| --- | --- | --- | --- |\n";
            for (const auto& t : topics) {
                out << "| " << t.id << " | " << t.count << " | " << markdown_cell(t.name) << " | "
                    << markdown_cell(representation(t)) << " |\n";
            }
            break;
        case OutputFormat::Csv:
            out << "Topic,Count,Name,Representation\n";
            for (const auto& t : topics) {
                out << t.id << ',' << t.count << ',' << csv_field(t.name) << ',' << csv_field(representation(t)) << '\n';
            }
            break;
        case OutputFormat::Json: {
            TopicModelArtifact artifact;
            artifact.topics.assign(topics.begin(), topics.end());
            out << to_json(artifact).dump(2, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
            break;
        }
    }
    return out.str();
}

std::string emit_topics_table(const TopicModelArtifact& artifact, OutputFormat format) {
    if (format == OutputFormat::Json) return to_json(artifact).dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
    return emit_topics_table(std::span<const Topic>(artifact.topics), format);
}

ordered_json to_json(const QAPairSummary& pair) {
    ordered_json j;
    j["question_id"] = pair.question_id;
    j["problem"] = pair.problem.sentences;
    j["solution"] = pair.solution ? ordered_json(pair.solution->sentences) : ordered_json(nullptr);
    std::vector<PostId> sources{pair.question_id};
    if (pair.solution) {
        for (PostId id : pair.solution->source_post_ids) sources.push_back(id);
    }
    j["sources"] = sources;
    return j;
}

ordered_json to_json(const TopicReport& report) {
    ordered_json j;
    j["topic_id"] = report.digest.topic_id;
    j["digest"] = report.digest.summary.sentences;
    j["pairs"] = ordered_json::array();
    for (const auto& pair : report.pairs) j["pairs"].push_back(to_json(pair));
    return j;
}

std::string emit_summary_table(std::span<const QAPairSummary> pairs, OutputFormat format) {
    std::ostringstream out;
    switch (format) {
        case OutputFormat::Markdown:
            out << "| Questions | Answers |\n";
            out << "| --- | --- |\n";
            for (const auto& p : pairs) {
                out << "| " << markdown_cell(join_sentences(p.problem.sentences)) << " | "
                    << markdown_cell(solution_text(p)) << " |\n";
            }
            break;
        case OutputFormat::Csv:
            out << "Questions,Answers\n";
            for (const auto& p : pairs) {
                out << csv_field(join_sentences(p.problem.sentences)) << ',' << csv_field(solution_text(p)) << '\n';
            }
            break;
        case OutputFormat::Json: {
            ordered_json j = ordered_json::array();
            for (const auto& p : pairs) j.push_back(to_json(p));
            out << j.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
            break;
        }
    }
    return out.str();
}

std::string emit_summary_document(std::span<const Topic> topics, std::span<const TopicReport> reports,
                                  OutputFormat format) {
    std::ostringstream out;
    switch (format) {
        case OutputFormat::Markdown:
            for (std::size_t i = 0; i < reports.size(); ++i) {
                const auto& report = reports[i];
                std::string name;
                for (const auto& t : topics) {
                    if (t.id == report.digest.topic_id) name = t.name;
                }
                if (i > 0) out << '\n';
                out << "## Topic " << report.digest.topic_id << ": " << name << "\n\n";
                out << "Digest: " << join_sentences(report.digest.summary.sentences) << "\n\n";
                out << emit_summary_table(std::span<const QAPairSummary>(report.pairs), OutputFormat::Markdown);
            }
            break;
        case OutputFormat::Csv:
            out << "Topic,Questions,Answers\n";
            for (const auto& report : reports) {
                for (const auto& p : report.pairs) {
                    out << report.digest.topic_id << ',' << csv_field(join_sentences(p.problem.sentences)) << ','
                        << csv_field(solution_text(p)) << '\n';
                }
            }
            break;
        case OutputFormat::Json: {
            ordered_json j = ordered_json::array();
            for (const auto& report : reports) j.push_back(to_json(report));
            out << j.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
            break;
        }
    }
    return out.str();
}

}  // namespace stackdigest
