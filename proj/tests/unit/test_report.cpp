#include <catch_amalgamated.hpp>

#include "stackdigest/report.hpp"

using namespace stackdigest;

namespace {

Topic gradle_topic() {
    Topic t;
    t.id = 1;
    t.source_label = 1;
    t.count = 14663;
    t.name = "project_error_build_gradle";
    double w = 10.0;
    for (const char* term :
         {"project", "proguard", "studio", "error", "build", "library", "file", "gradle", "android", "eclipse"}) {
        t.top_terms.emplace_back(term, w);
        w -= 0.5;
    }
    return t;
}

QAPairSummary pair(PostId question, std::vector<std::string> problem, std::optional<std::vector<std::string>> solution) {
    QAPairSummary p;
    p.topic_id = 1;
    p.question_id = question;
    p.problem.sentences = std::move(problem);
    p.problem.source_post_ids = {question};
    if (solution) {
        ExtractiveSummary s;
        s.sentences = std::move(*solution);
        s.source_post_ids = {question + 1};
        p.solution = s;
    }
    return p;
}

}  // namespace

TEST_CASE("topics table reproduces the four-column layout", "[report][topics]") {
    const std::vector<Topic> topics{gradle_topic()};
    const std::string md = emit_topics_table(topics, OutputFormat::Markdown);
    CHECK(md ==
          "| Topic | Count | Name | Representation |\n"
          "| --- | --- | --- | --- |\n"
          "| 1 | 14663 | project_error_build_gradle | project, proguard, studio, error, build, library, file, "
          "gradle, android, eclipse |\n");

    const std::string csv = emit_topics_table(topics, OutputFormat::Csv);
    CHECK(csv ==
          "Topic,Count,Name,Representation\n"
          "1,14663,project_error_build_gradle,\"project, proguard, studio, error, build, library, file, gradle, "
          "android, eclipse\"\n");
}

TEST_CASE("empty topic list gives a header-only table", "[report][topics]") {
    CHECK(emit_topics_table(std::span<const Topic>{}, OutputFormat::Markdown) ==
          "| Topic | Count | Name | Representation |\n| --- | --- | --- | --- |\n");
    CHECK(emit_topics_table(std::span<const Topic>{}, OutputFormat::Csv) == "Topic,Count,Name,Representation\n");
    CHECK(emit_topics_table(std::span<const Topic>{}, OutputFormat::Json).find("\"topics\": []") != std::string::npos);
}

TEST_CASE("topic model artifact round-trips through JSON", "[report][topics]") {
    TopicModelArtifact artifact;
    artifact.algorithm = ClusterAlgorithm::Dbscan;
    artifact.seed = 42;
    artifact.target_dim = 5;
    artifact.labels = {1, -1, 1, 2};
    artifact.topics = {gradle_topic()};
    const auto j = to_json(artifact);
    CHECK(j.at("algorithm") == "dbscan");
    CHECK(j.at("topics").at(0).at("top_terms").at(0).at(0) == "project");
    const std::vector<std::string> keys{"algorithm", "seed", "target_dim", "labels", "topics"};
    std::vector<std::string> got;
    for (const auto& [key, value] : j.items()) got.push_back(key);
    CHECK(got == keys);
    CHECK(topic_model_from_json(nlohmann::json::parse(j.dump())) == artifact);
}

TEST_CASE("cells escape table syntax", "[report][escaping]") {
    CHECK(markdown_cell("a | b\nc") == "a \\| b c");
    CHECK(csv_field("plain") == "plain");
    CHECK(csv_field("with, comma") == "\"with, comma\"");
    CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_field("two\nlines") == "\"two\nlines\"");
}

TEST_CASE("summary table pairs questions with answers", "[report][summary]") {
    const std::vector<QAPairSummary> pairs{
        pair(10, {"The emulator hangs.", "It never boots."}, std::vector<std::string>{"Use a cold boot."}),
        pair(20, {"Pipes | break tables?"}, std::nullopt),
    };
    CHECK(emit_summary_table(pairs, OutputFormat::Markdown) ==
          "| Questions | Answers |\n"
          "| --- | --- |\n"
          "| The emulator hangs. It never boots. | Use a cold boot. |\n"
          "| Pipes \\| break tables? |  |\n");
    CHECK(emit_summary_table(pairs, OutputFormat::Csv) ==
          "Questions,Answers\n"
          "The emulator hangs. It never boots.,Use a cold boot.\n"
          "Pipes | break tables?,\n");
    const auto j = nlohmann::json::parse(emit_summary_table(pairs, OutputFormat::Json));
    CHECK(j.size() == 2);
    CHECK(j[1].at("solution").is_null());
}

TEST_CASE("report records follow the JSON layout", "[report][summary]") {
    TopicReport report;
    report.digest.topic_id = 3;
    report.digest.summary.sentences = {"Digest sentence."};
    report.pairs = {pair(10, {"Problem."}, std::vector<std::string>{"Solution."}), pair(20, {"Other."}, std::nullopt)};
    const auto j = to_json(report);
    CHECK(j.dump() ==
          R"({"topic_id":3,"digest":["Digest sentence."],"pairs":[)"
          R"({"question_id":10,"problem":["Problem."],"solution":["Solution."],"sources":[10,11]},)"
          R"({"question_id":20,"problem":["Other."],"solution":null,"sources":[20]}]})");

    Topic topic = gradle_topic();
    topic.id = 3;
    const std::vector<Topic> topics{topic};
    const std::vector<TopicReport> reports{report};
    const std::string md = emit_summary_document(topics, reports, OutputFormat::Markdown);
    CHECK(md.find("## Topic 3: project_error_build_gradle") == 0);
    CHECK(md.find("| Problem. | Solution. |") != std::string::npos);
    CHECK(emit_summary_document(topics, reports, OutputFormat::Csv) ==
          "Topic,Questions,Answers\n3,Problem.,Solution.\n3,Other.,\n");
}

TEST_CASE("output formats parse by name", "[report][formats]") {
    CHECK(output_format_from_string("md") == OutputFormat::Markdown);
    CHECK(output_format_from_string("csv") == OutputFormat::Csv);
    CHECK(output_format_from_string("json") == OutputFormat::Json);
    CHECK(extension(OutputFormat::Markdown) == "md");
    CHECK_THROWS_AS(output_format_from_string("xlsx"), std::invalid_argument);
}
