#include <algorithm>
#include <limits>
#include <numeric>
#include <unordered_set>

#include "stackdigest/summarize.hpp"

namespace stackdigest {

namespace {

ExtractiveSummary assemble(std::span<const SentenceInput> sentences, std::vector<std::size_t> picked, std::size_t m) {
    std::sort(picked.begin(), picked.end());
    ExtractiveSummary out;
    out.target_len = m;
    for (std::size_t i : picked) {
        out.sentences.push_back(sentences[i].text);
        if (std::find(out.source_post_ids.begin(), out.source_post_ids.end(), sentences[i].source) ==
            out.source_post_ids.end()) {
            out.source_post_ids.push_back(sentences[i].source);
        }
    }
    out.selected = std::move(picked);
    return out;
}

}  // namespace

ExtractiveSummary extractive_summarize(std::span<const SentenceInput> sentences, const EmbeddingMatrix& vectors,
                                       std::size_t m, std::uint64_t seed) {
    if (m == 0) throw std::invalid_argument("summary length must be positive");
    if (static_cast<std::size_t>(vectors.rows()) != sentences.size()) {
        throw std::invalid_argument("sentence vector count does not match sentence count");
    }

    std::vector<std::size_t> distinct;
    std::unordered_set<std::string_view> seen;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        if (seen.insert(sentences[i].text).second) distinct.push_back(i);
    }
    if (distinct.size() <= m) return assemble(sentences, distinct, m);

    EmbeddingMatrix subset(static_cast<Eigen::Index>(distinct.size()), vectors.cols());
    for (std::size_t r = 0; r < distinct.size(); ++r) {
        subset.row(static_cast<Eigen::Index>(r)) = vectors.row(static_cast<Eigen::Index>(distinct[r]));
    }
    const KMeansResult clusters = kmeans(subset, m, seed);
    const auto& labels = clusters.assignment.labels;

    std::vector<std::size_t> picked;
    for (int t = 1; t <= clusters.assignment.topic_count(); ++t) {
        std::size_t best = distinct.size();
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < distinct.size(); ++r) {
            if (labels[r] != t) continue;
            const double d = (subset.row(static_cast<Eigen::Index>(r)) - clusters.centroids.row(t - 1)).norm();
            if (d < best_d) {
                best_d = d;
                best = r;
            }
        }
        if (best < distinct.size()) picked.push_back(distinct[best]);
    }
    return assemble(sentences, std::move(picked), m);
}

std::vector<PostId> select_representative_questions(std::span<const PostId> member_ids,
                                                     std::span<const EmbeddingVector> member_vectors,
                                                     const EmbeddingVector& centroid, std::size_t k) {
    if (member_ids.size() != member_vectors.size()) {
        throw std::invalid_argument("member ids and vectors differ in length");
    }
    std::vector<std::pair<double, PostId>> ranked;
    ranked.reserve(member_ids.size());
    for (std::size_t i = 0; i < member_ids.size(); ++i) {
        ranked.emplace_back(cosine_similarity(member_vectors[i], centroid), member_ids[i]);
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::vector<PostId> out;
    for (std::size_t i = 0; i < ranked.size() && i < k; ++i) out.push_back(ranked[i].second);
    return out;
}

std::vector<RawPost> filter_answers(const RawPost& question, const PostStore& store, std::int64_t score_min) {
    if (question.post_type != PostType::Question) throw std::invalid_argument("filter_answers expects a question");
    std::vector<RawPost> out;
    for (const auto& answer : store.answers_of(question.id)) {
        const bool accepted = question.accepted_answer_id && *question.accepted_answer_id == answer.id;
        if (accepted || answer.score >= score_min) out.push_back(answer);
    }
    return out;
}

Summarizer::Summarizer(const PostStore& store, EmbeddingProvider& provider, SummaryParams params,
                       const StopWords& stop_words)
    : store_(store), provider_(provider), params_(params), stop_words_(stop_words) {}

const CleanDocument& Summarizer::document(const RawPost& post) {
    auto it = documents_.find(post.id);
    if (it == documents_.end()) it = documents_.emplace(post.id, preprocess_post(post, stop_words_)).first;
    return it->second;
}

ExtractiveSummary Summarizer::summarize(const std::vector<SentenceInput>& sentences, std::size_t m,
                                        std::uint64_t seed) {
    std::vector<std::string> texts;
    texts.reserve(sentences.size());
    for (const auto& s : sentences) texts.push_back(s.text);
    const auto vectors = provider_.embed_batch(texts);
    const EmbeddingMatrix matrix =
        vectors.empty() ? EmbeddingMatrix(0, static_cast<Eigen::Index>(provider_.dim())) : to_matrix(vectors);
    return extractive_summarize(sentences, matrix, m, seed);
}

ExtractiveSummary Summarizer::summarize_question(PostId question_id, std::uint64_t seed) {
    const RawPost* question = store_.find_question(question_id);
    if (question == nullptr) throw SummaryError("unknown question id " + std::to_string(question_id));
    std::vector<SentenceInput> sentences;
    for (const auto& s : document(*question).sentences) sentences.push_back({s, question_id});
    return summarize(sentences, params_.sentences_question, seed);
}

std::optional<ExtractiveSummary> Summarizer::summarize_answers(PostId question_id, std::uint64_t seed) {
    const RawPost* question = store_.find_question(question_id);
    if (question == nullptr) throw SummaryError("unknown question id " + std::to_string(question_id));
    const auto answers = filter_answers(*question, store_, params_.score_min);
    if (answers.empty()) return std::nullopt;
    std::vector<SentenceInput> sentences;
    for (const auto& answer : answers) {
        for (const auto& s : document(answer).sentences) sentences.push_back({s, answer.id});
    }
    return summarize(sentences, params_.sentences_answer, seed);
}

TopicReport Summarizer::build_topic_report(const Topic& topic, std::span<const PostId> member_ids,
                                           std::span<const EmbeddingVector> member_vectors, std::uint64_t seed) {
    if (member_ids.empty()) throw SummaryError("topic " + std::to_string(topic.id) + " has no members");
    std::vector<int> all_members(member_ids.size(), topic.id);
    const EmbeddingVector centroid = topic_centroid(topic.id, all_members, member_vectors);

    const std::size_t pool = std::max(params_.pool_size, params_.questions_per_topic);
    const auto ranked = select_representative_questions(member_ids, member_vectors, centroid, pool);

    TopicReport report;
    report.digest.topic_id = topic.id;
    std::vector<SentenceInput> pooled;
    for (std::size_t i = 0; i < ranked.size() && i < params_.pool_size; ++i) {
        const RawPost* question = store_.find_question(ranked[i]);
        if (question == nullptr) throw SummaryError("topic member " + std::to_string(ranked[i]) + " not in store");
        for (const auto& s : document(*question).sentences) pooled.push_back({s, ranked[i]});
    }
    report.digest.summary = summarize(pooled, params_.sentences_digest, seed);

    for (std::size_t i = 0; i < ranked.size() && i < params_.questions_per_topic; ++i) {
        QAPairSummary pair;
        pair.topic_id = topic.id;
        pair.question_id = ranked[i];
        pair.problem = summarize_question(ranked[i], seed);
        pair.solution = summarize_answers(ranked[i], seed);
        report.pairs.push_back(std::move(pair));
    }
    return report;
}

}  // namespace stackdigest
