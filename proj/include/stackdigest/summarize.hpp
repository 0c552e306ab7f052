#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stackdigest/embed.hpp"
#include "stackdigest/ingest.hpp"
#include "stackdigest/preprocess.hpp"
#include "stackdigest/topics.hpp"

namespace stackdigest {

class SummaryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SentenceInput {
    std::string text;
    PostId source = 0;
};

struct ExtractiveSummary {
    std::vector<std::string> sentences;
    /// Distinct contributing posts, in order of first selected sentence.
    std::vector<PostId> source_post_ids;
    std::size_t target_len = 0;
    /// Positions of the selected sentences in the input.
    std::vector<std::size_t> selected;

    bool operator==(const ExtractiveSummary&) const = default;
};

/// Cluster-then-nearest-centroid extraction. With more than `m` distinct
/// sentences, runs seeded k-means (k = m) over the sentence vectors and keeps
/// the sentence closest to each centroid (ties: lowest index), in input order.
/// Repeated sentence strings are considered once, at their first position.
ExtractiveSummary extractive_summarize(std::span<const SentenceInput> sentences, const EmbeddingMatrix& vectors,
                                       std::size_t m, std::uint64_t seed);

/// Members ranked by cosine to the centroid, descending; ties by ascending id.
std::vector<PostId> select_representative_questions(std::span<const PostId> member_ids,
                                                     std::span<const EmbeddingVector> member_vectors,
                                                     const EmbeddingVector& centroid, std::size_t k);

/// Accepted answer or score >= score_min, in store order.
std::vector<RawPost> filter_answers(const RawPost& question, const PostStore& store, std::int64_t score_min = 2);

struct SummaryParams {
    std::size_t questions_per_topic = 3;  // K
    std::size_t pool_size = 50;           // M
    std::size_t sentences_question = 2;   // m_q
    std::size_t sentences_answer = 2;     // m_a
    std::size_t sentences_digest = 5;     // m_t
    std::int64_t score_min = 2;
};

struct QAPairSummary {
    int topic_id = 0;
    PostId question_id = 0;
    ExtractiveSummary problem;
    std::optional<ExtractiveSummary> solution;

    bool operator==(const QAPairSummary&) const = default;
};

struct TopicDigest {
    int topic_id = 0;
    ExtractiveSummary summary;

    bool operator==(const TopicDigest&) const = default;
};

struct TopicReport {
    TopicDigest digest;
    std::vector<QAPairSummary> pairs;

    bool operator==(const TopicReport&) const = default;
};

/// Per-topic seed, independent of the order topics are processed in.
inline std::uint64_t topic_seed(std::uint64_t seed, int topic_id) {
    return seed ^ static_cast<std::uint64_t>(topic_id);
}

/// Question/answer summarization over a store. Sentence embeddings come from
/// the supplied provider; preprocessing results are memoized per post.
class Summarizer {
public:
    Summarizer(const PostStore& store, EmbeddingProvider& provider, SummaryParams params = {},
               const StopWords& stop_words = StopWords::bundled());

    ExtractiveSummary summarize_question(PostId question_id, std::uint64_t seed);
    std::optional<ExtractiveSummary> summarize_answers(PostId question_id, std::uint64_t seed);

    /// Digest over the top-M members plus K question/answer pairs. Members and
    /// vectors are the topic's questions in the document embedding space.
    TopicReport build_topic_report(const Topic& topic, std::span<const PostId> member_ids,
                                   std::span<const EmbeddingVector> member_vectors, std::uint64_t seed);

    const SummaryParams& params() const { return params_; }

private:
    const CleanDocument& document(const RawPost& post);
    ExtractiveSummary summarize(const std::vector<SentenceInput>& sentences, std::size_t m, std::uint64_t seed);

    const PostStore& store_;
    EmbeddingProvider& provider_;
    SummaryParams params_;
    const StopWords& stop_words_;
    std::map<PostId, CleanDocument> documents_;
};

}  // namespace stackdigest
