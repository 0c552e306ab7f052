#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "stackdigest/topics.hpp"

namespace stackdigest {

std::size_t CtfidfWeights::class_index(int cls) const {
    auto it = std::lower_bound(classes.begin(), classes.end(), cls);
    if (it == classes.end() || *it != cls) throw TopicError("unknown topic class " + std::to_string(cls));
    return static_cast<std::size_t>(it - classes.begin());
}

namespace {

const TermScore* find_score(const CtfidfWeights& w, int cls, std::string_view term) {
    auto t = std::lower_bound(w.terms.begin(), w.terms.end(), term);
    if (t == w.terms.end() || *t != term) return nullptr;
    const auto term_index = static_cast<std::size_t>(t - w.terms.begin());
    const auto& row = w.scores[w.class_index(cls)];
    auto it = std::lower_bound(row.begin(), row.end(), term_index,
                               [](const TermScore& s, std::size_t idx) { return s.term < idx; });
    if (it == row.end() || it->term != term_index) return nullptr;
    return &*it;
}

}  // namespace

double CtfidfWeights::tf(int cls, std::string_view term) const {
    const TermScore* s = find_score(*this, cls, term);
    return s == nullptr ? 0.0 : s->tf;
}

double CtfidfWeights::weight(int cls, std::string_view term) const {
    const TermScore* s = find_score(*this, cls, term);
    return s == nullptr ? 0.0 : s->weight;
}

CtfidfWeights compute_ctfidf(std::span<const std::vector<std::string>> docs, std::span<const int> labels) {
    if (docs.size() != labels.size()) throw TopicError("labels do not cover the documents");

    std::map<int, std::map<std::string, std::size_t>> counts;
    std::map<int, std::size_t> sizes;
    std::map<std::string, std::size_t> doc_freq;
    std::size_t total_tokens = 0;
    for (std::size_t d = 0; d < docs.size(); ++d) {
        if (labels[d] == kNoiseLabel) continue;
        ++sizes[labels[d]];
        auto& bucket = counts[labels[d]];
        for (const auto& term : docs[d]) ++bucket[term];
        total_tokens += docs[d].size();
        for (const auto& term : std::set<std::string>(docs[d].begin(), docs[d].end())) ++doc_freq[term];
    }
    if (sizes.empty()) throw TopicError("c-TF-IDF needs at least one non-noise topic");

    CtfidfWeights w;
    for (const auto& [term, df] : doc_freq) {
        if (df >= 2) w.terms.push_back(term);
    }
    w.average_tokens = static_cast<double>(total_tokens) / static_cast<double>(sizes.size());
    w.term_totals.assign(w.terms.size(), 0.0);

    for (const auto& [cls, bucket] : counts) {
        w.classes.push_back(cls);
        w.class_sizes.push_back(sizes[cls]);
        std::vector<TermScore> row;
        for (const auto& [term, count] : bucket) {
            auto t = std::lower_bound(w.terms.begin(), w.terms.end(), term);
            if (t == w.terms.end() || *t != term) continue;
            const auto index = static_cast<std::size_t>(t - w.terms.begin());
            row.push_back({index, static_cast<double>(count), 0.0});
            w.term_totals[index] += static_cast<double>(count);
        }
        w.scores.push_back(std::move(row));
    }
    for (auto& row : w.scores) {
        for (auto& s : row) s.weight = s.tf * std::log(1.0 + w.average_tokens / w.term_totals[s.term]);
    }
    return w;
}

std::string topic_name(std::span<const std::pair<std::string, double>> ranked_terms) {
    std::string name;
    for (std::size_t i = 0; i < ranked_terms.size() && i < kNameTerms; ++i) {
        if (i > 0) name.push_back('_');
        name += ranked_terms[i].first;
    }
    return name;
}

std::vector<Topic> build_topics(const CtfidfWeights& weights, const TopicAssignment& labels) {
    if (weights.classes.empty()) throw TopicError("no topic weights");
    std::vector<Topic> topics;
    for (std::size_t c = 0; c < weights.classes.size(); ++c) {
        Topic topic;
        topic.source_label = weights.classes[c];
        topic.count = static_cast<std::size_t>(
            std::count(labels.labels.begin(), labels.labels.end(), topic.source_label));

        std::vector<const TermScore*> ranked;
        for (const auto& s : weights.scores[c]) {
            if (s.weight > 0.0) ranked.push_back(&s);
        }
        std::sort(ranked.begin(), ranked.end(), [&](const TermScore* a, const TermScore* b) {
            if (a->weight != b->weight) return a->weight > b->weight;
            return weights.terms[a->term] < weights.terms[b->term];
        });
        for (std::size_t i = 0; i < ranked.size() && i < kRepresentationSize; ++i) {
            topic.top_terms.emplace_back(weights.terms[ranked[i]->term], ranked[i]->weight);
        }
        topic.name = topic_name(topic.top_terms);
        topics.push_back(std::move(topic));
    }
    std::stable_sort(topics.begin(), topics.end(), [](const Topic& a, const Topic& b) {
        if (a.count != b.count) return a.count > b.count;
        return a.source_label < b.source_label;
    });
    for (std::size_t i = 0; i < topics.size(); ++i) topics[i].id = static_cast<int>(i) + 1;
    return topics;
}

std::vector<int> apply_topic_ids(std::span<const int> labels, std::span<const Topic> topics) {
    std::map<int, int> mapping;
    for (const auto& t : topics) mapping[t.source_label] = t.id;
    std::vector<int> out(labels.size(), kNoiseLabel);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == kNoiseLabel) continue;
        auto it = mapping.find(labels[i]);
        if (it == mapping.end()) throw TopicError("label " + std::to_string(labels[i]) + " has no topic");
        out[i] = it->second;
    }
    return out;
}

EmbeddingVector topic_centroid(int topic_id, std::span<const int> labels, std::span<const EmbeddingVector> vectors) {
    if (labels.size() != vectors.size()) throw TopicError("labels and vectors differ in length");
    std::vector<double> sum;
    std::size_t members = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != topic_id) continue;
        if (sum.empty()) sum.assign(vectors[i].dim(), 0.0);
        if (vectors[i].dim() != sum.size()) throw DimensionMismatch("topic members differ in dimension");
        for (std::size_t d = 0; d < sum.size(); ++d) sum[d] += vectors[i].values[d];
        ++members;
    }
    if (members == 0) throw TopicError("topic " + std::to_string(topic_id) + " has no members");
    std::vector<float> values(sum.size());
    for (std::size_t d = 0; d < sum.size(); ++d) values[d] = static_cast<float>(sum[d] / static_cast<double>(members));
    return EmbeddingVector(std::move(values));
}

int assign_nearest(const EmbeddingVector& vector, std::span<const EmbeddingVector> centroids) {
    if (centroids.empty()) throw TopicError("no centroids");
    int best = 0;
    double best_cos = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < centroids.size(); ++t) {
        if (centroids[t].is_zero()) throw TopicError("topic " + std::to_string(t + 1) + " has a zero centroid");
        const double c = cosine_similarity(vector, centroids[t]);
        if (c > best_cos) {
            best_cos = c;
            best = static_cast<int>(t) + 1;
        }
    }
    return best;
}

}  // namespace stackdigest
