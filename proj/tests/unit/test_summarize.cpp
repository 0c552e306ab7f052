#include <catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <set>

#include "stackdigest/summarize.hpp"

using namespace stackdigest;

namespace {

using Strings = std::vector<std::string>;

const std::vector<Strings> kGroups{
    {"gradle", "build", "proguard", "studio", "eclipse", "library", "project", "compile"},
    {"fragment", "recyclerview", "adapter", "listview", "scroll", "layout", "item", "row"},
    {"notification", "service", "intent", "broadcast", "push", "activity", "receiver", "alarm"},
};

std::string group_sentence(std::mt19937_64& rng, const Strings& vocab) {
    std::string s;
    const std::size_t n = 4 + rng() % 4;
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) s.push_back(' ');
        s += vocab[rng() % vocab.size()];
    }
    s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s + " " + std::to_string(rng()) + ".";
}

EmbeddingMatrix embed(const std::vector<SentenceInput>& sentences) {
    Strings texts;
    for (const auto& s : sentences) texts.push_back(s.text);
    const auto vectors = builtin_embed_batch(texts, 256, 42);
    return vectors.empty() ? EmbeddingMatrix(0, 256) : to_matrix(vectors);
}

std::size_t group_of(const std::string& sentence) {
    for (std::size_t g = 0; g < kGroups.size(); ++g) {
        for (const auto& w : kGroups[g]) {
            std::string lower = sentence;
            std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
            if (lower.find(w) != std::string::npos) return g;
        }
    }
    return kGroups.size();
}

RawPost make_question(PostId id, std::string title, std::string body, std::optional<PostId> accepted = {}) {
    RawPost q;
    q.id = id;
    q.post_type = PostType::Question;
    q.tags = {"android"};
    q.title = title.empty() ? std::nullopt : std::optional<std::string>(std::move(title));
    q.body_html = std::move(body);
    q.accepted_answer_id = accepted;
    q.creation_date = Timestamp(std::chrono::seconds(1'500'000'000));
    return q;
}

RawPost make_answer(PostId id, PostId parent, std::int64_t score, std::string body) {
    RawPost a;
    a.id = id;
    a.post_type = PostType::Answer;
    a.parent_id = parent;
    a.score = score;
    a.body_html = std::move(body);
    a.creation_date = Timestamp(std::chrono::seconds(1'500'000'100));
    return a;
}

PostStore make_store(const std::vector<RawPost>& posts) {
    return filter_posts(posts, "android", DateWindow::default_window());
}

}  // namespace

TEST_CASE("short inputs are returned whole", "[summarize][extractive]") {
    const std::vector<SentenceInput> one{{"Only sentence here.", 5}};
    const auto s = extractive_summarize(one, embed(one), 3, 1);
    CHECK(s.sentences == Strings{"Only sentence here."});
    CHECK(s.source_post_ids == std::vector<PostId>{5});
    CHECK(s.target_len == 3);

    const auto empty = extractive_summarize({}, EmbeddingMatrix(0, 256), 2, 1);
    CHECK(empty.sentences.empty());
    CHECK_THROWS_AS(extractive_summarize(one, embed(one), 0, 1), std::invalid_argument);
}

TEST_CASE("repeated sentences count once", "[summarize][extractive]") {
    const std::vector<SentenceInput> in{{"Same text.", 1}, {"Other text.", 1}, {"Same text.", 2}};
    const auto s = extractive_summarize(in, embed(in), 3, 1);
    CHECK(s.sentences == Strings{"Same text.", "Other text."});
    CHECK(s.selected == std::vector<std::size_t>{0, 1});
}

TEST_CASE("one sentence per semantic group", "[summarize][extractive]") {
    std::mt19937_64 rng(21);
    std::vector<SentenceInput> in;
    for (int i = 0; i < 30; ++i) in.push_back({group_sentence(rng, kGroups[static_cast<std::size_t>(i % 3)]), i});
    std::shuffle(in.begin(), in.end(), rng);
    const auto s = extractive_summarize(in, embed(in), 3, 42);
    REQUIRE(s.sentences.size() == 3);
    std::set<std::size_t> groups;
    for (const auto& sentence : s.sentences) groups.insert(group_of(sentence));
    CHECK(groups == std::set<std::size_t>{0, 1, 2});
}

TEST_CASE("extractive summaries are ordered verbatim subsequences", "[summarize][extractive][property]") {
    std::mt19937_64 rng(22);
    for (int doc = 0; doc < 300; ++doc) {
        std::vector<SentenceInput> in;
        const std::size_t n = rng() % 25;
        for (std::size_t i = 0; i < n; ++i) {
            // Some exact repeats to exercise de-duplication.
            if (!in.empty() && rng() % 6 == 0) in.push_back(in[rng() % in.size()]);
            else in.push_back({group_sentence(rng, kGroups[rng() % 3]), static_cast<PostId>(1 + rng() % 4)});
        }
        const std::size_t m = 1 + rng() % 5;
        const auto s = extractive_summarize(in, embed(in), m, static_cast<std::uint64_t>(doc));
        REQUIRE(s.sentences.size() <= m);
        REQUIRE(s.sentences.size() == s.selected.size());
        std::set<std::string> unique(s.sentences.begin(), s.sentences.end());
        REQUIRE(unique.size() == s.sentences.size());
        for (std::size_t k = 0; k < s.selected.size(); ++k) {
            if (k > 0) REQUIRE(s.selected[k - 1] < s.selected[k]);
            REQUIRE(in[s.selected[k]].text == s.sentences[k]);
        }
        REQUIRE(s == extractive_summarize(in, embed(in), m, static_cast<std::uint64_t>(doc)));
    }
}

TEST_CASE("representative questions rank by centroid similarity", "[summarize][representatives]") {
    const std::vector<PostId> ids{10, 20};
    const std::vector<EmbeddingVector> vectors{EmbeddingVector({1.0f, 0.2f}), EmbeddingVector({1.0f, 0.0f})};
    const EmbeddingVector centroid({1.0f, 0.05f});
    CHECK(select_representative_questions(ids, vectors, centroid, 3) == std::vector<PostId>{20, 10});

    // Ties go to the smaller id.
    const std::vector<PostId> tie_ids{9, 4};
    const std::vector<EmbeddingVector> same{EmbeddingVector({0.0f, 1.0f}), EmbeddingVector({0.0f, 1.0f})};
    CHECK(select_representative_questions(tie_ids, same, centroid, 2) == std::vector<PostId>{4, 9});
}

TEST_CASE("an off-center member ranks last", "[summarize][representatives]") {
    std::mt19937_64 rng(23);
    std::normal_distribution<double> g(0.0, 0.05);
    std::vector<PostId> ids;
    std::vector<EmbeddingVector> vectors;
    for (int i = 0; i < 20; ++i) {
        ids.push_back(100 + i);
        vectors.push_back(EmbeddingVector({static_cast<float>(1.0 + g(rng)), static_cast<float>(1.0 + g(rng)),
                                           static_cast<float>(g(rng))}));
    }
    ids.push_back(7);
    vectors.push_back(EmbeddingVector({1.0f, 0.2f, 0.9f}));
    std::vector<int> labels(ids.size(), 1);
    const EmbeddingVector centroid = topic_centroid(1, labels, vectors);

    const auto ranked = select_representative_questions(ids, vectors, centroid, ids.size());
    CHECK(ranked.back() == 7);
    // Agrees with direct cosine ranking.
    for (std::size_t k = 1; k < ranked.size(); ++k) {
        auto pos = [&](PostId id) { return std::find(ids.begin(), ids.end(), id) - ids.begin(); };
        CHECK(cosine_similarity(vectors[pos(ranked[k - 1])], centroid) >= cosine_similarity(vectors[pos(ranked[k])], centroid));
    }
}

TEST_CASE("answer filter truth table", "[summarize][filter]") {
    const PostStore store = make_store({
        make_question(1, "Accepted", "<p>q</p>", PostId{11}),
        make_answer(11, 1, 0, "<p>accepted, score 0</p>"),
        make_question(2, "Scored", "<p>q</p>"),
        make_answer(21, 2, 2, "<p>score 2</p>"),
        make_answer(22, 2, 1, "<p>score 1</p>"),
    });
    auto ids = [](const std::vector<RawPost>& posts) {
        std::vector<PostId> out;
        for (const auto& p : posts) out.push_back(p.id);
        return out;
    };
    CHECK(ids(filter_answers(*store.find_question(1), store)) == std::vector<PostId>{11});
    CHECK(ids(filter_answers(*store.find_question(2), store)) == std::vector<PostId>{21});
    CHECK(ids(filter_answers(*store.find_question(2), store, 5)).empty());
    CHECK(ids(filter_answers(*store.find_question(1), store, 5)) == std::vector<PostId>{11});
}

TEST_CASE("question and answer summaries", "[summarize][pairs]") {
    const PostStore store = make_store({
        make_question(1, "", "<p>The emulator never finishes booting.</p>"),
        make_question(2, "Emulator hangs on the build server",
                      "<p>The CI job tries to launch the emulator before tests. It waits forever on boot. "
                      "The log shows no device attached. Locally the same command works fine.</p>"
                      "<pre><code>emulator -avd test -no-window</code></pre>",
                      PostId{21}),
        make_answer(21, 2, 0,
                    "<p>Start the emulator with the no-window flag and wait for the boot property. "
                    "Then run the instrumentation tests. Headless agents need software rendering.</p>"),
        make_answer(22, 2, 1, "<p>Try rebooting the agent.</p>"),
        make_question(3, "No good answers", "<p>Nobody helped here.</p>"),
        make_answer(31, 3, 1, "<p>Low scored reply.</p>"),
    });
    BuiltinEmbedder embedder(256, 42);
    Summarizer summarizer(store, embedder);

    CHECK(summarizer.summarize_question(1, 5).sentences == Strings{"The emulator never finishes booting."});
    CHECK_FALSE(summarizer.summarize_answers(3, 5).has_value());

    const auto problem = summarizer.summarize_question(2, 5);
    const auto solution = summarizer.summarize_answers(2, 5);
    REQUIRE(solution.has_value());
    CHECK(problem.sentences.size() <= 2);
    CHECK(solution->sentences.size() <= 2);
    CHECK_FALSE(solution->sentences.empty());
    const Strings question_sentences = preprocess_post(*store.find_question(2)).sentences;
    for (const auto& s : problem.sentences) {
        CHECK(std::find(question_sentences.begin(), question_sentences.end(), s) != question_sentences.end());
    }
    const Strings answer_sentences = preprocess_post(store.answers_of(2)[0]).sentences;
    for (const auto& s : solution->sentences) {
        CHECK(std::find(answer_sentences.begin(), answer_sentences.end(), s) != answer_sentences.end());
    }
    CHECK(solution->source_post_ids == std::vector<PostId>{21});
    CHECK_THROWS_AS(summarizer.summarize_question(99, 5), SummaryError);
}

namespace {

struct TopicFixture {
    PostStore store;
    std::vector<PostId> ids;
    std::vector<EmbeddingVector> vectors;
};

TopicFixture topic_fixture(std::size_t questions, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<RawPost> posts;
    PostId next = 1;
    Strings texts;
    std::vector<PostId> ids;
    for (std::size_t q = 0; q < questions; ++q) {
        const PostId qid = next++;
        std::string body = "<p>";
        for (int s = 0; s < 3; ++s) body += group_sentence(rng, kGroups[0]) + " ";
        body += "</p>";
        std::vector<RawPost> answers;
        const std::size_t n_answers = rng() % 3;
        for (std::size_t a = 0; a < n_answers; ++a) {
            answers.push_back(make_answer(next++, qid, static_cast<std::int64_t>(rng() % 5) - 1,
                                          "<p>" + group_sentence(rng, kGroups[0]) + " " +
                                              group_sentence(rng, kGroups[0]) + "</p>"));
        }
        std::optional<PostId> accepted;
        if (!answers.empty() && rng() % 2 == 0) accepted = answers[0].id;
        RawPost question = make_question(qid, group_sentence(rng, kGroups[0]), body, accepted);
        texts.push_back(preprocess_post(question).clean_text);
        ids.push_back(qid);
        posts.push_back(std::move(question));
        for (auto& a : answers) posts.push_back(std::move(a));
    }
    TopicFixture f;
    f.store = make_store(posts);
    f.ids = ids;
    f.vectors = builtin_embed_batch(texts, 256, 42);
    return f;
}

Topic topic_with_id(int id) {
    Topic t;
    t.id = id;
    t.source_label = id;
    return t;
}

}  // namespace

TEST_CASE("topic report has K pairs and a digest from members", "[summarize][report]") {
    const TopicFixture f = topic_fixture(3, 24);
    BuiltinEmbedder embedder(256, 42);
    Summarizer summarizer(f.store, embedder);
    const TopicReport report = summarizer.build_topic_report(topic_with_id(1), f.ids, f.vectors, topic_seed(42, 1));

    CHECK(report.pairs.size() == 3);
    CHECK(report.digest.topic_id == 1);
    CHECK(report.digest.summary.sentences.size() <= 5);
    for (PostId id : report.digest.summary.source_post_ids) {
        CHECK(std::find(f.ids.begin(), f.ids.end(), id) != f.ids.end());
    }
    std::set<PostId> paired;
    for (const auto& pair : report.pairs) paired.insert(pair.question_id);
    CHECK(paired == std::set<PostId>(f.ids.begin(), f.ids.end()));

    // With a generous digest length every member contributes.
    SummaryParams wide;
    wide.sentences_digest = 100;
    Summarizer wide_summarizer(f.store, embedder, wide);
    const auto wide_report = wide_summarizer.build_topic_report(topic_with_id(1), f.ids, f.vectors, 1);
    CHECK(std::set<PostId>(wide_report.digest.summary.source_post_ids.begin(),
                           wide_report.digest.summary.source_post_ids.end()) == paired);
}

TEST_CASE("topic reports are deterministic and filter-sound", "[summarize][report][property]") {
    const TopicFixture f = topic_fixture(40, 25);
    BuiltinEmbedder embedder(256, 42);
    for (std::int64_t score_min : {0, 2, 3}) {
        SummaryParams params;
        params.score_min = score_min;
        params.questions_per_topic = 10;
        Summarizer a(f.store, embedder, params);
        Summarizer b(f.store, embedder, params);
        const auto ra = a.build_topic_report(topic_with_id(2), f.ids, f.vectors, 77);
        CHECK(ra == b.build_topic_report(topic_with_id(2), f.ids, f.vectors, 77));

        for (const auto& pair : ra.pairs) {
            if (!pair.solution) continue;
            const RawPost* question = f.store.find_question(pair.question_id);
            for (PostId source : pair.solution->source_post_ids) {
                const auto& answers = f.store.answers_of(pair.question_id);
                const auto it = std::find_if(answers.begin(), answers.end(),
                                             [&](const RawPost& p) { return p.id == source; });
                REQUIRE(it != answers.end());
                const bool accepted = question->accepted_answer_id == std::optional<PostId>(source);
                CHECK((accepted || it->score >= score_min));
            }
        }
    }
}

TEST_CASE("raising K only extends the emitted questions", "[summarize][report][property]") {
    const TopicFixture f = topic_fixture(25, 26);
    BuiltinEmbedder embedder(256, 42);
    std::vector<PostId> previous;
    for (std::size_t k = 1; k <= 12; ++k) {
        SummaryParams params;
        params.questions_per_topic = k;
        Summarizer s(f.store, embedder, params);
        std::vector<PostId> emitted;
        for (const auto& pair : s.build_topic_report(topic_with_id(1), f.ids, f.vectors, 3).pairs) {
            emitted.push_back(pair.question_id);
        }
        REQUIRE(emitted.size() == k);
        REQUIRE(std::equal(previous.begin(), previous.end(), emitted.begin()));
        previous = emitted;
    }
}

TEST_CASE("per-topic seeds make report order irrelevant", "[summarize][report]") {
    const TopicFixture f = topic_fixture(12, 27);
    BuiltinEmbedder embedder(256, 42);
    Summarizer forward(f.store, embedder);
    const auto r1 = forward.build_topic_report(topic_with_id(1), f.ids, f.vectors, topic_seed(9, 1));
    const auto r2 = forward.build_topic_report(topic_with_id(2), f.ids, f.vectors, topic_seed(9, 2));
    Summarizer backward(f.store, embedder);
    CHECK(backward.build_topic_report(topic_with_id(2), f.ids, f.vectors, topic_seed(9, 2)) == r2);
    CHECK(backward.build_topic_report(topic_with_id(1), f.ids, f.vectors, topic_seed(9, 1)) == r1);
    CHECK(topic_seed(9, 1) != topic_seed(9, 2));
}
