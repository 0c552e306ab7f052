#include "stackdigest/ingest.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>

#include "stackdigest/atomic_file.hpp"

namespace stackdigest {

using nlohmann::json;

std::size_t PostStore::answer_count() const {
    std::size_t n = 0;
    for (const auto& [_, answers] : answers_by_parent) n += answers.size();
    return n;
}

const RawPost* PostStore::find_question(PostId id) const {
    auto it = questions.find(id);
    return it == questions.end() ? nullptr : &it->second;
}

const std::vector<RawPost>& PostStore::answers_of(PostId question_id) const {
    static const std::vector<RawPost> empty;
    auto it = answers_by_parent.find(question_id);
    return it == answers_by_parent.end() ? empty : it->second;
}

DateWindow DateWindow::default_window() {
    using namespace std::chrono;
    return {sys_days{year{2009} / January / 1}, sys_days{year{2022} / May / 1}};
}

void sort_answers(std::vector<RawPost>& answers, std::optional<PostId> accepted_id) {
    std::sort(answers.begin(), answers.end(), [&](const RawPost& a, const RawPost& b) {
        const bool a_acc = accepted_id && a.id == *accepted_id;
        const bool b_acc = accepted_id && b.id == *accepted_id;
        if (a_acc != b_acc) return a_acc;
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
}

PostFilter::PostFilter(std::string tag, DateWindow window) : tag_(std::move(tag)), window_(window) {
    if (!(window_.from < window_.to)) throw std::invalid_argument("date window must satisfy from < to");
    // Parsed tags are lowercase, so the configured tag must be too.
    std::transform(tag_.begin(), tag_.end(), tag_.begin(), [](unsigned char c) { return std::tolower(c); });
}

void PostFilter::add(RawPost post) {
    if (post.post_type == PostType::Answer) {
        ++stats_.total_answers;
        pending_answers_.push_back(std::move(post));
        return;
    }
    ++stats_.total_questions;
    const bool tagged = std::find(post.tags.begin(), post.tags.end(), tag_) != post.tags.end();
    if (tagged && window_.contains(post.creation_date)) {
        ++stats_.kept_questions;
        const PostId id = post.id;
        store_.questions.insert_or_assign(id, std::move(post));
    } else {
        ++stats_.dropped_questions;
    }
}

PostStore PostFilter::finish() {
    for (auto& answer : pending_answers_) {
        const PostId parent = *answer.parent_id;
        if (store_.questions.count(parent) == 0) {
            ++store_.orphan_count;
            continue;
        }
        ++stats_.kept_answers;
        store_.answers_by_parent[parent].push_back(std::move(answer));
    }
    pending_answers_.clear();
    for (auto& [qid, answers] : store_.answers_by_parent) {
        sort_answers(answers, store_.questions.at(qid).accepted_answer_id);
    }
    return std::move(store_);
}

PostStore filter_posts(const std::vector<RawPost>& posts, const std::string& tag, DateWindow window,
                       FilterStats* stats) {
    PostFilter filter(tag, window);
    for (const auto& post : posts) filter.add(post);
    PostStore store = filter.finish();
    if (stats != nullptr) *stats = filter.stats();
    return store;
}

// --- NDJSON -------------------------------------------------------------

namespace {

[[noreturn]] void bad_record(std::size_t line_number, const std::string& why) {
    throw StoreError("store line " + std::to_string(line_number) + ": " + why);
}

}  // namespace

std::string post_to_json_line(const RawPost& post) {
    // nlohmann::ordered_json keeps the key order stable on disk.
    nlohmann::ordered_json j;
    j["id"] = post.id;
    j["type"] = post.post_type == PostType::Question ? "question" : "answer";
    j["parent_id"] = post.parent_id ? nlohmann::ordered_json(*post.parent_id) : nullptr;
    j["accepted_answer_id"] =
        post.accepted_answer_id ? nlohmann::ordered_json(*post.accepted_answer_id) : nullptr;
    j["score"] = post.score;
    j["creation_date"] = format_rfc3339(post.creation_date);
    j["tags"] = post.tags;
    j["title"] = post.title ? nlohmann::ordered_json(*post.title) : nullptr;
    j["body_html"] = post.body_html;
    return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

RawPost post_from_json_line(std::string_view line, std::size_t line_number) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        bad_record(line_number, std::string("invalid JSON (") + e.what() + ")");
    }
    if (!j.is_object()) bad_record(line_number, "record is not an object");
    static constexpr const char* kKeys[] = {"id",    "type",          "parent_id", "accepted_answer_id",
                                            "score", "creation_date", "tags",      "title",
                                            "body_html"};
    for (const char* key : kKeys) {
        if (!j.contains(key)) bad_record(line_number, std::string("missing \"") + key + "\"");
    }
    RawPost post;
    try {
        post.id = j.at("id").get<PostId>();
        const auto type = j.at("type").get<std::string>();
        if (type == "question") post.post_type = PostType::Question;
        else if (type == "answer") post.post_type = PostType::Answer;
        else bad_record(line_number, "unknown type \"" + type + "\"");
        if (!j.at("parent_id").is_null()) post.parent_id = j.at("parent_id").get<PostId>();
        if (!j.at("accepted_answer_id").is_null()) {
            post.accepted_answer_id = j.at("accepted_answer_id").get<PostId>();
        }
        post.score = j.at("score").get<std::int64_t>();
        auto ts = parse_timestamp(j.at("creation_date").get<std::string>());
        if (!ts) bad_record(line_number, "bad creation_date");
        post.creation_date = *ts;
        post.tags = j.at("tags").get<std::vector<std::string>>();
        if (!j.at("title").is_null()) post.title = j.at("title").get<std::string>();
        post.body_html = j.at("body_html").get<std::string>();
    } catch (const json::exception& e) {
        bad_record(line_number, e.what());
    }
    if (post.id <= 0) bad_record(line_number, "id must be positive");
    if (post.post_type == PostType::Answer && !post.parent_id) {
        bad_record(line_number, "answer without parent_id");
    }
    return post;
}

void write_store(const PostStore& store, std::ostream& out) {
    // Questions in id order, each followed by its answers in store order.
    for (const auto& [qid, question] : store.questions) {
        out << post_to_json_line(question) << '\n';
        for (const auto& answer : store.answers_of(qid)) out << post_to_json_line(answer) << '\n';
    }
}

PostStore read_store(std::istream& in) {
    PostStore store;
    std::vector<RawPost> answers;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        RawPost post = post_from_json_line(line, line_number);
        if (post.post_type == PostType::Question) {
            const PostId id = post.id;
            if (!store.questions.emplace(id, std::move(post)).second) {
                bad_record(line_number, "duplicate id " + std::to_string(id));
            }
        } else {
            answers.push_back(std::move(post));
        }
    }
    for (auto& answer : answers) {
        const PostId parent = *answer.parent_id;
        if (store.questions.count(parent) == 0) {
            throw StoreError("store answer " + std::to_string(answer.id) + " references missing question " +
                             std::to_string(parent));
        }
        store.answers_by_parent[parent].push_back(std::move(answer));
    }
    for (auto& [qid, list] : store.answers_by_parent) {
        sort_answers(list, store.questions.at(qid).accepted_answer_id);
    }
    return store;
}

void save_store(const PostStore& store, const std::filesystem::path& path) {
    write_file_atomically(path, [&](std::ostream& out) { write_store(store, out); });
}

PostStore load_store(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StoreError("cannot open store " + path.string());
    return read_store(in);
}

}  // namespace stackdigest
