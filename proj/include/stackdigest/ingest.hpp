#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace stackdigest {

using PostId = std::int64_t;
using Timestamp = std::chrono::sys_seconds;

enum class PostType { Question, Answer };

struct RawPost {
    PostId id = 0;
    PostType post_type = PostType::Question;
    std::optional<PostId> parent_id;
    std::optional<PostId> accepted_answer_id;
    std::int64_t score = 0;
    Timestamp creation_date{};
    std::vector<std::string> tags;
    std::optional<std::string> title;
    std::string body_html;

    bool operator==(const RawPost&) const = default;
};

/// Questions indexed by id plus their answers, ordered accepted first, then
/// score descending, then id ascending. Immutable once built.
struct PostStore {
    std::map<PostId, RawPost> questions;
    std::map<PostId, std::vector<RawPost>> answers_by_parent;
    std::size_t orphan_count = 0;

    std::size_t answer_count() const;
    const RawPost* find_question(PostId id) const;
    const std::vector<RawPost>& answers_of(PostId question_id) const;

    bool operator==(const PostStore&) const = default;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::uint64_t byte_offset)
        : std::runtime_error(what + " at byte " + std::to_string(byte_offset)),
          byte_offset_(byte_offset) {}
    std::uint64_t byte_offset() const { return byte_offset_; }

private:
    std::uint64_t byte_offset_;
};

class StoreError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// --- timestamps ---------------------------------------------------------

/// Accepts "YYYY-MM-DD", "YYYY-MM-DDThh:mm:ss" with optional fractional
/// seconds and optional trailing 'Z'. Fractions are truncated.
std::optional<Timestamp> parse_timestamp(std::string_view text);
std::string format_rfc3339(Timestamp t);

// --- dump parsing -------------------------------------------------------

struct ParseOptions {
    bool strict = false;
    std::size_t chunk_size = 64 * 1024;
};

struct ParseStats {
    std::uint64_t rows = 0;
    std::uint64_t emitted = 0;
    std::uint64_t skipped_other_type = 0;
    std::uint64_t skipped_malformed = 0;
    std::uint64_t tag_warnings = 0;
};

/// Pull-style streaming reader over a Posts.xml dump. Memory use is bounded
/// by the chunk size plus the rows decoded from one chunk.
class DumpReader {
public:
    explicit DumpReader(std::istream& in, ParseOptions options = {});
    ~DumpReader();
    DumpReader(const DumpReader&) = delete;
    DumpReader& operator=(const DumpReader&) = delete;

    /// Next question/answer row, or nullopt at end of document.
    /// Throws ParseError on malformed XML (or malformed rows in strict mode).
    std::optional<RawPost> next();

    const ParseStats& stats() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Convenience wrapper that drains a DumpReader.
std::vector<RawPost> parse_dump(std::istream& in, ParseOptions options = {},
                                ParseStats* stats = nullptr);

struct TagParseResult {
    std::vector<std::string> tags;
    bool balanced = true;
};

/// Splits "<a><b>" into {"a","b"}, lowercased. Unbalanced input is split on a
/// best-effort basis and reported through `balanced`.
TagParseResult parse_tags_checked(std::string_view raw);
/// Lenient form. Throws ParseError on unbalanced brackets when strict is set.
std::vector<std::string> parse_tags(std::string_view raw, bool strict = false);

// --- filtering ----------------------------------------------------------

struct DateWindow {
    Timestamp from;
    Timestamp to;

    static DateWindow default_window();
    bool contains(Timestamp t) const { return t >= from && t < to; }
};

struct FilterStats {
    std::size_t total_questions = 0;
    std::size_t kept_questions = 0;
    std::size_t dropped_questions = 0;
    std::size_t total_answers = 0;
    std::size_t kept_answers = 0;
};

class PostFilter {
public:
    PostFilter(std::string tag, DateWindow window);

    void add(RawPost post);
    PostStore finish();
    const FilterStats& stats() const { return stats_; }

private:
    std::string tag_;
    DateWindow window_;
    PostStore store_;
    std::vector<RawPost> pending_answers_;
    FilterStats stats_;
};

PostStore filter_posts(const std::vector<RawPost>& posts, const std::string& tag,
                       DateWindow window, FilterStats* stats = nullptr);

void sort_answers(std::vector<RawPost>& answers, std::optional<PostId> accepted_id);

// --- NDJSON store -------------------------------------------------------

std::string post_to_json_line(const RawPost& post);
RawPost post_from_json_line(std::string_view line, std::size_t line_number);

void write_store(const PostStore& store, std::ostream& out);
PostStore read_store(std::istream& in);
void save_store(const PostStore& store, const std::filesystem::path& path);
PostStore load_store(const std::filesystem::path& path);

}  // namespace stackdigest
