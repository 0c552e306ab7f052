#include "stackdigest/ingest.hpp"

#include <expat.h>

#include <charconv>
#include <cstring>
#include <deque>

namespace stackdigest {

namespace {

template <typename Int>
bool parse_integer(const char* text, Int& out) {
    const char* end = text + std::strlen(text);
    auto res = std::from_chars(text, end, out);
    return res.ec == std::errc{} && res.ptr == end && res.ptr != text;
}

}  // namespace

TagParseResult parse_tags_checked(std::string_view raw) {
    TagParseResult result;
    std::string current;
    bool open = false;
    for (char c : raw) {
        if (c == '<') {
            if (open) {
                result.balanced = false;
                if (!current.empty()) result.tags.push_back(std::move(current));
                current.clear();
            }
            open = true;
        } else if (c == '>') {
            if (!open) {
                result.balanced = false;
                continue;
            }
            if (!current.empty()) result.tags.push_back(std::move(current));
            current.clear();
            open = false;
        } else if (open) {
            current.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
        } else {
            // text outside brackets
            result.balanced = false;
        }
    }
    if (open) {
        result.balanced = false;
        if (!current.empty()) result.tags.push_back(std::move(current));
    }
    return result;
}

std::vector<std::string> parse_tags(std::string_view raw, bool strict) {
    auto result = parse_tags_checked(raw);
    if (strict && !result.balanced) {
        throw ParseError("unbalanced tag list \"" + std::string(raw) + "\"", 0);
    }
    return std::move(result.tags);
}

struct DumpReader::Impl {
    std::istream& in;
    ParseOptions options;
    XML_Parser parser = nullptr;
    std::deque<RawPost> ready;
    ParseStats stats;
    int depth = 0;
    bool finished = false;
    bool saw_root = false;
    std::uint64_t bytes_fed = 0;
    std::optional<ParseError> pending_error;
    std::vector<char> buffer;

    Impl(std::istream& stream, ParseOptions opts) : in(stream), options(opts) {
        parser = XML_ParserCreate("UTF-8");
        if (parser == nullptr) throw std::bad_alloc();
        XML_SetUserData(parser, this);
        XML_SetElementHandler(parser, &Impl::on_start, &Impl::on_end);
        buffer.resize(options.chunk_size == 0 ? 4096 : options.chunk_size);
    }

    ~Impl() { XML_ParserFree(parser); }

    static void on_start(void* user, const XML_Char* name, const XML_Char** attrs) {
        auto* self = static_cast<Impl*>(user);
        ++self->depth;
        if (self->depth == 1) {
            self->saw_root = true;
            return;
        }
        if (self->depth == 2 && std::strcmp(name, "row") == 0) self->handle_row(attrs);
    }

    static void on_end(void* user, const XML_Char*) { --static_cast<Impl*>(user)->depth; }

    void malformed(const std::string& why) {
        ++stats.skipped_malformed;
        if (options.strict && !pending_error) {
            pending_error.emplace("malformed row: " + why,
                                  static_cast<std::uint64_t>(XML_GetCurrentByteIndex(parser)));
            XML_StopParser(parser, XML_FALSE);
        }
    }

    void handle_row(const XML_Char** attrs) {
        ++stats.rows;
        const char* id = nullptr;
        const char* type = nullptr;
        const char* parent = nullptr;
        const char* accepted = nullptr;
        const char* score = nullptr;
        const char* date = nullptr;
        const char* tags = nullptr;
        const char* title = nullptr;
        const char* body = nullptr;
        for (std::size_t i = 0; attrs[i] != nullptr; i += 2) {
            const char* key = attrs[i];
            const char* value = attrs[i + 1];
            if (std::strcmp(key, "Id") == 0) id = value;
            else if (std::strcmp(key, "PostTypeId") == 0) type = value;
            else if (std::strcmp(key, "ParentId") == 0) parent = value;
            else if (std::strcmp(key, "AcceptedAnswerId") == 0) accepted = value;
            else if (std::strcmp(key, "Score") == 0) score = value;
            else if (std::strcmp(key, "CreationDate") == 0) date = value;
            else if (std::strcmp(key, "Tags") == 0) tags = value;
            else if (std::strcmp(key, "Title") == 0) title = value;
            else if (std::strcmp(key, "Body") == 0) body = value;
        }

        if (id == nullptr || type == nullptr) {
            malformed("missing Id or PostTypeId");
            return;
        }
        int type_id = 0;
        RawPost post;
        if (!parse_integer(type, type_id) || !parse_integer(id, post.id) || post.id <= 0) {
            malformed("non-numeric Id or PostTypeId");
            return;
        }
        if (type_id != 1 && type_id != 2) {
            ++stats.skipped_other_type;
            return;
        }
        post.post_type = type_id == 1 ? PostType::Question : PostType::Answer;

        if (score != nullptr && !parse_integer(score, post.score)) {
            malformed("bad Score on row " + std::string(id));
            return;
        }
        if (date == nullptr) {
            malformed("missing CreationDate on row " + std::string(id));
            return;
        }
        auto ts = parse_timestamp(date);
        if (!ts) {
            malformed("bad CreationDate on row " + std::string(id));
            return;
        }
        post.creation_date = *ts;
        if (body != nullptr) post.body_html = body;

        if (post.post_type == PostType::Answer) {
            PostId parent_id = 0;
            if (parent == nullptr || !parse_integer(parent, parent_id) || parent_id <= 0) {
                malformed("answer without ParentId on row " + std::string(id));
                return;
            }
            post.parent_id = parent_id;
        } else {
            if (accepted != nullptr) {
                PostId accepted_id = 0;
                if (!parse_integer(accepted, accepted_id) || accepted_id <= 0) {
                    malformed("bad AcceptedAnswerId on row " + std::string(id));
                    return;
                }
                post.accepted_answer_id = accepted_id;
            }
            if (tags != nullptr) {
                auto parsed = parse_tags_checked(tags);
                if (!parsed.balanced) {
                    ++stats.tag_warnings;
                    if (options.strict) {
                        malformed("unbalanced Tags on row " + std::string(id));
                        return;
                    }
                }
                post.tags = std::move(parsed.tags);
            }
            if (title != nullptr) post.title = std::string(title);
        }
        ++stats.emitted;
        ready.push_back(std::move(post));
    }

    void throw_xml_error() {
        const auto offset = static_cast<std::uint64_t>(XML_GetCurrentByteIndex(parser));
        throw ParseError(std::string("malformed XML: ") + XML_ErrorString(XML_GetErrorCode(parser)),
                         offset);
    }

    void feed_more() {
        in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
        const auto got = static_cast<int>(in.gcount());
        const bool last = got == 0 || in.eof();
        if (in.bad()) throw ParseError("read failure", bytes_fed);
        bytes_fed += static_cast<std::uint64_t>(got);
        const auto status = XML_Parse(parser, buffer.data(), got, last ? XML_TRUE : XML_FALSE);
        if (pending_error) throw *pending_error;
        if (status == XML_STATUS_ERROR) throw_xml_error();
        if (last) {
            finished = true;
            if (!saw_root) throw ParseError("malformed XML: no root element", bytes_fed);
        }
    }
};

DumpReader::DumpReader(std::istream& in, ParseOptions options)
    : impl_(std::make_unique<Impl>(in, options)) {}

DumpReader::~DumpReader() = default;

std::optional<RawPost> DumpReader::next() {
    while (impl_->ready.empty() && !impl_->finished) impl_->feed_more();
    if (impl_->ready.empty()) return std::nullopt;
    RawPost post = std::move(impl_->ready.front());
    impl_->ready.pop_front();
    return post;
}

const ParseStats& DumpReader::stats() const { return impl_->stats; }

std::vector<RawPost> parse_dump(std::istream& in, ParseOptions options, ParseStats* stats) {
    DumpReader reader(in, options);
    std::vector<RawPost> posts;
    while (auto post = reader.next()) posts.push_back(std::move(*post));
    if (stats != nullptr) *stats = reader.stats();
    return posts;
}

}  // namespace stackdigest
