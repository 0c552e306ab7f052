#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "stackdigest/ingest.hpp"

namespace stackdigest {

struct CleanDocument {
    PostId post_id = 0;
    PostType role = PostType::Question;
    std::string clean_text;
    std::vector<std::string> sentences;
    std::vector<std::string> tokens;

    bool operator==(const CleanDocument&) const = default;
};

/// Removes <code>…</code> and <pre>…</pre> elements with their content.
/// Unclosed elements run to end of input. Idempotent.
std::string strip_code_blocks(std::string_view html);

/// Tag removal, entity decoding and whitespace cleanup. Block-level tags
/// become line breaks.
std::string html_to_text(std::string_view html);

/// Decodes &amp; &lt; &gt; &quot; &apos; and numeric references; anything else
/// is left verbatim.
std::string decode_entities(std::string_view text);

/// Pieces with fewer whitespace tokens than this are merged with a neighbour.
inline constexpr std::size_t kMinSentenceTokens = 2;

std::vector<std::string> segment_sentences(std::string_view text);

/// Versioned stop-word list. The bundled list is compiled into the library.
class StopWords {
public:
    StopWords() = default;
    explicit StopWords(std::unordered_set<std::string> words) : words_(std::move(words)) {}

    static const StopWords& bundled();
    /// One lowercase word per line; '#' starts a comment.
    static StopWords parse(std::string_view content);
    static StopWords load(const std::filesystem::path& path);

    bool contains(std::string_view word) const { return words_.count(std::string(word)) != 0; }
    std::size_t size() const { return words_.size(); }

private:
    std::unordered_set<std::string> words_;
};

/// Raw text of the bundled stop-word file.
std::string_view bundled_stopwords_text();

/// Classic Porter (1980) stemmer. Input must be lowercase ASCII letters.
std::string porter_stem(std::string_view word);

/// Lowercased ASCII alphabetic runs of at least `min_length` letters, in
/// order. No stemming, no stop-word removal.
std::vector<std::string> split_alpha_tokens(std::string_view text, std::size_t min_length = 2);

std::vector<std::string> normalize_tokens(std::string_view text,
                                          const StopWords& stop_words = StopWords::bundled());

CleanDocument preprocess_post(const RawPost& post, const StopWords& stop_words = StopWords::bundled());

}  // namespace stackdigest
