#include "stackdigest/preprocess.hpp"

#include <array>
#include <cctype>

namespace stackdigest {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

std::size_t count_tokens(std::string_view s) {
    std::size_t n = 0;
    bool in_token = false;
    for (char c : s) {
        if (is_space(c)) {
            in_token = false;
        } else if (!in_token) {
            in_token = true;
            ++n;
        }
    }
    return n;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

/// "e.g.", "i.e." and "vs." ending at `end` (inclusive) do not terminate a sentence.
bool is_abbreviation(std::string_view text, std::size_t end) {
    static constexpr std::array<std::string_view, 3> kAbbrev{"e.g.", "i.e.", "vs."};
    for (auto abbr : kAbbrev) {
        if (end + 1 < abbr.size()) continue;
        const std::size_t start = end + 1 - abbr.size();
        bool match = true;
        for (std::size_t k = 0; k < abbr.size(); ++k) {
            if (std::tolower(static_cast<unsigned char>(text[start + k])) != abbr[k]) {
                match = false;
                break;
            }
        }
        if (match && (start == 0 || !std::isalpha(static_cast<unsigned char>(text[start - 1])))) return true;
    }
    return false;
}

std::vector<std::string_view> split_pieces(std::string_view text) {
    std::vector<std::string_view> pieces;
    std::size_t start = 0;
    auto emit = [&](std::size_t end) {
        auto piece = trim(text.substr(start, end - start));
        if (!piece.empty()) pieces.push_back(piece);
        start = end;
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '\n') {
            emit(i);
            continue;
        }
        if (c != '.' && c != '!' && c != '?') continue;
        if (i + 1 >= text.size() || !is_space(text[i + 1])) continue;
        if (c == '.' && is_abbreviation(text, i)) continue;
        emit(i + 1);
    }
    emit(text.size());
    return pieces;
}

}  // namespace

std::vector<std::string> segment_sentences(std::string_view text) {
    std::vector<std::string> sentences;
    std::string pending;
    for (auto piece : split_pieces(text)) {
        std::string candidate = pending.empty() ? std::string(piece) : pending + " " + std::string(piece);
        if (count_tokens(candidate) < kMinSentenceTokens) {
            pending = std::move(candidate);
            continue;
        }
        sentences.push_back(std::move(candidate));
        pending.clear();
    }
    if (!pending.empty()) {
        if (sentences.empty()) {
            sentences.push_back(std::move(pending));
        } else {
            sentences.back() += " " + pending;
        }
    }
    return sentences;
}

}  // namespace stackdigest
