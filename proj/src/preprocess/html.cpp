#include "stackdigest/preprocess.hpp"

#include <array>
#include <cctype>
#include <charconv>

namespace stackdigest {

namespace {

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

/// True when html[pos] starts "<name" or "</name" (closing == true) followed by
/// a tag-name terminator.
bool tag_at(std::string_view html, std::size_t pos, std::string_view name, bool closing) {
    std::size_t i = pos;
    if (i >= html.size() || html[i] != '<') return false;
    ++i;
    if (closing) {
        if (i >= html.size() || html[i] != '/') return false;
        ++i;
    }
    if (i + name.size() > html.size()) return false;
    for (std::size_t k = 0; k < name.size(); ++k) {
        if (lower(html[i + k]) != name[k]) return false;
    }
    i += name.size();
    return i == html.size() || html[i] == '>' || html[i] == '/' || is_space(html[i]);
}

/// Position one past the '>' closing the tag starting at pos, or npos.
std::size_t tag_end(std::string_view html, std::size_t pos) {
    char quote = 0;
    for (std::size_t i = pos + 1; i < html.size(); ++i) {
        const char c = html[i];
        if (quote != 0) {
            if (c == quote) quote = 0;
        } else if (c == '"' || c == '\'') {
            quote = c;
        } else if (c == '>') {
            return i + 1;
        }
    }
    return std::string_view::npos;
}

/// End of the element opened at pos (one past its closing tag), or npos when
/// unclosed.
std::size_t element_end(std::string_view html, std::size_t pos, std::string_view name) {
    const std::size_t open_end = tag_end(html, pos);
    if (open_end == std::string_view::npos) return std::string_view::npos;
    if (open_end >= 2 && html[open_end - 2] == '/') return open_end;  // <code/>
    int depth = 1;
    for (std::size_t i = open_end; i < html.size(); ++i) {
        if (html[i] != '<') continue;
        if (tag_at(html, i, name, false)) {
            ++depth;
        } else if (tag_at(html, i, name, true)) {
            if (--depth == 0) return tag_end(html, i);
        }
    }
    return std::string_view::npos;
}

std::string strip_once(std::string_view html) {
    static constexpr std::array<std::string_view, 2> kNames{"code", "pre"};
    std::string out;
    out.reserve(html.size());
    std::size_t i = 0;
    while (i < html.size()) {
        if (html[i] == '<') {
            bool removed = false;
            for (auto name : kNames) {
                if (tag_at(html, i, name, false)) {
                    const std::size_t end = element_end(html, i, name);
                    i = end == std::string_view::npos ? html.size() : end;
                    removed = true;
                    break;
                }
            }
            if (removed) continue;
        }
        out.push_back(html[i++]);
    }
    return out;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

bool is_block_tag(std::string_view name) {
    static constexpr std::array<std::string_view, 12> kBlock{
        "p", "br", "li", "div", "h1", "h2", "h3", "h4", "h5", "h6", "blockquote", "hr"};
    for (auto b : kBlock) {
        if (b == name) return true;
    }
    return false;
}

}  // namespace

std::string strip_code_blocks(std::string_view html) {
    std::string current(html);
    while (true) {
        std::string next = strip_once(current);
        if (next == current) return next;
        current = std::move(next);
    }
}

std::string decode_entities(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] != '&') {
            out.push_back(text[i++]);
            continue;
        }
        const std::size_t semi = text.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 12) {
            out.push_back(text[i++]);
            continue;
        }
        const std::string_view name = text.substr(i + 1, semi - i - 1);
        bool decoded = true;
        if (name == "amp") out.push_back('&');
        else if (name == "lt") out.push_back('<');
        else if (name == "gt") out.push_back('>');
        else if (name == "quot") out.push_back('"');
        else if (name == "apos") out.push_back('\'');
        else if (name.size() >= 2 && name[0] == '#') {
            const bool hex = name[1] == 'x' || name[1] == 'X';
            const std::string_view digits = name.substr(hex ? 2 : 1);
            std::uint32_t cp = 0;
            auto res = std::from_chars(digits.data(), digits.data() + digits.size(), cp, hex ? 16 : 10);
            if (digits.empty() || res.ec != std::errc{} || res.ptr != digits.data() + digits.size() ||
                cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
                decoded = false;
            } else {
                append_utf8(out, static_cast<char32_t>(cp));
            }
        } else {
            decoded = false;
        }
        if (decoded) {
            i = semi + 1;
        } else {
            out.push_back(text[i++]);
        }
    }
    return out;
}

std::string html_to_text(std::string_view html) {
    std::string raw;
    raw.reserve(html.size());
    std::size_t i = 0;
    while (i < html.size()) {
        const char c = html[i];
        const bool starts_tag =
            c == '<' && i + 1 < html.size() &&
            (std::isalpha(static_cast<unsigned char>(html[i + 1])) || html[i + 1] == '/' ||
             html[i + 1] == '!' || html[i + 1] == '?');
        if (!starts_tag) {
            raw.push_back(c);
            ++i;
            continue;
        }
        if (html.compare(i, 4, "<!--") == 0) {
            const std::size_t close = html.find("-->", i + 4);
            i = close == std::string_view::npos ? html.size() : close + 3;
            continue;
        }
        const std::size_t end = tag_end(html, i);
        if (end == std::string_view::npos) {
            raw.push_back(c);
            ++i;
            continue;
        }
        std::size_t n = i + 1;
        if (n < html.size() && html[n] == '/') ++n;
        std::string name;
        while (n < end && std::isalnum(static_cast<unsigned char>(html[n]))) name.push_back(lower(html[n++]));
        if (is_block_tag(name)) raw.push_back('\n');
        i = end;
    }

    const std::string decoded = decode_entities(raw);

    std::string out;
    std::string line;
    auto flush_line = [&] {
        while (!line.empty() && line.back() == ' ') line.pop_back();
        if (!line.empty()) {
            if (!out.empty()) out.push_back('\n');
            out += line;
        }
        line.clear();
    };
    for (char ch : decoded) {
        if (ch == '\n') {
            flush_line();
        } else if (is_space(ch)) {
            if (!line.empty() && line.back() != ' ') line.push_back(' ');
        } else {
            line.push_back(ch);
        }
    }
    flush_line();
    return out;
}

}  // namespace stackdigest
