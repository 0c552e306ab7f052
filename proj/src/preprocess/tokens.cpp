#include "stackdigest/preprocess.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace stackdigest {

const StopWords& StopWords::bundled() {
    static const StopWords words = parse(bundled_stopwords_text());
    return words;
}

StopWords StopWords::parse(std::string_view content) {
    std::unordered_set<std::string> words;
    std::size_t pos = 0;
    while (pos <= content.size()) {
        std::size_t end = content.find('\n', pos);
        if (end == std::string_view::npos) end = content.size();
        std::string_view line = content.substr(pos, end - pos);
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\r' || line.back() == '\t')) {
            line.remove_suffix(1);
        }
        while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
        if (!line.empty()) words.emplace(line);
        pos = end + 1;
    }
    return StopWords(std::move(words));
}

StopWords StopWords::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read stop-word list " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::vector<std::string> split_alpha_tokens(std::string_view text, std::size_t min_length) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty() && current.size() >= min_length) tokens.push_back(current);
        current.clear();
    };
    for (char c : text) {
        if (c >= 'a' && c <= 'z') {
            current.push_back(c);
        } else if (c >= 'A' && c <= 'Z') {
            current.push_back(static_cast<char>(c - 'A' + 'a'));
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

std::vector<std::string> normalize_tokens(std::string_view text, const StopWords& stop_words) {
    std::vector<std::string> out;
    for (auto& token : split_alpha_tokens(text)) {
        if (stop_words.contains(token)) continue;
        std::string stem = porter_stem(token);
        // A stem can collapse onto a stop word ("cans" -> "can").
        if (stem.size() < 2 || stop_words.contains(stem)) continue;
        out.push_back(std::move(stem));
    }
    return out;
}

CleanDocument preprocess_post(const RawPost& post, const StopWords& stop_words) {
    CleanDocument doc;
    doc.post_id = post.id;
    doc.role = post.post_type;
    const std::string body = html_to_text(strip_code_blocks(post.body_html));

    // Titles are plain text; only whitespace is normalized so it stays one sentence.
    std::string title;
    if (post.title) {
        for (char c : *post.title) {
            const bool space = c == ' ' || c == '\t' || c == '\n' || c == '\r';
            if (!space) title.push_back(c);
            else if (!title.empty() && title.back() != ' ') title.push_back(' ');
        }
        while (!title.empty() && title.back() == ' ') title.pop_back();
    }

    if (!title.empty()) {
        doc.sentences.push_back(title);
        doc.clean_text = title;
    }
    if (!body.empty()) {
        if (!doc.clean_text.empty()) doc.clean_text += '\n';
        doc.clean_text += body;
        for (auto& s : segment_sentences(body)) doc.sentences.push_back(std::move(s));
    }
    doc.tokens = normalize_tokens(doc.clean_text, stop_words);
    return doc;
}

}  // namespace stackdigest
