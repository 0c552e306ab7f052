// Porter's 1980 suffix-stripping algorithm, original rule set (no later
// extensions such as "logi" -> "log").

#include "stackdigest/preprocess.hpp"

#include <utility>

namespace stackdigest {

namespace {

class PorterWord {
public:
    explicit PorterWord(std::string_view word) : w_(word) {}

    std::string take() && { return std::move(w_); }

    void step1a() {
        if (ends("sses")) replace_suffix(4, "ss");
        else if (ends("ies")) replace_suffix(3, "i");
        else if (ends("ss")) return;
        else if (ends("s")) replace_suffix(1, "");
    }

    void step1b() {
        if (ends("eed")) {
            if (measure(w_.size() - 3) > 0) replace_suffix(3, "ee");
            return;
        }
        bool stripped = false;
        if (ends("ed") && has_vowel(w_.size() - 2)) {
            w_.resize(w_.size() - 2);
            stripped = true;
        } else if (ends("ing") && has_vowel(w_.size() - 3)) {
            w_.resize(w_.size() - 3);
            stripped = true;
        }
        if (!stripped) return;
        if (ends("at") || ends("bl") || ends("iz")) {
            w_.push_back('e');
        } else if (double_consonant(w_.size())) {
            const char last = w_.back();
            if (last != 'l' && last != 's' && last != 'z') w_.pop_back();
        } else if (measure(w_.size()) == 1 && cvc(w_.size())) {
            w_.push_back('e');
        }
    }

    void step1c() {
        if (ends("y") && has_vowel(w_.size() - 1)) w_.back() = 'i';
    }

    void step2() {
        static constexpr std::pair<std::string_view, std::string_view> kRules[] = {
            {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},   {"anci", "ance"},
            {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},     {"entli", "ent"},
            {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
            {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
            {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},   {"biliti", "ble"},
        };
        apply_longest(kRules, 0);
    }

    void step3() {
        static constexpr std::pair<std::string_view, std::string_view> kRules[] = {
            {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
            {"ical", "ic"},  {"ful", ""},   {"ness", ""},
        };
        apply_longest(kRules, 0);
    }

    void step4() {
        static constexpr std::string_view kSuffixes[] = {
            "al",  "ance", "ence", "er", "ic",  "able", "ible", "ant", "ement", "ment",
            "ent", "ion",  "ou",   "ism", "ate", "iti",  "ous",  "ive", "ize",
        };
        std::string_view best;
        for (auto s : kSuffixes) {
            if (ends(s) && s.size() > best.size()) best = s;
        }
        if (best.empty()) return;
        const std::size_t stem = w_.size() - best.size();
        if (measure(stem) <= 1) return;
        if (best == "ion" && (stem == 0 || (w_[stem - 1] != 's' && w_[stem - 1] != 't'))) return;
        w_.resize(stem);
    }

    void step5() {
        if (ends("e")) {
            const std::size_t stem = w_.size() - 1;
            const std::size_t m = measure(stem);
            if (m > 1 || (m == 1 && !cvc(stem))) w_.pop_back();
        }
        if (measure(w_.size()) > 1 && double_consonant(w_.size()) && w_.back() == 'l') w_.pop_back();
    }

private:
    bool consonant(std::size_t i) const {
        switch (w_[i]) {
            case 'a': case 'e': case 'i': case 'o': case 'u':
                return false;
            case 'y':
                return i == 0 || !consonant(i - 1);
            default:
                return true;
        }
    }

    /// m in [C](VC){m}[V] over the prefix w_[0, len).
    std::size_t measure(std::size_t len) const {
        std::size_t m = 0;
        std::size_t i = 0;
        while (i < len && consonant(i)) ++i;
        while (i < len) {
            while (i < len && !consonant(i)) ++i;
            if (i >= len) break;
            while (i < len && consonant(i)) ++i;
            ++m;
        }
        return m;
    }

    bool has_vowel(std::size_t len) const {
        for (std::size_t i = 0; i < len; ++i) {
            if (!consonant(i)) return true;
        }
        return false;
    }

    bool double_consonant(std::size_t len) const {
        return len >= 2 && w_[len - 1] == w_[len - 2] && consonant(len - 1);
    }

    /// *o: prefix ends consonant-vowel-consonant, last not w, x or y.
    bool cvc(std::size_t len) const {
        if (len < 3 || !consonant(len - 1) || consonant(len - 2) || !consonant(len - 3)) return false;
        const char c = w_[len - 1];
        return c != 'w' && c != 'x' && c != 'y';
    }

    bool ends(std::string_view suffix) const {
        return w_.size() >= suffix.size() &&
               std::string_view(w_).substr(w_.size() - suffix.size()) == suffix;
    }

    void replace_suffix(std::size_t len, std::string_view with) {
        w_.resize(w_.size() - len);
        w_ += with;
    }

    template <std::size_t N>
    void apply_longest(const std::pair<std::string_view, std::string_view> (&rules)[N], std::size_t min_m) {
        const std::pair<std::string_view, std::string_view>* best = nullptr;
        for (const auto& rule : rules) {
            if (ends(rule.first) && (best == nullptr || rule.first.size() > best->first.size())) best = &rule;
        }
        if (best == nullptr) return;
        const std::size_t stem = w_.size() - best->first.size();
        if (measure(stem) > min_m) replace_suffix(best->first.size(), best->second);
    }

    std::string w_;
};

}  // namespace

std::string porter_stem(std::string_view word) {
    if (word.size() <= 2) return std::string(word);
    PorterWord w(word);
    w.step1a();
    w.step1b();
    w.step1c();
    w.step2();
    w.step3();
    w.step4();
    w.step5();
    return std::move(w).take();
}

}  // namespace stackdigest
