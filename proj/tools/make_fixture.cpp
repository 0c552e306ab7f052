// Writes the planted-topic fixture dump: 300 android questions, 100 per topic,
// built from three fixed vocabularies plus shared filler, each with 1-3
// answers. Output is deterministic for a given seed.
//
//   make_fixture [--seed N] > planted_300.xml

#include <CLI11.hpp>

#include <array>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace {

struct TopicSpec {
    std::string_view tag;
    std::array<std::string_view, 10> vocabulary;
};

constexpr std::array<TopicSpec, 3> kTopics{{
    {"gradle", {"project", "proguard", "studio", "error", "build", "library", "file", "gradle", "android", "eclipse"}},
    {"android-fragments",
     {"fragment", "recyclerview", "item", "view", "listview", "scroll", "adapter", "list", "layout", "row"}},
    {"android-notifications",
     {"notification", "activity", "service", "gcm", "app", "analytics", "push", "back", "intent", "broadcast"}},
}};

constexpr std::array<std::string_view, 8> kFillerVerbs{"update", "configure", "restart", "clean",
                                                       "change", "check",     "install", "remove"};

constexpr std::array<std::string_view, 8> kQuestionTemplates{
    "I get a strange {A} when I {F} the {B}.",
    "The {A} does not work with the {B} after the latest update.",
    "How do I fix the {A} in my {B} {C}?",
    "My {A} keeps failing because of the {B}.",
    "Is there a way to combine {A} with {B} and {C}?",
    "The {B} shows nothing when the {A} starts.",
    "I tried to {F} the {A} but the {C} is still broken.",
    "Any idea why the {A} and the {B} behave like this?",
};

constexpr std::array<std::string_view, 6> kAnswerTemplates{
    "You should {F} the {A} before the {B} runs.",
    "Make sure the {A} is declared next to the {B}.",
    "This happens because the {A} relies on an old {B}.",
    "Try to {F} the {C} and then rebuild the {A}.",
    "Attach the {A} to the {B} instead of the {C}.",
    "Moving the {A} into the {B} solved it for me.",
};

constexpr std::array<std::string_view, 4> kTitleTemplates{
    "{A} fails with {B}",
    "How to {F} {A} and {B}",
    "{A} not working after {B} change",
    "Problem with {A} in {B}",
};

class Generator {
public:
    explicit Generator(std::uint64_t seed) : rng_(seed) {}

    std::size_t pick(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }

    std::string fill(std::string_view tmpl, const TopicSpec& topic) {
        // Three distinct vocabulary words per sentence.
        std::array<std::size_t, 3> idx{};
        idx[0] = pick(10);
        do idx[1] = pick(10); while (idx[1] == idx[0]);
        do idx[2] = pick(10); while (idx[2] == idx[0] || idx[2] == idx[1]);
        std::string out;
        for (std::size_t i = 0; i < tmpl.size(); ++i) {
            if (tmpl[i] == '{' && i + 2 < tmpl.size() && tmpl[i + 2] == '}') {
                const char slot = tmpl[i + 1];
                if (slot == 'F') out += kFillerVerbs[pick(kFillerVerbs.size())];
                else out += topic.vocabulary[idx[static_cast<std::size_t>(slot - 'A')]];
                i += 2;
            } else {
                out.push_back(tmpl[i]);
            }
        }
        return out;
    }

    template <std::size_t N>
    std::string paragraph(const std::array<std::string_view, N>& templates, const TopicSpec& topic, std::size_t count) {
        std::string html = "<p>";
        for (std::size_t s = 0; s < count; ++s) {
            if (s > 0) html += ' ';
            html += fill(templates[pick(N)], topic);
        }
        if (pick(3) == 0) html += " Here is the snippet: <code>foo.bar(" + std::to_string(pick(100)) + ")</code>";
        html += "</p>";
        if (pick(4) == 0) html += "<pre><code>int x = " + std::to_string(pick(1000)) + ";\nlog(x);</code></pre>";
        return html;
    }

private:
    std::mt19937_64 rng_;
};

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\n': out += "&#xA;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string date_for(std::size_t n) {
    // Spread across 2010-2021, all inside the default window.
    const int year = 2010 + static_cast<int>(n % 12);
    const int month = 1 + static_cast<int>((n / 12) % 12);
    const int day = 1 + static_cast<int>((n * 7) % 28);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.000", year, month, day,
                  static_cast<int>(n % 24), static_cast<int>((n * 13) % 60), static_cast<int>((n * 29) % 60));
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Write the planted-topic fixture dump to stdout"};
    std::uint64_t seed = 20090101;
    app.add_option("--seed", seed, "generator seed")->capture_default_str();
    CLI11_PARSE(app, argc, argv);
    Generator gen(seed);

    std::cout << "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n<posts>\n";
    long next_id = 1;
    for (std::size_t q = 0; q < 300; ++q) {
        const TopicSpec& topic = kTopics[q % kTopics.size()];
        const long qid = next_id++;
        const std::size_t answers = 1 + gen.pick(3);
        const std::string title = gen.fill(kTitleTemplates[gen.pick(kTitleTemplates.size())], topic);
        const std::string body = gen.paragraph(kQuestionTemplates, topic, 3 + gen.pick(3));

        std::vector<long> answer_ids;
        for (std::size_t a = 0; a < answers; ++a) answer_ids.push_back(qid + 1 + static_cast<long>(a));
        const bool has_accepted = gen.pick(2) == 0;
        const long accepted = has_accepted ? answer_ids[gen.pick(answer_ids.size())] : 0;

        std::cout << "  <row Id=\"" << qid << "\" PostTypeId=\"1\"";
        if (has_accepted) std::cout << " AcceptedAnswerId=\"" << accepted << "\"";
        std::cout << " CreationDate=\"" << date_for(q) << "\" Score=\"" << gen.pick(20)
                  << "\" Body=\"" << xml_escape(body) << "\" Title=\"" << xml_escape(title) << "\" Tags=\""
                  << xml_escape("<android><" + std::string(topic.tag) + ">") << "\" AnswerCount=\"" << answers
                  << "\" />\n";

        for (long aid : answer_ids) {
            const std::string answer_body = gen.paragraph(kAnswerTemplates, topic, 2 + gen.pick(3));
            const long score = static_cast<long>(gen.pick(7)) - 1;
            std::cout << "  <row Id=\"" << aid << "\" PostTypeId=\"2\" ParentId=\"" << qid << "\" CreationDate=\""
                      << date_for(q + 1) << "\" Score=\"" << score << "\" Body=\"" << xml_escape(answer_body)
                      << "\" />\n";
        }
        next_id += static_cast<long>(answers);
    }
    std::cout << "</posts>\n";
    return 0;
}
