#pragma once

// Brute-force reference implementations used to cross-check the library.
// They follow the defining formulas directly and share no code with it.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

/// W(t,c) = tf(t,c) * log(1 + A / f(t)) for every (class, term) with tf > 0,
/// after dropping terms seen in fewer than two non-noise documents. A is the
/// mean token count per class, counted before the drop.
inline std::map<std::pair<int, std::string>, double> ctfidf(const std::vector<std::vector<std::string>>& docs,
                                                          const std::vector<int>& labels) {
    std::set<int> classes;
    double total_tokens = 0.0;
    std::map<std::string, int> doc_freq;
    for (std::size_t d = 0; d < docs.size(); ++d) {
        if (labels[d] < 0) continue;
        classes.insert(labels[d]);
        total_tokens += static_cast<double>(docs[d].size());
        std::set<std::string> seen(docs[d].begin(), docs[d].end());
        for (const auto& t : seen) ++doc_freq[t];
    }
    const double A = total_tokens / static_cast<double>(classes.size());

    std::map<std::pair<int, std::string>, double> tf;
    std::map<std::string, double> f;
    for (std::size_t d = 0; d < docs.size(); ++d) {
        if (labels[d] < 0) continue;
        for (const auto& t : docs[d]) {
            if (doc_freq[t] < 2) continue;
            tf[{labels[d], t}] += 1.0;
            f[t] += 1.0;
        }
    }
    std::map<std::pair<int, std::string>, double> w;
    for (const auto& [key, count] : tf) w[key] = count * std::log(1.0 + A / f[key.second]);
    return w;
}

/// Clusters ordered by size descending, then by first member; renumbered 1..T.
inline std::vector<int> canonical(const std::vector<int>& raw) {
    std::map<int, std::pair<std::size_t, std::size_t>> info;  // label -> (size, first index)
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] < 0) continue;
        auto [it, fresh] = info.try_emplace(raw[i], 0, i);
        ++it->second.first;
    }
    std::vector<std::pair<int, std::pair<std::size_t, std::size_t>>> order(info.begin(), info.end());
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        if (a.second.first != b.second.first) return a.second.first > b.second.first;
        return a.second.second < b.second.second;
    });
    std::map<int, int> rename;
    for (std::size_t k = 0; k < order.size(); ++k) rename[order[k].first] = static_cast<int>(k + 1);
    std::vector<int> out(raw.size(), -1);
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] >= 0) out[i] = rename[raw[i]];
    }
    return out;
}

/// Density clustering from first principles: core points are those with at
/// least min_pts points (self included) within eps; cores within eps of each
/// other are connected (union-find); a border point joins the adjacent
/// component whose smallest core index is lowest; the rest is noise.
inline std::vector<int> dbscan(const std::vector<std::vector<double>>& pts, double eps, std::size_t min_pts) {
    const std::size_t n = pts.size();
    auto dist = [&](std::size_t a, std::size_t b) {
        double s = 0.0;
        for (std::size_t d = 0; d < pts[a].size(); ++d) s += (pts[a][d] - pts[b][d]) * (pts[a][d] - pts[b][d]);
        return std::sqrt(s);
    };
    std::vector<std::vector<bool>> near(n, std::vector<bool>(n));
    std::vector<bool> core(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t count = 0;
        for (std::size_t j = 0; j < n; ++j) {
            near[i][j] = dist(i, j) <= eps;
            count += near[i][j] ? 1 : 0;
        }
        core[i] = count >= min_pts;
    }
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (core[i] && core[j] && near[i][j]) {
                const auto a = find(i), b = find(j);
                parent[std::max(a, b)] = std::min(a, b);  // root = smallest core index
            }
        }
    }
    std::vector<int> raw(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        if (core[i]) {
            raw[i] = static_cast<int>(find(i));
            continue;
        }
        std::size_t best = n;
        for (std::size_t j = 0; j < n; ++j) {
            if (core[j] && near[i][j]) best = std::min(best, find(j));
        }
        if (best < n) raw[i] = static_cast<int>(best);
    }
    return canonical(raw);
}

/// Random 2-D instance: a few Gaussian blobs plus uniform background points.
inline std::vector<std::vector<double>> random_density_instance(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 10.0);
    std::normal_distribution<double> jitter(0.0, 0.4);
    std::vector<std::vector<double>> pts;
    const std::size_t blobs = 1 + rng() % 4;
    for (std::size_t b = 0; b < blobs; ++b) {
        const double cx = unit(rng), cy = unit(rng);
        const std::size_t size = 5 + rng() % 20;
        for (std::size_t i = 0; i < size; ++i) pts.push_back({cx + jitter(rng), cy + jitter(rng)});
    }
    const std::size_t background = rng() % 15;
    for (std::size_t i = 0; i < background; ++i) pts.push_back({unit(rng), unit(rng)});
    std::shuffle(pts.begin(), pts.end(), rng);
    return pts;
}

/// Random labelled corpus: up to five classes, up to fifty terms, some noise.
struct Corpus {
    std::vector<std::vector<std::string>> docs;
    std::vector<int> labels;
};

inline Corpus random_corpus(std::mt19937_64& rng, std::size_t max_classes = 5) {
    Corpus c;
    const std::size_t classes = 1 + rng() % max_classes;
    const std::size_t vocab = 2 + rng() % 49;
    const std::size_t n_docs = classes + rng() % 40;
    for (std::size_t d = 0; d < n_docs; ++d) {
        // Every class gets at least one document; a few documents are noise.
        int label = d < classes ? static_cast<int>(d + 1) : static_cast<int>(1 + rng() % classes);
        if (d >= classes && rng() % 10 == 0) label = -1;
        std::vector<std::string> tokens;
        const std::size_t len = rng() % 12;
        for (std::size_t k = 0; k < len; ++k) tokens.push_back("t" + std::to_string(rng() % vocab));
        c.docs.push_back(std::move(tokens));
        c.labels.push_back(label);
    }
    return c;
}

}  // namespace oracle
