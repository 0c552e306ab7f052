#include <algorithm>
#include <cmath>

#include "stackdigest/embed.hpp"

namespace stackdigest {

bool EmbeddingVector::is_zero() const {
    for (float v : values) {
        if (v != 0.0f) return false;
    }
    return true;
}

double EmbeddingVector::norm() const {
    double sum = 0.0;
    for (float v : values) sum += static_cast<double>(v) * v;
    return std::sqrt(sum);
}

EmbeddingMatrix to_matrix(std::span<const EmbeddingVector> vectors) {
    const std::size_t dim = vectors.empty() ? 0 : vectors.front().dim();
    EmbeddingMatrix m(static_cast<Eigen::Index>(vectors.size()), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (vectors[i].dim() != dim) throw DimensionMismatch("embedding rows have differing dimensions");
        for (std::size_t d = 0; d < dim; ++d) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = vectors[i].values[d];
        }
    }
    return m;
}

EmbeddingVector from_row(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
    std::vector<float> values(static_cast<std::size_t>(row.size()));
    for (Eigen::Index i = 0; i < row.size(); ++i) values[static_cast<std::size_t>(i)] = static_cast<float>(row(i));
    return EmbeddingVector(std::move(values));
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dim() != b.dim()) {
        throw DimensionMismatch("cosine of vectors with dims " + std::to_string(a.dim()) + " and " +
                                std::to_string(b.dim()));
    }
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        const double x = a.values[i];
        const double y = b.values[i];
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    const double c = dot / (std::sqrt(na) * std::sqrt(nb));
    return std::clamp(c, -1.0, 1.0);
}

}  // namespace stackdigest
