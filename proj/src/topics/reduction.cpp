#include <Eigen/Eigenvalues>

#include "stackdigest/topics.hpp"

namespace stackdigest {

EmbeddingMatrix ReductionModel::transform(const EmbeddingMatrix& vectors) const {
    if (vectors.cols() != mean.size()) throw DimensionMismatch("reduction input has the wrong dimension");
    return (vectors.rowwise() - mean) * components.transpose();
}

ReductionModel fit_reduction(const EmbeddingMatrix& vectors, std::size_t target_dim) {
    const auto n = static_cast<std::size_t>(vectors.rows());
    const auto dim = static_cast<std::size_t>(vectors.cols());
    if (target_dim < 2) throw std::invalid_argument("target_dim must be at least 2");
    if (n < target_dim) {
        throw std::invalid_argument("fit_reduction needs at least target_dim vectors (" + std::to_string(n) + " < " +
                                    std::to_string(target_dim) + ")");
    }

    ReductionModel model;
    model.requested_dim = target_dim;
    model.mean = vectors.colwise().mean();
    const EmbeddingMatrix centered = vectors.rowwise() - model.mean;
    const Eigen::MatrixXd covariance =
        (centered.transpose() * centered) / static_cast<double>(std::max<std::size_t>(1, n - 1));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(covariance);
    if (solver.info() != Eigen::Success) throw TopicError("eigendecomposition failed");
    const Eigen::VectorXd& values = solver.eigenvalues();  // ascending
    const Eigen::MatrixXd& vecs = solver.eigenvectors();

    const double largest = dim == 0 ? 0.0 : values(static_cast<Eigen::Index>(dim) - 1);
    std::size_t rank = 0;
    for (std::size_t i = 0; i < dim; ++i) {
        if (values(static_cast<Eigen::Index>(i)) > largest * 1e-10 && values(static_cast<Eigen::Index>(i)) > 0.0) {
            ++rank;
        }
    }
    std::size_t keep = std::min(target_dim, dim);
    if (rank < keep) keep = std::max<std::size_t>(rank, 1);
    model.rank_limited = keep < target_dim;
    model.target_dim = keep;

    model.components.resize(static_cast<Eigen::Index>(keep), static_cast<Eigen::Index>(dim));
    for (std::size_t c = 0; c < keep; ++c) {
        const auto col = static_cast<Eigen::Index>(dim - 1 - c);
        Eigen::VectorXd axis = vecs.col(col).normalized();
        Eigen::Index pivot = 0;
        for (Eigen::Index i = 1; i < axis.size(); ++i) {
            if (std::abs(axis(i)) > std::abs(axis(pivot))) pivot = i;
        }
        if (axis(pivot) < 0.0) axis = -axis;
        model.components.row(static_cast<Eigen::Index>(c)) = axis.transpose();
        model.variances.push_back(std::max(0.0, values(col)));
    }
    return model;
}

}  // namespace stackdigest
