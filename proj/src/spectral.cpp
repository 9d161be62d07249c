#include "rwlra/spectral.hpp"

#include <Eigen/SVD>

namespace rwlra {

Vector singular_values(const DenseMatrix& M) {
    Eigen::BDCSVD<DenseMatrix> svd(M);
    return svd.singularValues();
}

double singular_value_floor(Index rows, Index cols, double sigma_max) {
    return static_cast<double>(std::max(rows, cols)) * sigma_max * 1e-12;
}

int numerical_rank(const Vector& sv, Index rows, Index cols) {
    if (sv.size() == 0) return 0;
    const double floor = singular_value_floor(rows, cols, sv(0));
    int rank = 0;
    for (Index i = 0; i < sv.size(); ++i)
        if (sv(i) > floor) ++rank;
    return rank;
}

int numerical_rank(const DenseMatrix& M) {
    return numerical_rank(singular_values(M), M.rows(), M.cols());
}

double statistical_dimension(const Vector& sv, Index rows, Index cols,
                             double lambda) {
    if (lambda < 0)
        throw std::invalid_argument("statistical_dimension: lambda < 0");
    if (sv.size() == 0 || sv(0) == 0.0) return 0.0;
    const double floor = singular_value_floor(rows, cols, sv(0));
    double sd = 0.0;
    for (Index i = 0; i < sv.size(); ++i) {
        const double s = sv(i);
        if (s <= floor) continue;
        sd += 1.0 / (1.0 + lambda / (s * s));
    }
    return sd;
}

double statistical_dimension(const DenseMatrix& M, double lambda) {
    return statistical_dimension(singular_values(M), M.rows(), M.cols(),
                                 lambda);
}

double stable_rank(const DenseMatrix& M) {
    const double fro2 = M.squaredNorm();
    if (fro2 == 0.0)
        throw std::invalid_argument("stable_rank: zero matrix");
    const double top = singular_values(M)(0);
    return fro2 / (top * top);
}

double spectral_norm(const DenseMatrix& M) {
    if (M.size() == 0) return 0.0;
    return singular_values(M)(0);
}

DenseMatrix orthonormal_range(const DenseMatrix& M) {
    Eigen::BDCSVD<DenseMatrix> svd(M, Eigen::ComputeThinU);
    const Vector& sv = svd.singularValues();
    const int rank = numerical_rank(sv, M.rows(), M.cols());
    return svd.matrixU().leftCols(rank);
}

} // namespace rwlra
