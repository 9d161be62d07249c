#include "rwlra/matrix.hpp"

namespace rwlra {

bool all_finite(const DenseMatrix& M) { return M.allFinite(); }

void require_finite(const DenseMatrix& M, const std::string& what) {
    if (!M.allFinite())
        throw std::invalid_argument(what + ": matrix contains NaN or Inf");
}

void require_same_shape(const DenseMatrix& A, const DenseMatrix& B,
                        const std::string& what) {
    if (A.rows() != B.rows() || A.cols() != B.cols())
        throw std::invalid_argument(
            what + ": shape mismatch (" + std::to_string(A.rows()) + "x" +
            std::to_string(A.cols()) + " vs " + std::to_string(B.rows()) + "x" +
            std::to_string(B.cols()) + ")");
}

DenseMatrix hadamard(const DenseMatrix& W, const DenseMatrix& M) {
    require_same_shape(W, M, "hadamard");
    return W.cwiseProduct(M);
}

DenseMatrix scale_cols(const DenseMatrix& M, const Vector& w) {
    if (M.cols() != w.size())
        throw std::invalid_argument("scale_cols: weight length " +
                                    std::to_string(w.size()) +
                                    " does not match column count " +
                                    std::to_string(M.cols()));
    return M.array().rowwise() * w.transpose().array();
}

DenseMatrix scale_rows(const Vector& w, const DenseMatrix& M) {
    if (M.rows() != w.size())
        throw std::invalid_argument("scale_rows: weight length " +
                                    std::to_string(w.size()) +
                                    " does not match row count " +
                                    std::to_string(M.rows()));
    return M.array().colwise() * w.array();
}

} // namespace rwlra
