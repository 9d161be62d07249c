#include "rwlra/io.hpp"

#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

namespace rwlra {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& why) {
    throw std::runtime_error("matrix i/o (" + path + "): " + why);
}

} // namespace

void save_csv(const DenseMatrix& M, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(path, "cannot open for writing");
    out.precision(std::numeric_limits<double>::max_digits10);
    out << M.rows() << "," << M.cols() << "\n";
    for (Index i = 0; i < M.rows(); ++i) {
        for (Index j = 0; j < M.cols(); ++j) {
            if (j) out << ",";
            out << M(i, j);
        }
        out << "\n";
    }
    if (!out) fail(path, "write error");
}

DenseMatrix load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(path, "cannot open for reading");
    std::string line;
    if (!std::getline(in, line)) fail(path, "missing header line");
    Index rows = 0, cols = 0;
    {
        std::istringstream header(line);
        char comma = 0;
        if (!(header >> rows >> comma >> cols) || comma != ',' || rows <= 0 ||
            cols <= 0)
            fail(path, "bad header, expected rows,cols");
    }
    DenseMatrix M(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        if (!std::getline(in, line)) fail(path, "truncated: missing rows");
        std::istringstream ls(line);
        std::string cell;
        for (Index j = 0; j < cols; ++j) {
            if (!std::getline(ls, cell, ','))
                fail(path, "row " + std::to_string(i) + " has too few values");
            try {
                M(i, j) = std::stod(cell);
            } catch (const std::exception&) {
                fail(path, "unparsable value '" + cell + "'");
            }
        }
    }
    require_finite(M, "load_csv(" + path + ")");
    return M;
}

void save_binary(const DenseMatrix& M, const std::string& path) {
    static_assert(sizeof(double) == 8);
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path, "cannot open for writing");
    const std::uint64_t dims[2] = {static_cast<std::uint64_t>(M.rows()),
                                   static_cast<std::uint64_t>(M.cols())};
    out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
    // Row-major storage writes out directly in the on-disk order.
    out.write(reinterpret_cast<const char*>(M.data()),
              static_cast<std::streamsize>(sizeof(double) * M.size()));
    if (!out) fail(path, "write error");
}

DenseMatrix load_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open for reading");
    std::uint64_t dims[2] = {0, 0};
    in.read(reinterpret_cast<char*>(dims), sizeof(dims));
    if (!in) fail(path, "truncated header");
    if (dims[0] == 0 || dims[1] == 0) fail(path, "zero dimension in header");
    if (dims[0] > (1u << 30) || dims[1] > (1u << 30))
        fail(path, "implausible dimensions");
    DenseMatrix M(static_cast<Index>(dims[0]), static_cast<Index>(dims[1]));
    in.read(reinterpret_cast<char*>(M.data()),
            static_cast<std::streamsize>(sizeof(double) * M.size()));
    if (!in) fail(path, "truncated payload");
    require_finite(M, "load_binary(" + path + ")");
    return M;
}

} // namespace rwlra
