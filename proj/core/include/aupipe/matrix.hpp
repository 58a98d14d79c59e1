#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "aupipe/error.hpp"

namespace aupipe {

// Dense row-major double matrix. Desk-scale sizes only; all heavy loops live
// in the call sites so they can fuse masking and weighting as needed.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
    std::size_t size() const { return data.size(); }
};

// Element validity mask paired with a Matrix of the same shape.
struct BoolMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint8_t> data;

    BoolMatrix() = default;
    BoolMatrix(std::size_t r, std::size_t c, bool fill = true)
        : rows(r), cols(c), data(r * c, fill ? 1 : 0) {}

    std::uint8_t& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    bool operator()(std::size_t r, std::size_t c) const { return data[r * cols + c] != 0; }

    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
};

inline void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
    if (!a.same_shape(b))
        throw ShapeError(std::string(what) + ": shape mismatch (" + std::to_string(a.rows) + "x" +
                         std::to_string(a.cols) + " vs " + std::to_string(b.rows) + "x" +
                         std::to_string(b.cols) + ")");
}

inline void require_same_shape(const Matrix& a, const BoolMatrix& m, const char* what) {
    if (!m.same_shape(a))
        throw ShapeError(std::string(what) + ": mask shape mismatch (" + std::to_string(a.rows) +
                         "x" + std::to_string(a.cols) + " vs " + std::to_string(m.rows) + "x" +
                         std::to_string(m.cols) + ")");
}

}  // namespace aupipe
