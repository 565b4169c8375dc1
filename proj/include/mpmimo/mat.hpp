#pragma once

#include <cassert>
#include <cmath>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "mpmimo/errors.hpp"

namespace mpmimo {

using cd = std::complex<double>;

// Dense row-major complex matrix. Plain value type: deep copies, no views.
// Sized constructors zero-fill; the data constructor rejects non-finite
// entries so garbage can't silently propagate through a long pipeline.
class CMat {
public:
    CMat() = default;

    CMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    CMat(std::size_t rows, std::size_t cols, std::vector<cd> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_)
            throw DimensionMismatch("matrix data length does not match rows*cols");
        for (const cd& z : data_)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                throw NumericalFailure("non-finite matrix entry");
    }

    static CMat identity(std::size_t n) {
        CMat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = cd(1.0, 0.0);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }
    bool square() const { return rows_ == cols_; }

    cd& operator()(std::size_t i, std::size_t j) {
        assert(i < rows_ && j < cols_);
        return data_[i * cols_ + j];
    }
    const cd& operator()(std::size_t i, std::size_t j) const {
        assert(i < rows_ && j < cols_);
        return data_[i * cols_ + j];
    }

    cd* data() { return data_.data(); }
    const cd* data() const { return data_.data(); }

    bool same_shape(const CMat& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

    CMat& operator+=(const CMat& o) {
        if (!same_shape(o)) throw DimensionMismatch("matrix addition shape mismatch");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    CMat& operator-=(const CMat& o) {
        if (!same_shape(o)) throw DimensionMismatch("matrix subtraction shape mismatch");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    CMat& operator*=(cd alpha) {
        for (cd& z : data_) z *= alpha;
        return *this;
    }

    friend CMat operator+(CMat a, const CMat& b) { return a += b; }
    friend CMat operator-(CMat a, const CMat& b) { return a -= b; }
    friend CMat operator*(CMat a, cd alpha) { return a *= alpha; }
    friend CMat operator*(cd alpha, CMat a) { return a *= alpha; }
    friend CMat operator*(CMat a, double alpha) { return a *= cd(alpha, 0.0); }
    friend CMat operator*(double alpha, CMat a) { return a *= cd(alpha, 0.0); }
    friend CMat operator-(CMat a) { return a *= cd(-1.0, 0.0); }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cd> data_;
};

}  // namespace mpmimo
