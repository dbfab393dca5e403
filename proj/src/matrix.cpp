#include "pcn/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "pcn/errors.hpp"
#include "pcn/parallel.hpp"

namespace pcn {

namespace {

// Rows per worker below which threading costs more than it saves.
std::size_t row_grain(std::size_t work_per_row) {
    constexpr std::size_t kMinWork = 1 << 15;
    return std::max<std::size_t>(1, kMinWork / std::max<std::size_t>(1, work_per_row));
}

[[noreturn]] void shape_error(const char* op, const Matrix& a, const Matrix& b) {
    throw DimensionError(std::string(op) + ": incompatible shapes " + shape_of(a) +
                         " and " + shape_of(b));
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows * cols) {
        throw DimensionError("Matrix: " + std::to_string(data_.size()) +
                             " values cannot fill " + std::to_string(rows) + "x" +
                             std::to_string(cols));
    }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw DimensionError("Matrix: ragged initializer");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

void Matrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t.data_[c * rows_ + r] = data_[r * cols_ + c];
    return t;
}

std::string shape_of(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

bool same_shape(const Matrix& a, const Matrix& b) {
    return a.rows() == b.rows() && a.cols() == b.cols();
}

bool bit_equal(const Matrix& a, const Matrix& b) {
    if (!same_shape(a, b)) return false;
    if (a.size() == 0) return true;
    return std::memcmp(a.values().data(), b.values().data(), a.size() * sizeof(double)) == 0;
}

bool all_finite(const Matrix& m) {
    return std::all_of(m.values().begin(), m.values().end(),
                       [](double v) { return std::isfinite(v); });
}

double squared_norm(const Matrix& m) {
    double s = 0.0;
    for (double v : m.values()) s += v * v;
    return s;
}

double max_abs(const Matrix& m) {
    double best = 0.0;
    for (double v : m.values()) best = std::max(best, std::abs(v));
    return best;
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
    if (!same_shape(a, b)) shape_error(what, a, b);
}

// The kernels below accumulate every output entry over the inner index in
// ascending order, one row of the output per task, so results are identical
// for any worker count.

Matrix matmul_abt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) shape_error("matmul_abt", a, b);
    const Matrix bt = b.transposed();
    return matmul_ab(a, bt);
}

Matrix matmul_ab(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) shape_error("matmul_ab", a, b);
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    Matrix c(m, n);
    const double* pa = a.values().data();
    const double* pb = b.values().data();
    double* pc = c.values().data();
    parallel_for(m, row_grain(k * n), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            double* ci = pc + i * n;
            for (std::size_t p = 0; p < k; ++p) {
                const double s = pa[i * k + p];
                const double* bp = pb + p * n;
                for (std::size_t j = 0; j < n; ++j) ci[j] += s * bp[j];
            }
        }
    });
    return c;
}

Matrix matmul_atb(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) shape_error("matmul_atb", a, b);
    const std::size_t k = a.rows(), m = a.cols(), n = b.cols();
    Matrix c(m, n);
    const double* pa = a.values().data();
    const double* pb = b.values().data();
    double* pc = c.values().data();
    parallel_for(m, row_grain(k * n), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            double* ci = pc + i * n;
            for (std::size_t p = 0; p < k; ++p) {
                const double s = pa[p * m + i];
                const double* bp = pb + p * n;
                for (std::size_t j = 0; j < n; ++j) ci[j] += s * bp[j];
            }
        }
    });
    return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "subtract");
    Matrix c = a;
    auto cv = c.values();
    auto bv = b.values();
    for (std::size_t i = 0; i < cv.size(); ++i) cv[i] -= bv[i];
    return c;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "add");
    Matrix c = a;
    auto cv = c.values();
    auto bv = b.values();
    for (std::size_t i = 0; i < cv.size(); ++i) cv[i] += bv[i];
    return c;
}

Matrix operator*(double s, const Matrix& a) {
    Matrix c = a;
    for (double& v : c.values()) v *= s;
    return c;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "hadamard");
    Matrix c = a;
    auto cv = c.values();
    auto bv = b.values();
    for (std::size_t i = 0; i < cv.size(); ++i) cv[i] *= bv[i];
    return c;
}

void axpy(Matrix& y, double alpha, const Matrix& x) {
    require_same_shape(y, x, "axpy");
    auto yv = y.values();
    auto xv = x.values();
    for (std::size_t i = 0; i < yv.size(); ++i) yv[i] += alpha * xv[i];
}

}  // namespace pcn
