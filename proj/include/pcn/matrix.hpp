#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace pcn {

// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const {
        return {data_.data() + r * cols_, cols_};
    }

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }

    void fill(double v);
    Matrix transposed() const;

    // Value equality (IEEE ==); use bit_equal for reproducibility checks.
    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

std::string shape_of(const Matrix& m);
bool same_shape(const Matrix& a, const Matrix& b);
bool bit_equal(const Matrix& a, const Matrix& b);
bool all_finite(const Matrix& m);
double squared_norm(const Matrix& m);
double max_abs(const Matrix& m);

// Throws DimensionError naming both shapes unless they match.
void require_same_shape(const Matrix& a, const Matrix& b, const char* what);

// a · bᵀ   (m×k, n×k → m×n)
Matrix matmul_abt(const Matrix& a, const Matrix& b);
// a · b    (m×k, k×n → m×n)
Matrix matmul_ab(const Matrix& a, const Matrix& b);
// aᵀ · b   (k×m, k×n → m×n)
Matrix matmul_atb(const Matrix& a, const Matrix& b);

Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
Matrix hadamard(const Matrix& a, const Matrix& b);
// y += alpha * x
void axpy(Matrix& y, double alpha, const Matrix& x);

}  // namespace pcn
