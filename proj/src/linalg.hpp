#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace sqd {

using Vec = std::vector<double>;

// Dense row-major matrix. Problem sizes are tiny (X, Y <= ~50).
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);
    static Matrix from_rows(const std::vector<Vec>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    Vec row(std::size_t i) const;
    Vec col(std::size_t j) const;
    const std::vector<double>& data() const { return data_; }

    bool operator==(const Matrix& o) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

double dot(const Vec& a, const Vec& b);
double sum(const Vec& v);
double max_abs(const Vec& v);
double max_abs_diff(const Vec& a, const Vec& b);

// M v
Vec mat_vec(const Matrix& m, const Vec& v);
// v' M, i.e. M' v
Vec vec_mat(const Vec& v, const Matrix& m);
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
double max_abs_diff(const Matrix& a, const Matrix& b);

// Infinity norm (max absolute row sum).
double norm_inf(const Matrix& m);

Vec unit_vector(std::size_t n, std::size_t i);

}  // namespace sqd
