#pragma once

// Dense linear-algebra helpers shared by every module: matrix aliases,
// sign/log-magnitude determinants and small numeric utilities.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace cosub {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using complex = std::complex<double>;

/// Determinant carried as sign and log-magnitude. A zero determinant has
/// sign 0 and log_abs = -inf.
struct LogDet {
    int sign = 1;
    double log_abs = 0.0;

    [[nodiscard]] bool is_zero() const { return sign == 0; }
    [[nodiscard]] double value() const {
        return sign == 0 ? 0.0 : sign * std::exp(log_abs);
    }
    static LogDet zero() { return {0, -std::numeric_limits<double>::infinity()}; }
    static LogDet from_value(double v) {
        if (v == 0.0) return zero();
        return {v > 0 ? 1 : -1, std::log(std::abs(v))};
    }
    friend LogDet operator*(LogDet a, LogDet b) {
        if (a.is_zero() || b.is_zero()) return zero();
        return {a.sign * b.sign, a.log_abs + b.log_abs};
    }
};

/// Determinant via partial-pivot LU, accumulated in log space.
inline LogDet log_det(const Matrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("log_det: matrix not square");
    if (m.rows() == 0) return {};
    Eigen::PartialPivLU<Matrix> lu(m);
    const Matrix& u = lu.matrixLU();
    LogDet out{static_cast<int>(lu.permutationP().determinant()), 0.0};
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
        const double d = u(i, i);
        if (d == 0.0) return LogDet::zero();
        if (d < 0) out.sign = -out.sign;
        out.log_abs += std::log(std::abs(d));
    }
    return out;
}

/// Inverse of a square matrix; throws when the matrix is numerically singular
/// (reciprocal condition estimate below `rcond_floor`).
inline Matrix checked_inverse(const Matrix& m, double rcond_floor = 1e-14) {
    if (m.rows() != m.cols()) throw std::invalid_argument("matrix not square");
    Eigen::PartialPivLU<Matrix> lu(m);
    if (!(lu.rcond() > rcond_floor)) throw std::domain_error("matrix is not invertible");
    return lu.inverse();
}

inline Matrix matrix_power(const Matrix& m, int k) {
    if (k < 0) return matrix_power(checked_inverse(m), -k);
    Matrix result = Matrix::Identity(m.rows(), m.cols());
    Matrix base = m;
    while (k > 0) {
        if (k & 1) result = result * base;
        k >>= 1;
        if (k > 0) base = base * base;
    }
    return result;
}

/// Smallest eigenvalue of a symmetric matrix (lower triangle is read).
inline double min_symmetric_eigenvalue(const Matrix& m) {
    if (m.rows() == 0) return std::numeric_limits<double>::infinity();
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

/// Neumaier-compensated sum in the order given.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    [[nodiscard]] double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double relative_difference(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    if (scale == 0.0) return 0.0;
    return std::abs(a - b) / scale;
}

}  // namespace cosub
