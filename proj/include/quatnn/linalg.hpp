#ifndef QUATNN_LINALG_HPP
#define QUATNN_LINALG_HPP

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "quatnn/quaternion.hpp"

namespace quatnn {

using QVector = std::vector<Quaternion>;

/// Dense row-major quaternion matrix.
class QMatrix {
  public:
    QMatrix() = default;
    QMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), entries_(rows * cols) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Quaternion& operator()(std::size_t i, std::size_t j) {
        return entries_[i * cols_ + j];
    }
    const Quaternion& operator()(std::size_t i, std::size_t j) const {
        return entries_[i * cols_ + j];
    }

    std::vector<Quaternion>& entries() { return entries_; }
    const std::vector<Quaternion>& entries() const { return entries_; }

    bool operator==(const QMatrix&) const = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Quaternion> entries_;
};

/// y_i = sum_j W(i,j) * a_j, weights multiplying from the left.
inline QVector matvec(const QMatrix& w, const QVector& a) {
    if (w.cols() != a.size()) {
        throw std::invalid_argument("quatnn: matvec dimension mismatch");
    }
    QVector out(w.rows());
    for (std::size_t i = 0; i < w.rows(); ++i) {
        Quaternion acc = Quaternion::zero();
        for (std::size_t j = 0; j < w.cols(); ++j) {
            acc += w(i, j) * a[j];
        }
        out[i] = acc;
    }
    return out;
}

inline QVector operator+(const QVector& a, const QVector& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("quatnn: vector sum dimension mismatch");
    }
    QVector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

inline QVector operator-(const QVector& a, const QVector& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("quatnn: vector difference dimension mismatch");
    }
    QVector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

}  // namespace quatnn

#endif
