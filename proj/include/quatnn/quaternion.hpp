#ifndef QUATNN_QUATERNION_HPP
#define QUATNN_QUATERNION_HPP

#include <cmath>
#include <iosfwd>
#include <stdexcept>

namespace quatnn {

/// A quaternion w + x i + y j + z k over double, component order
/// (real, i, j, k). Multiplication follows the Hamilton convention
/// ij = k, jk = i, ki = j.
struct Quaternion {
    double w = 0.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Quaternion() = default;
    constexpr Quaternion(double w_, double x_, double y_, double z_)
        : w(w_), x(x_), y(y_), z(z_) {}

    static constexpr Quaternion zero() { return {0.0, 0.0, 0.0, 0.0}; }
    static constexpr Quaternion one() { return {1.0, 0.0, 0.0, 0.0}; }
    static constexpr Quaternion unit_i() { return {0.0, 1.0, 0.0, 0.0}; }
    static constexpr Quaternion unit_j() { return {0.0, 0.0, 1.0, 0.0}; }
    static constexpr Quaternion unit_k() { return {0.0, 0.0, 0.0, 1.0}; }

    /// Component access by index 0..3 = (w, x, y, z).
    constexpr double operator[](int a) const {
        switch (a) {
            case 0: return w;
            case 1: return x;
            case 2: return y;
            default: return z;
        }
    }
    constexpr double& operator[](int a) {
        switch (a) {
            case 0: return w;
            case 1: return x;
            case 2: return y;
            default: return z;
        }
    }

    constexpr bool operator==(const Quaternion&) const = default;
};

/// The three self-inverse mirror axes; None selects the untouched value.
/// Used both for involutions themselves and to pick a derivative variant.
enum class Involution { None, I, J, K };

constexpr Quaternion operator+(const Quaternion& a, const Quaternion& b) {
    return {a.w + b.w, a.x + b.x, a.y + b.y, a.z + b.z};
}

constexpr Quaternion operator-(const Quaternion& a, const Quaternion& b) {
    return {a.w - b.w, a.x - b.x, a.y - b.y, a.z - b.z};
}

constexpr Quaternion operator-(const Quaternion& a) {
    return {-a.w, -a.x, -a.y, -a.z};
}

constexpr Quaternion operator*(double s, const Quaternion& a) {
    return {s * a.w, s * a.x, s * a.y, s * a.z};
}

constexpr Quaternion operator*(const Quaternion& a, double s) { return s * a; }

constexpr Quaternion operator/(const Quaternion& a, double s) {
    return {a.w / s, a.x / s, a.y / s, a.z / s};
}

/// Hamilton product; non-commutative.
constexpr Quaternion operator*(const Quaternion& a, const Quaternion& b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

constexpr Quaternion& operator+=(Quaternion& a, const Quaternion& b) {
    a = a + b;
    return a;
}

constexpr Quaternion& operator-=(Quaternion& a, const Quaternion& b) {
    a = a - b;
    return a;
}

constexpr Quaternion conj(const Quaternion& a) { return {a.w, -a.x, -a.y, -a.z}; }

/// Componentwise product (w*w, x*x, y*y, z*z).
constexpr Quaternion hadamard(const Quaternion& a, const Quaternion& b) {
    return {a.w * b.w, a.x * b.x, a.y * b.y, a.z * b.z};
}

constexpr double norm_sq(const Quaternion& a) {
    return a.w * a.w + a.x * a.x + a.y * a.y + a.z * a.z;
}

inline double norm(const Quaternion& a) { return std::sqrt(norm_sq(a)); }

/// Norm of the vector part alone.
inline double imag_norm(const Quaternion& a) {
    return std::sqrt(a.x * a.x + a.y * a.y + a.z * a.z);
}

inline bool is_finite(const Quaternion& a) {
    return std::isfinite(a.w) && std::isfinite(a.x) && std::isfinite(a.y) &&
           std::isfinite(a.z);
}

/// Multiplicative inverse conj(q) / |q|^2. Throws for the zero quaternion.
inline Quaternion inverse(const Quaternion& a) {
    const double n2 = norm_sq(a);
    if (n2 == 0.0) {
        throw std::domain_error("quatnn: inverse of zero quaternion");
    }
    return conj(a) / n2;
}

/// Mirror map q -> -eta q eta for axis eta; flips the two vector components
/// orthogonal to the axis. Involution::None returns q unchanged.
constexpr Quaternion involution(const Quaternion& q, Involution axis) {
    switch (axis) {
        case Involution::None: return q;
        case Involution::I: return {q.w, q.x, -q.y, -q.z};
        case Involution::J: return {q.w, -q.x, q.y, -q.z};
        default: return {q.w, -q.x, -q.y, q.z};
    }
}

constexpr Quaternion conj_involution(const Quaternion& q, Involution axis) {
    return conj(involution(q, axis));
}

/// The pure unit quaternion of a mirror axis; Involution::None maps to 1.
constexpr Quaternion axis_unit(Involution axis) {
    switch (axis) {
        case Involution::None: return Quaternion::one();
        case Involution::I: return Quaternion::unit_i();
        case Involution::J: return Quaternion::unit_j();
        default: return Quaternion::unit_k();
    }
}

std::ostream& operator<<(std::ostream& os, const Quaternion& q);

}  // namespace quatnn

#endif
