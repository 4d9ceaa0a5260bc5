#pragma once

#include <array>
#include <cmath>

namespace accrete {

/// Plane vector.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
};

inline Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
inline Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
inline Vec2 operator*(double s, Vec2 a) { return a *= s; }
inline Vec2 operator*(Vec2 a, double s) { return a *= s; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }

/// 2x2 matrix, row-major. m[r][c].
struct Mat2 {
    std::array<std::array<double, 2>, 2> m{{{0.0, 0.0}, {0.0, 0.0}}};

    double& operator()(int r, int c) { return m[r][c]; }
    double operator()(int r, int c) const { return m[r][c]; }

    static Mat2 identity() { return Mat2{{{{1.0, 0.0}, {0.0, 1.0}}}}; }
    static Mat2 zero() { return Mat2{}; }

    Mat2& operator+=(const Mat2& o) {
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) m[r][c] += o.m[r][c];
        return *this;
    }
    Mat2& operator-=(const Mat2& o) {
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) m[r][c] -= o.m[r][c];
        return *this;
    }
    Mat2& operator*=(double s) {
        for (auto& row : m)
            for (auto& v : row) v *= s;
        return *this;
    }
};

inline Mat2 operator+(Mat2 a, const Mat2& b) { return a += b; }
inline Mat2 operator-(Mat2 a, const Mat2& b) { return a -= b; }
inline Mat2 operator*(double s, Mat2 a) { return a *= s; }
inline Mat2 operator*(Mat2 a, double s) { return a *= s; }

inline Mat2 operator*(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j);
    return r;
}

inline Vec2 operator*(const Mat2& a, const Vec2& v) {
    return {a(0, 0) * v.x + a(0, 1) * v.y, a(1, 0) * v.x + a(1, 1) * v.y};
}

inline Mat2 transpose(const Mat2& a) {
    return Mat2{{{{a(0, 0), a(1, 0)}, {a(0, 1), a(1, 1)}}}};
}

inline double det(const Mat2& a) { return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0); }

/// d(det F)/dF; satisfies cofactor(F) = det(F) * F^{-T}.
inline Mat2 cofactor(const Mat2& a) {
    return Mat2{{{{a(1, 1), -a(1, 0)}, {-a(0, 1), a(0, 0)}}}};
}

/// Frobenius inner product A:B.
inline double inner(const Mat2& a, const Mat2& b) {
    double s = 0.0;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) s += a(r, c) * b(r, c);
    return s;
}

inline double norm2(const Mat2& a) { return inner(a, a); }
inline double norm(const Mat2& a) { return std::sqrt(norm2(a)); }

inline Mat2 rotation(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return Mat2{{{{c, -s}, {s, c}}}};
}

/// Third-order 2x2x2 tensor; t[i][j][k].
struct Ten3 {
    std::array<std::array<std::array<double, 2>, 2>, 2> t{};

    double& operator()(int i, int j, int k) { return t[i][j][k]; }
    double operator()(int i, int j, int k) const { return t[i][j][k]; }

    Ten3& operator+=(const Ten3& o) {
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k) t[i][j][k] += o.t[i][j][k];
        return *this;
    }
    Ten3& operator-=(const Ten3& o) {
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k) t[i][j][k] -= o.t[i][j][k];
        return *this;
    }
    Ten3& operator*=(double s) {
        for (auto& a : t)
            for (auto& b : a)
                for (auto& v : b) v *= s;
        return *this;
    }
};

inline Ten3 operator+(Ten3 a, const Ten3& b) { return a += b; }
inline Ten3 operator-(Ten3 a, const Ten3& b) { return a -= b; }
inline Ten3 operator*(double s, Ten3 a) { return a *= s; }

/// Full contraction over all three slots.
inline double inner(const Ten3& a, const Ten3& b) {
    double s = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) s += a(i, j, k) * b(i, j, k);
    return s;
}

inline double norm2(const Ten3& a) { return inner(a, a); }
inline double norm(const Ten3& a) { return std::sqrt(norm2(a)); }

/// (Q G)_{ijk} = Q_{il} G_{ljk}; rotates the component slot only.
inline Ten3 rotate_first_slot(const Mat2& q, const Ten3& g) {
    Ten3 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                r(i, j, k) = q(i, 0) * g(0, j, k) + q(i, 1) * g(1, j, k);
    return r;
}

}  // namespace accrete
