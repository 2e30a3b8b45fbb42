#pragma once
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace warprl {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::sqrt(x * x + y * y); }
    double dist(const Vec2& o) const { return (*this - o).norm(); }

    /// Unit vector, or `fallback` when the norm is below 1e-12.
    Vec2 unit(Vec2 fallback = {1.0, 0.0}) const {
        double n = norm();
        if (n < 1e-12) return fallback;
        return {x / n, y / n};
    }

    /// Counterclockwise rotation by `angle` radians.
    Vec2 rotated(double angle) const {
        double c = std::cos(angle), s = std::sin(angle);
        return {c * x - s * y, s * x + c * y};
    }

    /// 90-degree counterclockwise rotation.
    Vec2 perp() const { return {-y, x}; }
};

/// Axis-aligned rectangle in world units.
struct Rect {
    double x_min = -1.0, x_max = 1.0;
    double y_min = -1.0, y_max = 1.0;

    bool contains(const Vec2& p) const {
        return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
    }
};

/// Clamp a vector's magnitude to `max_norm`.
inline Vec2 clip_norm(const Vec2& v, double max_norm) {
    double n = v.norm();
    if (n <= max_norm || n == 0.0) return v;
    return v * (max_norm / n);
}

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace warprl
