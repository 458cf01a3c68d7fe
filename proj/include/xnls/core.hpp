#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace xnls {

inline constexpr const char* kToolVersion = "xnls 0.1.0";

// ---------------------------------------------------------------------------
// Errors. Every failure mode exposed by the library maps to one family so the
// CLI can translate exceptions into stable exit codes.

enum class ErrorFamily {
    InvalidSpec,
    NonPositiveLength,
    EmptyModel,
    NoSolid,
    NotConverged,
    DegenerateInput,
    SingularFit,
    NonPositiveData,
    Unbracketed,
    IoError,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorFamily family, const std::string& what)
        : std::runtime_error(what), family_(family) {}
    ErrorFamily family() const { return family_; }

  private:
    ErrorFamily family_;
};

#define XNLS_DEFINE_ERROR(NAME)                                   \
    class NAME : public Error {                                   \
      public:                                                     \
        explicit NAME(const std::string& what)                    \
            : Error(ErrorFamily::NAME, std::string(#NAME ": ") + what) {} \
    }

XNLS_DEFINE_ERROR(InvalidSpec);
XNLS_DEFINE_ERROR(NonPositiveLength);
XNLS_DEFINE_ERROR(EmptyModel);
XNLS_DEFINE_ERROR(NoSolid);
XNLS_DEFINE_ERROR(NotConverged);
XNLS_DEFINE_ERROR(DegenerateInput);
XNLS_DEFINE_ERROR(SingularFit);
XNLS_DEFINE_ERROR(NonPositiveData);
XNLS_DEFINE_ERROR(Unbracketed);
XNLS_DEFINE_ERROR(IoError);

#undef XNLS_DEFINE_ERROR

// ---------------------------------------------------------------------------
// Minimal 3-vector. All lengths are mm.

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    constexpr Vec3() = default;
    constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    friend constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend constexpr Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
    friend constexpr Vec3 operator*(Vec3 v, double s) { return s * v; }
    friend constexpr Vec3 operator/(Vec3 v, double s) { return {v.x / s, v.y / s, v.z / s}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3& operator+=(Vec3 b) { x += b.x; y += b.y; z += b.z; return *this; }
};

inline constexpr double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline constexpr Vec3 cross(Vec3 a, Vec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 v) { return std::sqrt(dot(v, v)); }
inline Vec3 normalized(Vec3 v) { return v / norm(v); }
inline Vec3 min3(Vec3 a, Vec3 b) {
    return {std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)};
}
inline Vec3 max3(Vec3 a, Vec3 b) {
    return {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)};
}

// 3x3 rotation, row-major.
struct Mat3 {
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    Vec3 operator*(Vec3 v) const {
        return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
                m[3] * v.x + m[4] * v.y + m[5] * v.z,
                m[6] * v.x + m[7] * v.y + m[8] * v.z};
    }
    Mat3 operator*(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0;
                for (int k = 0; k < 3; ++k) s += m[3 * i + k] * o.m[3 * k + j];
                r.m[3 * i + j] = s;
            }
        return r;
    }
};

enum class Axis { X = 0, Y = 1, Z = 2 };

inline const char* axis_name(Axis a) {
    switch (a) {
        case Axis::X: return "X";
        case Axis::Y: return "Y";
        default: return "Z";
    }
}

inline Axis axis_from_name(const std::string& s) {
    if (s == "X" || s == "x") return Axis::X;
    if (s == "Y" || s == "y") return Axis::Y;
    if (s == "Z" || s == "z") return Axis::Z;
    throw InvalidSpec("orientation_axis must be X, Y or Z, got '" + s + "'");
}

inline constexpr double kPi = 3.14159265358979323846;

// Right-hand-rule rotation by angle (degrees) about a principal axis.
inline Mat3 axis_rotation(Axis axis, double angle_deg) {
    const double a = angle_deg * kPi / 180.0;
    const double c = std::cos(a), s = std::sin(a);
    Mat3 r;
    switch (axis) {
        case Axis::X: r.m = {1, 0, 0, 0, c, -s, 0, s, c}; break;
        case Axis::Y: r.m = {c, 0, s, 0, 1, 0, -s, 0, c}; break;
        case Axis::Z: r.m = {c, -s, 0, s, c, 0, 0, 0, 1}; break;
    }
    return r;
}

// Exact multiples of 90 degrees (used by the fold operations so repeated
// images coincide bit-for-bit instead of within trig rounding).
inline Mat3 quarter_turn(Axis axis, int quarters) {
    static constexpr double kCos[4] = {1, 0, -1, 0};
    static constexpr double kSin[4] = {0, 1, 0, -1};
    const int q = ((quarters % 4) + 4) % 4;
    const double c = kCos[q], s = kSin[q];
    Mat3 r;
    switch (axis) {
        case Axis::X: r.m = {1, 0, 0, 0, c, -s, 0, s, c}; break;
        case Axis::Y: r.m = {c, 0, s, 0, 1, 0, -s, 0, c}; break;
        case Axis::Z: r.m = {c, -s, 0, s, c, 0, 0, 0, 1}; break;
    }
    return r;
}

// "%.9g" formatting used by all text file formats.
inline std::string format_g9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

// FNV-1a, used for provenance hashes of configs.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace xnls
