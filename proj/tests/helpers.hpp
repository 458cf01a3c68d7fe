#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "xnls/core.hpp"
#include "xnls/geometry.hpp"

namespace xnls_test {

using xnls::Mat3;
using xnls::Segment;
using xnls::Vec3;

// All 24 rotations of the chiral octahedral group, generated by closure from
// the three quarter turns. Independent oracle for the fold operations.
inline std::vector<Mat3> octahedral_rotations() {
    auto key = [](const Mat3& m) {
        std::array<int, 9> k;
        for (int i = 0; i < 9; ++i) k[i] = static_cast<int>(std::lround(m.m[i]));
        return k;
    };
    std::vector<Mat3> group{Mat3{}};
    std::vector<std::array<int, 9>> keys{key(Mat3{})};
    const Mat3 gens[3] = {xnls::quarter_turn(xnls::Axis::X, 1),
                          xnls::quarter_turn(xnls::Axis::Y, 1),
                          xnls::quarter_turn(xnls::Axis::Z, 1)};
    bool grew = true;
    while (grew) {
        grew = false;
        const auto snapshot = group;
        for (const auto& g : snapshot)
            for (const auto& gen : gens) {
                const Mat3 prod = gen * g;
                const auto k = key(prod);
                if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
                    keys.push_back(k);
                    group.push_back(prod);
                    grew = true;
                }
            }
    }
    return group;
}

inline bool segment_in_set(const Segment& s, const std::vector<Segment>& set,
                           double tol = 1e-9) {
    for (const auto& t : set)
        if (xnls::detail::segments_match(s, t, tol)) return true;
    return false;
}

inline bool segment_sets_equal(const std::vector<Segment>& a, const std::vector<Segment>& b,
                               double tol = 1e-9) {
    if (a.size() != b.size()) return false;
    for (const auto& s : a)
        if (!segment_in_set(s, b, tol)) return false;
    return true;
}

// Orbit of a segment set under a list of rotations about the origin, deduped.
inline std::vector<Segment> rotation_orbit(const std::vector<Segment>& segments,
                                           const std::vector<Mat3>& rotations) {
    std::vector<Segment> orbit;
    for (const auto& r : rotations)
        for (const auto& s : segments) orbit.push_back({r * s.a, r * s.b, s.radius_mm});
    return xnls::dedup_segments(orbit);
}

// Cyclic Jacobi eigenvalues for a symmetric matrix (row-major n x n).
inline std::vector<double> symmetric_eigenvalues(std::vector<double> a, int n) {
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += a[i * n + j] * a[i * n + j];
        if (off < 1e-26) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (a[q * n + q] - a[p * n + p]) / (2 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1));
                const double c = 1 / std::sqrt(t * t + 1), s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a[k * n + p], akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a[p * n + k], aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> eig(n);
    for (int i = 0; i < n; ++i) eig[i] = a[i * n + i];
    std::sort(eig.begin(), eig.end());
    return eig;
}

}  // namespace xnls_test
