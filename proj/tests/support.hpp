#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "vfil/geometry.hpp"

namespace vfil::testing {

inline constexpr double pi = std::numbers::pi;

/// Seeded so every failure replays.
inline std::mt19937_64& rng() {
    static std::mt19937_64 engine(20241016);
    return engine;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

inline Vec3 random_vec(double scale = 1.0) { return {uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale)}; }

inline Vec3 random_unit() {
    while (true) {
        const Vec3 v = random_vec();
        const double n = norm(v);
        if (n > 0.2 && n <= 1.0) return v / n;
    }
}

/// Smooth sphere-valued field: a few random Fourier modes, normalised.
inline VectorField random_smooth_field(const Grid& g, int modes = 3) {
    std::vector<Vec3> amp, phase;
    std::vector<double> wave;
    for (int m = 0; m < modes; ++m) {
        amp.push_back(random_vec());
        phase.push_back(random_vec(pi));
        wave.push_back(uniform(0.1, 1.5));
    }
    std::vector<Vec3> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        Vec3 w{0.3, -0.2, 1.0};
        for (int m = 0; m < modes; ++m) {
            const double s = g.s(i) * wave[m];
            w += Vec3{amp[m].x * std::sin(s + phase[m].x), amp[m].y * std::sin(s + phase[m].y), amp[m].z * std::sin(s + phase[m].z)} * 0.5;
        }
        v[i] = w / norm(w);
    }
    return VectorField(g, std::move(v));
}

/// Smooth sphere-valued half-line field with v(0) = e3 exactly.
inline VectorField random_wall_field(const Grid& g) {
    const auto w = random_smooth_field(g);
    std::vector<Vec3> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Vec3 x = e3 + (0.3 * g.s(i) * std::exp(-0.05 * g.s(i) * g.s(i))) * w[i];
        v[i] = x / norm(x);
    }
    return VectorField(g, std::move(v));
}

/// Rotation about the third axis.
inline Vec3 rotate_about_axis(const Vec3& v, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y, v.z};
}

/// Tangent (sin a, 0, cos a) for a closed-form angle profile.
template <class Angle>
VectorField planar_field(const Grid& g, Angle angle) {
    std::vector<Vec3> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double a = angle(g.s(i));
        v[i] = {std::sin(a), 0.0, std::cos(a)};
    }
    return VectorField(g, std::move(v));
}

}  // namespace vfil::testing
