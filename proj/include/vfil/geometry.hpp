#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "vfil/error.hpp"

namespace vfil {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr double operator[](std::size_t i) const { return i == 0 ? x : (i == 1 ? y : z); }

    constexpr Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    constexpr Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    constexpr Vec3& operator*=(double a) { x *= a; y *= a; z *= a; return *this; }

    friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

inline constexpr Vec3 e3{0.0, 0.0, 1.0};

constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
constexpr Vec3 operator/(const Vec3& a, double s) { return {a.x / s, a.y / s, a.z / s}; }

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

// Right-handed exterior product.
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

// Largest absolute component; the max-norm used by every residual in the library.
inline double max_abs(const Vec3& a) { return std::fmax(std::fabs(a.x), std::fmax(std::fabs(a.y), std::fabs(a.z))); }
inline double max_abs(double a) { return std::fabs(a); }

inline bool is_finite(const Vec3& a) { return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z); }
inline bool is_finite(double a) { return std::isfinite(a); }

enum class GridKind { HalfLine, WholeLine, Periodic };

const char* to_string(GridKind kind);

/// Uniform 1-D grid. Half-line grids start at s = 0; whole-line grids are
/// symmetric about a node at s = 0; periodic grids exclude the right endpoint.
class Grid {
public:
    static constexpr std::size_t min_points = 8;

    static Grid half_line(double length, std::size_t n);
    /// `n` must be odd so that the centre node sits exactly at s = 0.
    static Grid whole_line(double half_length, std::size_t n);
    static Grid periodic(double s_min, double period, std::size_t n);

    GridKind kind() const { return kind_; }
    std::size_t size() const { return n_; }
    double h() const { return h_; }
    double s_min() const { return s_min_; }
    double s_max() const { return s_max_; }

    double s(std::size_t i) const;

    /// Index of the node at s = 0, if the grid has one.
    std::optional<std::size_t> origin() const;

    bool is_periodic() const { return kind_ == GridKind::Periodic; }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    Grid(GridKind kind, double s_min, double s_max, std::size_t n, double h)
        : kind_(kind), s_min_(s_min), s_max_(s_max), n_(n), h_(h) {}

    GridKind kind_;
    double s_min_;
    double s_max_;
    std::size_t n_;
    double h_;
};

template <class T>
class SampledField {
public:
    using value_type = T;

    SampledField(Grid grid, std::vector<T> values) : grid_(std::move(grid)), values_(std::move(values)) {
        if (values_.size() != grid_.size()) {
            throw Error(ErrorCode::GridMismatch, "sample count does not match grid size");
        }
        for (const auto& v : values_) {
            if (!is_finite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite sample");
        }
    }

    const Grid& grid() const { return grid_; }
    std::span<const T> values() const { return values_; }
    const T& operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const { return values_.size(); }

    friend bool operator==(const SampledField&, const SampledField&) = default;

private:
    Grid grid_;
    std::vector<T> values_;
};

using VectorField = SampledField<Vec3>;
using ScalarField = SampledField<double>;

/// Finite-difference weights for the `order`-th derivative at x = 0 from
/// nodes at the given offsets (in units of h). Fornberg's recursion.
std::vector<double> fd_weights(int order, std::span<const double> offsets);

/// Second-order s-derivative (order 1 or 2). Central stencils in the interior,
/// one-sided stencils of the same order at non-periodic ends.
template <class T>
SampledField<T> deriv(const SampledField<T>& field, int order);

/// Raw-span form of `deriv`; `periodic` selects wrap-around ends.
template <class T>
void deriv_into(std::span<const T> in, std::span<T> out, double h, int order, bool periodic);

enum class Side { Right, Left };

struct BoundaryStencil {
    /// Formal accuracy p; the k-th derivative uses k + p nodes.
    int accuracy = 4;
    int k_max = 4;
};

/// One-sided estimate of the k-th derivative at `node`, using nodes on one side
/// only. Left-sided estimates look towards decreasing s.
template <class T>
T one_sided_deriv(const SampledField<T>& field, std::size_t node, int k, Side side, BoundaryStencil stencil = {});

/// Trace of the k-th derivative at s = 0.
template <class T>
T one_sided_deriv_at_zero(const SampledField<T>& field, int k, BoundaryStencil stencil = {}, Side side = Side::Right);

/// Rescales every sample to unit length. Idempotent.
VectorField normalize_field(const VectorField& field);

/// Projects one vector onto the unit sphere; identical rounding to normalize_field.
Vec3 project_unit(const Vec3& v);

/// max_i | |values[i]| - 1 |
double max_norm_deviation(const VectorField& field);
double max_norm_deviation(std::span<const Vec3> values);

/// Trapezoid integral of the samples; periodic grids sum all nodes with weight h.
double integrate(const ScalarField& field);

}  // namespace vfil
