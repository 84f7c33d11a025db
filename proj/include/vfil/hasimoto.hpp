#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "vfil/evolve.hpp"
#include "vfil/geometry.hpp"

namespace vfil {

inline constexpr double default_kappa_floor = 1e-6;

struct FrenetData {
    ScalarField kappa;
    /// Zero where the mask is off; no torsion claim is made there.
    ScalarField tau;
    /// 1 where kappa >= kappa_floor.
    std::vector<std::uint8_t> mask;
};

/// kappa = |v_s|, tau = (v x v_s) . v_ss / kappa^2 for the unit-speed curve with tangent v.
FrenetData frenet(const VectorField& v, double kappa_floor = default_kappa_floor);

struct HasimotoField {
    ScalarField psi_re;
    ScalarField psi_im;
    std::vector<std::uint8_t> mask;
    /// Node where the torsion phase starts; empty when nothing is masked in.
    std::optional<std::size_t> origin;
    /// Real potential A(t) = (tau^2 - kappa_ss/kappa - kappa^2/2) at the phase
    /// origin. Pinning the phase there makes psi obey
    /// (1/i) psi_t = psi_ss + |psi|^2 psi / 2 + A(t) psi.
    double potential = 0.0;

    bool empty() const { return !origin.has_value(); }
};

/// psi = kappa exp(i (phase_offset + int_origin^s tau ds)), cumulative trapezoid
/// phase without reduction mod 2 pi. Throws MaskFragmented when the masked
/// nodes do not form one contiguous run. An all-masked-out field yields psi = 0.
HasimotoField hasimoto_psi(const FrenetData& f, double phase_offset = 0.0);

struct NlsResidual {
    /// max |(1/i) psi_t - psi_ss - |psi|^2 psi / 2 - A psi| over interior masked nodes.
    double value = 0.0;
    /// Number of (node, time) samples that entered the maximum; 0 means nothing was masked in.
    std::size_t samples = 0;
};

/// Centred differences in time over consecutive snapshots (at least three).
NlsResidual nls_residual(std::span<const HasimotoField> fields, std::span<const double> times);

/// frenet + hasimoto_psi for every snapshot of a run.
std::vector<HasimotoField> hasimoto_series(const TimeSeries& series, double kappa_floor = default_kappa_floor);

}  // namespace vfil
