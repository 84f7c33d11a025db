#include "vfil/hasimoto.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace vfil {

FrenetData frenet(const VectorField& v, double kappa_floor) {
    const auto vs = deriv(v, 1);
    const auto vss = deriv(v, 2);
    const std::size_t n = v.size();
    std::vector<double> kappa(n), tau(n, 0.0);
    std::vector<std::uint8_t> mask(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        kappa[i] = norm(vs[i]);
        if (kappa[i] >= kappa_floor) {
            mask[i] = 1;
            tau[i] = dot(cross(v[i], vs[i]), vss[i]) / (kappa[i] * kappa[i]);
        }
    }
    return {ScalarField(v.grid(), std::move(kappa)), ScalarField(v.grid(), std::move(tau)), std::move(mask)};
}

HasimotoField hasimoto_psi(const FrenetData& f, double phase_offset) {
    const Grid& grid = f.kappa.grid();
    const std::size_t n = grid.size();
    std::vector<double> re(n, 0.0), im(n, 0.0);

    const auto first = std::find(f.mask.begin(), f.mask.end(), 1);
    if (first == f.mask.end()) {
        return {ScalarField(grid, std::move(re)), ScalarField(grid, std::move(im)), f.mask, std::nullopt, 0.0};
    }
    const auto lo = static_cast<std::size_t>(first - f.mask.begin());
    const auto hi = static_cast<std::size_t>(f.mask.rend() - std::find(f.mask.rbegin(), f.mask.rend(), 1)) - 1;
    if (std::find(f.mask.begin() + static_cast<std::ptrdiff_t>(lo), f.mask.begin() + static_cast<std::ptrdiff_t>(hi), 0) !=
        f.mask.begin() + static_cast<std::ptrdiff_t>(hi)) {
        throw Error(ErrorCode::MaskFragmented, "curvature vanishes inside the filament; the transform is undefined there");
    }

    const auto grid_origin = grid.origin();
    const std::size_t o = grid_origin && f.mask[*grid_origin] ? *grid_origin : lo;

    const double h = grid.h();
    std::vector<double> phase(n, 0.0);
    phase[o] = phase_offset;
    for (std::size_t i = o + 1; i <= hi; ++i) phase[i] = phase[i - 1] + 0.5 * h * (f.tau[i - 1] + f.tau[i]);
    for (std::size_t i = o; i-- > lo;) phase[i] = phase[i + 1] - 0.5 * h * (f.tau[i] + f.tau[i + 1]);
    for (std::size_t i = lo; i <= hi; ++i) {
        re[i] = f.kappa[i] * std::cos(phase[i]);
        im[i] = f.kappa[i] * std::sin(phase[i]);
    }

    const double k = f.kappa[o];
    const double t = f.tau[o];
    const double kss = deriv(f.kappa, 2)[o];
    const double potential = t * t - kss / k - 0.5 * k * k;
    return {ScalarField(grid, std::move(re)), ScalarField(grid, std::move(im)), f.mask, o, potential};
}

NlsResidual nls_residual(std::span<const HasimotoField> fields, std::span<const double> times) {
    if (fields.size() < 3 || times.size() != fields.size()) {
        throw Error(ErrorCode::InsufficientSnapshots, "the NLS residual needs at least three snapshots with matching times");
    }
    const Grid& grid = fields.front().psi_re.grid();
    for (const auto& f : fields) {
        if (!(f.psi_re.grid() == grid)) throw Error(ErrorCode::GridMismatch, "snapshots on different grids");
    }
    const std::size_t n = grid.size();
    const double h2 = grid.h() * grid.h();
    using cplx = std::complex<double>;
    auto psi = [&](std::size_t j, std::size_t i) { return cplx(fields[j].psi_re[i], fields[j].psi_im[i]); };

    NlsResidual out;
    for (std::size_t j = 1; j + 1 < fields.size(); ++j) {
        const double d1 = times[j] - times[j - 1];
        const double d2 = times[j + 1] - times[j];
        if (!(d1 > 0.0 && d2 > 0.0)) throw Error(ErrorCode::InvalidArgument, "snapshot times must increase");
        const double wm = -d2 / (d1 * (d1 + d2));
        const double w0 = (d2 - d1) / (d1 * d2);
        const double wp = d1 / (d2 * (d1 + d2));
        const double potential = fields[j].potential;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            bool inside = true;
            for (std::size_t jj = j - 1; jj <= j + 1 && inside; ++jj) {
                inside = fields[jj].mask[i - 1] && fields[jj].mask[i] && fields[jj].mask[i + 1];
            }
            if (!inside) continue;
            const cplx p = psi(j, i);
            const cplx pt = wm * psi(j - 1, i) + w0 * p + wp * psi(j + 1, i);
            const cplx pss = ((psi(j, i + 1) + psi(j, i - 1)) - 2.0 * p) / h2;
            const cplx r = cplx(0.0, -1.0) * pt - pss - 0.5 * std::norm(p) * p - potential * p;
            out.value = std::max(out.value, std::abs(r));
            ++out.samples;
        }
    }
    return out;
}

std::vector<HasimotoField> hasimoto_series(const TimeSeries& series, double kappa_floor) {
    std::vector<HasimotoField> out;
    out.reserve(series.snapshots().size());
    for (const auto& snap : series.snapshots()) out.push_back(hasimoto_psi(frenet(snap, kappa_floor)));
    return out;
}

}  // namespace vfil
