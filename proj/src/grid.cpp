#include "hhw/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hhw {

void GridSpec::validate() const {
    if (m1 < 1 || m2 < 1 || m3 < 1) {
        throw std::invalid_argument("GridSpec: mesh counts must be >= 1");
    }
    if (!(s_max > 0.0 && v_max > 0.0 && r_max > 0.0)) {
        throw std::invalid_argument("GridSpec: domain bounds must be positive");
    }
    if (!(d1 > 0.0 && d2 > 0.0 && d3 > 0.0)) {
        throw std::invalid_argument("GridSpec: stretching parameters must be positive");
    }
    if (!(s_left >= 0.0 && s_left < s_right && s_right <= s_max)) {
        throw std::invalid_argument("GridSpec: require 0 <= Sleft < Sright <= Smax");
    }
}

Mesh1D::Mesh1D(std::vector<double> points) : points_(std::move(points)) {
    if (points_.size() < 2) {
        throw std::invalid_argument("Mesh1D: need at least two points");
    }
    widths_.assign(points_.size(), 0.0);
    for (std::size_t i = 1; i < points_.size(); ++i) {
        widths_[i] = points_[i] - points_[i - 1];
        if (!(widths_[i] > 0.0)) {
            throw std::invalid_argument("Mesh1D: points must be strictly increasing");
        }
    }
}

Grid3D::Grid3D(Mesh1D s, Mesh1D v, Mesh1D r, GridMode mode)
    : s_(std::move(s)), v_(std::move(v)), r_(std::move(r)), mode_(mode) {
    i_begin_ = 1;
    k_begin_ = 0;
    k_end_ = r_.size();
    j_begin_ = 0;
    if (mode_ == GridMode::Vanilla) {
        i_end_ = s_.size();      // i <= m1
        j_end_ = v_.size() - 1;  // j <= m2 - 1
    } else {
        i_end_ = s_.size() - 1;  // i <= m1 - 1
        j_end_ = v_.size();      // j <= m2
    }
    if (i_end_ <= i_begin_ || j_end_ <= j_begin_) {
        throw std::invalid_argument("Grid3D: mesh too small for the active set");
    }
}

GridIndex Grid3D::unindex(std::size_t l) const {
    const std::size_t ii = l % n_s();
    const std::size_t rest = l / n_s();
    const std::size_t jj = rest % n_v();
    const std::size_t kk = rest / n_v();
    return {ii + i_begin_, jj + j_begin_, kk + k_begin_};
}

GridSpec default_spec(double strike, double maturity, double c1, std::size_t m, bool uniform) {
    if (!(strike > 0.0 && maturity > 0.0)) {
        throw std::invalid_argument("default_spec: strike and maturity must be positive");
    }
    GridSpec g;
    g.m1 = 2 * m;
    g.m2 = m;
    g.m3 = m;
    g.s_max = 14.0 * strike;
    g.v_max = 10.0;
    g.r_max = 1.0;
    g.d1 = strike / 20.0;
    g.d2 = g.v_max / 500.0;
    g.d3 = g.r_max / 400.0;
    // The rate in the Sleft formula is the fixed constant 1/4.
    g.s_left = std::max(0.5, std::exp(-0.25 * maturity)) * strike;
    g.s_right = strike;
    g.c = c1;
    g.uniform = uniform;
    return g;
}

GridSpec spec_for_option(const OptionSpec& option, double c1, std::size_t m, bool uniform) {
    GridSpec g = default_spec(option.strike, option.maturity, c1, m, uniform);
    if (option.is_barrier()) {
        g.s_max = option.barrier;
    }
    return g;
}

double s_mesh_dxi(const GridSpec& spec) {
    const double xi_min = std::asinh(-spec.s_left / spec.d1);
    const double xi_int = (spec.s_right - spec.s_left) / spec.d1;
    const double xi_max = xi_int + std::asinh((spec.s_max - spec.s_right) / spec.d1);
    return (xi_max - xi_min) / static_cast<double>(spec.m1);
}

double v_mesh_deta(const GridSpec& spec) {
    return std::asinh(spec.v_max / spec.d2) / static_cast<double>(spec.m2);
}

double r_mesh_dzeta(const GridSpec& spec) {
    const double lo = std::asinh((-spec.r_max - spec.c) / spec.d3);
    const double hi = std::asinh((spec.r_max - spec.c) / spec.d3);
    return (hi - lo) / static_cast<double>(spec.m3);
}

Mesh1D build_s_mesh(const GridSpec& spec) {
    spec.validate();
    const double xi_min = std::asinh(-spec.s_left / spec.d1);
    const double xi_int = (spec.s_right - spec.s_left) / spec.d1;
    const double dxi = s_mesh_dxi(spec);
    std::vector<double> pts(spec.m1 + 1);
    for (std::size_t i = 0; i <= spec.m1; ++i) {
        const double xi = xi_min + static_cast<double>(i) * dxi;
        if (xi < 0.0) {
            pts[i] = spec.s_left + spec.d1 * std::sinh(xi);
        } else if (xi <= xi_int) {
            pts[i] = spec.s_left + spec.d1 * xi;
        } else {
            pts[i] = spec.s_right + spec.d1 * std::sinh(xi - xi_int);
        }
    }
    pts.front() = 0.0;
    pts.back() = spec.s_max;
    return Mesh1D(std::move(pts));
}

Mesh1D build_v_mesh(const GridSpec& spec) {
    spec.validate();
    const double deta = v_mesh_deta(spec);
    std::vector<double> pts(spec.m2 + 1);
    for (std::size_t j = 0; j <= spec.m2; ++j) {
        pts[j] = spec.d2 * std::sinh(static_cast<double>(j) * deta);
    }
    pts.front() = 0.0;
    pts.back() = spec.v_max;
    return Mesh1D(std::move(pts));
}

Mesh1D build_r_mesh(const GridSpec& spec) {
    spec.validate();
    const double zeta0 = std::asinh((-spec.r_max - spec.c) / spec.d3);
    const double dzeta = r_mesh_dzeta(spec);
    std::vector<double> pts(spec.m3 + 1);
    for (std::size_t k = 0; k <= spec.m3; ++k) {
        pts[k] = spec.c + spec.d3 * std::sinh(zeta0 + static_cast<double>(k) * dzeta);
    }
    pts.front() = -spec.r_max;
    pts.back() = spec.r_max;
    return Mesh1D(std::move(pts));
}

namespace {
Mesh1D linspace(double lo, double hi, std::size_t intervals) {
    std::vector<double> pts(intervals + 1);
    const double h = (hi - lo) / static_cast<double>(intervals);
    for (std::size_t i = 0; i <= intervals; ++i) {
        pts[i] = lo + static_cast<double>(i) * h;
    }
    pts.back() = hi;
    return Mesh1D(std::move(pts));
}
}  // namespace

Grid3D build_uniform_meshes(const GridSpec& spec, GridMode mode) {
    spec.validate();
    return Grid3D(linspace(0.0, spec.s_max, spec.m1), linspace(0.0, spec.v_max, spec.m2),
                  linspace(-spec.r_max, spec.r_max, spec.m3), mode);
}

Grid3D build_grid(const GridSpec& spec, GridMode mode) {
    if (spec.uniform) {
        return build_uniform_meshes(spec, mode);
    }
    return Grid3D(build_s_mesh(spec), build_v_mesh(spec), build_r_mesh(spec), mode);
}

SmoothnessReport smoothness_report(const Mesh1D& mesh, double dxi) {
    if (mesh.size() < 3) {
        throw std::invalid_argument("smoothness_report: need at least three points");
    }
    SmoothnessReport rep{mesh.width(1) / dxi, mesh.width(1) / dxi, 0.0};
    for (std::size_t i = 1; i <= mesh.intervals(); ++i) {
        rep.c0 = std::min(rep.c0, mesh.width(i) / dxi);
        rep.c1 = std::max(rep.c1, mesh.width(i) / dxi);
        if (i + 1 <= mesh.intervals()) {
            rep.c2 = std::max(rep.c2, std::abs(mesh.width(i + 1) - mesh.width(i)) / (dxi * dxi));
        }
    }
    return rep;
}

}  // namespace hhw
