#pragma once

#include <cstddef>
#include <vector>

#include "hhw/model.hpp"

namespace hhw {

/// Parameters of the tensor-product mesh in (s, v, r).
struct GridSpec {
    std::size_t m1 = 1;
    std::size_t m2 = 1;
    std::size_t m3 = 1;
    double s_max = 0.0;
    double v_max = 0.0;
    double r_max = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    double d3 = 0.0;
    double s_left = 0.0;
    double s_right = 0.0;
    double c = 0.0;  // concentration point of the r-mesh
    bool uniform = false;

    void validate() const;
};

/// Strictly increasing 1D mesh x_0 < ... < x_m.
class Mesh1D {
public:
    Mesh1D() = default;
    explicit Mesh1D(std::vector<double> points);

    [[nodiscard]] const std::vector<double>& points() const { return points_; }
    [[nodiscard]] double operator[](std::size_t i) const { return points_[i]; }
    /// x_i - x_{i-1}, defined for 1 <= i <= intervals().
    [[nodiscard]] double width(std::size_t i) const { return widths_[i]; }
    [[nodiscard]] const std::vector<double>& widths() const { return widths_; }
    [[nodiscard]] std::size_t size() const { return points_.size(); }
    [[nodiscard]] std::size_t intervals() const { return points_.size() - 1; }
    [[nodiscard]] double front() const { return points_.front(); }
    [[nodiscard]] double back() const { return points_.back(); }

private:
    std::vector<double> points_;
    std::vector<double> widths_;  // widths_[0] == 0
};

enum class GridMode { Vanilla, Barrier };

struct GridIndex {
    std::size_t i;
    std::size_t j;
    std::size_t k;
    bool operator==(const GridIndex&) const = default;
};

/// Tensor-product grid together with the set of active (unknown) points.
///
/// Vanilla: 1 <= i <= m1, 0 <= j <= m2-1, 0 <= k <= m3 (Dirichlet at s = 0 and
/// v = Vmax). Barrier: 1 <= i <= m1-1, 0 <= j <= m2, 0 <= k <= m3 (Dirichlet at
/// s = 0 and s = B). Linear index runs i fastest, then j, then k.
class Grid3D {
public:
    Grid3D(Mesh1D s, Mesh1D v, Mesh1D r, GridMode mode);

    [[nodiscard]] const Mesh1D& s() const { return s_; }
    [[nodiscard]] const Mesh1D& v() const { return v_; }
    [[nodiscard]] const Mesh1D& r() const { return r_; }
    [[nodiscard]] GridMode mode() const { return mode_; }

    [[nodiscard]] std::size_t m1() const { return s_.intervals(); }
    [[nodiscard]] std::size_t m2() const { return v_.intervals(); }
    [[nodiscard]] std::size_t m3() const { return r_.intervals(); }

    // Half-open active ranges per direction.
    [[nodiscard]] std::size_t i_begin() const { return i_begin_; }
    [[nodiscard]] std::size_t i_end() const { return i_end_; }
    [[nodiscard]] std::size_t j_begin() const { return j_begin_; }
    [[nodiscard]] std::size_t j_end() const { return j_end_; }
    [[nodiscard]] std::size_t k_begin() const { return k_begin_; }
    [[nodiscard]] std::size_t k_end() const { return k_end_; }

    [[nodiscard]] std::size_t n_s() const { return i_end_ - i_begin_; }
    [[nodiscard]] std::size_t n_v() const { return j_end_ - j_begin_; }
    [[nodiscard]] std::size_t n_r() const { return k_end_ - k_begin_; }
    [[nodiscard]] std::size_t size() const { return n_s() * n_v() * n_r(); }

    [[nodiscard]] bool is_active(std::size_t i, std::size_t j, std::size_t k) const {
        return i >= i_begin_ && i < i_end_ && j >= j_begin_ && j < j_end_ && k >= k_begin_ &&
               k < k_end_;
    }
    [[nodiscard]] std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
        return (i - i_begin_) + n_s() * ((j - j_begin_) + n_v() * (k - k_begin_));
    }
    [[nodiscard]] std::size_t index(const GridIndex& g) const { return index(g.i, g.j, g.k); }
    [[nodiscard]] GridIndex unindex(std::size_t l) const;

private:
    Mesh1D s_;
    Mesh1D v_;
    Mesh1D r_;
    GridMode mode_;
    std::size_t i_begin_ = 0, i_end_ = 0;
    std::size_t j_begin_ = 0, j_end_ = 0;
    std::size_t k_begin_ = 0, k_end_ = 0;
};

/// Default mesh parameters: Smax = 14K, Vmax = 10, Rmax = 1, d1 = K/20,
/// d2 = Vmax/500, d3 = Rmax/400, Sleft = max(1/2, e^{-T/4}) K, Sright = K,
/// c = c1, m1 = 2m, m2 = m3 = m.
GridSpec default_spec(double strike, double maturity, double c1, std::size_t m, bool uniform);

/// default_spec adjusted to the option: for an up-and-out call Smax = B.
GridSpec spec_for_option(const OptionSpec& option, double c1, std::size_t m, bool uniform);

/// s-mesh: uniform with spacing d1*dxi inside [Sleft, Sright], sinh-stretched outside.
Mesh1D build_s_mesh(const GridSpec& spec);
/// v_j = d2 sinh(j * deta), concentrated near v = 0.
Mesh1D build_v_mesh(const GridSpec& spec);
/// r_k = c + d3 sinh(zeta_k), concentrated near r = c.
Mesh1D build_r_mesh(const GridSpec& spec);

/// Equidistant meshes on [0, Smax] x [0, Vmax] x [-Rmax, Rmax].
Grid3D build_uniform_meshes(const GridSpec& spec, GridMode mode = GridMode::Vanilla);

/// Uniform or nonuniform grid according to spec.uniform.
Grid3D build_grid(const GridSpec& spec, GridMode mode);

/// Step of the equidistant computational coordinate behind each mesh.
double s_mesh_dxi(const GridSpec& spec);
double v_mesh_deta(const GridSpec& spec);
double r_mesh_dzeta(const GridSpec& spec);

struct SmoothnessReport {
    double c0;  // min width / dxi
    double c1;  // max width / dxi
    double c2;  // max |width_{i+1} - width_i| / dxi^2
};

SmoothnessReport smoothness_report(const Mesh1D& mesh, double dxi);

}  // namespace hhw
