#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "hhw/grid.hpp"
#include "hhw/linalg.hpp"
#include "hhw/model.hpp"

namespace hhw {

/// Three-point finite-difference weights at relative mesh offsets.
struct StencilCoeffs {
    std::array<int, 3> offsets;
    std::array<double, 3> weights;
};

/// f'(x_i) from x_{i-2}, x_{i-1}, x_i. Arguments are Δx_{i-1}, Δx_i.
StencilCoeffs coeff_backward(double dx_im1, double dx_i);
/// f'(x_i) from x_{i-1}, x_i, x_{i+1}. Arguments are Δx_i, Δx_{i+1}.
StencilCoeffs coeff_central(double dx_i, double dx_ip1);
/// f'(x_i) from x_i, x_{i+1}, x_{i+2}. Arguments are Δx_{i+1}, Δx_{i+2}.
StencilCoeffs coeff_forward(double dx_ip1, double dx_ip2);
/// f''(x_i) from x_{i-1}, x_i, x_{i+1}. Arguments are Δx_i, Δx_{i+1}.
StencilCoeffs coeff_second(double dx_i, double dx_ip1);

/// A(t) = A0 + A1 + A2 + A3(t) and g(t) = g0 + g1 + g2 + g3(t).
///
/// A0 holds all mixed-derivative terms. A1, A2 and A3 act along s, v and r
/// lines respectively and carry one third of the -r u reaction each. The only
/// time dependence is the b(T - t) part of the r-drift:
///   A3(t) = a3_static + w(t) * a3_drift,   g3(t) = g3_static + w(t) * g3_drift,
/// with w(t) = drift_weight(t).
struct SplitOperator {
    std::size_t dimension = 0;
    SparseOperator a0;
    LineOperator a1;
    LineOperator a2;
    LineOperator a3_static;
    LineOperator a3_drift;
    std::function<double(double)> drift_weight;
    std::vector<double> g0;
    std::vector<double> g1;
    std::vector<double> g2;
    std::vector<double> g3_static;
    std::vector<double> g3_drift;

    /// y += alpha * A3(t) x
    void apply_a3_add(double t, std::span<const double> x, std::span<double> y,
                      double alpha = 1.0) const;
    /// y = A(t) x
    void apply_full(double t, std::span<const double> x, std::span<double> y) const;
    [[nodiscard]] std::vector<double> g3(double t) const;
    [[nodiscard]] std::vector<double> g(double t) const;
};

/// Semidiscrete system U'(t) = A(t) U + g(t), U(0) = payoff on the active grid.
struct SemidiscreteSystem {
    SplitOperator split;
    std::vector<double> u0;
    Grid3D grid;
    OptionSpec option;
    HHWParams params;
};

/// Finite-difference semidiscretization of the HHW PDE on an active grid.
/// Throws std::invalid_argument when the grid mode does not match the option.
SemidiscreteSystem assemble(const HHWParams& params, const OptionSpec& option, const Grid3D& grid);

/// U0[l(i,j,k)] = max(0, s_i - K).
std::vector<double> initial_vector(const OptionSpec& option, const Grid3D& grid);

/// A(t) assembled directly as one matrix (no splitting) from the same stencil rules.
SparseOperator assemble_unsplit(const SemidiscreteSystem& system, double t);
/// g(t) accumulated alongside assemble_unsplit.
std::vector<double> unsplit_source(const SemidiscreteSystem& system, double t);

}  // namespace hhw
