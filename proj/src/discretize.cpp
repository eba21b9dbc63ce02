#include "hhw/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hhw {

namespace {

void require_positive(double a, double b, const char* who) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw std::invalid_argument(std::string(who) + ": mesh widths must be positive");
    }
}

}  // namespace

StencilCoeffs coeff_backward(double dx_im1, double dx_i) {
    require_positive(dx_im1, dx_i, "coeff_backward");
    const double sum = dx_im1 + dx_i;
    return {{-2, -1, 0},
            {dx_i / (dx_im1 * sum), -sum / (dx_im1 * dx_i), (dx_im1 + 2.0 * dx_i) / (dx_i * sum)}};
}

StencilCoeffs coeff_central(double dx_i, double dx_ip1) {
    require_positive(dx_i, dx_ip1, "coeff_central");
    const double sum = dx_i + dx_ip1;
    return {{-1, 0, 1},
            {-dx_ip1 / (dx_i * sum), (dx_ip1 - dx_i) / (dx_i * dx_ip1), dx_i / (dx_ip1 * sum)}};
}

StencilCoeffs coeff_forward(double dx_ip1, double dx_ip2) {
    require_positive(dx_ip1, dx_ip2, "coeff_forward");
    const double sum = dx_ip1 + dx_ip2;
    return {{0, 1, 2},
            {(-2.0 * dx_ip1 - dx_ip2) / (dx_ip1 * sum), sum / (dx_ip1 * dx_ip2),
             -dx_ip1 / (dx_ip2 * sum)}};
}

StencilCoeffs coeff_second(double dx_i, double dx_ip1) {
    require_positive(dx_i, dx_ip1, "coeff_second");
    const double sum = dx_i + dx_ip1;
    return {{-1, 0, 1}, {2.0 / (dx_i * sum), -2.0 / (dx_i * dx_ip1), 2.0 / (dx_ip1 * sum)}};
}

namespace {

enum Direction : int { kMixed = 0, kS = 1, kV = 2, kR = 3 };

// Walks every active point and reports the discrete PDE terms to a sink.
//
// Sink interface:
//   matrix(dir, row, col, weight, drift)  coefficient of an active unknown
//   source(dir, row, value, drift)        known contribution to g
// drift == true marks terms scaled by b(T - t).
class StencilWalker {
public:
    StencilWalker(const HHWParams& p, const OptionSpec& o, const Grid3D& g)
        : p_(p), grid_(g), s_(g.s()), v_(g.v()), r_(g.r()), barrier_(o.is_barrier()) {}

    template <typename Sink>
    void walk(Sink& sink) const {
        for (std::size_t k = grid_.k_begin(); k < grid_.k_end(); ++k) {
            for (std::size_t j = grid_.j_begin(); j < grid_.j_end(); ++j) {
                for (std::size_t i = grid_.i_begin(); i < grid_.i_end(); ++i) {
                    emit_point(i, j, k, sink);
                }
            }
        }
    }

private:
    // Dirichlet data at an inactive grid point.
    double boundary_value(std::size_t i, std::size_t j, std::size_t /*k*/) const {
        if (barrier_ || i == 0) {
            return 0.0;
        }
        if (j == grid_.m2()) {
            return s_[i];  // u = s at v = Vmax
        }
        throw std::logic_error("stencil reached an inactive non-Dirichlet point");
    }

    template <typename Sink>
    void contribute(Sink& sink, int dir, std::size_t row, std::size_t i, std::size_t j,
                    std::size_t k, double weight, bool drift) const {
        if (weight == 0.0) {
            return;
        }
        if (grid_.is_active(i, j, k)) {
            sink.matrix(dir, row, grid_.index(i, j, k), weight, drift);
        } else {
            sink.source(dir, row, weight * boundary_value(i, j, k), drift);
        }
    }

    template <typename Sink>
    void emit_point(std::size_t i, std::size_t j, std::size_t k, Sink& sink) const {
        const std::size_t row = grid_.index(i, j, k);
        const double s = s_[i];
        const double v = v_[j];
        const double r = r_[k];
        const std::size_t m1 = grid_.m1();
        const std::size_t m2 = grid_.m2();
        const std::size_t m3 = grid_.m3();

        auto along_s = [&](const StencilCoeffs& st, double coef, int dir) {
            for (int q = 0; q < 3; ++q) {
                contribute(sink, dir, row, i + st.offsets[q], j, k, coef * st.weights[q], false);
            }
        };
        auto along_v = [&](const StencilCoeffs& st, double coef) {
            for (int q = 0; q < 3; ++q) {
                contribute(sink, kV, row, i, j + st.offsets[q], k, coef * st.weights[q], false);
            }
        };
        auto along_r = [&](const StencilCoeffs& st, double coef, bool drift) {
            for (int q = 0; q < 3; ++q) {
                contribute(sink, kR, row, i, j, k + st.offsets[q], coef * st.weights[q], drift);
            }
        };

        const double reaction = -r / 3.0;

        // s-direction
        {
            const double diff = 0.5 * s * s * v;
            const double adv = r * s;
            if (!barrier_ && i == m1) {
                // du/ds = 1: virtual point s_m1 + h with u = u_{m1-1} + 2h.
                const double h = s_.width(m1);
                contribute(sink, kS, row, i - 1, j, k, diff * 2.0 / (h * h), false);
                contribute(sink, kS, row, i, j, k, -diff * 2.0 / (h * h), false);
                if (diff != 0.0) {
                    sink.source(kS, row, diff * 2.0 / h, false);
                }
                if (adv != 0.0) {
                    sink.source(kS, row, adv, false);
                }
            } else {
                along_s(coeff_second(s_.width(i), s_.width(i + 1)), diff, kS);
                StencilCoeffs first = coeff_central(s_.width(i), s_.width(i + 1));
                if (barrier_) {
                    // Upwind in s; fall back to central where the one-sided
                    // stencil would leave [s_0, s_m1].
                    if (r < 0.0 && i >= 2) {
                        first = coeff_backward(s_.width(i - 1), s_.width(i));
                    } else if (r >= 0.0 && i + 2 <= m1) {
                        first = coeff_forward(s_.width(i + 1), s_.width(i + 2));
                    }
                }
                along_s(first, adv, kS);
            }
            contribute(sink, kS, row, i, j, k, reaction, false);
        }

        // v-direction
        {
            const double diff = 0.5 * p_.sigma1 * p_.sigma1 * v;
            const double adv = p_.kappa * (p_.eta - v);
            if (j == 0) {
                // v = 0 inserted into the PDE: only the drift kappa*eta remains.
                along_v(coeff_forward(v_.width(1), v_.width(2)), adv);
            } else if (barrier_ && j == m2) {
                // du/dv = 0: virtual point with u = u_{m2-1}.
                const double h = v_.width(m2);
                contribute(sink, kV, row, i, j - 1, k, diff * 2.0 / (h * h), false);
                contribute(sink, kV, row, i, j, k, -diff * 2.0 / (h * h), false);
            } else {
                along_v(coeff_second(v_.width(j), v_.width(j + 1)), diff);
                if (v > p_.eta && j >= 2) {
                    along_v(coeff_backward(v_.width(j - 1), v_.width(j)), adv);
                } else {
                    along_v(coeff_central(v_.width(j), v_.width(j + 1)), adv);
                }
            }
            contribute(sink, kV, row, i, j, k, reaction, false);
        }

        // r-direction
        {
            const double diff = 0.5 * p_.sigma2 * p_.sigma2;
            if (k == 0 || k == m3) {
                // du/dr = 0: virtual point mirrors the inner neighbour.
                const std::size_t kn = k == 0 ? 1 : m3 - 1;
                const double h = k == 0 ? r_.width(1) : r_.width(m3);
                contribute(sink, kR, row, i, j, kn, diff * 2.0 / (h * h), false);
                contribute(sink, kR, row, i, j, k, -diff * 2.0 / (h * h), false);
            } else {
                along_r(coeff_second(r_.width(k), r_.width(k + 1)), diff, false);
                const StencilCoeffs first = coeff_central(r_.width(k), r_.width(k + 1));
                along_r(first, -p_.a * r, false);
                along_r(first, p_.a, true);
            }
            contribute(sink, kR, row, i, j, k, reaction, false);
        }

        // Mixed derivatives. They vanish at v = 0 and are dropped on Neumann
        // boundaries in the boundary-normal direction.
        if (j == 0) {
            return;
        }
        const bool neumann_s = !barrier_ && i == m1;
        const bool neumann_v = barrier_ && j == m2;
        const bool neumann_r = k == 0 || k == m3;
        const double sqrt_v = std::sqrt(v);

        auto product = [&](int dir_a, const StencilCoeffs& sa, int dir_b, const StencilCoeffs& sb,
                           double coef) {
            if (coef == 0.0) {
                return;
            }
            for (int qa = 0; qa < 3; ++qa) {
                for (int qb = 0; qb < 3; ++qb) {
                    std::array<std::size_t, 3> at{i, j, k};
                    at[dir_a - 1] += sa.offsets[qa];
                    at[dir_b - 1] += sb.offsets[qb];
                    contribute(sink, kMixed, row, at[0], at[1], at[2],
                               coef * sa.weights[qa] * sb.weights[qb], false);
                }
            }
        };

        if (neumann_s && neumann_v) {
            return;
        }
        const bool have_s = !neumann_s;
        const bool have_v = !neumann_v;
        const bool have_r = !neumann_r;
        StencilCoeffs cs{}, cv{}, cr{};
        if (have_s) cs = coeff_central(s_.width(i), s_.width(i + 1));
        if (have_v) cv = coeff_central(v_.width(j), v_.width(j + 1));
        if (have_r) cr = coeff_central(r_.width(k), r_.width(k + 1));

        if (have_s && have_v) {
            product(kS, cs, kV, cv, p_.rho12 * p_.sigma1 * s * v);
        }
        if (have_s && have_r) {
            product(kS, cs, kR, cr, p_.rho13 * p_.sigma2 * s * sqrt_v);
        }
        if (have_v && have_r) {
            product(kV, cv, kR, cr, p_.rho23 * p_.sigma1 * p_.sigma2 * sqrt_v);
        }
    }

    const HHWParams& p_;
    const Grid3D& grid_;
    const Mesh1D& s_;
    const Mesh1D& v_;
    const Mesh1D& r_;
    bool barrier_;
};

// Routes terms into the split operator.
class SplitSink {
public:
    SplitSink(SplitOperator& op, const Grid3D& grid) : op_(op), grid_(grid) {}

    void matrix(int dir, std::size_t row, std::size_t col, double w, bool drift) {
        if (dir == kMixed) {
            op_.a0.add(row, col, w);
            return;
        }
        const GridIndex a = grid_.unindex(row);
        const GridIndex b = grid_.unindex(col);
        const std::size_t ns = grid_.n_s();
        const std::size_t nv = grid_.n_v();
        const std::size_t ii = a.i - grid_.i_begin();
        const std::size_t jj = a.j - grid_.j_begin();
        const std::size_t kk = a.k - grid_.k_begin();
        switch (dir) {
            case kS:
                op_.a1.line(jj + nv * kk).add(ii, b.i - grid_.i_begin(), w);
                break;
            case kV:
                op_.a2.line(ii + ns * kk).add(jj, b.j - grid_.j_begin(), w);
                break;
            case kR: {
                LineOperator& target = drift ? op_.a3_drift : op_.a3_static;
                target.line(ii + ns * jj).add(kk, b.k - grid_.k_begin(), w);
                break;
            }
            default:
                throw std::logic_error("SplitSink: bad direction");
        }
    }

    void source(int dir, std::size_t row, double value, bool drift) {
        switch (dir) {
            case kMixed: op_.g0[row] += value; break;
            case kS: op_.g1[row] += value; break;
            case kV: op_.g2[row] += value; break;
            case kR: (drift ? op_.g3_drift : op_.g3_static)[row] += value; break;
            default: throw std::logic_error("SplitSink: bad direction");
        }
    }

private:
    SplitOperator& op_;
    const Grid3D& grid_;
};

// Accumulates A(t) and g(t) directly.
class UnsplitSink {
public:
    UnsplitSink(std::size_t n, double drift_weight)
        : a_(n), g_(n, 0.0), weight_(drift_weight) {}

    void matrix(int, std::size_t row, std::size_t col, double w, bool drift) {
        a_.add(row, col, drift ? weight_ * w : w);
    }
    void source(int, std::size_t row, double value, bool drift) {
        g_[row] += drift ? weight_ * value : value;
    }

    SparseOperator& matrix_out() { return a_; }
    std::vector<double>& source_out() { return g_; }

private:
    SparseOperator a_;
    std::vector<double> g_;
    double weight_;
};

void check_mode(const OptionSpec& option, const Grid3D& grid) {
    const GridMode expected = option.is_barrier() ? GridMode::Barrier : GridMode::Vanilla;
    if (grid.mode() != expected) {
        throw std::invalid_argument("assemble: grid mode does not match the option kind");
    }
    if (grid.m2() < 2) {
        throw std::invalid_argument("assemble: need m2 >= 2 for the v = 0 forward stencil");
    }
    if (option.is_barrier() && std::abs(grid.s().back() - option.barrier) >
                                   1e-12 * option.barrier) {
        throw std::invalid_argument("assemble: barrier grid must end at s = B");
    }
}

}  // namespace

void SplitOperator::apply_a3_add(double t, std::span<const double> x, std::span<double> y,
                                 double alpha) const {
    a3_static.apply_add(x, y, alpha);
    const double w = drift_weight ? drift_weight(t) : 0.0;
    if (w != 0.0) {
        a3_drift.apply_add(x, y, alpha * w);
    }
}

void SplitOperator::apply_full(double t, std::span<const double> x, std::span<double> y) const {
    std::fill(y.begin(), y.end(), 0.0);
    a0.apply_add(x, y);
    a1.apply_add(x, y);
    a2.apply_add(x, y);
    apply_a3_add(t, x, y);
}

std::vector<double> SplitOperator::g3(double t) const {
    const double w = drift_weight ? drift_weight(t) : 0.0;
    std::vector<double> out(g3_static);
    for (std::size_t l = 0; l < out.size(); ++l) {
        out[l] += w * g3_drift[l];
    }
    return out;
}

std::vector<double> SplitOperator::g(double t) const {
    std::vector<double> out = g3(t);
    for (std::size_t l = 0; l < out.size(); ++l) {
        out[l] += g0[l] + g1[l] + g2[l];
    }
    return out;
}

std::vector<double> initial_vector(const OptionSpec& option, const Grid3D& grid) {
    std::vector<double> u(grid.size());
    for (std::size_t l = 0; l < u.size(); ++l) {
        const GridIndex g = grid.unindex(l);
        u[l] = std::max(0.0, grid.s()[g.i] - option.strike);
    }
    return u;
}

SemidiscreteSystem assemble(const HHWParams& params, const OptionSpec& option,
                            const Grid3D& grid) {
    option.validate();
    check_mode(option, grid);

    const std::size_t n = grid.size();
    const std::size_t ns = grid.n_s();
    const std::size_t nv = grid.n_v();
    const std::size_t nr = grid.n_r();

    SplitOperator op;
    op.dimension = n;
    op.a0 = SparseOperator(n);
    // Lines in s are contiguous; v-lines stride ns; r-lines stride ns*nv.
    op.a1 = LineOperator(ns, 1, nv, ns, nr, ns * nv, 2, 2);
    op.a2 = LineOperator(nv, ns, ns, 1, nr, ns * nv, 2, 2);
    op.a3_static = LineOperator(nr, ns * nv, ns, 1, nv, ns, 2, 2);
    op.a3_drift = op.a3_static;
    op.g0.assign(n, 0.0);
    op.g1.assign(n, 0.0);
    op.g2.assign(n, 0.0);
    op.g3_static.assign(n, 0.0);
    op.g3_drift.assign(n, 0.0);
    const double maturity = option.maturity;
    op.drift_weight = [params, maturity](double t) { return mean_reversion(params, maturity - t); };

    StencilWalker walker(params, option, grid);
    SplitSink sink(op, grid);
    walker.walk(sink);
    op.a0.finalize();

    return SemidiscreteSystem{std::move(op), initial_vector(option, grid), grid, option, params};
}

namespace {
UnsplitSink walk_unsplit(const SemidiscreteSystem& system, double t) {
    const double w = mean_reversion(system.params, system.option.maturity - t);
    UnsplitSink sink(system.grid.size(), w);
    StencilWalker walker(system.params, system.option, system.grid);
    walker.walk(sink);
    return sink;
}
}  // namespace

SparseOperator assemble_unsplit(const SemidiscreteSystem& system, double t) {
    UnsplitSink sink = walk_unsplit(system, t);
    SparseOperator a = std::move(sink.matrix_out());
    a.finalize();
    return a;
}

std::vector<double> unsplit_source(const SemidiscreteSystem& system, double t) {
    return std::move(walk_unsplit(system, t).source_out());
}

}  // namespace hhw
