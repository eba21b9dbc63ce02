#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>

#include "hhw/grid.hpp"

namespace hhw {
namespace {

using hp = boost::multiprecision::cpp_bin_float_50;

GridSpec spec_with(std::size_t m1, std::size_t m2, std::size_t m3) {
    GridSpec s = default_spec(100.0, 1.0, 0.05, 10, false);
    s.m1 = m1;
    s.m2 = m2;
    s.m3 = m3;
    return s;
}

// Three-branch s transform at 50 significant digits.
std::vector<double> s_mesh_hp(const GridSpec& g) {
    const hp d1 = g.d1, sl = g.s_left, sr = g.s_right, smax = g.s_max;
    const hp xi_min = boost::multiprecision::asinh(-sl / d1);
    const hp xi_int = (sr - sl) / d1;
    const hp xi_max = xi_int + boost::multiprecision::asinh((smax - sr) / d1);
    const hp dxi = (xi_max - xi_min) / g.m1;
    std::vector<double> out;
    for (std::size_t i = 0; i <= g.m1; ++i) {
        const hp xi = xi_min + dxi * i;
        hp s;
        if (xi < 0) {
            s = sl + d1 * boost::multiprecision::sinh(xi);
        } else if (xi <= xi_int) {
            s = sl + d1 * xi;
        } else {
            s = sr + d1 * boost::multiprecision::sinh(xi - xi_int);
        }
        out.push_back(static_cast<double>(s));
    }
    out.front() = 0.0;
    out.back() = g.s_max;
    return out;
}

TEST(DefaultSpec, DefaultParameters) {
    const GridSpec s = default_spec(100.0, 1.0, 0.05, 50, false);
    EXPECT_EQ(s.m1, 100u);
    EXPECT_EQ(s.m2, 50u);
    EXPECT_EQ(s.m3, 50u);
    EXPECT_DOUBLE_EQ(s.s_max, 1400.0);
    EXPECT_DOUBLE_EQ(s.v_max, 10.0);
    EXPECT_DOUBLE_EQ(s.r_max, 1.0);
    EXPECT_DOUBLE_EQ(s.d1, 5.0);
    EXPECT_DOUBLE_EQ(s.d2, 0.02);
    EXPECT_DOUBLE_EQ(s.d3, 1.0 / 400.0);
    EXPECT_NEAR(s.s_left, 100.0 * std::exp(-0.25), 1e-12);
    EXPECT_DOUBLE_EQ(s.s_right, 100.0);
    EXPECT_DOUBLE_EQ(s.c, 0.05);
    EXPECT_DOUBLE_EQ(default_spec(100.0, 10.0, 0.05, 10, false).s_left, 50.0);
}

TEST(DefaultSpec, ActiveSizeAtM50) {
    const Grid3D g = build_grid(default_spec(100.0, 1.0, 0.05, 50, false), GridMode::Vanilla);
    EXPECT_EQ(g.size(), 255000u);
}

TEST(SMesh, EndpointsAndUniformZone) {
    const GridSpec spec = default_spec(100.0, 1.0, 0.05, 20, false);
    const Mesh1D s = build_s_mesh(spec);
    ASSERT_EQ(s.size(), spec.m1 + 1);
    EXPECT_EQ(s.front(), 0.0);
    EXPECT_EQ(s.back(), spec.s_max);
    const double h = spec.d1 * s_mesh_dxi(spec);
    std::size_t inside = 0;
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (s[i - 1] >= spec.s_left && s[i] <= spec.s_right) {
            EXPECT_NEAR(s.width(i), h, 1e-11 * h);
            ++inside;
        }
    }
    EXPECT_GT(inside, 5u);
}

TEST(SMesh, MatchesHighPrecisionTransform) {
    GridSpec spec = default_spec(100.0, 1.0, 0.05, 20, false);
    spec.m1 = 40;
    const Mesh1D s = build_s_mesh(spec);
    const std::vector<double> ref = s_mesh_hp(spec);
    for (std::size_t i = 0; i < s.size(); ++i) {
        EXPECT_NEAR(s[i], ref[i], 1e-12 * std::max(1.0, ref[i])) << i;
    }
}

TEST(VMesh, EndpointsAndFirstPoint) {
    const GridSpec spec = spec_with(20, 20, 20);
    const Mesh1D v = build_v_mesh(spec);
    EXPECT_EQ(v.front(), 0.0);
    EXPECT_EQ(v.back(), spec.v_max);
    const hp deta = boost::multiprecision::asinh(hp(500)) / 20;
    const double v1 = static_cast<double>(hp(0.02) * boost::multiprecision::sinh(deta));
    EXPECT_NEAR(v[1], v1, 1e-15);
    for (std::size_t j = 2; j < v.size(); ++j) {
        EXPECT_GT(v.width(j), v.width(j - 1));
    }
}

TEST(RMesh, EndpointsSymmetryAndOracle) {
    GridSpec spec = spec_with(20, 20, 20);
    spec.c = 0.0;
    const Mesh1D sym = build_r_mesh(spec);
    EXPECT_EQ(sym.front(), -1.0);
    EXPECT_EQ(sym.back(), 1.0);
    for (std::size_t k = 0; k < sym.size(); ++k) {
        EXPECT_NEAR(sym[k], -sym[sym.size() - 1 - k], 1e-14);
    }

    spec.c = 0.1;
    const Mesh1D r = build_r_mesh(spec);
    const hp d3 = hp(1) / 400, c = hp(1) / 10;
    const hp z0 = boost::multiprecision::asinh((-1 - c) / d3);
    const hp dz = (boost::multiprecision::asinh((1 - c) / d3) - z0) / 20;
    for (std::size_t k = 1; k + 1 < r.size(); ++k) {
        const double ref = static_cast<double>(c + d3 * boost::multiprecision::sinh(z0 + dz * k));
        EXPECT_NEAR(r[k], ref, 1e-14) << k;
    }
    // Narrowest cell sits next to the concentration point.
    std::size_t narrow = 1;
    for (std::size_t k = 2; k < r.size(); ++k) {
        if (r.width(k) < r.width(narrow)) narrow = k;
    }
    EXPECT_LE(std::min(std::abs(r[narrow] - 0.1), std::abs(r[narrow - 1] - 0.1)), r.width(narrow));
}

TEST(UniformMeshes, Equidistant) {
    GridSpec spec = default_spec(100.0, 1.0, 0.05, 1, true);
    spec.m1 = 2;
    const Grid3D g = build_uniform_meshes(spec);
    EXPECT_EQ(g.s().points(), (std::vector<double>{0.0, 700.0, 1400.0}));
    const GridSpec big = default_spec(100.0, 1.0, 0.05, 10, true);
    const Grid3D gb = build_uniform_meshes(big);
    for (std::size_t i = 2; i < gb.s().size(); ++i) {
        EXPECT_NEAR(gb.s().width(i), gb.s().width(1), 1e-12);
    }
    EXPECT_EQ(smoothness_report(gb.v(), gb.v().width(1)).c2, 0.0);
    EXPECT_EQ(gb.size(), build_grid(default_spec(100.0, 1.0, 0.05, 10, false),
                                    GridMode::Vanilla).size());
}

TEST(Grid3D, ActiveSetsAndRoundTrip) {
    const GridSpec spec = spec_with(8, 5, 4);
    const Grid3D van = build_grid(spec, GridMode::Vanilla);
    EXPECT_EQ(van.size(), 8u * 5u * 5u);
    const Grid3D bar = build_grid(spec, GridMode::Barrier);
    EXPECT_EQ(bar.size(), 7u * 6u * 5u);
    for (const Grid3D* g : {&van, &bar}) {
        for (std::size_t l = 0; l < g->size(); ++l) {
            const GridIndex p = g->unindex(l);
            EXPECT_TRUE(g->is_active(p.i, p.j, p.k));
            EXPECT_EQ(g->index(p), l);
        }
    }
    EXPECT_FALSE(van.is_active(0, 0, 0));
    EXPECT_FALSE(van.is_active(1, 5, 0));
    EXPECT_TRUE(van.is_active(8, 0, 4));
    EXPECT_FALSE(bar.is_active(8, 0, 0));
    EXPECT_TRUE(bar.is_active(7, 5, 0));
    // i runs fastest, then j, then k.
    EXPECT_EQ(van.index(2, 0, 0), van.index(1, 0, 0) + 1);
    EXPECT_EQ(van.index(1, 1, 0), van.index(1, 0, 0) + van.n_s());
    EXPECT_EQ(van.index(1, 0, 1), van.index(1, 0, 0) + van.n_s() * van.n_v());
}

TEST(Smoothness, BoundedUnderRefinement) {
    double c2_prev = 0.0;
    for (std::size_t m1 : {20u, 40u, 80u}) {
        GridSpec spec = spec_with(m1, m1, m1);
        const SmoothnessReport rs = smoothness_report(build_s_mesh(spec), s_mesh_dxi(spec));
        const SmoothnessReport rv = smoothness_report(build_v_mesh(spec), v_mesh_deta(spec));
        EXPECT_GT(rv.c0, 0.0);
        EXPECT_GT(rs.c0, 0.0);
        if (c2_prev > 0.0) {
            EXPECT_LT(rs.c2, 1.5 * c2_prev);
        }
        c2_prev = rs.c2;
    }
}

TEST(Refinement, MaxWidthRatioTendsToTwo) {
    auto max_width = [](const Mesh1D& m) {
        double w = 0.0;
        for (std::size_t i = 1; i < m.size(); ++i) w = std::max(w, m.width(i));
        return w;
    };
    // Stretched ends give 1 + exp(-dxi/2) per halving, which approaches 2.
    for (auto builder : {build_s_mesh, build_v_mesh, build_r_mesh}) {
        const double w20 = max_width(builder(spec_with(20, 20, 20)));
        const double w40 = max_width(builder(spec_with(40, 40, 40)));
        const double w80 = max_width(builder(spec_with(80, 80, 80)));
        EXPECT_GT(w20 / w40, 1.5);
        EXPECT_LE(w20 / w40, 2.0 + 1e-12);
        EXPECT_GT(w40 / w80, w20 / w40 - 1e-12);
        EXPECT_LE(w40 / w80, 2.0 + 1e-12);
    }
}

TEST(Mesh1D, RejectsNonIncreasing) {
    EXPECT_THROW(Mesh1D({0.0, 1.0, 1.0}), std::invalid_argument);
    EXPECT_THROW(Mesh1D({0.0, 2.0, 1.0}), std::invalid_argument);
}

TEST(SpecForOption, BarrierSetsSmax) {
    OptionSpec o;
    o.kind = OptionKind::UpAndOutCall;
    o.barrier = 120.0;
    const GridSpec s = spec_for_option(o, 0.05, 10, false);
    EXPECT_DOUBLE_EQ(s.s_max, 120.0);
    const Mesh1D sm = build_s_mesh(s);
    EXPECT_EQ(sm.back(), 120.0);
}

}  // namespace
}  // namespace hhw
