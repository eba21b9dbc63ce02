#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "hhw/analytic.hpp"
#include "hhw/harness.hpp"
#include "oracles.hpp"

namespace hhw {
namespace {

TEST(FitOrder, ExactPowerLaws) {
    const std::vector<double> h{1.0, 0.5, 0.25};
    EXPECT_NEAR(fit_order(h, std::vector<double>{1.0, 0.25, 0.0625}), 2.0, 1e-14);
    EXPECT_NEAR(fit_order(h, std::vector<double>{1.0, 0.5, 0.25}), 1.0, 1e-14);
}

TEST(FitOrder, NoisySecondOrderData) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> noise(-0.05, 0.05);
    for (int trial = 0; trial < 50; ++trial) {
        ConvergenceTable t;
        for (int k = 0; k < 8; ++k) {
            const double h = std::pow(0.5, k);
            t.add(h, 3.0 * h * h * (1.0 + noise(rng)));
        }
        EXPECT_NEAR(fit_order(t), 2.0, 0.15);
        EXPECT_GE(t.fit_residual, 0.0);
    }
}

TEST(FitOrder, RejectsBadInput) {
    const std::vector<double> h{1.0, 0.5, 0.25};
    EXPECT_THROW(fit_order(h, std::vector<double>{1.0, 0.0, 0.1}), std::invalid_argument);
    EXPECT_THROW(fit_order(h, std::vector<double>{1.0, -0.5, 0.1}), std::invalid_argument);
    EXPECT_THROW(fit_order(std::vector<double>{1.0, 0.5}, std::vector<double>{1.0, 0.5}),
                 std::invalid_argument);
}

TEST(ConvergenceTable, SortedAndMonotone) {
    ConvergenceTable t;
    t.add(0.1, 1e-2);
    t.add(0.025, 1e-3);
    t.add(0.05, 5e-3);
    ASSERT_EQ(t.rows.size(), 3u);
    EXPECT_EQ(t.rows[0].resolution, 0.025);
    EXPECT_EQ(t.rows[2].resolution, 0.1);
    EXPECT_TRUE(monotone_nonincreasing(t));
    t.add(0.0125, 2e-3);
    EXPECT_FALSE(monotone_nonincreasing(t));
    EXPECT_FALSE(monotone_nonincreasing(t, 0.5));
    EXPECT_TRUE(monotone_nonincreasing(t, 1.0));
}

TEST(RegionOfInterest, StrictMembership) {
    const RegionOfInterest roi = RegionOfInterest::for_strike(100.0);
    EXPECT_TRUE(roi.contains(100.0, 0.5, 0.1));
    EXPECT_FALSE(roi.contains(50.0, 0.5, 0.1));
    EXPECT_FALSE(roi.contains(150.0, 0.5, 0.1));
    EXPECT_FALSE(roi.contains(100.0, 0.0, 0.1));
    EXPECT_FALSE(roi.contains(100.0, 1.0, 0.1));
    EXPECT_FALSE(roi.contains(100.0, 0.5, 0.0));
    EXPECT_FALSE(roi.contains(100.0, 0.5, 0.25));
    EXPECT_DOUBLE_EQ(RegionOfInterest::for_strike(40.0).s_hi, 60.0);
}

TEST(RegionOfInterest, PointsInsideAndOrdered) {
    const auto [p, o] = case_params(CaseId::A);
    const SemidiscreteSystem sys = build_system(p, o, 10);
    const RegionOfInterest roi = RegionOfInterest::for_strike(o.strike);
    const std::vector<std::size_t> pts = region_points(sys.grid, roi);
    ASSERT_FALSE(pts.empty());
    std::size_t count = 0;
    for (std::size_t l = 0; l < sys.grid.size(); ++l) {
        const GridIndex g = sys.grid.unindex(l);
        if (roi.contains(sys.grid.s()[g.i], sys.grid.v()[g.j], sys.grid.r()[g.k])) ++count;
    }
    EXPECT_EQ(pts.size(), count);
    EXPECT_TRUE(std::is_sorted(pts.begin(), pts.end()));
}

TEST(GridValue, BoundaryAndInterior) {
    const auto [p, o] = case_params(CaseId::A);
    const SemidiscreteSystem sys = build_system(p, o, 8);
    const Grid3D& g = sys.grid;
    EXPECT_EQ(grid_value(sys, sys.u0, 0, 3, 2), 0.0);
    EXPECT_EQ(grid_value(sys, sys.u0, 5, g.m2(), 2), g.s()[5]);
    EXPECT_EQ(grid_value(sys, sys.u0, 5, 1, 2), sys.u0[g.index(5, 1, 2)]);

    OptionSpec uoc = o;
    uoc.kind = OptionKind::UpAndOutCall;
    uoc.barrier = 120.0;
    const SemidiscreteSystem bar = build_system(p, uoc, 8);
    EXPECT_EQ(grid_value(bar, bar.u0, bar.grid.m1(), 3, 2), 0.0);
}

TEST(ReferenceCache, ComputesOncePerKey) {
    ReferenceCache cache;
    int calls = 0;
    auto fn = [&] {
        ++calls;
        return std::vector<double>{1.0, 2.0};
    };
    const auto a = cache.get_or_compute("k", fn);
    const auto b = cache.get_or_compute("k", fn);
    EXPECT_EQ(calls, 1);
    EXPECT_EQ(a.get(), b.get());
    cache.get_or_compute("other", fn);
    EXPECT_EQ(cache.computations(), 2u);
    cache.clear();
    cache.get_or_compute("k", fn);
    EXPECT_EQ(calls, 3);
}

TEST(TemporalStudy, SelfComparisonIsZeroAndReferenceCached) {
    const auto [p, o] = case_params(CaseId::A);
    ReferenceCache cache;
    TemporalStudy study(p, o, 8, 40, false, &cache);
    const ErrorReport self = study.error(SchemeId::MCS, std::nullopt, 40, false);
    EXPECT_EQ(self.value, 0.0);
    EXPECT_GT(self.points, 0u);
    const ErrorReport coarse = study.error(SchemeId::Do, std::nullopt, 10, false);
    EXPECT_GT(coarse.value, 0.0);
    EXPECT_EQ(coarse.kind, ErrorKind::Temporal);
    EXPECT_DOUBLE_EQ(coarse.resolution, 0.1);
    TemporalStudy again(p, o, 8, 40, false, &cache);
    EXPECT_FALSE(again.reference().empty());
    EXPECT_EQ(cache.computations(), 1u);
}

TEST(SpatialError, DomainAndIdenticalUniformRuns) {
    const auto [p, o] = case_params(CaseId::A);
    EXPECT_THROW(spatial_error(p, o, 10, 20), AnalyticDomainError);
    const HHWParams q = p.without_cross_correlations();
    const ErrorReport a = spatial_error(q, o, 10, 20, true);
    const ErrorReport b = spatial_error(q, o, 10, 20, true);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.kind, ErrorKind::Spatial);
    EXPECT_DOUBLE_EQ(a.resolution, 10.0);
}

TEST(StepSweep, DefaultCoversTwoDecades) {
    const std::vector<std::size_t> n = default_step_sweep(1.0);
    EXPECT_EQ(n.front(), 1u);
    EXPECT_EQ(n.back(), 100u);
    EXPECT_TRUE(std::is_sorted(n.begin(), n.end()));
    EXPECT_EQ(std::adjacent_find(n.begin(), n.end()), n.end());
    EXPECT_EQ(default_step_sweep(10.0, 1, 1), (std::vector<std::size_t>{10, 100}));
}

TEST(MonteCarlo, DeterministicRatesAndZeroVolOfVolGiveBlackScholes) {
    HHWParams q;
    q.kappa = 2.0;
    q.eta = 0.04;
    q.sigma1 = 0.0;
    q.a = 1.0;
    q.c1 = 0.03;
    q.c2 = 0.0;
    q.c3 = 1.0;
    q.sigma2 = 0.0;
    OptionSpec o;
    const MonteCarloResult mc = mc_oracle(q, o, 100.0, 0.04, 0.03, 200000, 50, 11);
    const double bs = oracle::black_scholes_call(100.0, 100.0, 1.0, 0.03, 0.2);
    EXPECT_LT(std::abs(mc.estimate - bs), 3.0 * mc.standard_error);
    EXPECT_GT(mc.standard_error, 0.0);
}

TEST(MonteCarlo, SeedDeterminismAndBarrier) {
    const auto [p, o] = case_params(CaseId::A);
    const MonteCarloResult a = mc_oracle(p, o, 100.0, 0.1, 0.03, 2000, 20, 3);
    const MonteCarloResult b = mc_oracle(p, o, 100.0, 0.1, 0.03, 2000, 20, 3);
    EXPECT_EQ(a.estimate, b.estimate);
    EXPECT_EQ(a.standard_error, b.standard_error);
    OptionSpec uoc = o;
    uoc.kind = OptionKind::UpAndOutCall;
    uoc.barrier = 120.0;
    const MonteCarloResult c = mc_oracle(p, uoc, 100.0, 0.1, 0.03, 2000, 20, 3);
    EXPECT_LT(c.estimate, a.estimate);
    EXPECT_EQ(mc_oracle(p, uoc, 130.0, 0.1, 0.03, 100, 10, 3).estimate, 0.0);
}

TEST(Csv, FormatAndWidth) {
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(format_double(2.0), "2");
    EXPECT_EQ(format_double(1e-20), "9.9999999999999995e-21");
    std::ostringstream out;
    CsvWriter w(out, {"a", "b"});
    w.row({1.5, -3.0});
    EXPECT_EQ(out.str(), "a,b\n1.5,-3\n");
    EXPECT_THROW(w.row({1.0}), std::invalid_argument);
}

TEST(Experiment, NamesRoundTrip) {
    for (Experiment e : {Experiment::Spatial, Experiment::Temporal, Experiment::Price,
                         Experiment::UniformCompare, Experiment::BarrierSurface}) {
        EXPECT_EQ(parse_experiment(to_string(e)), e);
    }
    EXPECT_THROW(parse_experiment("fourier"), std::invalid_argument);
}

TEST(Experiment, TemporalCsvLayout) {
    ExperimentConfig cfg;
    cfg.experiment = Experiment::Temporal;
    cfg.m = 6;
    cfg.scheme = SchemeId::Do;
    cfg.dt_sweep = {0.5, 0.25, 0.125};
    cfg.ref_steps = 32;
    std::ostringstream out;
    const ExperimentSummary s = run_experiment(cfg, out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "dt,error");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 3);
    ASSERT_TRUE(s.fitted_order.has_value());
    EXPECT_EQ(s.experiment, "temporal");
    EXPECT_EQ(s.case_name, "A");
}

TEST(Experiment, RejectsInconsistentConfigs) {
    ExperimentConfig cfg;
    cfg.experiment = Experiment::Spatial;
    std::ostringstream out;
    EXPECT_THROW(run_experiment(cfg, out), std::invalid_argument);
    cfg.experiment = Experiment::Temporal;
    cfg.dt_sweep = {0.3};
    EXPECT_THROW(run_experiment(cfg, out), std::invalid_argument);
}

}  // namespace
}  // namespace hhw
