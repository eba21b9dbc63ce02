#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hhw/discretize.hpp"
#include "hhw/linalg.hpp"
#include "hhw/model.hpp"

namespace hhw {

struct StepperConfig {
    SchemeId scheme = SchemeId::MCS;
    double theta = 0.5;
    double dt = 0.0;
    std::size_t steps = 1;
    /// Replace the first step by two Douglas substeps of dt/2 with theta = 1.
    bool damping = false;

    /// Config with dt = T / steps and the default theta for the scheme.
    static StepperConfig with_defaults(SchemeId scheme, const HHWParams& params, double maturity,
                                       std::size_t steps, bool damping = false);
    void validate(double maturity) const;
};

/// Number of banded line-factorization passes per direction.
struct FactorCounts {
    std::size_t s = 0;
    std::size_t v = 0;
    std::size_t r = 0;
};

/// Time-stepping state for one (theta, dt) pair.
///
/// The factors of I - theta dt A1 and I - theta dt A2 are computed once on
/// construction; I - theta dt A3(t_n) is refactored whenever t_n changes.
class StepperState {
public:
    StepperState(const SplitOperator& op, std::vector<double> u0, double theta, double dt,
                 double t0 = 0.0);

    [[nodiscard]] const std::vector<double>& current() const { return u_; }
    [[nodiscard]] std::size_t step_index() const { return n_; }
    [[nodiscard]] double time() const { return t_; }
    [[nodiscard]] double theta() const { return theta_; }
    [[nodiscard]] double dt() const { return dt_; }
    [[nodiscard]] const FactorCounts& factor_counts() const { return counts_; }
    [[nodiscard]] const SplitOperator& op() const { return *op_; }

    /// Advances U_{n-1} at t_prev to U_n at t_next = t_prev + dt.
    const std::vector<double>& advance(SchemeId scheme, double t_prev, double t_next);

private:
    void check_times(double t_prev, double t_next) const;
    void ensure_a3_factor(double t_next);

    const SplitOperator* op_;
    std::vector<double> u_;
    double theta_;
    double dt_;
    double t_;
    std::size_t n_ = 0;

    LineFactors lu1_;
    LineFactors lu2_;
    LineFactors lu3_;
    double lu3_time_ = 0.0;
    bool lu3_valid_ = false;
    FactorCounts counts_;

    // A_j U_{n-1} for j = 1..3, reused as A_j Y3 in the HV corrector.
    std::vector<double> au1_, au2_, au3_;
    std::vector<double> y0_, y_, yt_, work_;
};

const std::vector<double>& step_do(StepperState& state, double t_prev, double t_next);
const std::vector<double>& step_cs(StepperState& state, double t_prev, double t_next);
const std::vector<double>& step_mcs(StepperState& state, double t_prev, double t_next);
const std::vector<double>& step_hv(StepperState& state, double t_prev, double t_next);

struct IntegrationStats {
    FactorCounts main;
    FactorCounts damping;
    /// Stepper invocations, counting each damping substep.
    std::size_t steps = 0;
};

/// U_N at t = T = steps * dt.
std::vector<double> integrate(const SplitOperator& op, std::span<const double> u0,
                              const StepperConfig& config, IntegrationStats* stats = nullptr);
std::vector<double> integrate(const SemidiscreteSystem& system, const StepperConfig& config,
                              IntegrationStats* stats = nullptr);

}  // namespace hhw
