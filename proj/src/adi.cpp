#include "hhw/adi.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hhw {

StepperConfig StepperConfig::with_defaults(SchemeId scheme, const HHWParams& params,
                                           double maturity, std::size_t steps, bool damping) {
    if (steps == 0) {
        throw std::invalid_argument("StepperConfig: steps must be >= 1");
    }
    StepperConfig c;
    c.scheme = scheme;
    c.theta = theta_default(scheme, gamma_measure(params));
    c.steps = steps;
    c.dt = maturity / static_cast<double>(steps);
    c.damping = damping;
    return c;
}

void StepperConfig::validate(double maturity) const {
    if (steps == 0) {
        throw std::invalid_argument("StepperConfig: steps must be >= 1");
    }
    if (!(theta > 0.0) || !(dt > 0.0)) {
        throw std::invalid_argument("StepperConfig: theta and dt must be positive");
    }
    if (std::abs(dt * static_cast<double>(steps) - maturity) > 1e-12 * maturity) {
        throw std::invalid_argument("StepperConfig: dt * steps must equal the maturity");
    }
}

StepperState::StepperState(const SplitOperator& op, std::vector<double> u0, double theta,
                           double dt, double t0)
    : op_(&op), u_(std::move(u0)), theta_(theta), dt_(dt), t_(t0) {
    if (u_.size() != op.dimension) {
        throw std::invalid_argument("StepperState: initial vector has the wrong size");
    }
    if (!(theta > 0.0) || !(dt > 0.0)) {
        throw std::invalid_argument("StepperState: theta and dt must be positive");
    }
    const double c = theta_ * dt_;
    lu1_.factor(op.a1, c);
    ++counts_.s;
    lu2_.factor(op.a2, c);
    ++counts_.v;

    const std::size_t n = op.dimension;
    for (auto* buf : {&au1_, &au2_, &au3_, &y0_, &y_, &yt_, &work_}) {
        buf->assign(n, 0.0);
    }
}

void StepperState::check_times(double t_prev, double t_next) const {
    const double scale = std::max({1.0, std::abs(t_prev), std::abs(t_next)});
    if (std::abs((t_next - t_prev) - dt_) > 1e-12 * scale) {
        throw std::invalid_argument("StepperState: t_next - t_prev must equal dt");
    }
}

void StepperState::ensure_a3_factor(double t_next) {
    if (lu3_valid_ && lu3_time_ == t_next) {
        return;
    }
    const double w = op_->drift_weight ? op_->drift_weight(t_next) : 0.0;
    lu3_.factor(op_->a3_static, op_->a3_drift, w, theta_ * dt_);
    lu3_time_ = t_next;
    lu3_valid_ = true;
    ++counts_.r;
}

namespace {

double weight_at(const SplitOperator& op, double t) {
    return op.drift_weight ? op.drift_weight(t) : 0.0;
}

void fill_zero(std::vector<double>& v) { std::fill(v.begin(), v.end(), 0.0); }

}  // namespace

const std::vector<double>& StepperState::advance(SchemeId scheme, double t_prev, double t_next) {
    check_times(t_prev, t_next);
    const SplitOperator& op = *op_;
    const std::size_t n = op.dimension;
    const double dt = dt_;
    const double c = theta_ * dt;
    const double dw = weight_at(op, t_next) - weight_at(op, t_prev);

    // A_j U_{n-1}, with A3 at t_{n-1}.
    fill_zero(au1_);
    fill_zero(au2_);
    fill_zero(au3_);
    op.a1.apply_add(u_, au1_);
    op.a2.apply_add(u_, au2_);
    op.apply_a3_add(t_prev, u_, au3_);

    // Y0 = U + dt (A(t_{n-1}) U + g(t_{n-1}))
    {
        const std::vector<double> g_prev = op.g(t_prev);
        std::copy(g_prev.begin(), g_prev.end(), y0_.begin());
        op.a0.apply_add(u_, y0_);
        for (std::size_t l = 0; l < n; ++l) {
            y0_[l] = u_[l] + dt * (y0_[l] + au1_[l] + au2_[l] + au3_[l]);
        }
    }

    ensure_a3_factor(t_next);

    // Implicit sweep: (I - c A_j) Y_j = Y_{j-1} - c b_j, plus c Δg in the r-stage.
    auto sweep = [&](std::vector<double>& y, const std::vector<double>& b1,
                     const std::vector<double>& b2, const std::vector<double>& b3,
                     bool with_dg) {
        for (std::size_t l = 0; l < n; ++l) y[l] -= c * b1[l];
        lu1_.solve_in_place(y);
        for (std::size_t l = 0; l < n; ++l) y[l] -= c * b2[l];
        lu2_.solve_in_place(y);
        for (std::size_t l = 0; l < n; ++l) y[l] -= c * b3[l];
        if (with_dg && dw != 0.0) {
            for (std::size_t l = 0; l < n; ++l) y[l] += c * dw * op.g3_drift[l];
        }
        lu3_.solve_in_place(y);
    };

    y_ = y0_;
    sweep(y_, au1_, au2_, au3_, true);

    if (scheme == SchemeId::Do) {
        u_.swap(y_);
    } else {
        // work = Y3 - U_{n-1}
        for (std::size_t l = 0; l < n; ++l) work_[l] = y_[l] - u_[l];
        yt_ = y0_;

        // A(t_n) Y3 - A(t_{n-1}) U + Δg = A(t_n)(Y3 - U) + Δw A3_drift U + Δg
        auto add_full_increment = [&](double alpha) {
            op.a0.apply_add(work_, yt_, alpha);
            op.a1.apply_add(work_, yt_, alpha);
            op.a2.apply_add(work_, yt_, alpha);
            op.apply_a3_add(t_next, work_, yt_, alpha);
            if (dw != 0.0) {
                op.a3_drift.apply_add(u_, yt_, alpha * dw);
                for (std::size_t l = 0; l < n; ++l) yt_[l] += alpha * dw * op.g3_drift[l];
            }
        };

        switch (scheme) {
            case SchemeId::CS:
                op.a0.apply_add(work_, yt_, 0.5 * dt);
                sweep(yt_, au1_, au2_, au3_, true);
                break;
            case SchemeId::MCS: {
                op.a0.apply_add(work_, yt_, c);
                const double alpha = (0.5 - theta_) * dt;
                if (alpha != 0.0) {
                    add_full_increment(alpha);
                }
                sweep(yt_, au1_, au2_, au3_, true);
                break;
            }
            case SchemeId::HV: {
                add_full_increment(0.5 * dt);
                // Second sweep relaxes towards Y3: b_j = A_j Y3 with A3 at t_n.
                fill_zero(au1_);
                fill_zero(au2_);
                fill_zero(au3_);
                op.a1.apply_add(y_, au1_);
                op.a2.apply_add(y_, au2_);
                op.apply_a3_add(t_next, y_, au3_);
                sweep(yt_, au1_, au2_, au3_, false);
                break;
            }
            case SchemeId::Do:
                break;
        }
        u_.swap(yt_);
    }
    t_ = t_next;
    ++n_;
    return u_;
}

const std::vector<double>& step_do(StepperState& state, double t_prev, double t_next) {
    return state.advance(SchemeId::Do, t_prev, t_next);
}
const std::vector<double>& step_cs(StepperState& state, double t_prev, double t_next) {
    return state.advance(SchemeId::CS, t_prev, t_next);
}
const std::vector<double>& step_mcs(StepperState& state, double t_prev, double t_next) {
    return state.advance(SchemeId::MCS, t_prev, t_next);
}
const std::vector<double>& step_hv(StepperState& state, double t_prev, double t_next) {
    return state.advance(SchemeId::HV, t_prev, t_next);
}

std::vector<double> integrate(const SplitOperator& op, std::span<const double> u0,
                              const StepperConfig& config, IntegrationStats* stats) {
    config.validate(config.dt * static_cast<double>(config.steps));
    std::vector<double> u(u0.begin(), u0.end());
    std::size_t first = 1;
    if (stats != nullptr) {
        *stats = IntegrationStats{};
    }
    if (config.damping) {
        const double half = 0.5 * config.dt;
        StepperState damp(op, std::move(u), 1.0, half, 0.0);
        damp.advance(SchemeId::Do, 0.0, half);
        damp.advance(SchemeId::Do, half, config.dt);
        u = damp.current();
        first = 2;
        if (stats != nullptr) {
            stats->damping = damp.factor_counts();
            stats->steps += 2;
        }
    }
    if (first > config.steps) {
        return u;
    }
    StepperState state(op, std::move(u), config.theta, config.dt,
                       static_cast<double>(first - 1) * config.dt);
    for (std::size_t step = first; step <= config.steps; ++step) {
        const double t_prev = static_cast<double>(step - 1) * config.dt;
        const double t_next = static_cast<double>(step) * config.dt;
        state.advance(config.scheme, t_prev, t_next);
    }
    if (stats != nullptr) {
        stats->main = state.factor_counts();
        stats->steps += state.step_index();
    }
    return state.current();
}

std::vector<double> integrate(const SemidiscreteSystem& system, const StepperConfig& config,
                              IntegrationStats* stats) {
    config.validate(system.option.maturity);
    return integrate(system.split, system.u0, config, stats);
}

}  // namespace hhw
