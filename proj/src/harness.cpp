#include "hhw/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "hhw/analytic.hpp"

namespace hhw {

RegionOfInterest RegionOfInterest::for_strike(double strike) {
    RegionOfInterest roi;
    roi.s_lo = 0.5 * strike;
    roi.s_hi = 1.5 * strike;
    return roi;
}

std::vector<std::size_t> region_points(const Grid3D& grid, const RegionOfInterest& roi) {
    std::vector<std::size_t> out;
    for (std::size_t k = grid.k_begin(); k < grid.k_end(); ++k) {
        for (std::size_t j = grid.j_begin(); j < grid.j_end(); ++j) {
            for (std::size_t i = grid.i_begin(); i < grid.i_end(); ++i) {
                if (roi.contains(grid.s()[i], grid.v()[j], grid.r()[k])) {
                    out.push_back(grid.index(i, j, k));
                }
            }
        }
    }
    return out;
}

void ConvergenceTable::add(double resolution, double error) {
    const auto pos = std::upper_bound(
        rows.begin(), rows.end(), resolution,
        [](double h, const Row& row) { return h < row.resolution; });
    rows.insert(pos, Row{resolution, error});
}

double fit_order(std::span<const double> h, std::span<const double> error, double* residual) {
    if (h.size() != error.size() || h.size() < 3) {
        throw std::invalid_argument("fit_order: need at least 3 (h, error) pairs");
    }
    const std::size_t n = h.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(error[i] > 0.0) || !(h[i] > 0.0)) {
            throw std::invalid_argument("fit_order: errors and resolutions must be positive");
        }
        mx += std::log(h[i]);
        my += std::log(error[i]);
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = std::log(h[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(error[i]) - my);
    }
    if (!(sxx > 0.0)) {
        throw std::invalid_argument("fit_order: resolutions must not all coincide");
    }
    const double slope = sxy / sxx;
    if (residual != nullptr) {
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = std::log(error[i]) - (my + slope * (std::log(h[i]) - mx));
            ss += e * e;
        }
        *residual = std::sqrt(ss / static_cast<double>(n));
    }
    return slope;
}

double fit_order(ConvergenceTable& table) {
    std::vector<double> h, e;
    for (const auto& row : table.rows) {
        h.push_back(row.resolution);
        e.push_back(row.error);
    }
    table.fitted_order = fit_order(h, e, &table.fit_residual);
    return table.fitted_order;
}

bool monotone_nonincreasing(const ConvergenceTable& table, double rel_slack) {
    for (std::size_t i = 0; i + 1 < table.rows.size(); ++i) {
        if (table.rows[i].error > table.rows[i + 1].error * (1.0 + rel_slack)) {
            return false;
        }
    }
    return true;
}

SemidiscreteSystem build_system(const HHWParams& params, const OptionSpec& option, std::size_t m,
                                bool uniform) {
    const GridSpec spec = spec_for_option(option, params.c1, m, uniform);
    const GridMode mode = option.is_barrier() ? GridMode::Barrier : GridMode::Vanilla;
    return assemble(params, option, build_grid(spec, mode));
}

double grid_value(const SemidiscreteSystem& system, std::span<const double> u, std::size_t i,
                  std::size_t j, std::size_t k) {
    const Grid3D& g = system.grid;
    if (g.is_active(i, j, k)) {
        return u[g.index(i, j, k)];
    }
    if (i == 0 || system.option.is_barrier()) {
        return 0.0;
    }
    return g.s()[i];  // v = Vmax
}

ReferenceCache::Vector ReferenceCache::get_or_compute(
    const std::string& key, const std::function<std::vector<double>()>& fn) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = store_.find(key);
    if (it != store_.end()) {
        return it->second;
    }
    auto value = std::make_shared<const std::vector<double>>(fn());
    ++computations_;
    store_.emplace(key, value);
    return value;
}

std::size_t ReferenceCache::computations() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return computations_;
}

void ReferenceCache::clear() {
    std::lock_guard<std::mutex> lock(mutex_);
    store_.clear();
    computations_ = 0;
}

ReferenceCache& ReferenceCache::global() {
    static ReferenceCache cache;
    return cache;
}

namespace {

std::string reference_key(const HHWParams& p, const OptionSpec& o, std::size_t m,
                          std::size_t ref_steps, bool damping) {
    std::ostringstream key;
    for (double x : {p.kappa, p.eta, p.sigma1, p.a, p.c1, p.c2, p.c3, p.sigma2, p.rho12, p.rho13,
                     p.rho23, o.strike, o.maturity, o.barrier}) {
        key << format_double(x) << ',';
    }
    key << static_cast<int>(o.kind) << ',' << m << ',' << ref_steps << ',' << damping;
    return key.str();
}

ErrorReport max_error(ErrorKind kind, double resolution, const Grid3D& grid,
                      std::span<const std::size_t> points, std::span<const double> reference,
                      std::span<const double> approx) {
    ErrorReport rep;
    rep.kind = kind;
    rep.resolution = resolution;
    rep.points = points.size();
    std::size_t where = points.empty() ? 0 : points.front();
    for (std::size_t l : points) {
        const double e = std::abs(reference[l] - approx[l]);
        if (e > rep.value) {
            rep.value = e;
            where = l;
        }
        if (reference[l] > 1.0) {
            rep.relative = std::max(rep.relative, e / reference[l]);
        }
    }
    if (!points.empty()) {
        rep.point = grid.unindex(where);
    }
    return rep;
}

}  // namespace

TemporalStudy::TemporalStudy(const HHWParams& params, const OptionSpec& option, std::size_t m,
                             std::size_t ref_steps, bool reference_damping, ReferenceCache* cache)
    : system_(build_system(params, option, m)),
      m_(m),
      ref_steps_(ref_steps),
      reference_damping_(reference_damping),
      cache_(cache != nullptr ? cache : &ReferenceCache::global()),
      region_(region_points(system_.grid, RegionOfInterest::for_strike(option.strike))) {
    if (ref_steps == 0) {
        throw std::invalid_argument("TemporalStudy: ref_steps must be >= 1");
    }
}

const std::vector<double>& TemporalStudy::reference() {
    if (!reference_) {
        const std::string key =
            reference_key(system_.params, system_.option, m_, ref_steps_, reference_damping_);
        reference_ = cache_->get_or_compute(key, [&] {
            const StepperConfig cfg =
                StepperConfig::with_defaults(SchemeId::MCS, system_.params,
                                             system_.option.maturity, ref_steps_,
                                             reference_damping_);
            return integrate(system_, cfg);
        });
    }
    return *reference_;
}

ErrorReport TemporalStudy::error(SchemeId scheme, std::optional<double> theta, std::size_t steps,
                                 bool damping) {
    StepperConfig cfg = StepperConfig::with_defaults(scheme, system_.params,
                                                     system_.option.maturity, steps, damping);
    if (theta) {
        cfg.theta = *theta;
    }
    const std::vector<double>& ref = reference();
    const std::vector<double> u = integrate(system_, cfg);
    return max_error(ErrorKind::Temporal, cfg.dt, system_.grid, region_, ref, u);
}

ConvergenceTable TemporalStudy::sweep(SchemeId scheme, std::optional<double> theta,
                                      std::span<const std::size_t> steps, bool damping) {
    ConvergenceTable table;
    for (std::size_t n : steps) {
        const ErrorReport rep = error(scheme, theta, n, damping);
        table.add(rep.resolution, rep.value);
    }
    std::size_t positive = 0;
    for (const auto& row : table.rows) {
        positive += row.error > 0.0 ? 1 : 0;
    }
    if (positive == table.rows.size() && positive >= 3) {
        fit_order(table);
    }
    return table;
}

ErrorReport temporal_error(const HHWParams& params, const OptionSpec& option, SchemeId scheme,
                           std::optional<double> theta, std::size_t m, std::size_t steps,
                           bool damping, std::size_t ref_steps) {
    TemporalStudy study(params, option, m, ref_steps);
    return study.error(scheme, theta, steps, damping);
}

ErrorReport spatial_error(const HHWParams& params, const OptionSpec& option, std::size_t m,
                          std::size_t ref_steps, bool uniform) {
    if (params.rho13 != 0.0 || params.rho23 != 0.0) {
        throw AnalyticDomainError("spatial_error: requires rho13 = rho23 = 0");
    }
    if (option.is_barrier()) {
        throw AnalyticDomainError("spatial_error: requires a vanilla call");
    }
    const SemidiscreteSystem system = build_system(params, option, m, uniform);
    const StepperConfig cfg =
        StepperConfig::with_defaults(SchemeId::MCS, params, option.maturity, ref_steps);
    const std::vector<double> u = integrate(system, cfg);

    const Grid3D& g = system.grid;
    const std::vector<std::size_t> points =
        region_points(g, RegionOfInterest::for_strike(option.strike));
    std::vector<double> exact(u.size(), 0.0);
    for (std::size_t l : points) {
        const GridIndex p = g.unindex(l);
        exact[l] = call_price(g.s()[p.i], g.v()[p.j], g.r()[p.k], 0.0, params, option);
    }
    return max_error(ErrorKind::Spatial, static_cast<double>(m), g, points, exact, u);
}

UniformComparison uniform_comparison(const HHWParams& params, const OptionSpec& option,
                                     std::size_t m, std::size_t ref_steps) {
    return {spatial_error(params, option, m, ref_steps, false),
            spatial_error(params, option, m, ref_steps, true)};
}

std::vector<std::size_t> default_step_sweep(double maturity, int decades, int per_decade) {
    if (!(maturity > 0.0) || decades < 0 || per_decade < 1) {
        throw std::invalid_argument("default_step_sweep: invalid arguments");
    }
    std::vector<std::size_t> steps;
    for (int k = 0; k <= decades * per_decade; ++k) {
        const double dt = std::pow(10.0, -static_cast<double>(k) / per_decade);
        const auto n = static_cast<std::size_t>(std::max(1.0, std::round(maturity / dt)));
        if (std::find(steps.begin(), steps.end(), n) == steps.end()) {
            steps.push_back(n);
        }
    }
    std::sort(steps.begin(), steps.end());
    return steps;
}

MonteCarloResult mc_oracle(const HHWParams& params, const OptionSpec& option, double s, double v,
                           double r, std::size_t paths, std::size_t steps, std::uint64_t seed) {
    if (paths == 0 || steps == 0) {
        throw std::invalid_argument("mc_oracle: paths and steps must be >= 1");
    }
    if (correlation_eigenvalues(params)[0] < -1e-12) {
        throw std::invalid_argument("mc_oracle: correlation matrix is not positive semidefinite");
    }
    // Lower Cholesky factor of the correlation matrix.
    const double l10 = params.rho12;
    const double l11 = std::sqrt(std::max(0.0, 1.0 - l10 * l10));
    const double l20 = params.rho13;
    const double l21 = l11 > 0.0 ? (params.rho23 - params.rho13 * params.rho12) / l11 : 0.0;
    const double l22 = std::sqrt(std::max(0.0, 1.0 - l20 * l20 - l21 * l21));

    const double T = option.maturity;
    const double dt = T / static_cast<double>(steps);
    const double sqdt = std::sqrt(dt);
    const double K = option.strike;
    const bool barrier = option.is_barrier();
    const double B = option.barrier;

    std::vector<double> b(steps);
    for (std::size_t n = 0; n < steps; ++n) {
        b[n] = mean_reversion(params, static_cast<double>(n) * dt);
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    long double sum = 0.0L, sum_sq = 0.0L;
    for (std::size_t p = 0; p < paths; ++p) {
        double x = std::log(s);
        double var = v;
        double rate = r;
        double integral = 0.0;
        bool alive = !(barrier && s >= B);
        for (std::size_t n = 0; n < steps && alive; ++n) {
            const double z0 = normal(rng);
            const double z1 = normal(rng);
            const double z2 = normal(rng);
            const double w1 = z0;
            const double w2 = l10 * z0 + l11 * z1;
            const double w3 = l20 * z0 + l21 * z1 + l22 * z2;
            const double vp = std::max(var, 0.0);
            const double sqv = std::sqrt(vp);
            integral += rate * dt;
            x += (rate - 0.5 * vp) * dt + sqv * sqdt * w1;
            var += params.kappa * (params.eta - vp) * dt + params.sigma1 * sqv * sqdt * w2;
            rate += params.a * (b[n] - rate) * dt + params.sigma2 * sqdt * w3;
            if (barrier && std::exp(x) >= B) {
                alive = false;
            }
        }
        const double payoff = alive ? std::exp(-integral) * std::max(std::exp(x) - K, 0.0) : 0.0;
        sum += payoff;
        sum_sq += static_cast<long double>(payoff) * payoff;
    }
    const long double n = static_cast<long double>(paths);
    const long double mean = sum / n;
    MonteCarloResult out;
    out.estimate = static_cast<double>(mean);
    if (paths > 1) {
        const long double var = std::max(0.0L, (sum_sq - n * mean * mean) / (n - 1.0L));
        out.standard_error = static_cast<double>(std::sqrt(var / n));
    }
    return out;
}

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header)
    : out_(out), columns_(header.size()) {
    for (std::size_t c = 0; c < header.size(); ++c) {
        out_ << (c ? "," : "") << header[c];
    }
    out_ << '\n';
}

void CsvWriter::row(std::initializer_list<double> values) {
    row(std::vector<double>(values));
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != columns_) {
        throw std::invalid_argument("CsvWriter: row width does not match the header");
    }
    for (std::size_t c = 0; c < values.size(); ++c) {
        out_ << (c ? "," : "") << format_double(values[c]);
    }
    out_ << '\n';
}

Experiment parse_experiment(std::string_view name) {
    if (name == "spatial") return Experiment::Spatial;
    if (name == "temporal") return Experiment::Temporal;
    if (name == "price") return Experiment::Price;
    if (name == "uniform-compare") return Experiment::UniformCompare;
    if (name == "barrier-surface") return Experiment::BarrierSurface;
    throw std::invalid_argument("unknown experiment '" + std::string(name) + "'");
}

std::string_view to_string(Experiment e) {
    switch (e) {
        case Experiment::Spatial: return "spatial";
        case Experiment::Temporal: return "temporal";
        case Experiment::Price: return "price";
        case Experiment::UniformCompare: return "uniform-compare";
        case Experiment::BarrierSurface: return "barrier-surface";
    }
    return "?";
}

namespace {

std::vector<std::size_t> steps_from_dts(const std::vector<double>& dts, double maturity) {
    std::vector<std::size_t> steps;
    for (double dt : dts) {
        if (!(dt > 0.0) || dt > maturity) {
            throw std::invalid_argument("dt-sweep values must lie in (0, T]");
        }
        const double n = std::round(maturity / dt);
        if (std::abs(n * dt - maturity) > 1e-9 * maturity) {
            throw std::invalid_argument("dt-sweep value " + format_double(dt) +
                                        " does not divide T = " + format_double(maturity));
        }
        steps.push_back(static_cast<std::size_t>(n));
    }
    std::sort(steps.begin(), steps.end());
    steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
    return steps;
}

void require_analytic_domain(const HHWParams& params, const OptionSpec& option,
                             std::string_view experiment) {
    if (params.rho13 != 0.0 || params.rho23 != 0.0) {
        throw std::invalid_argument(std::string(experiment) +
                                    " experiment needs --zero-cross-corr (rho13 = rho23 = 0)");
    }
    if (option.is_barrier()) {
        throw std::invalid_argument(std::string(experiment) +
                                    " experiment needs --option call");
    }
}

// m values below the requested one from the standard ladder, then m itself.
std::vector<std::size_t> spatial_ladder(std::size_t m) {
    std::vector<std::size_t> out;
    for (std::size_t x : {10u, 15u, 20u, 30u, 40u, 50u, 75u}) {
        if (x < m) out.push_back(x);
    }
    out.push_back(m);
    return out;
}

void write_surface(const SemidiscreteSystem& system, std::span<const double> u, CaseId id,
                   std::ostream& csv) {
    const Grid3D& g = system.grid;
    const double target = sample_spot_rate(id);
    std::size_t k_best = 0;
    for (std::size_t k = 1; k < g.r().size(); ++k) {
        if (std::abs(g.r()[k] - target) < std::abs(g.r()[k_best] - target)) {
            k_best = k;
        }
    }
    const double s_hi = system.option.is_barrier() ? system.option.barrier
                                                   : 2.0 * system.option.strike;
    CsvWriter w(csv, {"s", "v", "r", "value"});
    for (std::size_t j = 0; j < g.v().size() && g.v()[j] < 1.0; ++j) {
        for (std::size_t i = 0; i < g.s().size() && g.s()[i] <= s_hi; ++i) {
            w.row({g.s()[i], g.v()[j], g.r()[k_best], grid_value(system, u, i, j, k_best)});
        }
    }
}

}  // namespace

ExperimentSummary run_experiment(const ExperimentConfig& config, std::ostream& csv) {
    const auto start = std::chrono::steady_clock::now();
    auto [params, option] = case_params(config.case_id);
    if (config.zero_cross_corr) {
        params = params.without_cross_correlations();
    }
    const bool force_barrier = config.experiment == Experiment::BarrierSurface;
    if (config.option == OptionKind::UpAndOutCall || force_barrier) {
        option.kind = OptionKind::UpAndOutCall;
        option.barrier = config.barrier;
    }
    option.validate();
    if (config.m < 2) {
        throw std::invalid_argument("--m must be at least 2");
    }
    if (config.theta && !(*config.theta > 0.0)) {
        throw std::invalid_argument("--theta must be positive");
    }

    ExperimentSummary summary;
    summary.experiment = std::string(to_string(config.experiment));
    summary.case_name = std::string(to_string(config.case_id));

    switch (config.experiment) {
        case Experiment::Temporal: {
            const std::size_t ref_steps = config.ref_steps.value_or(4000);
            const std::vector<std::size_t> steps =
                config.dt_sweep.empty() ? default_step_sweep(option.maturity)
                                        : steps_from_dts(config.dt_sweep, option.maturity);
            TemporalStudy study(params, option, config.m, ref_steps, option.is_barrier());
            ConvergenceTable table;
            CsvWriter w(csv, {"dt", "error"});
            for (auto it = steps.begin(); it != steps.end(); ++it) {
                const ErrorReport rep = study.error(config.scheme, config.theta, *it, config.damping);
                w.row({rep.resolution, rep.value});
                table.add(rep.resolution, rep.value);
            }
            const bool fittable =
                table.rows.size() >= 3 &&
                std::all_of(table.rows.begin(), table.rows.end(),
                            [](const auto& row) { return row.error > 0.0; });
            if (fittable) {
                summary.fitted_order = fit_order(table);
            }
            break;
        }
        case Experiment::Spatial: {
            require_analytic_domain(params, option, "spatial");
            const std::size_t ref_steps = config.ref_steps.value_or(200);
            ConvergenceTable table;
            CsvWriter w(csv, {"m", "error", "relative_error"});
            for (std::size_t m : spatial_ladder(config.m)) {
                const ErrorReport rep = spatial_error(params, option, m, ref_steps);
                w.row({static_cast<double>(m), rep.value, rep.relative});
                table.add(1.0 / static_cast<double>(m), rep.value);
            }
            if (table.rows.size() >= 3) {
                summary.fitted_order = fit_order(table);
            }
            break;
        }
        case Experiment::UniformCompare: {
            require_analytic_domain(params, option, "uniform-compare");
            const std::size_t ref_steps = config.ref_steps.value_or(200);
            const UniformComparison cmp = uniform_comparison(params, option, config.m, ref_steps);
            CsvWriter w(csv, {"m", "nonuniform_error", "uniform_error"});
            w.row({static_cast<double>(config.m), cmp.nonuniform.value, cmp.uniform.value});
            break;
        }
        case Experiment::Price:
        case Experiment::BarrierSurface: {
            const SemidiscreteSystem system = build_system(params, option, config.m);
            StepperConfig cfg = StepperConfig::with_defaults(config.scheme, params,
                                                             option.maturity, config.steps,
                                                             config.damping);
            if (config.theta) {
                cfg.theta = *config.theta;
            }
            const std::vector<double> u = integrate(system, cfg);
            write_surface(system, u, config.case_id, csv);
            break;
        }
    }
    summary.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return summary;
}

}  // namespace hhw
