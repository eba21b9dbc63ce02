#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hhw/adi.hpp"
#include "hhw/discretize.hpp"
#include "hhw/grid.hpp"
#include "hhw/model.hpp"

namespace hhw {

/// Open box (K/2, 3K/2) x (0, 1) x (0, 1/4) on which errors are measured.
struct RegionOfInterest {
    double s_lo = 50.0;
    double s_hi = 150.0;
    double v_lo = 0.0;
    double v_hi = 1.0;
    double r_lo = 0.0;
    double r_hi = 0.25;

    static RegionOfInterest for_strike(double strike);
    [[nodiscard]] bool contains(double s, double v, double r) const {
        return s > s_lo && s < s_hi && v > v_lo && v < v_hi && r > r_lo && r < r_hi;
    }
};

/// Active grid points inside the region, in increasing linear index.
std::vector<std::size_t> region_points(const Grid3D& grid, const RegionOfInterest& roi);

enum class ErrorKind { Spatial, Temporal };

struct ErrorReport {
    ErrorKind kind = ErrorKind::Temporal;
    double resolution = 0.0;  // dt for temporal, m for spatial
    double value = 0.0;       // max-norm error over the region
    GridIndex point{0, 0, 0};  // location of the maximum
    std::size_t points = 0;   // number of grid points compared
    /// Largest |error| / value over compared points whose reference value exceeds 1.
    double relative = 0.0;
};

struct ConvergenceTable {
    struct Row {
        double resolution;
        double error;
    };
    std::vector<Row> rows;
    double fitted_order = 0.0;
    double fit_residual = 0.0;

    /// Inserts keeping rows sorted by resolution.
    void add(double resolution, double error);
};

/// Least-squares slope of log(error) against log(h); sets fitted_order and
/// fit_residual (root mean square of the log residuals). Requires >= 3 rows
/// with positive error.
double fit_order(ConvergenceTable& table);

/// Slope for explicit (h, error) pairs, same rules.
double fit_order(std::span<const double> h, std::span<const double> error,
                 double* residual = nullptr);

/// True when the errors do not increase as h decreases; rel_slack allows for
/// rounding noise at the error floor.
bool monotone_nonincreasing(const ConvergenceTable& table, double rel_slack = 0.0);

/// Semidiscrete system for the option on the default (non)uniform grid with parameter m.
SemidiscreteSystem build_system(const HHWParams& params, const OptionSpec& option, std::size_t m,
                                bool uniform = false);

/// Value at any grid point, including Dirichlet boundary points.
double grid_value(const SemidiscreteSystem& system, std::span<const double> u, std::size_t i,
                  std::size_t j, std::size_t k);

/// Read-through store for reference solutions U_ref(T).
class ReferenceCache {
public:
    using Vector = std::shared_ptr<const std::vector<double>>;

    Vector get_or_compute(const std::string& key, const std::function<std::vector<double>()>& fn);
    [[nodiscard]] std::size_t computations() const;
    void clear();

    static ReferenceCache& global();

private:
    mutable std::mutex mutex_;
    std::map<std::string, Vector> store_;
    std::size_t computations_ = 0;
};

/// Temporal errors of one semidiscrete system against a fine MCS reference.
class TemporalStudy {
public:
    /// reference_damping: whether the reference run uses the two Do substeps.
    TemporalStudy(const HHWParams& params, const OptionSpec& option, std::size_t m,
                  std::size_t ref_steps, bool reference_damping = false,
                  ReferenceCache* cache = nullptr);

    [[nodiscard]] const SemidiscreteSystem& system() const { return system_; }
    [[nodiscard]] const std::vector<double>& reference();

    /// Max error over the region for N = steps, theta defaulting per scheme.
    ErrorReport error(SchemeId scheme, std::optional<double> theta, std::size_t steps,
                      bool damping);
    ConvergenceTable sweep(SchemeId scheme, std::optional<double> theta,
                           std::span<const std::size_t> steps, bool damping);

private:
    SemidiscreteSystem system_;
    std::size_t m_;
    std::size_t ref_steps_;
    bool reference_damping_;
    ReferenceCache* cache_;
    ReferenceCache::Vector reference_;
    std::vector<std::size_t> region_;
};

/// One-off temporal error with the global reference cache.
ErrorReport temporal_error(const HHWParams& params, const OptionSpec& option, SchemeId scheme,
                           std::optional<double> theta, std::size_t m, std::size_t steps,
                           bool damping, std::size_t ref_steps = 4000);

/// Spatial error against the analytic price, time-stepped with MCS and ref_steps steps.
/// Throws AnalyticDomainError when rho13 or rho23 is nonzero.
ErrorReport spatial_error(const HHWParams& params, const OptionSpec& option, std::size_t m,
                          std::size_t ref_steps = 200, bool uniform = false);

struct UniformComparison {
    ErrorReport nonuniform;
    ErrorReport uniform;
};
UniformComparison uniform_comparison(const HHWParams& params, const OptionSpec& option,
                                     std::size_t m, std::size_t ref_steps = 200);

/// Step counts N = round(T / dt) for dt = 10^{-k/per_decade}, k = 0..decades*per_decade,
/// deduplicated and ordered by decreasing dt.
std::vector<std::size_t> default_step_sweep(double maturity, int decades = 2,
                                            int per_decade = 10);

struct MonteCarloResult {
    double estimate = 0.0;
    double standard_error = 0.0;
};

/// Euler Monte Carlo price at t = 0 with full truncation of the variance,
/// left-point discounting, and barrier monitoring at every step.
MonteCarloResult mc_oracle(const HHWParams& params, const OptionSpec& option, double s, double v,
                           double r, std::size_t paths, std::size_t steps, std::uint64_t seed);

/// Locale-independent decimal form with 17 significant digits.
std::string format_double(double x);

/// Comma-separated output with a header line.
class CsvWriter {
public:
    CsvWriter(std::ostream& out, const std::vector<std::string>& header);
    void row(std::initializer_list<double> values);
    void row(const std::vector<double>& values);

private:
    std::ostream& out_;
    std::size_t columns_;
};

enum class Experiment { Spatial, Temporal, Price, UniformCompare, BarrierSurface };

Experiment parse_experiment(std::string_view name);
std::string_view to_string(Experiment e);

struct ExperimentConfig {
    Experiment experiment = Experiment::Temporal;
    CaseId case_id = CaseId::A;
    OptionKind option = OptionKind::VanillaCall;
    SchemeId scheme = SchemeId::MCS;
    std::optional<double> theta;
    std::size_t m = 25;
    std::size_t steps = 100;
    std::vector<double> dt_sweep;  // empty: default_step_sweep
    bool damping = false;
    bool zero_cross_corr = false;
    double barrier = 120.0;
    /// Unset: 4000 for temporal runs, 200 for spatial runs.
    std::optional<std::size_t> ref_steps;
    std::uint64_t seed = 1;
    std::string out;  // empty: standard output
};

struct ExperimentSummary {
    std::string experiment;
    std::string case_name;
    std::optional<double> fitted_order;
    double wall_seconds = 0.0;
};

/// Runs the experiment, writing CSV to csv. Throws std::invalid_argument on
/// inconsistent configurations.
ExperimentSummary run_experiment(const ExperimentConfig& config, std::ostream& csv);

/// Command-line entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hhw
