#pragma once

#include <array>
#include <string_view>
#include <utility>

namespace hhw {

/// Constants of the Heston--Hull--White model.
///
/// The short rate reverts to the time-dependent level
/// b(tau) = c1 - c2 * exp(-c3 * tau), tau measured in calendar time.
struct HHWParams {
    double kappa = 0.0;   // variance mean-reversion rate
    double eta = 0.0;     // long-run variance
    double sigma1 = 0.0;  // vol of variance
    double a = 0.0;       // rate mean-reversion speed
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;
    double sigma2 = 0.0;  // rate volatility
    double rho12 = 0.0;
    double rho13 = 0.0;
    double rho23 = 0.0;

    /// Throws std::invalid_argument when a constant is out of range or the
    /// correlation matrix is not positive semidefinite.
    void validate() const;

    /// Copy with rho13 = rho23 = 0, the regime where the analytic price exists.
    [[nodiscard]] HHWParams without_cross_correlations() const;
};

enum class OptionKind { VanillaCall, UpAndOutCall };

struct OptionSpec {
    OptionKind kind = OptionKind::VanillaCall;
    double strike = 100.0;
    double maturity = 1.0;
    double barrier = 0.0;  // only meaningful for UpAndOutCall

    void validate() const;
    [[nodiscard]] bool is_barrier() const { return kind == OptionKind::UpAndOutCall; }
};

enum class CaseId { A, B, C, D, E, F };
enum class SchemeId { Do, CS, MCS, HV };

/// Parameter sets A-F with full correlations, vanilla call, K = 100.
std::pair<HHWParams, OptionSpec> case_params(CaseId id);

/// Mean-reversion level b(tau) = c1 - c2 exp(-c3 tau).
double mean_reversion(const HHWParams& params, double tau);

/// max(|rho12|, |rho13|, |rho23|); bounds the relative size of the mixed terms.
double gamma_measure(const HHWParams& params);

/// Strict Feller condition 2 kappa eta > sigma1^2.
bool feller_satisfied(const HHWParams& params);

/// Smallest theta for which each scheme is known to be stable on 3D
/// diffusion problems with mixed derivatives.
double theta_default(SchemeId scheme, double gamma);

/// Eigenvalues of the 3x3 correlation matrix, ascending.
std::array<double, 3> correlation_eigenvalues(const HHWParams& params);

CaseId parse_case(std::string_view name);
SchemeId parse_scheme(std::string_view name);
std::string_view to_string(CaseId id);
std::string_view to_string(SchemeId id);

/// Spot rate used for the barrier surface slices of each case.
double sample_spot_rate(CaseId id);

}  // namespace hhw
