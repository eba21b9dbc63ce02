#include "hhw/model.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hhw {

namespace {

constexpr double kPsdTolerance = 1e-12;

// Symmetric 3x3 eigenvalues via the trigonometric closed form.
std::array<double, 3> symmetric_eigenvalues(double a01, double a02, double a12) {
    // Unit diagonal: eigenvalues of C are 1 + eigenvalues of the off-diagonal part B.
    const double p1 = a01 * a01 + a02 * a02 + a12 * a12;
    if (p1 == 0.0) {
        return {1.0, 1.0, 1.0};
    }
    const double p = std::sqrt(2.0 * p1 / 6.0);
    const double det_b = 2.0 * a01 * a12 * a02;
    double half_det = det_b / (2.0 * p * p * p);
    half_det = std::clamp(half_det, -1.0, 1.0);
    const double phi = std::acos(half_det) / 3.0;
    const double e0 = 2.0 * p * std::cos(phi);
    const double e2 = 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
    const double e1 = -e0 - e2;
    std::array<double, 3> eig{1.0 + e0, 1.0 + e1, 1.0 + e2};
    std::sort(eig.begin(), eig.end());
    return eig;
}

}  // namespace

std::array<double, 3> correlation_eigenvalues(const HHWParams& params) {
    return symmetric_eigenvalues(params.rho12, params.rho13, params.rho23);
}

void HHWParams::validate() const {
    for (double x : {kappa, eta, sigma1, a, sigma2, c1, c2, c3}) {
        if (!(x > 0.0)) {
            throw std::invalid_argument("HHWParams: model constants must be strictly positive");
        }
    }
    if (!(c1 > c2)) {
        throw std::invalid_argument("HHWParams: require c1 > c2");
    }
    for (double rho : {rho12, rho13, rho23}) {
        if (!(rho >= -1.0 && rho <= 1.0)) {
            throw std::invalid_argument("HHWParams: correlation outside [-1, 1]");
        }
    }
    if (correlation_eigenvalues(*this)[0] < -kPsdTolerance) {
        throw std::invalid_argument("HHWParams: correlation matrix is not positive semidefinite");
    }
}

HHWParams HHWParams::without_cross_correlations() const {
    HHWParams p = *this;
    p.rho13 = 0.0;
    p.rho23 = 0.0;
    return p;
}

void OptionSpec::validate() const {
    if (!(strike > 0.0)) {
        throw std::invalid_argument("OptionSpec: strike must be positive");
    }
    if (!(maturity > 0.0)) {
        throw std::invalid_argument("OptionSpec: maturity must be positive");
    }
    if (is_barrier() && !(barrier > strike)) {
        throw std::invalid_argument("OptionSpec: up-and-out barrier must exceed the strike");
    }
}

std::pair<HHWParams, OptionSpec> case_params(CaseId id) {
    HHWParams p;
    OptionSpec o;
    o.kind = OptionKind::VanillaCall;
    o.strike = 100.0;
    switch (id) {
        case CaseId::A:
            p = {3.0, 0.12, 0.04, 0.2, 0.05, 0.01, 1.0, 0.03, 0.6, 0.2, 0.4};
            o.maturity = 1.0;
            break;
        case CaseId::B:
            p = {0.6067, 0.0707, 0.2928, 0.05, 0.055, 0.005, 4.0, 0.06, -0.7571, 0.6, -0.2};
            o.maturity = 3.0;
            break;
        case CaseId::C:
            p = {2.5, 0.06, 0.5, 0.15, 0.101, 0.001, 2.3, 0.1, -0.1, -0.3, 0.2};
            o.maturity = 0.25;
            break;
        case CaseId::D:
            p = {0.5, 0.04, 1.0, 0.08, 0.103, 0.003, 1.0, 0.09, -0.9, 0.6, -0.7};
            o.maturity = 10.0;
            break;
        case CaseId::E:
            p = {0.3, 0.04, 0.9, 0.16, 0.055, 0.025, 1.6, 0.03, -0.5, 0.2, 0.1};
            o.maturity = 15.0;
            break;
        case CaseId::F:
            p = {1.0, 0.09, 1.0, 0.22, 0.074, 0.014, 2.1, 0.07, -0.3, -0.5, -0.2};
            o.maturity = 5.0;
            break;
    }
    return {p, o};
}

double mean_reversion(const HHWParams& params, double tau) {
    return params.c1 - params.c2 * std::exp(-params.c3 * tau);
}

double gamma_measure(const HHWParams& params) {
    return std::max({std::abs(params.rho12), std::abs(params.rho13), std::abs(params.rho23)});
}

bool feller_satisfied(const HHWParams& params) {
    return 2.0 * params.kappa * params.eta > params.sigma1 * params.sigma1;
}

double theta_default(SchemeId scheme, double gamma) {
    switch (scheme) {
        case SchemeId::Do:
            return 2.0 / 3.0;
        case SchemeId::CS:
            return 0.5;
        case SchemeId::MCS:
            return std::max(1.0 / 3.0, 2.0 / 13.0 * (2.0 * gamma + 1.0));
        case SchemeId::HV:
            return 0.5 + std::sqrt(3.0) / 6.0;
    }
    throw std::invalid_argument("theta_default: unknown scheme");
}

namespace {
std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}
}  // namespace

CaseId parse_case(std::string_view name) {
    const std::string n = lower(name);
    if (n.size() == 1 && n[0] >= 'a' && n[0] <= 'f') {
        return static_cast<CaseId>(n[0] - 'a');
    }
    throw std::invalid_argument("unknown case '" + std::string(name) + "' (expected A..F)");
}

SchemeId parse_scheme(std::string_view name) {
    const std::string n = lower(name);
    if (n == "do") return SchemeId::Do;
    if (n == "cs") return SchemeId::CS;
    if (n == "mcs") return SchemeId::MCS;
    if (n == "hv") return SchemeId::HV;
    throw std::invalid_argument("unknown scheme '" + std::string(name) + "' (expected do|cs|mcs|hv)");
}

std::string_view to_string(CaseId id) {
    static constexpr std::array<std::string_view, 6> names{"A", "B", "C", "D", "E", "F"};
    return names[static_cast<std::size_t>(id)];
}

std::string_view to_string(SchemeId id) {
    switch (id) {
        case SchemeId::Do: return "Do";
        case SchemeId::CS: return "CS";
        case SchemeId::MCS: return "MCS";
        case SchemeId::HV: return "HV";
    }
    return "?";
}

double sample_spot_rate(CaseId id) {
    static constexpr std::array<double, 6> rates{0.025, 0.022, 0.025, 0.027, 0.022, 0.017};
    return rates[static_cast<std::size_t>(id)];
}

}  // namespace hhw
