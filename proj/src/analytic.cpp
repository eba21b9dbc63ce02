#include "hhw/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace hhw {

namespace {

using cd = std::complex<double>;

constexpr double kAbsTolerance = 1e-9;
constexpr double kTailRatio = 1e-12;
constexpr double kInitialCut = 200.0;
constexpr int kMaxCutDoublings = 12;
constexpr unsigned kMaxDepth = 20;
constexpr int kPeakSamples = 64;

void check_params(const HHWParams& p) {
    for (double x : {p.kappa, p.eta, p.sigma1, p.a}) {
        if (!(x > 0.0)) {
            throw std::invalid_argument("analytic: kappa, eta, sigma1 and a must be positive");
        }
    }
    if (!(p.sigma2 >= 0.0) || !(p.c2 >= 0.0) || !(p.c3 >= 0.0)) {
        throw std::invalid_argument("analytic: sigma2, c2 and c3 must be nonnegative");
    }
    if (!(std::abs(p.rho12) <= 1.0)) {
        throw std::invalid_argument("analytic: rho12 outside [-1, 1]");
    }
}

void check_times(double tau, double T) {
    if (!(tau >= 0.0) || !(tau <= T)) {
        throw std::invalid_argument("analytic: require 0 <= tau <= T");
    }
}

// (1 - exp(-x)) / x, with the x -> 0 limit.
double one_minus_exp_over(double x) {
    return x == 0.0 ? 1.0 : -std::expm1(-x) / x;
}

// L + (2/a) e^{-aL} - (1/(2a)) e^{-2aL} - 3/(2a)
double variance_bracket(double L, double a) {
    return L + 2.0 / a * std::exp(-a * L) - 0.5 / a * std::exp(-2.0 * a * L) - 1.5 / a;
}

bool finite(const cd& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

CharFnContext CharFnContext::make(int j, const HHWParams& params) {
    if (j != 1 && j != 2) {
        throw std::invalid_argument("CharFnContext: j must be 1 or 2");
    }
    CharFnContext c;
    c.j = j;
    c.rho = params.rho12;
    c.alpha = params.kappa * params.eta;
    if (j == 1) {
        c.delta = 0.0;
        c.beta = params.kappa - params.rho12 * params.sigma1;
        c.gamma = 0.5;
    } else {
        c.delta = 1.0;
        c.beta = params.kappa;
        c.gamma = -0.5;
    }
    return c;
}

double b_integral(double tau, double T, const HHWParams& params) {
    if (!(tau <= T)) {
        throw std::invalid_argument("b_integral: require tau <= T");
    }
    const double L = T - tau;
    const double a = params.a;
    // c1 * int (1 - e^{-a(T-l)}) dl
    const double constant_part = params.c1 * (L - L * one_minus_exp_over(a * L));
    if (params.c2 == 0.0) {
        return constant_part;
    }
    // c2 * int e^{-c3 l} dl
    const double decay = std::exp(-params.c3 * tau) * L * one_minus_exp_over(params.c3 * L);
    // c2 * int e^{-c3 l} e^{-a(T-l)} dl = c2 e^{-c3 tau - aL} (e^{(a-c3)L} - 1)/(a-c3)
    const double k = a - params.c3;
    const double growth = (k == 0.0) ? L : std::expm1(k * L) / k;
    const double coupled = std::exp(-params.c3 * tau - a * L) * growth;
    return constant_part - params.c2 * (decay - coupled);
}

double bond_exponent(double r, double tau, const HHWParams& params, double T) {
    check_times(tau, T);
    const double L = T - tau;
    const double a = params.a;
    const double s2 = params.sigma2;
    return -r * L * one_minus_exp_over(a * L) - b_integral(tau, T, params) +
           s2 * s2 / (2.0 * a * a) * variance_bracket(L, a);
}

double bond_price(double r, double tau, const HHWParams& params, double T) {
    return std::exp(bond_exponent(r, tau, params, T));
}

ComplexEval char_fn_terms(int j, double tau, double y, const HHWParams& params, double T) {
    check_params(params);
    check_times(tau, T);
    const CharFnContext c = CharFnContext::make(j, params);
    const double L = T - tau;
    const double a = params.a;
    const double s1 = params.sigma1;
    const double s1sq = s1 * s1;
    const cd iy(0.0, y);

    ComplexEval e;
    const cd iy_delta = iy - c.delta;
    e.H = iy_delta * (L * one_minus_exp_over(a * L));

    const cd b = c.beta - iy * (c.rho * s1);
    const cd disc = b * b - s1sq * (2.0 * c.gamma * iy - y * y);
    e.d = -std::sqrt(disc);
    const cd plus = b + e.d;
    const cd minus = b - e.d;
    e.g = plus / minus;
    const cd edl = std::exp(e.d * L);
    const cd denom = 1.0 - e.g * edl;
    e.G = plus / s1sq * ((1.0 - edl) / denom);
    e.F = c.alpha / s1sq * (plus * L - 2.0 * std::log(denom / (1.0 - e.g))) +
          iy_delta * b_integral(tau, T, params) +
          0.5 * params.sigma2 * params.sigma2 * (iy_delta / a) * (iy_delta / a) *
              variance_bracket(L, a);

    for (const cd* z : {&e.d, &e.g, &e.F, &e.G, &e.H}) {
        if (!finite(*z)) {
            throw AnalyticNumericError("char_fn: non-finite term at y = " + std::to_string(y) +
                                       ", j = " + std::to_string(j));
        }
    }
    return e;
}

std::complex<double> char_fn(int j, double x, double v, double r, double tau, double y,
                             const HHWParams& params, double T) {
    if (!(y > 0.0)) {
        throw std::invalid_argument("char_fn: require y > 0");
    }
    if (!(tau < T)) {
        throw std::invalid_argument("char_fn: require tau < T");
    }
    const ComplexEval e = char_fn_terms(j, tau, y, params, T);
    cd exponent = e.F + e.G * v + e.H * r + cd(0.0, x * y);
    if (j == 2) {
        exponent -= bond_exponent(r, tau, params, T);
    }
    const cd f = std::exp(exponent);
    if (!finite(f)) {
        throw AnalyticNumericError("char_fn: non-finite value");
    }
    return f;
}

ProbabilityDetail probability_detail(int j, double x, double v, double r, double tau, double K,
                                     const HHWParams& params, double T) {
    if (!(K > 0.0)) {
        throw std::invalid_argument("probability: strike must be positive");
    }
    if (!(tau < T)) {
        throw std::invalid_argument("probability: require tau < T");
    }
    const double log_k = std::log(K);
    const double shift = (j == 2) ? -bond_exponent(r, tau, params, T) : 0.0;

    // Re[e^{-iy ln K} f_j / (iy)] and its envelope |f_j| / y.
    auto exponent = [&](double y) {
        const ComplexEval e = char_fn_terms(j, tau, y, params, T);
        return e.F + e.G * v + e.H * r + cd(shift, (x - log_k) * y);
    };
    auto integrand = [&](double y) {
        const cd f = std::exp(exponent(y));
        const double value = f.imag() / y;
        if (!std::isfinite(value)) {
            throw AnalyticNumericError("probability: non-finite integrand");
        }
        return value;
    };
    auto envelope = [&](double y) { return std::exp(exponent(y).real()) / y; };

    ProbabilityDetail out;
    double cut = kInitialCut;
    int doublings = 0;
    for (;;) {
        double peak = 0.0;
        for (double y : {1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0}) {
            peak = std::max(peak, std::abs(integrand(y)));
        }
        for (int k = 1; k <= kPeakSamples; ++k) {
            peak = std::max(peak, std::abs(integrand(cut * k / kPeakSamples)));
        }
        out.peak = std::max(out.peak, peak);
        out.tail = envelope(cut);
        if (out.tail < kTailRatio * out.peak) {
            break;
        }
        if (++doublings > kMaxCutDoublings) {
            throw AnalyticNumericError("probability: integrand does not decay");
        }
        cut *= 2.0;
    }
    out.y_cut = cut;

    double error = 0.0;
    const double integral = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        integrand, 0.0, cut, kMaxDepth, 1e-12, &error);
    out.error = error;
    if (!std::isfinite(integral) || !(error <= kAbsTolerance)) {
        throw AnalyticNumericError("probability: quadrature did not converge, error estimate " +
                                   std::to_string(error));
    }
    out.value = 0.5 + integral / std::numbers::pi;
    return out;
}

double probability(int j, double x, double v, double r, double tau, double K,
                   const HHWParams& params, double T) {
    const ProbabilityDetail d = probability_detail(j, x, v, r, tau, K, params, T);
    if (d.value < -1e-7 || d.value > 1.0 + 1e-7) {
        throw AnalyticNumericError("probability: P_" + std::to_string(j) +
                                   " outside [0, 1]: " + std::to_string(d.value));
    }
    return std::clamp(d.value, 0.0, 1.0);
}

double call_price(double s, double v, double r, double tau, const HHWParams& params,
                  const OptionSpec& option) {
    if (params.rho13 != 0.0 || params.rho23 != 0.0) {
        throw AnalyticDomainError("call_price: requires rho13 = rho23 = 0");
    }
    if (option.is_barrier()) {
        throw AnalyticDomainError("call_price: no closed form for barrier options");
    }
    if (!(s > 0.0)) {
        throw std::invalid_argument("call_price: require s > 0");
    }
    if (!(v >= 0.0)) {
        throw std::invalid_argument("call_price: require v >= 0");
    }
    check_params(params);
    const double T = option.maturity;
    const double K = option.strike;
    check_times(tau, T);
    if (tau == T) {
        return std::max(s - K, 0.0);
    }
    const double x = std::log(s);
    const double p1 = probability(1, x, v, r, tau, K, params, T);
    const double p2 = probability(2, x, v, r, tau, K, params, T);
    const double price = s * p1 - K * bond_price(r, tau, params, T) * p2;
    return std::max(price, 0.0);
}

}  // namespace hhw
