#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "mwell/error.hpp"

namespace mwell {

/// A value held as exp(log_scale) * (value, deriv); keeps growing branches of
/// D_nu representable far beyond the double range.
struct Scaled {
    double log_scale = 0.0;
    double value = 0.0;
    double deriv = 0.0;

    double unscaled_value() const { return std::exp(log_scale) * value; }
    double unscaled_deriv() const { return std::exp(log_scale) * deriv; }
    double log_derivative() const { return deriv / value; }
};

/// Parabolic cylinder function D_nu(z), real nu < 1/2 and real |z| <= 60.
///
/// For z >= switch_point the asymptotic series
///   D_nu(z) ~ z^nu exp(-z^2/4) sum_s (-1)^s (-nu)_{2s} / (s! (2 z^2)^s)
/// is summed directly. Below it the Weber equation y'' = (z^2/4 - nu - 1/2) y
/// is integrated downward by Taylor stepping from the value at switch_point.
/// Downward is the stable direction: the recessive solution at +inf becomes
/// the dominant one on the way down.
class CylinderFunction {
public:
    static constexpr double default_switch = 30.0;
    static constexpr double max_argument = 60.0;

    explicit CylinderFunction(double nu, double switch_point = default_switch) : nu_(nu), switch_(switch_point)
    {
        detail::require(std::isfinite(nu) && nu < 0.5, ErrorKind::domain, "specfun",
                        "cylinder_d: order must satisfy nu < 1/2");
        detail::require(switch_point >= 10.0 && switch_point <= max_argument, ErrorKind::domain, "specfun",
                        "cylinder_d: switch point outside [10, 60]");
        seed_ = asymptotic(switch_);
    }

    double order() const { return nu_; }
    double switch_point() const { return switch_; }

    /// Asymptotic series at z > 0, with derivative; only accurate for large z.
    Scaled asymptotic(double z) const
    {
        detail::require(z > 0.0, ErrorKind::domain, "specfun", "asymptotic series needs z > 0");
        const double inv2z2 = 1.0 / (2.0 * z * z);
        double term = 1.0;
        double sum = 1.0;
        double dsum = 0.0; // d/dz of the series part
        for (int s = 0; s < 200; ++s) {
            const double next = -term * (nu_ - 2 * s) * (nu_ - 2 * s - 1) * inv2z2 / (s + 1);
            if (std::abs(next) > std::abs(term))
                break; // asymptotic series started diverging
            term = next;
            sum += term;
            dsum += -2.0 * (s + 1) * term / z;
            if (std::abs(term) < 1e-18 * std::abs(sum))
                break;
        }
        Scaled out;
        out.log_scale = nu_ * std::log(z) - 0.25 * z * z;
        out.value = sum;
        out.deriv = sum * (nu_ / z - 0.5 * z) + dsum;
        return out;
    }

    /// D_nu and D_nu' at each argument, in the input order.
    std::vector<Scaled> evaluate(std::span<const double> z) const
    {
        std::vector<std::size_t> order(z.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return z[a] > z[b]; });

        std::vector<Scaled> out(z.size());
        double pos = switch_;
        Scaled state = seed_;
        for (std::size_t idx : order) {
            const double target = z[idx];
            detail::require(std::isfinite(target) && std::abs(target) <= max_argument, ErrorKind::overflow,
                            "specfun", "cylinder_d: |z| beyond 60 is out of range");
            if (target >= switch_) {
                out[idx] = asymptotic(target);
                continue;
            }
            if (target < 0.0 && use_kummer()) {
                out[idx] = kummer(target);
                continue;
            }
            while (pos > target) {
                const double h = std::max(target - pos, -step_limit(pos));
                state = taylor_step(state, pos, h);
                pos = (pos + h < target + 1e-15 * std::abs(target)) ? target : pos + h;
            }
            out[idx] = state;
        }
        return out;
    }

    Scaled evaluate(double z) const { return evaluate(std::span<const double>(&z, 1)).front(); }

    /// Plain D_nu(z); throws overflow if not representable.
    double operator()(double z) const
    {
        const auto s = evaluate(z);
        const double v = s.unscaled_value();
        detail::require(std::isfinite(v), ErrorKind::overflow, "specfun", "cylinder_d overflows double");
        return v;
    }

    /// Kummer-function representation, used for z < 0 when nu is near zero.
    /// There the coefficient 1/Gamma(-nu) of the dominant branch is small and the
    /// downward sweep would lose it in roundoff; both Kummer terms are positive.
    Scaled kummer(double z) const
    {
        detail::require(z < 0.0, ErrorKind::domain, "specfun", "kummer branch needs z < 0");
        const double x = 0.5 * z * z;
        const double az = -z;
        const double c1 = std::sqrt(std::numbers::pi) / std::tgamma(0.5 * (1.0 - nu_));
        const double c2 = std::sqrt(2.0 * std::numbers::pi) / std::tgamma(-0.5 * nu_);
        const auto m1 = log_kummer_m(-0.5 * nu_, 0.5, x);
        const auto m2 = log_kummer_m(0.5 * (1.0 - nu_), 1.5, x);
        const auto m1p = log_kummer_m(1.0 - 0.5 * nu_, 1.5, x);
        const auto m2p = log_kummer_m(0.5 * (3.0 - nu_), 2.5, x);
        const double top = std::max({m1, m2, m1p, m2p});
        const double e1 = std::exp(m1 - top);
        const double e2 = std::exp(m2 - top);
        const double e1p = std::exp(m1p - top);
        const double e2p = std::exp(m2p - top);
        // F = c1 M1 + c2 |z| M2; dM/dz = z (a/b) M(a+1, b+1, x).
        const double f = c1 * e1 + c2 * az * e2;
        const double fp = c1 * z * (-0.5 * nu_ / 0.5) * e1p +
                          c2 * (-e2 + az * z * ((0.5 * (1.0 - nu_)) / 1.5) * e2p);
        Scaled out;
        out.log_scale = 0.5 * nu_ * std::numbers::ln2 - 0.25 * z * z + top;
        out.value = f;
        out.deriv = -0.5 * z * f + fp;
        const double mag = std::max(std::abs(out.value), std::abs(out.deriv));
        out.log_scale += std::log(mag);
        out.value /= mag;
        out.deriv /= mag;
        return out;
    }

private:
    double a() const { return nu_ + 0.5; }

    bool use_kummer() const { return nu_ > -0.25 && nu_ <= 0.05; }

    /// log M(a, b, x) for a >= 0, b > 0, x >= 0 (all series terms non-negative).
    static double log_kummer_m(double a, double b, double x)
    {
        double log_acc = 0.0;
        double term = 1.0;
        double sum = 1.0;
        for (int k = 0; k < 100000; ++k) {
            term *= (a + k) / (b + k) * x / (k + 1.0);
            sum += term;
            if (sum > 1e250) {
                log_acc += std::log(sum);
                term /= sum;
                sum = 1.0;
            }
            if (term == 0.0 || (k > x && term < 1e-18 * sum))
                break;
        }
        return log_acc + std::log(sum);
    }

    double step_limit(double z) const
    {
        const double q = std::abs(0.25 * z * z - a());
        return std::min(0.25, 2.0 / std::sqrt(q + 1.0));
    }

    /// One Taylor step of y'' = (z^2/4 - a) y from z0 over h, renormalized.
    Scaled taylor_step(const Scaled& y, double z0, double h) const
    {
        // b_k = c_k h^k with (k+2)(k+1) c_{k+2} = q0 c_k + (z0/2) c_{k-1} + c_{k-2}/4.
        const double q0 = 0.25 * z0 * z0 - a();
        const double h2 = h * h;
        double b[128] = {};
        b[0] = y.value;
        b[1] = y.deriv * h;
        double val = b[0] + b[1];
        double dh = b[1];
        const double ref = std::abs(b[0]) + std::abs(b[1]);
        int quiet = 0;
        for (int k = 0; k + 2 < 128; ++k) {
            double rhs = q0 * b[k];
            if (k >= 1)
                rhs += 0.5 * z0 * h * b[k - 1];
            if (k >= 2)
                rhs += 0.25 * h2 * b[k - 2];
            b[k + 2] = h2 * rhs / ((k + 2.0) * (k + 1.0));
            val += b[k + 2];
            dh += (k + 2.0) * b[k + 2];
            quiet = std::abs(b[k + 2]) * (k + 3.0) < 1e-19 * ref ? quiet + 1 : 0;
            if (quiet >= 3)
                break;
        }
        Scaled out;
        const double der = dh / h;
        const double mag = std::max(std::abs(val), std::abs(der));
        out.log_scale = y.log_scale + std::log(mag);
        out.value = val / mag;
        out.deriv = der / mag;
        return out;
    }

    double nu_;
    double switch_;
    Scaled seed_;
};

inline double cylinder_d(double nu, double z) { return CylinderFunction(nu)(z); }

/// Gamma function for real arguments, via the C library.
inline double gamma_fn(double x)
{
    const double g = std::tgamma(x);
    detail::require(std::isfinite(g), ErrorKind::overflow, "specfun", "gamma: pole or overflow");
    return g;
}

/// The pair phi_1(xi) = D_nu(sqrt2 xi), phi_2(xi) = D_nu(-sqrt2 xi) and their
/// xi-derivatives at a set of points.
struct CylinderPair {
    std::vector<Scaled> phi1;
    std::vector<Scaled> phi2;
};

inline CylinderPair cylinder_pair(const CylinderFunction& d, std::span<const double> xi)
{
    std::vector<double> z(2 * xi.size());
    for (std::size_t j = 0; j < xi.size(); ++j) {
        z[j] = std::numbers::sqrt2 * xi[j];
        z[xi.size() + j] = -std::numbers::sqrt2 * xi[j];
    }
    auto all = d.evaluate(z);
    CylinderPair out;
    out.phi1.assign(all.begin(), all.begin() + static_cast<long>(xi.size()));
    out.phi2.assign(all.begin() + static_cast<long>(xi.size()), all.end());
    for (auto& s : out.phi1)
        s.deriv *= std::numbers::sqrt2;
    for (auto& s : out.phi2)
        s.deriv *= -std::numbers::sqrt2;
    return out;
}

/// Closed-form Wronskian phi_1 phi_2' - phi_1' phi_2 of the xi-pair: 2 sqrt(pi) / Gamma(-nu).
inline double wronskian_pair(double nu)
{
    detail::require(nu < 0.0, ErrorKind::domain, "specfun", "wronskian_pair: needs nu < 0");
    return 2.0 * std::sqrt(std::numbers::pi) / gamma_fn(-nu);
}

/// The same Wronskian evaluated from the functions at each xi.
inline std::vector<double> numeric_wronskian(double nu, std::span<const double> xi)
{
    const CylinderFunction d(nu);
    const auto pair = cylinder_pair(d, xi);
    std::vector<double> out(xi.size());
    for (std::size_t j = 0; j < xi.size(); ++j) {
        const auto& a = pair.phi1[j];
        const auto& b = pair.phi2[j];
        out[j] = std::exp(a.log_scale + b.log_scale) * (a.value * b.deriv - a.deriv * b.value);
    }
    return out;
}

/// Physicists' Hermite polynomial H_n(u) by the three-term recurrence.
inline double hermite_phys(int n, double u)
{
    detail::require(n >= 0 && n <= 400, ErrorKind::domain, "specfun", "hermite_phys: n must lie in [0, 400]");
    double hm1 = 0.0;
    double h = 1.0;
    for (int k = 0; k < n; ++k) {
        const double next = 2.0 * u * h - 2.0 * k * hm1;
        hm1 = h;
        h = next;
    }
    detail::require(std::isfinite(h), ErrorKind::overflow, "specfun", "hermite_phys overflows double");
    return h;
}

/// Normalized oscillator eigenfunctions psi_0..psi_{n_max} of -1/2 d^2/dx^2 + omega^2 x^2 / 2
/// at one point. The recurrence runs on rescaled values so large |x| does not underflow
/// psi_0 before the higher functions pick up.
inline std::vector<double> ho_functions(int n_max, double x, double omega = 1.0)
{
    detail::require(n_max >= 0 && omega > 0.0, ErrorKind::domain, "specfun", "ho_functions: bad arguments");
    std::vector<double> out(static_cast<std::size_t>(n_max) + 1);
    const double u = std::sqrt(omega) * x;
    double log_scale = 0.25 * std::log(omega / std::numbers::pi) - 0.5 * u * u;
    std::vector<double> logs(out.size());
    double prev = 0.0;
    double cur = 1.0;
    out[0] = cur;
    logs[0] = log_scale;
    for (int n = 0; n < n_max; ++n) {
        double next = std::sqrt(2.0 / (n + 1.0)) * u * cur - std::sqrt(n / (n + 1.0)) * prev;
        prev = cur;
        cur = next;
        const double mag = std::abs(cur);
        if (mag > 1e100 || (mag < 1e-100 && mag > 0.0)) {
            log_scale += std::log(mag);
            prev /= mag;
            cur /= mag;
        }
        out[static_cast<std::size_t>(n) + 1] = cur;
        logs[static_cast<std::size_t>(n) + 1] = log_scale;
    }
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] *= std::exp(logs[k]);
    return out;
}

/// psi_n(x) for a single index.
inline double ho_function(int n, double x, double omega = 1.0) { return ho_functions(n, x, omega).back(); }

} // namespace mwell
