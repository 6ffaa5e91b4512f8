#pragma once

#include <cbp/common.hpp>

#include <cmath>

namespace cbp {
namespace kernels {

/// Barrier shape: localization radius and inverse-power exponent.
/// The default exponent is scene-dimension minus one.
struct BarrierSpec
{
    double eps = 0.0;
    int p = 1;

    BarrierSpec() = default;
    BarrierSpec(double eps_, int p_) : eps(eps_), p(p_)
    {
        check(eps > 0.0, "BarrierSpec: eps must be positive");
        check(p >= 1, "BarrierSpec: p must be a positive integer");
    }
};

// Cubic B-spline basis, C^2, even, support |v| < 2.
template <typename T>
T bspline3(const T& v)
{
    using std::abs;
    const T a = abs(v);
    if (a >= T(2.0))
        return T(0.0);
    if (a >= T(1.0)) {
        const T w = T(2.0) - a;
        return w * w * w * (1.0 / 6.0);
    }
    return T(2.0 / 3.0) - a * a + a * a * a * T(0.5);
}

// h_eps(z) = (3/2) B^3(2z/eps); vanishes (flatly) for z >= eps.
template <typename T>
T h_eps(const T& z, double eps)
{
    check(eps > 0.0, "h_eps: eps must be positive");
    return T(1.5) * bspline3(T(z * (2.0 / eps)));
}

// Localized barrier h_eps(z) / z^p. Caller guarantees z > 0.
template <typename T>
T barrier(const T& z, const BarrierSpec& spec)
{
    using std::pow;
    if (value_of(z) >= spec.eps)
        return T(0.0);
    return h_eps(z, spec.eps) / pow(z, spec.p);
}

inline double bspline3_derivative(double v)
{
    const double a = std::abs(v);
    double d = 0.0;
    if (a < 1.0)
        d = -2.0 * a + 1.5 * a * a;
    else if (a < 2.0)
        d = -0.5 * (2.0 - a) * (2.0 - a);
    return v < 0.0 ? -d : d;
}

inline double barrier_derivative(double z, const BarrierSpec& spec)
{
    if (z >= spec.eps)
        return 0.0;
    const double h = 1.5 * bspline3(2.0 * z / spec.eps);
    const double dh = 1.5 * bspline3_derivative(2.0 * z / spec.eps) * (2.0 / spec.eps);
    const double zp = std::pow(z, spec.p);
    return dh / zp - spec.p * h / (zp * z);
}

// Piecewise-cubic smoothed step: 0 for z <= -3, 1 for z >= 0, C^2.
template <typename T>
T heaviside_raw(const T& z)
{
    if (z >= T(0.0))
        return T(1.0);
    if (z < T(-3.0))
        return T(0.0);
    if (z < T(-2.0)) {
        const T w = T(3.0) + z;
        return w * w * w * (1.0 / 6.0);
    }
    if (z < T(-1.0))
        return (T(3.0) - T(9.0) * z - T(9.0) * z * z - T(2.0) * z * z * z) * (1.0 / 6.0);
    return T(1.0) + z * z * z * (1.0 / 6.0);
}

// H^alpha(z) = H(z/alpha): 0 for z <= -3 alpha, 1 for z >= 0.
template <typename T>
T heaviside(const T& z, double alpha)
{
    check(alpha > 0.0, "heaviside: alpha must be positive");
    return heaviside_raw(T(z * (1.0 / alpha)));
}

// Step used by the directional filters: support edge exactly at z = -a,
// so a factor vanishes (with a flat C^2 zero) iff its argument <= -a.
template <typename T>
T smooth_step(const T& z, double a)
{
    check(a > 0.0, "smooth_step: width must be positive");
    return heaviside_raw(T(z * (3.0 / a)));
}

// Spline bump delta^alpha(z) = (2/alpha) B^3(2z/alpha); unit integral.
template <typename T>
T delta(const T& z, double alpha)
{
    check(alpha > 0.0, "delta: alpha must be positive");
    return T(2.0 / alpha) * bspline3(T(z * (2.0 / alpha)));
}

// C^1 ramp h(z) = z(2-z) on [0,1), 1 beyond; clamped to 0 for z < 0
// (arguments are nonnegative ratios, the clamp guards fp noise).
template <typename T>
T mollify_h(const T& z)
{
    if (z <= T(0.0))
        return T(0.0);
    if (z >= T(1.0))
        return T(1.0);
    return z * (T(2.0) - z);
}

// h_c(s) = h((s-1)/c): 0 at s = 1, 1 for s >= 1 + c.
template <typename T>
T mollify_hc(const T& s, double c)
{
    check(c > 0.0, "mollify_hc: c must be positive");
    return mollify_h(T((s - T(1.0)) * (1.0 / c)));
}

// Reference log-barrier of the incremental-potential-contact formulation,
// used only for comparison runs: -(d - dhat)^2 log(d / dhat) below dhat.
template <typename T>
T ipc_barrier(const T& d, double dhat)
{
    using std::log;
    check(value_of(d) > 0.0, "ipc_barrier: distance must be positive");
    if (value_of(d) >= dhat)
        return T(0.0);
    const T w = d - T(dhat);
    return -w * w * log(d * (1.0 / dhat));
}

} // namespace kernels
} // namespace cbp
