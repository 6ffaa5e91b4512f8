#pragma once

#include <Eigen/Dense>

#include <cassert>
#include <cmath>

namespace cbp {

// Forward-mode scalar carrying value, gradient and Hessian with respect to a
// small dense block of local variables (one contact term, one element).
// An empty gradient marks a constant; binary ops promote lazily so literals
// stay cheap.
class Dual2
{
public:
    double v = 0.0;
    Eigen::VectorXd g;
    Eigen::MatrixXd h;

    Dual2() = default;
    Dual2(double value) : v(value) {} // NOLINT: implicit by design
    Dual2(double value, Eigen::VectorXd grad, Eigen::MatrixXd hess)
        : v(value), g(std::move(grad)), h(std::move(hess))
    {
    }

    static Dual2 variable(double value, int index, int n)
    {
        Dual2 r(value);
        r.g = Eigen::VectorXd::Zero(n);
        r.g[index] = 1.0;
        r.h = Eigen::MatrixXd::Zero(n, n);
        return r;
    }

    bool constant() const { return g.size() == 0; }
    double value() const { return v; }

    Dual2 operator-() const
    {
        if (constant())
            return Dual2(-v);
        return Dual2(-v, -g, -h);
    }

    Dual2& operator+=(const Dual2& o) { return *this = *this + o; }
    Dual2& operator-=(const Dual2& o) { return *this = *this - o; }
    Dual2& operator*=(const Dual2& o) { return *this = *this * o; }
    Dual2& operator/=(const Dual2& o) { return *this = *this / o; }

    friend Dual2 operator+(const Dual2& a, const Dual2& b)
    {
        if (a.constant() && b.constant())
            return Dual2(a.v + b.v);
        if (a.constant())
            return Dual2(a.v + b.v, b.g, b.h);
        if (b.constant())
            return Dual2(a.v + b.v, a.g, a.h);
        return Dual2(a.v + b.v, a.g + b.g, a.h + b.h);
    }

    friend Dual2 operator-(const Dual2& a, const Dual2& b)
    {
        if (a.constant() && b.constant())
            return Dual2(a.v - b.v);
        if (a.constant())
            return Dual2(a.v - b.v, -b.g, -b.h);
        if (b.constant())
            return Dual2(a.v - b.v, a.g, a.h);
        return Dual2(a.v - b.v, a.g - b.g, a.h - b.h);
    }

    friend Dual2 operator*(const Dual2& a, const Dual2& b)
    {
        if (a.constant() && b.constant())
            return Dual2(a.v * b.v);
        if (a.constant())
            return Dual2(a.v * b.v, a.v * b.g, a.v * b.h);
        if (b.constant())
            return Dual2(a.v * b.v, b.v * a.g, b.v * a.h);
        Eigen::MatrixXd hess = a.v * b.h + b.v * a.h;
        hess.noalias() += a.g * b.g.transpose();
        hess.noalias() += b.g * a.g.transpose();
        return Dual2(a.v * b.v, a.v * b.g + b.v * a.g, std::move(hess));
    }

    friend Dual2 operator/(const Dual2& a, const Dual2& b)
    {
        return a * inverse(b);
    }

    friend Dual2 inverse(const Dual2& b)
    {
        const double iv = 1.0 / b.v;
        if (b.constant())
            return Dual2(iv);
        // d(1/x) = -1/x^2, d2 = 2/x^3
        const double d1 = -iv * iv;
        const double d2 = 2.0 * iv * iv * iv;
        return chain(b, iv, d1, d2);
    }

    // f(b) with f' and f'' supplied.
    static Dual2 chain(const Dual2& b, double f, double df, double ddf)
    {
        if (b.constant())
            return Dual2(f);
        Eigen::MatrixXd hess = df * b.h;
        hess.noalias() += ddf * (b.g * b.g.transpose());
        return Dual2(f, df * b.g, std::move(hess));
    }

    friend bool operator<(const Dual2& a, const Dual2& b) { return a.v < b.v; }
    friend bool operator>(const Dual2& a, const Dual2& b) { return a.v > b.v; }
    friend bool operator<=(const Dual2& a, const Dual2& b) { return a.v <= b.v; }
    friend bool operator>=(const Dual2& a, const Dual2& b) { return a.v >= b.v; }
    friend bool operator==(const Dual2& a, const Dual2& b) { return a.v == b.v; }
    friend bool operator!=(const Dual2& a, const Dual2& b) { return a.v != b.v; }
};

inline Dual2 sqrt(const Dual2& x)
{
    const double s = std::sqrt(x.v);
    return Dual2::chain(x, s, 0.5 / s, -0.25 / (s * x.v));
}

inline Dual2 log(const Dual2& x)
{
    return Dual2::chain(x, std::log(x.v), 1.0 / x.v, -1.0 / (x.v * x.v));
}

inline Dual2 abs(const Dual2& x)
{
    return x.v >= 0.0 ? x : -x;
}

inline Dual2 pow(const Dual2& x, int n)
{
    Dual2 r(1.0);
    for (int i = 0; i < n; ++i)
        r = r * x;
    return r;
}

inline double value_of(double x) { return x; }
inline double value_of(const Dual2& x) { return x.v; }

template <typename T>
T ad_min(const T& a, const T& b)
{
    return a < b ? a : b;
}

template <typename T>
T ad_max(const T& a, const T& b)
{
    return a > b ? a : b;
}

} // namespace cbp

namespace Eigen {

template <>
struct NumTraits<cbp::Dual2> : NumTraits<double>
{
    typedef cbp::Dual2 Real;
    typedef cbp::Dual2 NonInteger;
    typedef cbp::Dual2 Nested;
    typedef cbp::Dual2 Literal;
    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 1,
        RequireInitialization = 1,
        ReadCost = 1,
        AddCost = 16,
        MulCost = 32,
    };
};

template <typename Op>
struct ScalarBinaryOpTraits<cbp::Dual2, double, Op>
{
    typedef cbp::Dual2 ReturnType;
};
template <typename Op>
struct ScalarBinaryOpTraits<double, cbp::Dual2, Op>
{
    typedef cbp::Dual2 ReturnType;
};

} // namespace Eigen
