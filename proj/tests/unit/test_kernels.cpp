#include <cbp/autodiff.hpp>
#include <cbp/kernels.hpp>

#include <catch2/catch_amalgamated.hpp>

using namespace cbp;
using namespace cbp::kernels;
using Catch::Approx;

namespace {

double fd1_right(double (*f)(double), double x, double h) { return (f(x + h) - f(x)) / h; }
double fd1_left(double (*f)(double), double x, double h) { return (f(x) - f(x - h)) / h; }

// one-sided slopes and curvatures around a branch point
void check_c1(double (*f)(double), double x, double h = 1e-7, double tol = 1e-6)
{
    const double l = fd1_left(f, x, h), r = fd1_right(f, x, h);
    REQUIRE(std::abs(l - r) <= tol * std::max({1.0, std::abs(l), std::abs(r)}));
}

void check_c2(double (*f)(double), double x, double h = 1e-4, double tol = 1e-4)
{
    // second-order one-sided stencils for f''(x)
    const double l = (2 * f(x) - 5 * f(x - h) + 4 * f(x - 2 * h) - f(x - 3 * h)) / (h * h);
    const double r = (2 * f(x) - 5 * f(x + h) + 4 * f(x + 2 * h) - f(x + 3 * h)) / (h * h);
    REQUIRE(std::abs(l - r) <= tol * std::max({1.0, std::abs(l), std::abs(r)}));
}

} // namespace

TEST_CASE("bspline3 values")
{
    REQUIRE(bspline3(0.0) == Approx(2.0 / 3.0));
    REQUIRE(bspline3(2.0) == 0.0);
    REQUIRE(bspline3(-2.5) == 0.0);
    REQUIRE(bspline3(1.0) == Approx(1.0 / 6.0));
    REQUIRE(bspline3(-1.0) == Approx(1.0 / 6.0));
    // even
    for (double v : {0.3, 0.9, 1.5, 1.99})
        REQUIRE(bspline3(v) == Approx(bspline3(-v)));
}

TEST_CASE("bspline3 smoothness at knots")
{
    auto f = +[](double v) { return bspline3(v); };
    for (double x : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
        check_c1(f, x);
        check_c2(f, x);
    }
}

TEST_CASE("h_eps values")
{
    REQUIRE(h_eps(0.0, 1.0) == Approx(1.0));
    REQUIRE(h_eps(1.0, 1.0) == 0.0);
    REQUIRE(h_eps(0.5, 1.0) == Approx(0.25));
    REQUIRE_THROWS_AS(h_eps(0.1, -1.0), ContractError);
}

TEST_CASE("barrier values and properties")
{
    REQUIRE(barrier(1.0, BarrierSpec(1.0, 1)) == 0.0);
    REQUIRE(barrier(0.5, BarrierSpec(1.0, 1)) == Approx(0.5));
    REQUIRE(barrier(0.25, BarrierSpec(1.0, 2)) == Approx(11.5));

    // nonnegative, strictly decreasing inside the support
    const BarrierSpec spec(0.7, 2);
    double prev = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 200; ++i) {
        const double z = 0.7 * i / 201.0;
        const double b = barrier(z, spec);
        REQUIRE(b >= 0.0);
        REQUIRE(b < prev);
        prev = b;
    }

    // algebraic identity barrier(z) z^p = h_eps(z)
    for (double z : {0.05, 0.2, 0.35, 0.69}) {
        REQUIRE(barrier(z, spec) * z * z == Approx(h_eps(z, 0.7)).epsilon(1e-12));
    }

    // analytic derivative against finite differences
    for (double z : {0.1, 0.3, 0.6}) {
        const double h = 1e-7;
        const double fd = (barrier(z + h, spec) - barrier(z - h, spec)) / (2 * h);
        REQUIRE(barrier_derivative(z, spec) == Approx(fd).epsilon(1e-5));
    }
}

TEST_CASE("heaviside values")
{
    for (double a : {0.1, 0.5, 1.0}) {
        REQUIRE(heaviside(0.0, a) == 1.0);
        REQUIRE(heaviside(0.7, a) == 1.0);
        REQUIRE(heaviside(-3.0 * a, a) == 0.0);
        REQUIRE(heaviside(-5.0 * a, a) == 0.0);
    }
    REQUIRE(heaviside(-1.5, 1.0) == Approx(0.5));
    // monotone nondecreasing
    double prev = -1;
    for (int i = 0; i <= 100; ++i) {
        const double v = heaviside(-3.0 + 3.0 * i / 100.0, 1.0);
        REQUIRE(v >= prev);
        prev = v;
    }
    REQUIRE_THROWS_AS(heaviside(0.0, 0.0), ContractError);
}

TEST_CASE("heaviside smoothness at branch points")
{
    auto f = +[](double z) { return heaviside(z, 1.0); };
    for (double x : {-3.0, -2.0, -1.0, 0.0}) {
        check_c1(f, x);
        check_c2(f, x);
    }
}

TEST_CASE("smooth_step vanishes exactly at -width")
{
    for (double a : {0.1, 0.5, 1.0}) {
        REQUIRE(smooth_step(0.0, a) == 1.0);
        REQUIRE(smooth_step(-a, a) == 0.0);
        REQUIRE(smooth_step(-0.5 * a, a) > 0.0);
        REQUIRE(smooth_step(-0.5 * a, a) < 1.0);
    }
}

TEST_CASE("delta values and unit integral")
{
    REQUIRE(delta(0.0, 1.0) == Approx(4.0 / 3.0));
    REQUIRE(delta(1.0, 1.0) == 0.0);

    // Simpson quadrature oracle over the support
    for (double a : {0.5, 1.0, 2.0}) {
        const int n = 4000;
        const double lo = -a, hi = a, h = (hi - lo) / n;
        double s = delta(lo, a) + delta(hi, a);
        for (int i = 1; i < n; ++i)
            s += delta(lo + i * h, a) * (i % 2 ? 4.0 : 2.0);
        s *= h / 3.0;
        REQUIRE(s == Approx(1.0).margin(1e-8));
    }
}

TEST_CASE("mollifier ramp values")
{
    REQUIRE(mollify_h(1.0) == 1.0);
    REQUIRE(mollify_h(5.0) == 1.0);
    REQUIRE(mollify_h(0.0) == 0.0);
    REQUIRE(mollify_h(-0.3) == 0.0);
    REQUIRE(mollify_hc(1.0, 0.01) == 0.0);
    REQUIRE(mollify_hc(1.01, 0.01) == 1.0);
    REQUIRE(mollify_hc(1.005, 0.01) == Approx(0.75));

    auto f = +[](double z) { return mollify_h(z); };
    check_c1(f, 1.0); // C^1 where the ramp saturates
}

TEST_CASE("ipc reference barrier")
{
    REQUIRE(ipc_barrier(1.0, 1.0) == 0.0);
    REQUIRE(ipc_barrier(0.5, 1.0) == Approx(0.25 * std::log(2.0)));
    double prev = 0.0;
    for (int i = 100; i >= 1; --i) {
        const double b = ipc_barrier(0.01 * i, 1.0);
        REQUIRE(b >= prev);
        prev = b;
    }
    REQUIRE_THROWS_AS(ipc_barrier(-1.0, 1.0), ContractError);
}

TEST_CASE("dual arithmetic differentiates the kernels")
{
    // f(z) = barrier(z) with one variable; compare against the analytic form
    const BarrierSpec spec(0.8, 1);
    for (double z0 : {0.1, 0.4, 0.75}) {
        Dual2 z = Dual2::variable(z0, 0, 1);
        Dual2 b = barrier(z, spec);
        REQUIRE(b.v == Approx(barrier(z0, spec)));
        REQUIRE(b.g[0] == Approx(barrier_derivative(z0, spec)).epsilon(1e-10));
        const double h = 1e-6;
        const double fd2 =
            (barrier(z0 + h, spec) - 2 * barrier(z0, spec) + barrier(z0 - h, spec)) / (h * h);
        REQUIRE(b.h(0, 0) == Approx(fd2).epsilon(1e-4));
    }

    // product/chain rules on a composite with two variables
    Dual2 x = Dual2::variable(0.3, 0, 2);
    Dual2 y = Dual2::variable(-0.2, 1, 2);
    Dual2 f = sqrt(x * x + y * y) * heaviside(y, 0.5);
    auto ref = [](double a, double b) { return std::hypot(a, b) * heaviside(b, 0.5); };
    const double h = 1e-6;
    REQUIRE(f.g[0] == Approx((ref(0.3 + h, -0.2) - ref(0.3 - h, -0.2)) / (2 * h)).epsilon(1e-6));
    REQUIRE(f.g[1] == Approx((ref(0.3, -0.2 + h) - ref(0.3, -0.2 - h)) / (2 * h)).epsilon(1e-6));
    REQUIRE(
        f.h(0, 1)
        == Approx(
               (ref(0.3 + h, -0.2 + h) - ref(0.3 + h, -0.2 - h) - ref(0.3 - h, -0.2 + h)
                + ref(0.3 - h, -0.2 - h))
               / (4 * h * h))
               .epsilon(1e-4));
}
