#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace cbp {

template <typename T, int N>
using VecN = Eigen::Matrix<T, N, 1>;

template <int N>
using Vec = Eigen::Matrix<double, N, 1>;

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

/// Thrown on violated input contracts (bad scenes, degenerate geometry, ...).
struct ContractError : std::runtime_error {
    explicit ContractError(const std::string& msg) : std::runtime_error(msg) {}
};

inline void check(bool ok, const std::string& msg)
{
    if (!ok)
        throw ContractError(msg);
}

// 2D scalar cross product.
template <typename T>
T cross2(const VecN<T, 2>& a, const VecN<T, 2>& b)
{
    return a.x() * b.y() - a.y() * b.x();
}

template <typename T>
T sqr(const T& x)
{
    return x * x;
}

// Process-wide cap on worker threads (THREADS environment variable in the
// CLI). Results are deterministic regardless of the setting: workers fill
// preallocated slots that are reduced serially.
inline int& max_threads_ref()
{
    static int t = 1;
    return t;
}
inline void set_max_threads(int t) { max_threads_ref() = t < 1 ? 1 : t; }
inline int max_threads() { return max_threads_ref(); }

} // namespace cbp

#include <thread>

namespace cbp {

// Static-chunked parallel map over [0, n). Workers only write to their own
// indices; callers reduce serially afterwards.
template <class F>
void parallel_for(int n, F&& f)
{
    const int nt = std::min(max_threads(), n);
    if (nt <= 1) {
        for (int i = 0; i < n; ++i)
            f(i);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(nt);
    for (int t = 0; t < nt; ++t) {
        const int lo = int(int64_t(n) * t / nt);
        const int hi = int(int64_t(n) * (t + 1) / nt);
        workers.emplace_back([lo, hi, &f] {
            for (int i = lo; i < hi; ++i)
                f(i);
        });
    }
    for (auto& w : workers)
        w.join();
}

} // namespace cbp
