#include "expfunc/kernels.hpp"

#include <algorithm>
#include <exception>
#include <mutex>

#include <omp.h>

namespace expfunc {

int resolve_workers(int workers) { return workers > 0 ? workers : omp_get_max_threads(); }

std::vector<double> evaluate_points(const RealFn& f, const std::vector<double>& xs, Exec exec, int workers) {
    const auto n = static_cast<std::ptrdiff_t>(xs.size());
    std::vector<double> out(xs.size());
    if (exec == Exec::serial) {
        for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = f(xs[i]);
        return out;
    }
    std::exception_ptr first;
    std::ptrdiff_t first_index = n;
    std::mutex m;
#pragma omp parallel for schedule(dynamic, 8) num_threads(resolve_workers(workers))
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            out[i] = f(xs[i]);
        } catch (...) {
            std::lock_guard<std::mutex> lock(m);
            // keep the lowest index so the reported failure does not depend on scheduling
            if (i < first_index) {
                first_index = i;
                first = std::current_exception();
            }
        }
    }
    if (first) std::rethrow_exception(first);
    return out;
}

namespace {

double convolve_at(const std::vector<double>& a, const std::vector<double>& b, std::ptrdiff_t k) {
    const auto na = static_cast<std::ptrdiff_t>(a.size());
    const auto nb = static_cast<std::ptrdiff_t>(b.size());
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, k - nb + 1);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(na - 1, k);
    // pairwise from both ends so that swapping a and b gives the same sum
    double s = 0.0;
    std::ptrdiff_t i = lo;
    std::ptrdiff_t j = hi;
    while (i < j) {
        s += a[i] * b[k - i] + a[j] * b[k - j];
        ++i;
        --j;
    }
    if (i == j) s += a[i] * b[k - i];
    return s;
}

}  // namespace

std::vector<double> lattice_convolve(const std::vector<double>& a, const std::vector<double>& b, double h, Exec exec,
                                     int workers) {
    if (a.empty() || b.empty()) return {};
    const auto n = static_cast<std::ptrdiff_t>(a.size() + b.size() - 1);
    std::vector<double> c(static_cast<std::size_t>(n));
    if (exec == Exec::serial) {
        for (std::ptrdiff_t k = 0; k < n; ++k) c[k] = h * convolve_at(a, b, k);
        return c;
    }
#pragma omp parallel for schedule(static) num_threads(resolve_workers(workers))
    for (std::ptrdiff_t k = 0; k < n; ++k) c[k] = h * convolve_at(a, b, k);
    return c;
}

}  // namespace expfunc
