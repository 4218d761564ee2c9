#include "helivort/detail/pair_sums.hpp"

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace helivort::detail {

namespace {

int thread_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

int thread_index() {
#ifdef _OPENMP
    return omp_get_thread_num();
#else
    return 0;
#endif
}

}  // namespace

TargetSums pair_sums(std::span<const double> target_tx, std::span<const double> target_ty,
                     const SourceArrays &src, double delta2) {
    const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(target_tx.size());
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(src.size());
    TargetSums out(target_tx.size());
    const double *sx = src.tx.data();
    const double *sy = src.ty.data();
    const double *ss = src.strength.data();

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < m; ++i) {
        const double xi = target_tx[i];
        const double yi = target_ty[i];
        double lg = 0.0;
        double ax = 0.0;
        double ay = 0.0;
#pragma omp simd reduction(+ : lg, ax, ay)
        for (std::ptrdiff_t j = 0; j < n; ++j) {
            const double dx = xi - sx[j];
            const double dy = yi - sy[j];
            const double q = dx * dx + dy * dy + delta2;
            const double c = ss[j] / q;
            ax += c * dx;
            ay += c * dy;
            lg += ss[j] * std::log(q);
        }
        out.log_sum[i] = 0.5 * lg;
        out.flat_x[i] = ax;
        out.flat_y[i] = ay;
    }
    return out;
}

TargetSums pair_sums_self(const SourceArrays &src, double delta2) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(src.size());
    const double *sx = src.tx.data();
    const double *sy = src.ty.data();
    const double *ss = src.strength.data();
    const int nthreads = thread_count();

    // One private accumulator per thread; reduced in thread order so the
    // result only depends on the thread count.
    std::vector<TargetSums> partial(nthreads, TargetSums(src.size()));

#pragma omp parallel num_threads(nthreads)
    {
        TargetSums &acc = partial[thread_index()];
        double *lg_out = acc.log_sum.data();
        double *ax_out = acc.flat_x.data();
        double *ay_out = acc.flat_y.data();
#pragma omp for schedule(static, 1)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            const double xi = sx[i];
            const double yi = sy[i];
            const double si = ss[i];
            double lg = 0.0;
            double ax = 0.0;
            double ay = 0.0;
#pragma omp simd reduction(+ : lg, ax, ay)
            for (std::ptrdiff_t j = i + 1; j < n; ++j) {
                const double dx = xi - sx[j];
                const double dy = yi - sy[j];
                const double q = dx * dx + dy * dy + delta2;
                const double inv = 1.0 / q;
                const double l = std::log(q);
                const double cj = ss[j] * inv;
                const double ci = si * inv;
                ax += cj * dx;
                ay += cj * dy;
                lg += ss[j] * l;
                ax_out[j] -= ci * dx;
                ay_out[j] -= ci * dy;
                lg_out[j] += si * l;
            }
            lg_out[i] += lg + si * std::log(delta2);
            ax_out[i] += ax;
            ay_out[i] += ay;
        }
    }

    TargetSums out = std::move(partial[0]);
    for (int t = 1; t < nthreads; ++t) {
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            out.log_sum[i] += partial[t].log_sum[i];
            out.flat_x[i] += partial[t].flat_x[i];
            out.flat_y[i] += partial[t].flat_y[i];
        }
    }
    for (double &v : out.log_sum) v *= 0.5;
    return out;
}

double pair_log_energy(const SourceArrays &src, double delta2) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(src.size());
    const double *sx = src.tx.data();
    const double *sy = src.ty.data();
    const double *ss = src.strength.data();
    std::vector<double> rows(src.size(), 0.0);

#pragma omp parallel for schedule(static, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const double xi = sx[i];
        const double yi = sy[i];
        double lg = 0.0;
#pragma omp simd reduction(+ : lg)
        for (std::ptrdiff_t j = i + 1; j < n; ++j) {
            const double dx = xi - sx[j];
            const double dy = yi - sy[j];
            lg += ss[j] * std::log(dx * dx + dy * dy + delta2);
        }
        rows[i] = ss[i] * lg;
    }
    double total = 0.0;
    for (double r : rows) total += r;
    return 0.5 * total;
}

}  // namespace helivort::detail
