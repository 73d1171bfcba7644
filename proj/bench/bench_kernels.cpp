// Serial vs OpenMP timings for the mu-scan and zeta-sweep kernels.

#include <chrono>
#include <cstdio>
#include <vector>

#include <omp.h>

#include "radneumann/branch.hpp"
#include "radneumann/spectrum.hpp"

using namespace radneumann;

namespace {

template <class Fn>
double seconds(Fn&& fn)
{
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main()
{
    std::printf("threads: %d\n", omp_get_max_threads());
    int mismatches = 0;

    std::vector<double> grid;
    for (int i = 1; i <= 400; ++i)
        grid.push_back(0.5 * i);
    std::vector<ScanSample> a, b;
    const double ts = seconds([&] { a = scan_serial(grid, WeightFn::unit(), {2, 1.0}, {}); });
    const double tp = seconds([&] { b = scan_parallel(grid, WeightFn::unit(), {2, 1.0}, {}); });
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].miss != b[i].miss || a[i].zero_count != b[i].zero_count)
            ++mismatches;
    std::printf("mu scan    (%zu points): serial %.3fs  parallel %.3fs  speedup %.2f\n", grid.size(), ts, tp,
                ts / tp);

    const HTransform ht(make_rational_family(120.0, 1.0, 1.0));
    std::vector<SweepRoot> c, d;
    const double us = seconds([&] { c = zeta_sweep_serial(1.0, ht, {2, 1.0}, -0.99, 10.0, 2000); });
    const double up = seconds([&] { d = zeta_sweep_parallel(1.0, ht, {2, 1.0}, -0.99, 10.0, 2000); });
    if (c.size() != d.size())
        ++mismatches;
    else
        for (std::size_t i = 0; i < c.size(); ++i)
            if (c[i].zeta != d[i].zeta || c[i].nodal_count != d[i].nodal_count)
                ++mismatches;
    std::printf("zeta sweep (2000 cells):  serial %.3fs  parallel %.3fs  speedup %.2f\n", us, up, us / up);

    std::printf("results %s\n", mismatches == 0 ? "identical" : "DIFFER");
    return mismatches == 0 ? 0 : 1;
}
