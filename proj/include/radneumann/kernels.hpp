#pragma once

// Data-parallel evaluation of independent shooting problems. Every kernel
// has a serial reference twin; both must return bit-identical results.

#include <cstddef>
#include <exception>
#include <vector>

namespace radneumann::kernels {

template <class T, class Fn>
std::vector<T> map_serial(std::size_t n, Fn&& fn)
{
    std::vector<T> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(fn(i));
    return out;
}

/// OpenMP version of map_serial. The first exception (in index order) is
/// rethrown after the loop completes.
template <class T, class Fn>
std::vector<T> map_parallel(std::size_t n, Fn&& fn)
{
    std::vector<T> out(n);
    std::vector<std::exception_ptr> errors(n);
    const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < count; ++i) {
        try {
            out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    return out;
}

template <class T, class Fn>
std::vector<T> map(std::size_t n, bool parallel, Fn&& fn)
{
    return parallel ? map_parallel<T>(n, fn) : map_serial<T>(n, fn);
}

}  // namespace radneumann::kernels
