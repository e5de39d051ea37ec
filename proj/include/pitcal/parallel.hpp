#pragma once

#include <cstddef>
#include <exception>
#include <type_traits>

namespace pitcal {

/// Execution policy for the batch kernels. Every parallel kernel has the
/// serial loop as its reference implementation; both produce bitwise
/// identical results because work items are independent and reductions are
/// performed serially over per-item slots.
enum class Exec { serial, parallel };

namespace detail {
void parallel_for_impl(std::size_t n, void* ctx, void (*body)(void*, std::size_t));
}

/// Run body(i) for i in [0, n). Exceptions thrown by any iteration are
/// captured and the first one rethrown after the loop joins.
template <typename F>
void for_each_index(std::size_t n, Exec exec, F&& body) {
    if (exec == Exec::serial) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    using Body = std::remove_reference_t<F>;
    auto trampoline = [](void* ctx, std::size_t i) { (*static_cast<Body*>(ctx))(i); };
    detail::parallel_for_impl(n, &body, trampoline);
}

/// Number of threads the parallel policy would use (1 without OpenMP).
int parallel_threads();

} // namespace pitcal
