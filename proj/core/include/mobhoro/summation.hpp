#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace mobhoro {

// Pairwise (tree) summation. The split points depend only on the length, so
// the result is reproducible bit-for-bit regardless of thread count.
template <class T>
T pairwise_sum(std::span<const T> xs)
{
    constexpr std::size_t leaf = 64;
    if (xs.size() <= leaf) {
        T acc{};
        for (const T& x : xs) acc += x;
        return acc;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

// Pairwise sum of f(i) for i in [0, n) without materialising the terms.
template <class T, class F>
T pairwise_sum_of(std::size_t begin, std::size_t end, F&& f)
{
    constexpr std::size_t leaf = 64;
    if (end - begin <= leaf) {
        T acc{};
        for (std::size_t i = begin; i < end; ++i) acc += f(i);
        return acc;
    }
    const std::size_t mid = begin + (end - begin) / 2;
    return pairwise_sum_of<T>(begin, mid, f) + pairwise_sum_of<T>(mid, end, f);
}

}  // namespace mobhoro
