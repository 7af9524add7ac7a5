#pragma once
// Pointer-level kernel implementations. Scalar<T> lives in kernels_scalar.cpp
// (built with -fno-tree-vectorize), Vectorized<T> in kernels_simd.cpp.

#include <cstddef>

#include "kge/kernels.hpp"

namespace kge::kernels::detail {

#define KGE_KERNEL_SET(T)                                                                    \
    static T dot(const T* a, const T* b, std::size_t n);                                     \
    static T trilinear(const T* h, const T* r, const T* t, std::size_t n);                   \
    static T l1_dist(const T* a, const T* b, std::size_t n);                                 \
    static T l2_dist(const T* a, const T* b, std::size_t n);                                 \
    static void axpy(T alpha, const T* x, const T* y, T* out, std::size_t n);                \
    static void conv3_rows(const T* h, const T* r, const T* t, const T* filters,             \
                           std::size_t tau, T* out, std::size_t n);                          \
    static void relu(const T* x, T* out, std::size_t n);                                     \
    static void relu_backward(const T* pre, const T* g, T* out, std::size_t n);              \
    static T translation_l1(const T* h, const T* r, const T* t, std::size_t n);              \
    static T translation_l2(const T* h, const T* r, const T* t, std::size_t n);              \
    static void translation_residual(const T* h, const T* r, const T* t, T* out, std::size_t n); \
    static void translation_sign(const T* h, const T* r, const T* t, T* out, std::size_t n); \
    static void hadamard(const T* a, const T* b, T* out, std::size_t n);                     \
    static void l2_normalize(T* x, std::size_t n);                                           \
    static void adam_update(const AdamCoefficients& c, T* theta, T* m, T* v, const T* g, std::size_t n);

template <class T>
struct Scalar {
    KGE_KERNEL_SET(T)
};

template <class T>
struct Vectorized {
    KGE_KERNEL_SET(T)
};

#undef KGE_KERNEL_SET

extern template struct Scalar<float>;
extern template struct Scalar<double>;
extern template struct Vectorized<float>;
extern template struct Vectorized<double>;

bool simd_active() noexcept;
const char* simd_isa() noexcept;

}  // namespace kge::kernels::detail
