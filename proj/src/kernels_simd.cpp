// Vectorized kernels.
//
// float: AVX2/FMA intrinsics selected at runtime, with a lane-blocked portable
// path on hosts without AVX2. double: lane-blocked portable path only (used by
// the gradient checks, never on a timed path).
//
// Reductions keep 16 (AVX2) or 8 (blocked) partial sums combined pairwise at
// the end, then add the remainder loop. The order is fixed per path.

#include <cmath>

#include "kernels_impl.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#define KGE_HAVE_X86 1
#endif

namespace kge::kernels::detail {

namespace blocked {

constexpr std::size_t kLanes = 8;

template <class T, class Term>
T reduce(std::size_t n, Term term) {
    T acc[kLanes] = {};
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes)
        for (std::size_t l = 0; l < kLanes; ++l) acc[l] += term(i + l);
    T tail = 0;
    for (; i < n; ++i) tail += term(i);
    return ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7])) + tail;
}

template <class T>
T dot(const T* a, const T* b, std::size_t n) {
    return reduce<T>(n, [=](std::size_t i) { return a[i] * b[i]; });
}
template <class T>
T trilinear(const T* h, const T* r, const T* t, std::size_t n) {
    return reduce<T>(n, [=](std::size_t i) { return h[i] * t[i] * r[i]; });
}
template <class T>
T l1_dist(const T* a, const T* b, std::size_t n) {
    return reduce<T>(n, [=](std::size_t i) { return std::abs(a[i] - b[i]); });
}
template <class T>
T l2_dist(const T* a, const T* b, std::size_t n) {
    return std::sqrt(reduce<T>(n, [=](std::size_t i) {
        const T d = a[i] - b[i];
        return d * d;
    }));
}
template <class T>
T translation_l1(const T* h, const T* r, const T* t, std::size_t n) {
    return reduce<T>(n, [=](std::size_t i) { return std::abs(h[i] + r[i] - t[i]); });
}
template <class T>
T translation_l2(const T* h, const T* r, const T* t, std::size_t n) {
    return std::sqrt(reduce<T>(n, [=](std::size_t i) {
        const T d = h[i] + r[i] - t[i];
        return d * d;
    }));
}
template <class T>
void axpy(T alpha, const T* x, const T* y, T* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = alpha * x[i] + y[i];
}
template <class T>
void conv3_rows(const T* h, const T* r, const T* t, const T* filters, std::size_t tau, T* out, std::size_t n) {
    for (std::size_t k = 0; k < tau; ++k) {
        const T w1 = filters[3 * k], w2 = filters[3 * k + 1], w3 = filters[3 * k + 2];
        T* row = out + k * n;
        for (std::size_t i = 0; i < n; ++i) row[i] = w1 * h[i] + w2 * r[i] + w3 * t[i];
    }
}
template <class T>
void relu(const T* x, T* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] > T(0) ? x[i] : T(0);
}
template <class T>
void relu_backward(const T* pre, const T* g, T* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = pre[i] > T(0) ? g[i] : T(0);
}
template <class T>
void translation_residual(const T* h, const T* r, const T* t, T* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = h[i] + r[i] - t[i];
}
template <class T>
void translation_sign(const T* h, const T* r, const T* t, T* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const T d = h[i] + r[i] - t[i];
        out[i] = static_cast<T>((d > T(0)) - (d < T(0)));
    }
}
template <class T>
void hadamard(const T* a, const T* b, T* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}
template <class T>
void l2_normalize(T* x, std::size_t n) {
    const T sq = reduce<T>(n, [=](std::size_t i) { return x[i] * x[i]; });
    if (sq <= T(0)) return;
    const T inv = T(1) / std::sqrt(sq);
    for (std::size_t i = 0; i < n; ++i) x[i] *= inv;
}
template <class T>
void adam_update(const AdamCoefficients& c, T* theta, T* m, T* v, const T* g, std::size_t n) {
    const T b1 = static_cast<T>(c.beta1), b2 = static_cast<T>(c.beta2);
    const T inv_bias1 = static_cast<T>(1.0 / c.bias1), inv_bias2 = static_cast<T>(1.0 / c.bias2);
    const T lr = static_cast<T>(c.lr), eps = static_cast<T>(c.eps);
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = b1 * m[i] + (T(1) - b1) * g[i];
        v[i] = b2 * v[i] + (T(1) - b2) * g[i] * g[i];
        theta[i] -= lr * (m[i] * inv_bias1) / (std::sqrt(v[i] * inv_bias2) + eps);
    }
}

}  // namespace blocked

#if KGE_HAVE_X86
namespace avx2 {

#define KGE_AVX2 __attribute__((target("avx2,fma")))

KGE_AVX2 inline float hsum(__m256 v) {
    const __m128 lo = _mm256_castps256_ps128(v);
    const __m128 hi = _mm256_extractf128_ps(v, 1);
    __m128 s = _mm_add_ps(lo, hi);
    s = _mm_add_ps(s, _mm_movehl_ps(s, s));
    s = _mm_add_ss(s, _mm_movehdup_ps(s));
    return _mm_cvtss_f32(s);
}

KGE_AVX2 inline __m256 abs(__m256 x) { return _mm256_andnot_ps(_mm256_set1_ps(-0.0f), x); }

// Reduction skeleton: two 8-wide accumulators over 16-element strides, one
// 8-wide step, then a scalar tail.
template <class VecTerm, class ScalarTerm>
KGE_AVX2 inline float reduce(std::size_t n, VecTerm vterm, ScalarTerm sterm) {
    __m256 acc0 = _mm256_setzero_ps();
    __m256 acc1 = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        acc0 = vterm(acc0, i);
        acc1 = vterm(acc1, i + 8);
    }
    if (i + 8 <= n) {
        acc0 = vterm(acc0, i);
        i += 8;
    }
    float tail = 0.0f;
    for (; i < n; ++i) tail += sterm(i);
    return hsum(_mm256_add_ps(acc0, acc1)) + tail;
}

KGE_AVX2 float dot(const float* a, const float* b, std::size_t n) {
    return reduce(
        n,
        [=](__m256 acc, std::size_t i) KGE_AVX2 {
            return _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc);
        },
        [=](std::size_t i) { return a[i] * b[i]; });
}

KGE_AVX2 float trilinear(const float* h, const float* r, const float* t, std::size_t n) {
    return reduce(
        n,
        [=](__m256 acc, std::size_t i) KGE_AVX2 {
            const __m256 ht = _mm256_mul_ps(_mm256_loadu_ps(h + i), _mm256_loadu_ps(t + i));
            return _mm256_fmadd_ps(ht, _mm256_loadu_ps(r + i), acc);
        },
        [=](std::size_t i) { return h[i] * t[i] * r[i]; });
}

KGE_AVX2 float l1_dist(const float* a, const float* b, std::size_t n) {
    return reduce(
        n,
        [=](__m256 acc, std::size_t i) KGE_AVX2 {
            return _mm256_add_ps(acc, abs(_mm256_sub_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i))));
        },
        [=](std::size_t i) { return std::abs(a[i] - b[i]); });
}

KGE_AVX2 float l2_dist(const float* a, const float* b, std::size_t n) {
    return std::sqrt(reduce(
        n,
        [=](__m256 acc, std::size_t i) KGE_AVX2 {
            const __m256 d = _mm256_sub_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i));
            return _mm256_fmadd_ps(d, d, acc);
        },
        [=](std::size_t i) {
            const float d = a[i] - b[i];
            return d * d;
        }));
}

KGE_AVX2 float translation_l1(const float* h, const float* r, const float* t, std::size_t n) {
    return reduce(
        n,
        [=](__m256 acc, std::size_t i) KGE_AVX2 {
            const __m256 d = _mm256_sub_ps(_mm256_add_ps(_mm256_loadu_ps(h + i), _mm256_loadu_ps(r + i)),
                                           _mm256_loadu_ps(t + i));
            return _mm256_add_ps(acc, abs(d));
        },
        [=](std::size_t i) { return std::abs(h[i] + r[i] - t[i]); });
}

KGE_AVX2 float translation_l2(const float* h, const float* r, const float* t, std::size_t n) {
    return std::sqrt(reduce(
        n,
        [=](__m256 acc, std::size_t i) KGE_AVX2 {
            const __m256 d = _mm256_sub_ps(_mm256_add_ps(_mm256_loadu_ps(h + i), _mm256_loadu_ps(r + i)),
                                           _mm256_loadu_ps(t + i));
            return _mm256_fmadd_ps(d, d, acc);
        },
        [=](std::size_t i) {
            const float d = h[i] + r[i] - t[i];
            return d * d;
        }));
}

KGE_AVX2 void axpy(float alpha, const float* x, const float* y, float* out, std::size_t n) {
    const __m256 va = _mm256_set1_ps(alpha);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        _mm256_storeu_ps(out + i, _mm256_fmadd_ps(va, _mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i)));
    for (; i < n; ++i) out[i] = alpha * x[i] + y[i];
}

KGE_AVX2 void conv3_rows(const float* h, const float* r, const float* t, const float* filters, std::size_t tau,
                         float* out, std::size_t n) {
    for (std::size_t k = 0; k < tau; ++k) {
        const float w1 = filters[3 * k], w2 = filters[3 * k + 1], w3 = filters[3 * k + 2];
        const __m256 v1 = _mm256_set1_ps(w1), v2 = _mm256_set1_ps(w2), v3 = _mm256_set1_ps(w3);
        float* row = out + k * n;
        std::size_t i = 0;
        for (; i + 8 <= n; i += 8) {
            __m256 acc = _mm256_mul_ps(v1, _mm256_loadu_ps(h + i));
            acc = _mm256_fmadd_ps(v2, _mm256_loadu_ps(r + i), acc);
            acc = _mm256_fmadd_ps(v3, _mm256_loadu_ps(t + i), acc);
            _mm256_storeu_ps(row + i, acc);
        }
        for (; i < n; ++i) row[i] = w1 * h[i] + w2 * r[i] + w3 * t[i];
    }
}

KGE_AVX2 void relu(const float* x, float* out, std::size_t n) {
    const __m256 zero = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) _mm256_storeu_ps(out + i, _mm256_max_ps(_mm256_loadu_ps(x + i), zero));
    for (; i < n; ++i) out[i] = x[i] > 0.0f ? x[i] : 0.0f;
}

KGE_AVX2 void relu_backward(const float* pre, const float* g, float* out, std::size_t n) {
    const __m256 zero = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 mask = _mm256_cmp_ps(_mm256_loadu_ps(pre + i), zero, _CMP_GT_OQ);
        _mm256_storeu_ps(out + i, _mm256_and_ps(mask, _mm256_loadu_ps(g + i)));
    }
    for (; i < n; ++i) out[i] = pre[i] > 0.0f ? g[i] : 0.0f;
}

KGE_AVX2 void translation_residual(const float* h, const float* r, const float* t, float* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 d = _mm256_sub_ps(_mm256_add_ps(_mm256_loadu_ps(h + i), _mm256_loadu_ps(r + i)),
                                       _mm256_loadu_ps(t + i));
        _mm256_storeu_ps(out + i, d);
    }
    for (; i < n; ++i) out[i] = h[i] + r[i] - t[i];
}

KGE_AVX2 void translation_sign(const float* h, const float* r, const float* t, float* out, std::size_t n) {
    const __m256 zero = _mm256_setzero_ps();
    const __m256 one = _mm256_set1_ps(1.0f);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 d = _mm256_sub_ps(_mm256_add_ps(_mm256_loadu_ps(h + i), _mm256_loadu_ps(r + i)),
                                       _mm256_loadu_ps(t + i));
        const __m256 pos = _mm256_and_ps(_mm256_cmp_ps(d, zero, _CMP_GT_OQ), one);
        const __m256 neg = _mm256_and_ps(_mm256_cmp_ps(d, zero, _CMP_LT_OQ), one);
        _mm256_storeu_ps(out + i, _mm256_sub_ps(pos, neg));
    }
    for (; i < n; ++i) {
        const float d = h[i] + r[i] - t[i];
        out[i] = static_cast<float>((d > 0.0f) - (d < 0.0f));
    }
}

KGE_AVX2 void hadamard(const float* a, const float* b, float* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) _mm256_storeu_ps(out + i, _mm256_mul_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

KGE_AVX2 void l2_normalize(float* x, std::size_t n) {
    const float sq = reduce(
        n,
        [=](__m256 acc, std::size_t i) KGE_AVX2 {
            const __m256 v = _mm256_loadu_ps(x + i);
            return _mm256_fmadd_ps(v, v, acc);
        },
        [=](std::size_t i) { return x[i] * x[i]; });
    if (sq <= 0.0f) return;
    const float inv = 1.0f / std::sqrt(sq);
    const __m256 vinv = _mm256_set1_ps(inv);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) _mm256_storeu_ps(x + i, _mm256_mul_ps(_mm256_loadu_ps(x + i), vinv));
    for (; i < n; ++i) x[i] *= inv;
}

KGE_AVX2 void adam_update(const AdamCoefficients& c, float* theta, float* m, float* v, const float* g,
                          std::size_t n) {
    const float b1 = static_cast<float>(c.beta1), b2 = static_cast<float>(c.beta2);
    const float inv_bias1 = static_cast<float>(1.0 / c.bias1), inv_bias2 = static_cast<float>(1.0 / c.bias2);
    const float lr = static_cast<float>(c.lr), eps = static_cast<float>(c.eps);
    const __m256 vb1 = _mm256_set1_ps(b1), vb2 = _mm256_set1_ps(b2);
    const __m256 vc1 = _mm256_set1_ps(1.0f - b1), vc2 = _mm256_set1_ps(1.0f - b2);
    const __m256 vib1 = _mm256_set1_ps(inv_bias1), vib2 = _mm256_set1_ps(inv_bias2);
    const __m256 vlr = _mm256_set1_ps(lr), veps = _mm256_set1_ps(eps);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 gi = _mm256_loadu_ps(g + i);
        const __m256 mi = _mm256_fmadd_ps(vb1, _mm256_loadu_ps(m + i), _mm256_mul_ps(vc1, gi));
        const __m256 vi = _mm256_fmadd_ps(vb2, _mm256_loadu_ps(v + i), _mm256_mul_ps(_mm256_mul_ps(vc2, gi), gi));
        _mm256_storeu_ps(m + i, mi);
        _mm256_storeu_ps(v + i, vi);
        const __m256 denom = _mm256_add_ps(_mm256_sqrt_ps(_mm256_mul_ps(vi, vib2)), veps);
        const __m256 step = _mm256_div_ps(_mm256_mul_ps(vlr, _mm256_mul_ps(mi, vib1)), denom);
        _mm256_storeu_ps(theta + i, _mm256_sub_ps(_mm256_loadu_ps(theta + i), step));
    }
    for (; i < n; ++i) {
        m[i] = b1 * m[i] + (1.0f - b1) * g[i];
        v[i] = b2 * v[i] + (1.0f - b2) * g[i] * g[i];
        theta[i] -= lr * (m[i] * inv_bias1) / (std::sqrt(v[i] * inv_bias2) + eps);
    }
}

#undef KGE_AVX2

bool detect() noexcept {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

const bool kAvailable = detect();

}  // namespace avx2
#endif

bool simd_active() noexcept {
#if KGE_HAVE_X86
    return avx2::kAvailable;
#else
    return true;
#endif
}

const char* simd_isa() noexcept {
#if KGE_HAVE_X86
    return avx2::kAvailable ? "avx2+fma" : "blocked-8";
#else
    return "blocked-8";
#endif
}

// Path selection: templates fall through to the blocked loops (double);
// the float overloads prefer AVX2.
namespace path {

using blocked::dot;
using blocked::trilinear;
using blocked::l1_dist;
using blocked::l2_dist;
using blocked::axpy;
using blocked::conv3_rows;
using blocked::relu;
using blocked::relu_backward;
using blocked::translation_l1;
using blocked::translation_l2;
using blocked::translation_residual;
using blocked::translation_sign;
using blocked::hadamard;
using blocked::l2_normalize;
using blocked::adam_update;

#if KGE_HAVE_X86
#define KGE_PICK(call) return avx2::kAvailable ? avx2::call : blocked::call
#define KGE_PICK_VOID(call) \
    if (avx2::kAvailable)   \
        avx2::call;         \
    else                    \
        blocked::call
#else
#define KGE_PICK(call) return blocked::call
#define KGE_PICK_VOID(call) blocked::call
#endif

inline float dot(const float* a, const float* b, std::size_t n) { KGE_PICK(dot(a, b, n)); }
inline float trilinear(const float* h, const float* r, const float* t, std::size_t n) {
    KGE_PICK(trilinear(h, r, t, n));
}
inline float l1_dist(const float* a, const float* b, std::size_t n) { KGE_PICK(l1_dist(a, b, n)); }
inline float l2_dist(const float* a, const float* b, std::size_t n) { KGE_PICK(l2_dist(a, b, n)); }
inline void axpy(float alpha, const float* x, const float* y, float* out, std::size_t n) {
    KGE_PICK_VOID(axpy(alpha, x, y, out, n));
}
inline void conv3_rows(const float* h, const float* r, const float* t, const float* f, std::size_t tau, float* out,
                       std::size_t n) {
    KGE_PICK_VOID(conv3_rows(h, r, t, f, tau, out, n));
}
inline void relu(const float* x, float* out, std::size_t n) { KGE_PICK_VOID(relu(x, out, n)); }
inline void relu_backward(const float* pre, const float* g, float* out, std::size_t n) {
    KGE_PICK_VOID(relu_backward(pre, g, out, n));
}
inline float translation_l1(const float* h, const float* r, const float* t, std::size_t n) {
    KGE_PICK(translation_l1(h, r, t, n));
}
inline float translation_l2(const float* h, const float* r, const float* t, std::size_t n) {
    KGE_PICK(translation_l2(h, r, t, n));
}
inline void translation_residual(const float* h, const float* r, const float* t, float* out, std::size_t n) {
    KGE_PICK_VOID(translation_residual(h, r, t, out, n));
}
inline void translation_sign(const float* h, const float* r, const float* t, float* out, std::size_t n) {
    KGE_PICK_VOID(translation_sign(h, r, t, out, n));
}
inline void hadamard(const float* a, const float* b, float* out, std::size_t n) { KGE_PICK_VOID(hadamard(a, b, out, n)); }
inline void l2_normalize(float* x, std::size_t n) { KGE_PICK_VOID(l2_normalize(x, n)); }
inline void adam_update(const AdamCoefficients& c, float* theta, float* m, float* v, const float* g, std::size_t n) {
    KGE_PICK_VOID(adam_update(c, theta, m, v, g, n));
}

#undef KGE_PICK
#undef KGE_PICK_VOID

}  // namespace path

template <class T>
T Vectorized<T>::dot(const T* a, const T* b, std::size_t n) {
    return path::dot(a, b, n);
}
template <class T>
T Vectorized<T>::trilinear(const T* h, const T* r, const T* t, std::size_t n) {
    return path::trilinear(h, r, t, n);
}
template <class T>
T Vectorized<T>::l1_dist(const T* a, const T* b, std::size_t n) {
    return path::l1_dist(a, b, n);
}
template <class T>
T Vectorized<T>::l2_dist(const T* a, const T* b, std::size_t n) {
    return path::l2_dist(a, b, n);
}
template <class T>
void Vectorized<T>::axpy(T alpha, const T* x, const T* y, T* out, std::size_t n) {
    path::axpy(alpha, x, y, out, n);
}
template <class T>
void Vectorized<T>::conv3_rows(const T* h, const T* r, const T* t, const T* f, std::size_t tau, T* out,
                               std::size_t n) {
    path::conv3_rows(h, r, t, f, tau, out, n);
}
template <class T>
void Vectorized<T>::relu(const T* x, T* out, std::size_t n) {
    path::relu(x, out, n);
}
template <class T>
void Vectorized<T>::relu_backward(const T* pre, const T* g, T* out, std::size_t n) {
    path::relu_backward(pre, g, out, n);
}
template <class T>
T Vectorized<T>::translation_l1(const T* h, const T* r, const T* t, std::size_t n) {
    return path::translation_l1(h, r, t, n);
}
template <class T>
T Vectorized<T>::translation_l2(const T* h, const T* r, const T* t, std::size_t n) {
    return path::translation_l2(h, r, t, n);
}
template <class T>
void Vectorized<T>::translation_residual(const T* h, const T* r, const T* t, T* out, std::size_t n) {
    path::translation_residual(h, r, t, out, n);
}
template <class T>
void Vectorized<T>::translation_sign(const T* h, const T* r, const T* t, T* out, std::size_t n) {
    path::translation_sign(h, r, t, out, n);
}
template <class T>
void Vectorized<T>::hadamard(const T* a, const T* b, T* out, std::size_t n) {
    path::hadamard(a, b, out, n);
}
template <class T>
void Vectorized<T>::l2_normalize(T* x, std::size_t n) {
    path::l2_normalize(x, n);
}
template <class T>
void Vectorized<T>::adam_update(const AdamCoefficients& c, T* theta, T* m, T* v, const T* g, std::size_t n) {
    path::adam_update(c, theta, m, v, g, n);
}

template struct Vectorized<float>;
template struct Vectorized<double>;

}  // namespace kge::kernels::detail
