// Scalar reference kernels: strictly sequential left-to-right accumulation.
// This translation unit is compiled with -fno-tree-vectorize.

#include <cmath>

#include "kernels_impl.hpp"

namespace kge::kernels::detail {

template <class T>
T Scalar<T>::dot(const T* a, const T* b, std::size_t n) {
    T acc = 0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

template <class T>
T Scalar<T>::trilinear(const T* h, const T* r, const T* t, std::size_t n) {
    T acc = 0;
    for (std::size_t i = 0; i < n; ++i) acc += h[i] * t[i] * r[i];
    return acc;
}

template <class T>
T Scalar<T>::l1_dist(const T* a, const T* b, std::size_t n) {
    T acc = 0;
    for (std::size_t i = 0; i < n; ++i) acc += std::abs(a[i] - b[i]);
    return acc;
}

template <class T>
T Scalar<T>::l2_dist(const T* a, const T* b, std::size_t n) {
    T acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const T d = a[i] - b[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

template <class T>
void Scalar<T>::axpy(T alpha, const T* x, const T* y, T* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = alpha * x[i] + y[i];
}

template <class T>
void Scalar<T>::conv3_rows(const T* h, const T* r, const T* t, const T* filters, std::size_t tau, T* out,
                           std::size_t n) {
    for (std::size_t k = 0; k < tau; ++k) {
        const T w1 = filters[3 * k], w2 = filters[3 * k + 1], w3 = filters[3 * k + 2];
        T* row = out + k * n;
        for (std::size_t i = 0; i < n; ++i) row[i] = w1 * h[i] + w2 * r[i] + w3 * t[i];
    }
}

template <class T>
void Scalar<T>::relu(const T* x, T* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] > T(0) ? x[i] : T(0);
}

template <class T>
void Scalar<T>::relu_backward(const T* pre, const T* g, T* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = pre[i] > T(0) ? g[i] : T(0);
}

template <class T>
T Scalar<T>::translation_l1(const T* h, const T* r, const T* t, std::size_t n) {
    T acc = 0;
    for (std::size_t i = 0; i < n; ++i) acc += std::abs(h[i] + r[i] - t[i]);
    return acc;
}

template <class T>
T Scalar<T>::translation_l2(const T* h, const T* r, const T* t, std::size_t n) {
    T acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const T d = h[i] + r[i] - t[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

template <class T>
void Scalar<T>::translation_residual(const T* h, const T* r, const T* t, T* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = h[i] + r[i] - t[i];
}

template <class T>
void Scalar<T>::translation_sign(const T* h, const T* r, const T* t, T* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const T d = h[i] + r[i] - t[i];
        out[i] = static_cast<T>((d > T(0)) - (d < T(0)));
    }
}

template <class T>
void Scalar<T>::hadamard(const T* a, const T* b, T* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

template <class T>
void Scalar<T>::l2_normalize(T* x, std::size_t n) {
    T sq = 0;
    for (std::size_t i = 0; i < n; ++i) sq += x[i] * x[i];
    if (sq <= T(0)) return;
    const T inv = T(1) / std::sqrt(sq);
    for (std::size_t i = 0; i < n; ++i) x[i] *= inv;
}

template <class T>
void Scalar<T>::adam_update(const AdamCoefficients& c, T* theta, T* m, T* v, const T* g, std::size_t n) {
    const T b1 = static_cast<T>(c.beta1), b2 = static_cast<T>(c.beta2);
    const T inv_bias1 = static_cast<T>(1.0 / c.bias1), inv_bias2 = static_cast<T>(1.0 / c.bias2);
    const T lr = static_cast<T>(c.lr), eps = static_cast<T>(c.eps);
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = b1 * m[i] + (T(1) - b1) * g[i];
        v[i] = b2 * v[i] + (T(1) - b2) * g[i] * g[i];
        const T m_hat = m[i] * inv_bias1;
        const T v_hat = v[i] * inv_bias2;
        theta[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
}

template struct Scalar<float>;
template struct Scalar<double>;

}  // namespace kge::kernels::detail
