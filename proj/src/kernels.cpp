#include "kge/kernels.hpp"

#include <string>

#include "kernels_impl.hpp"
#include "kge/errors.hpp"

namespace kge {

std::string_view to_string(Backend b) noexcept { return b == Backend::scalar ? "scalar" : "vector"; }

Backend parse_backend(std::string_view name) {
    if (name == "scalar") return Backend::scalar;
    if (name == "vector" || name == "vectorized") return Backend::vectorized;
    throw ArgumentError("unknown backend '" + std::string(name) + "' (valid: scalar, vector)");
}

namespace kernels {

namespace {

void require_same(std::size_t a, std::size_t b, const char* op) {
    if (a != b)
        throw ArgumentError(std::string(op) + ": length mismatch (" + std::to_string(a) + " vs " + std::to_string(b) +
                            ")");
}

// Routes a call to Scalar<T> or Vectorized<T>. A scalar-only build never
// touches the vectorized implementations.
template <class T, class F>
decltype(auto) dispatch(Backend b, F&& f) {
#ifdef KGE_SCALAR_ONLY
    (void)b;
    return f(detail::Scalar<T>{});
#else
    if (b == Backend::scalar) return f(detail::Scalar<T>{});
    return f(detail::Vectorized<T>{});
#endif
}

template <class T>
T dot_t(Backend b, cspan<T> x, cspan<T> y) {
    require_same(x.size(), y.size(), "dot");
    return dispatch<T>(b, [&](auto k) { return k.dot(x.data(), y.data(), x.size()); });
}

template <class T>
T trilinear_t(Backend b, cspan<T> h, cspan<T> r, cspan<T> t) {
    require_same(h.size(), r.size(), "trilinear");
    require_same(h.size(), t.size(), "trilinear");
    return dispatch<T>(b, [&](auto k) { return k.trilinear(h.data(), r.data(), t.data(), h.size()); });
}

template <class T>
T l1_t(Backend b, cspan<T> x, cspan<T> y) {
    require_same(x.size(), y.size(), "l1_dist");
    return dispatch<T>(b, [&](auto k) { return k.l1_dist(x.data(), y.data(), x.size()); });
}

template <class T>
T l2_t(Backend b, cspan<T> x, cspan<T> y) {
    require_same(x.size(), y.size(), "l2_dist");
    return dispatch<T>(b, [&](auto k) { return k.l2_dist(x.data(), y.data(), x.size()); });
}

template <class T>
void axpy_t(Backend b, T alpha, cspan<T> x, cspan<T> y, std::span<T> out) {
    require_same(x.size(), y.size(), "axpy");
    require_same(x.size(), out.size(), "axpy");
    dispatch<T>(b, [&](auto k) { k.axpy(alpha, x.data(), y.data(), out.data(), x.size()); });
}

template <class T>
void conv3_t(Backend b, cspan<T> h, cspan<T> r, cspan<T> t, cspan<T> filters, std::span<T> out) {
    require_same(h.size(), r.size(), "conv3_rows");
    require_same(h.size(), t.size(), "conv3_rows");
    if (filters.empty()) throw ArgumentError("conv3_rows: at least one filter is required");
    if (filters.size() % 3 != 0) throw ArgumentError("conv3_rows: filter buffer length must be a multiple of 3");
    const std::size_t tau = filters.size() / 3;
    require_same(out.size(), tau * h.size(), "conv3_rows output");
    dispatch<T>(b, [&](auto k) { k.conv3_rows(h.data(), r.data(), t.data(), filters.data(), tau, out.data(), h.size()); });
}

template <class T>
void relu_t(Backend b, cspan<T> x, std::span<T> out) {
    require_same(x.size(), out.size(), "relu");
    dispatch<T>(b, [&](auto k) { k.relu(x.data(), out.data(), x.size()); });
}

template <class T>
void relu_backward_t(Backend b, cspan<T> pre, cspan<T> g, std::span<T> out) {
    require_same(pre.size(), g.size(), "relu_backward");
    require_same(pre.size(), out.size(), "relu_backward");
    dispatch<T>(b, [&](auto k) { k.relu_backward(pre.data(), g.data(), out.data(), pre.size()); });
}

template <class T>
void check3(cspan<T> h, cspan<T> r, cspan<T> t, const char* op) {
    require_same(h.size(), r.size(), op);
    require_same(h.size(), t.size(), op);
}

template <class T>
T tl1_t(Backend b, cspan<T> h, cspan<T> r, cspan<T> t) {
    check3(h, r, t, "translation_l1");
    return dispatch<T>(b, [&](auto k) { return k.translation_l1(h.data(), r.data(), t.data(), h.size()); });
}

template <class T>
T tl2_t(Backend b, cspan<T> h, cspan<T> r, cspan<T> t) {
    check3(h, r, t, "translation_l2");
    return dispatch<T>(b, [&](auto k) { return k.translation_l2(h.data(), r.data(), t.data(), h.size()); });
}

template <class T>
void tres_t(Backend b, cspan<T> h, cspan<T> r, cspan<T> t, std::span<T> out) {
    check3(h, r, t, "translation_residual");
    require_same(h.size(), out.size(), "translation_residual");
    dispatch<T>(b, [&](auto k) { k.translation_residual(h.data(), r.data(), t.data(), out.data(), h.size()); });
}

template <class T>
void tsign_t(Backend b, cspan<T> h, cspan<T> r, cspan<T> t, std::span<T> out) {
    check3(h, r, t, "translation_sign");
    require_same(h.size(), out.size(), "translation_sign");
    dispatch<T>(b, [&](auto k) { k.translation_sign(h.data(), r.data(), t.data(), out.data(), h.size()); });
}

template <class T>
void hadamard_t(Backend b, cspan<T> x, cspan<T> y, std::span<T> out) {
    require_same(x.size(), y.size(), "hadamard");
    require_same(x.size(), out.size(), "hadamard");
    dispatch<T>(b, [&](auto k) { k.hadamard(x.data(), y.data(), out.data(), x.size()); });
}

template <class T>
void normalize_t(Backend b, std::span<T> x) {
    dispatch<T>(b, [&](auto k) { k.l2_normalize(x.data(), x.size()); });
}

template <class T>
void adam_t(Backend b, const AdamCoefficients& c, std::span<T> theta, std::span<T> m, std::span<T> v, cspan<T> g) {
    require_same(theta.size(), m.size(), "adam_update");
    require_same(theta.size(), v.size(), "adam_update");
    require_same(theta.size(), g.size(), "adam_update");
    dispatch<T>(b, [&](auto k) { k.adam_update(c, theta.data(), m.data(), v.data(), g.data(), theta.size()); });
}

}  // namespace

bool simd_active() noexcept {
#ifdef KGE_SCALAR_ONLY
    return false;
#else
    return detail::simd_active();
#endif
}

std::string_view simd_isa() noexcept {
#ifdef KGE_SCALAR_ONLY
    return "none (scalar-only build)";
#else
    return detail::simd_isa();
#endif
}

float dot(Backend b, cspan<float> x, cspan<float> y) { return dot_t(b, x, y); }
double dot(Backend b, cspan<double> x, cspan<double> y) { return dot_t(b, x, y); }
float trilinear(Backend b, cspan<float> h, cspan<float> r, cspan<float> t) { return trilinear_t(b, h, r, t); }
double trilinear(Backend b, cspan<double> h, cspan<double> r, cspan<double> t) { return trilinear_t(b, h, r, t); }
float l1_dist(Backend b, cspan<float> x, cspan<float> y) { return l1_t(b, x, y); }
double l1_dist(Backend b, cspan<double> x, cspan<double> y) { return l1_t(b, x, y); }
float l2_dist(Backend b, cspan<float> x, cspan<float> y) { return l2_t(b, x, y); }
double l2_dist(Backend b, cspan<double> x, cspan<double> y) { return l2_t(b, x, y); }

void axpy(Backend b, float alpha, cspan<float> x, cspan<float> y, std::span<float> out) { axpy_t(b, alpha, x, y, out); }
void axpy(Backend b, double alpha, cspan<double> x, cspan<double> y, std::span<double> out) {
    axpy_t(b, alpha, x, y, out);
}

void conv3_rows(Backend b, cspan<float> h, cspan<float> r, cspan<float> t, cspan<float> f, std::span<float> out) {
    conv3_t(b, h, r, t, f, out);
}
void conv3_rows(Backend b, cspan<double> h, cspan<double> r, cspan<double> t, cspan<double> f,
                std::span<double> out) {
    conv3_t(b, h, r, t, f, out);
}

void relu(Backend b, cspan<float> x, std::span<float> out) { relu_t(b, x, out); }
void relu(Backend b, cspan<double> x, std::span<double> out) { relu_t(b, x, out); }
void relu_backward(Backend b, cspan<float> pre, cspan<float> g, std::span<float> out) {
    relu_backward_t(b, pre, g, out);
}
void relu_backward(Backend b, cspan<double> pre, cspan<double> g, std::span<double> out) {
    relu_backward_t(b, pre, g, out);
}

float translation_l1(Backend b, cspan<float> h, cspan<float> r, cspan<float> t) { return tl1_t(b, h, r, t); }
double translation_l1(Backend b, cspan<double> h, cspan<double> r, cspan<double> t) { return tl1_t(b, h, r, t); }
float translation_l2(Backend b, cspan<float> h, cspan<float> r, cspan<float> t) { return tl2_t(b, h, r, t); }
double translation_l2(Backend b, cspan<double> h, cspan<double> r, cspan<double> t) { return tl2_t(b, h, r, t); }

void translation_residual(Backend b, cspan<float> h, cspan<float> r, cspan<float> t, std::span<float> out) {
    tres_t(b, h, r, t, out);
}
void translation_residual(Backend b, cspan<double> h, cspan<double> r, cspan<double> t, std::span<double> out) {
    tres_t(b, h, r, t, out);
}
void translation_sign(Backend b, cspan<float> h, cspan<float> r, cspan<float> t, std::span<float> out) {
    tsign_t(b, h, r, t, out);
}
void translation_sign(Backend b, cspan<double> h, cspan<double> r, cspan<double> t, std::span<double> out) {
    tsign_t(b, h, r, t, out);
}

void hadamard(Backend b, cspan<float> x, cspan<float> y, std::span<float> out) { hadamard_t(b, x, y, out); }
void hadamard(Backend b, cspan<double> x, cspan<double> y, std::span<double> out) { hadamard_t(b, x, y, out); }

void l2_normalize(Backend b, std::span<float> x) { normalize_t(b, x); }
void l2_normalize(Backend b, std::span<double> x) { normalize_t(b, x); }

void adam_update(Backend b, const AdamCoefficients& c, std::span<float> theta, std::span<float> m,
                 std::span<float> v, cspan<float> g) {
    adam_t(b, c, theta, m, v, g);
}
void adam_update(Backend b, const AdamCoefficients& c, std::span<double> theta, std::span<double> m,
                 std::span<double> v, cspan<double> g) {
    adam_t(b, c, theta, m, v, g);
}

}  // namespace kernels
}  // namespace kge
