#pragma once
// Numeric primitives behind a selectable backend.
//
// Backend::scalar is a plain one-element-at-a-time reference compiled with
// auto-vectorization disabled. Backend::vectorized uses AVX2/FMA intrinsics for
// float when the host supports them (runtime check) and lane-blocked loops
// otherwise. Building with KGE_ENABLE_SIMD=OFF routes the vectorized backend to
// the scalar code, producing a scalar-only binary.
//
// Every kernel accepts float and double spans. All length mismatches throw
// ArgumentError. Outputs may alias an input of the same length exactly
// (in-place use), never partially.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace kge {

enum class Backend { scalar, vectorized };

std::string_view to_string(Backend b) noexcept;
/// Accepts "scalar", "vector" and "vectorized".
Backend parse_backend(std::string_view name);

namespace kernels {

/// True when Backend::vectorized executes SIMD instructions on this host.
bool simd_active() noexcept;
/// Human-readable name of the instruction path used by Backend::vectorized.
std::string_view simd_isa() noexcept;

template <class T>
using cspan = std::span<const T>;

float dot(Backend, cspan<float> a, cspan<float> b);
double dot(Backend, cspan<double> a, cspan<double> b);

/// Σ r_i·h_i·t_i
float trilinear(Backend, cspan<float> h, cspan<float> r, cspan<float> t);
double trilinear(Backend, cspan<double> h, cspan<double> r, cspan<double> t);

float l1_dist(Backend, cspan<float> a, cspan<float> b);
double l1_dist(Backend, cspan<double> a, cspan<double> b);
float l2_dist(Backend, cspan<float> a, cspan<float> b);
double l2_dist(Backend, cspan<double> a, cspan<double> b);

/// out_i = alpha·x_i + y_i
void axpy(Backend, float alpha, cspan<float> x, cspan<float> y, std::span<float> out);
void axpy(Backend, double alpha, cspan<double> x, cspan<double> y, std::span<double> out);

/// Convolves the d×3 matrix [h r t] with τ filters (w1,w2,w3) laid out flat as
/// filters[3k..3k+2]. out[k·d + i] = w1·h_i + w2·r_i + w3·t_i (filter-major).
/// out must have length τ·d; throws when τ == 0.
void conv3_rows(Backend, cspan<float> h, cspan<float> r, cspan<float> t, cspan<float> filters,
                std::span<float> out);
void conv3_rows(Backend, cspan<double> h, cspan<double> r, cspan<double> t, cspan<double> filters,
                std::span<double> out);

void relu(Backend, cspan<float> x, std::span<float> out);
void relu(Backend, cspan<double> x, std::span<double> out);

/// Backward of relu: out_i = pre_i > 0 ? g_i : 0.
void relu_backward(Backend, cspan<float> pre, cspan<float> g, std::span<float> out);
void relu_backward(Backend, cspan<double> pre, cspan<double> g, std::span<double> out);

/// Σ|h_i + r_i − t_i| (l1) and sqrt(Σ(h_i + r_i − t_i)²) (l2), fused so the
/// translated vector is never materialised.
float translation_l1(Backend, cspan<float> h, cspan<float> r, cspan<float> t);
double translation_l1(Backend, cspan<double> h, cspan<double> r, cspan<double> t);
float translation_l2(Backend, cspan<float> h, cspan<float> r, cspan<float> t);
double translation_l2(Backend, cspan<double> h, cspan<double> r, cspan<double> t);

/// out_i = h_i + r_i − t_i
void translation_residual(Backend, cspan<float> h, cspan<float> r, cspan<float> t, std::span<float> out);
void translation_residual(Backend, cspan<double> h, cspan<double> r, cspan<double> t, std::span<double> out);
/// out_i = sign(h_i + r_i − t_i), sign(0) = 0
void translation_sign(Backend, cspan<float> h, cspan<float> r, cspan<float> t, std::span<float> out);
void translation_sign(Backend, cspan<double> h, cspan<double> r, cspan<double> t, std::span<double> out);

/// out_i = a_i·b_i
void hadamard(Backend, cspan<float> a, cspan<float> b, std::span<float> out);
void hadamard(Backend, cspan<double> a, cspan<double> b, std::span<double> out);

/// Scales x in place to unit L2 norm; a zero vector is left unchanged.
void l2_normalize(Backend, std::span<float> x);
void l2_normalize(Backend, std::span<double> x);

struct AdamCoefficients {
    double lr;
    double beta1;
    double beta2;
    double eps;
    double bias1;  // 1 − β1^t
    double bias2;  // 1 − β2^t
};

/// One bias-corrected Adam update over a contiguous parameter block:
/// m ← β1·m + (1−β1)·g; v ← β2·v + (1−β2)·g²; θ ← θ − lr·(m/bias1)/(√(v/bias2) + ε).
void adam_update(Backend, const AdamCoefficients&, std::span<float> theta, std::span<float> m,
                 std::span<float> v, cspan<float> g);
void adam_update(Backend, const AdamCoefficients&, std::span<double> theta, std::span<double> m,
                 std::span<double> v, cspan<double> g);

/// Value-returning convenience wrapper over relu.
template <class T>
std::vector<T> relu(Backend b, cspan<T> x) {
    std::vector<T> out(x.size());
    relu(b, x, std::span<T>(out));
    return out;
}

}  // namespace kernels
}  // namespace kge
