#include <gtest/gtest.h>

#include "kernel_equivalence.hpp"
#include "kge/errors.hpp"
#include "kge/kernels.hpp"
#include "support.hpp"

using namespace kge;
using kernels::cspan;

namespace {

class BothBackends : public ::testing::TestWithParam<Backend> {};

template <class T>
cspan<T> cs(const std::vector<T>& v) {
    return cspan<T>(v);
}

}  // namespace

TEST_P(BothBackends, HandExamples) {
    const Backend b = GetParam();
    const std::vector<float> a{1, 2, 3}, c{4, 5, 6};
    EXPECT_FLOAT_EQ(kernels::dot(b, cs(a), cs(c)), 32.0f);
    const std::vector<float> h{1, 0}, r{2, 3}, t{4, 5};
    EXPECT_FLOAT_EQ(kernels::trilinear(b, cs(h), cs(r), cs(t)), 8.0f);
    EXPECT_FLOAT_EQ(kernels::l1_dist(b, cs(std::vector<float>{1, 2}), cs(std::vector<float>{3, 0})), 4.0f);
    EXPECT_FLOAT_EQ(kernels::l2_dist(b, cs(std::vector<float>{3, 0}), cs(std::vector<float>{0, 4})), 5.0f);

    std::vector<float> out(2);
    kernels::axpy(b, 2.0f, cs(std::vector<float>{1, 1}), cs(std::vector<float>{3, 4}), std::span<float>(out));
    EXPECT_EQ(out, (std::vector<float>{5, 6}));

    const std::vector<float> ch{1, 2}, cr{3, 4}, ct{5, 6}, filt{1, 2, 3};
    kernels::conv3_rows(b, cs(ch), cs(cr), cs(ct), cs(filt), std::span<float>(out));
    EXPECT_EQ(out, (std::vector<float>{22, 28}));
}

TEST_P(BothBackends, ReluAndBackward) {
    const Backend b = GetParam();
    const std::vector<double> x{-1.0, 0.0, 2.5};
    EXPECT_EQ(kernels::relu(b, cs(x)), (std::vector<double>{0.0, 0.0, 2.5}));
    std::vector<double> out(3);
    kernels::relu_backward(b, cs(x), cs(std::vector<double>{7, 8, 9}), std::span<double>(out));
    EXPECT_EQ(out, (std::vector<double>{0, 0, 9}));
}

TEST_P(BothBackends, TranslationKernels) {
    const Backend b = GetParam();
    const std::vector<double> h{1, 0, 2}, r{0, 1, -2}, t{1, 3, 0};
    EXPECT_DOUBLE_EQ(kernels::translation_l1(b, cs(h), cs(r), cs(t)), 2.0);
    EXPECT_DOUBLE_EQ(kernels::translation_l2(b, cs(h), cs(r), cs(t)), 2.0);
    std::vector<double> out(3);
    kernels::translation_residual(b, cs(h), cs(r), cs(t), std::span<double>(out));
    EXPECT_EQ(out, (std::vector<double>{0, -2, 0}));
    kernels::translation_sign(b, cs(h), cs(r), cs(t), std::span<double>(out));
    EXPECT_EQ(out, (std::vector<double>{0, -1, 0}));
}

TEST_P(BothBackends, NormalizeUnitAndZero) {
    const Backend b = GetParam();
    std::vector<float> v{3, 4};
    kernels::l2_normalize(b, std::span<float>(v));
    EXPECT_NEAR(v[0], 0.6f, 1e-6);
    EXPECT_NEAR(v[1], 0.8f, 1e-6);
    std::vector<float> z(17, 0.0f);
    kernels::l2_normalize(b, std::span<float>(z));
    EXPECT_EQ(z, std::vector<float>(17, 0.0f));
}

TEST_P(BothBackends, AdamFirstStepMovesByLearningRate) {
    const Backend b = GetParam();
    const kernels::AdamCoefficients c{0.01, 0.9, 0.999, 1e-8, 1 - 0.9, 1 - 0.999};
    std::vector<double> theta{0.0}, m{0.0}, v{0.0};
    kernels::adam_update(b, c, std::span<double>(theta), std::span<double>(m), std::span<double>(v),
                         cs(std::vector<double>{1.0}));
    EXPECT_NEAR(theta[0], -0.01, 1e-9);
}

TEST_P(BothBackends, LengthMismatchThrows) {
    const Backend b = GetParam();
    const std::vector<float> a(3), c(4);
    std::vector<float> out(3);
    EXPECT_THROW(kernels::dot(b, cs(a), cs(c)), ArgumentError);
    EXPECT_THROW(kernels::trilinear(b, cs(a), cs(a), cs(c)), ArgumentError);
    EXPECT_THROW(kernels::hadamard(b, cs(a), cs(c), std::span<float>(out)), ArgumentError);
    EXPECT_THROW(kernels::conv3_rows(b, cs(a), cs(a), cs(a), cs(std::vector<float>{}), std::span<float>(out)),
                 ArgumentError);
    EXPECT_THROW(kernels::conv3_rows(b, cs(a), cs(a), cs(a), cs(std::vector<float>{1, 2}), std::span<float>(out)),
                 ArgumentError);
    std::vector<float> wrong(5);
    EXPECT_THROW(kernels::conv3_rows(b, cs(a), cs(a), cs(a), cs(std::vector<float>{1, 2, 3}), std::span<float>(wrong)),
                 ArgumentError);
}

TEST_P(BothBackends, DotIsBilinearAndSymmetric) {
    const Backend b = GetParam();
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        const std::size_t n = 1 + rng() % 70;
        const auto x = test::random_vector(rng, n), y = test::random_vector(rng, n), z = test::random_vector(rng, n);
        const double alpha = test::random_vector(rng, 1)[0];
        std::vector<double> ax_z(n);
        kernels::axpy(b, alpha, cs(x), cs(z), std::span<double>(ax_z));
        const double lhs = kernels::dot(b, cs(ax_z), cs(y));
        const double rhs = alpha * kernels::dot(b, cs(x), cs(y)) + kernels::dot(b, cs(z), cs(y));
        EXPECT_NEAR(lhs, rhs, 1e-12 * (1 + std::abs(rhs)));
        EXPECT_NEAR(kernels::dot(b, cs(x), cs(y)), kernels::dot(b, cs(y), cs(x)), 1e-12);
        EXPECT_NEAR(kernels::trilinear(b, cs(x), cs(y), cs(z)), kernels::trilinear(b, cs(z), cs(y), cs(x)), 1e-12);
    }
}

TEST_P(BothBackends, InPlaceAliasing) {
    const Backend b = GetParam();
    std::vector<float> x{1, -2, 3, -4, 5};
    kernels::relu(b, cs(x), std::span<float>(x));
    EXPECT_EQ(x, (std::vector<float>{1, 0, 3, 0, 5}));
    std::vector<float> y{1, 1, 1, 1, 1};
    kernels::axpy(b, 2.0f, cs(x), cs(y), std::span<float>(y));
    EXPECT_EQ(y, (std::vector<float>{3, 1, 7, 1, 11}));
}

INSTANTIATE_TEST_SUITE_P(Kernels, BothBackends, ::testing::Values(Backend::scalar, Backend::vectorized),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(BackendEquivalence, FloatAllKernels) {
    const auto rep = test::compare_backends<float>(1000, 1);
    EXPECT_EQ(rep.trials, 1000u);
    EXPECT_LE(rep.worst, 1e-4) << rep.worst_kernel << " at length " << rep.worst_length;
}

TEST(BackendEquivalence, DoubleAllKernels) {
    const auto rep = test::compare_backends<double>(1000, 2);
    EXPECT_LE(rep.worst, 1e-10) << rep.worst_kernel << " at length " << rep.worst_length;
}

TEST(BackendNames, ParseAndPrint) {
    EXPECT_EQ(parse_backend("scalar"), Backend::scalar);
    EXPECT_EQ(parse_backend("vector"), Backend::vectorized);
    EXPECT_EQ(parse_backend("vectorized"), Backend::vectorized);
    EXPECT_EQ(to_string(Backend::vectorized), "vector");
    EXPECT_THROW(parse_backend("gpu"), ArgumentError);
    EXPECT_FALSE(kernels::simd_isa().empty());
}
