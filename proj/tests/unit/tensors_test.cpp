//
// Copyright 2026 The circq Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "circq/error.hpp"
#include "circq/tensors.hpp"

#include <gtest/gtest.h>

#include <limits>
#include <random>
#include <set>
#include <tuple>

namespace circq {
namespace {

TEST(FeatureMap, RejectsWrongLength)
{
    EXPECT_THROW(FeatureMap(2, 2, 1, {1, 2, 3}), SizeError);
}

TEST(FeatureMap, RejectsNonFinite)
{
    EXPECT_THROW(FeatureMap(1, 1, 1, {std::numeric_limits<double>::quiet_NaN()}), ParameterError);
    EXPECT_THROW(FeatureMap(1, 1, 1, {std::numeric_limits<double>::infinity()}), ParameterError);
}

TEST(FeatureMap, RowMajorHwcLayout)
{
    const FeatureMap fm(2, 3, 2, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11});
    EXPECT_EQ(fm.at(0, 0, 1), 1);
    EXPECT_EQ(fm.at(0, 2, 0), 4);
    EXPECT_EQ(fm.at(1, 0, 0), 6);
    EXPECT_EQ(fm.pixel(1, 2)[1], 11);
}

TEST(WeightTensor4D, KernelInputOutputOrder)
{
    WeightTensor4D w(3, 2, 4);
    EXPECT_EQ(w.data().size(), 3u * 3 * 2 * 4);
    w.at(1, 2, 1, 3) = 7.0;
    EXPECT_EQ(w.data()[((1 * 3 + 2) * 2 + 1) * 4 + 3], 7.0);
    EXPECT_THROW(WeightTensor4D(1, 1, 1, {1, 2}), SizeError);
}

TEST(ZeroPad, ScalarMapGetsZeroBorder)
{
    const auto out = zero_pad(FeatureMap(1, 1, 1, {5}), 1);
    ASSERT_EQ(out.height(), 3u);
    ASSERT_EQ(out.width(), 3u);
    for (std::size_t h = 0; h < 3; ++h) {
        for (std::size_t w = 0; w < 3; ++w) {
            EXPECT_EQ(out.at(h, w, 0), (h == 1 && w == 1) ? 5.0 : 0.0);
        }
    }
}

TEST(ZeroPad, ZeroPaddingIsIdentity)
{
    const FeatureMap fm(2, 3, 2, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
    EXPECT_EQ(zero_pad(fm, 0), fm);
}

TEST(ZeroPad, TwoByTwoInteriorByIndexArithmetic)
{
    const auto out = zero_pad(FeatureMap(2, 2, 1, {1, 2, 3, 4}), 1);
    ASSERT_EQ(out.height(), 4u);
    for (std::size_t h = 0; h < 4; ++h) {
        for (std::size_t w = 0; w < 4; ++w) {
            const bool inside = h >= 1 && h <= 2 && w >= 1 && w <= 2;
            const double want = inside ? static_cast<double>((h - 1) * 2 + (w - 1) + 1) : 0.0;
            EXPECT_EQ(out.at(h, w, 0), want) << h << "," << w;
        }
    }
}

TEST(ZeroPad, CroppingRecoversInput)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    for (std::size_t p = 0; p < 4; ++p) {
        FeatureMap fm(3, 5, 4);
        for (double& v : fm.data()) {
            v = u(rng);
        }
        const auto padded = zero_pad(fm, p);
        FeatureMap cropped(3, 5, 4);
        for (std::size_t h = 0; h < 3; ++h) {
            for (std::size_t w = 0; w < 5; ++w) {
                for (std::size_t c = 0; c < 4; ++c) {
                    cropped.at(h, w, c) = padded.at(h + p, w + p, c);
                }
            }
        }
        EXPECT_EQ(cropped, fm);
    }
}

TEST(ExtractPatchVector, WholeChannelRead)
{
    const FeatureMap fm(1, 1, 4, {1, 2, 3, 4});
    EXPECT_EQ(extract_patch_vector(fm, 0, 0, 0, 0, 0, 4), (std::vector<double>{1, 2, 3, 4}));
}

TEST(ExtractPatchVector, SubSlice)
{
    const FeatureMap fm(1, 1, 4, {1, 2, 3, 4});
    EXPECT_EQ(extract_patch_vector(fm, 0, 0, 0, 0, 2, 2), (std::vector<double>{3, 4}));
}

TEST(ExtractPatchVector, PaddedBorderIsZero)
{
    const auto padded = zero_pad(FeatureMap(2, 2, 4, std::vector<double>(16, 1.0)), 1);
    EXPECT_EQ(extract_patch_vector(padded, 0, 0, 0, 0, 0, 4), std::vector<double>(4, 0.0));
}

TEST(ExtractPatchVector, OutOfBoundsThrows)
{
    const FeatureMap fm(2, 2, 4);
    EXPECT_THROW(extract_patch_vector(fm, 1, 1, 1, 0, 0, 4), std::out_of_range);
    EXPECT_THROW(extract_patch_vector(fm, 0, 0, 0, 0, 2, 3), std::out_of_range);
}

TEST(ExtractPatchVector, WindowsVisitEachAlignedElementOncePerPixel)
{
    // 3x3 window, block length 2 over 4 channels: for one output pixel the
    // gathered slices cover every (kh, kw, c) of the window exactly once.
    const std::size_t h = 5;
    const std::size_t w = 4;
    const std::size_t c = 4;
    FeatureMap fm(h, w, c);
    for (std::size_t i = 0; i < fm.data().size(); ++i) {
        fm.data()[i] = static_cast<double>(i);
    }
    for (std::size_t row = 0; row + 3 <= h; ++row) {
        for (std::size_t col = 0; col + 3 <= w; ++col) {
            std::multiset<double> seen;
            for (std::size_t kh = 0; kh < 3; ++kh) {
                for (std::size_t kw = 0; kw < 3; ++kw) {
                    for (std::size_t c0 = 0; c0 < c; c0 += 2) {
                        for (double v : extract_patch_vector(fm, row, col, kh, kw, c0, 2)) {
                            seen.insert(v);
                        }
                    }
                }
            }
            std::multiset<double> want;
            for (std::size_t kh = 0; kh < 3; ++kh) {
                for (std::size_t kw = 0; kw < 3; ++kw) {
                    for (std::size_t ch = 0; ch < c; ++ch) {
                        want.insert(fm.at(row + kh, col + kw, ch));
                    }
                }
            }
            EXPECT_EQ(seen, want);
            EXPECT_EQ(std::set<double>(seen.begin(), seen.end()).size(), seen.size());
        }
    }
}

TEST(Matrix, FrobeniusNorm)
{
    const Matrix m(2, 2, {3, 0, 0, 4});
    EXPECT_DOUBLE_EQ(frobenius_norm(m), 5.0);
    EXPECT_THROW(Matrix(2, 2, {1}), SizeError);
}

} // namespace
} // namespace circq
