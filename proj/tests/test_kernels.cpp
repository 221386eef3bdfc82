// Copyright 2026 fcd contributors
// SPDX-License-Identifier: Apache-2.0
//
// SIMD variants must reproduce the scalar reference kernels bit-for-bit;
// every assertion here is on exact bit patterns, not tolerances.

#include <doctest.h>

#include <cmath>
#include <cstring>

#include "fcd/kernels/kernels.hpp"
#include "fcd/rng.hpp"
#include "oracle.hpp"

using namespace fcd;
namespace k = fcd::kernels;

namespace {

std::vector<float> random_floats(int n, uint64_t seed, double nan_fraction = 0.0) {
    std::vector<float> v(n);
    SplitMix64 rng(seed);
    for (int i = 0; i < n; ++i) {
        if (nan_fraction > 0 && rng.u01() < nan_fraction)
            v[i] = std::numeric_limits<float>::quiet_NaN();
        else
            v[i] = static_cast<float>((rng.u01() - 0.5) * 40.0);
    }
    return v;
}

bool bits_equal(const std::vector<float>& a, const std::vector<float>& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0;
}

bool bits_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

} // namespace

TEST_SUITE("kernels") {

TEST_CASE("at least the scalar variant is always available") {
    const auto all = k::available_kernels();
    REQUIRE(!all.empty());
    CHECK(std::string(all[0]->name) == "scalar");
    // On this machine the dispatcher should pick something; just make sure
    // active_kernels() is one of the available tables.
    bool found = false;
    for (const auto* kk : all) found |= (kk == &k::active_kernels());
    CHECK(found);
}

TEST_CASE("exp_neg matches std::exp closely and hits the exact endpoints") {
    CHECK(k::exp_neg(0.0f) == 1.0f);
    CHECK(k::exp_neg(200.0f) == 0.0f); // saturates to exactly zero
    SplitMix64 rng(7);
    for (int i = 0; i < 20000; ++i) {
        const float x = static_cast<float>(rng.u01() * 90.0);
        const double want = std::exp(-static_cast<double>(x));
        const double got = k::exp_neg(x);
        // The float range reduction scales the error with the argument;
        // weights that far down are vanishing anyway.
        const double tol = (3e-7 + 1.5e-7 * x) * want;
        if (want > 1e-30) {
            CHECK(std::fabs(got - want) <= tol);
        }
    }
}

TEST_CASE("bin_index equals the linear-scan definition, including clamps") {
    const int B = 17;
    std::vector<double> edges(B + 1);
    const double lo = -23.7, hi = 4.1;
    for (int i = 0; i <= B; ++i) edges[i] = lo + i * ((hi - lo) / B);
    const double e0 = edges[0];
    const double inv_bw = 1.0 / ((edges[B] - edges[0]) / B);

    SplitMix64 rng(11);
    for (int i = 0; i < 50000; ++i) {
        const double x = lo - 5 + rng.u01() * (hi - lo + 10);
        CHECK(k::bin_index(x, e0, inv_bw, edges.data(), B) == oracle::bin_scan(x, edges));
    }
    // Edge values themselves.
    for (int i = 0; i <= B; ++i)
        CHECK(k::bin_index(edges[i], e0, inv_bw, edges.data(), B) ==
              oracle::bin_scan(edges[i], edges));
    // Far outside.
    CHECK(k::bin_index(-1e30, e0, inv_bw, edges.data(), B) == 0);
    CHECK(k::bin_index(1e30, e0, inv_bw, edges.data(), B) == B - 1);
}

TEST_CASE("SIMD variants are bit-identical to scalar") {
    const auto& scalar = k::scalar_kernels();
    for (const auto* variant : k::available_kernels()) {
        if (variant == &scalar) continue;
        CAPTURE(variant->name);

        for (int trial = 0; trial < 8; ++trial) {
            // Awkward lengths on purpose: exercise the vector body and tails.
            const int n = 1 + trial * 37 + trial;
            const uint64_t seed = 1000 + trial;
            {
                const auto src = random_floats(n, seed, 0.2);
                std::vector<float> v1(n), m1(n), v2(n), m2(n);
                scalar.mask_vals(v1.data(), m1.data(), src.data(), n);
                variant->mask_vals(v2.data(), m2.data(), src.data(), n);
                CHECK(bits_equal(v1, v2));
                CHECK(bits_equal(m1, m2));
            }
            {
                const auto va = random_floats(n, seed), vb = random_floats(n, seed + 1);
                auto ma = random_floats(n, seed + 2), mb = random_floats(n, seed + 3);
                for (auto& f : ma) f = f > 0 ? 1.0f : 0.0f;
                for (auto& f : mb) f = f > 0 ? 1.0f : 0.0f;
                std::vector<float> s1(n), q1(n), s2(n), q2(n);
                scalar.masked_sq_diff(q1.data(), s1.data(), va.data(), ma.data(), vb.data(),
                                      mb.data(), n);
                variant->masked_sq_diff(q2.data(), s2.data(), va.data(), ma.data(), vb.data(),
                                        mb.data(), n);
                CHECK(bits_equal(q1, q2));
                CHECK(bits_equal(s1, s2));
            }
            {
                const int r = trial % 3;
                const auto taps = random_floats(2 * r + 1, seed + 4);
                auto src = random_floats(n + 2 * r, seed + 5);
                std::vector<float> d1(n), d2(n);
                scalar.conv_row(d1.data(), src.data() + r, n, taps.data(), r);
                variant->conv_row(d2.data(), src.data() + r, n, taps.data(), r);
                CHECK(bits_equal(d1, d2));
            }
            {
                auto d1 = random_floats(n, seed + 6);
                auto d2 = d1;
                const auto src = random_floats(n, seed + 7);
                scalar.axpy(d1.data(), src.data(), 0.37f, n);
                variant->axpy(d2.data(), src.data(), 0.37f, n);
                CHECK(bits_equal(d1, d2));
            }
            {
                auto num = random_floats(n, seed + 8);
                auto den = random_floats(n, seed + 9);
                for (auto& f : num) f = std::fabs(f);
                for (auto& f : den) f = f > 0 ? f : 0.0f; // zero dens excluded lanes
                std::vector<float> w1(n), w2(n);
                scalar.nlm_weights(w1.data(), num.data(), den.data(), 0.8f, 2.3f, n);
                variant->nlm_weights(w2.data(), num.data(), den.data(), 0.8f, 2.3f, n);
                CHECK(bits_equal(w1, w2));
            }
            {
                auto d1 = random_floats(n, seed + 10);
                auto d2 = d1;
                const auto src = random_floats(n, seed + 11);
                scalar.mul_f32(d1.data(), src.data(), n);
                variant->mul_f32(d2.data(), src.data(), n);
                CHECK(bits_equal(d1, d2));
            }
            {
                std::vector<double> a1(n), a2(n), b(n);
                SplitMix64 rng(seed + 12);
                for (int i = 0; i < n; ++i) {
                    a1[i] = rng.u01();
                    b[i] = rng.u01();
                }
                a2 = a1;
                scalar.mul_f64(a1.data(), b.data(), n);
                variant->mul_f64(a2.data(), b.data(), n);
                CHECK(bits_equal(a1, a2));
            }
            {
                std::vector<double> n1(n, 0.5), d1(n, 0.25);
                auto n2 = n1, d2 = d1;
                auto w = random_floats(n, seed + 13);
                auto v = random_floats(n, seed + 14);
                for (auto& f : w) f = std::fabs(f);
                scalar.accum_weighted(n1.data(), d1.data(), w.data(), v.data(), n);
                variant->accum_weighted(n2.data(), d2.data(), w.data(), v.data(), n);
                CHECK(bits_equal(n1, n2));
                CHECK(bits_equal(d1, d2));
            }
            {
                const int B = 32;
                std::vector<double> edges(B + 1), probs(B);
                SplitMix64 rng(seed + 15);
                for (int i = 0; i <= B; ++i) edges[i] = -20.0 + i * (18.0 / B);
                for (int i = 0; i < B; ++i) probs[i] = rng.u01();
                const auto x = random_floats(n, seed + 16, 0.15);
                std::vector<double> p1(n), p2(n);
                const double inv_bw = 1.0 / ((edges[B] - edges[0]) / B);
                scalar.similarity_row(p1.data(), x.data(), probs.data(), edges.data(), edges[0],
                                      inv_bw, B, n);
                variant->similarity_row(p2.data(), x.data(), probs.data(), edges.data(),
                                        edges[0], inv_bw, B, n);
                CHECK(bits_equal(p1, p2));
            }
            {
                std::vector<double> lam1(n), ev1(n), p(n);
                std::vector<int32_t> ti1(n);
                SplitMix64 rng(seed + 17);
                for (int i = 0; i < n; ++i) {
                    lam1[i] = 1.0 + rng.u01() * 5;
                    ev1[i] = oracle::kNaN;
                    ti1[i] = rng.u01() < 0.2 ? 3 : -1;
                    p[i] = rng.u01() < 0.1 ? oracle::kNaN : rng.u01() * 0.2;
                }
                auto lam2 = lam1;
                auto ev2 = ev1;
                auto ti2 = ti1;
                scalar.lambda_row(lam1.data(), ti1.data(), ev1.data(), p.data(), 0.05, 10.0, 7,
                                  n);
                variant->lambda_row(lam2.data(), ti2.data(), ev2.data(), p.data(), 0.05, 10.0, 7,
                                    n);
                CHECK(bits_equal(lam1, lam2));
                CHECK(bits_equal(ev1, ev2));
                CHECK(ti1 == ti2);
            }
        }
    }
}

} // TEST_SUITE
