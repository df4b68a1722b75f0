#pragma once

// Shared constants of the complex probability function kernels. Every kernel
// variant includes this header so all of them evaluate the same approximation.

namespace hfslock::simd::detail {

// Weideman rational expansion, N = 32: w(z) ~ 2 p(Z) / (L - iz)^2 + (1/sqrt(pi)) / (L - iz),
// Z = (L + iz) / (L - iz), L = sqrt(N / sqrt(2)). Coefficients highest degree first.
inline constexpr int weideman_terms = 32;
inline constexpr double weideman_l = 4.7568284600108841;
inline constexpr double weideman_coeffs[weideman_terms] = {
    -1.30317978630500875e-12,
    3.74088129316536249e-12,
    8.03036789996388945e-12,
    -2.15436320778387687e-11,
    -5.54423594816646238e-11,
    1.16582510935237737e-10,
    4.15374309183345315e-10,
    -5.23102048119632885e-10,
    -3.20801509172336887e-09,
    8.12488945684665156e-10,
    2.37975567798974168e-08,
    2.29304390650999664e-08,
    -1.48130789151209774e-07,
    -4.18407637021697758e-07,
    4.25583313757500854e-07,
    4.40153173157854990e-06,
    6.82103194400198485e-06,
    -2.14096192017107501e-05,
    -1.30754492546153456e-04,
    -2.45329802700214317e-04,
    3.92591360700703107e-04,
    4.51954110534921738e-03,
    1.90061557848454077e-02,
    5.73044035298372195e-02,
    1.40607162268937685e-01,
    2.95444510715087316e-01,
    5.46013972063934094e-01,
    9.01925489364799882e-01,
    1.34554416923454490e+00,
    1.82566962963248147e+00,
    2.26353729990026764e+00,
    2.57225340812456960e+00
};

// Laplace continued fraction depth used where |x| + y >= weideman_radius.
inline constexpr int continued_fraction_depth = 20;
inline constexpr double weideman_radius = 8.0;

// Below this damping the real part is taken from its first-order expansion in y.
inline constexpr double small_damping = 1e-5;

inline constexpr double inv_sqrt_pi = 0.56418958354775628695;

}  // namespace hfslock::simd::detail
