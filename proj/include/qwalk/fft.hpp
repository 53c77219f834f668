#pragma once

// Iterative radix-2 FFT over std::complex<double>. Lattice sizes are powers of
// two by construction, so no other lengths are supported. Twiddles come from a
// table filled with std::polar per index, keeping per-element rounding at the
// one-ulp level across the whole transform.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qwalk/matrix.hpp"

namespace qwalk {

inline bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Reusable plan for y_m = sum_j x_j exp(sign * 2 pi i j m / n), unnormalized.
// Callers apply 1/sqrt(n) to make the map unitary.
class FftPlan {
  public:
    FftPlan(int n, int sign) : n_(n) {
        if (!is_power_of_two(n)) throw std::invalid_argument("FftPlan: n must be a power of two");
        if (sign != 1 && sign != -1) throw std::invalid_argument("FftPlan: sign must be +1 or -1");
        tw_.resize(static_cast<std::size_t>(n / 2));
        for (int k = 0; k < n / 2; ++k)
            tw_[static_cast<std::size_t>(k)] =
                std::polar(1.0, sign * 2.0 * std::numbers::pi * k / n);
    }

    int size() const { return n_; }

    // In-place transform of x[0..n).
    void transform(Complex* x) const {
        const int n = n_;
        for (int i = 1, j = 0; i < n; ++i) {
            int bit = n >> 1;
            for (; j & bit; bit >>= 1) j ^= bit;
            j ^= bit;
            if (i < j) std::swap(x[i], x[j]);
        }
        for (int len = 2; len <= n; len <<= 1) {
            const int half = len >> 1;
            const int step = n / len;
            for (int block = 0; block < n; block += len) {
                for (int k = 0; k < half; ++k) {
                    const Complex w = tw_[static_cast<std::size_t>(k * step)];
                    const Complex even = x[block + k];
                    const Complex odd = x[block + k + half] * w;
                    x[block + k] = even + odd;
                    x[block + k + half] = even - odd;
                }
            }
        }
    }

  private:
    int n_;
    std::vector<Complex> tw_;
};

}  // namespace qwalk
