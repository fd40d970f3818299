// Complex DFT engine for the periodic-box transforms.
// Radix-2 Cooley-Tukey when the axis length is a power of two, dense
// matrix DFT otherwise (axis lengths are small and even in this library).
#pragma once

#include <map>
#include <memory>
#include <vector>

#include "normdirac/core.hpp"
#include "normdirac/grid.hpp"

namespace normdirac::detail {

class FftPlan {
public:
    explicit FftPlan(int n) : n_(n) {
        radix2_ = (n & (n - 1)) == 0;
        if (radix2_) {
            bitrev_.resize(n);
            int log2n = 0;
            while ((1 << log2n) < n) ++log2n;
            for (int i = 0; i < n; ++i) {
                int r = 0;
                for (int b = 0; b < log2n; ++b)
                    if (i & (1 << b)) r |= 1 << (log2n - 1 - b);
                bitrev_[i] = r;
            }
            twiddle_.resize(n / 2);
            for (int j = 0; j < n / 2; ++j)
                twiddle_[j] = std::polar(1.0, -two_pi * j / n);
        } else {
            dft_.resize(static_cast<std::size_t>(n) * n);
            for (int k = 0; k < n; ++k)
                for (int j = 0; j < n; ++j)
                    dft_[static_cast<std::size_t>(k) * n + j] =
                        std::polar(1.0, -two_pi * j * k / n);
        }
    }

    int size() const { return n_; }

    // In-place unnormalized transform of one line:
    //   forward:  X_k = sum_j x_j exp(-2*pi*i*j*k/n)
    //   inverse:  x_j = sum_k X_k exp(+2*pi*i*j*k/n)
    void execute(Complex* line, bool forward) const {
        if (radix2_) {
            for (int i = 0; i < n_; ++i) {
                const int r = bitrev_[i];
                if (r > i) std::swap(line[i], line[r]);
            }
            for (int len = 2; len <= n_; len <<= 1) {
                const int half = len / 2;
                const int step = n_ / len;
                for (int start = 0; start < n_; start += len) {
                    for (int j = 0; j < half; ++j) {
                        Complex w = twiddle_[static_cast<std::size_t>(j) * step];
                        if (!forward) w = std::conj(w);
                        const Complex odd = line[start + j + half] * w;
                        const Complex even = line[start + j];
                        line[start + j] = even + odd;
                        line[start + j + half] = even - odd;
                    }
                }
            }
        } else {
            scratch_.assign(line, line + n_);
            for (int k = 0; k < n_; ++k) {
                Complex acc = 0.0;
                const Complex* row = dft_.data() + static_cast<std::size_t>(k) * n_;
                for (int j = 0; j < n_; ++j)
                    acc += scratch_[j] * (forward ? row[j] : std::conj(row[j]));
                line[k] = acc;
            }
        }
    }

private:
    int n_;
    bool radix2_;
    std::vector<int> bitrev_;
    std::vector<Complex> twiddle_;
    std::vector<Complex> dft_;
    mutable std::vector<Complex> scratch_;
};

inline const FftPlan& plan_for(int n) {
    thread_local std::map<int, std::unique_ptr<FftPlan>> cache;
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, std::make_unique<FftPlan>(n)).first;
    return *it->second;
}

// 3-D transform of a 4-component interleaved array, all axes, in place.
// Site index is ((ix*n + iy)*n + iz), components fastest.
inline void transform3d(Complex* values, int n, bool forward) {
    const FftPlan& plan = plan_for(n);
    const std::size_t nn = static_cast<std::size_t>(n);
    std::vector<Complex> line(nn);

    // stride between successive line elements, per axis, in units of Complex
    const std::size_t strides[3] = {4 * nn * nn, 4 * nn, 4};
    for (int axis = 0; axis < 3; ++axis) {
        const std::size_t stride = strides[axis];
        for (std::size_t outer = 0; outer < nn; ++outer) {
            for (std::size_t inner = 0; inner < nn; ++inner) {
                // base site of the line with the axis coordinate set to zero
                std::size_t base;
                if (axis == 0) base = (outer * nn + inner) * 4;
                else if (axis == 1) base = (outer * nn * nn + inner) * 4;
                else base = (outer * nn * nn + inner * nn) * 4;
                for (int c = 0; c < 4; ++c) {
                    Complex* p = values + base + c;
                    for (std::size_t j = 0; j < nn; ++j) line[j] = p[j * stride];
                    plan.execute(line.data(), forward);
                    for (std::size_t j = 0; j < nn; ++j) p[j * stride] = line[j];
                }
            }
        }
    }
}

}  // namespace normdirac::detail
