#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "ddd/errors.hpp"
#include "ddd/rng.hpp"
#include "ddd/tensor.hpp"

namespace ddd {

/* Seeded ground-truth images, all with values in [0,1].
 *
 * blocks: six random axis-aligned rectangles of constant brightness stacked
 * on a dark background.  bumps: five Gaussians with random centers, widths,
 * and amplitudes.  checkerboard: rows/8 cells, seed-independent.  Draw
 * order is part of the contract; changing it changes shipped test data. */
inline Tensor generate_blocks(long rows, long cols, std::uint64_t seed) {
    if (rows < 4 || cols < 4) throw DomainError("generate_blocks: image too small");
    Rng rng(seed);
    Tensor img(rows, cols);
    for (int b = 0; b < 6; ++b) {
        const long r0 = static_cast<long>(rng.uniform_int(static_cast<std::uint64_t>(rows)));
        const long c0 = static_cast<long>(rng.uniform_int(static_cast<std::uint64_t>(cols)));
        const long h = 1 + static_cast<long>(rng.uniform_int(static_cast<std::uint64_t>(rows / 2)));
        const long w = 1 + static_cast<long>(rng.uniform_int(static_cast<std::uint64_t>(cols / 2)));
        const double v = rng.uniform(0.2, 1.0);
        for (long i = r0; i < std::min(rows, r0 + h); ++i)
            for (long j = c0; j < std::min(cols, c0 + w); ++j) img.at(i, j) = v;
    }
    return img;
}

inline Tensor generate_bumps(long rows, long cols, std::uint64_t seed) {
    if (rows < 4 || cols < 4) throw DomainError("generate_bumps: image too small");
    Rng rng(seed);
    Tensor img(rows, cols);
    for (int b = 0; b < 5; ++b) {
        const double ci = rng.uniform(0.0, static_cast<double>(rows - 1));
        const double cj = rng.uniform(0.0, static_cast<double>(cols - 1));
        const double width = rng.uniform(2.0, static_cast<double>(rows) / 4.0);
        const double amp = rng.uniform(0.3, 1.0);
        for (long i = 0; i < rows; ++i)
            for (long j = 0; j < cols; ++j) {
                const double di = static_cast<double>(i) - ci, dj = static_cast<double>(j) - cj;
                img.at(i, j) += amp * std::exp(-(di * di + dj * dj) / (2.0 * width * width));
            }
    }
    for (long i = 0; i < img.size(); ++i) img[i] = std::min(1.0, img[i]);
    return img;
}

inline Tensor generate_checkerboard(long rows, long cols, std::uint64_t /*seed*/) {
    if (rows < 8 || cols < 8) throw DomainError("generate_checkerboard: image too small");
    const long cell = std::max(1L, rows / 8);
    Tensor img(rows, cols);
    for (long i = 0; i < rows; ++i)
        for (long j = 0; j < cols; ++j) img.at(i, j) = ((i / cell + j / cell) % 2 == 0) ? 0.0 : 1.0;
    return img;
}

inline Tensor generate_image(const std::string& id, long rows, long cols, std::uint64_t seed) {
    if (id == "blocks") return generate_blocks(rows, cols, seed);
    if (id == "bumps") return generate_bumps(rows, cols, seed);
    if (id == "checkerboard") return generate_checkerboard(rows, cols, seed);
    throw ConfigError("generate_image: unknown generator '" + id + "'");
}

} // namespace ddd
