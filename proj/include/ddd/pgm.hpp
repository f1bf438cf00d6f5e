#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

#include "ddd/errors.hpp"
#include "ddd/tensor.hpp"

namespace ddd {

/* PGM (P5 binary / P2 ASCII) with integer grids mapped to [0,1] by division
 * by maxval.  Writing quantizes by rounding; a value that came from a k/maxval
 * grid round-trips bit-exactly. */

namespace detail {

inline int pgm_next_token(std::istream& in, std::string& tok) {
    tok.clear();
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    while (c != EOF && !std::isspace(c)) {
        tok.push_back(static_cast<char>(c));
        c = in.get();
    }
    return tok.empty() ? EOF : 0;
}

inline long pgm_int_token(std::istream& in, const char* what) {
    std::string tok;
    if (pgm_next_token(in, tok) == EOF) throw ConfigError(std::string("pgm: missing ") + what);
    try {
        return std::stol(tok);
    } catch (...) {
        throw ConfigError(std::string("pgm: bad ") + what);
    }
}

} // namespace detail

struct PgmImage {
    Tensor pixels;
    int maxval = 255;
};

inline PgmImage read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("pgm: cannot open " + path);

    std::string magic;
    if (detail::pgm_next_token(in, magic) == EOF || (magic != "P5" && magic != "P2"))
        throw ConfigError("pgm: unsupported magic in " + path);
    const long cols = detail::pgm_int_token(in, "width");
    const long rows = detail::pgm_int_token(in, "height");
    const long maxval = detail::pgm_int_token(in, "maxval");
    if (cols <= 0 || rows <= 0 || maxval <= 0 || maxval > 65535)
        throw ConfigError("pgm: invalid header in " + path);

    Tensor img(rows, cols);
    /* Divide, never multiply by a reciprocal: k/maxval must reproduce the
     * exact double a caller gets from the same division. */
    const double denom = static_cast<double>(maxval);
    if (magic == "P2") {
        for (long i = 0; i < rows * cols; ++i) img[i] = static_cast<double>(detail::pgm_int_token(in, "pixel")) / denom;
    } else {
        /* Exactly one whitespace byte separates the header from the raster;
         * pgm_int_token already consumed it as the token delimiter. */
        const bool wide = maxval > 255;
        for (long i = 0; i < rows * cols; ++i) {
            int hi = in.get();
            if (hi == EOF) throw ConfigError("pgm: truncated raster in " + path);
            long v = hi;
            if (wide) {
                int lo = in.get();
                if (lo == EOF) throw ConfigError("pgm: truncated raster in " + path);
                v = (v << 8) | lo;
            }
            img[i] = static_cast<double>(v) / denom;
        }
    }
    return {std::move(img), static_cast<int>(maxval)};
}

inline void write_pgm(const std::string& path, const Tensor& img, int maxval = 255, bool binary = true) {
    if (maxval <= 0 || maxval > 65535) throw DomainError("pgm: maxval out of range");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("pgm: cannot write " + path);

    out << (binary ? "P5" : "P2") << "\n" << img.cols() << " " << img.rows() << "\n" << maxval << "\n";
    const bool wide = maxval > 255;
    for (long i = 0; i < img.size(); ++i) {
        double v = img[i];
        if (v < 0.0) v = 0.0;
        if (v > 1.0) v = 1.0;
        long q = std::llround(v * maxval);
        if (q < 0) q = 0;
        if (q > maxval) q = maxval;
        if (binary) {
            if (wide) out.put(static_cast<char>((q >> 8) & 0xff));
            out.put(static_cast<char>(q & 0xff));
        } else {
            out << q << (i + 1 == img.size() ? "\n" : ((i + 1) % img.cols() == 0 ? "\n" : " "));
        }
    }
    if (!out) throw ConfigError("pgm: write failed for " + path);
}

} // namespace ddd
