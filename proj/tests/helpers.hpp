#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "mpmimo/linalg.hpp"
#include "mpmimo/mat.hpp"
#include "mpmimo/rng.hpp"

namespace testutil {

using mpmimo::cd;
using mpmimo::CMat;

inline CMat random_mat(mpmimo::Rng& rng, std::size_t rows, std::size_t cols) {
    CMat m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = rng.cnormal();
    return m;
}

// Hermitian positive definite: A^H A + ridge * I.
inline CMat random_hpd(mpmimo::Rng& rng, std::size_t n, double ridge = 0.5) {
    const CMat a = random_mat(rng, n, n);
    return mpmimo::adjoint(a) * a + ridge * CMat::identity(n);
}

inline CMat random_hermitian(mpmimo::Rng& rng, std::size_t n) {
    const CMat a = random_mat(rng, n, n);
    return (a + mpmimo::adjoint(a)) * 0.5;
}

inline double max_diff(const CMat& a, const CMat& b) {
    if (!a.same_shape(b)) return 1e300;
    return mpmimo::max_abs(a - b);
}

// max |a - b| over entries, scaled by max |b| (or 1 for near-zero b).
inline double rel_diff(const CMat& a, const CMat& b) {
    const double scale = mpmimo::max_abs(b);
    return max_diff(a, b) / (scale > 0.0 ? scale : 1.0);
}

// Tie-averaged ranks, 1-based.
inline std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[order[k]] = shared;
        i = j + 1;
    }
    return r;
}

// Spearman rank correlation: Pearson correlation of the rank vectors.
inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    const std::vector<double> ra = ranks(a), rb = ranks(b);
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= n;
    mb /= n;
    double num = 0.0, da = 0.0, db = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (ra[i] - ma) * (rb[i] - mb);
        da += (ra[i] - ma) * (ra[i] - ma);
        db += (rb[i] - mb) * (rb[i] - mb);
    }
    return num / std::sqrt(da * db);
}

}  // namespace testutil
