#include "mpmimo/kernels.hpp"

namespace mpmimo::kernels::detail {

namespace {

void matmul_scalar(std::size_t m, std::size_t k, std::size_t n, const cd* a, std::size_t lda,
                   const cd* b, std::size_t ldb, cd* c, std::size_t ldc) {
    for (std::size_t i = 0; i < m; ++i) {
        cd* ci = c + i * ldc;
        for (std::size_t j = 0; j < n; ++j) ci[j] = cd(0.0, 0.0);
        const cd* ai = a + i * lda;
        for (std::size_t p = 0; p < k; ++p) {
            const cd aip = ai[p];
            if (aip == cd(0.0, 0.0)) continue;
            const cd* bp = b + p * ldb;
            for (std::size_t j = 0; j < n; ++j) ci[j] += aip * bp[j];
        }
    }
}

void axpy_scalar(std::size_t n, cd alpha, const cd* x, cd* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

cd dotc_scalar(std::size_t n, const cd* x, const cd* y) {
    cd acc(0.0, 0.0);
    for (std::size_t i = 0; i < n; ++i) acc += std::conj(x[i]) * y[i];
    return acc;
}

}  // namespace

const Ops& scalar_ops() {
    static const Ops ops{&matmul_scalar, &axpy_scalar, &dotc_scalar};
    return ops;
}

}  // namespace mpmimo::kernels::detail
