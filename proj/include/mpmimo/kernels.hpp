#pragma once

#include <complex>
#include <cstddef>

// Low-level dense complex kernels. Scalar reference implementations and an
// AVX2+FMA variant share one signature; the active backend is picked at
// runtime from CPUID (override with MPMIMO_SIMD=scalar|avx2 or force()).
// Everything above this layer is backend-agnostic.
namespace mpmimo::kernels {

using cd = std::complex<double>;

enum class Backend { Scalar, Avx2 };

Backend active();
bool supported(Backend b);
void force(Backend b);  // throws Error if the backend is not supported here
const char* name(Backend b);

// C (m x n) = A (m x k) * B (k x n); row-major with leading dimensions.
// C must not alias A or B.
void matmul(std::size_t m, std::size_t k, std::size_t n, const cd* a, std::size_t lda,
            const cd* b, std::size_t ldb, cd* c, std::size_t ldc);

// y += alpha * x
void axpy(std::size_t n, cd alpha, const cd* x, cd* y);

// sum_i conj(x_i) * y_i
cd dotc(std::size_t n, const cd* x, const cd* y);

namespace detail {

struct Ops {
    void (*matmul)(std::size_t, std::size_t, std::size_t, const cd*, std::size_t, const cd*,
                   std::size_t, cd*, std::size_t);
    void (*axpy)(std::size_t, cd, const cd*, cd*);
    cd (*dotc)(std::size_t, const cd*, const cd*);
};

const Ops& scalar_ops();
const Ops& avx2_ops();
bool cpu_has_avx2();

}  // namespace detail

}  // namespace mpmimo::kernels
