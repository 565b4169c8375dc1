#include "mpmimo/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define MPMIMO_X86 1
#include <immintrin.h>
#else
#define MPMIMO_X86 0
#endif

namespace mpmimo::kernels::detail {

#if MPMIMO_X86

namespace {

// acc += a * b where a is a broadcast complex scalar (are/aim lanes) and b
// holds two packed complex doubles [re0 im0 re1 im1].
inline __m256d cmadd(__m256d are, __m256d aim, __m256d b, __m256d acc) {
    const __m256d bs = _mm256_permute_pd(b, 0x5);  // [im0 re0 im1 re1]
    return _mm256_add_pd(acc, _mm256_fmaddsub_pd(are, b, _mm256_mul_pd(aim, bs)));
}

void matmul_avx2(std::size_t m, std::size_t k, std::size_t n, const cd* a, std::size_t lda,
                 const cd* b, std::size_t ldb, cd* c, std::size_t ldc) {
    const double* ad = reinterpret_cast<const double*>(a);
    const double* bd = reinterpret_cast<const double*>(b);
    double* cdp = reinterpret_cast<double*>(c);

    std::size_t i = 0;
    for (; i + 2 <= m; i += 2) {
        const double* a0 = ad + 2 * i * lda;
        const double* a1 = a0 + 2 * lda;
        double* c0 = cdp + 2 * i * ldc;
        double* c1 = c0 + 2 * ldc;

        std::size_t j = 0;
        // 8 complex outputs per row per tile, two rows share each B load
        for (; j + 8 <= n; j += 8) {
            __m256d acc0[4], acc1[4];
            for (int v = 0; v < 4; ++v) {
                acc0[v] = _mm256_setzero_pd();
                acc1[v] = _mm256_setzero_pd();
            }
            for (std::size_t p = 0; p < k; ++p) {
                const __m256d are0 = _mm256_broadcast_sd(a0 + 2 * p);
                const __m256d aim0 = _mm256_broadcast_sd(a0 + 2 * p + 1);
                const __m256d are1 = _mm256_broadcast_sd(a1 + 2 * p);
                const __m256d aim1 = _mm256_broadcast_sd(a1 + 2 * p + 1);
                const double* bp = bd + 2 * (p * ldb + j);
                for (int v = 0; v < 4; ++v) {
                    const __m256d bv = _mm256_loadu_pd(bp + 4 * v);
                    acc0[v] = cmadd(are0, aim0, bv, acc0[v]);
                    acc1[v] = cmadd(are1, aim1, bv, acc1[v]);
                }
            }
            for (int v = 0; v < 4; ++v) {
                _mm256_storeu_pd(c0 + 2 * j + 4 * v, acc0[v]);
                _mm256_storeu_pd(c1 + 2 * j + 4 * v, acc1[v]);
            }
        }
        for (; j + 2 <= n; j += 2) {
            __m256d acc0 = _mm256_setzero_pd();
            __m256d acc1 = _mm256_setzero_pd();
            for (std::size_t p = 0; p < k; ++p) {
                const __m256d bv = _mm256_loadu_pd(bd + 2 * (p * ldb + j));
                acc0 = cmadd(_mm256_broadcast_sd(a0 + 2 * p), _mm256_broadcast_sd(a0 + 2 * p + 1),
                             bv, acc0);
                acc1 = cmadd(_mm256_broadcast_sd(a1 + 2 * p), _mm256_broadcast_sd(a1 + 2 * p + 1),
                             bv, acc1);
            }
            _mm256_storeu_pd(c0 + 2 * j, acc0);
            _mm256_storeu_pd(c1 + 2 * j, acc1);
        }
        for (; j < n; ++j) {
            cd s0(0.0, 0.0), s1(0.0, 0.0);
            for (std::size_t p = 0; p < k; ++p) {
                s0 += a[i * lda + p] * b[p * ldb + j];
                s1 += a[(i + 1) * lda + p] * b[p * ldb + j];
            }
            c[i * ldc + j] = s0;
            c[(i + 1) * ldc + j] = s1;
        }
    }
    if (i < m) {
        const double* a0 = ad + 2 * i * lda;
        double* c0 = cdp + 2 * i * ldc;
        std::size_t j = 0;
        for (; j + 2 <= n; j += 2) {
            __m256d acc = _mm256_setzero_pd();
            for (std::size_t p = 0; p < k; ++p) {
                const __m256d bv = _mm256_loadu_pd(bd + 2 * (p * ldb + j));
                acc = cmadd(_mm256_broadcast_sd(a0 + 2 * p), _mm256_broadcast_sd(a0 + 2 * p + 1),
                            bv, acc);
            }
            _mm256_storeu_pd(c0 + 2 * j, acc);
        }
        for (; j < n; ++j) {
            cd s(0.0, 0.0);
            for (std::size_t p = 0; p < k; ++p) s += a[i * lda + p] * b[p * ldb + j];
            c[i * ldc + j] = s;
        }
    }
}

void axpy_avx2(std::size_t n, cd alpha, const cd* x, cd* y) {
    const __m256d are = _mm256_set1_pd(alpha.real());
    const __m256d aim = _mm256_set1_pd(alpha.imag());
    const double* xd = reinterpret_cast<const double*>(x);
    double* yd = reinterpret_cast<double*>(y);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
        const __m256d yv = _mm256_loadu_pd(yd + 2 * i);
        _mm256_storeu_pd(yd + 2 * i, cmadd(are, aim, xv, yv));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

cd dotc_avx2(std::size_t n, const cd* x, const cd* y) {
    const double* xd = reinterpret_cast<const double*>(x);
    const double* yd = reinterpret_cast<const double*>(y);
    __m256d acc_p = _mm256_setzero_pd();  // lanes sum to Re
    __m256d acc_q = _mm256_setzero_pd();  // even-odd lanes combine to Im
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
        const __m256d yv = _mm256_loadu_pd(yd + 2 * i);
        const __m256d ys = _mm256_permute_pd(yv, 0x5);
        acc_p = _mm256_fmadd_pd(xv, yv, acc_p);  // xre*yre, xim*yim
        acc_q = _mm256_fmadd_pd(xv, ys, acc_q);  // xre*yim, xim*yre
    }
    alignas(32) double p[4], q[4];
    _mm256_store_pd(p, acc_p);
    _mm256_store_pd(q, acc_q);
    cd acc(p[0] + p[1] + p[2] + p[3], (q[0] - q[1]) + (q[2] - q[3]));
    for (; i < n; ++i) acc += std::conj(x[i]) * y[i];
    return acc;
}

}  // namespace

const Ops& avx2_ops() {
    static const Ops ops{&matmul_avx2, &axpy_avx2, &dotc_avx2};
    return ops;
}

bool cpu_has_avx2() {
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

#else

const Ops& avx2_ops() { return scalar_ops(); }
bool cpu_has_avx2() { return false; }

#endif  // MPMIMO_X86

}  // namespace mpmimo::kernels::detail
