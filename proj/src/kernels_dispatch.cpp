#include "mpmimo/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "mpmimo/errors.hpp"

namespace mpmimo::kernels {

namespace {

Backend pick_default() {
    Backend b = detail::cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar;
    if (const char* env = std::getenv("MPMIMO_SIMD")) {
        if (std::strcmp(env, "scalar") == 0) b = Backend::Scalar;
        if (std::strcmp(env, "avx2") == 0 && detail::cpu_has_avx2()) b = Backend::Avx2;
    }
    return b;
}

std::atomic<Backend>& state() {
    static std::atomic<Backend> current{pick_default()};
    return current;
}

const detail::Ops& ops_for(Backend b) {
    return b == Backend::Avx2 ? detail::avx2_ops() : detail::scalar_ops();
}

}  // namespace

Backend active() { return state().load(std::memory_order_relaxed); }

bool supported(Backend b) { return b == Backend::Scalar || detail::cpu_has_avx2(); }

void force(Backend b) {
    if (!supported(b)) throw Error("kernel backend not supported on this machine");
    state().store(b, std::memory_order_relaxed);
}

const char* name(Backend b) { return b == Backend::Avx2 ? "avx2" : "scalar"; }

void matmul(std::size_t m, std::size_t k, std::size_t n, const cd* a, std::size_t lda,
            const cd* b, std::size_t ldb, cd* c, std::size_t ldc) {
    ops_for(active()).matmul(m, k, n, a, lda, b, ldb, c, ldc);
}

void axpy(std::size_t n, cd alpha, const cd* x, cd* y) { ops_for(active()).axpy(n, alpha, x, y); }

cd dotc(std::size_t n, const cd* x, const cd* y) { return ops_for(active()).dotc(n, x, y); }

}  // namespace mpmimo::kernels
