#include "logconvex/simd.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>

namespace logconvex::simd {

namespace detail {

//
// Scalar reference kernels. These define the semantics; every other
// backend is tested against them.
//

namespace scalar {

static double dot(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

static double nrm2sq(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * x[i];
    return s;
}

static double sum(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
}

static double max_abs(const double* x, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(x[i]));
    return m;
}

static double weighted_abs2_sum(const double* w, const double* z, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double re = z[2 * i], im = z[2 * i + 1];
        s += w[i] * (re * re + im * im);
    }
    return s;
}

static double sq_norm4(const double* const* comps, int ncomp, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double q = 0.0;
        for (int c = 0; c < ncomp; ++c) {
            const double v = comps[c][i];
            q += v * v;
        }
        s += q * q;
    }
    return s;
}

static void axpy(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

static void scale(double a, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

static void mul(const double* x, const double* y, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] * y[i];
}

static void vexp(const double* x, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(x[i]);
}

static void exp_scale(double s, const double* w, const double* y, double* out,
                      std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(s * w[i]) * y[i];
}

}  // namespace scalar

const KernelTable& scalar_table() {
    static const KernelTable t = {
        scalar::dot,  scalar::nrm2sq, scalar::sum, scalar::max_abs,
        scalar::weighted_abs2_sum, scalar::sq_norm4,
        scalar::axpy, scalar::scale,  scalar::mul, scalar::vexp,
        scalar::exp_scale,
    };
    return t;
}

}  // namespace detail

namespace {

struct Dispatch {
    const detail::KernelTable* table;
    Backend backend;
};

Dispatch select_initial() {
    const detail::KernelTable* avx2 = detail::avx2_table();
    const char* env = std::getenv("LOGCONVEX_SIMD");
    if (env != nullptr) {
        if (std::strcmp(env, "scalar") == 0) return {&detail::scalar_table(), Backend::Scalar};
        if (std::strcmp(env, "avx2") == 0 && avx2 != nullptr) return {avx2, Backend::Avx2};
    }
    if (avx2 != nullptr) return {avx2, Backend::Avx2};
    return {&detail::scalar_table(), Backend::Scalar};
}

Dispatch& dispatch() {
    static Dispatch d = select_initial();
    return d;
}

}  // namespace

Backend active_backend() { return dispatch().backend; }

bool cpu_has_avx2() { return detail::avx2_table() != nullptr; }

bool set_backend(Backend b) {
    if (b == Backend::Scalar) {
        dispatch() = {&detail::scalar_table(), Backend::Scalar};
        return true;
    }
    const detail::KernelTable* avx2 = detail::avx2_table();
    if (avx2 == nullptr) return false;
    dispatch() = {avx2, Backend::Avx2};
    return true;
}

const char* backend_name(Backend b) {
    return b == Backend::Avx2 ? "avx2" : "scalar";
}

double dot(std::span<const double> x, std::span<const double> y) {
    return dispatch().table->dot(x.data(), y.data(), x.size());
}

double nrm2sq(std::span<const double> x) {
    return dispatch().table->nrm2sq(x.data(), x.size());
}

double sum(std::span<const double> x) {
    return dispatch().table->sum(x.data(), x.size());
}

double max_abs(std::span<const double> x) {
    return dispatch().table->max_abs(x.data(), x.size());
}

double weighted_abs2_sum(std::span<const double> w, std::span<const double> z) {
    return dispatch().table->weighted_abs2_sum(w.data(), z.data(), w.size());
}

double sq_norm4(const double* const* comps, int ncomp, std::size_t n) {
    return dispatch().table->sq_norm4(comps, ncomp, n);
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
    dispatch().table->axpy(a, x.data(), y.data(), x.size());
}

void scale(double a, std::span<double> x) {
    dispatch().table->scale(a, x.data(), x.size());
}

void mul(std::span<const double> x, std::span<const double> y, std::span<double> out) {
    dispatch().table->mul(x.data(), y.data(), out.data(), x.size());
}

void vexp(std::span<const double> x, std::span<double> out) {
    dispatch().table->vexp(x.data(), out.data(), x.size());
}

void exp_scale(double s, std::span<const double> w, std::span<const double> y,
               std::span<double> out) {
    dispatch().table->exp_scale(s, w.data(), y.data(), out.data(), w.size());
}

}  // namespace logconvex::simd
