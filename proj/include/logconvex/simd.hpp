#pragma once

/// Runtime-dispatched arithmetic kernels.
///
/// Every kernel has a scalar reference implementation and (on x86-64) an
/// AVX2 variant; the active backend is chosen once at startup from CPUID
/// and can be overridden with the LOGCONVEX_SIMD environment variable
/// ("scalar" / "avx2") or set_backend(). SIMD reductions accumulate in
/// lanes, so results may differ from scalar by rounding; the equivalence
/// tests bound that difference.

#include <cstddef>
#include <span>

namespace logconvex::simd {

enum class Backend { Scalar, Avx2 };

/// Backend selected for subsequent kernel calls.
Backend active_backend();

/// Force a backend; returns false (and leaves the state alone) if the CPU
/// cannot run it.
bool set_backend(Backend b);

bool cpu_has_avx2();
const char* backend_name(Backend b);

//
// Reductions
//

/// Σ x_i y_i
double dot(std::span<const double> x, std::span<const double> y);

/// Σ x_i²
double nrm2sq(std::span<const double> x);

/// Σ x_i
double sum(std::span<const double> x);

/// max_i |x_i|
double max_abs(std::span<const double> x);

/// Σ_i w_i (re_i² + im_i²) over an interleaved complex array
/// (z has 2n doubles for n weights).
double weighted_abs2_sum(std::span<const double> w, std::span<const double> z);

/// Σ_i (Σ_c comps[c][i]²)² — quartic sums such as ∫|u|⁴ and ∫|∇u|⁴.
double sq_norm4(const double* const* comps, int ncomp, std::size_t n);

//
// Pointwise maps
//

/// y += a·x
void axpy(double a, std::span<const double> x, std::span<double> y);

/// x *= a
void scale(double a, std::span<double> x);

/// out_i = x_i · y_i
void mul(std::span<const double> x, std::span<const double> y, std::span<double> out);

/// out_i = exp(x_i)
void vexp(std::span<const double> x, std::span<double> out);

/// out_i = exp(s·w_i) · y_i  — the e^{±W} rescaling transform.
void exp_scale(double s, std::span<const double> w, std::span<const double> y,
               std::span<double> out);

namespace detail {

struct KernelTable {
    double (*dot)(const double*, const double*, std::size_t);
    double (*nrm2sq)(const double*, std::size_t);
    double (*sum)(const double*, std::size_t);
    double (*max_abs)(const double*, std::size_t);
    double (*weighted_abs2_sum)(const double*, const double*, std::size_t);
    double (*sq_norm4)(const double* const*, int, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*scale)(double, double*, std::size_t);
    void (*mul)(const double*, const double*, double*, std::size_t);
    void (*vexp)(const double*, double*, std::size_t);
    void (*exp_scale)(double, const double*, const double*, double*, std::size_t);
};

const KernelTable& scalar_table();
const KernelTable* avx2_table();  // nullptr when not compiled in

}  // namespace detail

}  // namespace logconvex::simd
