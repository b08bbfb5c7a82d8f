#pragma once

#include <cstddef>

namespace relu2::kernels {

// Dataset-wide evaluation loops run through these kernels. A scalar reference
// implementation always exists; an AVX2+FMA variant is selected at runtime
// when the CPU supports it. The variants are equivalence-tested against the
// scalar reference (they may differ in the last ulps because vector lanes
// reassociate the sums).

enum class Isa { scalar, avx2 };

/// ISA whose kernels are currently dispatched.
Isa active_isa();

/// True when the running CPU supports the AVX2+FMA variants.
bool avx2_supported();

/// Test hook: force a particular ISA. Requests for an unsupported ISA fall
/// back to scalar. Not thread-safe; call before spawning workers.
void force_isa(Isa isa);

double dot(const double* a, const double* b, std::size_t n);

double sum_squares(const double* a, std::size_t n);

/// y[i] += alpha * x[i]
void axpy(double alpha, const double* x, double* y, std::size_t n);

/// sum_i w[i] * (p[i] - y[i])^2
double weighted_squared_error(const double* p, const double* y, const double* w, std::size_t n);

/// acc[i] += a * max(p[i], 0)
void relu_accumulate(double a, const double* p, double* acc, std::size_t n);

}  // namespace relu2::kernels
