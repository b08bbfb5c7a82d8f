#include "relu2/kernels.hpp"

#include <algorithm>

namespace relu2::kernels {

namespace detail {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum_squares_scalar(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * a[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double weighted_squared_error_scalar(const double* p, const double* y, const double* w,
                                     std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = p[i] - y[i];
    s += w[i] * r * r;
  }
  return s;
}

void relu_accumulate_scalar(double a, const double* p, double* acc, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += a * std::max(p[i], 0.0);
}

// Defined in kernels_avx2.cpp; null on non-x86 builds.
double dot_avx2(const double*, const double*, std::size_t);
double sum_squares_avx2(const double*, std::size_t);
void axpy_avx2(double, const double*, double*, std::size_t);
double weighted_squared_error_avx2(const double*, const double*, const double*, std::size_t);
void relu_accumulate_avx2(double, const double*, double*, std::size_t);
bool cpu_has_avx2();

}  // namespace detail

namespace {

using DotFn = double (*)(const double*, const double*, std::size_t);
using SumSqFn = double (*)(const double*, std::size_t);
using AxpyFn = void (*)(double, const double*, double*, std::size_t);
using WseFn = double (*)(const double*, const double*, const double*, std::size_t);
using ReluAccFn = void (*)(double, const double*, double*, std::size_t);

struct Table {
  DotFn dot;
  SumSqFn sum_squares;
  AxpyFn axpy;
  WseFn wse;
  ReluAccFn relu_acc;
  Isa isa;
};

Table scalar_table() {
  return {detail::dot_scalar, detail::sum_squares_scalar, detail::axpy_scalar,
          detail::weighted_squared_error_scalar, detail::relu_accumulate_scalar, Isa::scalar};
}

Table avx2_table() {
  return {detail::dot_avx2, detail::sum_squares_avx2, detail::axpy_avx2,
          detail::weighted_squared_error_avx2, detail::relu_accumulate_avx2, Isa::avx2};
}

Table& table() {
  static Table t = detail::cpu_has_avx2() ? avx2_table() : scalar_table();
  return t;
}

}  // namespace

Isa active_isa() { return table().isa; }

bool avx2_supported() { return detail::cpu_has_avx2(); }

void force_isa(Isa isa) {
  if (isa == Isa::avx2 && detail::cpu_has_avx2())
    table() = avx2_table();
  else
    table() = scalar_table();
}

double dot(const double* a, const double* b, std::size_t n) { return table().dot(a, b, n); }

double sum_squares(const double* a, std::size_t n) { return table().sum_squares(a, n); }

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  table().axpy(alpha, x, y, n);
}

double weighted_squared_error(const double* p, const double* y, const double* w, std::size_t n) {
  return table().wse(p, y, w, n);
}

void relu_accumulate(double a, const double* p, double* acc, std::size_t n) {
  table().relu_acc(a, p, acc, n);
}

}  // namespace relu2::kernels
