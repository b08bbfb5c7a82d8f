#include "relu2/eval.hpp"

#include <cmath>

#include "relu2/kernels.hpp"

namespace relu2 {

namespace {
constexpr double kBoundTol = 1e-12;
}

Dataset::Dataset(int dim, bool bounded, std::vector<WeightedSample> samples)
    : dim_(dim), bounded_(bounded), samples_(std::move(samples)) {
  if (dim_ <= 0) throw ValidationError("dataset dimension must be positive");
  if (samples_.empty()) throw ValidationError("dataset must contain at least one sample");
  total_weight_ = 0.0;
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const WeightedSample& s = samples_[i];
    if (static_cast<int>(s.x.size()) != dim_)
      throw ValidationError("sample " + std::to_string(i) + " has wrong dimension");
    if (!(s.weight > 0.0))
      throw ValidationError("sample " + std::to_string(i) + " has non-positive weight");
    if (!std::isfinite(s.y) || !std::isfinite(s.weight))
      throw ValidationError("sample " + std::to_string(i) + " has non-finite fields");
    if (bounded_ && squared_norm(s.x) > (1.0 + kBoundTol) * (1.0 + kBoundTol))
      throw ValidationError("bounded dataset has sample " + std::to_string(i) +
                            " outside the unit ball");
    total_weight_ += s.weight;
  }
  if (!(total_weight_ > 0.0)) throw ValidationError("dataset total weight must be positive");
}

void validate_network(const ReluNetwork& net, bool bounded) {
  if (net.k <= 0) throw ValidationError("network must have at least one unit");
  if (static_cast<int>(net.unit_weights.size()) != net.k ||
      static_cast<int>(net.coeffs.size()) != net.k)
    throw ValidationError("network field lengths do not match k");
  const std::size_t dim = net.unit_weights[0].size();
  for (int j = 0; j < net.k; ++j) {
    if (net.coeffs[j] != 1 && net.coeffs[j] != -1)
      throw ValidationError("network coefficients must be -1 or +1");
    if (net.unit_weights[j].size() != dim)
      throw ValidationError("network unit weight vectors have unequal lengths");
    if (bounded && squared_norm(net.unit_weights[j]) > (1.0 + kBoundTol) * (1.0 + kBoundTol))
      throw ValidationError("bounded network has unit " + std::to_string(j) +
                            " outside the unit ball");
  }
}

double eval_network(const ReluNetwork& net, std::span<const double> x) {
  validate_network(net);
  if (static_cast<int>(x.size()) != net.dim())
    throw ValidationError("input dimension does not match network dimension");
  double out = 0.0;
  for (int j = 0; j < net.k; ++j) {
    const double pre = kernels::dot(net.unit_weights[j].data(), x.data(), x.size());
    if (pre > 0.0) out += net.coeffs[j] * pre;
  }
  return out;
}

double eval_loss(const ReluNetwork& net, const Dataset& data) {
  validate_network(net);
  if (net.dim() != data.dim())
    throw ValidationError("dataset dimension does not match network dimension");
  double acc = 0.0;
  for (const WeightedSample& s : data.samples()) {
    double out = 0.0;
    for (int j = 0; j < net.k; ++j) {
      const double pre = kernels::dot(net.unit_weights[j].data(), s.x.data(), s.x.size());
      if (pre > 0.0) out += net.coeffs[j] * pre;
    }
    const double r = out - s.y;
    acc += s.weight * r * r;
  }
  return acc / data.total_weight();
}

ReluNetwork normalize_coefficients(const std::vector<double>& general_coeffs,
                                   const std::vector<std::vector<double>>& unit_weights) {
  if (general_coeffs.size() != unit_weights.size() || general_coeffs.empty())
    throw ValidationError("coefficient and unit counts must match and be non-empty");
  ReluNetwork net;
  net.k = static_cast<int>(general_coeffs.size());
  net.coeffs.resize(net.k);
  net.unit_weights.resize(net.k);
  for (int j = 0; j < net.k; ++j) {
    const double a = general_coeffs[j];
    if (a == 0.0 || !std::isfinite(a))
      throw ValidationError("general coefficients must be nonzero and finite");
    net.coeffs[j] = a > 0.0 ? 1 : -1;
    net.unit_weights[j] = unit_weights[j];
    for (double& w : net.unit_weights[j]) w *= std::abs(a);
  }
  validate_network(net);
  return net;
}

BoundedReport check_bounded(const Dataset& data, int k) {
  if (k <= 0) throw ValidationError("unit count must be positive");
  BoundedReport report;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const WeightedSample& s = data.samples()[i];
    const double norm = std::sqrt(squared_norm(s.x));
    const bool bad_norm = norm > 1.0 + kBoundTol;
    const bool bad_label = std::abs(s.y) > static_cast<double>(k) + kBoundTol;
    if (bad_norm || bad_label)
      report.violations.push_back({i, norm, s.y, bad_norm, bad_label});
  }
  return report;
}

Dataset pad_dimensions(const Dataset& data, int new_dim) {
  if (new_dim < data.dim())
    throw ValidationError("padded dimension must be at least the current dimension");
  std::vector<WeightedSample> padded = data.samples();
  for (WeightedSample& s : padded) s.x.resize(new_dim, 0.0);
  return Dataset(new_dim, data.bounded(), std::move(padded));
}

}  // namespace relu2
