#include "photonic_forge/fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>

#include "photonic_forge/errors.hpp"

namespace pforge {

namespace {

// Neumaier-compensated running sum.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

// Fixed-order blocked dot product: four interleaved partial sums per block,
// block results combined with compensation. The order never depends on
// threading, so results are reproducible bit for bit.
void dot_into(CompensatedSum& acc, const std::vector<double>& a, const std::vector<double>& b) {
  constexpr std::size_t kBlock = 256;
  const std::size_t n = a.size();
  for (std::size_t start = 0; start < n; start += kBlock) {
    const std::size_t end = std::min(n, start + kBlock);
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t k = start;
    for (; k + 4 <= end; k += 4) {
      s0 += a[k] * b[k];
      s1 += a[k + 1] * b[k + 1];
      s2 += a[k + 2] * b[k + 2];
      s3 += a[k + 3] * b[k + 3];
    }
    for (; k < end; ++k) s0 += a[k] * b[k];
    acc.add((s0 + s1) + (s2 + s3));
  }
}

}  // namespace

double inner_product(const FieldRecord& a, const FieldRecord& b) {
  if (!a.same_shape(b)) throw ShapeError("inner_product: records differ in regions or sample count");
  const std::size_t n = a.cells * a.samples;
  if (a.ez_t.size() != n || b.ez_t.size() != n || a.bx_t.size() != n || b.bx_t.size() != n || a.by_t.size() != n ||
      b.by_t.size() != n)
    throw ShapeError("inner_product: record component arrays have inconsistent lengths");
  CompensatedSum acc;
  dot_into(acc, a.ez_t, b.ez_t);
  dot_into(acc, a.bx_t, b.bx_t);
  dot_into(acc, a.by_t, b.by_t);
  return 0.5 * acc.value();
}

double fidelity(const FieldRecord& target, const FieldRecord& test) {
  const double tt = inner_product(target, target);
  const double ss = inner_product(test, test);
  if (!(tt > 0.0)) throw ZeroNormError("fidelity: target record has zero norm");
  if (!(ss > 0.0)) throw ZeroNormError("fidelity: test record has zero norm (no light reached the outputs)");
  const double ts = inner_product(target, test);
  return std::clamp(std::abs(ts) / std::sqrt(tt * ss), 0.0, 1.0);
}

FidelityReport summarize(std::vector<double> per_input) {
  FidelityReport r;
  r.per_input = std::move(per_input);
  if (r.per_input.empty()) return r;
  r.aggregate = std::accumulate(r.per_input.begin(), r.per_input.end(), 0.0) / static_cast<double>(r.per_input.size());
  r.minimum = *std::min_element(r.per_input.begin(), r.per_input.end());
  return r;
}

FidelityReport gate_fidelity(std::span<const FieldRecord> targets, std::span<const FieldRecord> tests) {
  if (targets.size() != tests.size() || targets.empty())
    throw ShapeError("gate_fidelity: need equally many non-zero target and test records");
  std::vector<double> per;
  per.reserve(targets.size());
  for (std::size_t k = 0; k < targets.size(); ++k) per.push_back(fidelity(targets[k], tests[k]));
  return summarize(std::move(per));
}

void write_report_csv(std::ostream& os, const FidelityReport& report) {
  const auto old_precision = os.precision();
  os << std::setprecision(9);
  os << "input_index,fidelity\n";
  for (std::size_t k = 0; k < report.per_input.size(); ++k) os << k << ',' << report.per_input[k] << '\n';
  os << "aggregate," << report.aggregate << '\n';
  os.precision(old_precision);
}

}  // namespace pforge
