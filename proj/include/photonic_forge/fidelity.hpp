#pragma once

// Electromagnetic overlap fidelity between recorded fields.
//
// Each record is read as the state (E, iB) / sqrt(2), so the overlap is
//   <a|b> = 1/2 * sum over cells and samples of (ez_a ez_b + bx_a bx_b + by_a by_b)
// and F = |<a|b>| / sqrt(<a|a> <b|b>). The in-plane magnetic components of
// the TE fields are bx and by; the overlap uses exactly those three fields.

#include <iosfwd>
#include <span>
#include <vector>

#include "photonic_forge/fdtd.hpp"

namespace pforge {

/// Throws ShapeError unless both records have the same regions and samples.
double inner_product(const FieldRecord& a, const FieldRecord& b);

/// Throws ZeroNormError if either record is identically zero. Clamped to [0, 1].
double fidelity(const FieldRecord& target, const FieldRecord& test);

struct FidelityReport {
  std::vector<double> per_input;  // index k = basis input |k>
  double aggregate = 0.0;         // arithmetic mean
  double minimum = 0.0;
};

/// Summarises per-input fidelities (mean and minimum).
FidelityReport summarize(std::vector<double> per_input);

FidelityReport gate_fidelity(std::span<const FieldRecord> targets, std::span<const FieldRecord> tests);

/// "input_index,fidelity" rows, then "aggregate,<mean>", 9 significant digits.
void write_report_csv(std::ostream& os, const FidelityReport& report);

}  // namespace pforge
