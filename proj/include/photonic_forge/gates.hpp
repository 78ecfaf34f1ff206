#pragma once

// Target unitaries. Column k of a gate is the output state for input |k>.

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace pforge {

using Complex = std::complex<double>;

class UnitarySpec {
 public:
  /// Throws ConfigError unless the matrix is square and U^dagger U = I
  /// within `tol` in the max norm. Nothing is projected or repaired.
  explicit UnitarySpec(Eigen::MatrixXcd entries, double tol = 1e-10);

  int n() const noexcept { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXcd& entries() const noexcept { return entries_; }
  Complex operator()(int row, int col) const { return entries_(row, col); }
  std::vector<Complex> column(int k) const;

  /// max |(U^dagger U - I)_ij|
  double unitarity_defect() const;

 private:
  Eigen::MatrixXcd entries_;
};

double unitarity_defect(const Eigen::MatrixXcd& m);

struct RandomU2Params {
  double alpha = 0.0;
  double phi = 0.0;
  double psi = 0.0;
  double chi = 0.0;
};

UnitarySpec identity_gate(int n);
UnitarySpec hadamard();
/// F[j][k] = exp(2 pi i j k / d) / sqrt(d)
UnitarySpec fourier(int d);
/// exp(i alpha) [[exp(i psi) cos phi, exp(i chi) sin phi], [-exp(-i chi) sin phi, exp(-i psi) cos phi]]
UnitarySpec u2(const RandomU2Params& params);

/// Draws alpha, psi, chi uniformly on [0, 2 pi] and phi uniformly on
/// [0, pi/2]. With haar = true phi is drawn as asin(sqrt(u)) instead, which
/// makes the matrix Haar-distributed on U(2).
std::pair<RandomU2Params, UnitarySpec> sample_u2(std::uint64_t seed, bool haar = false);

/// Parses a gate selector: "hadamard", "identity:n", "fourier:d",
/// "random-u2:seed", or a path to a matrix JSON file.
UnitarySpec gate_from_selector(const std::string& selector, bool haar = false);

// Matrix file: JSON array of n rows, each an array of n [re, im] pairs.
UnitarySpec read_matrix_json(std::istream& is);
UnitarySpec load_matrix_json(const std::string& path);
std::string matrix_to_json(const UnitarySpec& u);

}  // namespace pforge
