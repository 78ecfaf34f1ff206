#include "photonic_forge/gates.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

#include "photonic_forge/errors.hpp"

namespace pforge {

namespace {

constexpr double kPi = std::numbers::pi;

int parse_int_suffix(const std::string& selector, std::size_t colon) {
  const std::string tail = selector.substr(colon + 1);
  std::size_t used = 0;
  long long value = 0;
  try {
    value = std::stoll(tail, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tail.size() || tail.empty() || value < 0 || value > INT32_MAX)
    throw ConfigError("gate selector \"" + selector + "\": expected a non-negative integer after ':'");
  return static_cast<int>(value);
}

}  // namespace

double unitarity_defect(const Eigen::MatrixXcd& m) {
  const Eigen::MatrixXcd d = m.adjoint() * m - Eigen::MatrixXcd::Identity(m.rows(), m.cols());
  return d.cwiseAbs().maxCoeff();
}

UnitarySpec::UnitarySpec(Eigen::MatrixXcd entries, double tol) : entries_(std::move(entries)) {
  if (entries_.rows() < 1 || entries_.rows() != entries_.cols()) throw ConfigError("gate matrix must be square and non-empty");
  if (!entries_.allFinite()) throw ConfigError("gate matrix has non-finite entries");
  const double defect = pforge::unitarity_defect(entries_);
  if (!(defect <= tol)) {
    std::ostringstream os;
    os << "gate matrix is not unitary: max |U^dagger U - I| = " << defect << " > " << tol;
    throw ConfigError(os.str());
  }
}

std::vector<Complex> UnitarySpec::column(int k) const {
  if (k < 0 || k >= n()) throw ConfigError("gate column " + std::to_string(k) + " out of range");
  std::vector<Complex> out(static_cast<std::size_t>(n()));
  for (int j = 0; j < n(); ++j) out[j] = entries_(j, k);
  return out;
}

double UnitarySpec::unitarity_defect() const { return pforge::unitarity_defect(entries_); }

UnitarySpec identity_gate(int n) {
  if (n < 1) throw ConfigError("identity gate needs n >= 1");
  return UnitarySpec(Eigen::MatrixXcd::Identity(n, n));
}

UnitarySpec hadamard() {
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::MatrixXcd h(2, 2);
  h << s, s, s, -s;
  return UnitarySpec(h);
}

UnitarySpec fourier(int d) {
  if (d < 2) throw ConfigError("fourier gate needs d >= 2");
  Eigen::MatrixXcd f(d, d);
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) {
      // Reduce jk mod d so the phase stays exact for the quarter turns.
      const int m = (j * k) % d;
      if (4 * m == d) {
        f(j, k) = Complex(0.0, norm);
      } else if (2 * m == d) {
        f(j, k) = Complex(-norm, 0.0);
      } else if (4 * m == 3 * d) {
        f(j, k) = Complex(0.0, -norm);
      } else if (m == 0) {
        f(j, k) = Complex(norm, 0.0);
      } else {
        f(j, k) = std::polar(norm, 2.0 * kPi * m / d);
      }
    }
  }
  return UnitarySpec(f);
}

UnitarySpec u2(const RandomU2Params& p) {
  const Complex i(0.0, 1.0);
  Eigen::MatrixXcd m(2, 2);
  m(0, 0) = std::exp(i * p.psi) * std::cos(p.phi);
  m(0, 1) = std::exp(i * p.chi) * std::sin(p.phi);
  m(1, 0) = -std::exp(-i * p.chi) * std::sin(p.phi);
  m(1, 1) = std::exp(-i * p.psi) * std::cos(p.phi);
  m *= std::exp(i * p.alpha);
  return UnitarySpec(m);
}

std::pair<RandomU2Params, UnitarySpec> sample_u2(std::uint64_t seed, bool haar) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  RandomU2Params p;
  p.alpha = 2.0 * kPi * unit(rng);
  p.phi = haar ? std::asin(std::sqrt(unit(rng))) : 0.5 * kPi * unit(rng);
  p.psi = 2.0 * kPi * unit(rng);
  p.chi = 2.0 * kPi * unit(rng);
  return {p, u2(p)};
}

UnitarySpec gate_from_selector(const std::string& selector, bool haar) {
  if (selector == "hadamard") return hadamard();
  const std::size_t colon = selector.find(':');
  if (colon != std::string::npos) {
    const std::string head = selector.substr(0, colon);
    if (head == "fourier") return fourier(parse_int_suffix(selector, colon));
    if (head == "identity") return identity_gate(parse_int_suffix(selector, colon));
    if (head == "random-u2") return sample_u2(static_cast<std::uint64_t>(parse_int_suffix(selector, colon)), haar).second;
  }
  if (std::filesystem::exists(selector)) return load_matrix_json(selector);
  throw ConfigError("unknown gate selector \"" + selector +
                    "\" (expected hadamard, identity:n, fourier:d, random-u2:seed or a matrix file)");
}

UnitarySpec read_matrix_json(std::istream& is) {
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("matrix file: ") + e.what());
  }
  if (!j.is_array() || j.empty()) throw ParseError("matrix file: expected a non-empty array of rows");
  const int n = static_cast<int>(j.size());
  Eigen::MatrixXcd m(n, n);
  for (int r = 0; r < n; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      throw ParseError("matrix file: row " + std::to_string(r) + " must have " + std::to_string(n) + " entries");
    for (int c = 0; c < n; ++c) {
      const auto& e = row[c];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        throw ParseError("matrix file: entry (" + std::to_string(r) + "," + std::to_string(c) + ") must be [re, im]");
      m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  return UnitarySpec(m);
}

UnitarySpec load_matrix_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open matrix file " + path);
  return read_matrix_json(is);
}

std::string matrix_to_json(const UnitarySpec& u) {
  nlohmann::json j = nlohmann::json::array();
  for (int r = 0; r < u.n(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < u.n(); ++c) row.push_back({u(r, c).real(), u(r, c).imag()});
    j.push_back(row);
  }
  return j.dump();
}

}  // namespace pforge
