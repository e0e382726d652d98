#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "pgsd/error.hpp"

namespace pgsd {

using cplx = std::complex<double>;

/// Dense pure state over n qubits. Basis index bit k is the state of qubit k.
struct Statevector {
  int n_qubits = 0;
  std::vector<cplx> amps;

  Statevector() = default;
  explicit Statevector(int n, std::uint64_t basis_state = 0)
      : n_qubits(n), amps(std::size_t{1} << n, cplx{0.0, 0.0}) {
    if (n < 0 || n > 30) throw ValidationError("qubit count out of range");
    if (basis_state >= amps.size()) throw ValidationError("basis state index exceeds dimension");
    amps[basis_state] = 1.0;
  }

  std::size_t dim() const noexcept { return amps.size(); }

  double norm() const {
    double s = 0.0;
    for (const auto& a : amps) s += std::norm(a);
    return std::sqrt(s);
  }

  std::vector<double> probabilities() const {
    std::vector<double> p(amps.size());
    for (std::size_t i = 0; i < amps.size(); ++i) p[i] = std::norm(amps[i]);
    return p;
  }
};

inline cplx inner(const Statevector& a, const Statevector& b) {
  if (a.dim() != b.dim()) throw ValidationError("statevector dimension mismatch");
  cplx s{0.0, 0.0};
  for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a.amps[i]) * b.amps[i];
  return s;
}

}  // namespace pgsd
