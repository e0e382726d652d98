/**
 * @file pauli.hpp
 * @brief Pauli strings, weighted Pauli sums and the Jordan-Wigner ladder
 *        operators built from them.
 *
 * A Pauli string is stored as two bit masks (x, z) with
 *   P = i^{|x & z|} X^x Z^z,
 * so Y on qubit k has both bits set. Products then only need popcounts.
 */
#pragma once

#include <bit>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pgsd/error.hpp"
#include "pgsd/statevector.hpp"

namespace pgsd {

struct PauliString {
  int n_qubits = 0;
  std::uint64_t x = 0;
  std::uint64_t z = 0;

  PauliString() = default;
  PauliString(int n, std::uint64_t xm, std::uint64_t zm) : n_qubits(n), x(xm), z(zm) {
    if (n < 0 || n > 64) throw ValidationError("PauliString supports at most 64 qubits");
    const std::uint64_t full = n == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
    if ((x | z) & ~full) throw ValidationError("Pauli index outside qubit range");
  }

  static PauliString identity(int n) { return PauliString(n, 0, 0); }

  static PauliString single(int n, int qubit, char op) {
    PauliString p(n, 0, 0);
    p.set(qubit, op);
    return p;
  }

  /// Parses "X0 Z2 Y5" (or "I" / empty for the identity).
  static PauliString from_label(std::string_view label, int n) {
    PauliString p(n, 0, 0);
    std::istringstream in{std::string(label)};
    std::string tok;
    while (in >> tok) {
      if (tok == "I") continue;
      if (tok.size() < 2) throw ValidationError("bad Pauli token '" + tok + "'");
      const int q = std::stoi(tok.substr(1));
      if (p.op(q) != 'I') throw ValidationError("qubit repeated in Pauli label");
      p.set(q, tok[0]);
    }
    return p;
  }

  void set(int qubit, char op) {
    if (qubit < 0 || qubit >= n_qubits) throw ValidationError("Pauli index outside qubit range");
    const std::uint64_t b = std::uint64_t{1} << qubit;
    x &= ~b;
    z &= ~b;
    switch (op) {
      case 'I': break;
      case 'X': x |= b; break;
      case 'Y': x |= b; z |= b; break;
      case 'Z': z |= b; break;
      default: throw ValidationError(std::string("unknown Pauli '") + op + "'");
    }
  }

  char op(int qubit) const noexcept {
    const bool bx = (x >> qubit) & 1u;
    const bool bz = (z >> qubit) & 1u;
    return bx ? (bz ? 'Y' : 'X') : (bz ? 'Z' : 'I');
  }

  std::uint64_t support() const noexcept { return x | z; }
  int weight() const noexcept { return std::popcount(support()); }
  bool is_identity() const noexcept { return (x | z) == 0; }

  /// Qubits in ascending order.
  std::vector<int> qubits() const {
    std::vector<int> q;
    for (std::uint64_t s = support(); s; s &= s - 1) q.push_back(std::countr_zero(s));
    return q;
  }

  std::string label() const {
    if (is_identity()) return "I";
    std::string out;
    for (int q : qubits()) {
      if (!out.empty()) out += ' ';
      out += op(q);
      out += std::to_string(q);
    }
    return out;
  }

  friend bool operator==(const PauliString& a, const PauliString& b) noexcept {
    return a.n_qubits == b.n_qubits && a.x == b.x && a.z == b.z;
  }
  friend bool operator<(const PauliString& a, const PauliString& b) noexcept {
    if (a.n_qubits != b.n_qubits) return a.n_qubits < b.n_qubits;
    if (a.x != b.x) return a.x < b.x;
    return a.z < b.z;
  }
};

/// i^k for k mod 4.
inline cplx i_pow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

/// a * b = phase * result, phase in {±1, ±i}.
inline std::pair<cplx, PauliString> multiply(const PauliString& a, const PauliString& b) {
  if (a.n_qubits != b.n_qubits) throw ValidationError("Pauli product of different widths");
  PauliString c(a.n_qubits, a.x ^ b.x, a.z ^ b.z);
  const int e = std::popcount(a.x & a.z) + std::popcount(b.x & b.z) - std::popcount(c.x & c.z) +
                2 * std::popcount(a.z & b.x);
  return {i_pow(e), c};
}

inline bool commutes(const PauliString& a, const PauliString& b) noexcept {
  return ((std::popcount(a.x & b.z) + std::popcount(a.z & b.x)) & 1) == 0;
}

/// True when on every shared qubit both strings carry the same Pauli.
inline bool qubitwise_commutes(const PauliString& a, const PauliString& b) noexcept {
  const std::uint64_t both = a.support() & b.support();
  return ((a.x ^ b.x) & both) == 0 && ((a.z ^ b.z) & both) == 0;
}

class PauliSum {
 public:
  static constexpr double kDropTolerance = 1e-14;

  PauliSum() = default;
  explicit PauliSum(int n) : n_qubits_(n) {}

  static PauliSum constant(int n, cplx c) {
    PauliSum s(n);
    s.add(PauliString::identity(n), c);
    return s;
  }
  static PauliSum term(const PauliString& p, cplx c) {
    PauliSum s(p.n_qubits);
    s.add(p, c);
    return s;
  }

  int n_qubits() const noexcept { return n_qubits_; }
  const std::map<PauliString, cplx>& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool empty() const noexcept { return terms_.empty(); }

  void add(const PauliString& p, cplx c) {
    if (p.n_qubits != n_qubits_) throw ValidationError("Pauli term width does not match sum");
    terms_[p] += c;
  }

  cplx coefficient(const PauliString& p) const {
    auto it = terms_.find(p);
    return it == terms_.end() ? cplx{0.0, 0.0} : it->second;
  }

  /// Drops terms with |c| below tol.
  PauliSum& simplify(double tol = kDropTolerance) {
    for (auto it = terms_.begin(); it != terms_.end();) {
      if (std::abs(it->second) < tol)
        it = terms_.erase(it);
      else
        ++it;
    }
    return *this;
  }

  PauliSum adjoint() const {
    PauliSum out(n_qubits_);
    for (const auto& [p, c] : terms_) out.terms_.emplace(p, std::conj(c));
    return out;
  }

  bool is_hermitian(double tol = 1e-12) const {
    for (const auto& [p, c] : terms_)
      if (std::abs(c.imag()) > tol) return false;
    return true;
  }

  /// Zeroes imaginary parts below tol; throws if any exceed it.
  PauliSum& make_real(double tol = 1e-12) {
    for (auto& [p, c] : terms_) {
      if (std::abs(c.imag()) > tol) throw ValidationError("operator is not Hermitian: " + p.label());
      c = {c.real(), 0.0};
    }
    return *this;
  }

  PauliSum& operator+=(const PauliSum& o) {
    check_width(o);
    for (const auto& [p, c] : o.terms_) terms_[p] += c;
    return *this;
  }
  PauliSum& operator-=(const PauliSum& o) {
    check_width(o);
    for (const auto& [p, c] : o.terms_) terms_[p] -= c;
    return *this;
  }
  PauliSum& operator*=(cplx s) {
    for (auto& [p, c] : terms_) c *= s;
    return *this;
  }

  friend PauliSum operator+(PauliSum a, const PauliSum& b) { return a += b; }
  friend PauliSum operator-(PauliSum a, const PauliSum& b) { return a -= b; }
  friend PauliSum operator*(PauliSum a, cplx s) { return a *= s; }
  friend PauliSum operator*(cplx s, PauliSum a) { return a *= s; }

  friend PauliSum operator*(const PauliSum& a, const PauliSum& b) {
    a.check_width(b);
    PauliSum out(a.n_qubits_);
    for (const auto& [pa, ca] : a.terms_)
      for (const auto& [pb, cb] : b.terms_) {
        auto [phase, pc] = multiply(pa, pb);
        out.terms_[pc] += phase * ca * cb;
      }
    return out.simplify();
  }

  /// One term per line, "coeff  label", in canonical term order.
  std::string to_text() const {
    std::string out;
    char buf[96];
    for (const auto& [p, c] : terms_) {
      if (c.imag() == 0.0)
        std::snprintf(buf, sizeof(buf), "%.12f", c.real());
      else
        std::snprintf(buf, sizeof(buf), "(%.12f,%.12f)", c.real(), c.imag());
      out += buf;
      out += "  ";
      out += p.label();
      out += '\n';
    }
    return out;
  }

 private:
  void check_width(const PauliSum& o) const {
    if (o.n_qubits_ != n_qubits_) throw ValidationError("PauliSum width mismatch");
  }

  int n_qubits_ = 0;
  std::map<PauliString, cplx> terms_;
};

/// P|i> = i^{|x&z|} (-1)^{|i&z|} |i ^ x>.
inline cplx pauli_phase(const PauliString& p, std::uint64_t basis) noexcept {
  const int e = std::popcount(p.x & p.z) + 2 * std::popcount(basis & p.z);
  return i_pow(e);
}

/// Applies the sum term by term.
inline Statevector pauli_matvec(const PauliSum& h, const Statevector& v) {
  if (h.n_qubits() != v.n_qubits) throw ValidationError("PauliSum/statevector qubit mismatch");
  Statevector out(v.n_qubits);
  out.amps.assign(v.dim(), cplx{0.0, 0.0});
  for (const auto& [p, c] : h.terms()) {
    const cplx base = c * i_pow(std::popcount(p.x & p.z));
    for (std::uint64_t i = 0; i < v.dim(); ++i) {
      const cplx a = v.amps[i];
      if (a == cplx{0.0, 0.0}) continue;
      const double sign = (std::popcount(i & p.z) & 1) ? -1.0 : 1.0;
      out.amps[i ^ p.x] += base * sign * a;
    }
  }
  return out;
}

/// Applies a single Pauli string in place.
inline void apply_pauli(Statevector& v, const PauliString& p) {
  if (p.is_identity()) return;
  const cplx base = i_pow(std::popcount(p.x & p.z));
  if (p.x == 0) {
    for (std::uint64_t i = 0; i < v.dim(); ++i)
      if (std::popcount(i & p.z) & 1) v.amps[i] = -v.amps[i];
    return;
  }
  const std::uint64_t pivot = std::uint64_t{1} << std::countr_zero(p.x);
  for (std::uint64_t i = 0; i < v.dim(); ++i) {
    if (i & pivot) continue;
    const std::uint64_t j = i ^ p.x;
    const cplx ai = v.amps[i];
    const cplx aj = v.amps[j];
    const double si = (std::popcount(i & p.z) & 1) ? -1.0 : 1.0;
    const double sj = (std::popcount(j & p.z) & 1) ? -1.0 : 1.0;
    v.amps[j] = base * si * ai;
    v.amps[i] = base * sj * aj;
  }
}

/**
 * The same operator regrouped by X mask: for each distinct x the diagonal
 * d_x(i) = sum_z c * i^{|x&z|} (-1)^{|i&z|}, so H|i> = sum_x d_x(i)|i^x>.
 * Much faster than term-by-term application for molecular Hamiltonians.
 */
class XBlockOperator {
 public:
  explicit XBlockOperator(const PauliSum& h) : n_qubits_(h.n_qubits()) {
    if (n_qubits_ > 24) throw ValidationError("XBlockOperator limited to 24 qubits");
    const std::size_t dim = std::size_t{1} << n_qubits_;
    std::map<std::uint64_t, std::size_t> slot;
    for (const auto& [p, c] : h.terms()) {
      auto [it, fresh] = slot.emplace(p.x, blocks_.size());
      if (fresh) blocks_.push_back({p.x, std::vector<cplx>(dim, cplx{0.0, 0.0})});
      auto& d = blocks_[it->second].diag;
      const cplx base = c * i_pow(std::popcount(p.x & p.z));
      for (std::uint64_t i = 0; i < dim; ++i)
        d[i] += (std::popcount(i & p.z) & 1) ? -base : base;
    }
  }

  int n_qubits() const noexcept { return n_qubits_; }

  void apply(const Statevector& v, Statevector& out) const {
    if (v.n_qubits != n_qubits_) throw ValidationError("operator/statevector qubit mismatch");
    out.n_qubits = v.n_qubits;
    out.amps.assign(v.dim(), cplx{0.0, 0.0});
    for (const auto& b : blocks_)
      for (std::uint64_t i = 0; i < v.dim(); ++i) out.amps[i ^ b.x] += b.diag[i] * v.amps[i];
  }

  Statevector apply(const Statevector& v) const {
    Statevector out;
    apply(v, out);
    return out;
  }

 private:
  struct Block {
    std::uint64_t x;
    std::vector<cplx> diag;
  };
  int n_qubits_;
  std::vector<Block> blocks_;
};

namespace jw {

/// a_p = Z_0 ... Z_{p-1} (X_p + iY_p)/2 ; |1> is an occupied spin orbital.
inline PauliSum annihilation(int p, int n_qubits) {
  const std::uint64_t zs = (std::uint64_t{1} << p) - 1;
  const std::uint64_t b = std::uint64_t{1} << p;
  PauliSum s(n_qubits);
  s.add(PauliString(n_qubits, b, zs), {0.5, 0.0});
  s.add(PauliString(n_qubits, b, zs | b), {0.0, 0.5});
  return s;
}

inline PauliSum creation(int p, int n_qubits) { return annihilation(p, n_qubits).adjoint(); }

/// Number operator (I - Z_p)/2.
inline PauliSum number(int p, int n_qubits) {
  PauliSum s(n_qubits);
  s.add(PauliString::identity(n_qubits), {0.5, 0.0});
  s.add(PauliString(n_qubits, 0, std::uint64_t{1} << p), {-0.5, 0.0});
  return s;
}

}  // namespace jw

}  // namespace pgsd
