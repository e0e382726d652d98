/**
 * @file fcidump.hpp
 * @brief Reader/writer for Molpro-style FCIDUMP integral files.
 *
 * Two-electron integrals are kept in chemists' notation (pq|rs) and stored
 * once per orbit of the real 8-fold permutation group; h1 is stored as a
 * packed lower triangle. File indices are 1-based, everything in memory is
 * 0-based.
 */
#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pgsd/error.hpp"

namespace pgsd {

class FcidumpData {
 public:
  FcidumpData() = default;
  FcidumpData(int norb, int nelec, int ms2) : norb_(norb), nelec_(nelec), ms2_(ms2) {
    if (norb < 0) throw ValidationError("norb must be non-negative");
    const auto npair = pair_index(norb, 0);
    h1_.assign(npair, 0.0);
    g2_.assign(npair * (npair + 1) / 2, 0.0);
  }

  int norb() const noexcept { return norb_; }
  int nelec() const noexcept { return nelec_; }
  int ms2() const noexcept { return ms2_; }
  int n_alpha() const noexcept { return (nelec_ + ms2_) / 2; }
  int n_beta() const noexcept { return (nelec_ - ms2_) / 2; }
  double e_core() const noexcept { return e_core_; }
  const std::vector<int>& orbsym() const noexcept { return orbsym_; }
  int isym() const noexcept { return isym_; }

  double h1(int p, int q) const { return h1_[pair_index(p, q)]; }
  double g2(int p, int q, int r, int s) const { return g2_[canonical_index(p, q, r, s)]; }

  void set_e_core(double v) noexcept { e_core_ = v; }
  void set_h1(int p, int q, double v) { h1_[pair_index(p, q)] = v; }
  void set_g2(int p, int q, int r, int s, double v) { g2_[canonical_index(p, q, r, s)] = v; }
  void set_orbsym(std::vector<int> s) { orbsym_ = std::move(s); }
  void set_isym(int s) noexcept { isym_ = s; }

  /// Raw canonical storage, used for exact comparisons.
  const std::vector<double>& h1_packed() const noexcept { return h1_; }
  const std::vector<double>& g2_packed() const noexcept { return g2_; }

  /// Index of the unordered pair {p,q} in a packed lower triangle.
  static std::size_t pair_index(std::size_t p, std::size_t q) noexcept {
    if (p < q) std::swap(p, q);
    return p * (p + 1) / 2 + q;
  }

  /// Index shared by all eight images of (pq|rs).
  static std::size_t canonical_index(int p, int q, int r, int s) noexcept {
    return pair_index(pair_index(p, q), pair_index(r, s));
  }

  void validate() const {
    if (nelec_ < 0) throw ValidationError("NELEC must be non-negative");
    if (std::abs(ms2_) > nelec_) throw ValidationError("|MS2| exceeds NELEC");
    if ((nelec_ + ms2_) % 2 != 0) throw ValidationError("NELEC + MS2 must be even");
    if (n_alpha() > norb_ || n_beta() > norb_)
      throw ValidationError("more electrons of one spin than orbitals");
  }

 private:
  int norb_ = 0;
  int nelec_ = 0;
  int ms2_ = 0;
  int isym_ = 1;
  double e_core_ = 0.0;
  std::vector<int> orbsym_;
  std::vector<double> h1_;
  std::vector<double> g2_;
};

namespace detail {

inline std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

inline std::optional<double> parse_real(std::string_view tok) {
  std::string buf(tok);
  // Fortran writers sometimes emit 1.0D-03.
  for (auto& c : buf)
    if (c == 'D' || c == 'd') c = 'E';
  double v = 0.0;
  const char* first = buf.data();
  if (!buf.empty() && buf.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, buf.data() + buf.size(), v);
  if (ec != std::errc() || ptr != buf.data() + buf.size()) return std::nullopt;
  return v;
}

inline std::optional<long> parse_int(std::string_view tok) {
  long v = 0;
  const char* first = tok.data();
  if (!tok.empty() && tok.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) return std::nullopt;
  return v;
}

struct HeaderToken {
  std::string text;
  std::size_t line;
};

}  // namespace detail

/// Parses an FCIDUMP stream. Throws ParseError / ValidationError.
inline FcidumpData parse_fcidump(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;

  // Header: everything from &FCI up to the first '/' or &END, tokenized as
  // words, '=' and list values. Commas and whitespace are interchangeable.
  std::vector<detail::HeaderToken> tokens;
  bool started = false;
  bool terminated = false;
  std::size_t header_end_line = 0;
  while (!terminated && std::getline(in, line)) {
    ++lineno;
    std::size_t i = 0;
    if (!started) {
      auto pos = detail::upper(line).find("&FCI");
      if (pos == std::string::npos) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        throw ParseError("expected '&FCI' namelist header", lineno);
      }
      started = true;
      i = pos + 4;
    }
    while (i < line.size()) {
      char c = line[i];
      if (c == '/' ) {
        terminated = true;
        break;
      }
      if (c == '&') {
        if (detail::upper(line.substr(i, 4)) == "&END") {
          terminated = true;
          break;
        }
        throw ParseError("unexpected '&' in header", lineno);
      }
      if (c == '=') {
        tokens.push_back({"=", lineno});
        ++i;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < line.size() && line[j] != '=' && line[j] != ',' && line[j] != '/' &&
             line[j] != '&' && !std::isspace(static_cast<unsigned char>(line[j])))
        ++j;
      tokens.push_back({line.substr(i, j - i), lineno});
      i = j;
    }
    header_end_line = lineno;
  }
  if (!started) throw ParseError("empty input, missing '&FCI' header", lineno);
  if (!terminated) throw ParseError("unterminated &FCI namelist", lineno);

  std::optional<long> norb, nelec;
  long ms2 = 0;
  long isym = 1;
  std::vector<int> orbsym;
  std::string key;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    const auto& tok = tokens[t];
    if (t + 1 < tokens.size() && tokens[t + 1].text == "=") {
      key = detail::upper(tok.text);
      ++t;
      continue;
    }
    if (tok.text == "=") throw ParseError("'=' without a key", tok.line);
    if (key.empty()) throw ParseError("value '" + tok.text + "' before any key", tok.line);
    auto as_int = [&]() {
      auto v = detail::parse_int(tok.text);
      if (!v) throw ParseError("non-integer value '" + tok.text + "' for " + key, tok.line);
      return *v;
    };
    if (key == "NORB") {
      norb = as_int();
    } else if (key == "NELEC") {
      nelec = as_int();
    } else if (key == "MS2") {
      ms2 = as_int();
    } else if (key == "ISYM") {
      isym = as_int();
    } else if (key == "ORBSYM") {
      orbsym.push_back(static_cast<int>(as_int()));
    }
    // Other keys (UHF, IUHF, ...) are accepted and ignored.
  }
  if (!norb) throw ParseError("header is missing NORB", header_end_line);
  if (!nelec) throw ParseError("header is missing NELEC", header_end_line);
  if (*norb < 0 || *norb > 64) throw ValidationError("NORB out of supported range [0, 64]");

  FcidumpData data(static_cast<int>(*norb), static_cast<int>(*nelec), static_cast<int>(ms2));
  data.set_isym(static_cast<int>(isym));
  data.set_orbsym(std::move(orbsym));
  data.validate();

  const long n = *norb;
  std::vector<std::string_view> fields;
  while (std::getline(in, line)) {
    ++lineno;
    fields.clear();
    std::string_view sv(line);
    std::size_t i = 0;
    while (i < sv.size()) {
      while (i < sv.size() && (std::isspace(static_cast<unsigned char>(sv[i])) || sv[i] == ','))
        ++i;
      std::size_t j = i;
      while (j < sv.size() && !std::isspace(static_cast<unsigned char>(sv[j])) && sv[j] != ',')
        ++j;
      if (j > i) fields.push_back(sv.substr(i, j - i));
      i = j;
    }
    if (fields.empty()) continue;
    if (fields.size() != 5)
      throw ParseError("expected 'value i j k l', got " + std::to_string(fields.size()) + " fields",
                       lineno);
    auto value = detail::parse_real(fields[0]);
    if (!value) throw ParseError("non-numeric integral value '" + std::string(fields[0]) + "'", lineno);
    long idx[4];
    for (int k = 0; k < 4; ++k) {
      auto v = detail::parse_int(fields[k + 1]);
      if (!v) throw ParseError("non-integer index '" + std::string(fields[k + 1]) + "'", lineno);
      if (*v < 0 || *v > n)
        throw ValidationError("line " + std::to_string(lineno) + ": index " + std::to_string(*v) +
                              " outside [0, " + std::to_string(n) + "]");
      idx[k] = *v;
    }
    const auto [i1, j1, k1, l1] = idx;
    if (i1 == 0 && j1 == 0 && k1 == 0 && l1 == 0) {
      data.set_e_core(*value);
    } else if (k1 == 0 && l1 == 0) {
      if (j1 == 0) continue;  // orbital energy record "e i 0 0 0"
      if (i1 == 0) throw ValidationError("line " + std::to_string(lineno) + ": malformed one-electron record");
      data.set_h1(static_cast<int>(i1 - 1), static_cast<int>(j1 - 1), *value);
    } else if (i1 > 0 && j1 > 0 && k1 > 0 && l1 > 0) {
      data.set_g2(static_cast<int>(i1 - 1), static_cast<int>(j1 - 1), static_cast<int>(k1 - 1),
                  static_cast<int>(l1 - 1), *value);
    } else {
      throw ValidationError("line " + std::to_string(lineno) + ": unsupported index pattern");
    }
  }
  return data;
}

inline FcidumpData parse_fcidump(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_fcidump(in);
}

inline FcidumpData read_fcidump(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open FCIDUMP file '" + path + "'");
  return parse_fcidump(in);
}

namespace detail {
inline std::string shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}
}  // namespace detail

/// Writes one record per canonical integral (zeros skipped), shortest
/// round-trip formatting, so that parse(serialize(d)) reproduces d exactly.
inline std::string serialize_fcidump(const FcidumpData& d) {
  std::ostringstream out;
  out << "&FCI NORB=" << d.norb() << ",NELEC=" << d.nelec() << ",MS2=" << d.ms2() << ",\n";
  if (!d.orbsym().empty()) {
    out << " ORBSYM=";
    for (int s : d.orbsym()) out << s << ',';
    out << '\n';
  }
  out << " ISYM=" << d.isym() << ",\n&END\n";
  const int n = d.norb();
  for (int p = 0; p < n; ++p)
    for (int q = 0; q <= p; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s <= r; ++s) {
          if (FcidumpData::pair_index(r, s) > FcidumpData::pair_index(p, q)) continue;
          const double v = d.g2(p, q, r, s);
          if (v == 0.0) continue;
          out << detail::shortest(v) << ' ' << p + 1 << ' ' << q + 1 << ' ' << r + 1 << ' ' << s + 1
              << '\n';
        }
  for (int p = 0; p < n; ++p)
    for (int q = 0; q <= p; ++q) {
      const double v = d.h1(p, q);
      if (v == 0.0) continue;
      out << detail::shortest(v) << ' ' << p + 1 << ' ' << q + 1 << " 0 0\n";
    }
  out << detail::shortest(d.e_core()) << " 0 0 0 0\n";
  return out.str();
}

}  // namespace pgsd
