#pragma once

#include "fhrt/functionals.hpp"

#include <string>
#include <vector>

namespace fhrt {

struct Checkpoint {
  GridSpec grid;
  double alpha = 0.0;
  double gamma = 0.0;
  double t = 0.0;
  ComplexVector data;
};

/// Binary layout: "FHRT", u32 version = 1, u8 engine, u8 n, u16 reserved,
/// f64 alpha, gamma, extent, t, u32 dims[4], then (re, im) f64 pairs, all
/// little-endian.
void write_checkpoint(const std::string& path, const Field& f, double alpha, double gamma, double t);
Checkpoint read_checkpoint(const std::string& path);
Field checkpoint_field(const Checkpoint& c);

inline constexpr const char* kTimeseriesHeader =
    "t,mass,kinetic,potential,energy,dilation,virial_moment,hs_norm,spectral_tail,dt";

/// 17 significant digits, so text round-trips doubles exactly.
std::string format_double(double x);

void write_timeseries(const std::vector<DiagnosticsRecord>& records, const std::string& path);
std::vector<DiagnosticsRecord> read_timeseries(const std::string& path);

/// Writes `rows` under `header` as CSV.
void write_csv(const std::string& path, const std::string& header, const std::vector<std::vector<double>>& rows);

/// FNV-1a 64-bit, printed as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

}  // namespace fhrt
