#include "fhrt/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fhrt {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
void put(std::ostream& out, T value) {
  std::array<unsigned char, sizeof(T)> bytes{};
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get(std::istream& in, const std::string& path) {
  std::array<unsigned char, sizeof(T)> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) {
    throw std::runtime_error("truncated checkpoint: " + path);
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

std::vector<double> split_doubles(const std::string& line, const std::string& path, int lineno) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str()) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

void write_checkpoint(const std::string& path, const Field& f, double alpha, double gamma, double t) {
  const Field p = to_physical(f);
  const GridSpec& spec = p.engine().spec();
  std::array<std::uint32_t, 4> dims{0, 0, 0, 0};
  if (spec.engine == Engine::torus) {
    if (spec.n > 4) throw ConfigError("checkpoint format holds at most 4 torus axes");
    for (int a = 0; a < spec.n; ++a) dims[static_cast<std::size_t>(a)] = static_cast<std::uint32_t>(spec.points);
  } else {
    dims[0] = static_cast<std::uint32_t>(spec.points);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path);
  out.write("FHRT", 4);
  put<std::uint32_t>(out, 1);
  put<std::uint8_t>(out, spec.engine == Engine::torus ? 0 : 1);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(spec.n));
  put<std::uint16_t>(out, 0);
  put<double>(out, alpha);
  put<double>(out, gamma);
  put<double>(out, spec.extent);
  put<double>(out, t);
  for (auto d : dims) put<std::uint32_t>(out, d);
  for (Eigen::Index i = 0; i < p.data.size(); ++i) {
    put<double>(out, p.data[i].real());
    put<double>(out, p.data[i].imag());
  }
  if (!out) throw std::runtime_error("failed writing checkpoint: " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open checkpoint: " + path);
  std::array<char, 4> magic{};
  in.read(magic.data(), 4);
  if (!in || std::string(magic.data(), 4) != "FHRT") throw ConfigError("not a checkpoint (bad magic): " + path);
  const auto version = get<std::uint32_t>(in, path);
  if (version != 1) throw ConfigError("unsupported checkpoint version " + std::to_string(version) + ": " + path);
  Checkpoint c;
  const auto engine = get<std::uint8_t>(in, path);
  if (engine > 1) throw ConfigError("unknown engine tag in checkpoint: " + path);
  c.grid.engine = engine == 0 ? Engine::torus : Engine::radial;
  c.grid.n = get<std::uint8_t>(in, path);
  get<std::uint16_t>(in, path);
  c.alpha = get<double>(in, path);
  c.gamma = get<double>(in, path);
  c.grid.extent = get<double>(in, path);
  c.t = get<double>(in, path);
  std::array<std::uint32_t, 4> dims{};
  for (auto& d : dims) d = get<std::uint32_t>(in, path);
  c.grid.points = static_cast<int>(dims[0]);
  Eigen::Index size = dims[0];
  if (c.grid.engine == Engine::torus) {
    if (c.grid.n < 1 || c.grid.n > 4) throw ConfigError("bad torus dimension in checkpoint: " + path);
    for (int a = 1; a < c.grid.n; ++a) {
      if (dims[static_cast<std::size_t>(a)] != dims[0]) throw ConfigError("non-cubic torus checkpoint: " + path);
      size *= dims[static_cast<std::size_t>(a)];
    }
  }
  c.grid.validate();
  c.data.resize(size);
  for (Eigen::Index i = 0; i < size; ++i) {
    const double re = get<double>(in, path);
    const double im = get<double>(in, path);
    c.data[i] = Complex(re, im);
  }
  if (in.peek() != std::char_traits<char>::eof()) throw ConfigError("trailing bytes in checkpoint: " + path);
  return c;
}

Field checkpoint_field(const Checkpoint& c) { return make_field(make_grid(c.grid), c.data); }

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv(const std::string& path, const std::string& header, const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << header << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
    out << '\n';
  }
  if (!out) throw std::runtime_error("failed writing: " + path);
}

void write_timeseries(const std::vector<DiagnosticsRecord>& records, const std::string& path) {
  std::vector<std::vector<double>> rows;
  rows.reserve(records.size());
  for (const auto& r : records) {
    rows.push_back({r.t, r.mass, r.energy.kinetic, r.energy.potential, r.energy.total, r.dilation, r.virial_moment,
                    r.hs_norm, r.spectral_tail, r.dt});
  }
  write_csv(path, kTimeseriesHeader, rows);
}

std::vector<DiagnosticsRecord> read_timeseries(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line) || line != kTimeseriesHeader) throw std::runtime_error("bad timeseries header: " + path);
  std::vector<DiagnosticsRecord> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto v = split_doubles(line, path, lineno);
    if (v.size() != 10) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected 10 columns");
    DiagnosticsRecord r;
    r.t = v[0];
    r.mass = v[1];
    r.energy = {v[2], v[3], v[4]};
    r.dilation = v[5];
    r.virial_moment = v[6];
    r.hs_norm = v[7];
    r.spectral_tail = v[8];
    r.dt = v[9];
    out.push_back(r);
  }
  return out;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace fhrt
