#include "fhrt/cli.hpp"

#include "fhrt/config.hpp"
#include "fhrt/io.hpp"
#include "fhrt/monitors.hpp"
#include "fhrt/oracle.hpp"

#include <CLI11.hpp>
#include <fftw3.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fhrt {

namespace {

constexpr const char* kVersion = "0.1.0";

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config: " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string file_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Collects produced files and writes the manifest last.
class OutputDir {
 public:
  explicit OutputDir(const std::string& dir) : dir_(dir) { std::filesystem::create_directories(dir_); }

  std::string path(const std::string& name) {
    files_.push_back(name);
    return (dir_ / name).string();
  }

  void write_text(const std::string& name, const std::string& text) {
    std::ofstream out(path(name), std::ios::trunc);
    out << text;
    if (!out) throw std::runtime_error("failed writing: " + (dir_ / name).string());
  }

  void manifest(const std::string& config_hash, const std::string& command) {
    std::ostringstream m;
    m << "command = " << command << '\n';
    m << "config_hash = " << config_hash << '\n';
    m << "fhrt_version = " << kVersion << '\n';
    m << "eigen_version = " << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION << '\n';
    m << "fftw_version = " << fftw_version << '\n';
    m << "compiler = " << __VERSION__ << '\n';
    for (const auto& f : files_) m << "artifact = " << f << ' ' << fnv1a_hex(file_text(dir_ / f)) << '\n';
    std::ofstream out(dir_ / "manifest.txt", std::ios::trunc);
    out << m.str();
    if (!out) throw std::runtime_error("failed writing manifest in " + dir_.string());
  }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

std::string yes_no(bool b) { return b ? "yes" : "no"; }

double relative_drift(const std::vector<DiagnosticsRecord>& recs, double DiagnosticsRecord::*field) {
  const double ref = recs.front().*field;
  double d = 0.0;
  for (const auto& r : recs) d = std::max(d, std::abs(r.*field - ref));
  return ref != 0.0 ? d / std::abs(ref) : d;
}

double energy_drift(const std::vector<DiagnosticsRecord>& recs) {
  const double ref = recs.front().energy.total;
  double d = 0.0;
  for (const auto& r : recs) d = std::max(d, std::abs(r.energy.total - ref));
  return ref != 0.0 ? d / std::abs(ref) : d;
}

int cmd_run(const std::string& config_path, bool strict) {
  const std::string text = read_text(config_path);
  const ParsedConfig parsed = parse_config(text);
  const RunConfig& cfg = parsed.run;
  OutputDir out(cfg.out_dir);
  const Trajectory tr = evolve(cfg);
  write_timeseries(tr.records, out.path("timeseries.csv"));

  const VirialReport v = virial_report(tr, cfg.alpha, cfg.pot);
  std::vector<std::vector<double>> vrows;
  for (std::size_t i = 0; i < v.times.size(); ++i) {
    vrows.push_back({v.times[i], v.derivative[i], v.bound, v.tol_v[i], v.remainder[i]});
  }
  write_csv(out.path("virial_report.csv"), "t,derivative,bound,tol_v,remainder", vrows);

  const MomentReport m = moment_report(tr, cfg.alpha);
  std::vector<std::vector<double>> mrows;
  for (std::size_t i = 0; i < m.times.size(); ++i) {
    mrows.push_back({m.times[i], m.moment[i], m.derivative[i], m.residual[i], m.envelope[i], m.tol_m[i]});
  }
  write_csv(out.path("moment_report.csv"), "t,moment,derivative,residual,envelope,tol_m", mrows);
  write_checkpoint(out.path("final_state.fhrt"), tr.final_state, cfg.alpha, cfg.pot.gamma, tr.final_time);

  std::ostringstream s;
  s << "termination = " << to_string(tr.termination) << '\n';
  s << "final_time = " << format_double(tr.final_time) << '\n';
  s << "accepted_steps = " << tr.accepted_steps << "\nrejected_steps = " << tr.rejected_steps << '\n';
  s << "records = " << tr.records.size() << '\n';
  s << "mass_drift = " << format_double(relative_drift(tr.records, &DiagnosticsRecord::mass)) << '\n';
  s << "energy_drift = " << format_double(energy_drift(tr.records)) << '\n';
  s << "energy_initial = " << format_double(tr.records.front().energy.total) << '\n';
  s << "hs_growth = " << format_double(tr.records.back().hs_norm / tr.records.front().hs_norm) << '\n';
  s << "virial.bound = " << format_double(v.bound) << '\n';
  s << "virial.inconclusive = " << yes_no(v.inconclusive) << '\n';
  if (v.equality_applicable) {
    s << "virial.equality_ratio = " << format_double(v.equality_ratio) << '\n';
    s << "virial.equality_holds = " << yes_no(v.equality_holds) << '\n';
  }
  if (v.inequality_applicable) {
    s << "virial.min_margin = " << format_double(v.min_margin) << '\n';
    s << "virial.inequality_holds = " << yes_no(v.inequality_holds) << '\n';
  }
  s << "virial.decreasing = " << yes_no(v.decreasing) << '\n';
  s << "moment.inconclusive = " << yes_no(m.inconclusive) << '\n';
  s << "moment.nonnegative = " << yes_no(m.nonnegative) << '\n';
  s << "moment.c_fit = " << format_double(m.c_fit) << '\n';
  s << "moment.envelope_holds = " << yes_no(m.envelope_holds) << '\n';
  for (const auto& [what, holds] : hypothesis_check(cfg)) s << "hypothesis: " << what << " = " << yes_no(holds) << '\n';
  for (const auto& w : tr.warnings) s << "warning: " << w << '\n';
  if (tr.termination == Termination::blowup_guard || tr.termination == Termination::resolution_guard) {
    const BlowupFit fit = fit_blowup_time(tr.records);
    if (fit.valid) {
      s << "blowup_fit.t_star = " << format_double(fit.t_star) << "\nblowup_fit.sigma = " << format_double(fit.sigma)
        << "\nblowup_fit.points = " << fit.points << '\n';
    }
  }
  out.write_text("summary.txt", s.str());
  out.manifest(fnv1a_hex(text), "run " + config_path);
  std::cout << s.str();
  if (strict && tr.termination != Termination::completed) return 2;
  return 0;
}

int cmd_picard(const std::string& config_path, double T, int iters) {
  const std::string text = read_text(config_path);
  const ParsedConfig parsed = parse_config(text);
  const RunConfig& cfg = parsed.run;
  OutputDir out(cfg.out_dir + "/picard-verify");
  const Field phi = make_datum(make_grid(cfg.grid), cfg.datum);
  const PicardVerification v = picard_verify(phi, T, iters, cfg.alpha, cfg.pot);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < v.full.distances.size(); ++i) {
    rows.push_back({static_cast<double>(i + 1), v.full.distances[i], i == 0 || i > v.full.ratios.size()
                                                                          ? std::numeric_limits<double>::quiet_NaN()
                                                                          : v.full.ratios[i - 1]});
  }
  write_csv(out.path("picard_report.csv"), "iterate,distance,ratio", rows);
  std::ostringstream s;
  s << "T = " << format_double(T) << "\niterations = " << iters << '\n';
  s << "max_ratio = " << format_double(v.full.ratio) << "\nmax_ratio_half_T = " << format_double(v.half.ratio) << '\n';
  s << "contracting = " << yes_no(v.contracting) << "\nratios_decrease = " << yes_no(v.ratios_decrease) << '\n';
  s << "mismatch = " << format_double(v.mismatch) << "\ne_iter = " << format_double(v.e_iter)
    << "\ne_mesh = " << format_double(v.e_mesh) << "\ne_split = " << format_double(v.e_split)
    << "\nbudget = " << format_double(v.budget) << "\nagrees = " << yes_no(v.agrees) << '\n';
  out.write_text("summary.txt", s.str());
  out.manifest(fnv1a_hex(text), "picard-verify " + config_path);
  std::cout << s.str();
  return 0;
}

int cmd_sweep(const std::string& config_path, double amin, double amax, int steps, bool strict) {
  const std::string text = read_text(config_path);
  const ParsedConfig parsed = parse_config(text);
  const RunConfig& cfg = parsed.run;
  OutputDir out(cfg.out_dir + "/sweep");
  const SweepResult r = critical_amplitude_sweep(cfg, amin, amax, steps);
  std::ofstream csv(out.path("sweep.csv"), std::ios::trunc);
  csv << "amplitude,energy,termination,final_time,hs_growth,run\n";
  bool all_completed = true;
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& row = r.rows[i];
    char name[32];
    std::snprintf(name, sizeof name, "run_%03zu", i);
    std::filesystem::create_directories(std::filesystem::path(cfg.out_dir) / "sweep" / name);
    write_timeseries(row.records, out.path(std::string(name) + "/timeseries.csv"));
    csv << format_double(row.amplitude) << ',' << format_double(row.energy) << ',' << to_string(row.termination) << ','
        << format_double(row.final_time) << ',' << format_double(row.hs_growth) << ',' << name << '\n';
    all_completed = all_completed && row.termination == Termination::completed;
  }
  csv.close();
  std::ostringstream s;
  s << "a_star = " << format_double(r.a_star) << "\na_star_bisect = " << format_double(r.a_star_bisect) << '\n';
  s << "a_star_agreement = " << format_double(std::abs(r.a_star_bisect / r.a_star - 1.0)) << '\n';
  s << "kinetic = " << format_double(r.kinetic) << "\npotential = " << format_double(r.potential) << '\n';
  s << "runs = " << r.rows.size() << '\n';
  out.write_text("summary.txt", s.str());
  out.manifest(fnv1a_hex(text), "sweep " + config_path);
  std::cout << s.str();
  return strict && !all_completed ? 2 : 0;
}

int cmd_oracle(const std::string& suite, int n, double gamma, double beta, double p, std::uint64_t seed, int mixes,
               const std::string& out_dir) {
  RatioReport r;
  if (suite == "wconv") {
    r = weighted_convolution_suite(n, gamma, seed);
  } else if (suite == "hs") {
    r = hardy_sobolev_suite(n, gamma, seed);
  } else {
    // --gamma names the Riesz exponent λ; β = n - λ unless --beta is given
    if (std::isnan(beta)) beta = n - gamma;
    r = stein_weiss_suite(n, p, beta, seed, mixes);
  }
  OutputDir out(out_dir);
  write_ratio_report(r, out.path("ratio_report.csv"));
  out.write_text("summary.txt", ratio_summary(r));
  std::ostringstream cmd;
  cmd << "oracle --suite " << suite << " --n " << n << " --gamma " << gamma;
  out.manifest(fnv1a_hex(cmd.str()), cmd.str());
  std::cout << ratio_summary(r);
  return 0;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Pseudospectral lab for the focusing fractional Hartree equation", "fhrt"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::string config;
  bool strict = false;
  auto* run = app.add_subcommand("run", "evolve a configuration and write reports");
  run->add_option("config", config, "config file")->required();
  run->add_flag("--strict", strict, "exit 2 when a guard stops the run");

  double T = 0.05;
  int iters = 8;
  auto* picard = app.add_subcommand("picard-verify", "compare Duhamel-Picard iterates with split-step");
  picard->add_option("config", config, "config file")->required();
  picard->add_option("--T", T, "horizon")->check(CLI::PositiveNumber);
  picard->add_option("--iters", iters, "iterations")->check(CLI::Range(2, 1000));

  std::string suite;
  int n = 3;
  double gamma = 1.0;
  double beta = std::numeric_limits<double>::quiet_NaN();
  double p = 2.0;
  std::uint64_t seed = 1;
  int mixes = 100;
  std::string oracle_out = "oracle_out";
  auto* oracle = app.add_subcommand("oracle", "quadrature ratios for the convolution inequalities");
  oracle->add_option("--suite", suite, "sw, wconv or hs")->required()->check(CLI::IsMember({"sw", "wconv", "hs"}));
  oracle->add_option("--n", n, "dimension")->check(CLI::Range(1, 16));
  oracle->add_option("--gamma", gamma, "exponent (Riesz exponent lambda for sw)");
  oracle->add_option("--beta", beta, "sw weight exponent; defaults to n - gamma");
  oracle->add_option("--p", p, "sw Lebesgue exponent");
  oracle->add_option("--seed", seed, "random_mix seed");
  oracle->add_option("--mixes", mixes, "random_mix functions in the sw suite")->check(CLI::NonNegativeNumber);
  oracle->add_option("--out", oracle_out, "output directory");

  double amin = 0.0;
  double amax = 0.0;
  int steps = 0;
  auto* sweep = app.add_subcommand("sweep", "critical amplitude and a sampled amplitude sweep");
  sweep->add_option("config", config, "config file")->required();
  sweep->add_option("--amin", amin, "smallest amplitude")->required();
  sweep->add_option("--amax", amax, "largest amplitude")->required();
  sweep->add_option("--steps", steps, "number of runs")->required()->check(CLI::NonNegativeNumber);
  sweep->add_flag("--strict", strict, "exit 2 when a guard stops any run");

  if (argc > 1 && argv[1][0] != '-') {
    const std::string word = argv[1];
    if (word != "run" && word != "picard-verify" && word != "oracle" && word != "sweep") {
      std::cerr << "error: unknown subcommand '" << word << "'\n\n" << app.help();
      return 1;
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (*run) return cmd_run(config, strict);
    if (*picard) return cmd_picard(config, T, iters);
    if (*oracle) return cmd_oracle(suite, n, gamma, beta, p, seed, mixes, oracle_out);
    if (*sweep) return cmd_sweep(config, amin, amax, steps, strict);
  } catch (const ConfigParseError& e) {
    for (const auto& issue : e.issues()) std::cerr << "config error: " << issue << '\n';
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  }
  return 3;
}

}  // namespace fhrt
