#pragma once

// Command dispatch: runs one experiment and writes its CSV and manifest.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "ssf/bounds.hpp"
#include "ssf/cli/config.hpp"
#include "ssf/cli/csv.hpp"
#include "ssf/ensemble.hpp"
#include "ssf/error.hpp"
#include "ssf/format.hpp"
#include "ssf/version.hpp"

namespace ssf::cli {

enum ExitCode : int { exit_ok = 0, exit_config = 1, exit_margin = 2, exit_io = 3 };

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  unsigned workers = 1;
};

inline std::string default_output(const ExperimentConfig& cfg) { return to_string(cfg.command) + ".csv"; }

/// Canonical `key=value` lines, sorted by key, with overrides applied.
inline std::string canonical_config(const ExperimentConfig& cfg) {
  auto entries = cfg.entries;
  entries["master_seed"] = std::to_string(cfg.master_seed);
  entries.erase("out");
  std::string out;
  for (const auto& [k, v] : entries) out += k + '=' + v + '\n';
  return out;
}

inline CsvTable build_table(const ExperimentConfig& cfg, const ExecutionOptions& exec, std::ostream& log) {
  switch (cfg.command) {
    case Command::surface_density: {
      const auto fam = cfg.family();
      const auto res = estimate_surface_density(fam, cfg.L, cfg.disorder, cfg.grid, cfg.realizations, cfg.master_seed, exec);
      for (const auto& w : res.warnings) log << "warning: " << w << '\n';
      CsvTable t({"lambda", "mean", "variance", "realizations", "L", "W", "P"});
      const auto pts = res.grid.points();
      for (std::size_t i = 0; i < pts.size(); ++i)
        t.add({cell(pts[i]), cell(res.mean[i]), cell(res.variance[i]), cell(res.realizations), cell(res.meta.L), cell(res.meta.W), cell(res.meta.P)});
      double sup = 0.0;
      for (double s : res.sup_normalized) sup = std::max(sup, s);
      log << "max normalized sup |xi| over realizations: " << format_double(sup) << '\n';
      return t;
    }
    case Command::surface_functional: {
      const auto g = TestFunction::smooth_bump(cfg.tf_center, cfg.tf_width);
      const auto res = estimate_surface_functional(cfg.family(), cfg.L_list, cfg.disorder, g, cfg.realizations, cfg.master_seed, exec);
      CsvTable t({"L", "mu", "mu_plus", "mu_minus", "stderr"});
      for (const auto& r : res.rows) t.add({cell(r.L), cell(r.mu), cell(r.mu_plus), cell(r.mu_minus), cell(r.stderr_mu)});
      for (std::size_t i = 0; i < res.cauchy_differences.size(); ++i)
        log << "|mu(L=" << res.rows[i].L << ") - mu(L=" << res.rows[i + 1].L << ")| = " << format_double(res.cauchy_differences[i]) << '\n';
      return t;
    }
    case Command::bulk_ids: {
      const auto res = estimate_bulk_ids(cfg.nu, cfg.L, cfg.boundary, cfg.disorder, cfg.grid, cfg.realizations, cfg.master_seed, exec);
      CsvTable t({"lambda", "N_mean", "N_variance", "realizations", "L"});
      const auto pts = res.grid.points();
      for (std::size_t i = 0; i < pts.size(); ++i)
        t.add({cell(pts[i]), cell(res.mean[i]), cell(res.variance[i]), cell(res.realizations), cell(res.meta.L)});
      const auto h = holder_modulus(res, cfg.theta);
      log << "hoelder sup ratio (theta=" << format_double(cfg.theta) << "): " << format_double(h.sup_ratio) << '\n';
      for (const auto& row : h.table)
        log << "  width " << format_double(row.width) << ": sup " << format_double(row.sup_ratio) << ", mean " << format_double(row.mean_ratio)
            << '\n';
      return t;
    }
    case Command::check_bounds: {
      CheckSuiteOptions opt;
      opt.instances = cfg.check_instances;
      opt.max_dim = cfg.check_max_dim;
      opt.seed = cfg.master_seed;
      const auto reports = random_check_suite(opt, exec);
      CsvTable t({"name", "lhs", "rhs", "holds", "slack", "context"});
      std::size_t failed = 0;
      for (const auto& r : reports) {
        t.add({r.name, cell(r.lhs), cell(r.rhs), cell(r.holds), cell(r.slack), r.context()});
        failed += r.holds ? 0 : 1;
      }
      log << reports.size() << " checks, " << failed << " failed\n";
      return t;
    }
    case Command::scaling_study: {
      const auto st = resolvent_scaling_study(cfg.family(), cfg.L_list, cfg.disorder, cfg.p, cfg.k, cfg.c, cfg.realizations, cfg.master_seed, exec);
      CsvTable t({"L", "p", "k", "mean_qnorm_p", "fit_slope"});
      for (const auto& r : st.rows) t.add({cell(r.L), cell(st.p), cell(static_cast<long>(st.k)), cell(r.mean_value), cell(st.fit_slope)});
      log << "C(L) variation: " << format_double(st.constant_variation) << '\n';
      return t;
    }
  }
  throw std::logic_error("unhandled command");
}

/// Runs the experiment and writes `<out>` and `<out>.manifest.csv`.
/// Returns the process exit code; diagnostics go to `err`.
inline int run(ExperimentConfig cfg, const RunOptions& opt, std::ostream& log = std::cout, std::ostream& err = std::cerr) {
  if (opt.seed) cfg.master_seed = *opt.seed;
  const std::string out = opt.out ? *opt.out : !cfg.out.empty() ? cfg.out : default_output(cfg);
  ExecutionOptions exec;
  exec.workers = opt.workers;
  exec.route = cfg.route;
  try {
    const auto table = build_table(cfg, exec, log);
    write_atomic(out, table.str());
    CsvTable manifest({"config_hash", "master_seed", "version", "command"});
    manifest.add({hex64(fnv1a64(canonical_config(cfg))), std::to_string(cfg.master_seed), version, to_string(cfg.command)});
    write_atomic(out + ".manifest.csv", manifest.str());
    log << "wrote " << out << " (" << table.size() << " rows)\n";
    return exit_ok;
  } catch (const margin_error& e) {
    err << "margin error: " << e.what() << '\n';
    return exit_margin;
  } catch (const io_error& e) {
    err << "i/o error: " << e.what() << '\n';
    return exit_io;
  } catch (const std::invalid_argument& e) {
    err << "configuration error: " << e.what() << '\n';
    return exit_config;
  }
}

/// Reads a config file; throws io_error if it cannot be read.
inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw io_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  if (is.bad()) throw io_error("error reading " + path.string());
  return ss.str();
}

}  // namespace ssf::cli
