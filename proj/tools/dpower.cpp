// Command-line front end: report, solve, sweep, omega-star, multiplicity.
//
// Exit codes: 0 success, 1 invalid or out-of-existence parameters,
// 2 numerical failure.

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dpower/dpower.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kBadInput = 1;
constexpr int kNumerical = 2;

int fail(int code, const std::string& msg) {
  std::cerr << msg << '\n';
  return code;
}

// Runs a subcommand body and maps library exceptions onto the exit-code contract.
template <class Body>
int guarded(Body&& body) {
  try {
    return body();
  } catch (const dpower::NoSolutionError& e) {
    return fail(kBadInput, e.what());
  } catch (const dpower::DomainError& e) {
    return fail(kBadInput, std::string("invalid parameters: ") + e.what());
  } catch (const dpower::BracketError& e) {
    return fail(kNumerical, std::string("numerical failure: ") + e.what());
  } catch (const std::exception& e) {
    return fail(kNumerical, std::string("numerical failure: ") + e.what());
  }
}

std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ground states of  u'' + (n-1)/r u' - omega u + u^p - u^(2p-1) = 0"};
  app.require_subcommand(1);

  int n = 1;
  double p = 0.0;
  double omega = 0.0;
  double r_max = 0.0;
  double tol = 0.0;
  std::string out_path;
  int grid = 200;

  auto* report = app.add_subcommand("report", "criteria and critical constants as JSON");
  report->add_option("--p", p, "exponent p > 1")->required();
  report->add_option("--omega", omega, "frequency omega > 0")->required();

  out_path = "profile.csv";
  auto* solve = app.add_subcommand("solve", "ground-state profile by shooting");
  solve->add_option("--n", n, "space dimension")->required();
  solve->add_option("--p", p, "exponent p > 1")->required();
  solve->add_option("--omega", omega, "frequency omega > 0")->required();
  solve->add_option("--out", out_path, "profile CSV path")->capture_default_str();
  solve->add_option("--r-max", r_max, "integration radius (default 200/sqrt(omega))");
  solve->add_option("--tol", tol, "bisection tolerance on u(0) (default 1e-10)");

  double p_min = 0.0, p_max = 0.0;
  int p_steps = 0, omega_steps = 0;
  std::string format = "csv";
  std::string sweep_out;
  auto* sweep = app.add_subcommand("sweep", "classify a (p, omega) grid");
  sweep->add_option("--p-min", p_min)->required();
  sweep->add_option("--p-max", p_max)->required();
  sweep->add_option("--p-steps", p_steps)->required();
  sweep->add_option("--omega-steps", omega_steps)->required();
  sweep->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  sweep->add_option("--out", sweep_out)->required();

  auto* star = app.add_subcommand("omega-star", "omega where k(alpha) changes sign");
  star->add_option("--p", p, "exponent p > 1")->required();
  star->add_option("--tol", tol, "bisection tolerance in omega (default 1e-10)");

  auto* multi = app.add_subcommand("multiplicity", "count positive solutions by shooting scan");
  multi->add_option("--n", n, "space dimension")->required();
  multi->add_option("--p", p, "exponent p > 1")->required();
  multi->add_option("--omega", omega, "frequency omega > 0")->required();
  multi->add_option("--grid", grid, "number of initial heights")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadInput;
  }

  if (report->parsed()) {
    return guarded([&] {
      const dpower::Params prm(1, p, omega);
      std::cout << dpower::to_json(dpower::classify(prm)).dump(2) << '\n';
      return kOk;
    });
  }

  if (solve->parsed()) {
    return guarded([&] {
      const dpower::Params prm(n, p, omega);
      if (!dpower::existence_check(prm))
        return fail(kBadInput, "no positive solution: omega >= omega_p");
      dpower::SolverControls ctl;
      if (r_max > 0.0) ctl.r_max = r_max;
      if (tol > 0.0) ctl.d_tol = tol;
      const dpower::GroundState gs = dpower::find_ground_state(prm, ctl);
      const auto rows = dpower::resample(gs.profile.samples, prm, ctl.output_points);
      dpower::write_file_atomic(out_path, dpower::profile_csv(rows));
      std::cout << "d_star " << dpower::format_double(gs.d_star) << '\n'
                << "residual_sup " << dpower::format_double(gs.residual_sup) << '\n';
      return kOk;
    });
  }

  if (sweep->parsed()) {
    return guarded([&] {
      if (p_steps < 2 || omega_steps < 2)
        return fail(kBadInput, "invalid grid: --p-steps and --omega-steps must be >= 2");
      const dpower::SweepGrid g{p_min, p_max, static_cast<std::size_t>(p_steps),
                                static_cast<std::size_t>(omega_steps)};
      const auto cells = dpower::sweep(g);
      dpower::write_file_atomic(sweep_out, format == "json" ? dpower::to_json_text(cells)
                                                            : dpower::to_csv(cells));
      return kOk;
    });
  }

  if (star->parsed()) {
    return guarded([&] {
      dpower::detail::require_exponent(p);
      std::cout << fmt12(dpower::find_omega_star(p, tol > 0.0 ? tol : 1e-10)) << '\n';
      return kOk;
    });
  }

  if (multi->parsed()) {
    return guarded([&] {
      const dpower::Params prm(n, p, omega);
      if (!dpower::existence_check(prm))
        return fail(kBadInput, "no positive solution: omega >= omega_p");
      if (grid < 2) return fail(kBadInput, "invalid grid: --grid must be >= 2");
      const auto res = dpower::multiplicity_scan(prm, static_cast<std::size_t>(grid));
      std::cout << res.count << '\n';
      for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
      if (2 * res.unresolved > static_cast<std::size_t>(grid))
        return fail(kNumerical, "too many unresolved shots: " + std::to_string(res.unresolved));
      if (res.count == 0) return fail(kNumerical, "no Rebound -> Crossing transition resolved");
      return kOk;
    });
  }
  return kBadInput;
}
