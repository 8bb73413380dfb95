// Command-line front end: single-shot observables plus the sweep engine.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "optomech/feasibility.hpp"
#include "optomech/interferometer.hpp"
#include "optomech/state_prep.hpp"
#include "optomech/sweep.hpp"

namespace {

using namespace optomech;

constexpr int kExitOk = 0;
constexpr int kExitInvalidSpec = 2;
constexpr int kExitNonconvergence = 3;
constexpr int kExitIo = 4;

struct CommonOpts {
  double beta = 1.0;
  double gamma = 1.0;
  double big_gamma = 1.0;
  double epsilon = 0.1;
  int n_trunc = 0;  // 0 = adaptive truncation
  double tau_max = 4.0 * M_PI;
  double d_tau = M_PI / 200.0;
  std::uint64_t seed = 0;
  std::string out = "-";
  std::string format = "csv";
};

void add_output_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--out", o.out, "Output path ('-' for stdout)");
  cmd->add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--seed", o.seed, "Seed for seeded observables");
}

TableFormat format_of(const CommonOpts& o) {
  return o.format == "json" ? TableFormat::Json : TableFormat::Csv;
}

SystemParams params_of(const CommonOpts& o, double phi = 0.0) {
  SystemParams p = SystemParams::make(o.beta, o.gamma, o.big_gamma, phi);
  if (o.n_trunc > 0) p.policy = TruncationPolicy::fixed(o.n_trunc);
  return p;
}

std::vector<double> tau_grid_of(const CommonOpts& o) {
  std::vector<double> grid;
  for (int i = 0;; ++i) {
    const double tau = i * o.d_tau;
    if (tau > o.tau_max * (1.0 + 1e-12)) break;
    grid.push_back(tau);
  }
  return grid;
}

// Grid expressions: plain number, or "start:stop:step".
bool parse_grid(const std::string& text, const std::string& name, SweepSpec& spec) {
  const size_t c1 = text.find(':');
  if (c1 == std::string::npos) return false;
  const size_t c2 = text.find(':', c1 + 1);
  if (c2 == std::string::npos)
    throw CLI::ValidationError(name, "grid expression must be start:stop:step");
  GridRange g;
  g.name = name;
  try {
    g.start = std::stod(text.substr(0, c1));
    g.stop = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    g.step = std::stod(text.substr(c2 + 1));
  } catch (const std::exception&) {
    throw CLI::ValidationError(name, "grid expression must be numeric start:stop:step");
  }
  spec.grids.push_back(g);
  return true;
}

// Flat key=value config support: '#' starts a comment, keys equal the long
// flag names. The file's pairs are spliced into the argument list right after
// the subcommand, so explicit flags (parsed last) override the file.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::string path;
  std::vector<std::string> rest;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw std::invalid_argument("--config needs a file path");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (path.empty()) return rest;

  std::ifstream file(path);
  if (!file) throw IoError("cannot read config file " + path);
  std::vector<std::string> pairs;
  std::string line;
  int lineno = 0;
  while (std::getline(file, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto notspace = [](unsigned char c) { return !std::isspace(c); };
    line.erase(line.begin(), std::find_if(line.begin(), line.end(), notspace));
    line.erase(std::find_if(line.rbegin(), line.rend(), notspace).base(), line.end());
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": expected key=value");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    key.erase(std::find_if(key.rbegin(), key.rend(), notspace).base(), key.end());
    value.erase(value.begin(), std::find_if(value.begin(), value.end(), notspace));
    pairs.push_back("--" + key);
    pairs.push_back(value);
  }

  std::vector<std::string> out;
  bool injected = false;
  for (size_t i = 0; i < rest.size(); ++i) {
    out.push_back(rest[i]);
    if (!injected && i == 0) {
      out.insert(out.end(), pairs.begin(), pairs.end());
      injected = true;
    }
  }
  if (!injected) out.insert(out.end(), pairs.begin(), pairs.end());
  return out;
}

std::vector<Complex> parse_coeffs(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) parts.push_back(std::stod(tok));
  if (parts.empty() || parts.size() % 2 != 0)
    throw std::invalid_argument("--coeffs wants a comma list of re,im pairs");
  std::vector<Complex> c;
  double n2 = 0.0;
  for (size_t i = 0; i < parts.size(); i += 2) {
    c.emplace_back(parts[i], parts[i + 1]);
    n2 += std::norm(c.back());
  }
  if (!(n2 > 0.0)) throw std::invalid_argument("--coeffs must not all vanish");
  for (Complex& v : c) v /= std::sqrt(n2);
  return c;
}

int run(int argc, char** argv) {
  CLI::App app{"Single-photon cavity-optomechanics simulator"};
  app.require_subcommand(1);

  CommonOpts o;
  int threads = 1;
  double phi = 0.0;
  int fock_n = 1;
  int subspace_j = 1;
  std::string coeffs_text;
  std::string observable = "fock_prob";
  PhysicalParams phys{1064e-9, 1e-2, 1e-12, 2.0 * M_PI * 1e3, 6.3e5, 1e6, 0.1, 1e-5};

  // Grid-capable flags for `sweep` are collected as strings.
  std::map<std::string, std::string> sweep_params;
  const std::vector<std::string> sweep_keys = {
      "beta",   "gamma",   "big-gamma", "epsilon",   "n-trunc",     "tau-max", "d-tau",
      "n",      "j",       "phi",       "tau",       "wavelength",  "length",  "mass",
      "mech-freq", "finesse", "quality", "temperature", "transmissivity"};

  auto add_common = [&](CLI::App* cmd, bool with_big_gamma = true) {
    cmd->add_option("--beta", o.beta, "Optomechanical coupling beta");
    cmd->add_option("--gamma", o.gamma, "Cavity bandwidth in units of omega_m");
    if (with_big_gamma)
      cmd->add_option("--big-gamma", o.big_gamma, "Photon frequency width in units of omega_m");
    cmd->add_option("--n-trunc", o.n_trunc, "Fixed Fock truncation (0 = adaptive)");
    add_output_flags(cmd, o);
  };

  CLI::App* vis = app.add_subcommand("visibility", "Fringe visibility and p extrema vs tau");
  add_common(vis);
  vis->add_option("--tau-max", o.tau_max, "Last tau, units of 1/omega_m");
  vis->add_option("--d-tau", o.d_tau, "tau step");

  CLI::App* pd = app.add_subcommand("probdensity", "Detection probability density vs tau");
  add_common(pd);
  pd->add_option("--tau-max", o.tau_max, "Last tau");
  pd->add_option("--d-tau", o.d_tau, "tau step");
  pd->add_option("--phi", phi, "Detuning phase");

  CLI::App* pf = app.add_subcommand("prep-fock", "Displaced-Fock preparation report");
  pf->add_option("--n", fock_n, "Target occupation number");
  pf->add_option("--beta", o.beta, "Optomechanical coupling beta");
  CLI::Option* pf_gamma =
      pf->add_option("--gamma", o.gamma, "Cavity bandwidth (defaults to the optimum 3/(2 pi))");
  pf->add_option("--epsilon", o.epsilon, "Allowed infidelity");
  add_output_flags(pf, o);

  CLI::App* ps = app.add_subcommand("prep-state", "Arbitrary-superposition preparation report");
  ps->add_option("--coeffs", coeffs_text, "Target coefficients: re,im pairs, comma separated")
      ->required();
  ps->add_option("--beta", o.beta, "Optomechanical coupling beta");
  ps->add_option("--epsilon", o.epsilon, "Allowed infidelity");
  add_output_flags(ps, o);

  CLI::App* sm = app.add_subcommand("subspace-min", "Worst-case success probability over H_j");
  sm->add_option("--j", subspace_j, "Highest displaced Fock index of the subspace");
  sm->add_option("--beta", o.beta, "Optomechanical coupling beta");
  sm->add_option("--epsilon", o.epsilon, "Allowed infidelity");
  add_output_flags(sm, o);

  CLI::App* fe = app.add_subcommand("feasibility", "Experimental requirements report");
  fe->add_option("--wavelength", phys.wavelength, "Optical wavelength [m]");
  fe->add_option("--length", phys.cavity_length, "Cavity length [m]");
  fe->add_option("--mass", phys.mirror_mass, "Mirror mass [kg]");
  fe->add_option("--mech-freq", phys.mech_freq, "Mechanical angular frequency [rad/s]");
  fe->add_option("--finesse", phys.finesse, "Cavity finesse");
  fe->add_option("--quality", phys.quality, "Mechanical quality factor");
  fe->add_option("--temperature", phys.temperature, "Environment temperature [K]");
  fe->add_option("--transmissivity", phys.transmissivity, "Front-mirror power transmissivity");
  add_output_flags(fe, o);

  CLI::App* sw = app.add_subcommand("sweep", "Grid sweep of one observable");
  sw->add_option("--observable", observable,
                 "visibility_series | prob_density | fock_prob | subspace_min | feasibility");
  for (const std::string& key : sweep_keys)
    sw->add_option("--" + key, sweep_params[key], "Value or grid start:stop:step");
  sw->add_option("--threads", threads, "Worker threads (0 = hardware)");
  add_output_flags(sw, o);

  app.footer(
      "Every subcommand also accepts --config <file>: flat key=value lines with '#'\n"
      "comments, keys identical to the long flag names; explicit flags override.");

  // Config pairs are injected before the explicit flags, so the last
  // occurrence must win.
  for (CLI::App* cmd : app.get_subcommands({}))
    for (CLI::Option* opt : cmd->get_options())
      opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  std::vector<std::string> args;
  try {
    args = expand_config(std::vector<std::string>(argv + 1, argv + argc));
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidSpec;
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInvalidSpec;
  }

  try {
    const FockVector ground = basis_state(0, 1);
    if (vis->parsed()) {
      const SystemParams p = params_of(o);
      SweepTable t = visibility_series(PhotonWaveform::exponential(p.big_gamma), p, ground,
                                       tau_grid_of(o));
      emit(t, format_of(o), o.out);
    } else if (pd->parsed()) {
      const SystemParams p = params_of(o, phi);
      const PhotonWaveform wf = PhotonWaveform::exponential(p.big_gamma);
      SweepTable t;
      t.header = {"tau", "p"};
      for (double tg : tau_grid_of(o))
        t.rows.push_back({{tg, probability_density(tg, p.phi, wf, p, ground)}, ""});
      emit(t, format_of(o), o.out);
    } else if (pf->parsed()) {
      if (pf_gamma->count() == 0) o.gamma = 3.0 / (2.0 * M_PI);
      const SuccessProbability sp = success_probability_fock(fock_n, o.beta, o.epsilon, o.gamma);
      SweepTable t;
      t.header = {"n", "beta", "epsilon", "gamma", "window_delta_tau", "success_probability",
                  "exceeds_unity"};
      t.rows.push_back({{double(fock_n), o.beta, o.epsilon, o.gamma,
                         fidelity_window_fock(fock_n, o.beta, o.epsilon), sp.value,
                         sp.exceeds_unity ? 1.0 : 0.0},
                        ""});
      emit(t, format_of(o), o.out);
    } else if (ps->parsed()) {
      TargetState target;
      target.coeffs = parse_coeffs(coeffs_text);
      target.beta = o.beta;
      const PrepReport rep = success_probability_state(target, o.epsilon);
      SweepTable t;
      t.header = {"beta", "epsilon", "window_delta_tau", "success_probability",
                  "achieved_overlap_floor", "normalization_z"};
      t.rows.push_back({{o.beta, o.epsilon, rep.window_delta_tau, rep.success_probability,
                         rep.achieved_overlap, rep.normalization_z},
                        ""});
      emit(t, format_of(o), o.out);
    } else if (sm->parsed()) {
      OptimizerConfig cfg;
      cfg.seed = o.seed;
      const SubspaceMin m = min_success_over_subspace(subspace_j, o.beta, o.epsilon, cfg);
      SweepTable t;
      t.header = {"j", "beta", "epsilon", "p_min_subspace", "start_index"};
      t.rows.push_back(
          {{double(subspace_j), o.beta, o.epsilon, m.value, double(m.start_index)}, ""});
      emit(t, format_of(o), o.out);
    } else if (fe->parsed()) {
      const FeasibilityReport rep = requirements_report(phys);
      if (format_of(o) == TableFormat::Json) {
        if (o.out.empty() || o.out == "-") {
          std::cout << rep.to_json();
        } else {
          std::FILE* f = std::fopen((o.out + ".tmp").c_str(), "wb");
          if (!f) throw IoError("cannot open " + o.out + ".tmp");
          const std::string body = rep.to_json();
          std::fwrite(body.data(), 1, body.size(), f);
          std::fclose(f);
          if (std::rename((o.out + ".tmp").c_str(), o.out.c_str()) != 0)
            throw IoError("cannot rename temp file onto " + o.out);
        }
      } else {
        SweepTable t;
        t.header = {"beta", "gamma_over_omega", "strong_kick", "narrow_cavity", "nonlinear_range",
                    "low_thermal_rate", "all_passed"};
        t.rows.push_back({{rep.beta, rep.gamma_over_omega, rep.strong_kick.passed ? 1.0 : 0.0,
                           rep.narrow_cavity.passed ? 1.0 : 0.0,
                           rep.nonlinear_range.passed ? 1.0 : 0.0,
                           rep.low_thermal_rate.passed ? 1.0 : 0.0, rep.all_passed() ? 1.0 : 0.0},
                          ""});
        emit(t, format_of(o), o.out);
      }
    } else if (sw->parsed()) {
      SweepSpec spec;
      spec.observable = observable_from_name(observable);
      spec.seed = o.seed;
      spec.threads = threads;
      spec.format = format_of(o);
      spec.output_path = o.out;
      for (const auto& [key, text] : sweep_params) {
        if (text.empty()) continue;
        if (!parse_grid(text, key, spec)) spec.scalars[key] = std::stod(text);
      }
      // Grid iteration order must not depend on map order: sort by name.
      std::sort(spec.grids.begin(), spec.grids.end(),
                [](const GridRange& a, const GridRange& b) { return a.name < b.name; });
      const SweepTable t = run_sweep(spec);
      emit(t, spec.format, spec.output_path);
    }
    return kExitOk;
  } catch (const QuadratureError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNonconvergence;
  } catch (const OptimizerError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNonconvergence;
  } catch (const TruncationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNonconvergence;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidSpec;
  }
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
