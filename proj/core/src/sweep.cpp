#include "optomech/sweep.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "optomech/feasibility.hpp"
#include "optomech/interferometer.hpp"
#include "optomech/state_prep.hpp"

namespace optomech {

Observable observable_from_name(const std::string& name) {
  if (name == "visibility_series") return Observable::VisibilitySeries;
  if (name == "prob_density") return Observable::ProbDensity;
  if (name == "fock_prob") return Observable::FockProb;
  if (name == "subspace_min") return Observable::SubspaceMin;
  if (name == "feasibility") return Observable::Feasibility;
  throw std::invalid_argument("unknown observable: " + name);
}

std::string observable_name(Observable o) {
  switch (o) {
    case Observable::VisibilitySeries: return "visibility_series";
    case Observable::ProbDensity: return "prob_density";
    case Observable::FockProb: return "fock_prob";
    case Observable::SubspaceMin: return "subspace_min";
    case Observable::Feasibility: return "feasibility";
  }
  throw std::invalid_argument("unknown observable enum value");
}

void GridRange::validate() const {
  if (name.empty()) throw std::invalid_argument("GridRange: empty parameter name");
  if (!(step > 0.0)) throw std::invalid_argument("GridRange: step must be > 0");
  if (!(stop >= start)) throw std::invalid_argument("GridRange: need stop >= start");
  if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step))
    throw std::invalid_argument("GridRange: values must be finite");
}

std::vector<double> GridRange::points() const {
  validate();
  std::vector<double> pts;
  const int count = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
  pts.reserve(count);
  for (int i = 0; i < count; ++i) pts.push_back(start + i * step);
  return pts;
}

void SweepSpec::validate() const {
  if (grids.empty()) throw std::invalid_argument("SweepSpec: at least one grid is required");
  for (const GridRange& g : grids) g.validate();
  if (threads < 0) throw std::invalid_argument("SweepSpec: threads must be >= 0");
}

namespace {

using Params = std::map<std::string, double>;

double require(const Params& p, const std::string& key) {
  const auto it = p.find(key);
  if (it == p.end()) throw std::invalid_argument("sweep: missing required parameter '" + key + "'");
  return it->second;
}

double value_or(const Params& p, const std::string& key, double fallback) {
  const auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

int as_index(double v, const std::string& key) {
  const double r = std::round(v);
  if (std::abs(v - r) > 1e-9 || r < 0)
    throw std::invalid_argument("sweep: parameter '" + key + "' must be a nonnegative integer");
  return static_cast<int>(r);
}

SystemParams system_from(const Params& pp, double default_gamma) {
  SystemParams sp = SystemParams::make(require(pp, "beta"), value_or(pp, "gamma", default_gamma),
                                       value_or(pp, "big-gamma", 1.0), value_or(pp, "phi", 0.0));
  const int ntrunc = as_index(value_or(pp, "n-trunc", 0.0), "n-trunc");
  if (ntrunc > 0) sp.policy = TruncationPolicy::fixed(ntrunc);
  return sp;
}

std::vector<double> tau_grid_from(const Params& pp) {
  const double tau_max = value_or(pp, "tau-max", 4.0 * M_PI);
  const double d_tau = value_or(pp, "d-tau", M_PI / 200.0);
  if (!(tau_max > 0.0) || !(d_tau > 0.0))
    throw std::invalid_argument("sweep: tau-max and d-tau must be > 0");
  std::vector<double> grid;
  for (int i = 0;; ++i) {
    const double tau = i * d_tau;
    if (tau > tau_max * (1.0 + 1e-12)) break;
    grid.push_back(tau);
  }
  return grid;
}

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

struct ObservablePlan {
  std::vector<std::string> point_columns;  // parameter columns echoed per row
  std::vector<std::string> value_columns;
};

ObservablePlan plan_for(Observable obs) {
  switch (obs) {
    case Observable::VisibilitySeries:
      return {{"beta", "big-gamma", "gamma"}, {"tau", "p_max", "p_min", "v"}};
    case Observable::ProbDensity:
      return {{"beta", "big-gamma", "gamma", "phi"}, {"tau", "p"}};
    case Observable::FockProb:
      return {{"n", "beta", "epsilon", "gamma"}, {"p", "exceeds_unity", "argmax_beta_for_n"}};
    case Observable::SubspaceMin:
      return {{"j", "beta", "epsilon"}, {"p_min_subspace", "start_index"}};
    case Observable::Feasibility:
      return {{"wavelength", "length", "mass", "mech-freq", "finesse", "quality", "temperature",
               "transmissivity"},
              {"beta", "gamma_over_omega", "strong_kick", "narrow_cavity", "nonlinear_range",
               "low_thermal_rate", "all_passed"}};
  }
  throw std::invalid_argument("unknown observable enum value");
}

std::vector<SweepTable::Row> eval_point(Observable obs, const Params& pp, uint64_t point_seed) {
  std::vector<SweepTable::Row> rows;

  switch (obs) {
    case Observable::VisibilitySeries: {
      const SystemParams sp = system_from(pp, 1.0);
      const std::vector<double> echo = {sp.beta, sp.big_gamma, sp.gamma};
      const PhotonWaveform wf = PhotonWaveform::exponential(sp.big_gamma);
      const FockVector phi0 = basis_state(0, 1);
      SweepTable series = visibility_series(wf, sp, phi0, tau_grid_from(pp));
      for (SweepTable::Row& r : series.rows) {
        SweepTable::Row out;
        out.values = echo;
        out.values.insert(out.values.end(), r.values.begin(), r.values.end());
        out.error = std::move(r.error);
        rows.push_back(std::move(out));
      }
      return rows;
    }
    case Observable::ProbDensity: {
      const SystemParams sp = system_from(pp, 1.0);
      const double tau = require(pp, "tau");
      const PhotonWaveform wf = PhotonWaveform::exponential(sp.big_gamma);
      const double p = probability_density(tau, sp.phi, wf, sp, basis_state(0, 1));
      rows.push_back({{sp.beta, sp.big_gamma, sp.gamma, sp.phi, tau, p}, ""});
      return rows;
    }
    case Observable::FockProb: {
      const int n = as_index(require(pp, "n"), "n");
      const double beta = require(pp, "beta");
      const double eps = value_or(pp, "epsilon", 0.1);
      const double gamma = value_or(pp, "gamma", 3.0 / (2.0 * M_PI));
      const SuccessProbability sp = success_probability_fock(n, beta, eps, gamma);
      // argmax_beta_for_n is filled by a deterministic post-pass.
      rows.push_back(
          {{double(n), beta, eps, gamma, sp.value, sp.exceeds_unity ? 1.0 : 0.0, std::nan("")},
           ""});
      return rows;
    }
    case Observable::SubspaceMin: {
      const int j = as_index(require(pp, "j"), "j");
      const double beta = require(pp, "beta");
      const double eps = value_or(pp, "epsilon", 0.1);
      OptimizerConfig cfg;
      cfg.seed = point_seed;
      const SubspaceMin m = min_success_over_subspace(j, beta, eps, cfg);
      rows.push_back({{double(j), beta, eps, m.value, double(m.start_index)}, ""});
      return rows;
    }
    case Observable::Feasibility: {
      PhysicalParams phys;
      phys.wavelength = require(pp, "wavelength");
      phys.cavity_length = require(pp, "length");
      phys.mirror_mass = require(pp, "mass");
      phys.mech_freq = require(pp, "mech-freq");
      phys.finesse = require(pp, "finesse");
      phys.quality = require(pp, "quality");
      phys.temperature = require(pp, "temperature");
      phys.transmissivity = require(pp, "transmissivity");
      const FeasibilityReport rep = requirements_report(phys);
      rows.push_back({{phys.wavelength, phys.cavity_length, phys.mirror_mass, phys.mech_freq,
                       phys.finesse, phys.quality, phys.temperature, phys.transmissivity, rep.beta,
                       rep.gamma_over_omega, rep.strong_kick.passed ? 1.0 : 0.0,
                       rep.narrow_cavity.passed ? 1.0 : 0.0, rep.nonlinear_range.passed ? 1.0 : 0.0,
                       rep.low_thermal_rate.passed ? 1.0 : 0.0, rep.all_passed() ? 1.0 : 0.0},
                      ""});
      return rows;
    }
  }
  throw std::invalid_argument("unknown observable enum value");
}

SweepTable::Row failure_row(Observable obs, const Params& pp, const std::string& message) {
  const ObservablePlan plan = plan_for(obs);
  SweepTable::Row row;
  for (const std::string& c : plan.point_columns) {
    const auto it = pp.find(c);
    row.values.push_back(it == pp.end() ? std::nan("") : it->second);
  }
  // ProbDensity and VisibilitySeries carry tau among value columns; pad all
  // value columns with NaN on failure.
  for (size_t i = 0; i < plan.value_columns.size(); ++i) row.values.push_back(std::nan(""));
  row.error = message;
  return row;
}

std::vector<std::string> header_for(Observable obs) {
  const ObservablePlan plan = plan_for(obs);
  std::vector<std::string> h;
  for (std::string c : plan.point_columns) {
    for (char& ch : c)
      if (ch == '-') ch = '_';
    h.push_back(c);
  }
  for (const std::string& c : plan.value_columns) h.push_back(c);
  return h;
}

// For the displaced-Fock probability sweep, fill the per-curve argmax column:
// every row of curve n carries the beta at which p peaks on the swept grid.
void fill_fock_argmax(SweepTable& table) {
  constexpr size_t kN = 0, kBeta = 1, kP = 4, kArgmax = 6;
  std::map<double, std::pair<double, double>> best;  // n -> (p, beta)
  for (const SweepTable::Row& r : table.rows) {
    if (!r.error.empty() || std::isnan(r.values[kP])) continue;
    auto [it, fresh] = best.emplace(r.values[kN], std::make_pair(r.values[kP], r.values[kBeta]));
    if (!fresh && r.values[kP] > it->second.first)
      it->second = {r.values[kP], r.values[kBeta]};
  }
  for (SweepTable::Row& r : table.rows) {
    const auto it = best.find(r.values[kN]);
    if (it != best.end()) r.values[kArgmax] = it->second.second;
  }
}

}  // namespace

SweepTable run_sweep(const SweepSpec& spec) {
  spec.validate();

  // Expand grid points in lexicographic order, last grid varying fastest.
  std::vector<std::vector<double>> axes;
  size_t total = 1;
  for (const GridRange& g : spec.grids) {
    axes.push_back(g.points());
    total *= axes.back().size();
  }

  std::vector<Params> points(total);
  for (size_t idx = 0; idx < total; ++idx) {
    Params pp = spec.scalars;
    size_t rem = idx;
    for (size_t a = axes.size(); a-- > 0;) {
      pp[spec.grids[a].name] = axes[a][rem % axes[a].size()];
      rem /= axes[a].size();
    }
    points[idx] = std::move(pp);
  }

  std::vector<std::vector<SweepTable::Row>> blocks(total);
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned nthreads =
      std::min<size_t>(total, spec.threads == 0 ? hw : static_cast<unsigned>(spec.threads));

  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= total) return;
      try {
        blocks[i] = eval_point(spec.observable, points[i], splitmix64(spec.seed ^ (i + 1)));
      } catch (const std::exception& e) {
        blocks[i] = {failure_row(spec.observable, points[i], e.what())};
      }
    }
  };
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  SweepTable table;
  table.header = header_for(spec.observable);
  for (std::vector<SweepTable::Row>& b : blocks)
    for (SweepTable::Row& r : b) table.rows.push_back(std::move(r));
  if (spec.observable == Observable::FockProb) fill_fock_argmax(table);
  table.require_rectangular();
  return table;
}

}  // namespace optomech
