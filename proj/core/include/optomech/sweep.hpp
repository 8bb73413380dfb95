#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "optomech/sweep_table.hpp"

namespace optomech {

enum class Observable { VisibilitySeries, ProbDensity, FockProb, SubspaceMin, Feasibility };

Observable observable_from_name(const std::string& name);
std::string observable_name(Observable o);

/// One swept parameter: start, stop inclusive (within rounding), step > 0.
struct GridRange {
  std::string name;
  double start = 0.0;
  double stop = 0.0;
  double step = 1.0;

  std::vector<double> points() const;
  void validate() const;
};

/// A declarative sweep: grids are iterated in declaration order with the last
/// one varying fastest; scalars hold every non-swept parameter. Parameter
/// names match the CLI long flag names (dashes included).
struct SweepSpec {
  Observable observable = Observable::FockProb;
  std::vector<GridRange> grids;
  std::map<std::string, double> scalars;
  std::string output_path;
  TableFormat format = TableFormat::Csv;
  std::uint64_t seed = 0;
  int threads = 1;  // 0 = hardware concurrency

  void validate() const;
};

/// Evaluates the observable at every grid point. Points are independent and
/// evaluated concurrently; the row order and content depend only on the spec
/// and seed, never on the thread count. Per-point failures land in the error
/// column instead of aborting the sweep.
SweepTable run_sweep(const SweepSpec& spec);

}  // namespace optomech
