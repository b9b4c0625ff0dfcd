#pragma once

#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "treeosc/cli/output_table.hpp"
#include "treeosc/numerics.hpp"
#include "treeosc/splitting_cost.hpp"

namespace treeosc::cli {

/// Bad flag combination; run() maps it to exit status 2.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct CostCurveOptions {
  std::uint64_t n_min = 2;
  std::uint64_t n_max = 1024;
  int points_per_octave = 8;
  splitting::CostMethod method = splitting::CostMethod::series;
  numerics::Tolerance tol{};
};

struct HDensityOptions {
  double a = 0.5;
  double x_min = std::numeric_limits<double>::quiet_NaN();  ///< NaN: the cancellation fence
  double x_max = std::numeric_limits<double>::quiet_NaN();  ///< NaN: where P(H > x) < 1e-14
  int samples = 2001;
};

struct PeriodicOptions {
  std::string which = "knuth";
  int grid = 64;
  std::string integrand = "u_exp";
  numerics::Tolerance tol{};
};

struct EthernetOptions {
  std::string mode = "dist";  ///< dist, limit, laplace or sim
  double a = 0.5;
  double t = 1024;
  double x = 0.0;
  double lambda = 1.0;
  std::uint64_t seed = 1;
  std::uint64_t replicas = 10000;
  double tail_cut = 1e-15;
};

struct McOptions {
  std::uint64_t n = 2;
  std::uint64_t replicas = 100000;
  std::uint64_t seed = 1;
  numerics::Tolerance tol{};
};

OutputTable cmd_cost_curve(const CostCurveOptions& opt);
OutputTable cmd_h_density(const HDensityOptions& opt);
OutputTable cmd_periodic(const PeriodicOptions& opt);
OutputTable cmd_ethernet(const EthernetOptions& opt);
OutputTable cmd_mc(const McOptions& opt);

/// Parses argv and writes the table to --out or `out`. Returns 0 on success,
/// 2 on usage errors and 1 when a computation fails.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace treeosc::cli
