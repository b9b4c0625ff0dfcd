#include "treeosc/cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>

#include "treeosc/ethernet_backoff.hpp"
#include "treeosc/harmonic_sums.hpp"
#include "treeosc/monte_carlo.hpp"

#ifndef TREEOSC_VERSION
#define TREEOSC_VERSION "0.0.0"
#endif

namespace treeosc::cli {

namespace {

void record_tolerance(OutputTable& table, const numerics::Tolerance& tol) {
  table.set_meta("abs_tol", tol.abs_tol);
  table.set_meta("rel_tol", tol.rel_tol);
  table.set_meta("max_terms", static_cast<double>(tol.max_terms));
}

void check_tolerance(const numerics::Tolerance& tol) {
  try {
    tol.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

void check_ratio(double a) {
  if (!(a > 0.0 && a < 1.0)) throw UsageError("--a must lie in (0, 1)");
}

std::uint64_t integral_time(double t) {
  if (!(t >= 0.0) || t != std::floor(t) || t > 1e15) throw UsageError("--t must be a non-negative integer");
  return static_cast<std::uint64_t>(t);
}

}  // namespace

OutputTable cmd_cost_curve(const CostCurveOptions& opt) {
  using splitting::CostMethod;
  if (opt.n_min < 2 || opt.n_min >= opt.n_max) throw UsageError("cost-curve needs 2 <= n-min < n-max");
  if (opt.points_per_octave < 1) throw UsageError("--points-per-octave must be positive");
  check_tolerance(opt.tol);
  if (opt.method == CostMethod::exact_rational && opt.n_max > 64) throw UsageError("exact method needs n-max <= 64");
  if (opt.method == CostMethod::recurrence && opt.n_max > 100000) throw UsageError("recurrence method needs n-max <= 100000");

  std::vector<std::uint64_t> grid;
  for (int i = 0;; ++i) {
    const double v = static_cast<double>(opt.n_min) * std::exp2(static_cast<double>(i) / opt.points_per_octave);
    const auto n = static_cast<std::uint64_t>(std::llround(v));
    if (n > opt.n_max) break;
    if (grid.empty() || n != grid.back()) grid.push_back(n);
  }
  if (grid.back() != opt.n_max) grid.push_back(opt.n_max);

  splitting::CostTable table;
  if (opt.method == CostMethod::recurrence) table = splitting::solve_recurrence(static_cast<int>(opt.n_max));
  if (opt.method == CostMethod::exact_rational) {
    table = splitting::solve_recurrence_exact(static_cast<int>(opt.n_max)).to_table();
  }

  OutputTable out({"n", "mean_cost", "mean_cost_over_n", "f_of_log2_n"});
  out.set_meta("command", "cost-curve");
  out.set_meta("version", TREEOSC_VERSION);
  out.set_meta("method", std::string(splitting::to_string(opt.method)));
  out.set_meta("points_per_octave", static_cast<double>(opt.points_per_octave));
  record_tolerance(out, opt.tol);
  double lo = INFINITY;
  double hi = -INFINITY;
  for (const auto n : grid) {
    const double cost = table.values.empty() ? splitting::mean_cost(n, opt.method, opt.tol) : table.values[n];
    const double nd = static_cast<double>(n);
    const double f = splitting::periodic_f(std::log2(nd), opt.tol);
    out.add_row({nd, cost, cost / nd, f});
    lo = std::min(lo, cost / nd);
    hi = std::max(hi, cost / nd);
  }
  out.set_meta("mean_cost_over_n_min", lo);
  out.set_meta("mean_cost_over_n_max", hi);
  out.set_meta("f_mean", splitting::periodic_f_mean());
  return out;
}

OutputTable cmd_h_density(const HDensityOptions& opt) {
  check_ratio(opt.a);
  if (opt.samples < 2) throw UsageError("--grid must be at least 2");
  const auto spec = ethernet::make_h_density_spec(opt.a);
  const double x_min = std::isnan(opt.x_min) ? spec.x_min : opt.x_min;
  if (x_min < spec.x_min) {
    throw ethernet::PrecisionLoss("x-min " + format_number(x_min) + " is below the cancellation fence " +
                                  format_number(spec.x_min) + " for a=" + format_number(opt.a));
  }
  double x_max = opt.x_max;
  if (std::isnan(x_max)) {
    x_max = std::max(1.0, 2.0 * x_min);
    while (ethernet::h_survival(spec, x_max) >= 1e-14) x_max *= 1.25;
  }
  if (!(x_max > x_min)) throw UsageError("--x-max must exceed x-min");

  OutputTable out({"x", "h"});
  out.set_meta("command", "h-density");
  out.set_meta("version", TREEOSC_VERSION);
  out.set_meta("a", opt.a);
  out.set_meta("depth", static_cast<double>(spec.depth));
  out.set_meta("fence", spec.x_min);
  out.set_meta("rel_precision", spec.rel_precision);
  const double step = (x_max - x_min) / (opt.samples - 1);
  numerics::CompensatedSum mass;
  numerics::CompensatedSum moment;
  for (int i = 0; i < opt.samples; ++i) {
    const double x = i + 1 == opt.samples ? x_max : x_min + step * i;
    const double h = ethernet::h_density(spec, x);
    out.add_row({x, h});
    const double w = (i == 0 || i + 1 == opt.samples) ? 0.5 * step : step;
    mass += w * h;
    moment += w * x * h;
  }
  out.set_meta("trapezoid_integral", mass.value());
  out.set_meta("trapezoid_first_moment", moment.value());
  out.set_meta("expected_first_moment", 1.0 / (1.0 - opt.a));
  out.set_meta("mass_below_x_min", ethernet::h_cdf(spec, x_min));
  out.set_meta("mass_above_x_max", ethernet::h_survival(spec, x_max));
  out.set_meta("normalization", std::abs(mass.value() - 1.0) <= 1e-6 ? "ok" : "outside 1e-6");
  return out;
}

OutputTable cmd_periodic(const PeriodicOptions& opt) {
  if (opt.grid < 2) throw UsageError("--grid must be at least 2");
  check_tolerance(opt.tol);
  std::function<double(double)> f;
  double analytic = 0.0;
  OutputTable out({"y", "F"});
  out.set_meta("command", "periodic");
  out.set_meta("version", TREEOSC_VERSION);
  out.set_meta("which", opt.which);
  if (opt.which == "knuth") {
    f = [&](double y) { return splitting::periodic_f(y, opt.tol); };
    analytic = splitting::periodic_f_mean();
  } else if (opt.which == "dyadic") {
    harmonic::Integrand g;
    try {
      g = harmonic::integrand_by_name(opt.integrand);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    f = [g, &opt](double y) { return harmonic::dyadic_periodic_f(g, y, opt.tol); };
    analytic = harmonic::mellin_at_zero(g, opt.tol) / std::log(2.0);
    out.set_meta("integrand", opt.integrand);
  } else {
    throw UsageError("--which must be knuth or dyadic");
  }
  record_tolerance(out, opt.tol);
  numerics::CompensatedSum sum;
  double lo = INFINITY;
  double hi = -INFINITY;
  for (int i = 0; i <= opt.grid; ++i) {
    const double y = static_cast<double>(i) / opt.grid;
    const double value = f(y);
    out.add_row({y, value});
    if (i < opt.grid) sum += value;
    lo = std::min(lo, value);
    hi = std::max(hi, value);
  }
  out.set_meta("mean", sum.value() / opt.grid);
  out.set_meta("analytic_mean", analytic);
  out.set_meta("amplitude", hi - lo);
  return out;
}

OutputTable cmd_ethernet(const EthernetOptions& opt) {
  check_ratio(opt.a);
  const double log_base = std::log(1.0 / opt.a);
  if (opt.mode == "dist") {
    const auto dist = ethernet::chain_distribution_at(opt.a, integral_time(opt.t), opt.tail_cut);
    OutputTable out({"counter", "probability"});
    out.set_meta("command", "ethernet dist");
    out.set_meta("version", TREEOSC_VERSION);
    out.set_meta("a", opt.a);
    out.set_meta("t", opt.t);
    out.set_meta("tail_cut", opt.tail_cut);
    out.set_meta("truncation_mass", dist.truncation_mass);
    out.set_meta("mean", dist.mean());
    for (std::size_t i = 0; i < dist.probs.size(); ++i) {
      out.add_row({static_cast<double>(dist.first_counter + i), dist.probs[i]});
    }
    return out;
  }
  if (opt.mode == "limit") {
    if (!std::isfinite(opt.x)) throw UsageError("--x must be finite");
    const auto spec = ethernet::make_h_density_spec(opt.a);
    const double phase = opt.x - std::floor(opt.x);
    OutputTable out({"z", "cdf"});
    out.set_meta("command", "ethernet limit");
    out.set_meta("version", TREEOSC_VERSION);
    out.set_meta("a", opt.a);
    out.set_meta("phase", phase);
    // Z = ceil(x - log_b H) - x lives on m - x; list the m carrying mass.
    for (long m = -200; m <= 200; ++m) {
      const double cdf = ethernet::limit_counter_cdf(spec, phase, m);
      const double before = ethernet::limit_counter_cdf(spec, phase, m - 1);
      if (cdf > 1e-16 && before < 1.0 - 1e-16) out.add_row({static_cast<double>(m) - phase, cdf});
    }
    return out;
  }
  if (opt.mode == "laplace") {
    if (!(opt.t >= 1.0)) throw UsageError("--t must be at least 1");
    if (!(opt.lambda > 0.0)) throw UsageError("--lambda must be positive");
    const auto pair = ethernet::laplace_compare(opt.a, opt.t, opt.lambda, opt.tail_cut);
    OutputTable out({"t", "lambda", "chain", "limit", "relative_gap"});
    out.set_meta("command", "ethernet laplace");
    out.set_meta("version", TREEOSC_VERSION);
    out.set_meta("a", opt.a);
    out.set_meta("tail_cut", opt.tail_cut);
    out.add_row({opt.t, opt.lambda, pair.chain, pair.limit, std::abs(pair.chain - pair.limit) / std::abs(pair.limit)});
    return out;
  }
  if (opt.mode == "sim") {
    const std::uint64_t t = integral_time(opt.t);
    if (t < 1) throw UsageError("--t must be at least 1");
    if (opt.replicas < 1) throw UsageError("--replicas must be positive");
    std::map<std::uint32_t, std::uint64_t> counts;
    for (std::uint64_t i = 0; i < opt.replicas; ++i) {
      Rng gen = make_stream(opt.seed, i);
      ++counts[ethernet::sample_counter_at(opt.a, t, gen)];
    }
    const auto spec = ethernet::make_h_density_spec(opt.a);
    const double level = std::log(static_cast<double>(t)) / log_base;
    const double whole = std::floor(level);
    const double phase = level - whole;
    OutputTable out({"counter", "z", "frequency", "limit_probability"});
    out.set_meta("command", "ethernet sim");
    out.set_meta("version", TREEOSC_VERSION);
    out.set_meta("a", opt.a);
    out.set_meta("t", opt.t);
    out.set_meta("seed", std::to_string(opt.seed));
    out.set_meta("replicas", std::to_string(opt.replicas));
    double ks = 0.0;
    double empirical = 0.0;
    const auto limit_cdf = [&](long counter) {
      return ethernet::limit_counter_cdf(spec, phase, counter - static_cast<long>(whole));
    };
    for (const auto& [counter, count] : counts) {
      const double freq = static_cast<double>(count) / static_cast<double>(opt.replicas);
      const double limit = limit_cdf(counter) - limit_cdf(static_cast<long>(counter) - 1);
      ks = std::max(ks, std::abs(empirical - limit_cdf(static_cast<long>(counter) - 1)));
      empirical += freq;
      ks = std::max(ks, std::abs(empirical - limit_cdf(counter)));
      out.add_row({static_cast<double>(counter), counter - level, freq, limit});
    }
    out.set_meta("ks_to_limit", ks);
    return out;
  }
  throw UsageError("ethernet mode must be dist, limit, laplace or sim");
}

OutputTable cmd_mc(const McOptions& opt) {
  if (opt.replicas < 2) throw UsageError("--replicas must be at least 2");
  check_tolerance(opt.tol);
  const auto est = mc::estimate_mean_cost(opt.n, opt.replicas, opt.seed);
  double exact = 0.0;
  std::string source;
  if (opt.n <= 64) {
    exact = static_cast<double>(splitting::solve_recurrence_exact(static_cast<int>(opt.n)).values.back());
    source = "exact_rational";
  } else {
    exact = splitting::mean_cost_series(opt.n, opt.tol);
    source = "series";
  }
  const double diff = est.mean - exact;
  const double z = est.std_error > 0.0 ? diff / est.std_error : (diff == 0.0 ? 0.0 : INFINITY);
  OutputTable out({"n", "empirical_mean", "stderr", "exact", "z_score"});
  out.set_meta("command", "mc");
  out.set_meta("version", TREEOSC_VERSION);
  out.set_meta("seed", std::to_string(opt.seed));
  out.set_meta("replicas", std::to_string(opt.replicas));
  out.set_meta("exact_source", source);
  out.set_meta("all_costs_odd", opt.n >= 2 ? (est.all_odd ? "yes" : "no") : "n/a");
  record_tolerance(out, opt.tol);
  out.add_row({static_cast<double>(opt.n), est.mean, est.std_error, exact, z});
  return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Expected costs, fluctuation functions and backoff laws", "treeosc"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string out_path;
  app.add_option("--out", out_path, "Write the table here instead of standard output");

  numerics::Tolerance tol;
  const auto add_tol = [&tol](CLI::App* cmd) {
    cmd->add_option("--abs-tol", tol.abs_tol, "Absolute truncation tolerance")->capture_default_str();
    cmd->add_option("--rel-tol", tol.rel_tol, "Relative truncation tolerance")->capture_default_str();
    cmd->add_option("--max-terms", tol.max_terms, "Term and cell budget")->capture_default_str();
  };

  CostCurveOptions cost;
  std::string method = "series";
  auto* cost_cmd = app.add_subcommand("cost-curve", "E(R_n), E(R_n)/n and F(log2 n) on a geometric grid");
  cost_cmd->add_option("--n-min", cost.n_min)->capture_default_str();
  cost_cmd->add_option("--n-max", cost.n_max)->capture_default_str();
  cost_cmd->add_option("--points-per-octave", cost.points_per_octave)->capture_default_str();
  cost_cmd->add_option("--method", method, "recurrence, series, integral or exact")->capture_default_str();
  add_tol(cost_cmd);

  HDensityOptions hd;
  auto* h_cmd = app.add_subcommand("h-density", "Density of H = sum a^k E_k");
  h_cmd->add_option("--a", hd.a)->capture_default_str();
  h_cmd->add_option("--x-min", hd.x_min, "Default: the cancellation fence");
  h_cmd->add_option("--x-max", hd.x_max);
  h_cmd->add_option("--grid,--samples", hd.samples)->capture_default_str();

  PeriodicOptions per;
  auto* per_cmd = app.add_subcommand("periodic", "One period of a fluctuation function");
  per_cmd->add_option("--which", per.which, "knuth or dyadic")->capture_default_str();
  per_cmd->add_option("--grid", per.grid)->capture_default_str();
  per_cmd->add_option("--integrand", per.integrand, "u_exp, u2_exp, exp_difference, min_exp or zero")
      ->capture_default_str();
  add_tol(per_cmd);

  EthernetOptions eth;
  auto* eth_cmd = app.add_subcommand("ethernet", "Backoff counter laws");
  eth_cmd->require_subcommand(1);
  for (const char* mode : {"dist", "limit", "laplace", "sim"}) {
    auto* sub = eth_cmd->add_subcommand(mode);
    sub->add_option("--a", eth.a)->capture_default_str();
    sub->add_option("--t", eth.t)->capture_default_str();
    sub->add_option("--x", eth.x, "Phase for the limit law")->capture_default_str();
    sub->add_option("--lambda", eth.lambda)->capture_default_str();
    sub->add_option("--seed", eth.seed)->capture_default_str();
    sub->add_option("--replicas", eth.replicas)->capture_default_str();
    sub->add_option("--tail-cut", eth.tail_cut)->capture_default_str();
    sub->callback([&eth, mode] { eth.mode = mode; });
  }

  McOptions mcopt;
  auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo estimate of E(R_n) against the exact value");
  mc_cmd->add_option("--n", mcopt.n)->capture_default_str();
  mc_cmd->add_option("--replicas", mcopt.replicas)->capture_default_str();
  mc_cmd->add_option("--seed", mcopt.seed)->capture_default_str();
  add_tol(mc_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "treeosc: " << e.what() << '\n';
    return 2;
  }

  std::string command;
  for (int i = 1; i < argc; ++i) command += (i > 1 ? " " : "") + std::string(argv[i]);

  try {
    std::unique_ptr<OutputTable> table;
    if (cost_cmd->parsed()) {
      cost.tol = tol;
      try {
        cost.method = splitting::parse_cost_method(method);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      table = std::make_unique<OutputTable>(cmd_cost_curve(cost));
    } else if (h_cmd->parsed()) {
      table = std::make_unique<OutputTable>(cmd_h_density(hd));
    } else if (per_cmd->parsed()) {
      per.tol = tol;
      table = std::make_unique<OutputTable>(cmd_periodic(per));
    } else if (eth_cmd->parsed()) {
      table = std::make_unique<OutputTable>(cmd_ethernet(eth));
    } else {
      mcopt.tol = tol;
      table = std::make_unique<OutputTable>(cmd_mc(mcopt));
    }
    table->set_meta("args", command);
    if (out_path.empty()) {
      table->write_csv(out);
    } else {
      std::ofstream file(out_path);
      if (!file) {
        err << "treeosc: cannot open " << out_path << '\n';
        return 1;
      }
      table->write_csv(file);
      if (!file) {
        err << "treeosc: write to " << out_path << " failed\n";
        return 1;
      }
    }
    return 0;
  } catch (const UsageError& e) {
    err << "treeosc: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "treeosc: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace treeosc::cli
