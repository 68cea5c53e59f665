#include "enaqt/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "enaqt/analytic3.hpp"
#include "enaqt/ensemble.hpp"
#include "enaqt/errors.hpp"
#include "enaqt/io.hpp"
#include "enaqt/observables.hpp"

namespace enaqt::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw InvalidArgument(where + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.contains(key)) throw InvalidArgument(where + ": unknown key '" + key + "'");
  }
}

template <class T>
void take(const json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

json optimizer_json(const OptimizerConfig& o) {
  return {{"learning_rate", o.learning_rate}, {"beta1", o.beta1},
          {"beta2", o.beta2},                 {"epsilon", o.epsilon},
          {"min_steps", o.min_steps},         {"max_steps", o.max_steps},
          {"grad_tol", o.grad_tol},           {"lower_bound", o.lower_bound},
          {"upper_bound", o.upper_bound},     {"record_trajectory", o.record_trajectory},
          {"trajectory_stride", o.trajectory_stride}};
}

void optimizer_from_json(const json& j, OptimizerConfig& o) {
  check_keys(j,
             {"learning_rate", "beta1", "beta2", "epsilon", "min_steps", "max_steps", "grad_tol", "lower_bound",
              "upper_bound", "record_trajectory", "trajectory_stride"},
             "optimizer");
  take(j, "learning_rate", o.learning_rate);
  take(j, "beta1", o.beta1);
  take(j, "beta2", o.beta2);
  take(j, "epsilon", o.epsilon);
  take(j, "min_steps", o.min_steps);
  take(j, "max_steps", o.max_steps);
  take(j, "grad_tol", o.grad_tol);
  take(j, "lower_bound", o.lower_bound);
  take(j, "upper_bound", o.upper_bound);
  take(j, "record_trajectory", o.record_trajectory);
  take(j, "trajectory_stride", o.trajectory_stride);
}

std::string alpha_tag(double alpha) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", alpha);
  return buf;
}

std::vector<double> grid_of(const RunConfig& c) { return log_grid(c.grid.min, c.grid.max, c.grid.points); }

OptimizerConfig optimizer_of(const RunConfig& c) {
  OptimizerConfig o = c.optimizer;
  o.strict_boundary_stop = c.strict();
  return o;
}

json header_of(const RunConfig& c) { return json{{"config", c}, {"seed", c.seed}}; }

std::vector<double> clamp_all(std::vector<double> v, const OptimizerConfig& o) {
  for (double& g : v) g = std::clamp(g, o.lower_bound, o.upper_bound);
  return v;
}

ChainSpec load_chain_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("chain_file: cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidArgument("chain_file: " + std::string(e.what()));
  }
  return j.get<ChainSpec>();
}

}  // namespace

void RunConfig::validate() const {
  static const std::set<std::string> commands{"scan", "optimize", "ensemble", "analytic3"};
  if (!commands.contains(command)) throw InvalidArgument("unknown command '" + command + "'");
  if (system != "ramp" && system != "disorder" && system != "file") {
    throw InvalidArgument("system must be ramp, disorder or file");
  }
  if (system == "file" && chain_file.empty()) throw InvalidArgument("system=file needs chain_file");
  if (command == "ensemble" && system != "disorder") throw InvalidArgument("ensemble runs need system=disorder");
  if (n_sites < 2) throw InvalidArgument("n_sites must be >= 2");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidArgument("delta must be > 0");
  if (!std::isfinite(offset)) throw InvalidArgument("offset must be finite");
  if (alphas.empty()) throw InvalidArgument("need at least one alpha");
  for (double a : alphas) {
    if (!std::isfinite(a) || a < 0.0) throw InvalidArgument("alpha must be finite and >= 0");
  }
  if (!(j_max > 0.0) || !std::isfinite(j_max)) throw InvalidArgument("j_max must be > 0");
  if (!(gamma_l > 0.0) || !std::isfinite(gamma_l)) throw InvalidArgument("gamma_l must be > 0");
  if (starts < 1) throw InvalidArgument("starts must be >= 1");
  if (realization < 0) throw InvalidArgument("realization must be >= 0");
  if (n_realizations < 1) throw InvalidArgument("n_realizations must be >= 1");
  for (int n : sizes) {
    if (n < 3) throw InvalidArgument("ensemble sizes must be >= 3");
  }
  if (out_dir.empty()) throw InvalidArgument("out_dir must not be empty");
  if (command == "scan" || command == "optimize" || command == "ensemble") {
    if (grid.points < 1) throw InvalidArgument("empty scan grid");
    if (!(grid.min > 0.0) || !(grid.max >= grid.min)) throw InvalidArgument("scan grid needs 0 < min <= max");
    if ((grid.points == 1) != (grid.min == grid.max)) {
      throw InvalidArgument("scan grid: a single point needs min == max and vice versa");
    }
  }
  optimizer.validate();
  if (system == "file") load_chain_file(chain_file).validate();
  const auto& a = analytic3;
  if (command == "analytic3") {
    if (!(a.delta > 0.0)) throw InvalidArgument("analytic3.delta must be > 0");
    if (a.points < 1 || a.oracle_points < 1) throw InvalidArgument("analytic3 grids must be non-empty");
    if (!(a.gamma_min > 0.0) || !(a.gamma_max >= a.gamma_min) || (a.points == 1) != (a.gamma_min == a.gamma_max)) {
      throw InvalidArgument("analytic3 landscape range");
    }
    if (!(a.oracle_min > 0.0) || !(a.oracle_max >= a.oracle_min) ||
        (a.oracle_points == 1) != (a.oracle_min == a.oracle_max)) {
      throw InvalidArgument("analytic3 oracle range");
    }
    if (!(a.oracle_gamma_l > 0.0)) throw InvalidArgument("analytic3.oracle_gamma_l must be > 0");
    if (a.j_sweep.empty()) throw InvalidArgument("analytic3.j_sweep must be non-empty");
    for (double j : a.j_sweep) {
      if (!(j > 0.0)) throw InvalidArgument("analytic3.j_sweep entries must be > 0");
    }
  }
}

bool RunConfig::strict() const { return strict_paper_stopping.value_or(system == "disorder"); }

double RunConfig::ramp_delta() const { return half_bias ? 0.5 * delta : delta; }

void to_json(json& j, const RunConfig& c) {
  const auto& a = c.analytic3;
  j = json{{"schema", kConfigSchema},
           {"command", c.command},
           {"system", c.system},
           {"n_sites", c.n_sites},
           {"delta", c.delta},
           {"offset", c.offset},
           {"half_bias", c.half_bias},
           {"chain_file", c.chain_file},
           {"alphas", c.alphas},
           {"j_max", c.j_max},
           {"gamma_l", c.gamma_l},
           {"seed", c.seed},
           {"starts", c.starts},
           {"realization", c.realization},
           {"n_realizations", c.n_realizations},
           {"sizes", c.sizes},
           {"out_dir", c.out_dir},
           {"strict_paper_stopping", c.strict()},
           {"threads", c.threads},
           {"grid", {{"min", c.grid.min}, {"max", c.grid.max}, {"points", c.grid.points}}},
           {"optimizer", optimizer_json(c.optimizer)},
           {"analytic3",
            {{"delta", a.delta},
             {"points", a.points},
             {"gamma_min", a.gamma_min},
             {"gamma_max", a.gamma_max},
             {"oracle_gamma_l", a.oracle_gamma_l},
             {"j_sweep", a.j_sweep},
             {"oracle_min", a.oracle_min},
             {"oracle_max", a.oracle_max},
             {"oracle_points", a.oracle_points}}}};
}

void from_json(const json& j, RunConfig& c) {
  check_keys(j,
             {"schema", "command", "system", "n_sites", "delta", "offset", "half_bias", "chain_file", "alphas",
              "j_max", "gamma_l", "seed", "starts", "realization", "n_realizations", "sizes", "out_dir",
              "strict_paper_stopping", "threads", "grid", "optimizer", "analytic3"},
             "config");
  if (!j.contains("schema") || j.at("schema") != kConfigSchema) {
    throw InvalidArgument(std::string("config: schema must be '") + kConfigSchema + "'");
  }
  take(j, "command", c.command);
  take(j, "system", c.system);
  take(j, "n_sites", c.n_sites);
  take(j, "delta", c.delta);
  take(j, "offset", c.offset);
  take(j, "half_bias", c.half_bias);
  take(j, "chain_file", c.chain_file);
  take(j, "alphas", c.alphas);
  take(j, "j_max", c.j_max);
  take(j, "gamma_l", c.gamma_l);
  take(j, "seed", c.seed);
  take(j, "starts", c.starts);
  take(j, "realization", c.realization);
  take(j, "n_realizations", c.n_realizations);
  take(j, "sizes", c.sizes);
  take(j, "out_dir", c.out_dir);
  if (j.contains("strict_paper_stopping")) c.strict_paper_stopping = j.at("strict_paper_stopping").get<bool>();
  take(j, "threads", c.threads);
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    check_keys(g, {"min", "max", "points"}, "grid");
    take(g, "min", c.grid.min);
    take(g, "max", c.grid.max);
    take(g, "points", c.grid.points);
  }
  if (j.contains("optimizer")) optimizer_from_json(j.at("optimizer"), c.optimizer);
  if (j.contains("analytic3")) {
    const auto& a = j.at("analytic3");
    check_keys(a,
               {"delta", "points", "gamma_min", "gamma_max", "oracle_gamma_l", "j_sweep", "oracle_min",
                "oracle_max", "oracle_points"},
               "analytic3");
    take(a, "delta", c.analytic3.delta);
    take(a, "points", c.analytic3.points);
    take(a, "gamma_min", c.analytic3.gamma_min);
    take(a, "gamma_max", c.analytic3.gamma_max);
    take(a, "oracle_gamma_l", c.analytic3.oracle_gamma_l);
    take(a, "j_sweep", c.analytic3.j_sweep);
    take(a, "oracle_min", c.analytic3.oracle_min);
    take(a, "oracle_max", c.analytic3.oracle_max);
    take(a, "oracle_points", c.analytic3.oracle_points);
  }
}

ChainSpec make_chain(const RunConfig& c, double alpha, int n_sites) {
  if (c.system == "ramp") return build_ramp(n_sites, c.ramp_delta(), c.offset, alpha, c.j_max);
  if (c.system == "disorder") {
    return build_disordered(n_sites, derive_seed(c.seed, static_cast<std::uint64_t>(c.realization)), alpha,
                            c.j_max);
  }
  ChainSpec spec = load_chain_file(c.chain_file);
  spec.alpha = alpha;
  return spec;
}

std::vector<fs::path> cmd_scan(const RunConfig& c) {
  const fs::path dir(c.out_dir);
  const json header = header_of(c);
  const auto grid = grid_of(c);
  std::vector<fs::path> files;
  json peaks = json::array();
  for (double alpha : c.alphas) {
    const ChainSpec spec = make_chain(c, alpha, c.n_sites);
    const UniformScan scan = scan_uniform(spec, c.gamma_l, grid);
    io::Table t{{"gamma", "flux"}, {}};
    for (const auto& p : scan.curve) t.rows.push_back({p.gamma, p.flux});
    const fs::path csv = dir / ("scan_alpha" + alpha_tag(alpha) + ".csv");
    io::write_csv(csv, header, t);
    files.push_back(csv);
    peaks.push_back({{"alpha", alpha},
                     {"n_sites", spec.n_sites},
                     {"energies", spec.energies},
                     {"gamma_u", scan.gamma_u},
                     {"eta_u", scan.eta_u}});
  }
  const fs::path summary = dir / "scan_peaks.json";
  io::write_json(summary, {{"schema", "enaqt.scan/1"}, {"config", c}, {"seed", c.seed}, {"peaks", peaks}});
  files.push_back(summary);
  return files;
}

std::vector<fs::path> cmd_optimize(const RunConfig& c) {
  const fs::path dir(c.out_dir);
  const json header = header_of(c);
  const auto grid = grid_of(c);
  const OptimizerConfig ocfg = optimizer_of(c);
  std::vector<fs::path> files;
  json results = json::array();
  for (double alpha : c.alphas) {
    const std::string tag = alpha_tag(alpha);
    const ChainSpec spec = make_chain(c, alpha, c.n_sites);
    const TransportSystem system(spec, c.gamma_l);
    const UniformScan scan = scan_uniform(system, grid);
    const auto uniform = clamp_all(std::vector<double>(spec.n_sites, scan.gamma_u), ocfg);

    const OptimizationResult res = c.system == "disorder"
                                       ? optimize_local(system, uniform, ocfg)
                                       : multi_start(spec, c.gamma_l, c.starts, c.seed, ocfg, c.threads);

    const auto sol_u = system.solve(uniform);
    const auto sol_o = system.solve(res.gammas);
    const DensityMatrix rho_u = system.density(sol_u);
    const DensityMatrix rho_o = system.density(sol_o);

    auto emit = [&](const std::string& stem, const io::Table& t) {
      const fs::path p = dir / (stem + "_alpha" + tag + ".csv");
      io::write_csv(p, header, t);
      files.push_back(p);
    };

    io::Table profile{{"site", "energy", "gamma_opt", "gamma_u"}, {}};
    for (int n = 0; n < spec.n_sites; ++n) {
      profile.rows.push_back({static_cast<double>(n + 1), spec.energies[n], res.gammas[n], uniform[n]});
    }
    emit("profile", profile);

    const auto pop_u = populations(rho_u);
    const auto pop_o = populations(rho_o);
    io::Table pops{{"site", "uniform", "optimized"}, {}};
    for (int n = 0; n < spec.n_sites; ++n) pops.rows.push_back({static_cast<double>(n + 1), pop_u[n], pop_o[n]});
    emit("populations", pops);

    emit("coherence_opt", io::matrix_table(coherence_map(rho_o).magnitudes, "col_"));
    emit("coherence_uniform", io::matrix_table(coherence_map(rho_u).magnitudes, "col_"));
    emit("ratio_map", io::matrix_table(ratio_map(rho_o, rho_u), "col_"));
    emit("density_opt", io::density_table(rho_o));
    emit("density_uniform", io::density_table(rho_u));

    if (!res.trajectory.empty()) {
      io::Table traj;
      traj.columns = {"step", "flux"};
      for (int n = 0; n < spec.n_sites; ++n) traj.columns.push_back("gamma_" + std::to_string(n + 1));
      for (const auto& p : res.trajectory) {
        std::vector<double> row{static_cast<double>(p.step), p.flux};
        row.insert(row.end(), p.gammas.begin(), p.gammas.end());
        traj.rows.push_back(std::move(row));
      }
      emit("trajectory", traj);
    }

    results.push_back({{"alpha", alpha},
                       {"n_sites", spec.n_sites},
                       {"energies", spec.energies},
                       {"gamma_u", scan.gamma_u},
                       {"eta_u", sol_u.flux},
                       {"gammas_opt", res.gammas},
                       {"eta_opt", res.flux},
                       {"ell_u", coherence_length(rho_u)},
                       {"ell_opt", coherence_length(rho_o)},
                       {"termination", to_string(res.termination)},
                       {"steps", res.steps},
                       {"reverted_to_best", res.reverted_to_best}});
  }
  const fs::path summary = dir / "optimize_summary.json";
  io::write_json(summary, {{"schema", "enaqt.optimize/1"}, {"config", c}, {"seed", c.seed}, {"results", results}});
  files.push_back(summary);
  return files;
}

namespace {

io::Table boxplot_table(const std::vector<BinnedBoxplot>& bins) {
  io::Table t{{"lo", "hi", "count", "q1", "median", "q3", "whisker_low", "whisker_high", "outliers"}, {}};
  const double nan = std::nan("");
  for (const auto& b : bins) {
    if (b.stats) {
      const auto& s = *b.stats;
      t.rows.push_back({b.lo, b.hi, static_cast<double>(b.count), s.q1, s.median, s.q3, s.whisker_low,
                        s.whisker_high, static_cast<double>(s.outliers.size())});
    } else {
      t.rows.push_back({b.lo, b.hi, 0.0, nan, nan, nan, nan, nan, 0.0});
    }
  }
  return t;
}

}  // namespace

std::vector<fs::path> cmd_ensemble(const RunConfig& c) {
  const fs::path dir(c.out_dir);
  const json header = header_of(c);
  std::vector<fs::path> files;
  json per_size = json::array();
  json sweep = json::array();

  const std::vector<int> sizes = c.sizes.empty() ? std::vector<int>{c.n_sites} : c.sizes;
  for (int n_sites : sizes) {
    EnsembleConfig ec;
    ec.n_realizations = c.n_realizations;
    ec.n_sites = n_sites;
    ec.alphas = c.alphas;
    ec.gamma_l = c.gamma_l;
    ec.j_max = c.j_max;
    ec.master_seed = c.seed;
    ec.optimizer = optimizer_of(c);
    ec.scan_grid = grid_of(c);
    ec.threads = c.threads;
    const auto records = run_ensemble(ec);
    const EnsembleSummary summary = summarize(records, c.alphas);
    if (summary.failures == summary.n_records) {
      throw NumericalError("every realization failed at N=" + std::to_string(n_sites) + ": " +
                           records.front().error.value_or(""));
    }
    const std::string ntag = "N" + std::to_string(n_sites);

    std::ostringstream nd;
    nd << json{{"schema", "enaqt.records-header/1"}, {"config", c}, {"seed", c.seed}, {"n_sites", n_sites}}.dump()
       << '\n';
    for (const auto& r : records) nd << json(r).dump() << '\n';
    const fs::path rec_path = dir / ("records_" + ntag + ".ndjson");
    io::write_text(rec_path, nd.str());
    files.push_back(rec_path);

    json alpha_extra = json::array();
    for (const auto& s : summary.alphas) {
      const std::string tag = ntag + "_alpha" + alpha_tag(s.alpha);
      std::vector<double> log_gammas, eta_u, eta_opt, ell_u, ell_opt, flux_ratio, ell_ratio;
      io::Table points{{"index", "gamma_u", "eta_u", "eta_opt", "ell_u", "ell_opt", "flux_ratio", "ell_ratio"}, {}};
      for (const auto& r : records) {
        const AlphaBlock* b = r.error ? nullptr : r.block(s.alpha);
        if (b == nullptr) continue;
        for (double g : b->gammas_opt) log_gammas.push_back(std::log10(g));
        eta_u.push_back(b->eta_u);
        eta_opt.push_back(b->eta_opt);
        ell_u.push_back(b->ell_u);
        ell_opt.push_back(b->ell_opt);
        flux_ratio.push_back(b->eta_opt / b->eta_u);
        ell_ratio.push_back(b->ell_u > 0.0 ? b->ell_opt / b->ell_u : 1.0);
        points.rows.push_back({static_cast<double>(r.index), b->gamma_u, b->eta_u, b->eta_opt, b->ell_u,
                               b->ell_opt, flux_ratio.back(), ell_ratio.back()});
      }
      auto emit = [&](const std::string& stem, const io::Table& t) {
        const fs::path p = dir / (stem + "_" + tag + ".csv");
        io::write_csv(p, header, t);
        files.push_back(p);
      };
      emit("points", points);

      const Histogram h = histogram(log_gammas, -7.0, 0.0, 0.25);
      io::Table hist{{"log10_lo", "log10_hi", "count"}, {}};
      for (std::size_t k = 0; k < h.counts.size(); ++k) {
        const double lo = h.lo + h.width * static_cast<double>(k);
        hist.rows.push_back({lo, lo + h.width, static_cast<double>(h.counts[k])});
      }
      emit("gamma_hist", hist);

      const MismatchCorrelation mc = correlate_mismatch(records, s.alpha);
      emit("mismatch", boxplot_table(mc.bins));
      emit("ell_ratio_by_flux_ratio", boxplot_table(binned_boxplots(flux_ratio, ell_ratio, 1.0, 2.5, 0.1)));

      alpha_extra.push_back({{"alpha", s.alpha},
                             {"gamma_hist_below", h.below},
                             {"gamma_hist_above", h.above},
                             {"boxplots",
                              {{"eta_u", boxplot_stats(eta_u)},
                               {"eta_opt", boxplot_stats(eta_opt)},
                               {"ell_u", boxplot_stats(ell_u)},
                               {"ell_opt", boxplot_stats(ell_opt)}}}});
      sweep.push_back({{"n_sites", n_sites},
                       {"alpha", s.alpha},
                       {"mean_flux_improvement", s.mean_flux_improvement},
                       {"std_flux_improvement", s.std_flux_improvement},
                       {"mean_ell_improvement", s.mean_ell_improvement},
                       {"std_ell_improvement", s.std_ell_improvement},
                       {"mean_eta_u", s.mean_eta_u},
                       {"std_eta_u", s.std_eta_u},
                       {"mean_eta_opt", s.mean_eta_opt},
                       {"std_eta_opt", s.std_eta_opt}});
    }
    per_size.push_back({{"summary", summary}, {"figures", alpha_extra}});
  }
  const fs::path path = dir / "ensemble_summary.json";
  io::write_json(path, {{"schema", "enaqt.ensemble/1"},
                        {"config", c},
                        {"seed", c.seed},
                        {"sizes", per_size},
                        {"sweep", sweep}});
  files.push_back(path);
  return files;
}

std::vector<fs::path> cmd_analytic3(const RunConfig& c) {
  const fs::path dir(c.out_dir);
  const json header = header_of(c);
  const auto& a = c.analytic3;
  std::vector<fs::path> files;

  json maxima = json::array();
  const auto grid = log_grid(a.gamma_min, a.gamma_max, a.points);
  for (double alpha : c.alphas) {
    const TransportSystem system(build_ramp(3, a.delta, 0.0, alpha, c.j_max), c.gamma_l);
    io::Table t{{"gamma2", "gamma3", "flux"}, {}};
    double best = -1.0, best2 = 0.0, best3 = 0.0;
    for (double g2 : grid) {
      for (double g3 : grid) {
        const double eta = system.flux(std::vector<double>{0.0, g2, g3});
        t.rows.push_back({g2, g3, eta});
        if (eta > best) {
          best = eta;
          best2 = g2;
          best3 = g3;
        }
      }
    }
    const fs::path p = dir / ("landscape_alpha" + alpha_tag(alpha) + ".csv");
    io::write_csv(p, header, t);
    files.push_back(p);
    maxima.push_back({{"alpha", alpha}, {"gamma2", best2}, {"gamma3", best3}, {"flux", best}});
  }

  io::Table oracle{{"mode", "j", "gamma2", "gamma3", "eta_numeric", "eta_analytic", "rel_error"}, {}};
  json sweeps = json::array();
  const auto ogrid = log_grid(a.oracle_min, a.oracle_max, a.oracle_points);
  for (const auto mode : {ThreeSiteMode::nearest_neighbor, ThreeSiteMode::long_range}) {
    const bool nn = mode == ThreeSiteMode::nearest_neighbor;
    json rows = json::array();
    double previous = INFINITY;
    bool monotone = true;
    for (double j : a.j_sweep) {
      double worst = 0.0;
      for (double g2 : ogrid) {
        for (double g3 : ogrid) {
          const ThreeSiteParams p{j, j, a.delta, g2, g3};
          const double analytic = nn ? eta_nn(p) : eta_lr(p);
          const double numeric = three_site_numeric(p, mode, a.oracle_gamma_l);
          const double err = std::abs(numeric - analytic) / analytic;
          worst = std::max(worst, err);
          oracle.rows.push_back({nn ? 0.0 : 1.0, j, g2, g3, numeric, analytic, err});
        }
      }
      monotone = monotone && worst < previous;
      previous = worst;
      rows.push_back({{"j", j}, {"max_rel_error", worst}});
    }
    sweeps.push_back({{"mode", nn ? "nearest_neighbor" : "long_range"},
                      {"errors", rows},
                      {"decreasing", monotone}});
  }
  const fs::path op = dir / "oracle.csv";
  io::write_csv(op, header, oracle);
  files.push_back(op);

  const fs::path summary = dir / "analytic3_summary.json";
  io::write_json(summary, {{"schema", "enaqt.analytic3/1"},
                           {"config", c},
                           {"seed", c.seed},
                           {"landscape_maxima", maxima},
                           {"oracle", sweeps}});
  files.push_back(summary);
  return files;
}

void verify_artifacts(const std::vector<fs::path>& files) {
  for (const auto& f : files) {
    if (!fs::is_regular_file(f) || fs::file_size(f) == 0) throw NumericalError("artifact missing: " + f.string());
    const auto ext = f.extension().string();
    if (ext == ".json") {
      std::ifstream in(f);
      if (!json::accept(in)) throw NumericalError("malformed artifact: " + f.string());
    } else if (ext == ".ndjson") {
      std::ifstream in(f);
      std::string line;
      while (std::getline(in, line)) {
        if (!json::accept(line)) throw NumericalError("malformed artifact: " + f.string());
      }
    } else if (ext == ".csv") {
      (void)io::read_csv(f);
    }
  }
}

namespace {

struct Flags {
  std::string config_path;
  std::optional<std::string> system, chain_file, out_dir;
  std::optional<int> n_sites, starts, realization, n_realizations, grid_points, max_steps;
  std::optional<double> delta, offset, gamma_l, j_max, grid_min, grid_max, learning_rate, a3_delta;
  std::vector<double> alphas;
  std::vector<int> sizes;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<bool> strict, half_bias, trajectory;
  bool n_sweep = false;
};

void add_flags(CLI::App& sub, Flags& f) {
  sub.add_option("--config", f.config_path, "JSON config file (flags override its values)");
  sub.add_option("--system", f.system, "ramp | disorder | file")
      ->check(CLI::IsMember({"ramp", "disorder", "file"}));
  sub.add_option("--chain-file", f.chain_file, "JSON chain spec for --system file");
  sub.add_option("--n-sites", f.n_sites, "number of sites");
  sub.add_option("--delta", f.delta, "ramp gap between neighbouring sites");
  sub.add_option("--offset", f.offset, "ramp energy of site 1");
  sub.add_option("--alpha", f.alphas, "tunneling exponent(s)")->delimiter(',');
  sub.add_option("--j-max", f.j_max, "nearest-neighbour tunneling");
  sub.add_option("--gamma-l", f.gamma_l, "trapping rate");
  sub.add_option("--seed", f.seed, "master seed");
  sub.add_option("--starts", f.starts, "multi-start count (ramp/file optimize)");
  sub.add_option("--realization", f.realization, "disorder realization index");
  sub.add_option("--realizations", f.n_realizations, "ensemble size");
  sub.add_option("--sizes", f.sizes, "ensemble chain lengths")->delimiter(',');
  sub.add_flag("--n-sweep", f.n_sweep, "ensemble over N = 8,10,12,14");
  sub.add_option("--out-dir", f.out_dir, "output directory");
  sub.add_flag("--strict-paper-stopping,!--no-strict-paper-stopping", f.strict,
               "stop at the first bound contact after the minimum step count");
  sub.add_flag("--half-bias", f.half_bias, "halve the ramp gap");
  sub.add_flag("--trajectory", f.trajectory, "record optimizer trajectories");
  sub.add_option("--threads", f.threads, "worker threads (0 = hardware)");
  sub.add_option("--grid-min", f.grid_min, "uniform scan lower end");
  sub.add_option("--grid-max", f.grid_max, "uniform scan upper end");
  sub.add_option("--grid-points", f.grid_points, "uniform scan point count");
  sub.add_option("--learning-rate", f.learning_rate, "Adamax step size in log10 units");
  sub.add_option("--max-steps", f.max_steps, "optimizer step limit");
  sub.add_option("--landscape-delta", f.a3_delta, "three-site ramp gap (analytic3)");
}

RunConfig resolve(const std::string& command, const Flags& f) {
  RunConfig c;
  bool system_from_file = false;
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw InvalidArgument("cannot open config '" + f.config_path + "'");
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw InvalidArgument("config: " + std::string(e.what()));
    }
    from_json(j, c);
    system_from_file = j.contains("system");
    if (j.contains("command") && c.command != command) {
      throw InvalidArgument("config command '" + c.command + "' does not match '" + command + "'");
    }
  }
  c.command = command;
  if (command == "ensemble" && !f.system && !system_from_file) c.system = "disorder";
  if (f.system) c.system = *f.system;
  if (f.chain_file) c.chain_file = *f.chain_file;
  if (f.n_sites) c.n_sites = *f.n_sites;
  if (f.delta) c.delta = *f.delta;
  if (f.offset) c.offset = *f.offset;
  if (!f.alphas.empty()) c.alphas = f.alphas;
  if (f.j_max) c.j_max = *f.j_max;
  if (f.gamma_l) c.gamma_l = *f.gamma_l;
  if (f.seed) c.seed = *f.seed;
  if (f.starts) c.starts = *f.starts;
  if (f.realization) c.realization = *f.realization;
  if (f.n_realizations) c.n_realizations = *f.n_realizations;
  if (f.n_sweep) c.sizes = {8, 10, 12, 14};
  if (!f.sizes.empty()) c.sizes = f.sizes;
  if (f.out_dir) c.out_dir = *f.out_dir;
  if (f.strict) c.strict_paper_stopping = *f.strict;
  if (f.half_bias) c.half_bias = *f.half_bias;
  if (f.trajectory) c.optimizer.record_trajectory = *f.trajectory;
  if (f.threads) c.threads = *f.threads;
  if (f.grid_min) c.grid.min = *f.grid_min;
  if (f.grid_max) c.grid.max = *f.grid_max;
  if (f.grid_points) c.grid.points = *f.grid_points;
  if (f.learning_rate) c.optimizer.learning_rate = *f.learning_rate;
  if (f.max_steps) c.optimizer.max_steps = *f.max_steps;
  if (f.a3_delta) c.analytic3.delta = *f.a3_delta;
  c.validate();
  return c;
}

json error_json(const std::string& kind, const std::string& message) {
  return {{"schema", "enaqt.error/1"}, {"error", kind}, {"message", message}};
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const InvalidArgument*>(&e)) return "invalid_argument";
  if (dynamic_cast<const DegenerateSteadyState*>(&e)) return "degenerate_steady_state";
  if (dynamic_cast<const NumericalError*>(&e)) return "numerical_error";
  if (dynamic_cast<const DegenerateInput*>(&e)) return "degenerate_input";
  if (dynamic_cast<const UndefinedCorrelation*>(&e)) return "undefined_correlation";
  return "error";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app("Steady-state transport under site-dependent dephasing", "enaqt");
  app.require_subcommand(1);
  Flags flags;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"scan", "uniform-dephasing flux scan"},
      {"optimize", "site-resolved dephasing optimization"},
      {"ensemble", "disorder ensemble statistics"},
      {"analytic3", "three-site landscape and closed-form comparison"}};
  for (const auto& [name, help] : commands) add_flags(*app.add_subcommand(name, help), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << error_json("usage", e.what()).dump() << '\n';
    return 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  RunConfig cfg;
  try {
    cfg = resolve(command, flags);
  } catch (const std::exception& e) {
    err << error_json("usage", e.what()).dump() << '\n';
    return 2;
  }

  try {
    fs::create_directories(cfg.out_dir);
    std::vector<fs::path> files;
    if (command == "scan") files = cmd_scan(cfg);
    if (command == "optimize") files = cmd_optimize(cfg);
    if (command == "ensemble") files = cmd_ensemble(cfg);
    if (command == "analytic3") files = cmd_analytic3(cfg);
    verify_artifacts(files);
    for (const auto& f : files) out << f.string() << '\n';
    return 0;
  } catch (const std::exception& e) {
    json doc = error_json(error_kind(e), e.what());
    doc["config"] = cfg;
    err << doc.dump() << '\n';
    std::error_code ec;
    if (fs::is_directory(cfg.out_dir, ec)) {
      try {
        io::write_json(fs::path(cfg.out_dir) / "error.json", doc);
      } catch (...) {
      }
    }
    return 1;
  }
}

}  // namespace enaqt::cli
