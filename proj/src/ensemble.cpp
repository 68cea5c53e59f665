#include "enaqt/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "enaqt/errors.hpp"
#include "enaqt/observables.hpp"
#include "enaqt/parallel.hpp"

namespace enaqt {

namespace {

constexpr double kMismatchBinWidth = 0.25;
constexpr double kMismatchMax = 2.0;

}  // namespace

const AlphaBlock* RealizationRecord::block(double alpha) const {
  for (const auto& b : blocks) {
    if (b.alpha == alpha) return &b;
  }
  return nullptr;
}

void to_json(nlohmann::json& j, const RealizationRecord& r) {
  nlohmann::json blocks = nlohmann::json::array();
  for (const auto& b : r.blocks) {
    blocks.push_back({{"alpha", b.alpha},
                      {"gamma_u", b.gamma_u},
                      {"eta_u", b.eta_u},
                      {"gammas_opt", b.gammas_opt},
                      {"eta_opt", b.eta_opt},
                      {"ell_u", b.ell_u},
                      {"ell_opt", b.ell_opt},
                      {"termination", to_string(b.termination)},
                      {"steps", b.steps}});
  }
  j = nlohmann::json{{"schema", kRecordSchema}, {"index", r.index},       {"seed", r.seed},
                     {"energies", r.energies},  {"blocks", std::move(blocks)}};
  j["error"] = r.error ? nlohmann::json(*r.error) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, RealizationRecord& r) {
  if (j.at("schema").get<std::string>() != kRecordSchema) {
    throw InvalidArgument("realization record: unsupported schema " + j.at("schema").dump());
  }
  r.index = j.at("index").get<int>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.energies = j.at("energies").get<std::vector<double>>();
  r.blocks.clear();
  for (const auto& b : j.at("blocks")) {
    AlphaBlock block;
    block.alpha = b.at("alpha").get<double>();
    block.gamma_u = b.at("gamma_u").get<double>();
    block.eta_u = b.at("eta_u").get<double>();
    block.gammas_opt = b.at("gammas_opt").get<std::vector<double>>();
    block.eta_opt = b.at("eta_opt").get<double>();
    block.ell_u = b.at("ell_u").get<double>();
    block.ell_opt = b.at("ell_opt").get<double>();
    block.termination = termination_from_string(b.at("termination").get<std::string>());
    block.steps = b.at("steps").get<int>();
    r.blocks.push_back(std::move(block));
  }
  const auto& err = j.at("error");
  r.error = err.is_null() ? std::nullopt : std::optional<std::string>(err.get<std::string>());
}

void EnsembleConfig::validate() const {
  if (n_realizations < 1) throw InvalidArgument("ensemble: n_realizations must be >= 1");
  if (n_sites < 3) throw InvalidArgument("ensemble: n_sites must be >= 3");
  if (alphas.empty()) throw InvalidArgument("ensemble: need at least one alpha");
  for (double a : alphas) {
    if (!std::isfinite(a) || a < 0.0) throw InvalidArgument("ensemble: alpha must be finite and >= 0");
  }
  if (!(gamma_l > 0.0)) throw InvalidArgument("ensemble: gamma_l must be > 0");
  if (!(j_max > 0.0)) throw InvalidArgument("ensemble: j_max must be > 0");
  if (scan_grid.empty()) throw InvalidArgument("ensemble: empty scan grid");
  optimizer.validate();
}

RealizationRecord run_realization(const EnsembleConfig& cfg, int index) {
  RealizationRecord record;
  record.index = index;
  record.seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(index));
  try {
    record.energies = sample_disorder(cfg.n_sites, record.seed);
    for (double alpha : cfg.alphas) {
      ChainSpec spec{cfg.n_sites, record.energies, alpha, cfg.j_max};
      const TransportSystem system(spec, cfg.gamma_l);
      const UniformScan scan = scan_uniform(system, cfg.scan_grid);

      AlphaBlock block;
      block.alpha = alpha;
      block.gamma_u = scan.gamma_u;
      const std::vector<double> uniform(cfg.n_sites, scan.gamma_u);
      const auto opt = optimize_local(system, uniform, cfg.optimizer);
      // eta_u is re-evaluated at the start point actually used (Gamma_u may
      // be clipped into the optimizer box).
      std::vector<double> start = uniform;
      for (double& g : start) g = std::clamp(g, cfg.optimizer.lower_bound, cfg.optimizer.upper_bound);
      const auto uniform_solution = system.solve(start);
      block.eta_u = uniform_solution.flux;
      block.ell_u = coherence_length(system.density(uniform_solution));
      block.gammas_opt = opt.gammas;
      block.eta_opt = opt.flux;
      block.ell_opt = coherence_length(system.density(system.solve(opt.gammas)));
      block.termination = opt.termination;
      block.steps = opt.steps;
      record.blocks.push_back(std::move(block));
    }
  } catch (const std::exception& e) {
    record.error = e.what();
  }
  return record;
}

std::vector<RealizationRecord> run_ensemble(const EnsembleConfig& cfg) {
  cfg.validate();
  std::vector<RealizationRecord> records(cfg.n_realizations);
  parallel_for(records.size(), cfg.threads,
               [&](std::size_t i) { records[i] = run_realization(cfg, static_cast<int>(i)); });
  return records;
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidArgument("spearman: length mismatch");
  if (x.size() < 2) throw InvalidArgument("spearman: need at least two points");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double mx = mean(rx);
  const double my = mean(ry);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw UndefinedCorrelation("spearman: constant input has no rank variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw InvalidArgument("quantile: empty input");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

BoxplotStats boxplot_stats(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("boxplot_stats: empty input");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());

  BoxplotStats out;
  out.q1 = quantile_sorted(sorted, 0.25);
  out.median = quantile_sorted(sorted, 0.5);
  out.q3 = quantile_sorted(sorted, 0.75);
  const double iqr = out.q3 - out.q1;
  const double fence_lo = out.q1 - 1.5 * iqr;
  const double fence_hi = out.q3 + 1.5 * iqr;
  out.whisker_low = out.q1;
  out.whisker_high = out.q3;
  bool have_low = false;
  for (double v : sorted) {
    if (v < fence_lo || v > fence_hi) {
      out.outliers.push_back(v);
      continue;
    }
    if (!have_low) {
      out.whisker_low = v;
      have_low = true;
    }
    out.whisker_high = v;
  }
  return out;
}

Histogram histogram(std::span<const double> values, double lo, double hi, double width) {
  if (!(hi > lo) || !(width > 0.0)) throw InvalidArgument("histogram: need lo < hi and width > 0");
  Histogram out;
  out.lo = lo;
  out.width = width;
  const auto nbins = static_cast<std::size_t>(std::ceil((hi - lo) / width - 1e-9));
  out.counts.assign(nbins, 0);
  const double top = lo + width * static_cast<double>(nbins);
  for (double v : values) {
    if (v < lo) {
      ++out.below;
    } else if (v > top) {
      ++out.above;
    } else {
      const auto k = std::min(static_cast<std::size_t>((v - lo) / width), nbins - 1);
      ++out.counts[k];
    }
  }
  return out;
}

std::vector<BinnedBoxplot> binned_boxplots(std::span<const double> x, std::span<const double> y, double lo,
                                           double hi, double width) {
  if (x.size() != y.size()) throw InvalidArgument("binned_boxplots: length mismatch");
  if (!(hi > lo) || !(width > 0.0)) throw InvalidArgument("binned_boxplots: need lo < hi and width > 0");
  const auto nbins = static_cast<std::size_t>(std::ceil((hi - lo) / width - 1e-9));
  std::vector<std::vector<double>> groups(nbins);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < lo || x[i] > lo + width * static_cast<double>(nbins)) continue;
    const auto k = std::min(static_cast<std::size_t>((x[i] - lo) / width), nbins - 1);
    groups[k].push_back(y[i]);
  }
  std::vector<BinnedBoxplot> out(nbins);
  for (std::size_t k = 0; k < nbins; ++k) {
    out[k].lo = lo + width * static_cast<double>(k);
    out[k].hi = out[k].lo + width;
    out[k].count = static_cast<int>(groups[k].size());
    if (!groups[k].empty()) out[k].stats = boxplot_stats(groups[k]);
  }
  return out;
}

namespace {

std::vector<const RealizationRecord*> sorted_successes(std::span<const RealizationRecord> records) {
  std::vector<const RealizationRecord*> out;
  for (const auto& r : records) {
    if (!r.error) out.push_back(&r);
  }
  std::sort(out.begin(), out.end(), [](const auto* a, const auto* b) { return a->index < b->index; });
  return out;
}

}  // namespace

MismatchCorrelation correlate_mismatch(std::span<const RealizationRecord> records, double alpha) {
  if (records.empty()) throw InvalidArgument("correlate_mismatch: no records");
  MismatchCorrelation out;
  for (const auto* r : sorted_successes(records)) {
    const AlphaBlock* b = r->block(alpha);
    if (b == nullptr) continue;
    const auto delta = local_mismatch(r->energies);
    for (std::size_t k = 0; k < delta.size(); ++k) {
      out.mismatch.push_back(delta[k]);
      out.gammas.push_back(b->gammas_opt[k + 1]);
    }
  }
  if (out.mismatch.empty()) throw InvalidArgument("correlate_mismatch: no successful records at this alpha");
  out.bins = binned_boxplots(out.mismatch, out.gammas, 0.0, kMismatchMax, kMismatchBinWidth);
  out.spearman = out.mismatch.size() >= 2 ? spearman(out.mismatch, out.gammas) : 0.0;
  return out;
}

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size()));
}

EnsembleSummary summarize(std::span<const RealizationRecord> records, std::span<const double> alphas) {
  EnsembleSummary out;
  out.n_records = static_cast<int>(records.size());
  for (const auto& r : records) {
    if (r.error) ++out.failures;
  }
  const auto ok = sorted_successes(records);
  if (!ok.empty()) out.n_sites = static_cast<int>(ok.front()->energies.size());

  for (double alpha : alphas) {
    AlphaSummary s;
    s.alpha = alpha;
    std::vector<double> flux_ratio, ell_ratio, eta_u, eta_opt, ell_u, ell_opt, gamma_u;
    int improved = 0;
    for (const auto* r : ok) {
      const AlphaBlock* b = r->block(alpha);
      if (b == nullptr) continue;
      flux_ratio.push_back(b->eta_opt / b->eta_u);
      ell_ratio.push_back(b->ell_u > 0.0 ? b->ell_opt / b->ell_u : 1.0);
      eta_u.push_back(b->eta_u);
      eta_opt.push_back(b->eta_opt);
      ell_u.push_back(b->ell_u);
      ell_opt.push_back(b->ell_opt);
      gamma_u.push_back(b->gamma_u);
      if (b->eta_opt >= b->eta_u) ++improved;
      switch (b->termination) {
        case Termination::converged: ++s.converged; break;
        case Termination::boundary_hit: ++s.boundary_hit; break;
        case Termination::max_steps: ++s.max_steps; break;
      }
    }
    s.count = static_cast<int>(flux_ratio.size());
    if (s.count > 0) {
      s.mean_flux_improvement = mean(flux_ratio) - 1.0;
      s.std_flux_improvement = stddev(flux_ratio);
      s.mean_ell_improvement = mean(ell_ratio) - 1.0;
      s.std_ell_improvement = stddev(ell_ratio);
      s.mean_eta_u = mean(eta_u);
      s.std_eta_u = stddev(eta_u);
      s.mean_eta_opt = mean(eta_opt);
      s.std_eta_opt = stddev(eta_opt);
      s.mean_ell_u = mean(ell_u);
      s.std_ell_u = stddev(ell_u);
      s.mean_ell_opt = mean(ell_opt);
      s.std_ell_opt = stddev(ell_opt);
      s.mean_gamma_u = mean(gamma_u);
      s.fraction_improved = static_cast<double>(improved) / s.count;
    }
    // Correlations are left at 0 when undefined (fewer than two points or
    // constant data).
    try {
      if (s.count >= 2) s.spearman_flux_ell = spearman(flux_ratio, ell_ratio);
    } catch (const UndefinedCorrelation&) {
    }
    try {
      if (s.count > 0) s.spearman_gamma_mismatch = correlate_mismatch(records, alpha).spearman;
    } catch (const UndefinedCorrelation&) {
    }
    out.alphas.push_back(s);
  }
  return out;
}

void to_json(nlohmann::json& j, const AlphaSummary& s) {
  j = nlohmann::json{{"alpha", s.alpha},
                     {"count", s.count},
                     {"mean_flux_improvement", s.mean_flux_improvement},
                     {"std_flux_improvement", s.std_flux_improvement},
                     {"mean_ell_improvement", s.mean_ell_improvement},
                     {"std_ell_improvement", s.std_ell_improvement},
                     {"mean_eta_u", s.mean_eta_u},
                     {"std_eta_u", s.std_eta_u},
                     {"mean_eta_opt", s.mean_eta_opt},
                     {"std_eta_opt", s.std_eta_opt},
                     {"mean_ell_u", s.mean_ell_u},
                     {"std_ell_u", s.std_ell_u},
                     {"mean_ell_opt", s.mean_ell_opt},
                     {"std_ell_opt", s.std_ell_opt},
                     {"mean_gamma_u", s.mean_gamma_u},
                     {"fraction_improved", s.fraction_improved},
                     {"spearman_gamma_mismatch", s.spearman_gamma_mismatch},
                     {"spearman_flux_ell", s.spearman_flux_ell},
                     {"terminations",
                      {{"converged", s.converged}, {"boundary_hit", s.boundary_hit}, {"max_steps", s.max_steps}}}};
}

void to_json(nlohmann::json& j, const EnsembleSummary& s) {
  j = nlohmann::json{{"n_sites", s.n_sites}, {"n_records", s.n_records}, {"failures", s.failures}};
  j["alphas"] = nlohmann::json::array();
  for (const auto& a : s.alphas) j["alphas"].push_back(a);
}

void to_json(nlohmann::json& j, const BoxplotStats& s) {
  j = nlohmann::json{{"q1", s.q1},
                     {"median", s.median},
                     {"q3", s.q3},
                     {"whisker_low", s.whisker_low},
                     {"whisker_high", s.whisker_high},
                     {"outliers", s.outliers}};
}

}  // namespace enaqt
