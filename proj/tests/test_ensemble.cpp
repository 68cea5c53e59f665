#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "enaqt/ensemble.hpp"
#include "enaqt/errors.hpp"

using namespace enaqt;

namespace {

// Average rank by counting: (#smaller) + (#equal + 1) / 2.
std::vector<double> counted_ranks(const std::vector<double>& v) {
  std::vector<double> r;
  for (double a : v) {
    int less = 0, equal = 0;
    for (double b : v) {
      less += b < a;
      equal += b == a;
    }
    r.push_back(less + (equal + 1) / 2.0);
  }
  return r;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i] / n, my += y[i] / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

EnsembleConfig small_config() {
  EnsembleConfig c;
  c.n_realizations = 4;
  c.n_sites = 5;
  c.alphas = {1.0, 5.0};
  c.optimizer.max_steps = 400;
  c.scan_grid = log_grid(1e-3, 1.0, 31);
  return c;
}

}  // namespace

TEST_CASE("spearman basics") {
  CHECK(spearman(std::vector<double>{1, 2, 3}, std::vector<double>{10, 20, 30}) == doctest::Approx(1.0));
  CHECK(spearman(std::vector<double>{1, 2, 3}, std::vector<double>{3, 2, 1}) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(spearman(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}), InvalidArgument);
  CHECK_THROWS_AS(spearman(std::vector<double>{1}, std::vector<double>{1}), InvalidArgument);
  CHECK_THROWS_AS(spearman(std::vector<double>{2, 2, 2}, std::vector<double>{1, 2, 3}), UndefinedCorrelation);
  CHECK(average_ranks(std::vector<double>{5, 1, 5, 3}) == std::vector<double>{3.5, 1, 3.5, 2});
}

TEST_CASE("spearman matches brute-force ranks on tied data") {
  std::mt19937_64 rng(11);
  int checked = 0;
  for (int k = 0; k < 2000; ++k) {
    const int n = 2 + k % 7;
    std::uniform_int_distribution<int> level(0, 1 + k % 4);
    std::vector<double> x(n), y(n);
    for (int i = 0; i < n; ++i) x[i] = level(rng), y[i] = level(rng);
    const auto rx = counted_ranks(x), ry = counted_ranks(y);
    CHECK(average_ranks(x) == rx);
    if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; }) ||
        std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; })) {
      CHECK_THROWS_AS(spearman(x, y), UndefinedCorrelation);
      continue;
    }
    const double r = spearman(x, y);
    CHECK(r == doctest::Approx(pearson(rx, ry)).epsilon(1e-12));
    CHECK((r >= -1.0 && r <= 1.0));
    ++checked;
  }
  CHECK(checked > 1000);
}

TEST_CASE("boxplot statistics") {
  const auto s = boxplot_stats(std::vector<double>{1, 2, 3, 4, 5});
  CHECK(s.median == 3);
  CHECK(s.q1 == 2);
  CHECK(s.q3 == 4);
  CHECK(s.outliers.empty());
  CHECK(s.whisker_low == 1);
  CHECK(s.whisker_high == 5);

  const auto o = boxplot_stats(std::vector<double>{1, 2, 3, 4, 100});
  REQUIRE(o.outliers.size() == 1);
  CHECK(o.outliers[0] == 100);
  CHECK(o.whisker_high == 4);

  const auto one = boxplot_stats(std::vector<double>{2.5});
  CHECK(one.q1 == 2.5);
  CHECK(one.median == 2.5);
  CHECK(one.q3 == 2.5);
  CHECK(one.whisker_low == 2.5);
  CHECK(one.whisker_high == 2.5);
  CHECK(one.outliers.empty());
  CHECK_THROWS_AS(boxplot_stats(std::vector<double>{}), InvalidArgument);

  const std::vector<double> sorted{1, 2, 4, 8};
  CHECK(quantile_sorted(sorted, 0.5) == 3.0);
  CHECK(quantile_sorted(sorted, 0.25) == 1.75);
}

TEST_CASE("histogram") {
  const auto h = histogram(std::vector<double>{-1, 0, 0.1, 0.24, 0.25, 1.0, 1.5}, 0.0, 1.0, 0.25);
  CHECK(h.counts == std::vector<int>{3, 1, 0, 1});
  CHECK(h.below == 1);
  CHECK(h.above == 1);
  CHECK_THROWS_AS(histogram(std::vector<double>{}, 1.0, 0.0, 0.1), InvalidArgument);
}

TEST_CASE("binned boxplots") {
  const std::vector<double> x{0.1, 0.2, 0.6, 0.7, 0.8, 3.0};
  const std::vector<double> y{1, 2, 3, 4, 5, 6};
  const auto bins = binned_boxplots(x, y, 0.0, 1.0, 0.5);
  REQUIRE(bins.size() == 2);
  CHECK(bins[0].count == 2);
  CHECK(bins[0].stats->median == 1.5);
  CHECK(bins[1].count == 3);
  CHECK(bins[1].stats->median == 4);
  const auto sparse = binned_boxplots(x, y, 0.0, 2.0, 0.5);
  CHECK(!sparse[3].stats.has_value());
}

TEST_CASE("mean and population standard deviation") {
  const std::vector<double> v{1, 2, 3, 4};
  CHECK(mean(v) == 2.5);
  CHECK(stddev(v) == doctest::Approx(std::sqrt(1.25)));
}

TEST_CASE("ensemble runs are deterministic and complete") {
  auto cfg = small_config();
  cfg.n_realizations = 2;
  const auto a = run_ensemble(cfg);
  cfg.threads = 1;
  const auto b = run_ensemble(cfg);
  REQUIRE(a.size() == 2);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(nlohmann::json(a[i]).dump() == nlohmann::json(b[i]).dump());
    CHECK(!a[i].error);
    CHECK(a[i].seed == derive_seed(cfg.master_seed, i));
    CHECK(a[i].energies == sample_disorder(cfg.n_sites, a[i].seed));
    REQUIRE(a[i].blocks.size() == 2);
    for (const auto& blk : a[i].blocks) {
      CHECK(blk.eta_opt >= blk.eta_u);
      CHECK(blk.gammas_opt.size() == 5);
    }
  }
  CHECK(nlohmann::json(run_realization(cfg, 1)).dump() == nlohmann::json(a[1]).dump());
}

TEST_CASE("record json round trip") {
  auto cfg = small_config();
  const auto r = run_realization(cfg, 3);
  const nlohmann::json j = r;
  const auto back = nlohmann::json::parse(j.dump()).get<RealizationRecord>();
  CHECK(nlohmann::json(back).dump() == j.dump());
  RealizationRecord failed;
  failed.error = "boom";
  CHECK(nlohmann::json(failed).get<RealizationRecord>().error == std::optional<std::string>("boom"));
  auto bad = j;
  bad["schema"] = "other";
  CHECK_THROWS_AS(bad.get<RealizationRecord>(), InvalidArgument);
}

TEST_CASE("summary is order independent and counts failures") {
  const auto cfg = small_config();
  auto records = run_ensemble(cfg);
  const auto s = summarize(records, cfg.alphas);
  CHECK(s.n_records == 4);
  CHECK(s.failures == 0);
  CHECK(s.n_sites == 5);
  for (const auto& a : s.alphas) {
    CHECK(a.count == 4);
    CHECK(a.fraction_improved == 1.0);
    CHECK(a.mean_flux_improvement >= 0.0);
    CHECK(a.converged + a.boundary_hit + a.max_steps == 4);
  }
  std::reverse(records.begin(), records.end());
  std::swap(records[1], records[2]);
  RealizationRecord failed;
  failed.index = 99;
  failed.error = "injected";
  records.push_back(failed);
  const auto t = summarize(records, cfg.alphas);
  CHECK(t.failures == 1);
  CHECK(nlohmann::json(t.alphas).dump() == nlohmann::json(s.alphas).dump());
}

TEST_CASE("mismatch correlation pools inner sites") {
  const auto cfg = small_config();
  const auto records = run_ensemble(cfg);
  const auto mc = correlate_mismatch(records, 5.0);
  CHECK(mc.mismatch.size() == 4 * 3);
  CHECK(mc.gammas.size() == mc.mismatch.size());
  CHECK(mc.bins.size() == 8);
  CHECK(mc.bins.front().lo == 0.0);
  CHECK(mc.bins.back().hi == doctest::Approx(2.0));
  CHECK((mc.spearman >= -1.0 && mc.spearman <= 1.0));
  CHECK_THROWS_AS(correlate_mismatch(std::vector<RealizationRecord>{}, 5.0), InvalidArgument);
}

TEST_CASE("ensemble config validation") {
  auto cfg = small_config();
  cfg.n_realizations = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = small_config();
  cfg.alphas.clear();
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = small_config();
  cfg.scan_grid.clear();
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}
