#pragma once
// KPI computations over run results: received-data gain, the two flow
// reduction indicators (peak in-run and cross-mechanism), and Student-t
// confidence intervals across replications.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "flowmux/engine.hpp"

namespace flowmux {

/// Received-data gain relative to the baseline, in percent.
inline double rx_gain_pct(double rx, double rx_baseline) {
  if (!(rx_baseline > 0.0)) throw std::invalid_argument("rx_gain: baseline Rx must be positive");
  return (rx - rx_baseline) / rx_baseline * 100.0;
}

/// Peak flow reduction over the sampled run: max over samples of
/// [1 - avg(labels per P node) / total flows] * 100. Zero-flow samples are
/// skipped; all-zero input is an error.
inline double max_flow_reduction_pct(const std::vector<SecondSample>& samples) {
  bool any = false;
  double best = 0.0;
  for (const SecondSample& s : samples) {
    if (s.active_flows <= 0) continue;
    double fri = (1.0 - s.avg_labels_p / double(s.active_flows)) * 100.0;
    if (!any || fri > best) best = fri;
    any = true;
  }
  if (!any) throw std::invalid_argument("max_flow_reduction: no sample with flows");
  return best;
}

/// Cross-mechanism flow reduction: [1 - avg labels per P / avg baseline
/// entries per P] * 100, both per-second averages.
inline double comparative_flow_reduction_pct(double avg_labels_p, double avg_flows_baseline_p) {
  if (!(avg_flows_baseline_p > 0.0))
    throw std::invalid_argument("comparative_flow_reduction: baseline average must be positive");
  return (1.0 - avg_labels_p / avg_flows_baseline_p) * 100.0;
}

namespace detail {

// regularized incomplete beta via Lentz's continued fraction
inline double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16, kFpMin = 1e-300;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0, d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

inline double betainc(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double lnbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  double front = std::exp(a * std::log(x) + b * std::log(1.0 - x) - lnbeta);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

}  // namespace detail

/// P(T <= t) for Student's t with dof degrees of freedom.
inline double student_t_cdf(double t, int dof) {
  if (dof < 1) throw std::invalid_argument("student_t_cdf: dof must be >= 1");
  double v = double(dof);
  double x = v / (v + t * t);
  double tail = 0.5 * detail::betainc(v / 2.0, 0.5, x);
  return t >= 0.0 ? 1.0 - tail : tail;
}

/// Upper quantile by bisection; p in (0.5, 1).
inline double student_t_quantile(double p, int dof) {
  if (!(p > 0.5 && p < 1.0)) throw std::invalid_argument("student_t_quantile: p in (0.5, 1)");
  double lo = 0.0, hi = 1.0;
  while (student_t_cdf(hi, dof) < p) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (student_t_cdf(mid, dof) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct MeanCi {
  double mean = 0.0;
  double half_width = 0.0;
};

/// Student-t interval: mean +- t_{(1+level)/2, n-1} * s / sqrt(n).
inline MeanCi confidence_interval(const std::vector<double>& samples, double level = 0.95) {
  const std::size_t n = samples.size();
  if (n < 2) throw std::invalid_argument("confidence_interval: need at least 2 samples");
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= double(n);
  double ss = 0.0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  double s = std::sqrt(ss / double(n - 1));
  double t = student_t_quantile(0.5 + level / 2.0, int(n) - 1);
  return {mean, t * s / std::sqrt(double(n))};
}

/// Fills the per-run KPI scalars that depend on the sample series.
inline void finalize_run_kpis(RunResult& r) {
  bool any_flows = false;
  for (const SecondSample& s : r.series)
    if (s.active_flows > 0) any_flows = true;
  r.max_fri_pct = any_flows ? max_flow_reduction_pct(r.series) : 0.0;
}

/// Aggregated KPIs for one scenario cell (one threshold pair, many seeds).
struct KpiReport {
  double cong_th = 0.0, warn_th = 0.0;
  std::string mode;
  int runs = 0;
  MeanCi tx_gb, rx_gb, avg_tput_mbps;
  MeanCi sum_dft, avg_labels, max_labels;
  MeanCi max_fri_pct;
  MeanCi openflow_msgs_per_s;
  MeanCi packet_in_per_s;
  double ctrl_msgs_per_s_worst = 0.0;
};

inline KpiReport aggregate_runs(const std::vector<RunResult>& runs) {
  if (runs.empty()) throw std::invalid_argument("aggregate_runs: no runs");
  KpiReport rep;
  rep.cong_th = runs.front().cong_th;
  rep.warn_th = runs.front().warn_th;
  rep.mode = runs.front().mode;
  rep.runs = int(runs.size());

  auto ci = [&](auto&& get) {
    std::vector<double> v;
    v.reserve(runs.size());
    for (const RunResult& r : runs) v.push_back(get(r));
    if (v.size() < 2) return MeanCi{v.front(), 0.0};
    return confidence_interval(v);
  };
  rep.tx_gb = ci([](const RunResult& r) { return r.tx_bytes / 1e9; });
  rep.rx_gb = ci([](const RunResult& r) { return r.rx_bytes / 1e9; });
  rep.avg_tput_mbps = ci([](const RunResult& r) { return r.avg_tput_mbps; });
  rep.sum_dft = ci([](const RunResult& r) { return r.sum_dft_mean; });
  rep.avg_labels = ci([](const RunResult& r) { return r.avg_labels_mean; });
  rep.max_labels = ci([](const RunResult& r) { return r.max_labels_peak; });
  rep.max_fri_pct = ci([](const RunResult& r) { return r.max_fri_pct; });
  rep.openflow_msgs_per_s = ci([](const RunResult& r) { return r.openflow_msgs_per_s_avg; });
  rep.packet_in_per_s = ci([](const RunResult& r) { return r.packet_in_per_s_avg; });
  for (const RunResult& r : runs)
    rep.ctrl_msgs_per_s_worst = std::max(rep.ctrl_msgs_per_s_worst, r.ctrl_msgs_per_s_max);
  return rep;
}

}  // namespace flowmux
