#pragma once
// Seeded TCP flow arrival generation: exponential inter-arrival times,
// Pareto flow sizes, uniform ordered (src, dst) PE pairs. Sampling uses
// mt19937_64 plus explicit inverse-CDF transforms so a given seed yields
// the same stream on any conforming platform. Replication i of a base seed
// draws from mix_seed(seed, i), which keeps streams independent of the
// threshold pair under test.

#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "flowmux/dataplane.hpp"
#include "flowmux/topology.hpp"

namespace flowmux {

struct TrafficConfig {
  double pareto_shape = 1.5;
  double mean_size_bytes = 500e3;
  double mean_interarrival_s = 3e-3;
  double sim_time_s = 100.0;
  double warmup_s = 10.0;
  std::uint64_t seed = 1;

  void validate() const {
    if (!(pareto_shape > 1.0))
      throw std::invalid_argument("pareto_shape must exceed 1 (finite mean)");
    if (!(mean_size_bytes > 0.0) || !(mean_interarrival_s > 0.0))
      throw std::invalid_argument("mean size and inter-arrival must be positive");
    if (!(warmup_s >= 0.0) || !(warmup_s < sim_time_s))
      throw std::invalid_argument("warmup must lie within the simulation time");
  }
};

struct FlowArrival {
  double time = 0.0;
  FiveTuple tuple;
  double size_bytes = 0.0;
  NodeId src_pe = kNoNode;
  NodeId dst_pe = kNoNode;
};

/// Pareto scale parameter from the mean: mean = scale * shape / (shape - 1).
inline double pareto_scale(double shape, double mean) {
  return mean * (shape - 1.0) / shape;
}

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Derived seed for replication i; streams for different i are independent.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t replication) {
  return splitmix64(seed ^ splitmix64(replication + 1));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() { return double(gen_() >> 11) * 0x1.0p-53; }

  double exponential(double mean) { return -mean * std::log1p(-uniform01()); }

  double pareto(double scale, double shape) {
    return scale * std::pow(1.0 - uniform01(), -1.0 / shape);
  }

  /// Uniform integer in [0, n) without modulo bias.
  std::uint64_t below(std::uint64_t n) {
    return std::uint64_t((unsigned __int128)(gen_()) * n >> 64);
  }

 private:
  std::mt19937_64 gen_;
};

inline std::vector<FlowArrival> generate_arrivals(const TrafficConfig& cfg,
                                                  const std::vector<NodeId>& pes) {
  cfg.validate();
  if (pes.size() < 2)
    throw std::invalid_argument("traffic generation needs at least 2 PE nodes");

  Rng rng(cfg.seed);
  const double scale = pareto_scale(cfg.pareto_shape, cfg.mean_size_bytes);
  const std::uint64_t npairs = std::uint64_t(pes.size()) * (pes.size() - 1);

  std::vector<FlowArrival> out;
  out.reserve(std::size_t(cfg.sim_time_s / cfg.mean_interarrival_s * 1.1) + 16);
  double t = 0.0;
  std::uint32_t flow_index = 0;
  for (;;) {
    t += std::max(rng.exponential(cfg.mean_interarrival_s), 1e-12);
    if (t >= cfg.sim_time_s) break;
    std::uint64_t pair = rng.below(npairs);
    std::uint64_t src_idx = pair / (pes.size() - 1);
    std::uint64_t dst_idx = pair % (pes.size() - 1);
    if (dst_idx >= src_idx) ++dst_idx;  // skip the diagonal
    NodeId src = pes[src_idx];
    NodeId dst = pes[dst_idx];
    double size = rng.pareto(scale, cfg.pareto_shape);

    FlowArrival a;
    a.time = t;
    a.size_bytes = size;
    a.src_pe = src;
    a.dst_pe = dst;
    a.tuple.src_addr = make_addr(src, 0x100 + flow_index / 60000);
    a.tuple.dst_addr = make_addr(dst, 1);
    a.tuple.src_port = std::uint16_t(1024 + flow_index % 60000);
    a.tuple.dst_port = 80;
    a.tuple.proto = 6;
    out.push_back(a);
    ++flow_index;
  }
  return out;
}

// --- arrival stream CSV (cross-implementation comparison aid) -------------

inline void write_arrivals_csv(std::ostream& os, const std::vector<FlowArrival>& arrivals) {
  os << "time,src_pe,dst_pe,size_bytes,src_addr,dst_addr,src_port,dst_port,proto\n";
  char buf[192];
  for (const FlowArrival& a : arrivals) {
    std::snprintf(buf, sizeof buf, "%.17g,%u,%u,%.17g,%u,%u,%u,%u,%u\n", a.time, a.src_pe,
                  a.dst_pe, a.size_bytes, a.tuple.src_addr, a.tuple.dst_addr, a.tuple.src_port,
                  a.tuple.dst_port, a.tuple.proto);
    os << buf;
  }
}

inline std::vector<FlowArrival> read_arrivals_csv(std::istream& is) {
  std::vector<FlowArrival> out;
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("arrival csv: empty input");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    FlowArrival a;
    unsigned src, dst, sa, da, sp, dp, proto;
    if (std::sscanf(line.c_str(), "%lg,%u,%u,%lg,%u,%u,%u,%u,%u", &a.time, &src, &dst,
                    &a.size_bytes, &sa, &da, &sp, &dp, &proto) != 9)
      throw std::runtime_error("arrival csv: bad row: " + line);
    a.src_pe = src;
    a.dst_pe = dst;
    a.tuple = {sa, da, std::uint16_t(sp), std::uint16_t(dp), std::uint8_t(proto)};
    out.push_back(a);
  }
  return out;
}

}  // namespace flowmux
