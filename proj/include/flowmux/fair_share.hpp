#pragma once
// Max-min fair rate allocation by progressive filling: repeatedly saturate
// the most constrained link, freeze the flows that cross it, recurse on the
// residual capacity. The grouped form exploits that flows sharing a path get
// equal rates, so the fill cost scales with distinct paths rather than flows.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "flowmux/topology.hpp"

namespace flowmux {

class MaxMinFair {
 public:
  /// Per-flow max-min rates. paths[i] lists the links flow i crosses; every
  /// path must be non-empty and reference links < capacity.size().
  std::vector<double> rates(const std::vector<double>& capacity,
                            const std::vector<std::vector<LinkId>>& paths) {
    std::vector<std::int64_t> ones(paths.size(), 1);
    std::vector<double> out;
    group_rates(capacity, paths, ones, out);
    return out;
  }

  /// Grouped form: group g carries count[g] flows over a common path and the
  /// result is the per-flow rate of that group (0 for empty groups).
  void group_rates(const std::vector<double>& capacity,
                   const std::vector<std::vector<LinkId>>& group_paths,
                   const std::vector<std::int64_t>& group_count,
                   std::vector<double>& rate_out) {
    path_ptrs_.clear();
    for (const auto& p : group_paths) path_ptrs_.push_back(&p);
    group_rates_indexed(capacity, path_ptrs_, group_count, rate_out);
  }

  /// Same, taking path pointers so a caller with scattered storage avoids
  /// copying on the hot path.
  void group_rates_indexed(const std::vector<double>& capacity,
                           const std::vector<const std::vector<LinkId>*>& group_paths,
                           const std::vector<std::int64_t>& group_count,
                           std::vector<double>& rate_out) {
    const std::size_t nl = capacity.size();
    const std::size_t ng = group_paths.size();
    if (group_count.size() != ng)
      throw std::logic_error("group_rates: count/path size mismatch");

    rate_out.assign(ng, 0.0);
    residual_.assign(nl, 0.0);
    count_.assign(nl, 0);
    frozen_.assign(ng, 0);

    // link -> groups incidence (CSR)
    inc_head_.assign(nl + 1, 0);
    std::size_t total = 0;
    for (std::size_t g = 0; g < ng; ++g) {
      if (group_count[g] < 0) throw std::logic_error("group_rates: negative count");
      if (group_count[g] == 0) {
        frozen_[g] = 1;
        continue;
      }
      if (group_paths[g]->empty())
        throw std::logic_error("group_rates: flow with empty path");
      for (LinkId l : *group_paths[g]) {
        if (l >= nl) throw std::logic_error("group_rates: flow path references unknown link");
        ++inc_head_[l + 1];
      }
      total += group_paths[g]->size();
    }
    for (std::size_t l = 0; l < nl; ++l) inc_head_[l + 1] += inc_head_[l];
    inc_data_.assign(total, 0);
    fill_pos_.assign(inc_head_.begin(), inc_head_.end() - 1);
    std::size_t active_groups = 0;
    for (std::size_t g = 0; g < ng; ++g) {
      if (frozen_[g]) continue;
      ++active_groups;
      for (LinkId l : *group_paths[g]) {
        inc_data_[fill_pos_[l]++] = std::uint32_t(g);
        count_[l] += group_count[g];
      }
    }
    for (std::size_t l = 0; l < nl; ++l) residual_[l] = capacity[l];

    while (active_groups > 0) {
      // most constrained link: smallest residual/count, lowest id on ties
      std::size_t best = nl;
      double best_share = 0.0;
      for (std::size_t l = 0; l < nl; ++l) {
        if (count_[l] == 0) continue;
        double share = residual_[l] / double(count_[l]);
        if (best == nl || share < best_share) {
          best = l;
          best_share = share;
        }
      }
      if (best == nl) throw std::logic_error("group_rates: active flow crosses no counted link");
      if (best_share < 0.0) best_share = 0.0;

      for (std::size_t k = inc_head_[best]; k < inc_head_[best + 1]; ++k) {
        std::uint32_t g = inc_data_[k];
        if (frozen_[g]) continue;
        frozen_[g] = 1;
        --active_groups;
        rate_out[g] = best_share;
        double agg = best_share * double(group_count[g]);
        for (LinkId l : *group_paths[g]) {
          residual_[l] -= agg;
          if (residual_[l] < 0.0) residual_[l] = 0.0;
          count_[l] -= group_count[g];
        }
      }
      residual_[best] = 0.0;
      count_[best] = 0;
    }
  }

 private:
  std::vector<double> residual_;
  std::vector<std::int64_t> count_;
  std::vector<char> frozen_;
  std::vector<std::size_t> inc_head_;
  std::vector<std::size_t> fill_pos_;
  std::vector<std::uint32_t> inc_data_;
  std::vector<const std::vector<LinkId>*> path_ptrs_;
};

}  // namespace flowmux
