#pragma once

// Grouping of dataset windows into network inputs. With one channel every
// window is its own sample; with C channels the C DOF windows of one record
// segment are stacked as frames of a single sample.

#include <algorithm>
#include <map>
#include <tuple>
#include <vector>

#include "nldd/dataset.hpp"
#include "nldd/nn/tensor.hpp"

namespace nldd {

struct SampleSet {
  nn::Batch inputs;
  /// members[i][c] is the window feeding channel c of sample i.
  std::vector<std::vector<const dataset::Window*>> members;

  std::size_t size() const noexcept { return inputs.size(); }
};

inline std::vector<const dataset::Window*> pointers(const std::vector<dataset::Window>& windows) {
  std::vector<const dataset::Window*> out;
  out.reserve(windows.size());
  for (const auto& w : windows) out.push_back(&w);
  return out;
}

inline SampleSet make_samples(const std::vector<const dataset::Window*>& windows, std::size_t channels) {
  if (channels == 0) throw ContractError("make_samples: channels must be >= 1");
  SampleSet s;
  if (channels == 1) {
    for (const auto* w : windows) {
      s.inputs.emplace_back(1, w->values.size(), w->values);
      s.members.push_back({w});
    }
    return s;
  }
  // Keep first-appearance order of (damage, source, segment) groups.
  std::map<std::tuple<double, std::uint32_t, std::uint32_t>, std::size_t> index;
  std::vector<std::vector<const dataset::Window*>> groups;
  for (const auto* w : windows) {
    const auto key = std::make_tuple(w->meta.damage, w->meta.source, w->meta.segment);
    auto [it, inserted] = index.emplace(key, groups.size());
    if (inserted) groups.emplace_back(channels, nullptr);
    if (w->meta.dof >= channels) throw ContractError("make_samples: window DOF exceeds channel count");
    auto& slot = groups[it->second][w->meta.dof];
    if (slot != nullptr) throw ContractError("make_samples: duplicate DOF window in one record segment");
    slot = w;
  }
  for (auto& g : groups) {
    const std::size_t len = g[0] ? g[0]->values.size() : 0;
    std::vector<double> values;
    values.reserve(channels * len);
    for (const auto* w : g) {
      if (w == nullptr || w->values.size() != len)
        throw ContractError("make_samples: record segment is missing a DOF window");
      values.insert(values.end(), w->values.begin(), w->values.end());
    }
    s.inputs.emplace_back(channels, len, std::move(values));
    s.members.push_back(std::move(g));
  }
  return s;
}

}  // namespace nldd
