#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace nldd {

/// One convolution stage of a preset: kernel, filter count, stride.
struct Stage {
  std::size_t kernel = 1;
  std::size_t filters = 1;
  std::size_t stride = 1;
  bool operator==(const Stage&) const = default;
};

/// Calls fail(message) for the first stage with a zero field.
template <class Fail>
void check_stages(const std::vector<Stage>& stages, const std::string& what, Fail&& fail) {
  for (std::size_t i = 0; i < stages.size(); ++i)
    if (stages[i].kernel == 0 || stages[i].filters == 0 || stages[i].stride == 0)
      fail(what + " layer " + std::to_string(i) + ": kernel, filters and stride must be >= 1");
}

}  // namespace nldd
