#include "patchfuse/grid.hpp"

#include <cmath>
#include <string>

namespace patchfuse {

ValidationReport validate_label_map(const LabelMap& m, int n_max) {
  if (m.width() <= 0 || m.height() <= 0) {
    return {false, "empty label map"};
  }
  if (m.size() != std::size_t(m.width()) * std::size_t(m.height())) {
    return {false, "label array length does not equal width*height"};
  }
  for (std::size_t p = 0; p < m.size(); ++p) {
    if (int(m[p]) > n_max) {
      return {false, "label " + std::to_string(int(m[p])) + " > " + std::to_string(n_max) +
                         " at pixel " + std::to_string(p)};
    }
  }
  return {};
}

ValidationReport validate_prob_tensor(const ProbTensor& t, float sum_tol) {
  if (t.empty()) return {false, "empty tensor"};
  if (t.n_labels() < 2) return {false, "n_labels < 2"};
  for (std::size_t p = 0; p < t.n_pixels(); ++p) {
    double sum = 0.0;
    for (float v : t.pixel(p)) {
      if (!(v >= 0.0f)) {
        return {false, "negative or NaN probability at pixel " + std::to_string(p)};
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > double(sum_tol)) {
      return {false, "pixel " + std::to_string(p) + " sums to " + std::to_string(sum)};
    }
  }
  return {};
}

LabelMap argmax_map(const ProbTensor& t) {
  LabelMap out(t.width(), t.height());
  for (std::size_t p = 0; p < t.n_pixels(); ++p) {
    const auto probs = t.pixel(p);
    int best = 0;
    for (int l = 1; l < t.n_labels(); ++l) {
      if (probs[std::size_t(l)] > probs[std::size_t(best)]) best = l;
    }
    out[p] = Label(best);
  }
  return out;
}

}  // namespace patchfuse
