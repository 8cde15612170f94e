#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "patchfuse/error.hpp"

namespace patchfuse {

// Instance label of one pixel. 0 is background; foreground labels encode the
// depth rank, smaller = closer to the camera.
using Label = std::uint8_t;

constexpr int kDefaultNMax = 9;

// Pixel index convention everywhere: p = y * width + x, row-major.
inline std::size_t pixel_index(int x, int y, int width) {
  return std::size_t(y) * std::size_t(width) + std::size_t(x);
}

struct Rect {
  int x0 = 0;
  int y0 = 0;
  int w = 0;
  int h = 0;

  int x1() const { return x0 + w; }  // exclusive
  int y1() const { return y0 + h; }  // exclusive
  long long area() const { return (long long)w * h; }

  bool contains(int x, int y) const {
    return x >= x0 && x < x1() && y >= y0 && y < y1();
  }
  bool inside_image(int image_w, int image_h) const {
    return x0 >= 0 && y0 >= 0 && w > 0 && h > 0 && x1() <= image_w && y1() <= image_h;
  }
  bool operator==(const Rect&) const = default;
};

// Depth-ordered instance labeling of a pixel grid.
class LabelMap {
 public:
  LabelMap() = default;
  LabelMap(int width, int height, Label fill = 0)
      : width_(width), height_(height),
        labels_(std::size_t(width) * std::size_t(height), fill) {
    if (width <= 0 || height <= 0) throw DimensionError("LabelMap dimensions must be positive");
  }
  LabelMap(int width, int height, std::vector<Label> labels)
      : width_(width), height_(height), labels_(std::move(labels)) {
    if (width <= 0 || height <= 0) throw DimensionError("LabelMap dimensions must be positive");
    if (labels_.size() != std::size_t(width) * std::size_t(height)) {
      throw DimensionError("LabelMap payload size does not match width*height");
    }
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }

  Label at(int x, int y) const { return labels_[pixel_index(x, y, width_)]; }
  Label& at(int x, int y) { return labels_[pixel_index(x, y, width_)]; }
  Label operator[](std::size_t p) const { return labels_[p]; }
  Label& operator[](std::size_t p) { return labels_[p]; }

  const std::vector<Label>& labels() const { return labels_; }

  bool same_dims(const LabelMap& o) const {
    return width_ == o.width_ && height_ == o.height_;
  }
  bool operator==(const LabelMap&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<Label> labels_;
};

struct ValidationReport {
  bool ok = true;
  std::string violation;  // first violated invariant; empty when ok
};

ValidationReport validate_label_map(const LabelMap& m, int n_max);

// Per-pixel distribution over n_labels states; pixel-major storage, i.e. the
// simplex vector of pixel p occupies probs[p*n_labels .. p*n_labels+n_labels).
class ProbTensor {
 public:
  ProbTensor() = default;
  ProbTensor(int width, int height, int n_labels)
      : width_(width), height_(height), n_labels_(n_labels),
        probs_(std::size_t(width) * std::size_t(height) * std::size_t(n_labels), 0.0f) {
    if (width <= 0 || height <= 0) throw DimensionError("ProbTensor dimensions must be positive");
    if (n_labels < 2) throw DimensionError("ProbTensor needs at least 2 labels");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  int n_labels() const { return n_labels_; }
  std::size_t n_pixels() const { return std::size_t(width_) * std::size_t(height_); }
  bool empty() const { return probs_.empty(); }

  float at(int x, int y, int label) const {
    return probs_[pixel_index(x, y, width_) * n_labels_ + label];
  }
  float& at(int x, int y, int label) {
    return probs_[pixel_index(x, y, width_) * n_labels_ + label];
  }
  std::span<const float> pixel(std::size_t p) const {
    return {probs_.data() + p * n_labels_, std::size_t(n_labels_)};
  }
  std::span<float> pixel(std::size_t p) {
    return {probs_.data() + p * n_labels_, std::size_t(n_labels_)};
  }

  const std::vector<float>& data() const { return probs_; }
  std::vector<float>& data() { return probs_; }

 private:
  int width_ = 0;
  int height_ = 0;
  int n_labels_ = 0;
  std::vector<float> probs_;
};

ValidationReport validate_prob_tensor(const ProbTensor& t, float sum_tol = 1e-6f);

// Per-pixel argmax; ties break toward the smaller label index.
LabelMap argmax_map(const ProbTensor& p);

}  // namespace patchfuse
