#include "patchfuse/postprocess.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "patchfuse/components.hpp"

namespace patchfuse {

LabelMap remove_small(const LabelMap& m, int min_size) {
  const ComponentSet cs = label_components(m);
  LabelMap out = m;
  for (const Component& c : cs.components) {
    if (int(c.pixels.size()) < min_size) {
      for (const std::int32_t p : c.pixels) out[std::size_t(p)] = 0;
    }
  }
  return out;
}

LabelMap fill_holes(const LabelMap& m) {
  const int w = m.width(), h = m.height();
  LabelMap out = m;

  // flood the 4-connected background regions
  std::vector<std::int32_t> region(m.size(), -1);
  std::vector<std::int32_t> stack;
  std::int32_t n_regions = 0;
  std::vector<std::uint8_t> touches_border;
  std::vector<std::vector<std::int32_t>> region_pixels;

  for (std::size_t start = 0; start < m.size(); ++start) {
    if (m[start] != 0 || region[start] >= 0) continue;
    const std::int32_t rid = n_regions++;
    touches_border.push_back(0);
    region_pixels.emplace_back();
    region[start] = rid;
    stack.push_back(std::int32_t(start));
    while (!stack.empty()) {
      const std::int32_t p = stack.back();
      stack.pop_back();
      region_pixels[std::size_t(rid)].push_back(p);
      const int x = int(p % w), y = int(p / w);
      if (x == 0 || y == 0 || x == w - 1 || y == h - 1) touches_border[std::size_t(rid)] = 1;
      const int dx[4] = {1, -1, 0, 0};
      const int dy[4] = {0, 0, 1, -1};
      for (int d = 0; d < 4; ++d) {
        const int nx = x + dx[d], ny = y + dy[d];
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const std::size_t q = pixel_index(nx, ny, w);
        if (m[q] == 0 && region[q] < 0) {
          region[q] = rid;
          stack.push_back(std::int32_t(q));
        }
      }
    }
  }

  for (std::int32_t rid = 0; rid < n_regions; ++rid) {
    if (touches_border[std::size_t(rid)]) continue;
    // collect the labels 8-adjacent to the region
    int surround = -1;  // -1 none, -2 mixed
    for (const std::int32_t p : region_pixels[std::size_t(rid)]) {
      const int x = int(p % w), y = int(p / w);
      for (int dy = -1; dy <= 1 && surround != -2; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const int nx = x + dx, ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const Label l = m.at(nx, ny);
          if (l == 0) continue;
          if (surround == -1) {
            surround = int(l);
          } else if (surround != int(l)) {
            surround = -2;
            break;
          }
        }
      }
      if (surround == -2) break;
    }
    if (surround > 0) {
      for (const std::int32_t p : region_pixels[std::size_t(rid)]) {
        out[std::size_t(p)] = Label(surround);
      }
    }
  }
  return out;
}

LabelMap relabel_reorder(const LabelMap& m, int n_max) {
  ComponentSet cs = label_components(m);
  std::vector<int> idx(cs.components.size());
  std::iota(idx.begin(), idx.end(), 0);
  auto key = [&](int i) {
    const Component& c = cs.components[std::size_t(i)];
    const double center_row = double(c.bbox.y0) + 0.5 * double(c.bbox.h - 1);
    const double center_col = double(c.bbox.x0) + 0.5 * double(c.bbox.w - 1);
    return std::tuple<double, double, int>(-center_row, center_col, c.id);
  };
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return key(a) < key(b); });

  LabelMap out(m.width(), m.height());
  for (std::size_t rank = 0; rank < idx.size(); ++rank) {
    const int label = std::min(int(rank) + 1, n_max);
    for (const std::int32_t p : cs.components[std::size_t(idx[rank])].pixels) {
      out[std::size_t(p)] = Label(label);
    }
  }
  return out;
}

LabelMap postprocess(const LabelMap& m, int min_size, int n_max) {
  return relabel_reorder(fill_holes(remove_small(m, min_size)), n_max);
}

}  // namespace patchfuse
