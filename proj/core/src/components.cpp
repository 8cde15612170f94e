#include "patchfuse/components.hpp"

#include <algorithm>
#include <iostream>
#include <numeric>

namespace patchfuse {

namespace {

struct DisjointSet {
  std::vector<std::int32_t> parent;

  explicit DisjointSet(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  std::int32_t find(std::int32_t x) {
    while (parent[std::size_t(x)] != x) {
      parent[std::size_t(x)] = parent[std::size_t(parent[std::size_t(x)])];
      x = parent[std::size_t(x)];
    }
    return x;
  }
  void unite(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::size_t(std::max(a, b))] = std::min(a, b);
  }
};

}  // namespace

ComponentSet label_components(const LabelMap& m) {
  const int w = m.width(), h = m.height();
  ComponentSet cs;
  cs.width = w;
  cs.height = h;
  cs.pixel_to_component.assign(m.size(), -1);

  DisjointSet ds(m.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::int32_t p = std::int32_t(pixel_index(x, y, w));
      if (m[std::size_t(p)] == 0) continue;
      if (x > 0 && m.at(x - 1, y) == m[std::size_t(p)]) ds.unite(p, p - 1);
      if (y > 0 && m.at(x, y - 1) == m[std::size_t(p)]) ds.unite(p, p - w);
    }
  }

  std::vector<std::int32_t> root_to_comp(m.size(), -1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::int32_t p = std::int32_t(pixel_index(x, y, w));
      if (m[std::size_t(p)] == 0) continue;
      const std::int32_t root = ds.find(p);
      std::int32_t cid = root_to_comp[std::size_t(root)];
      if (cid < 0) {
        cid = std::int32_t(cs.components.size());
        root_to_comp[std::size_t(root)] = cid;
        Component c;
        c.id = cid;
        c.bbox = Rect{x, y, 1, 1};
        cs.components.push_back(std::move(c));
      }
      Component& c = cs.components[std::size_t(cid)];
      c.pixels.push_back(p);
      const int bx1 = std::max(c.bbox.x1(), x + 1);
      const int by1 = std::max(c.bbox.y1(), y + 1);
      c.bbox.x0 = std::min(c.bbox.x0, x);
      c.bbox.y0 = std::min(c.bbox.y0, y);
      c.bbox.w = bx1 - c.bbox.x0;
      c.bbox.h = by1 - c.bbox.y0;
      cs.pixel_to_component[std::size_t(p)] = cid;
    }
  }
  return cs;
}

ComponentSet order_components(ComponentSet cs, int n_max) {
  std::vector<int> idx(cs.components.size());
  std::iota(idx.begin(), idx.end(), 0);
  auto key = [&](int i) {
    const Component& c = cs.components[std::size_t(i)];
    const double bottom = double(c.bbox.y1() - 1);
    const double center_col = double(c.bbox.x0) + 0.5 * double(c.bbox.w - 1);
    return std::tuple<double, double, int>(-bottom, center_col, c.id);
  };
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return key(a) < key(b); });

  bool clamped = false;
  for (std::size_t rank = 0; rank < idx.size(); ++rank) {
    int order = int(rank) + 1;
    if (order > n_max) {
      order = n_max;
      clamped = true;
    }
    cs.components[std::size_t(idx[rank])].order = order;
  }
  if (clamped) {
    std::cerr << "patchfuse: " << cs.components.size() << " components exceed n_max="
              << n_max << "; farthest orders clamped\n";
  }
  return cs;
}

}  // namespace patchfuse
