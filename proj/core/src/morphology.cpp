#include "unistitch/morphology.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <vector>

#include "unistitch/error.hpp"

namespace unistitch {
namespace {

enum class Reduce { Any, All };

/// Sliding-window Any/All along one axis using prefix counts. `stride`
/// walks the window axis, `lines`/`line_stride` enumerate parallel lines.
void window_pass(std::span<const std::uint8_t> src, std::span<std::uint8_t> dst, int length,
                 int stride, int lines, int line_stride, int radius, Reduce reduce,
                 Border border) {
  std::vector<int> prefix(static_cast<std::size_t>(length) + 1);
  for (int line = 0; line < lines; ++line) {
    const std::size_t base = static_cast<std::size_t>(line) * line_stride;
    prefix[0] = 0;
    for (int i = 0; i < length; ++i) {
      prefix[i + 1] = prefix[i] + src[base + static_cast<std::size_t>(i) * stride];
    }
    for (int i = 0; i < length; ++i) {
      const int lo = std::max(0, i - radius);
      const int hi = std::min(length - 1, i + radius);
      const int count = prefix[hi + 1] - prefix[lo];
      bool v = false;
      if (reduce == Reduce::Any) {
        v = count > 0;
      } else if (border == Border::Zero) {
        v = count == 2 * radius + 1;
      } else {
        v = count == hi - lo + 1;
      }
      dst[base + static_cast<std::size_t>(i) * stride] = v ? 1 : 0;
    }
  }
}

BinaryMask square_filter(const BinaryMask& m, Kernel k, Reduce reduce, Border border) {
  const int w = m.width();
  const int h = m.height();
  if (w == 0 || h == 0 || k.radius() == 0) return m;
  BinaryMask tmp(w, h);
  BinaryMask out(w, h);
  window_pass(m.bits(), tmp.bits(), w, 1, h, w, k.radius(), reduce, border);
  window_pass(tmp.bits(), out.bits(), h, w, w, 1, k.radius(), reduce, border);
  return out;
}

struct Step {
  int dx;
  int dy;
  double cost;
};

}  // namespace

Kernel::Kernel(int size) : size_(size) {
  if (size < 1) fail(ErrorCode::InvalidArgument, "kernel size must be >= 1");
  if (size_ % 2 == 0) ++size_;
}

BinaryMask dilate(const BinaryMask& m, Kernel k) {
  return square_filter(m, k, Reduce::Any, Border::Zero);
}

BinaryMask erode(const BinaryMask& m, Kernel k, Border border) {
  return square_filter(m, k, Reduce::All, border);
}

ChamferMask chamfer_mask(Kernel k) {
  if (k.size() <= 3) return {0.955, 1.3693, 0.0};
  return {1.0, 1.4, 2.1969};
}

WeightMask distance_transform(const BinaryMask& m, Kernel k, Border border) {
  const int w = m.width();
  const int h = m.height();
  WeightMask out(w, h);
  if (w == 0 || h == 0) return out;
  if (border == Border::Neutral && m.popcount() == m.size()) border = Border::Zero;

  const ChamferMask cm = chamfer_mask(k);
  std::vector<Step> forward{{-1, -1, cm.diagonal}, {0, -1, cm.axial}, {1, -1, cm.diagonal},
                            {-1, 0, cm.axial}};
  if (cm.knight > 0.0) {
    forward.insert(forward.end(), {{-1, -2, cm.knight},
                                   {1, -2, cm.knight},
                                   {-2, -1, cm.knight},
                                   {2, -1, cm.knight}});
  }

  constexpr int pad = 2;
  constexpr double inf = std::numeric_limits<double>::max() / 4;
  const int pw = w + 2 * pad;
  const int ph = h + 2 * pad;
  const double frame = border == Border::Zero ? 0.0 : inf;
  std::vector<double> d(static_cast<std::size_t>(pw) * ph, frame);
  auto at = [&](int x, int y) -> double& {
    return d[static_cast<std::size_t>(y + pad) * pw + static_cast<std::size_t>(x + pad)];
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) at(x, y) = m.get(x, y) ? inf : 0.0;
  }

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double& v = at(x, y);
      if (v == 0.0) continue;
      for (const Step& s : forward) v = std::min(v, at(x + s.dx, y + s.dy) + s.cost);
    }
  }
  for (int y = h - 1; y >= 0; --y) {
    for (int x = w - 1; x >= 0; --x) {
      double& v = at(x, y);
      if (v == 0.0) continue;
      for (const Step& s : forward) v = std::min(v, at(x - s.dx, y - s.dy) + s.cost);
    }
  }

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double v = at(x, y);
      out.set(x, y, v >= inf ? 0.0 : v);
    }
  }
  return out;
}

}  // namespace unistitch
