#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <queue>
#include <utility>
#include <vector>

#include "unistitch/error.hpp"
#include "unistitch/morphology.hpp"

// Fast-marching inpainting: hole pixels are visited in increasing arrival
// time of a unit-speed front started on the hole boundary. Each visited
// pixel becomes the weighted average of already-known pixels inside a disk
// of the given radius, weighted by direction (alignment with the front
// normal), geometric distance and level-set distance.

namespace unistitch {
namespace {

enum Flag : std::uint8_t { kKnown = 0, kBand = 1, kInside = 2 };

constexpr double kFar = 1.0e6;

class Marcher {
 public:
  Marcher(const ImageBuffer& img, const BinaryMask& hole, int radius)
      : out_(img),
        w_(img.width()),
        h_(img.height()),
        radius_(radius),
        flag_(static_cast<std::size_t>(w_) * h_, kKnown),
        time_(static_cast<std::size_t>(w_) * h_, 0.0) {
    for (int y = 0; y < h_; ++y) {
      for (int x = 0; x < w_; ++x) {
        if (hole.get(x, y)) {
          flag_[idx(x, y)] = kInside;
          time_[idx(x, y)] = kFar;
        }
      }
    }
    for (int y = 0; y < h_; ++y) {
      for (int x = 0; x < w_; ++x) {
        if (flag_[idx(x, y)] != kKnown) continue;
        if (inside(x - 1, y) || inside(x + 1, y) || inside(x, y - 1) || inside(x, y + 1)) {
          flag_[idx(x, y)] = kBand;
          heap_.emplace(0.0, idx(x, y));
        }
      }
    }
  }

  ImageBuffer run() {
    static constexpr std::array<std::pair<int, int>, 4> kNeighbors{
        {{0, -1}, {-1, 0}, {1, 0}, {0, 1}}};
    while (!heap_.empty()) {
      const auto [t, id] = heap_.top();
      heap_.pop();
      const int px = static_cast<int>(id % static_cast<std::size_t>(w_));
      const int py = static_cast<int>(id / static_cast<std::size_t>(w_));
      flag_[id] = kKnown;
      for (const auto& [dx, dy] : kNeighbors) {
        const int x = px + dx;
        const int y = py + dy;
        if (!inside(x, y)) continue;
        const double tn = std::min(std::min(solve(x - 1, y, x, y - 1), solve(x + 1, y, x, y - 1)),
                                   std::min(solve(x - 1, y, x, y + 1), solve(x + 1, y, x, y + 1)));
        time_[idx(x, y)] = tn;
        fill(x, y);
        flag_[idx(x, y)] = kBand;
        heap_.emplace(tn, idx(x, y));
      }
    }
    bool unreached = false;
    for (int y = 0; y < h_; ++y) {
      for (int x = 0; x < w_; ++x) {
        if (flag_[idx(x, y)] != kInside) continue;
        unreached = true;
        for (int c = 0; c < out_.channels(); ++c) out_.at(x, y, c) = 0.0F;
      }
    }
    if (unreached) warn("telea_inpaint: hole has no known boundary; filled with zeros");
    return std::move(out_);
  }

 private:
  [[nodiscard]] std::size_t idx(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(w_) +
           static_cast<std::size_t>(x);
  }
  [[nodiscard]] bool in_bounds(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < w_ && y < h_;
  }
  [[nodiscard]] bool inside(int x, int y) const noexcept {
    return in_bounds(x, y) && flag_[idx(x, y)] == kInside;
  }
  [[nodiscard]] bool settled(int x, int y) const noexcept {
    return in_bounds(x, y) && flag_[idx(x, y)] != kInside;
  }
  [[nodiscard]] double time_at(int x, int y) const noexcept {
    return in_bounds(x, y) ? time_[idx(x, y)] : kFar;
  }

  // First-order upwind solution of |grad T| = 1 from two orthogonal neighbors.
  [[nodiscard]] double solve(int x1, int y1, int x2, int y2) const noexcept {
    const double a = time_at(x1, y1);
    const double b = time_at(x2, y2);
    const bool ka = settled(x1, y1);
    const bool kb = settled(x2, y2);
    if (ka && kb) {
      const double diff = a - b;
      if (std::abs(diff) >= 1.0) return 1.0 + std::min(a, b);
      return (a + b + std::sqrt(2.0 - diff * diff)) * 0.5;
    }
    if (ka) return 1.0 + a;
    if (kb) return 1.0 + b;
    return 1.0 + std::min(a, b);
  }

  [[nodiscard]] double time_gradient(int x, int y, int dx, int dy) const noexcept {
    const bool fwd = settled(x + dx, y + dy);
    const bool back = settled(x - dx, y - dy);
    const double here = time_[idx(x, y)];
    if (fwd && back) return (time_[idx(x + dx, y + dy)] - time_[idx(x - dx, y - dy)]) * 0.5;
    if (fwd) return time_[idx(x + dx, y + dy)] - here;
    if (back) return here - time_[idx(x - dx, y - dy)];
    return 0.0;
  }

  void fill(int x, int y) {
    const double gx = time_gradient(x, y, 1, 0);
    const double gy = time_gradient(x, y, 0, 1);
    const double t_here = time_[idx(x, y)];
    const int channels = out_.channels();
    std::array<double, 3> acc{0.0, 0.0, 0.0};
    double weight_sum = 0.0;
    const int r2 = radius_ * radius_;
    for (int ny = y - radius_; ny <= y + radius_; ++ny) {
      for (int nx = x - radius_; nx <= x + radius_; ++nx) {
        if (!settled(nx, ny)) continue;
        const int rx = x - nx;
        const int ry = y - ny;
        const int len2 = rx * rx + ry * ry;
        if (len2 == 0 || len2 > r2) continue;
        const double len = std::sqrt(static_cast<double>(len2));
        double dir = rx * gx + ry * gy;
        if (std::abs(dir) <= 0.01) dir = 1.0e-6;
        const double dst = 1.0 / (static_cast<double>(len2) * len);
        const double lev = 1.0 / (1.0 + std::abs(time_[idx(nx, ny)] - t_here));
        const double wgt = std::abs(dst * lev * dir);
        for (int c = 0; c < channels; ++c) acc[c] += wgt * out_.at(nx, ny, c);
        weight_sum += wgt;
      }
    }
    for (int c = 0; c < channels; ++c) {
      out_.at(x, y, c) = weight_sum > 0.0 ? static_cast<float>(acc[c] / weight_sum) : 0.0F;
    }
  }

  using Entry = std::pair<double, std::size_t>;

  ImageBuffer out_;
  int w_;
  int h_;
  int radius_;
  std::vector<std::uint8_t> flag_;
  std::vector<double> time_;
  // Ties on arrival time resolve by row-major index.
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap_;
};

}  // namespace

ImageBuffer telea_inpaint(const ImageBuffer& img, const BinaryMask& hole, int radius) {
  if (img.width() != hole.width() || img.height() != hole.height()) {
    fail(ErrorCode::InvalidArgument, "hole mask does not match image size");
  }
  if (radius < 1) fail(ErrorCode::InvalidArgument, "inpainting radius must be >= 1");
  if (!hole.any()) return img;
  return Marcher(img, hole, radius).run();
}

}  // namespace unistitch
