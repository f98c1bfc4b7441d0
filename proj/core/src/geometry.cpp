#include "unistitch/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "unistitch/error.hpp"

namespace unistitch {
namespace {

constexpr double kMinHomogeneous = 1e-9;

std::array<Point2, 4> corners(Size2 s) {
  const auto w = static_cast<double>(s.width);
  const auto h = static_cast<double>(s.height);
  return {Point2{0, 0}, Point2{w, 0}, Point2{0, h}, Point2{w, h}};
}

/// Inverse mapping of a domain pixel; false when the point is at infinity.
bool map_back(const Homography& inv, const StitchDomain& d, int x, int y, double& u, double& v) {
  const double px = static_cast<double>(x - d.offset_x);
  const double py = static_cast<double>(y - d.offset_y);
  const double w = inv(2, 0) * px + inv(2, 1) * py + inv(2, 2);
  if (std::abs(w) < kMinHomogeneous) return false;
  u = (inv(0, 0) * px + inv(0, 1) * py + inv(0, 2)) / w;
  v = (inv(1, 0) * px + inv(1, 1) * py + inv(1, 2)) / w;
  return std::isfinite(u) && std::isfinite(v);
}

bool nearest_index(double u, int extent, int& out) {
  const double r = std::floor(u + 0.5);
  if (r < 0.0 || r >= static_cast<double>(extent)) return false;
  out = static_cast<int>(r);
  return true;
}

ImageBuffer to_channels(const ImageBuffer& img, int channels) {
  if (img.channels() == channels) return img;
  ImageBuffer out(img.width(), img.height(), channels);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (channels == 3) {
        const float g = img.at(x, y, 0);
        for (int c = 0; c < 3; ++c) out.at(x, y, c) = g;
      } else {
        out.at(x, y, 0) = luminance(img, x, y);
      }
    }
  }
  return out;
}

BinaryMask binarize(const ImageBuffer& img) {
  BinaryMask m(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) m.set(x, y, img.at(x, y, 0) > 0.5F);
  }
  return m;
}

}  // namespace

StitchDomain compute_domain(Size2 left, Size2 right, const Homography& h) {
  if (left.width <= 0 || left.height <= 0 || right.width <= 0 || right.height <= 0) {
    fail(ErrorCode::InvalidArgument, "empty input image");
  }
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = min_x;
  double max_x = -min_x;
  double max_y = -min_x;
  auto include = [&](Point2 p) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  };
  for (const Point2 p : corners(left)) include(p);
  for (const Point2 p : corners(right)) include(h.apply(p));

  StitchDomain d;
  d.offset_x = static_cast<int>(std::ceil(-min_x));
  d.offset_y = static_cast<int>(std::ceil(-min_y));
  d.w_star = static_cast<int>(std::ceil(max_x + d.offset_x));
  d.h_star = static_cast<int>(std::ceil(max_y + d.offset_y));
  return d;
}

ImageBuffer warp(const ImageBuffer& img, const Homography& h, const StitchDomain& domain,
                 Interpolation interp) {
  const Homography inv = h.inverse();
  const int channels = img.channels();
  ImageBuffer out(domain.w_star, domain.h_star, channels);
  const int sw = img.width();
  const int sh = img.height();
  for (int y = 0; y < domain.h_star; ++y) {
    for (int x = 0; x < domain.w_star; ++x) {
      double u = 0.0;
      double v = 0.0;
      int nx = 0;
      int ny = 0;
      if (!map_back(inv, domain, x, y, u, v) || !nearest_index(u, sw, nx) ||
          !nearest_index(v, sh, ny)) {
        continue;
      }
      if (interp == Interpolation::Nearest) {
        for (int c = 0; c < channels; ++c) out.at(x, y, c) = img.at(nx, ny, c);
        continue;
      }
      const double fu = std::floor(u);
      const double fv = std::floor(v);
      const double ax = u - fu;
      const double ay = v - fv;
      const int x0 = std::clamp(static_cast<int>(fu), 0, sw - 1);
      const int y0 = std::clamp(static_cast<int>(fv), 0, sh - 1);
      const int x1 = std::clamp(static_cast<int>(fu) + 1, 0, sw - 1);
      const int y1 = std::clamp(static_cast<int>(fv) + 1, 0, sh - 1);
      for (int c = 0; c < channels; ++c) {
        const double top = (1.0 - ax) * img.at(x0, y0, c) + ax * img.at(x1, y0, c);
        const double bottom = (1.0 - ax) * img.at(x0, y1, c) + ax * img.at(x1, y1, c);
        const double val = (1.0 - ay) * top + ay * bottom;
        out.at(x, y, c) = static_cast<float>(std::clamp(val, 0.0, 1.0));
      }
    }
  }
  return out;
}

BinaryMask warp_coverage(Size2 source, const Homography& h, const StitchDomain& domain) {
  const Homography inv = h.inverse();
  BinaryMask out(domain.w_star, domain.h_star);
  for (int y = 0; y < domain.h_star; ++y) {
    for (int x = 0; x < domain.w_star; ++x) {
      double u = 0.0;
      double v = 0.0;
      int nx = 0;
      int ny = 0;
      if (map_back(inv, domain, x, y, u, v) && nearest_index(u, source.width, nx) &&
          nearest_index(v, source.height, ny)) {
        out.set(x, y, true);
      }
    }
  }
  return out;
}

WarpedPair align_pair(const ImageBuffer& i_l, const ImageBuffer& i_r, const Homography& h) {
  if (i_l.empty() || i_r.empty()) fail(ErrorCode::InvalidArgument, "empty input image");
  const int channels = std::max(i_l.channels(), i_r.channels());
  const Size2 ls{i_l.width(), i_l.height()};
  const Size2 rs{i_r.width(), i_r.height()};

  WarpedPair pair;
  pair.domain = compute_domain(ls, rs, h);
  const Homography id = Homography::identity();
  pair.i_wl = warp(to_channels(i_l, channels), id, pair.domain, Interpolation::Bilinear);
  pair.i_wr = warp(to_channels(i_r, channels), h, pair.domain, Interpolation::Bilinear);
  pair.m_wl = warp_coverage(ls, id, pair.domain);
  pair.m_wr = warp_coverage(rs, h, pair.domain);
  if (!(pair.m_wl & pair.m_wr).any()) {
    fail(ErrorCode::NoOverlap, "warped images do not overlap");
  }
  return pair;
}

WarpedPair pair_from_prealigned(ImageBuffer i_wl, ImageBuffer i_wr, const ImageBuffer& mask_l,
                                const ImageBuffer& mask_r) {
  const int w = i_wl.width();
  const int h = i_wl.height();
  auto same = [&](const ImageBuffer& b) { return b.width() == w && b.height() == h; };
  if (!same(i_wr) || !same(mask_l) || !same(mask_r)) {
    fail(ErrorCode::InvalidArgument, "pre-aligned rasters must share dimensions");
  }
  const int channels = std::max(i_wl.channels(), i_wr.channels());
  WarpedPair pair;
  pair.domain = StitchDomain{w, h, 0, 0};
  pair.m_wl = binarize(mask_l);
  pair.m_wr = binarize(mask_r);
  pair.i_wl = to_channels(i_wl, channels);
  pair.i_wr = to_channels(i_wr, channels);
  if (!(pair.m_wl & pair.m_wr).any()) {
    fail(ErrorCode::NoOverlap, "pre-aligned masks do not overlap");
  }
  return pair;
}

}  // namespace unistitch
