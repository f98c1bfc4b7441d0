#pragma once

#include <array>
#include <filesystem>

namespace unistitch {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// 3x3 projective transform acting on homogeneous pixel coordinates.
/// Construction normalizes so that m[2][2] == 1 whenever it is non-zero and
/// rejects near-singular matrices.
class Homography {
 public:
  Homography();  // identity
  explicit Homography(const std::array<double, 9>& row_major);

  static Homography identity() { return {}; }
  static Homography translation(double tx, double ty);
  static Homography scale(double sx, double sy);

  [[nodiscard]] const std::array<double, 9>& matrix() const noexcept { return m_; }
  [[nodiscard]] double operator()(int r, int c) const noexcept { return m_[r * 3 + c]; }

  [[nodiscard]] double determinant() const noexcept;
  [[nodiscard]] Homography inverse() const;
  [[nodiscard]] Homography operator*(const Homography& rhs) const;

  /// Maps a point; throws DegenerateHomography when |w| < 1e-9.
  [[nodiscard]] Point2 apply(Point2 p) const;

 private:
  std::array<double, 9> m_;
};

/// Reads `{"h": [9 reals, row-major]}`.
Homography read_homography(const std::filesystem::path& path);
void write_homography(const std::filesystem::path& path, const Homography& h);

}  // namespace unistitch
