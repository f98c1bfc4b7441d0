#include "unistitch/homography.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "unistitch/error.hpp"

namespace unistitch {
namespace {

constexpr double kMinDeterminant = 1e-12;
constexpr double kMinHomogeneous = 1e-9;

}  // namespace

Homography::Homography() : m_{1, 0, 0, 0, 1, 0, 0, 0, 1} {}

Homography::Homography(const std::array<double, 9>& row_major) : m_(row_major) {
  for (double v : m_) {
    if (!std::isfinite(v)) fail(ErrorCode::DegenerateHomography, "non-finite homography entry");
  }
  if (m_[8] != 0.0) {
    const double s = m_[8];
    for (double& v : m_) v /= s;
  }
  if (std::abs(determinant()) <= kMinDeterminant) {
    fail(ErrorCode::DegenerateHomography, "homography is not invertible");
  }
}

Homography Homography::translation(double tx, double ty) {
  return Homography({1, 0, tx, 0, 1, ty, 0, 0, 1});
}

Homography Homography::scale(double sx, double sy) {
  return Homography({sx, 0, 0, 0, sy, 0, 0, 0, 1});
}

double Homography::determinant() const noexcept {
  const auto& a = m_;
  return a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) +
         a[2] * (a[3] * a[7] - a[4] * a[6]);
}

Homography Homography::inverse() const {
  const auto& a = m_;
  const double det = determinant();
  std::array<double, 9> inv{
      (a[4] * a[8] - a[5] * a[7]) / det, (a[2] * a[7] - a[1] * a[8]) / det,
      (a[1] * a[5] - a[2] * a[4]) / det, (a[5] * a[6] - a[3] * a[8]) / det,
      (a[0] * a[8] - a[2] * a[6]) / det, (a[2] * a[3] - a[0] * a[5]) / det,
      (a[3] * a[7] - a[4] * a[6]) / det, (a[1] * a[6] - a[0] * a[7]) / det,
      (a[0] * a[4] - a[1] * a[3]) / det,
  };
  return Homography(inv);
}

Homography Homography::operator*(const Homography& rhs) const {
  std::array<double, 9> out{};
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += m_[r * 3 + k] * rhs.m_[k * 3 + c];
      out[r * 3 + c] = s;
    }
  }
  return Homography(out);
}

Point2 Homography::apply(Point2 p) const {
  const double w = m_[6] * p.x + m_[7] * p.y + m_[8];
  if (std::abs(w) < kMinHomogeneous) {
    fail(ErrorCode::DegenerateHomography, "point maps to infinity");
  }
  return {(m_[0] * p.x + m_[1] * p.y + m_[2]) / w, (m_[3] * p.x + m_[4] * p.y + m_[5]) / w};
}

Homography read_homography(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open homography file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::CorruptFile, "malformed homography file " + path.string() + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("h") || !j["h"].is_array() || j["h"].size() != 9) {
    fail(ErrorCode::CorruptFile, "homography file " + path.string() + " needs \"h\": [9 reals]");
  }
  std::array<double, 9> m{};
  for (std::size_t i = 0; i < 9; ++i) {
    if (!j["h"][i].is_number()) {
      fail(ErrorCode::CorruptFile, "homography entry is not a number in " + path.string());
    }
    m[i] = j["h"][i].get<double>();
  }
  return Homography(m);
}

void write_homography(const std::filesystem::path& path, const Homography& h) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  nlohmann::json j;
  j["h"] = h.matrix();
  out << j.dump(2) << '\n';
}

}  // namespace unistitch
