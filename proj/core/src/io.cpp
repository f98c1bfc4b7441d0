#include "unistitch/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "unistitch/error.hpp"

namespace unistitch {
namespace {

namespace fs = std::filesystem;

std::string lower_ext(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

bool is_png(const fs::path& p) { return lower_ext(p) == ".png"; }

ImageBuffer from_mat(const cv::Mat& mat, const std::string& what) {
  if (mat.empty()) fail(ErrorCode::CorruptFile, "cannot decode image " + what);
  if (mat.depth() != CV_8U) fail(ErrorCode::UnsupportedFormat, what + " is not 8-bit");
  const int ch = mat.channels();
  const int out_ch = ch == 1 ? 1 : 3;
  ImageBuffer img(mat.cols, mat.rows, out_ch);
  for (int y = 0; y < mat.rows; ++y) {
    const auto* row = mat.ptr<std::uint8_t>(y);
    for (int x = 0; x < mat.cols; ++x) {
      const std::uint8_t* px = row + static_cast<std::ptrdiff_t>(x) * ch;
      if (out_ch == 1) {
        img.at(x, y, 0) = from_u8(px[0]);
      } else {
        // OpenCV stores BGR(A).
        img.at(x, y, 0) = from_u8(px[2]);
        img.at(x, y, 1) = from_u8(px[1]);
        img.at(x, y, 2) = from_u8(px[0]);
      }
    }
  }
  return img;
}

cv::Mat to_mat(const ImageBuffer& img) {
  const int ch = img.channels();
  cv::Mat mat(img.height(), img.width(), ch == 1 ? CV_8UC1 : CV_8UC3);
  for (int y = 0; y < img.height(); ++y) {
    auto* row = mat.ptr<std::uint8_t>(y);
    for (int x = 0; x < img.width(); ++x) {
      std::uint8_t* px = row + static_cast<std::ptrdiff_t>(x) * ch;
      if (ch == 1) {
        px[0] = to_u8(img.at(x, y, 0));
      } else {
        px[0] = to_u8(img.at(x, y, 2));
        px[1] = to_u8(img.at(x, y, 1));
        px[2] = to_u8(img.at(x, y, 0));
      }
    }
  }
  return mat;
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// libpng tolerates some truncations; require the IEND chunk so short files
// are reported instead of silently decoded.
bool png_complete(std::span<const std::uint8_t> bytes) {
  static constexpr std::uint8_t kIend[] = {0x49, 0x45, 0x4E, 0x44, 0xAE, 0x42, 0x60, 0x82};
  return bytes.size() >= 8 && std::equal(std::end(kIend) - 8, std::end(kIend), bytes.end() - 8);
}

bool jpeg_complete(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= 4 && bytes[bytes.size() - 2] == 0xFF && bytes[bytes.size() - 1] == 0xD9;
}

}  // namespace

bool is_supported_image(const fs::path& path) {
  const auto ext = lower_ext(path);
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

ImageBuffer read_image(const fs::path& path) {
  if (!is_supported_image(path)) {
    fail(ErrorCode::UnsupportedFormat, "unsupported image format: " + path.string());
  }
  if (!fs::exists(path)) fail(ErrorCode::Io, "no such file: " + path.string());
  const auto bytes = read_bytes(path);
  const bool complete = is_png(path) ? png_complete(bytes) : jpeg_complete(bytes);
  if (!complete) fail(ErrorCode::CorruptFile, "truncated image file: " + path.string());
  return from_mat(cv::imdecode(cv::Mat(1, static_cast<int>(bytes.size()), CV_8UC1,
                                       const_cast<std::uint8_t*>(bytes.data())),
                               cv::IMREAD_UNCHANGED),
                  path.string());
}

ImageBuffer decode_image(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) fail(ErrorCode::CorruptFile, "empty image payload");
  return from_mat(cv::imdecode(cv::Mat(1, static_cast<int>(bytes.size()), CV_8UC1,
                                       const_cast<std::uint8_t*>(bytes.data())),
                               cv::IMREAD_UNCHANGED),
                  "payload");
}

void write_image(const fs::path& path, const ImageBuffer& img) {
  if (!is_supported_image(path)) {
    fail(ErrorCode::UnsupportedFormat, "unsupported image format: " + path.string());
  }
  std::vector<std::uint8_t> bytes;
  const std::vector<int> params =
      is_png(path) ? std::vector<int>{cv::IMWRITE_PNG_COMPRESSION, 6}
                   : std::vector<int>{cv::IMWRITE_JPEG_QUALITY, 95};
  if (!cv::imencode(lower_ext(path), to_mat(img), bytes, params)) {
    fail(ErrorCode::Io, "cannot encode " + path.string());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::Io, "short write to " + path.string());
}

std::vector<std::uint8_t> encode_png(const ImageBuffer& img) {
  std::vector<std::uint8_t> bytes;
  if (!cv::imencode(".png", to_mat(img), bytes)) fail(ErrorCode::Io, "PNG encoding failed");
  return bytes;
}

ImageBuffer mask_image(const BinaryMask& m) {
  ImageBuffer img(m.width(), m.height(), 1);
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) img.at(x, y, 0) = m.get(x, y) ? 1.0F : 0.0F;
  }
  return img;
}

ImageBuffer weight_image(const WeightMask& w) {
  ImageBuffer img(w.width(), w.height(), 1);
  for (int y = 0; y < w.height(); ++y) {
    for (int x = 0; x < w.width(); ++x) {
      img.at(x, y, 0) = static_cast<float>(std::round(w.get(x, y) * 255.0) / 255.0);
    }
  }
  return img;
}

void write_mask(const fs::path& path, const BinaryMask& m) { write_image(path, mask_image(m)); }

void write_weights(const fs::path& path, const WeightMask& w) {
  write_image(path, weight_image(w));
}

fs::path find_image(const fs::path& dir, const std::string& stem) {
  std::vector<fs::path> hits;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().stem() == stem &&
        is_supported_image(entry.path())) {
      hits.push_back(entry.path());
    }
  }
  if (ec) fail(ErrorCode::Io, "cannot list " + dir.string());
  if (hits.empty()) fail(ErrorCode::Io, "no '" + stem + "' image in " + dir.string());
  std::sort(hits.begin(), hits.end());
  return hits.front();
}

}  // namespace unistitch
