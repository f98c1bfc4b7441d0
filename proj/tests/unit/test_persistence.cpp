#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "unistitch/io.hpp"
#include "unistitch/manifest.hpp"

using namespace unistitch;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::Io;
}

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("unistitch_persist_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  void write_bytes(const fs::path& p, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(p, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  std::vector<std::uint8_t> read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }

  fs::path dir_;
};

RunManifest sample_manifest() {
  RunManifest m;
  m.tool_version = version_string();
  m.mode = "homography";
  m.config.lambda = 150.5;
  m.config.seed = 18446744073709551615ULL;
  m.config.prompt = "a \"quoted\" prompt";
  m.config.ablation.disable_weighted_init = true;
  m.inputs = {{"left", "/x/left.png", std::string(64, 'a')}, {"homography", "h.json", std::string(64, 'b')}};
  m.backend.name = "reference";
  m.backend.latent_scale = 1;
  m.backend.latent_channels = 3;
  m.backend_url = "http://127.0.0.1:1";
  m.timings = {{"registration", 0.25}, {"wmgrp", 1.5}};
  return m;
}

}  // namespace

TEST_F(TempDir, PngRoundTripIsBitExact) {
  for (int channels : {1, 3}) {
    const ImageBuffer img = oracle::quantized(channels == 3 ? oracle::scene(33, 21, 3) : ImageBuffer(17, 9, 1, 0.4F));
    const fs::path p = dir_ / ("img" + std::to_string(channels) + ".png");
    write_image(p, img);
    EXPECT_EQ(read_image(p), img);
    EXPECT_EQ(decode_image(encode_png(img)), img);
  }
}

TEST_F(TempDir, EightBitValuesSurviveRoundTrip) {
  ImageBuffer img(256, 1, 3);
  for (int x = 0; x < 256; ++x) {
    for (int c = 0; c < 3; ++c) img.at(x, 0, c) = static_cast<float>((x + 85 * c) % 256) / 255.0F;
  }
  write_image(dir_ / "ramp.PNG", img);
  EXPECT_EQ(read_image(dir_ / "ramp.PNG"), img);
}

TEST_F(TempDir, JpegReadsCloseToSource) {
  const ImageBuffer img = oracle::quantized(oracle::scene(64, 48, 4));
  write_image(dir_ / "a.jpg", img);
  const ImageBuffer back = read_image(dir_ / "a.jpg");
  ASSERT_EQ(back.width(), 64);
  ASSERT_EQ(back.channels(), 3);
  double err = 0;
  for (std::size_t i = 0; i < img.data().size(); ++i) err += std::abs(img.data()[i] - back.data()[i]);
  EXPECT_LT(err / static_cast<double>(img.data().size()), 4.0 / 255.0);
  write_image(dir_ / "b.jpeg", img);
  EXPECT_EQ(read_image(dir_ / "b.jpeg").height(), 48);
}

TEST_F(TempDir, TruncatedFilesAreCorrupt) {
  const ImageBuffer img = oracle::scene(40, 40, 5);
  write_image(dir_ / "full.png", img);
  write_image(dir_ / "full.jpg", img);
  for (const char* name : {"full.png", "full.jpg"}) {
    auto bytes = read_bytes(dir_ / name);
    for (std::size_t keep : {bytes.size() - 1, bytes.size() / 2, std::size_t{10}, std::size_t{0}}) {
      const fs::path cut = dir_ / ("cut" + fs::path(name).extension().string());
      write_bytes(cut, std::vector<std::uint8_t>(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(keep)));
      EXPECT_EQ(code_of([&] { read_image(cut); }), ErrorCode::CorruptFile) << name << " " << keep;
    }
  }
  write_bytes(dir_ / "text.png", {'h', 'e', 'l', 'l', 'o'});
  EXPECT_EQ(code_of([&] { read_image(dir_ / "text.png"); }), ErrorCode::CorruptFile);
}

TEST_F(TempDir, UnsupportedAndMissing) {
  EXPECT_EQ(code_of([&] { read_image(dir_ / "a.bmp"); }), ErrorCode::UnsupportedFormat);
  EXPECT_EQ(code_of([&] { write_image(dir_ / "a.tiff", ImageBuffer(2, 2, 3)); }), ErrorCode::UnsupportedFormat);
  EXPECT_EQ(code_of([&] { read_image(dir_ / "missing.png"); }), ErrorCode::Io);
  EXPECT_FALSE(is_supported_image("x.gif"));
  EXPECT_TRUE(is_supported_image("x.JPG"));
}

TEST_F(TempDir, MaskAndWeightDumps) {
  BinaryMask m(4, 2);
  m.set(1, 1, true);
  write_mask(dir_ / "m.png", m);
  const ImageBuffer mi = read_image(dir_ / "m.png");
  EXPECT_EQ(mi.channels(), 1);
  EXPECT_EQ(mi.at(1, 1, 0), 1.0F);
  EXPECT_EQ(mi.at(0, 0, 0), 0.0F);
  WeightMask w(3, 1);
  w.set(0, 0, 0.5);
  w.set(1, 0, 1.0);
  write_weights(dir_ / "w.png", w);
  const ImageBuffer wi = read_image(dir_ / "w.png");
  EXPECT_EQ(to_u8(wi.at(0, 0, 0)), 128);
  EXPECT_EQ(to_u8(wi.at(1, 0, 0)), 255);
  EXPECT_EQ(to_u8(wi.at(2, 0, 0)), 0);
}

TEST_F(TempDir, FindImageByStem) {
  write_image(dir_ / "warp1.png", ImageBuffer(2, 2, 3));
  write_image(dir_ / "warp1.jpg", ImageBuffer(2, 2, 3));
  std::ofstream(dir_ / "warp2.txt") << "x";
  EXPECT_EQ(find_image(dir_, "warp1").filename(), "warp1.jpg");
  EXPECT_EQ(code_of([&] { find_image(dir_, "warp2"); }), ErrorCode::Io);
}

TEST(Sha256, KnownVectors) {
  EXPECT_EQ(sha256_hex({}), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  const std::vector<std::uint8_t> abc{'a', 'b', 'c'};
  EXPECT_EQ(sha256_hex(abc), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_F(TempDir, FileHashTracksContent) {
  const fs::path p = dir_ / "in.png";
  write_image(p, oracle::scene(20, 20, 6));
  const std::string h1 = sha256_file(p);
  EXPECT_EQ(h1, sha256_hex(read_bytes(p)));
  ImageBuffer changed = read_image(p);
  changed.at(3, 3, 1) = changed.at(3, 3, 1) > 0.5F ? 0.0F : 1.0F;
  write_image(p, changed);
  EXPECT_NE(sha256_file(p), h1);
  EXPECT_EQ(code_of([&] { sha256_file(dir_ / "nope"); }), ErrorCode::Io);
}

TEST_F(TempDir, ManifestRoundTrip) {
  const RunManifest m = sample_manifest();
  write_manifest(dir_, m);
  const RunManifest back = read_manifest(dir_);
  EXPECT_EQ(back, m);

  std::ifstream in(dir_ / "manifest.json");
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j["schema"], 1);
  EXPECT_EQ(j["config"]["lambda"], 150.5);
  EXPECT_EQ(j["inputs"][0]["role"], "left");
  EXPECT_EQ(j["timings"][1]["stage"], "wmgrp");
}

TEST_F(TempDir, SameRunIgnoresTimings) {
  RunManifest a = sample_manifest();
  RunManifest b = a;
  b.timings = {{"registration", 9.0}};
  EXPECT_TRUE(same_run(a, b));
  b.inputs[0].sha256 = std::string(64, 'c');
  EXPECT_FALSE(same_run(a, b));
  b = a;
  b.config.seed = 1;
  EXPECT_FALSE(same_run(a, b));
}

TEST_F(TempDir, ManifestErrors) {
  EXPECT_EQ(code_of([&] { read_manifest(dir_); }), ErrorCode::Io);
  std::ofstream(dir_ / "manifest.json") << "{\"schema\": 1,";
  EXPECT_EQ(code_of([&] { read_manifest(dir_); }), ErrorCode::CorruptFile);
  std::ofstream(dir_ / "manifest.json") << "{\"schema\": 1}";
  EXPECT_EQ(code_of([&] { read_manifest(dir_); }), ErrorCode::CorruptFile);
}
