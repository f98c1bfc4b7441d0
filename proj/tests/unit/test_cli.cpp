#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cli_fixtures.hpp"
#include "ports.hpp"
#include "unistitch/manifest.hpp"

using namespace unistitch;
using fixture::run_cli;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    ::unsetenv("STITCH_BACKEND_URL");
    dir_ = fixture::fresh_dir(std::string("cli_") + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fixture::write_pair(dir_, 96, 64, 40, 3);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::vector<std::string> pair_args() const {
    return {"--left", (dir_ / "left.png").string(), "--right", (dir_ / "right.png").string(),
            "--homography", (dir_ / "homography.json").string()};
  }
  std::vector<std::string> with(std::vector<std::string> head, const std::vector<std::string>& tail) const {
    head.insert(head.end(), tail.begin(), tail.end());
    return head;
  }
  int stitch(const fs::path& out, std::vector<std::string> extra = {}) {
    auto args = with({"stitch"}, pair_args());
    args = with(args, {"--out", out.string(), "--steps", "8"});
    return run_cli(with(args, extra));
  }

  fs::path dir_;
};

std::string captured_stderr(const std::function<int()>& fn, int* code) {
  ::testing::internal::CaptureStderr();
  *code = fn();
  return ::testing::internal::GetCapturedStderr();
}

std::string captured_stdout(const std::function<int()>& fn, int* code) {
  ::testing::internal::CaptureStdout();
  *code = fn();
  return ::testing::internal::GetCapturedStdout();
}


}  // namespace

TEST_F(Cli, StitchWritesOutputsAndManifest) {
  const fs::path out = dir_ / "out";
  ASSERT_EQ(stitch(out, {"--dump-artifacts", "--dump-step-masks"}), 0);
  const ImageBuffer s = read_image(out / "stitched.png");
  EXPECT_EQ(s.width(), 136);
  EXPECT_EQ(s.height(), 64);
  for (const char* f : {"coarse_fusion.png", "coarse_rectangling.png", "mask_left.png", "mask_right.png",
                        "mask_seam.png", "mask_rect.png", "mask_inpaint.png", "w_init.png", "w_inpaint.png",
                        "step_masks/t0000.png", "step_masks/t0007.png"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  EXPECT_FALSE(fs::exists(out / "step_masks/t0008.png"));
  const RunManifest m = read_manifest(out);
  EXPECT_EQ(m.mode, "homography");
  EXPECT_EQ(m.config.steps_n, 8);
  EXPECT_EQ(m.backend.name, ReferenceBackend().capabilities().name);
  EXPECT_TRUE(m.backend_url.empty());
  ASSERT_EQ(m.inputs.size(), 3u);
  EXPECT_EQ(m.inputs[0].role, "left");
  EXPECT_EQ(m.inputs[0].sha256, sha256_file(dir_ / "left.png"));
  EXPECT_FALSE(m.timings.empty());
}

TEST_F(Cli, SameSeedIsByteIdentical) {
  ASSERT_EQ(stitch(dir_ / "a", {"--seed", "9"}), 0);
  ASSERT_EQ(stitch(dir_ / "b", {"--seed", "9"}), 0);
  EXPECT_EQ(fixture::file_bytes(dir_ / "a/stitched.png"), fixture::file_bytes(dir_ / "b/stitched.png"));
  EXPECT_TRUE(same_run(read_manifest(dir_ / "a"), read_manifest(dir_ / "b")));
}

TEST_F(Cli, BatchIsIndependentOfWorkerCount) {
  const fs::path batch = dir_ / "batch";
  for (int i = 0; i < 4; ++i) {
    const fs::path job = batch / ("job" + std::to_string(i));
    fs::create_directories(job);
    fixture::write_pair(job, 80, 48, 24 + 4 * i, 100 + i);
  }
  // A prealigned job sits next to the homography jobs.
  const fs::path pre = batch / "job_pre";
  fs::create_directories(pre);
  const ImageBuffer world = oracle::scene(80, 40, 7);
  ImageBuffer w1 = world;
  ImageBuffer w2 = world;
  BinaryMask m1(80, 40);
  BinaryMask m2(80, 40);
  for (int y = 0; y < 40; ++y) {
    for (int x = 0; x < 80; ++x) {
      m1.set(x, y, x < 50);
      m2.set(x, y, x >= 30 && y > 2);
    }
  }
  write_image(pre / "warp1.png", w1);
  write_image(pre / "warp2.png", w2);
  write_mask(pre / "mask1.png", m1);
  write_mask(pre / "mask2.png", m2);

  int code = 0;
  captured_stdout([&] { return run_cli({"stitch", "--batch", batch.string(), "--out", (dir_ / "j1").string(),
                                        "--steps", "6", "--jobs", "1"}); },
                  &code);
  ASSERT_EQ(code, 0);
  const std::string log = captured_stdout(
      [&] {
        return run_cli({"stitch", "--batch", batch.string(), "--out", (dir_ / "j4").string(), "--steps", "6",
                        "--jobs", "4"});
      },
      &code);
  ASSERT_EQ(code, 0);
  EXPECT_NE(log.find("ok"), std::string::npos);
  for (const char* job : {"job0", "job1", "job2", "job3", "job_pre"}) {
    const auto a = fixture::file_bytes(dir_ / "j1" / job / "stitched.png");
    ASSERT_FALSE(a.empty()) << job;
    EXPECT_EQ(a, fixture::file_bytes(dir_ / "j4" / job / "stitched.png")) << job;
  }
  EXPECT_EQ(read_manifest(dir_ / "j1" / "job_pre").mode, "prealigned");
}

TEST_F(Cli, MissingHomographyIsIoError) {
  fs::remove(dir_ / "homography.json");
  int code = 0;
  const std::string err = captured_stderr([&] { return stitch(dir_ / "out"); }, &code);
  EXPECT_EQ(code, 3);
  EXPECT_NE(err.find((dir_ / "homography.json").string()), std::string::npos) << err;
  EXPECT_NE(err.find("load inputs"), std::string::npos) << err;
  EXPECT_NE(err.find("Io"), std::string::npos) << err;
}

TEST_F(Cli, EmptyOverlapIsPipelineError) {
  write_homography(dir_ / "homography.json", Homography::translation(500, 0));
  int code = 0;
  const std::string err = captured_stderr([&] { return stitch(dir_ / "out"); }, &code);
  EXPECT_EQ(code, 5);
  EXPECT_NE(err.find("NoOverlap"), std::string::npos) << err;
}

TEST_F(Cli, UsageErrors) {
  int code = 0;
  captured_stderr([&] { return run_cli({"stitch", "--out", (dir_ / "o").string()}); }, &code);
  EXPECT_EQ(code, 2);
  captured_stderr([&] { return stitch(dir_ / "o", {"--lambda", "-1"}); }, &code);
  EXPECT_EQ(code, 2);
  captured_stderr([&] { return stitch(dir_ / "o", {"--kg", "4"}); }, &code);
  EXPECT_EQ(code, 2);
  captured_stderr([&] { return run_cli({"frobnicate"}); }, &code);
  EXPECT_EQ(code, 2);
  captured_stderr([&] { return run_cli({}); }, &code);
  EXPECT_EQ(code, 2);
}

TEST_F(Cli, RemoteBackendDownIsBackendError) {
  int code = 0;
  const std::string url = "http://127.0.0.1:" + std::to_string(fixture::closed_port());
  const std::string err = captured_stderr([&] { return stitch(dir_ / "o", {"--backend", url}); }, &code);
  EXPECT_EQ(code, 4);
  EXPECT_NE(err.find("BackendUnavailable"), std::string::npos) << err;
  ::setenv("STITCH_BACKEND_URL", url.c_str(), 1);
  captured_stderr([&] { return stitch(dir_ / "o"); }, &code);
  ::unsetenv("STITCH_BACKEND_URL");
  EXPECT_EQ(code, 4);
}

TEST_F(Cli, MasksWritesSevenImagesAndKernelFollowsLambda) {
  int code = 0;
  std::string log = captured_stdout(
      [&] { return run_cli(with(with({"masks"}, pair_args()), {"--out", (dir_ / "m200").string()})); }, &code);
  ASSERT_EQ(code, 0);
  std::size_t pngs = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "m200")) pngs += e.path().extension() == ".png";
  EXPECT_EQ(pngs, 7u);
  // Domain width 136: ceil(136/200)*10 -> 11, ceil(136/100)*10 -> 21.
  EXPECT_NE(log.find("domain 136x64, seam kernel 11"), std::string::npos) << log;
  log = captured_stdout(
      [&] {
        return run_cli(with(with({"masks"}, pair_args()), {"--out", (dir_ / "m100").string(), "--lambda", "100"}));
      },
      &code);
  ASSERT_EQ(code, 0);
  EXPECT_NE(log.find("seam kernel 21"), std::string::npos) << log;
  EXPECT_NE(fixture::file_bytes(dir_ / "m200/mask_seam.png"), fixture::file_bytes(dir_ / "m100/mask_seam.png"));
}

TEST_F(Cli, ConfigFileWithFlagPrecedence) {
  std::ofstream(dir_ / "run.cfg") << "# test\nlambda = 100\nsteps = 4\nseed = 11\n";
  ASSERT_EQ(run_cli(with(with({"stitch"}, pair_args()), {"--out", (dir_ / "o").string(), "--config",
                                                        (dir_ / "run.cfg").string(), "--steps", "3"})),
            0);
  const RunManifest m = read_manifest(dir_ / "o");
  EXPECT_EQ(m.config.lambda, 100.0);
  EXPECT_EQ(m.config.seed, 11u);
  EXPECT_EQ(m.config.steps_n, 3);

  std::ofstream(dir_ / "bad.cfg") << "lambda = banana\n";
  int code = 0;
  captured_stderr([&] { return stitch(dir_ / "o2", {"--config", (dir_ / "bad.cfg").string()}); }, &code);
  EXPECT_EQ(code, 2);
}

TEST_F(Cli, HelpListsDefaults) {
  int code = 0;
  const std::string help = captured_stdout([&] { return run_cli({"stitch", "--help"}); }, &code);
  EXPECT_EQ(code, 0);
  for (const char* s : {"--lambda", "[default: 200", "--delta", "[default: 10]", "--kg", "[default: 3]", "--radius",
                        "[default: 20]", "--eps1", "[default: 128]", "--steps", "[default: 50]", "--guidance",
                        "[default: 7.5", "--no-coarse-rect", "--no-weighted-init", "--no-weighted-inpaint"}) {
    EXPECT_NE(help.find(s), std::string::npos) << s;
  }
}

TEST_F(Cli, EvalWritesCsv) {
  const fs::path root = dir_ / "eval";
  for (int i = 0; i < 2; ++i) {
    const fs::path s = root / ("s" + std::to_string(i));
    fs::create_directories(s);
    const ImageBuffer img = oracle::scene(96, 72, 60 + i);
    for (const char* stem : {"stitched", "fusion", "left", "right"}) write_image(s / (std::string(stem) + ".png"), img);
  }
  ASSERT_EQ(run_cli({"eval", root.string(), "--out", (dir_ / "ccs.csv").string()}), 0);
  std::ifstream in(dir_ / "ccs.csv");
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0], "image_id,ccs,ccs_n,ccs_g");
  EXPECT_EQ(lines[1], "s0,1.000000,1.000000,1.000000");
  EXPECT_EQ(lines[3].rfind("mean,", 0), 0u);

  int code = 0;
  captured_stderr([&] { return run_cli({"eval", root.string(), "--tiles", "9"}); }, &code);
  EXPECT_EQ(code, 5);
  captured_stderr([&] { return run_cli({"eval", root.string(), "--provider", "remote"}); }, &code);
  EXPECT_EQ(code, 2);
  const std::string url = "http://127.0.0.1:" + std::to_string(fixture::closed_port());
  captured_stderr([&] { return run_cli({"eval", root.string(), "--provider", "remote", "--backend", url}); }, &code);
  EXPECT_EQ(code, 4);
  captured_stderr([&] { return run_cli({"eval", (dir_ / "none").string()}); }, &code);
  EXPECT_EQ(code, 3);
}

TEST_F(Cli, AblateWritesFourVariantsAndSheet) {
  int code = 0;
  captured_stdout(
      [&] { return run_cli(with(with({"ablate"}, pair_args()), {"--out", (dir_ / "abl").string(), "--steps", "4"})); },
      &code);
  ASSERT_EQ(code, 0);
  const char* variants[] = {"a_full", "b_no_coarse_rect", "c_no_weighted_init", "d_no_weighted_inpaint"};
  for (const char* v : variants) {
    EXPECT_TRUE(fs::exists(dir_ / "abl" / v / "stitched.png")) << v;
    EXPECT_TRUE(fs::exists(dir_ / "abl" / v / "w_inpaint.png")) << v;
  }
  const RunManifest d = read_manifest(dir_ / "abl" / "d_no_weighted_inpaint");
  EXPECT_TRUE(d.config.ablation.disable_coarse_rectangling);
  EXPECT_TRUE(d.config.ablation.disable_weighted_init);
  EXPECT_TRUE(d.config.ablation.disable_weighted_inpaint);
  EXPECT_FALSE(read_manifest(dir_ / "abl" / "a_full").config.ablation.disable_coarse_rectangling);
  const ImageBuffer sheet = read_image(dir_ / "abl" / "sheet.png");
  EXPECT_EQ(sheet.width(), 2 * 136);
  EXPECT_EQ(sheet.height(), 2 * 64);
  EXPECT_EQ(read_image(dir_ / "abl" / "sheet.png").at(136 + 5, 64 + 5, 1),
            read_image(dir_ / "abl" / "d_no_weighted_inpaint" / "stitched.png").at(5, 5, 1));
}

TEST(ExitCodes, Mapping) {
  EXPECT_EQ(cli::exit_code_for(ErrorCode::InvalidConfig), 2);
  EXPECT_EQ(cli::exit_code_for(ErrorCode::CorruptFile), 3);
  EXPECT_EQ(cli::exit_code_for(ErrorCode::NonFiniteLatent), 4);
  EXPECT_EQ(cli::exit_code_for(ErrorCode::DegenerateHomography), 5);
}
