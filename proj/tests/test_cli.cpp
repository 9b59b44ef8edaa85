#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "commands.hpp"
#include "emrefine/metrics.hpp"
#include "emrefine/stack_io.hpp"
#include "test_support.hpp"

namespace emrefine {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using testing::TempDir;

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

RunResult run_cli(const std::string& args, const TempDir& scratch) {
    const auto err_path = scratch / "stderr.txt";
    const std::string cmd = std::string("\"") + EMREFINE_CLI_PATH + "\" " + args + " 2>\"" + err_path.string() + "\"";
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream err(err_path);
    r.err.assign(std::istreambuf_iterator<char>(err), {});
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

GrayStack random_gray_stack(int d, int h, int w, std::uint32_t seed) {
    std::vector<GraySlice> s;
    for (int z = 0; z < d; ++z) s.push_back(testing::random_gray(h, w, seed + static_cast<std::uint32_t>(z)));
    return GrayStack(std::move(s));
}

// ---------------------------------------------------------------------------

TEST(CliSelect, PrintsOneIndexPerLine) {
    TempDir dir;
    const auto r = run_cli("select --depth 165 --count 32", dir);
    ASSERT_EQ(r.exit_code, 0) << r.err;
    std::istringstream lines(r.out);
    std::vector<int> got;
    for (int v; lines >> v;) got.push_back(v);
    ASSERT_EQ(got.size(), 32u);
    for (std::size_t k = 0; k < got.size(); ++k) EXPECT_EQ(got[k], 5 + 5 * static_cast<int>(k));

    const auto all = run_cli("select --depth 5 --count 5", dir);
    EXPECT_EQ(all.out, "0\n1\n2\n3\n4\n");
}

TEST(CliSelect, InvalidCountExitsWithCategory) {
    TempDir dir;
    const auto r = run_cli("select --depth 3 --count 4", dir);
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.err.find("invalid-argument"), std::string::npos) << r.err;
    EXPECT_TRUE(r.out.empty());
}

TEST(CliErrors, MissingInputIsIoError) {
    TempDir dir;
    const auto r = run_cli("evaluate --pred " + q(dir / "nope.tif") + " --gt " + q(dir / "nope.tif"), dir);
    EXPECT_EQ(r.exit_code, 4);
    EXPECT_NE(r.err.find("io"), std::string::npos);
}

TEST(CliErrors, UnknownFlagIsInvalidArgument) {
    TempDir dir;
    EXPECT_EQ(run_cli("select --depth 3 --count 1 --bogus", dir).exit_code, 2);
}

// ---------------------------------------------------------------------------

TEST(CliRefine, AllGroundTruthIsFixpoint) {
    TempDir dir;
    const auto stack = testing::random_mask_stack(4, 16, 16, 0.5, 1);
    save_stack(stack, dir / "gt.tif");
    const auto r = run_cli("refine --coarse " + q(dir / "gt.tif") + " --gt " + q(dir / "gt.tif") +
                               " --gt-indices 0,1,2,3 --out " + q(dir / "out.tif"),
                           dir);
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_EQ(load_mask_stack(dir / "out.tif"), stack);
    const auto manifest = json::parse(slurp(dir / "out.tif.manifest.json"));
    EXPECT_EQ(manifest, json::parse(r.out));
    EXPECT_EQ(manifest["config"]["erosion_n"], 3);
    EXPECT_EQ(manifest["config"]["tc"], 64);
    EXPECT_EQ(manifest["foreground"]["phases"].size(), 4u);
}

TEST(CliRefine, ErosionSettingChangesResult) {
    TempDir dir;
    const auto vol = testing::make_tube_volume(11, 64, 64, 3);
    save_stack(vol.coarse, dir / "coarse.tif");
    // One slice per GT index. Slices past the last GT only see the eroded
    // ground truth, so the erosion setting shows up there.
    std::vector<MaskSlice> gt_slices{vol.dense_gt[0], vol.dense_gt[5]};
    save_stack(MaskStack(gt_slices), dir / "gt_sparse");
    std::string outs[2];
    int k = 0;
    for (int n : {3, 6}) {
        const auto out = dir / ("n" + std::to_string(n) + ".tif");
        const auto r = run_cli("refine --coarse " + q(dir / "coarse.tif") + " --gt " + q(dir / "gt_sparse") +
                                   " --gt-indices 0,5 --tc 16 --erosion-n " + std::to_string(n) + " --out " + q(out),
                               dir);
        ASSERT_EQ(r.exit_code, 0) << r.err;
        EXPECT_EQ(json::parse(r.out)["config"]["erosion_n"], n);
        const auto refined = load_mask_stack(out);
        for (int z : {0, 5}) EXPECT_EQ(refined[z], vol.dense_gt[z]);
        outs[k++] = slurp(out);
    }
    EXPECT_TRUE(outs[0] != outs[1]);
}

TEST(CliRefine, ReplayReproducesOutput) {
    TempDir dir;
    const auto vol = testing::make_tube_volume(10, 48, 48, 4);
    save_stack(vol.coarse, dir / "coarse");
    save_stack(vol.dense_gt, dir / "gt.tif");
    const auto first = run_cli("refine --coarse " + q(dir / "coarse") + " --gt " + q(dir / "gt.tif") +
                                   " --gt-indices auto:2 --tc 4 --max-gap auto --out " + q(dir / "a.tif"),
                               dir);
    ASSERT_EQ(first.exit_code, 0) << first.err;
    const auto again = run_cli("replay " + q(dir / "a.tif.manifest.json") + " --out " + q(dir / "b.tif"), dir);
    ASSERT_EQ(again.exit_code, 0) << again.err;
    EXPECT_TRUE(slurp(dir / "a.tif") == slurp(dir / "b.tif"));
    auto ma = json::parse(first.out), mb = json::parse(again.out);
    ma.erase("output");
    mb.erase("output");
    EXPECT_EQ(ma, mb);
}

TEST(CliRefine, BadMaxGapRejected) {
    TempDir dir;
    const auto s = testing::random_mask_stack(3, 8, 8, 0.5, 1);
    save_stack(s, dir / "s.tif");
    const auto r = run_cli("refine --coarse " + q(dir / "s.tif") + " --gt " + q(dir / "s.tif") +
                               " --gt-indices 0 --max-gap soon --out " + q(dir / "o.tif"),
                           dir);
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_FALSE(fs::exists(dir / "o.tif"));
}

// ---------------------------------------------------------------------------

struct AugmentFixture {
    TempDir dir;
    GrayStack images = random_gray_stack(3, 32, 32, 10);
    MaskStack masks = testing::random_mask_stack(3, 32, 32, 0.4, 11);
    AugmentFixture() {
        save_stack(images, dir / "img.tif");
        save_stack(masks, dir / "mask.tif");
    }
    RunResult run(const std::string& extra, const fs::path& out) {
        return run_cli("augment --images " + q(dir / "img.tif") + " --masks " + q(dir / "mask.tif") + " --out " +
                           q(out) + " " + extra,
                       dir);
    }
};

TEST(CliAugment, CountZeroWritesNothing) {
    AugmentFixture f;
    const auto r = f.run("--count 0", f.dir / "aug");
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_FALSE(fs::exists(f.dir / "aug"));
}

TEST(CliAugment, SameSeedByteIdentical) {
    AugmentFixture f;
    ASSERT_EQ(f.run("--count 2 --seed 5 --elastic", f.dir / "a").exit_code, 0);
    ASSERT_EQ(f.run("--count 2 --seed 5 --elastic", f.dir / "b").exit_code, 0);
    int files = 0;
    for (const auto& e : fs::directory_iterator(f.dir / "a")) {
        if (e.path().extension() != ".png") continue;
        ++files;
        EXPECT_TRUE(slurp(e.path()) == slurp(f.dir / "b" / e.path().filename())) << e.path();
    }
    EXPECT_EQ(files, 3 * 2 * 2);
    EXPECT_TRUE(fs::exists(f.dir / "a" / "0002_001_mask.png"));
}

TEST(CliAugment, IdentityChainReproducesInputs) {
    AugmentFixture f;
    const auto r = f.run("--count 1 --no-flip --sigma-p-min 0 --sigma-p-max 0", f.dir / "id");
    ASSERT_EQ(r.exit_code, 0) << r.err;
    for (int z = 0; z < 3; ++z) {
        char stem[32];
        std::snprintf(stem, sizeof stem, "%04d_000", z);
        const auto img = load_gray_stack(f.dir / "id" / (std::string(stem) + "_image.png"));
        const auto mask = load_mask_stack(f.dir / "id" / (std::string(stem) + "_mask.png"));
        EXPECT_EQ(img[0], f.images[z]);
        EXPECT_EQ(mask[0], f.masks[z]);
    }
}

TEST(CliAugment, ReplayMatches) {
    AugmentFixture f;
    ASSERT_EQ(f.run("--count 1 --seed 9 --slices 0,2", f.dir / "a").exit_code, 0);
    const auto r = run_cli("replay " + q(f.dir / "a" / "manifest.json") + " --out " + q(f.dir / "b"), f.dir);
    ASSERT_EQ(r.exit_code, 0) << r.err;
    for (const char* name : {"0000_000_image.png", "0002_000_mask.png"}) {
        EXPECT_TRUE(slurp(f.dir / "a" / name) == slurp(f.dir / "b" / name)) << name;
    }
    EXPECT_FALSE(fs::exists(f.dir / "b" / "0001_000_image.png"));
}

// ---------------------------------------------------------------------------

TEST(CliPrepare, FifteenChannelWindows) {
    TempDir dir;
    const auto coarse = testing::random_mask_stack(20, 8, 8, 0.5, 1);
    const auto refined = testing::random_mask_stack(20, 8, 8, 0.5, 2);
    save_stack(coarse, dir / "c.tif");
    save_stack(refined, dir / "r.tif");
    const auto r = run_cli("prepare --coarse " + q(dir / "c.tif") + " --refined " + q(dir / "r.tif") +
                               " --atlas 4,9 --out " + q(dir / "pairs"),
                           dir);
    ASSERT_EQ(r.exit_code, 0) << r.err;
    const auto m = json::parse(r.out);
    EXPECT_EQ(m["n_channels"], 15);
    ASSERT_EQ(m["pairs"].size(), 20u);
    EXPECT_EQ(m["pairs"][4]["role"], "gt");
    EXPECT_EQ(m["pairs"][5]["role"], "soft");
    const auto input = load_mask_stack(dir / "pairs" / m["pairs"][0]["input"].get<std::string>());
    EXPECT_EQ(input.depth(), 15);
    EXPECT_EQ(input[0], coarse[0]);
    EXPECT_EQ(input[14], coarse[7]);
}

TEST(CliPrepare, SingleChannelAndAtlasFromManifest) {
    TempDir dir;
    const auto coarse = testing::random_mask_stack(5, 8, 8, 0.5, 3);
    save_stack(coarse, dir / "c.tif");
    std::ofstream(dir / "atlas.json") << R"({"gt_indices": [2]})";
    const auto r = run_cli("prepare --coarse " + q(dir / "c.tif") + " --refined " + q(dir / "c.tif") + " --atlas " +
                               q(dir / "atlas.json") + " --window-n 1 --out " + q(dir / "pairs"),
                           dir);
    ASSERT_EQ(r.exit_code, 0) << r.err;
    const auto m = json::parse(r.out);
    for (int z = 0; z < 5; ++z) {
        const auto& p = m["pairs"][static_cast<std::size_t>(z)];
        EXPECT_EQ(load_mask_stack(dir / "pairs" / p["input"].get<std::string>())[0], coarse[z]);
        EXPECT_EQ(p["role"], z == 2 ? "gt" : "soft");
    }
}

TEST(CliPrepare, EvenWindowRejected) {
    TempDir dir;
    save_stack(testing::random_mask_stack(5, 8, 8, 0.5, 3), dir / "c.tif");
    const auto r = run_cli("prepare --coarse " + q(dir / "c.tif") + " --refined " + q(dir / "c.tif") +
                               " --atlas 0 --window-n 4 --out " + q(dir / "pairs"),
                           dir);
    EXPECT_EQ(r.exit_code, 2);
}

// ---------------------------------------------------------------------------

TEST(CliEvaluate, IdenticalStacksScoreOne) {
    TempDir dir;
    save_stack(testing::random_mask_stack(3, 10, 10, 0.3, 1), dir / "g.tif");
    const auto r = run_cli("evaluate --pred " + q(dir / "g.tif") + " --gt " + q(dir / "g.tif"), dir);
    ASSERT_EQ(r.exit_code, 0) << r.err;
    const auto m = json::parse(r.out);
    EXPECT_EQ(m["iou"], 1.0);
    EXPECT_EQ(m["dice"], 1.0);
    EXPECT_EQ(m["per_slice"].size(), 3u);
}

TEST(CliEvaluate, CountsMatchOracleAndOverlaysWritten) {
    TempDir dir;
    const auto p = testing::random_mask_stack(4, 12, 12, 0.5, 7);
    const auto g = testing::random_mask_stack(4, 12, 12, 0.4, 8);
    save_stack(p, dir / "p.tif");
    save_stack(g, dir / "g");
    const auto r = run_cli("evaluate --pred " + q(dir / "p.tif") + " --gt " + q(dir / "g") + " --overlay-dir " +
                               q(dir / "ov"),
                           dir);
    ASSERT_EQ(r.exit_code, 0) << r.err;
    const auto m = json::parse(r.out);
    std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (int z = 0; z < 4; ++z) {
        for (int y = 0; y < 12; ++y) {
            for (int x = 0; x < 12; ++x) {
                const bool a = p[z](y, x), b = g[z](y, x);
                tp += a && b;
                fp += a && !b;
                fn += !a && b;
                tn += !a && !b;
            }
        }
    }
    EXPECT_EQ(m["tp"], tp);
    EXPECT_EQ(m["fp"], fp);
    EXPECT_EQ(m["fn"], fn);
    EXPECT_EQ(m["tn"], tn);
    const double j = m["iou"], d = m["dice"];
    EXPECT_NEAR(d, 2 * j / (1 + j), 1e-12);
    EXPECT_DOUBLE_EQ(j, testing::oracle_iou(p, g));
    EXPECT_TRUE(fs::exists(dir / "ov" / "0003_overlay.png"));
}

TEST(CliEvaluate, ShapeMismatchExitCode) {
    TempDir dir;
    save_stack(testing::random_mask_stack(3, 10, 10, 0.3, 1), dir / "a.tif");
    save_stack(testing::random_mask_stack(3, 10, 11, 0.3, 1), dir / "b.tif");
    EXPECT_EQ(run_cli("evaluate --pred " + q(dir / "a.tif") + " --gt " + q(dir / "b.tif"), dir).exit_code, 3);
}

// ---------------------------------------------------------------------------

TEST(CliLibrary, ParseGtIndices) {
    EXPECT_EQ(cli::parse_gt_indices("auto:2", 10), (std::vector<int>{2, 7}));
    EXPECT_EQ(cli::parse_gt_indices("1, 4,9", 10), (std::vector<int>{1, 4, 9}));
    EXPECT_THROW(cli::parse_gt_indices("1,x", 10), Error);
    EXPECT_THROW(cli::parse_gt_indices("auto:0", 10), Error);
    EXPECT_EQ(cli::exit_code_for("dimension-mismatch"), 3);
}

}  // namespace
}  // namespace emrefine
