#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <doctest.h>

#include "binnet/dataset.hpp"
#include "binnet/explain.hpp"
#include "binnet/nn.hpp"
#include "golden_values.h"
#include "toy_net.hpp"
#include "binnet/rng.hpp"

using namespace binnet;
namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kLabels = {"a", "b", "c", "d", "e", "f"};

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("binnet-explain-" + std::to_string(Rng(std::random_device{}()).next_u64()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace

TEST_SUITE("explain") {

TEST_CASE("heatmap respects shape, range and the all-zero case") {
    auto net = build_network("cnn-small", {3, 16, 16}, kLabels, 5);
    Rng rng(3);
    Tensor img({3, 16, 16});
    for (std::int64_t i = 0; i < img.size(); ++i)
        img[i] = static_cast<float>(rng.next_double());

    const Heatmap hm = grad_cam(net, img, 2);
    CHECK(hm.values.shape() == Shape{16, 16});
    CHECK(hm.target_class == 2);
    float peak = 0;
    for (std::int64_t i = 0; i < hm.values.size(); ++i) {
        CHECK(hm.values[i] >= 0.0f);
        CHECK(hm.values[i] <= 1.0f);
        peak = std::max(peak, hm.values[i]);
    }
    CHECK(peak == doctest::Approx(1.0f));
    CHECK(hm.probability >= 0.0);
    CHECK(hm.probability <= 1.0);

    // zeroed conv weights kill every activation: heatmap stays identically 0
    auto dead = net;
    for (auto& g : dead.groups)
        if (g.kind == GroupKind::conv_block)
            for (auto& p : g.params) p.fill(0.0f);
    const Heatmap flat = grad_cam(dead, img, 0);
    for (std::int64_t i = 0; i < flat.values.size(); ++i) CHECK(flat.values[i] == 0.0f);
}

TEST_CASE("heatmap is invariant under uniform positive scaling of head weights") {
    auto net = build_network("cnn-small", {3, 16, 16}, kLabels, 9);
    Rng rng(4);
    Tensor img({3, 16, 16});
    for (std::int64_t i = 0; i < img.size(); ++i)
        img[i] = static_cast<float>(rng.next_double());

    const Heatmap base = grad_cam(net, img, 1);
    auto scaled = net;
    for (auto& p : scaled.head().params)
        for (std::int64_t i = 0; i < p.size(); ++i) p[i] *= 3.0f;
    const Heatmap after = grad_cam(scaled, img, 1);
    for (std::int64_t i = 0; i < base.values.size(); ++i)
        CHECK(after.values[i] == doctest::Approx(base.values[i]).epsilon(1e-4));
    CHECK(toynet::heatmap_argmax(after) == toynet::heatmap_argmax(base));
}

TEST_CASE("grad-cam argmax lands within 1 pixel of the occlusion argmax") {
    auto net = toynet::hot_pixel_net(12, 12);
    Rng rng(21);
    int hits = 0;
    for (int trial = 0; trial < 5; ++trial) {
        Tensor img = Tensor::full({3, 12, 12}, 0.05f);
        const auto y = 2 + static_cast<std::int64_t>(rng.below(8));
        const auto x = 2 + static_cast<std::int64_t>(rng.below(8));
        img[(1 * 12 + y) * 12 + x] = 1.0f; // single bright green pixel

        const auto cam = toynet::heatmap_argmax(grad_cam(net, img, 0));
        const auto occ = toynet::occlusion_argmax(net, img, 0);
        if (std::llabs(cam.first - occ.first) <= 1 && std::llabs(cam.second - occ.second) <= 1)
            ++hits;
    }
    CHECK(hits >= 4);
}

TEST_CASE("grad-cam validates its inputs") {
    auto net = build_network("cnn-small", {3, 16, 16}, kLabels, 5);
    CHECK_THROWS_AS(grad_cam(net, Tensor::zeros({3, 8, 8}), 0), dimension_error);
    CHECK_THROWS_AS(grad_cam(net, Tensor::zeros({3, 16, 16}), 9), label_error);

    Network headless;
    headless.architecture_id = "dense-only";
    headless.input_shape = {3, 4, 4};
    headless.class_labels = {"x", "y"};
    LayerGroup head;
    head.name = "head";
    head.depth_index = 0;
    head.kind = GroupKind::dense_head;
    head.params.push_back(Tensor::zeros({48, 2}));
    head.params.push_back(Tensor::zeros({2}));
    headless.groups.push_back(std::move(head));
    CHECK_THROWS_AS(grad_cam(headless, Tensor::zeros({3, 4, 4}), 0),
                    unsupported_architecture_error);
}

TEST_CASE("render_annotated blends toward red by exactly alpha = heat/2") {
    TempDir dir;
    Rng rng(8);
    Tensor img({3, 6, 6});
    for (std::int64_t i = 0; i < img.size(); ++i)
        img[i] = static_cast<float>(rng.below(256)) / 255.0f;

    Caption caption{"metal", "glass", 9.28, 0.0};

    SUBCASE("zero heatmap leaves the image untouched") {
        Heatmap hm;
        hm.values = Tensor::zeros({6, 6});
        const std::string out = (dir.path / "zero.ppm").string();
        render_annotated(img, hm, caption, out, (dir.path / "zero.txt").string());
        const Tensor back = read_ppm(out);
        for (std::int64_t i = 0; i < img.size(); ++i)
            CHECK(back[i] == doctest::Approx(img[i]).epsilon(1e-6));
    }

    SUBCASE("unit heatmap applies the blend formula pixelwise") {
        Heatmap hm;
        hm.values = Tensor::full({6, 6}, 1.0f);
        const std::string out = (dir.path / "one.ppm").string();
        render_annotated(img, hm, caption, out, (dir.path / "one.txt").string());
        const Tensor back = read_ppm(out);
        for (std::int64_t y = 0; y < 6; ++y)
            for (std::int64_t x = 0; x < 6; ++x)
                for (std::int64_t c = 0; c < 3; ++c) {
                    const float expect = 0.5f * img[(c * 6 + y) * 6 + x] + (c == 0 ? 0.5f : 0.0f);
                    const float quantized =
                        static_cast<float>(std::lround(std::clamp(expect, 0.0f, 1.0f) * 255.0f)) /
                        255.0f;
                    CHECK(back[(c * 6 + y) * 6 + x] == doctest::Approx(quantized).epsilon(1e-6));
                }
    }

    SUBCASE("caption sidecar carries the Fig-9-style fields") {
        Heatmap hm;
        hm.values = Tensor::zeros({6, 6});
        const std::string cap_path = (dir.path / "cap.txt").string();
        render_annotated(img, hm, caption, (dir.path / "img.ppm").string(), cap_path);
        std::ifstream in(cap_path);
        std::stringstream buf;
        buf << in.rdbuf();
        const std::string text = buf.str();
        CHECK(text.find("Prediction/Actual Loss/Probability: metal/glass 9.28/0.00") !=
              std::string::npos);
        CHECK(text.find("prediction=metal") != std::string::npos);
        CHECK(text.find("actual=glass") != std::string::npos);
        CHECK(text.find("loss=9.28") != std::string::npos);
    }
}

// Regression fixture: bytes of the overlay for a fixed toy net and image,
// frozen as a 64-bit FNV hash at first generation.
TEST_CASE("annotated overlay golden bytes") {
    TempDir dir;
    auto net = toynet::hot_pixel_net(8, 8);
    Tensor img = Tensor::full({3, 8, 8}, 0.1f);
    img[(1 * 8 + 3) * 8 + 4] = 1.0f;
    const Heatmap hm = grad_cam(net, img, 0);
    const std::string out = (dir.path / "golden.ppm").string();
    render_annotated(img, hm, Caption{"hot", "hot", 0.1, 0.9}, out,
                     (dir.path / "golden.txt").string());
    std::ifstream in(out, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    CHECK(fnv1a(buf.str()) == GOLDEN_OVERLAY_HASH);
}

} // TEST_SUITE
