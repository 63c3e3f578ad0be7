#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "patchvote/patch/augment.hpp"
#include "patchvote/patch/sampling.hpp"
#include "patchvote/render/procedural.hpp"

using namespace pv;

TEST_CASE("patch pixel size follows m/z * f") {
    const CameraIntrinsics K = pvtest::test_K();
    CHECK(patch_pixel_size(0.5, K, 0.05) == Catch::Approx(57.5).epsilon(1e-12));

    // z chosen so m*f/z = 1.
    const double z = 0.05 * K.fx;
    CHECK(patch_pixel_size(z, K, 0.05) == Catch::Approx(1.0).epsilon(1e-12));

    // Doubling depth halves the footprint exactly.
    CHECK(patch_pixel_size(0.5, K, 0.05) == 2.0 * patch_pixel_size(1.0, K, 0.05));
    CHECK_THROWS_AS(patch_pixel_size(0.0, K, 0.05), InvalidDepthError);
}

TEST_CASE("flat fronto-parallel plane yields zero depth and constant color") {
    const RgbdFrame frame = pvtest::flat_frame(pvtest::test_K(), 0.7f, {100, 150, 200});
    const auto p = extract_patch(frame, 320, 240, PatchConfig{});
    REQUIRE(p.has_value());
    CHECK(p->valid);
    CHECK(p->center_point.z() == Catch::Approx(0.7).epsilon(1e-6));

    const float r = 100 * (2.0f / 255.0f) - 1.0f;
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x) {
            REQUIRE(p->at(3, y, x) == 0.0f);
            REQUIRE(p->at(0, y, x) == Catch::Approx(r).margin(1e-6));
        }
}

TEST_CASE("depth steps beyond +m clamp to exactly +1") {
    const CameraIntrinsics K = pvtest::test_K();
    RgbdFrame frame = pvtest::flat_frame(K, 0.5f, {128, 128, 128});
    // Right half of the image is 0.2 m farther.
    for (int y = 0; y < K.height; ++y)
        for (int x = 330; x < K.width; ++x) frame.depth.at(x, y) = 0.7f;

    PatchConfig cfg;  // m = 0.05 -> window of 57.5 px at z = 0.5
    const auto p = extract_patch(frame, 320, 240, cfg);
    REQUIRE(p.has_value());

    // Output columns mapping strictly inside the stepped region: source x of
    // column ox is 320 + ((ox+0.5)/32 - 0.5)*57.5; columns >= 24 start at
    // x >= 334, comfortably past the step + bilinear support.
    float maxv = -2.0f;
    for (int y = 8; y < 24; ++y)
        for (int x = 24; x < 32; ++x) {
            REQUIRE(p->at(3, y, x) == 1.0f);
            maxv = std::max(maxv, p->at(3, y, x));
        }
    CHECK(maxv == 1.0f);
}

TEST_CASE("missing center depth skips the sample") {
    RgbdFrame frame = pvtest::flat_frame(pvtest::test_K(), 0.6f, {10, 10, 10});
    frame.depth.at(100, 100) = 0.0f;
    CHECK_FALSE(extract_patch(frame, 100, 100, PatchConfig{}).has_value());
    CHECK(extract_patch(frame, 101, 100, PatchConfig{}).has_value());
}

TEST_CASE("cube corner depth profile matches the analytic plane oracle") {
    // Cube rotated 45 deg about y: two faces visible, a depth corner runs
    // through the middle of the patch.
    const double edge = 0.2;
    const Mesh cube = make_cube(edge);
    const CameraIntrinsics K = pvtest::test_K();
    const Pose pose = Pose::from_axis_angle(Eigen::Vector3d::UnitY(), M_PI / 4, {0, 0, 0.5});
    const RenderedView view = render(cube, pose, K);
    const RgbdFrame frame = view.to_frame();

    const int u = 320, v = 240;
    const float z = frame.depth.at(u, v);
    REQUIRE(z > 0.0f);
    PatchConfig cfg;
    const auto p = extract_patch(frame, u, v, cfg);
    REQUIRE(p.has_value());

    // Analytic depth at a source pixel: nearest ray-box entry in object frame.
    const Pose inv = pose.inverse();
    auto analytic_value = [&](double sx, double sy) {
        const Eigen::Vector3d dir_cam = backproject(sx, sy, 1.0, K);
        const Eigen::Vector3d o = inv(Eigen::Vector3d::Zero());
        const Eigen::Vector3d q = inv(dir_cam);
        const auto t = pvtest::ray_box_enter(o, q - o, edge / 2);
        REQUIRE(t.has_value());
        return std::clamp(*t - static_cast<double>(z), -cfg.m, cfg.m) / cfg.m;
    };

    const double size = cfg.m / z * K.fx;
    double total_err = 0.0;
    for (int oy = 0; oy < 32; ++oy)
        for (int ox = 0; ox < 32; ++ox) {
            const double sx = u + ((ox + 0.5) / 32 - 0.5) * size;
            const double sy = v + ((oy + 0.5) / 32 - 0.5) * size;
            total_err += std::abs(p->at(3, oy, ox) - analytic_value(sx, sy));
        }
    CHECK(total_err / 1024.0 < 2e-2);
}

TEST_CASE("every emitted value stays in [-1,1] on randomized frames") {
    Rng rng(31);
    const CameraIntrinsics K{300.0, 310.0, 160.0, 120.0, 320, 240};
    long checked = 0;
    for (int trial = 0; trial < 8; ++trial) {
        RgbdFrame frame;
        frame.intrinsics = K;
        frame.color = Image<Rgb8>(K.width, K.height);
        frame.depth = Image<float>(K.width, K.height);
        for (int y = 0; y < K.height; ++y)
            for (int x = 0; x < K.width; ++x) {
                frame.color.at(x, y) = {static_cast<std::uint8_t>(rng.uniform_index(256)),
                                        static_cast<std::uint8_t>(rng.uniform_index(256)),
                                        static_cast<std::uint8_t>(rng.uniform_index(256))};
                // ~15% holes, wild depth range otherwise.
                frame.depth.at(x, y) =
                    rng.uniform() < 0.15 ? 0.0f : static_cast<float>(rng.uniform(0.05, 4.0));
            }
        for (int i = 0; i < 1250; ++i) {
            const int u = static_cast<int>(rng.uniform_index(K.width));
            const int v = static_cast<int>(rng.uniform_index(K.height));
            const auto p = extract_patch(frame, u, v, PatchConfig{});
            if (!p) continue;
            for (float val : p->data) {
                REQUIRE(val <= 1.0f);
                REQUIRE(val >= -1.0f);
            }
            checked += Patch::kValues;
        }
    }
    CHECK(checked > 10000L * 4096 / 2);
}

TEST_CASE("scene sampling visits the full grid and skips invalid depth") {
    const CameraIntrinsics K = pvtest::test_K();
    PatchConfig cfg;

    RgbdFrame full = pvtest::flat_frame(K, 0.8f, {50, 60, 70});
    CHECK(sample_scene(full, cfg).size() == 4800);  // 80 x 60 grid

    RgbdFrame empty = pvtest::flat_frame(K, 0.0f, {50, 60, 70});
    CHECK(sample_scene(empty, cfg).empty());

    // Left half valid: the count must equal an independent grid recount.
    RgbdFrame half = pvtest::flat_frame(K, 0.8f, {50, 60, 70});
    for (int y = 0; y < K.height; ++y)
        for (int x = K.width / 2; x < K.width; ++x) half.depth.at(x, y) = 0.0f;
    long expected = 0;
    for (int v = 0; v < K.height; v += cfg.grid_step)
        for (int u = 0; u < K.width; u += cfg.grid_step)
            if (half.depth.at(u, v) > 0) ++expected;
    CHECK(sample_scene(half, cfg).size() == static_cast<std::size_t>(expected));

    // Row-major deterministic order.
    const auto patches = sample_scene(full, cfg);
    CHECK(patches.front().source_pixel == Eigen::Vector2i(0, 0));
    CHECK(patches[1].source_pixel == Eigen::Vector2i(cfg.grid_step, 0));
}

TEST_CASE("view patch sampling honors the foreground threshold") {
    const Mesh cube = make_cube(0.12);
    const CameraIntrinsics K = pvtest::test_K();
    const RenderedView view = render(cube, Pose(Eigen::Quaterniond::Identity(), {0, 0, 0.6}), K);

    PatchConfig cfg;
    const auto with_threshold = sample_view_patches(view, cfg);
    CHECK_FALSE(with_threshold.empty());

    PatchConfig cfg0 = cfg;
    cfg0.fg_min_fraction = 0.0;
    const auto unthresholded = sample_view_patches(view, cfg0);
    CHECK(unthresholded.size() == sample_scene(view.to_frame(), cfg0).size());
    CHECK(unthresholded.size() >= with_threshold.size());

    // Empty view -> no patches.
    const RenderedView empty =
        render(cube, Pose(Eigen::Quaterniond::Identity(), {0, 0, -1.0}), K);
    CHECK(sample_view_patches(empty, cfg).empty());
}

TEST_CASE("view patch count matches an independent mask-fraction recount") {
    const Mesh cube = make_cube(0.12);
    const CameraIntrinsics K = pvtest::test_K();
    const RenderedView view = render(cube, Pose(Eigen::Quaterniond::Identity(), {0, 0, 0.6}), K);
    PatchConfig cfg;

    long expected = 0;
    for (int v = 0; v < K.height; v += cfg.grid_step)
        for (int u = 0; u < K.width; u += cfg.grid_step) {
            const float z = view.depth.at(u, v);
            if (!(z > 0)) continue;
            const double sx = cfg.m / z * K.fx, sy = cfg.m / z * K.fy;
            int fg = 0;
            for (int oy = 0; oy < 32; ++oy)
                for (int ox = 0; ox < 32; ++ox) {
                    int px = static_cast<int>(std::lround(u + ((ox + 0.5) / 32 - 0.5) * sx));
                    int py = static_cast<int>(std::lround(v + ((oy + 0.5) / 32 - 0.5) * sy));
                    px = std::clamp(px, 0, K.width - 1);
                    py = std::clamp(py, 0, K.height - 1);
                    fg += view.mask.at(px, py);
                }
            if (fg >= cfg.fg_min_fraction * 1024) ++expected;
        }
    CHECK(sample_view_patches(view, cfg).size() == static_cast<std::size_t>(expected));
}

TEST_CASE("emitted foreground masks match the view mask at patch centers") {
    const Mesh cube = make_cube(0.12);
    const RenderedView view =
        render(cube, Pose(Eigen::Quaterniond::Identity(), {0, 0, 0.6}), pvtest::test_K());
    const auto patches = sample_view_patches(view, PatchConfig{});
    REQUIRE_FALSE(patches.empty());
    for (const auto& vp : patches) {
        // The valid on-object center pixel lands between the four central
        // mask bits (even patch size); at least one must be foreground.
        CHECK((mask32_get(vp.fg_mask, 15, 15) || mask32_get(vp.fg_mask, 15, 16) ||
               mask32_get(vp.fg_mask, 16, 15) || mask32_get(vp.fg_mask, 16, 16)));
    }
}

TEST_CASE("augmentation ops compose as expected") {
    Rng rng(41);
    Patch p;
    for (auto& v : p.data) v = static_cast<float>(rng.uniform(-1, 1));
    p.valid = true;

    const Patch identity = apply_augment(p, AugmentOps{false, false, 0});
    CHECK(identity.data == p.data);

    // Horizontal flip is an involution.
    const Patch h2 = apply_augment(apply_augment(p, {true, false, 0}), {true, false, 0});
    CHECK(h2.data == p.data);

    // (R,G,B)->(B,R,G) three times is the identity.
    int perm_brg = -1;
    for (int i = 0; i < 6; ++i)
        if (kColorPerms[i] == std::array<int, 3>{2, 0, 1}) perm_brg = i;
    REQUIRE(perm_brg >= 0);
    Patch cycled = p;
    for (int rep = 0; rep < 3; ++rep) cycled = apply_augment(cycled, {false, false, perm_brg});
    CHECK(cycled.data == p.data);

    // Depth channel is never permuted.
    const Patch permuted = apply_augment(p, {false, false, perm_brg});
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x) REQUIRE(permuted.at(3, y, x) == p.at(3, y, x));

    // Seeded draw is deterministic.
    CHECK(augment(p, 123).data == augment(p, 123).data);
}

TEST_CASE("patches are scale-invariant across depth") {
    // Same cube face sampled at 0.5 m and 1.0 m describes the same 5 cm
    // neighborhood around the face center.
    const Mesh cube = make_cube(0.2);
    const CameraIntrinsics K = pvtest::test_K();
    PatchConfig cfg;

    const RenderedView near_view =
        render(cube, Pose(Eigen::Quaterniond::Identity(), {0, 0, 0.5 + 0.1}), K);
    const RenderedView far_view =
        render(cube, Pose(Eigen::Quaterniond::Identity(), {0, 0, 1.0 + 0.1}), K);
    const auto pn = extract_patch(near_view.to_frame(), 320, 240, cfg);
    const auto pf = extract_patch(far_view.to_frame(), 320, 240, cfg);
    REQUIRE(pn.has_value());
    REQUIRE(pf.has_value());

    double mad = 0.0;
    for (int i = 0; i < Patch::kValues; ++i) mad += std::abs(pn->data[i] - pf->data[i]);
    CHECK(mad / Patch::kValues < 0.08);
}

TEST_CASE("extraction is bit-deterministic") {
    const Mesh cube = make_cube(0.15);
    Rng rng(51);
    const RenderedView view = render(cube, Pose(rng.quaternion(), {0, 0, 0.55}), pvtest::test_K());
    const auto a = extract_patch(view.to_frame(), 300, 250, PatchConfig{});
    const auto b = extract_patch(view.to_frame(), 300, 250, PatchConfig{});
    REQUIRE(a.has_value());
    REQUIRE(b.has_value());
    CHECK(a->data == b->data);
}
