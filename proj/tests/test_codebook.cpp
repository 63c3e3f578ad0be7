#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "patchvote/codebook/codebook_io.hpp"
#include "patchvote/render/procedural.hpp"

using namespace pv;
namespace fs = std::filesystem;

namespace {

Regressor tiny_pca(int F, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Patch> patches(std::max(F + 5, 24));
    for (auto& p : patches) {
        for (auto& v : p.data) v = static_cast<float>(rng.uniform(-1, 1));
        p.valid = true;
    }
    return Regressor::from_pca(pca_fit(patches, F));
}

ViewpointSet single_view(double radius) {
    ViewpointSet set;
    set.vertex_count = 1;
    set.inplane_steps = 1;
    set.radius = radius;
    set.views.push_back(lookat_origin({0, 0, -radius}));
    return set;
}

Codebook random_codebook(int n, int F, std::uint64_t seed) {
    Rng rng(seed);
    Codebook book(F);
    std::vector<float> desc(F);
    for (int i = 0; i < n; ++i) {
        for (auto& v : desc) v = static_cast<float>(rng.uniform(-1, 1));
        CodebookEntry e;
        e.vote.offset = Eigen::Vector3f(0.01f, 0, 0);
        e.vote.orientation = rng.quaternion().cast<float>();
        e.object_id = 1 + static_cast<std::uint32_t>(i % 3);
        book.add(desc.data(), e);
    }
    book.rebuild_index();
    return book;
}

}  // namespace

TEST_CASE("one view yields one entry per sampled patch") {
    const Mesh cube = make_cube(0.12);
    const Regressor reg = tiny_pca(16, 1);
    const ViewpointSet views = single_view(0.6);
    const CameraIntrinsics K = pvtest::test_K();
    PatchConfig cfg;

    const Codebook book = build_codebook(cube, 7, views, reg, cfg, K);
    const auto patches = sample_view_patches(render(cube, views.views[0], K), cfg);
    CHECK(book.size() == patches.size());
    CHECK(book.feature_dim() == 16);
    for (std::size_t i = 0; i < book.size(); ++i) CHECK(book.entry(i).object_id == 7);
}

TEST_CASE("patch center plus offset reproduces the rendered object centroid") {
    const Mesh cube = make_cube(0.1);
    const Regressor reg = tiny_pca(16, 2);
    const ViewpointSet views = sample_icosahedron_views(0, 0.55, 2);
    const CameraIntrinsics K = pvtest::test_K();
    PatchConfig cfg;

    const Codebook book = build_codebook(cube, 1, views, reg, cfg, K);
    REQUIRE(book.size() > 100);

    // Reconstruct per-view centroids independently.
    std::size_t i = 0;
    for (const Pose& pose : views.views) {
        const Eigen::Vector3d centroid_cam = pose(cube.centroid);
        const auto patches = sample_view_patches(render(cube, pose, K), cfg);
        for (const auto& vp : patches) {
            REQUIRE(i < book.size());
            const Eigen::Vector3d reconstructed =
                vp.patch.center_point + book.entry(i).vote.offset.cast<double>();
            REQUIRE((reconstructed - centroid_cam).norm() < 1e-6);
            ++i;
        }
    }
    CHECK(i == book.size());
}

TEST_CASE("entry count matches an independent sampling recount") {
    const Mesh cube = make_cube(0.12);
    const Regressor reg = tiny_pca(16, 3);
    const ViewpointSet views = sample_icosahedron_views(1, 0.6, 1);  // 42 views
    const CameraIntrinsics K = pvtest::test_K();
    PatchConfig cfg;  // step 8, fg 0.5

    const Codebook book = build_codebook(cube, 1, views, reg, cfg, K);
    std::size_t expected = 0;
    for (const Pose& pose : views.views)
        expected += sample_view_patches(render(cube, pose, K), cfg).size();
    CHECK(book.size() == expected);
}

TEST_CASE("local votes stay within the object diameter with valid quaternions") {
    const Mesh prism = make_lprism(0.1, 0.08, 0.035, 0.05);
    const Regressor reg = tiny_pca(16, 4);
    const ViewpointSet views = sample_icosahedron_views(0, 0.5, 3);
    const Codebook book = build_codebook(prism, 2, views, reg, PatchConfig{}, pvtest::test_K());
    REQUIRE_FALSE(book.empty());
    for (std::size_t i = 0; i < book.size(); ++i) {
        const auto& vote = book.entry(i).vote;
        REQUIRE(vote.offset.norm() <= prism.diameter + 1e-6);
        REQUIRE(vote.orientation.norm() == Catch::Approx(1.0).epsilon(1e-5));
        REQUIRE(vote.orientation.w() >= 0.0f);
    }
}

TEST_CASE("merge preserves entries and enforces matching dimensions") {
    const Codebook a = random_codebook(50, 16, 5);
    const Codebook b = random_codebook(70, 16, 6);

    const Codebook one = Codebook::merge({&a});
    REQUIRE(one.size() == a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(one.entry(i).object_id == a.entry(i).object_id);
        for (int d = 0; d < 16; ++d) REQUIRE(one.descriptor(i)[d] == a.descriptor(i)[d]);
    }

    const Codebook both = Codebook::merge({&a, &b});
    CHECK(both.size() == 120);

    const Codebook other = random_codebook(10, 8, 7);
    CHECK_THROWS_AS(Codebook::merge({&a, &other}), ConfigError);
}

TEST_CASE("merged queries return the k best of the union") {
    const Codebook a = random_codebook(60, 12, 8);
    const Codebook b = random_codebook(40, 12, 9);
    const Codebook merged = Codebook::merge({&a, &b});

    Rng rng(10);
    std::vector<float> q(12);
    for (int trial = 0; trial < 20; ++trial) {
        for (auto& v : q) v = static_cast<float>(rng.uniform(-1, 1));
        const auto ra = a.knn(q.data(), 5, KnnMode::Exact);
        const auto rb = b.knn(q.data(), 5, KnnMode::Exact);
        std::vector<float> union_d;
        for (const auto& nb : ra) union_d.push_back(nb.dist);
        for (const auto& nb : rb) union_d.push_back(nb.dist);
        std::sort(union_d.begin(), union_d.end());
        const auto rm = merged.knn(q.data(), 5, KnnMode::Exact);
        for (int i = 0; i < 5; ++i) REQUIRE(rm[i].dist == Catch::Approx(union_d[i]).margin(1e-7));
    }
}

TEST_CASE("exact knn basics") {
    const Codebook book = random_codebook(30, 16, 11);

    // Query equal to a stored descriptor.
    const auto hit = book.knn(book.descriptor(17), 1, KnnMode::Exact);
    REQUIRE(hit.size() == 1);
    CHECK(hit[0].index == 17);
    CHECK(hit[0].dist == 0.0f);

    // k >= entry count returns everything, ascending.
    const auto all = book.knn(book.descriptor(0), 100, KnnMode::Exact);
    REQUIRE(all.size() == 30);
    for (std::size_t i = 1; i < all.size(); ++i) REQUIRE(all[i - 1].dist <= all[i].dist);

    const Codebook empty(16);
    std::vector<float> q(16, 0.0f);
    CHECK(empty.knn(q.data(), 3, KnnMode::Exact).empty());
    CHECK_THROWS_AS(book.knn(q.data(), 0, KnnMode::Exact), ConfigError);
}

TEST_CASE("exact knn equals a naive scan on random books") {
    Rng rng(12);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 20 + static_cast<int>(rng.uniform_index(200));
        const int F = 4 + static_cast<int>(rng.uniform_index(24));
        const Codebook book = random_codebook(n, F, 100 + trial);
        std::vector<float> q(F);
        for (auto& v : q) v = static_cast<float>(rng.uniform(-1, 1));
        const int k = 1 + static_cast<int>(rng.uniform_index(8));

        // Naive O(N k) scan.
        std::vector<std::pair<float, std::uint32_t>> naive;
        for (int i = 0; i < n; ++i) {
            float sq = 0;
            for (int d = 0; d < F; ++d) {
                const float diff = q[d] - book.descriptor(i)[d];
                sq += diff * diff;
            }
            naive.emplace_back(std::sqrt(sq), i);
        }
        std::sort(naive.begin(), naive.end());

        const auto result = book.knn(q.data(), k, KnnMode::Exact);
        REQUIRE(result.size() == static_cast<std::size_t>(std::min(k, n)));
        for (std::size_t i = 0; i < result.size(); ++i) {
            REQUIRE(result[i].dist == Catch::Approx(naive[i].first).margin(1e-6));
        }
    }
}

TEST_CASE("approximate search reaches 0.9 recall on random descriptors") {
    const int n = 5000, F = 32, k = 3;
    Rng rng(13);
    std::vector<float> data(static_cast<std::size_t>(n) * F);
    for (auto& v : data) v = static_cast<float>(rng.uniform(-1, 1));
    KdForest forest;
    forest.build(data.data(), n, F, {});

    int hits = 0, total = 0;
    std::vector<float> q(F);
    for (int t = 0; t < 100; ++t) {
        for (auto& v : q) v = static_cast<float>(rng.uniform(-1, 1));
        const auto exact = forest.knn_exact(q.data(), k);
        const auto approx = forest.knn_approx(q.data(), k, 2500);
        for (const auto& e : exact) {
            ++total;
            for (const auto& a : approx)
                if (a.index == e.index) {
                    ++hits;
                    break;
                }
        }
    }
    CHECK(static_cast<double>(hits) / total >= 0.9);
}

TEST_CASE("codebook files round trip and validate") {
    const fs::path dir = fs::temp_directory_path() / "pv_codebook_io";
    fs::create_directories(dir);
    const Codebook book = random_codebook(123, 16, 14);
    const std::string path = (dir / "book.pvcb").string();
    save_codebook(book, path);

    const Codebook loaded = load_codebook(path);
    REQUIRE(loaded.size() == book.size());
    REQUIRE(loaded.feature_dim() == book.feature_dim());
    CHECK(loaded.index_built());
    for (std::size_t i = 0; i < book.size(); ++i) {
        for (int d = 0; d < 16; ++d) REQUIRE(loaded.descriptor(i)[d] == book.descriptor(i)[d]);
        REQUIRE(loaded.entry(i).object_id == book.entry(i).object_id);
        REQUIRE(loaded.entry(i).fg_mask == book.entry(i).fg_mask);
        REQUIRE(loaded.entry(i).vote.offset == book.entry(i).vote.offset);
        REQUIRE(loaded.entry(i).vote.orientation.coeffs() ==
                book.entry(i).vote.orientation.coeffs());
        REQUIRE(loaded.entry(i).vote.orientation.w() >= 0.0f);
    }

    // Predicted size: 20-byte header + count * entry bytes.
    const std::size_t predicted = 20 + book.size() * codebook_entry_bytes(16);
    CHECK(fs::file_size(path) == predicted);

    // Truncation is an error, not a crash.
    {
        std::ifstream in(path, std::ios::binary);
        std::string bytes((std::istreambuf_iterator<char>(in)), {});
        bytes.resize(bytes.size() / 2);
        std::ofstream out((dir / "trunc.pvcb").string(), std::ios::binary);
        out << bytes;
    }
    CHECK_THROWS_AS(load_codebook((dir / "trunc.pvcb").string()), FormatError);
    {
        std::ofstream out((dir / "magic.pvcb").string(), std::ios::binary);
        out << "WHAT1234123412341234";
    }
    CHECK_THROWS_AS(load_codebook((dir / "magic.pvcb").string()), FormatError);
}

TEST_CASE("large codebook file size matches the layout formula within 1 percent") {
    const fs::path dir = fs::temp_directory_path() / "pv_codebook_io";
    fs::create_directories(dir);
    const int F = 32;
    Rng rng(15);
    Codebook book(F);
    std::vector<float> desc(F);
    CodebookEntry e;
    e.vote.orientation = Eigen::Quaternionf::Identity();
    for (int i = 0; i < 100000; ++i) {
        for (auto& v : desc) v = static_cast<float>(rng.uniform(-1, 1));
        e.object_id = 1;
        book.add(desc.data(), e);
    }
    const std::string path = (dir / "big.pvcb").string();
    save_codebook(book, path);
    const double predicted = 20.0 + 100000.0 * codebook_entry_bytes(F);
    const double actual = static_cast<double>(fs::file_size(path));
    CHECK(std::abs(actual - predicted) / predicted < 0.01);
    fs::remove(path);
}

TEST_CASE("tau calibration scales with descriptor spread") {
    const Codebook tight = random_codebook(200, 8, 16);
    Codebook spread(8);
    {
        Rng rng(17);
        std::vector<float> desc(8);
        CodebookEntry e;
        e.vote.orientation = Eigen::Quaternionf::Identity();
        for (int i = 0; i < 200; ++i) {
            for (auto& v : desc) v = static_cast<float>(rng.uniform(-10, 10));
            spread.add(desc.data(), e);
        }
        spread.rebuild_index();
    }
    const double tau_tight = calibrate_tau(tight);
    const double tau_spread = calibrate_tau(spread);
    CHECK(tau_tight > 0.0);
    CHECK(tau_spread > 3.0 * tau_tight);
}
