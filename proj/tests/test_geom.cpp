#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Geometry>
#include <set>
#include <utility>

#include "patchvote/core/intrinsics.hpp"
#include "patchvote/core/pose.hpp"
#include "patchvote/core/rng.hpp"
#include "patchvote/core/viewpoints.hpp"

using namespace pv;

TEST_CASE("backproject principal ray and focal offsets") {
    const CameraIntrinsics K = default_intrinsics();

    const Eigen::Vector3d p0 = backproject(K.cx, K.cy, 1.0, K);
    CHECK(p0.isApprox(Eigen::Vector3d(0, 0, 1), 1e-12));

    const Eigen::Vector3d p1 = backproject(K.cx + K.fx, K.cy, 2.0, K);
    CHECK(p1.isApprox(Eigen::Vector3d(2.0, 0, 2.0), 1e-12));
}

TEST_CASE("backproject matches hand-evaluated pinhole arithmetic") {
    // Independent evaluation of ((u-cx)z/fx, (v-cy)z/fy, z) for
    // u=100, v=200, z=0.73, fx=fy=575, cx=320, cy=240:
    //   x = -220 * 0.73 / 575 = -0.27930434782608696
    //   y =  -40 * 0.73 / 575 = -0.05078260869565217
    const CameraIntrinsics K{575.0, 575.0, 320.0, 240.0, 640, 480};
    const Eigen::Vector3d p = backproject(100, 200, 0.73, K);
    CHECK(p.x() == Catch::Approx(-0.27930434782608696).epsilon(1e-12));
    CHECK(p.y() == Catch::Approx(-0.05078260869565217).epsilon(1e-12));
    CHECK(p.z() == 0.73);
}

TEST_CASE("project inverts backproject within 1e-6 px") {
    const CameraIntrinsics K = default_intrinsics();
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        const double u = rng.uniform(0.0, K.width - 1.0);
        const double v = rng.uniform(0.0, K.height - 1.0);
        const double z = rng.uniform(0.1, 5.0);
        const Eigen::Vector2d uv = project(backproject(u, v, z, K), K);
        CHECK(std::abs(uv.x() - u) < 1e-6);
        CHECK(std::abs(uv.y() - v) < 1e-6);
    }
}

TEST_CASE("backproject rejects non-positive depth") {
    const CameraIntrinsics K = default_intrinsics();
    CHECK_THROWS_AS(backproject(10, 10, 0.0, K), InvalidDepthError);
    CHECK_THROWS_AS(backproject(10, 10, -0.4, K), InvalidDepthError);
}

TEST_CASE("quaternion geodesic distance") {
    Rng rng(11);
    const Eigen::Quaterniond q = rng.quaternion();
    CHECK(quat_geodesic_deg(q, q) == Catch::Approx(0.0).margin(1e-9));

    const Eigen::Quaterniond nq(-q.w(), -q.x(), -q.y(), -q.z());
    CHECK(quat_geodesic_deg(q, nq) == Catch::Approx(0.0).margin(1e-9));

    // Identity vs 90 degrees about z: (cos45, 0, 0, sin45).
    const Eigen::Quaterniond id(1, 0, 0, 0);
    const double c = std::cos(M_PI / 4), s = std::sin(M_PI / 4);
    CHECK(quat_geodesic_deg(id, Eigen::Quaterniond(c, 0, 0, s)) == Catch::Approx(90.0).epsilon(1e-9));
}

TEST_CASE("quaternion geodesic is sign-invariant exactly") {
    Rng rng(13);
    for (int i = 0; i < 50; ++i) {
        const Eigen::Quaterniond a = rng.quaternion(), b = rng.quaternion();
        const Eigen::Quaterniond na(-a.w(), -a.x(), -a.y(), -a.z());
        CHECK(quat_geodesic_deg(a, b) == quat_geodesic_deg(na, b));
    }
}

TEST_CASE("pose composition is associative and inverse cancels") {
    Rng rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const Pose A(rng.quaternion(), {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
        const Pose B(rng.quaternion(), {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
        const Pose C(rng.quaternion(), {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
        const Pose left = (A * B) * C;
        const Pose right = A * (B * C);
        const Pose cancel = A.inverse() * A;
        for (int i = 0; i < 10; ++i) {
            const Eigen::Vector3d p = {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
            CHECK((left(p) - right(p)).norm() < 1e-9);
            CHECK((cancel(p) - p).norm() < 1e-9);
        }
    }
}

TEST_CASE("pose quaternions are canonical with w >= 0") {
    Rng rng(19);
    for (int i = 0; i < 100; ++i) {
        const Pose p(rng.quaternion(), Eigen::Vector3d::Zero());
        CHECK(p.rotation().w() >= 0.0);
        CHECK(p.rotation().norm() == Catch::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("icosphere vertex counts follow 10*4^n + 2") {
    CHECK(make_icosphere(0).vertices.size() == 12);
    CHECK(make_icosphere(1).vertices.size() == 42);
    CHECK(make_icosphere(2).vertices.size() == 162);
}

TEST_CASE("subdivided icosphere satisfies the Euler characteristic") {
    // Oracle: rebuild the unique-edge set from the triangle list.
    for (int sub : {0, 1, 2}) {
        const IcoSphere s = make_icosphere(sub);
        std::set<std::pair<int, int>> edges;
        for (const auto& t : s.triangles) {
            edges.insert(std::minmax(t[0], t[1]));
            edges.insert(std::minmax(t[1], t[2]));
            edges.insert(std::minmax(t[2], t[0]));
        }
        const long V = static_cast<long>(s.vertices.size());
        const long E = static_cast<long>(edges.size());
        const long F = static_cast<long>(s.triangles.size());
        CHECK(V - E + F == 2);
    }
}

TEST_CASE("viewpoint sets look at the origin from the requested radius") {
    const double radius = 0.8;
    const ViewpointSet set = sample_icosahedron_views(1, radius, 12);
    CHECK(set.vertex_count == 42);
    CHECK(set.views.size() == 504);

    for (const auto& view : set.views) {
        CHECK(std::abs(camera_position(view).norm() - radius) < 1e-9);
        // Optical axis through the origin: the origin maps to (0,0,radius).
        const Eigen::Vector3d t = view(Eigen::Vector3d::Zero());
        CHECK(std::abs(t.x()) < 1e-9);
        CHECK(std::abs(t.y()) < 1e-9);
        CHECK(t.z() == Catch::Approx(radius).epsilon(1e-9));
    }
}

TEST_CASE("viewpoint positions are distinct and densify with subdivision") {
    double prev_min_angle = 200.0;
    for (int sub : {0, 1, 2}) {
        const ViewpointSet set = sample_icosahedron_views(sub, 1.0, 1);
        double min_angle = 200.0;
        for (std::size_t i = 0; i < set.views.size(); ++i) {
            const Eigen::Vector3d pi = camera_position(set.views[i]);
            for (std::size_t j = i + 1; j < set.views.size(); ++j) {
                const Eigen::Vector3d pj = camera_position(set.views[j]);
                CHECK((pi - pj).norm() > 1e-9);
                const double cosang = std::clamp(pi.dot(pj) / (pi.norm() * pj.norm()), -1.0, 1.0);
                min_angle = std::min(min_angle, std::acos(cosang) * 180.0 / M_PI);
            }
        }
        CHECK(min_angle < prev_min_angle);
        prev_min_angle = min_angle;
    }
}

TEST_CASE("viewpoint parameter validation") {
    CHECK_THROWS_AS(sample_icosahedron_views(0, -1.0, 1), ConfigError);
    CHECK_THROWS_AS(sample_icosahedron_views(0, 1.0, 0), ConfigError);
    CHECK_THROWS_AS(make_icosphere(-1), ConfigError);
}
