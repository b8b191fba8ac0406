#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "sweptgrid/physics.hpp"

using namespace sweptgrid;

namespace {

FieldState heat_field(int nx, double alpha, double t) {
    FieldState f(1, nx, nx, 0);
    for (int y = 0; y < nx; ++y)
        for (int x = 0; x < nx; ++x)
            f.at(0, x, y) =
                heat_analytic(static_cast<double>(x) / nx,
                              static_cast<double>(y) / nx, t, alpha);
    return f;
}

// xorshift so the fuzz fields are identical on every platform
struct Rng {
    std::uint64_t s = 0x9e3779b97f4a7c15ull;
    double next() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        return static_cast<double>(s % 10000) / 10000.0;
    }
};

FieldState perturbed_vortex(int nx, double amp) {
    const VortexSpec spec = VortexSpec::standard(1.4);
    FieldState f = vortex_init(nx, nx, spec, 1.4);
    Rng rng;
    for (double& v : f.data) v *= 1.0 + amp * (rng.next() - 0.5);
    return f;
}

}  // namespace

TEST_CASE("single FTCS step tracks the analytic decay") {
    const int nx = 64;
    const double alpha = 1.0;
    const double dx = 1.0 / nx;
    const double dt = 0.2 * dx * dx / alpha;
    const HeatParams p{alpha, dx, dx, dt};
    const FieldState before = heat_field(nx, alpha, 0.0);
    const FieldState after = heat_field(nx, alpha, dt);
    double worst = 0.0;
    for (int y = 0; y < nx; ++y)
        for (int x = 1; x < nx - 1; ++x)
            worst = std::max(worst, std::abs(heat_point(before.view(), x, y, p) -
                                             after.at(0, x, y)));
    CHECK(worst < 1e-5);  // truncation ~ dt * dx^2 * (2 pi)^4 / 12
}

TEST_CASE("uniform fields are exact fixed points") {
    const int nx = 16;
    SUBCASE("diffusion") {
        FieldState f(1, nx, nx, 0);
        for (double& v : f.data) v = 3.5;
        const HeatParams p{1.0, 0.1, 0.1, 0.001};
        for (int y = 0; y < nx; ++y)
            for (int x = 1; x < nx - 1; ++x)
                CHECK(heat_point(f.view(), x, y, p) == 3.5);
    }
    SUBCASE("free stream") {
        FieldState f(4, nx, nx, 0);
        const Vec4 q{1.0, 0.7, -0.3, 2.0};
        for (int y = 0; y < nx; ++y)
            for (int x = 0; x < nx; ++x)
                for (int v = 0; v < 4; ++v) f.at(v, x, y) = q[v];
        const EulerParams p{1.4, 0.1, 0.1, 0.001, 0.4};
        for (int y = 0; y < nx; ++y)
            for (int x = 2; x < nx - 2; ++x) {
                const Vec4 star = euler_predictor_point(f.view(), x, y, p);
                for (int v = 0; v < 4; ++v) CHECK(star[v] == q[v]);
            }
    }
}

TEST_CASE("pressure rejects non-physical states") {
    CHECK(pressure({1.0, 0.0, 0.0, 1.0}, 1.4) == doctest::Approx(0.4));
    CHECK_THROWS_AS(pressure({-1.0, 0.0, 0.0, 1.0}, 1.4), NonPhysicalState);
    CHECK_THROWS_AS(pressure({0.0, 0.0, 0.0, 1.0}, 1.4), NonPhysicalState);
    CHECK_THROWS_AS(pressure({1.0, 10.0, 0.0, 1.0}, 1.4), NonPhysicalState);
}

TEST_CASE("interface flux of identical states is the exact analytic flux") {
    const Vec4 q{1.2, 0.4, -0.2, 3.0};
    const Vec4 fx = euler_flux_x(q, 1.4);
    const Vec4 fi = interface_flux(q, q, 0, 1.4);
    const Vec4 gy = euler_flux_y(q, 1.4);
    const Vec4 gi = interface_flux(q, q, 1, 1.4);
    for (int v = 0; v < 4; ++v) {
        CHECK(fi[v] == fx[v]);
        CHECK(gi[v] == gy[v]);
    }
}

TEST_CASE("limiter falls back to first order on non-monotone pressure") {
    const Vec4 a{1.0, 0.1, 0.0, 2.0}, b{1.1, 0.1, 0.0, 2.2},
        c{1.05, 0.1, 0.0, 2.1}, d{1.2, 0.1, 0.0, 2.4};
    Vec4 ql, qr;
    // pressure extremum between b and c: both ratios non-positive
    minmod_reconstruct(a, b, c, d, 1.0, 1.2, 1.1, 1.3, ql, qr);
    CHECK(ql == b);
    CHECK(qr == c);
    // smooth monotone data stays within the cell pair
    minmod_reconstruct(a, b, c, d, 1.0, 1.1, 1.2, 1.3, ql, qr);
    for (int v = 0; v < 4; ++v) {
        CHECK(std::min(b[v], c[v]) <= std::max(ql[v], qr[v]));
        CHECK(ql[v] == b[v] + 0.5 * (c[v] - b[v]));
    }
}

TEST_CASE("vortex field matches its free stream far away and at t = 0") {
    const double gamma = 1.4;
    const VortexSpec spec = VortexSpec::standard(gamma);
    CHECK(spec.beta == doctest::Approx(1.10885).epsilon(1e-4));
    const Vec4 far = vortex_state(4.9, 4.9, spec, gamma);
    const double u = spec.mach * std::cos(spec.alpha);
    CHECK(far[0] == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(far[1] / far[0] == doctest::Approx(u).epsilon(1e-3));
    const FieldState a = vortex_init(32, 32, spec, gamma);
    const FieldState b = vortex_analytic(32, 32, spec, gamma, 0.0);
    CHECK(std::memcmp(a.data.data(), b.data.data(),
                      a.data.size() * sizeof(double)) == 0);
}

TEST_CASE("analytic vortex advects with the free stream, periodically") {
    const double gamma = 1.4;
    const VortexSpec spec = VortexSpec::standard(gamma);
    const int nx = 40;
    // one full periodic transit along x brings the field back
    const double u = spec.mach * std::cos(spec.alpha);
    const double t_period = 2.0 * spec.half_extent / u;
    const FieldState a = vortex_analytic(nx, nx, spec, gamma, 0.0);
    const FieldState b = vortex_analytic(nx, nx, spec, gamma, t_period);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        worst = std::max(worst, std::abs(a.data[i] - b.data[i]));
    CHECK(worst < 1e-9);
}

TEST_CASE("parallel driver reproduces the serial reference bit for bit") {
    const int nx = 48;
    const EulerParams ep{1.4, 0.05, 0.05, 1e-4, 0.4};
    const HeatParams hp{1.0, 0.05, 0.05, 1e-4};
    const std::vector<CellBlock> blocks{{{4, 20, 2, 30}, 1}, {{20, 44, 0, 48}, 1}};

    SUBCASE("euler predictor and corrector") {
        FieldState f = perturbed_vortex(nx, 0.01);
        FieldState prev = perturbed_vortex(nx, 0.005);
        for (int stage = 0; stage < 2; ++stage) {
            FieldState out_s(4, nx, nx, 0), out_p(4, nx, nx, 0);
            SubstepArgs args;
            args.problem = Problem::Euler;
            args.stage = stage;
            args.read1 = f.view();
            args.read2 = prev.view();
            args.euler = ep;
            args.out = out_s.span();
            run_substep_serial(args, blocks);
            args.out = out_p.span();
            run_substep_omp(args, blocks, 2);
            CHECK(std::memcmp(out_s.data.data(), out_p.data.data(),
                              out_s.data.size() * sizeof(double)) == 0);
        }
    }
    SUBCASE("heat") {
        FieldState f = heat_field(nx, 1.0, 0.0);
        FieldState out_s(1, nx, nx, 0), out_p(1, nx, nx, 0);
        SubstepArgs args;
        args.problem = Problem::Heat;
        args.stage = 0;
        args.read1 = f.view();
        args.read2 = f.view();
        args.heat = hp;
        args.out = out_s.span();
        run_substep_serial(args, blocks);
        args.out = out_p.span();
        run_substep_omp(args, blocks, 2);
        CHECK(std::memcmp(out_s.data.data(), out_p.data.data(),
                          out_s.data.size() * sizeof(double)) == 0);
    }
}

TEST_CASE("repeated kernel passes are idempotent") {
    const int nx = 32;
    FieldState f = perturbed_vortex(nx, 0.01);
    const std::vector<CellBlock> once{{{4, 28, 0, 32}, 1}};
    const std::vector<CellBlock> thrice{{{4, 28, 0, 32}, 3}};
    SubstepArgs args;
    args.problem = Problem::Euler;
    args.stage = 0;
    args.read1 = f.view();
    args.read2 = f.view();
    args.euler = {1.4, 0.05, 0.05, 1e-4, 0.4};
    FieldState a(4, nx, nx, 0), b(4, nx, nx, 0);
    args.out = a.span();
    run_substep_omp(args, once, 1);
    args.out = b.span();
    run_substep_omp(args, thrice, 1);
    CHECK(std::memcmp(a.data.data(), b.data.data(),
                      a.data.size() * sizeof(double)) == 0);
}
