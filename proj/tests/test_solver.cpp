#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "dde/metrics.hpp"
#include "dde/solver.hpp"

using namespace dde;

namespace {

// straightforward flat-loop re-implementation of the exact-information
// recursion, kept independent of the solver under test
std::vector<std::vector<double>> naive_euler(const TestProblem& p, double tau, int n,
                                             int N) {
    const double h = tau / N;
    std::vector<std::vector<double>> layers;
    layers.emplace_back(N + 1, p.eta[0]);
    for (int j = 0; j <= n; ++j) {
        std::vector<double> cur(N + 1);
        cur[0] = layers.back()[N];
        for (int k = 0; k < N; ++k) {
            const double t = j * tau + k * h;
            const double y[1] = {cur[k]}, z[1] = {layers.back()[k]};
            double f[1];
            eval_rhs(p, t, {y, 1}, {z, 1}, {f, 1});
            cur[k + 1] = cur[k] + h * f[0];
        }
        layers.push_back(cur);
    }
    layers.erase(layers.begin());
    return layers;
}

bool bit_identical(const LayeredTrajectory& a, const LayeredTrajectory& b) {
    if (a.grid() != b.grid() || a.dim() != b.dim()) return false;
    for (int j = -1; j <= a.grid().n; ++j)
        if (a.layer_data(j) != b.layer_data(j)) return false;
    return true;
}

}  // namespace

TEST_CASE("zero drift keeps every node at the history value") {
    SolveRequest req;
    req.problem = make_test_problem(ProblemId::LipBenchmark, 1.0, 0.0);  // f = z, eta = 0
    req.grid = build_grid(1.0, 2, 5);
    req.noise = NoiseSpec{0.0, NoiseMode::Zero, 0};
    const LayeredTrajectory traj = euler_solve(req);
    for (int j = -1; j <= 2; ++j)
        for (int k = 0; k <= 5; ++k) CHECK(traj.value(j, k) == 0.0);
}

TEST_CASE("constant drift integrates to k*h") {
    TestProblem constant = make_test_problem(ProblemId::F1, 1.0, 0.0);
    constant.drift_a = 1.0;  // f == 1 once the other terms are disabled
    constant.drift_b = constant.drift_c = constant.drift_d = 0.0;
    SolveRequest req;
    req.problem = constant;
    req.grid = build_grid(1.0, 0, 4);
    req.noise = NoiseSpec{0.0, NoiseMode::Zero, 0};
    const LayeredTrajectory traj = euler_solve(req);
    const double expected[5] = {0.0, 0.25, 0.5, 0.75, 1.0};
    for (int k = 0; k <= 4; ++k) CHECK(traj.value(0, k) == expected[k]);
}

TEST_CASE("hand-executed benchmark recursion") {
    SolveRequest req;
    req.problem = make_test_problem(ProblemId::LipBenchmark, 1.0);  // eta = 1
    req.grid = build_grid(1.0, 1, 2);
    req.noise = NoiseSpec{0.0, NoiseMode::Zero, 0};
    const LayeredTrajectory traj = euler_solve(req);
    CHECK(traj.value(0, 0) == 1.0);
    CHECK(traj.value(0, 1) == 1.5);
    CHECK(traj.value(0, 2) == 2.0);
    CHECK(traj.value(1, 0) == 2.0);
    CHECK(traj.value(1, 1) == 2.5);
    CHECK(traj.value(1, 2) == 3.25);
}

TEST_CASE("solver agrees with an independent re-implementation") {
    for (ProblemId id : {ProblemId::F1, ProblemId::F2, ProblemId::F4,
                         ProblemId::LipBenchmark}) {
        SolveRequest req;
        req.problem = make_test_problem(id, 0.225);
        req.grid = build_grid(2.5, 3, 40);
        req.noise = NoiseSpec{0.0, NoiseMode::Zero, 0};
        const LayeredTrajectory traj = euler_solve(req);
        const auto naive = naive_euler(req.problem, 2.5, 3, 40);
        for (int j = 0; j <= 3; ++j)
            for (int k = 0; k <= 40; ++k)
                CHECK(traj.value(j, k) ==
                      naive[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)]);
    }
}

TEST_CASE("trajectories satisfy the shared-endpoint and history invariants") {
    SolveRequest req;
    req.problem = make_test_problem(ProblemId::F3, 0.225);
    req.grid = build_grid(20.0, 9, 50);
    req.noise = NoiseSpec{0.5, NoiseMode::UniformRandom, 99};
    const LayeredTrajectory traj = euler_solve(req);
    for (int k = 0; k <= 50; ++k) CHECK(traj.value(-1, k) == traj.value(-1, 0));
    for (int j = 0; j <= 9; ++j) CHECK(traj.value(j, 0) == traj.value(j - 1, 50));
    for (int j = -1; j <= 9; ++j)
        for (int k = 0; k <= 50; ++k) REQUIRE(std::isfinite(traj.value(j, k)));
}

TEST_CASE("noisy and noiseless schemes coincide at delta = 0") {
    for (ProblemId id : {ProblemId::F1, ProblemId::F2, ProblemId::F3, ProblemId::F4}) {
        SolveRequest zero;
        zero.problem = make_test_problem(id, 0.225);
        zero.grid = build_grid(20.0, 4, 60);
        zero.noise = NoiseSpec{0.0, NoiseMode::Zero, 7};
        SolveRequest uniform = zero;
        uniform.noise = NoiseSpec{0.0, NoiseMode::UniformRandom, 7};
        CHECK(bit_identical(euler_solve(zero), euler_solve(uniform)));
    }
}

TEST_CASE("same request reproduces the same noisy trajectory") {
    SolveRequest req;
    req.problem = make_test_problem(ProblemId::F2, 0.225);
    req.grid = build_grid(5.0, 2, 30);
    req.noise = NoiseSpec{0.5, NoiseMode::UniformRandom, 31337};
    req.trial_index = 4;
    CHECK(bit_identical(euler_solve(req), euler_solve(req)));

    SolveRequest other = req;
    other.trial_index = 5;
    CHECK_FALSE(bit_identical(euler_solve(req), euler_solve(other)));
}

TEST_CASE("reference solve") {
    const TestProblem lip = make_test_problem(ProblemId::LipBenchmark, 1.0);
    const DelayGrid coarse = build_grid(1.0, 1, 100);

    // refinement 1 is exactly the plain solve
    SolveRequest req;
    req.problem = lip;
    req.grid = coarse;
    req.noise = NoiseSpec{0.0, NoiseMode::Zero, 0};
    CHECK(bit_identical(reference_solve(lip, coarse, 1), euler_solve(req)));

    // refinement 50 lands within C*h_fine of the closed form at every node
    const LayeredTrajectory ref = reference_solve(lip, coarse, 50);
    for (int j = 0; j <= 1; ++j)
        for (int k = 0; k <= 100; ++k) {
            const double t = coarse.node_time(j, k);
            CHECK(ref.value(j, k) ==
                  Catch::Approx(closed_form_lip(t, 1.0, 1.0, 1)).margin(1e-3));
        }

    // deterministic: two calls give bit-identical trajectories
    const TestProblem f4 = make_test_problem(ProblemId::F4, 1.0);
    const DelayGrid g = build_grid(2.0, 2, 40);
    CHECK(bit_identical(reference_solve(f4, g, 10), reference_solve(f4, g, 10)));
}

TEST_CASE("benchmark converges at first order") {
    std::vector<std::pair<double, double>> points;
    for (int N : {50, 100, 200, 400, 800}) {
        SolveRequest req;
        req.problem = make_test_problem(ProblemId::LipBenchmark, 1.0);
        req.grid = build_grid(1.0, 2, N);
        req.noise = NoiseSpec{0.0, NoiseMode::Zero, 0};
        const LayeredTrajectory traj = euler_solve(req);
        double err = 0.0;
        for (int j = 0; j <= 2; ++j)
            for (int k = 0; k <= N; ++k)
                err = std::max(err, std::abs(traj.value(j, k) -
                                             closed_form_lip(req.grid.node_time(j, k),
                                                             1.0, 1.0, 2)));
        points.emplace_back(req.grid.h, err);
    }
    const double slope = estimate_order(points, 5);
    CHECK(slope > 0.9);
    CHECK(slope < 1.1);
}

TEST_CASE("max node norm stays bounded as the grid refines") {
    // spot check of the N-uniform boundedness property
    const TestProblem f1 = make_test_problem(ProblemId::F1, 0.225);
    double at100 = 0.0, maxall = 0.0;
    for (int N : {100, 400, 1600}) {
        SolveRequest req;
        req.problem = f1;
        req.grid = build_grid(20.0, 9, N);
        req.noise = NoiseSpec{1.0, NoiseMode::UniformRandom, 9};
        const LayeredTrajectory traj = euler_solve(req);
        double m = 0.0;
        for (int j = -1; j <= 9; ++j)
            for (int k = 0; k <= N; ++k) m = std::max(m, std::abs(traj.value(j, k)));
        if (N == 100) at100 = m;
        maxall = std::max(maxall, m);
    }
    CHECK(maxall <= 2.0 * at100 + 1.0);
}

TEST_CASE("divergence reports the first bad step") {
    TestProblem exploder = make_test_problem(ProblemId::F1, 1.0);
    exploder.drift_a = 1e308;  // one step overflows immediately
    exploder.drift_b = exploder.drift_c = exploder.drift_d = 0.0;
    SolveRequest req;
    req.problem = exploder;
    req.grid = build_grid(20.0, 1, 10);
    req.noise = NoiseSpec{0.0, NoiseMode::Zero, 0};
    try {
        euler_solve(req);
        FAIL("expected DivergenceError");
    } catch (const DivergenceError& e) {
        CHECK(e.layer() == 0);
        CHECK(e.step() == 0);
        CHECK(std::string(e.what()).find("j=0") != std::string::npos);
        CHECK(std::string(e.what()).find("k=0") != std::string::npos);
    }
}
