#include "vishell/harness.hpp"

#include "vishell/report.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

using namespace vishell;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("vishell_test_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

} // namespace

TEST_CASE("rate equation vs closed Volterra form") {
    SUBCASE("zero trajectory: both routes vanish") {
        const VolterraCheckResult r =
            volterra_ode_check(MaterialParams(1, 1, 1, 1), PolynomialTrajectory{{0.0}});
        CHECK(r.max_deviation == 0.0);
    }
    SUBCASE("m(t) = t at unit parameters") {
        const VolterraCheckResult r =
            volterra_ode_check(MaterialParams(1, 1, 1, 1), PolynomialTrajectory{{0.0, 1.0}});
        CHECK(r.max_deviation < 1e-8);
        CHECK(r.max_derivative_dev < 1e-6);
    }
    SUBCASE("m(t) = t^2 over random admissible parameters") {
        std::mt19937 rng(1234);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const MaterialParams mat(10.0 * u01(rng), 10.0 * u01(rng) + 1e-6,
                                     10.0 * u01(rng) + 1e-6, 10.0 * u01(rng));
            const VolterraCheckResult r =
                volterra_ode_check(mat, PolynomialTrajectory{{0.0, 0.0, 1.0}});
            worst = std::max(worst, r.max_deviation);
        }
        CHECK(worst < 1e-7);
    }
    SUBCASE("nonzero m(0) is rejected") {
        CHECK_THROWS_AS(
            volterra_ode_check(MaterialParams(1, 1, 1, 1), PolynomialTrajectory{{0.5}}),
            Error);
    }
}

TEST_CASE("adaptive quadrature sanity") {
    const double v = adaptive_simpson([](double s) { return std::exp(-3.0 * s); }, 0.0, 2.0);
    CHECK(v == doctest::Approx((1.0 - std::exp(-6.0)) / 3.0).epsilon(1e-12));
}

TEST_CASE("identity report aggregation") {
    const IdentityReport rep = verify_identities(MaterialParams(1, 1, 1, 1), 200, 77);
    CHECK(rep.all_pass());
    bool found = false;
    for (const auto& r : rep.rows)
        if (r.name == "theta_lambda_random_max") {
            found = true;
            CHECK(r.residual < 1e-15);
        }
    CHECK(found);

    SUBCASE("theta -> 0+ sweep stays conditioned") {
        for (double th : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
            const MaterialParams mat(1.0, 1.0, th, 1.0);
            const ReductionResiduals r = reduction_identity_residuals(mat);
            CHECK(r.r_a < 1e-8);
            CHECK(lambda_identity_residual(mat) < 1e-8);
        }
    }
}

TEST_CASE("config parsing") {
    const Config cfg = Config::from_string(
        "# comment\n"
        "chart = cylinder\n"
        "radius = 2.5\n"
        "mesh.nx = 12  # trailing comment\n"
        "epsilons = 0.2, 0.1, 0.05\n"
        "svg = true\n");
    CHECK(cfg.get_string("chart") == "cylinder");
    CHECK(cfg.get_double("radius") == 2.5);
    CHECK(cfg.get_int("mesh.nx") == 12);
    CHECK(cfg.get_double_list("epsilons") == std::vector<double>{0.2, 0.1, 0.05});
    CHECK(cfg.get_bool("svg", false));
    CHECK_THROWS_AS(cfg.get_string("missing"), ConfigError);
    CHECK_THROWS_AS(Config::from_string("novalue\n"), ConfigError);
    CHECK_THROWS_AS(Config::load("/nonexistent/path.cfg"), ConfigError);
    try {
        Config::load("/nonexistent/path.cfg");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("/nonexistent/path.cfg") != std::string::npos);
    }
}

TEST_CASE("run setup from config") {
    const Config cfg = Config::from_string(
        "chart = graph\n"
        "graph.amp = 0.4\n"
        "lambda = 2\nmu = 3\ntheta = 0.5\nrho = 0.25\n"
        "mesh.nx = 8\nmesh.ny = 4\nmesh.nz = 6\n"
        "clamped_edges = left, bottom\n"
        "dt = 0.025\nT = 0.5\n"
        "mode = descaled\nepsilon = 0.15\n"
        "load = normal_sine\nload.amplitude = 2.0\nload.profile = ramp\n");
    const RunSetup s = parse_setup(cfg);
    CHECK(s.chart_spec.name == "graph");
    CHECK(s.chart_spec.graph.amp == 0.4);
    CHECK(s.material.mu == 3.0);
    CHECK(s.opt2d.nx == 8);
    CHECK(s.opt2d.ny == 4);
    CHECK(s.opt3d.nz == 6);
    CHECK(s.opt2d.clamped == std::set<Edge>{Edge::Left, Edge::Bottom});
    CHECK(s.opt2d.descaled);
    CHECK(s.opt2d.epsilon == 0.15);
    CHECK(s.load_spec.name == "normal_sine");
    CHECK_THROWS_AS(parse_setup(Config::from_string("clamped_edges = diagonal\n")), ConfigError);
}

TEST_CASE("built-in loads") {
    const ChartDomain dom{0.0, 0.0, 1.0, 1.0, false};
    SUBCASE("none") {
        const Loads l = make_loads({"none", 1.0, "const", 1.0}, dom);
        CHECK(!l.volume);
        CHECK(!l.traction_top);
    }
    SUBCASE("normal_constant with ramp profile") {
        const Loads l = make_loads({"normal_constant", 2.0, "ramp", 3.0}, dom);
        CHECK(l.volume(0.0, {0.5, 0.5}, 0.0)[2] == doctest::Approx(0.0));
        CHECK(l.volume(1e9, {0.5, 0.5}, 0.0)[2] == doctest::Approx(2.0));
    }
    SUBCASE("normal_sine vanishes on the boundary") {
        const Loads l = make_loads({"normal_sine", 1.0, "const", 1.0}, dom);
        CHECK(l.volume(0.0, {0.0, 0.5}, 0.0)[2] == doctest::Approx(0.0));
        CHECK(l.volume(0.0, {0.5, 0.5}, 0.0)[2] == doctest::Approx(1.0));
    }
    SUBCASE("unknown name") {
        CHECK_THROWS_AS(make_loads({"gravity", 1.0, "const", 1.0}, dom), ConfigError);
    }
}

TEST_CASE("csv determinism: identical runs give identical bytes") {
    TempDir dir;
    const MaterialParams mat(1.0, 1.0, 1.0, 1.0);
    const std::string p1 = (dir.path / "a.csv").string();
    const std::string p2 = (dir.path / "b.csv").string();
    write_identities_csv(verify_identities(mat, 300, 42), p1);
    write_identities_csv(verify_identities(mat, 300, 42), p2);
    CHECK(slurp(p1) == slurp(p2));
}

TEST_CASE("cli exit codes") {
    TempDir dir;
    auto run = [&](std::vector<const char*> args) {
        args.insert(args.begin(), "vishell");
        return cli_main(static_cast<int>(args.size()), args.data());
    };

    SUBCASE("usage error without a subcommand") { CHECK(run({}) == 2); }
    SUBCASE("missing config file names the path") {
        CHECK(run({"verify-identities", "-c", "/no/such/file.cfg"}) == 2);
    }
    SUBCASE("verify-identities passes on the default material") {
        const std::string cfg = (dir.path / "ok.cfg").string();
        std::ofstream(cfg) << "lambda = 1\nmu = 1\ntheta = 1\nrho = 1\n";
        const std::string out = (dir.path / "out").string();
        CHECK(run({"verify-identities", "-c", cfg.c_str(), "-o", out.c_str()}) == 0);
        CHECK(std::filesystem::exists(dir.path / "out" / "report_identities.csv"));
    }
    SUBCASE("converge with too few epsilons is a usage error") {
        const std::string cfg = (dir.path / "few.cfg").string();
        std::ofstream(cfg) << "epsilons = 0.2\n";
        CHECK(run({"converge", "-c", cfg.c_str()}) == 2);
    }
    SUBCASE("geometry-check writes its report and passes on the cylinder") {
        const std::string cfg = (dir.path / "geo.cfg").string();
        std::ofstream(cfg) << "chart = cylinder\nradius = 1\ndomain.l1 = 2\n"
                           << "epsilons = 0.1, 0.05, 0.025\n";
        const std::string out = (dir.path / "geo_out").string();
        CHECK(run({"geometry-check", "-c", cfg.c_str(), "-o", out.c_str()}) == 0);
        CHECK(std::filesystem::exists(dir.path / "geo_out" / "geometry_check.csv"));
    }
}

TEST_CASE("convergence sweep probes on a small plate benchmark") {
    PlateChart chart;
    const MaterialParams mat(1.0, 1.0, 1.0, 1.0);
    Loads loads;
    loads.volume = [](double, const Eigen::Vector2d&, double) {
        return Eigen::Vector3d{0.0, 0.0, 1.0};
    };
    ConvergenceOptions opt;
    opt.epsilons = {0.2, 0.1, 0.05};
    opt.opt2d.nx = opt.opt2d.ny = 8;
    opt.opt2d.clamped = {Edge::Left};
    opt.opt2d.dt = 0.1;
    opt.opt2d.T = 0.5;
    opt.opt3d.nx = opt.opt3d.ny = 8;
    opt.opt3d.nz = 4;
    opt.opt3d.clamped = {Edge::Left};
    opt.opt3d.assembly.selective_reduced_shear = true;
    const ConvergenceReport rep = run_convergence(chart, mat, loads, opt);

    REQUIRE(rep.rows.size() == 3);
    CHECK(rep.err_h1st_decreasing);
    CHECK(rep.err_shear_decreasing);
    CHECK(rep.upsilon_decreasing);
    CHECK(rep.pass());
    // the 3D solution loses its x3 dependence as eps shrinks
    CHECK(rep.rows[1].x3_dependence < rep.rows[0].x3_dependence);
    CHECK(rep.rows[2].x3_dependence < rep.rows[1].x3_dependence);
    // at the smallest eps the first-order planar strain tracks -x3 rho(xi)
    CHECK(rep.rows[2].e1_rho_correlation > 0.99);
    // the reconstructed Upsilon is close to x3-independent across levels
    CHECK(rep.rows[2].upsilon_level_gap < rep.rows[2].err_shear);
    // the transverse remainder follows Upsilon toward zero
    CHECK(rep.rows[2].upsilon33_norm < rep.rows[0].upsilon33_norm);
    CHECK(rep.smallest_admissible_eps == doctest::Approx(0.05));

    SUBCASE("report files carry the pinned schemas") {
        TempDir dir;
        write_convergence_csv(rep, dir.path.string(), true);
        const std::string head = slurp((dir.path / "report_convergence.csv").string());
        CHECK(head.rfind("epsilon,err_h1st,err_shear,upsilon_norm,volterra_dev\n", 0) == 0);
        CHECK(std::filesystem::exists(dir.path / "converge_diagnostics.csv"));
        CHECK(std::filesystem::exists(dir.path / "report_convergence.svg"));
    }
}

TEST_CASE("inadmissible epsilons are discovered and skipped") {
    // unit-curvature patch: the inward offset degenerates for eps >= 1, so
    // the oversized first epsilon must be dropped, not fatal
    HemispherePatchChart chart;
    const MaterialParams mat(1.0, 1.0, 1.0, 1.0);
    Loads loads;
    loads.volume = [](double, const Eigen::Vector2d&, double) {
        return Eigen::Vector3d{0.0, 0.0, 0.1};
    };
    ConvergenceOptions opt;
    opt.epsilons = {1.5, 0.2, 0.1, 0.05};
    opt.opt2d.nx = opt.opt2d.ny = 4;
    opt.opt2d.clamped = {Edge::Left};
    opt.opt2d.dt = 0.1;
    opt.opt2d.T = 0.2;
    opt.opt3d.nx = opt.opt3d.ny = 4;
    opt.opt3d.nz = 2;
    opt.opt3d.clamped = {Edge::Left};
    const ConvergenceReport rep = run_convergence(chart, mat, loads, opt);
    CHECK(rep.rows.size() == 3);
    CHECK(rep.rows.front().epsilon == doctest::Approx(0.2));
    CHECK(rep.smallest_admissible_eps == doctest::Approx(0.05));
}

TEST_CASE("mesh mismatch between solvers is rejected") {
    PlateChart chart;
    ConvergenceOptions opt;
    opt.opt2d.nx = 8;
    opt.opt3d.nx = 6; // different footprint
    CHECK_THROWS_AS(
        run_convergence(chart, MaterialParams(1, 1, 1, 1), Loads{}, opt),
        MeshMismatchError);
}

TEST_CASE("solver CLI artifacts carry the documented schemas") {
    TempDir dir;
    const std::string cfg = (dir.path / "run.cfg").string();
    std::ofstream(cfg) << "chart = plate\nmesh.nx = 4\nmesh.ny = 4\nmesh.nz = 2\n"
                       << "dt = 0.1\nT = 0.2\nload = normal_constant\n";
    const std::string out = (dir.path / "out").string();
    auto run = [&](const char* sub) {
        const char* argv[] = {"vishell", sub, "-c", cfg.c_str(), "-o", out.c_str()};
        return cli_main(6, argv);
    };
    REQUIRE(run("solve2d") == 0);
    REQUIRE(run("solve3d") == 0);
    CHECK(slurp(out + "/summary2d.csv").rfind("t,bending_energy,memory_norm,residual\n", 0) == 0);
    CHECK(slurp(out + "/solve2d_snapshot_0000.csv").rfind("node,dof,value\n", 0) == 0);
    CHECK(slurp(out + "/solve3d_snapshot_0002.csv").rfind("node,dof,value\n", 0) == 0);
    CHECK(slurp(out + "/diagnostics3d.csv").rfind("t,energy,korn_ratio\n", 0) == 0);
}

TEST_CASE("svg writer emits a well-formed polyline plot") {
    TempDir dir;
    const std::string path = (dir.path / "plot.svg").string();
    write_svg_loglog(path, "test", "eps", "err",
                     {{"series", {0.2, 0.1, 0.05}, {1.0, 0.5, 0.25}}});
    const std::string svg = slurp(path);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
}
