#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "gaussmiss/cli.hpp"
#include <json.hpp>

using namespace gaussmiss;
namespace fs = std::filesystem;

namespace {

class TempDir {
  public:
    TempDir() {
        std::random_device rd;
        path_ = fs::temp_directory_path() / ("gaussmiss_test_" + std::to_string(rd()));
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

  private:
    fs::path path_;
};

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

void write_text(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

std::string tetrahedron_file(const TempDir& dir) {
    std::ostringstream s;
    s.precision(17);
    for (const auto& x : canonical_tetrahedron()) s << x[0] << ' ' << x[1] << ' ' << x[2] << '\n';
    const std::string path = dir.file("tetra.txt");
    write_text(path, s.str());
    return path;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

}  // namespace

TEST(ParseObstacles, FormatsAndComments) {
    std::istringstream in("# header\n0 0 2\n\n  lonlat: 90 0   # on the y axis\n1 1 0\n");
    const auto pts = parse_obstacles(in);
    ASSERT_EQ(pts.size(), 3u);
    EXPECT_LT((pts[0].xyz() - Eigen::Vector3d(0, 0, 1)).norm(), 1e-15);
    EXPECT_LT((pts[1].xyz() - Eigen::Vector3d(0, 1, 0)).norm(), 1e-15);
    EXPECT_NEAR(pts[2][0], std::sqrt(0.5), 1e-15);
}

TEST(ParseObstacles, ErrorsNameTheLine) {
    for (const char* bad : {"1 2\n", "0 0 0\n", "1 2 3 4\n", "lonlat: 10\n", "a b c\n"}) {
        std::istringstream in(std::string("0 0 1\n") + bad);
        try {
            parse_obstacles(in);
            ADD_FAILURE() << bad;
        } catch (const std::runtime_error& e) {
            EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
        }
    }
    EXPECT_THROW(load_obstacles("/nonexistent/points.txt"), std::runtime_error);
}

TEST(ParseSeries, Terms) {
    const auto terms = parse_series("3:1:0, 5:0.5:-1\t7:0:2");
    ASSERT_EQ(terms.size(), 3u);
    EXPECT_EQ(terms[1].k, 5);
    EXPECT_EQ(terms[1].a, 0.5);
    EXPECT_EQ(terms[1].b, -1.0);
    for (const char* bad : {"3:1", "3;1;0", "x:1:0", "3:1:0:4"}) {
        EXPECT_THROW(parse_series(bad), std::invalid_argument) << bad;
    }
}

TEST(Validate, Ranges) {
    RunConfig c;
    EXPECT_NO_THROW(validate(c));
    c.epsilon = 0.1;
    EXPECT_THROW(validate(c), std::invalid_argument);
    c.delta = 0.1;
    EXPECT_NO_THROW(validate(c));
    c.epsilon = 2.0;
    EXPECT_THROW(validate(c), std::invalid_argument);
    c = RunConfig{};
    c.grid = Grid{8, 64};
    EXPECT_THROW(validate(c), std::invalid_argument);
    c = RunConfig{};
    c.margin_target = 0.0;
    EXPECT_THROW(validate(c), std::invalid_argument);
}

TEST(RunConstruct, TetrahedronDefaults) {
    TempDir dir;
    RunConfig c;
    c.points_path = tetrahedron_file(dir);
    c.mesh_path = dir.file("torus.obj");
    c.report_path = dir.file("report.json");
    std::ostringstream log, out;
    ASSERT_EQ(run_construct(c, log, out), exit_code::ok) << log.str();

    const auto report = nlohmann::json::parse(slurp(c.report_path));
    EXPECT_EQ(report["v"], 1);
    EXPECT_TRUE(report["pass"].get<bool>());
    for (const char* key : {"sigma_min", "avoidance_margin", "certified_radius", "alpha", "ell_delta", "degree"}) {
        EXPECT_TRUE(report[key].is_number()) << key;
    }
    EXPECT_GT(report["certified_radius"].get<double>(), 0.0);
    EXPECT_EQ(report["grid"]["n_theta"], 1024);
    EXPECT_EQ(report["obstacles"], 4);

    const auto obj = lines_of(slurp(c.mesh_path));
    int v = 0, vn = 0, f = 0, max_index = 0;
    for (const auto& line : obj) {
        if (line.rfind("v ", 0) == 0) ++v;
        if (line.rfind("vn ", 0) == 0) ++vn;
        if (line.rfind("f ", 0) == 0) {
            ++f;
            std::istringstream ls(line.substr(2));
            std::string corner;
            int corners = 0;
            while (ls >> corner) {
                ++corners;
                max_index = std::max(max_index, std::stoi(corner));
            }
            EXPECT_EQ(corners, 4);
        }
    }
    EXPECT_EQ(v, 256 * 256);
    EXPECT_EQ(vn, 256 * 256);
    EXPECT_EQ(f, 256 * 256);
    EXPECT_EQ(max_index, 256 * 256);
}

TEST(RunConstruct, AntipodalPairIsExitTwo) {
    TempDir dir;
    RunConfig c;
    c.points_path = dir.file("pair.txt");
    write_text(c.points_path, "1 0 0\n-1 0 0\n");
    c.report_path = dir.file("report.json");
    std::ostringstream log, out;
    EXPECT_EQ(run_construct(c, log, out), exit_code::antipodal);
    EXPECT_FALSE(fs::exists(c.report_path));
}

TEST(RunConstruct, EmptyFileGivesRoundTube) {
    TempDir dir;
    RunConfig c;
    c.points_path = dir.file("empty.txt");
    write_text(c.points_path, "# nothing\n");
    c.grid = Grid{256, 256};
    std::ostringstream log, out;
    ASSERT_EQ(run_construct(c, log, out), exit_code::ok) << log.str();
    const auto report = nlohmann::json::parse(out.str());
    EXPECT_TRUE(report["pass"].get<bool>());
    EXPECT_TRUE(report["series"].empty());
    EXPECT_EQ(report["obstacles"], 0);
    EXPECT_NEAR(report["avoidance_margin"].get<double>(), kPi, 1e-12);
}

TEST(RunConstruct, GaussCloudCountsAndDeterminism) {
    TempDir dir;
    RunConfig c;
    c.grid = Grid{256, 256};
    c.cloud_path = dir.file("cloud.ply");
    c.report_path = dir.file("a.json");
    std::ostringstream log, out;
    ASSERT_EQ(run_construct(c, log, out), exit_code::ok) << log.str();
    const std::string first = slurp(c.cloud_path);
    const std::string first_report = slurp(c.report_path);

    const auto lines = lines_of(first);
    const int header = 8;
    ASSERT_GT(lines.size(), static_cast<std::size_t>(header));
    EXPECT_EQ(lines[2], "element vertex 65540");
    EXPECT_EQ(lines[header - 1], "end_header");
    ASSERT_EQ(lines.size(), static_cast<std::size_t>(header + 65540));
    int flagged = 0;
    for (std::size_t i = header; i < lines.size(); ++i) {
        std::istringstream ls(lines[i]);
        double x, y, z;
        int flag;
        ASSERT_TRUE(ls >> x >> y >> z >> flag);
        EXPECT_NEAR(std::sqrt(x * x + y * y + z * z), 1.0, 1e-6);
        flagged += flag;
        if (i >= lines.size() - 4) EXPECT_EQ(flag, 1);
    }
    EXPECT_EQ(flagged, 4);

    set_grid_threads(1);
    ASSERT_EQ(run_construct(c, log, out), exit_code::ok);
    set_grid_threads(0);
    EXPECT_EQ(slurp(c.cloud_path), first);
    EXPECT_EQ(slurp(c.report_path), first_report);
}

TEST(RunConstruct, SeriesOverrideThatDoesNotSeparateIsExitThree) {
    RunConfig c;
    c.series = parse_series("1:0.01:0");
    c.grid = Grid{64, 64};
    std::ostringstream log, out;
    EXPECT_EQ(run_construct(c, log, out), exit_code::fit);
    EXPECT_NE(log.str().find("does not separate"), std::string::npos);
}

TEST(RunConstruct, UnreachableTargetIsExitFourWithReport) {
    TempDir dir;
    RunConfig c;
    c.grid = Grid{64, 64};
    c.target_radius = 5.0;
    c.report_path = dir.file("fail.json");
    c.mesh_path = dir.file("fail.obj");
    std::ostringstream log, out;
    EXPECT_EQ(run_construct(c, log, out), exit_code::certification);
    const auto report = nlohmann::json::parse(slurp(c.report_path));
    EXPECT_FALSE(report["pass"].get<bool>());
    EXPECT_FALSE(report["notes"].empty());
    EXPECT_FALSE(fs::exists(c.mesh_path));
}

TEST(RunConstruct, IoErrorsAreExitOne) {
    std::ostringstream log, out;
    RunConfig c;
    c.points_path = "/nonexistent/points.txt";
    EXPECT_EQ(run_construct(c, log, out), exit_code::io);
    c = RunConfig{};
    c.report_path = "/nonexistent/dir/report.json";
    EXPECT_EQ(run_construct(c, log, out), exit_code::io);
    c = RunConfig{};
    c.command = Command::export_mesh;
    EXPECT_EQ(run_construct(c, log, out), exit_code::io);
}

TEST(SpinProgram, TorusAndFourSpace) {
    std::istringstream torus("circle 1 0 2  # profile in the xz-plane\nspin\n");
    const ParametricImmersion t = parse_spin_program(torus);
    EXPECT_EQ(t.domain_dim(), 2);
    EXPECT_EQ(t.ambient_dim(), 3);

    std::istringstream four("point 1 1\nspin\nspin 0\n");
    const ParametricImmersion f = parse_spin_program(four);
    EXPECT_EQ(f.domain_dim(), 2);
    EXPECT_EQ(f.ambient_dim(), 4);

    for (const char* bad : {"spin\n", "point 1\ncircle 1 0 2\n", "twist\n", "point 1 1\nspin x\n", ""}) {
        std::istringstream in(bad);
        EXPECT_THROW(parse_spin_program(in), std::runtime_error) << bad;
    }
    std::istringstream hits_axis("point 0 1\nspin\nspin 0\n");
    EXPECT_THROW(parse_spin_program(hits_axis), GeometryError);
}

TEST(RunSpin, ReportsAndExitCodes) {
    TempDir dir;
    RunConfig c;
    c.command = Command::spin;
    c.grid = Grid{128, 128};
    c.spin_path = dir.file("torus.spin");
    write_text(c.spin_path, "circle 1 0 2\nspin\n");
    std::ostringstream log, out;
    ASSERT_EQ(run_spin(c, log, out), exit_code::ok) << log.str();
    const auto j = nlohmann::json::parse(out.str());
    EXPECT_EQ(j["ambient_dim"], 3);
    EXPECT_NEAR(j["sigma_min"].get<double>(), 1.0, 1e-12);
    EXPECT_LT(std::abs(j["degree"].get<double>()), 1e-3);

    write_text(c.spin_path, "point 0 1\nspin\nspin 0\n");
    EXPECT_EQ(run_spin(c, log, out), exit_code::certification);
    write_text(c.spin_path, "bogus\n");
    EXPECT_EQ(run_spin(c, log, out), exit_code::io);
    c.spin_path = dir.file("missing.spin");
    EXPECT_EQ(run_spin(c, log, out), exit_code::io);
}

TEST(FigureEightInfo, Values) {
    std::ostringstream out;
    EXPECT_EQ(run_figure_eight_info(0.125, 0.5, out), exit_code::ok);
    const auto j = nlohmann::json::parse(out.str());
    EXPECT_NEAR(j["ell_delta"].get<double>(), kPi + 2 * std::atan(0.25), 1e-9);
    EXPECT_NEAR(j["max_normal_angle"].get<double>(), kPi / 2 + std::atan(0.25), 1e-15);
    EXPECT_NEAR(j["max_delta_for_arc"].get<double>(), std::tan(0.25) / 2, 1e-12);
}
