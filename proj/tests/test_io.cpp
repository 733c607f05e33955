#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "zigp/config.hpp"
#include "zigp/csv.hpp"
#include "zigp/errors.hpp"
#include "zigp/pipeline.hpp"
#include "zigp/simulate.hpp"

using namespace zigp;
namespace fs = std::filesystem;

namespace {

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    f << text;
}

std::string fixture_csv_path() {
    static std::string path = [] {
        Dataset d = survey_fixture();
        std::string p = "io_fixture.csv";
        std::ofstream f(p);
        f << "x,y,cov1,cov2,response\n";
        char buf[160];
        for (int i = 0; i < d.n(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g\n", d.coords[i].x,
                          d.coords[i].y, d.covariates.at("cov1")[i], d.covariates.at("cov2")[i],
                          d.response[i]);
            f << buf;
        }
        return p;
    }();
    return path;
}

}  // namespace

TEST_CASE("csv reader reports malformed rows with line numbers") {
    write_file("bad.csv", "a,b\n1,2\n3,oops\n");
    try {
        read_csv_table("bad.csv");
        FAIL("expected an error");
    } catch (const Error& e) {
        std::string msg = e.what();
        CHECK(msg.find(":3") != std::string::npos);
        CHECK(msg.find("oops") != std::string::npos);
    }

    write_file("short.csv", "a,b\n1\n");
    CHECK_THROWS(read_csv_table("short.csv"));

    write_file("ok.csv", "a,b\n1,2\n3,4\n");
    Table t = read_csv_table("ok.csv");
    CHECK(t.n_rows() == 2);
    CHECK(t.col("b")[1] == 4.0);
    try {
        t.col("missing");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("missing") != std::string::npos);
    }
}

TEST_CASE("atomic write leaves nothing behind on failure") {
    std::string path = "atomic_test.csv";
    std::remove(path.c_str());
    CHECK_THROWS(atomic_write(path, [](const std::string& tmp) {
        std::ofstream f(tmp);
        f << "partial";
        f.close();
        throw data_error("boom");
    }));
    CHECK_FALSE(fs::exists(path));
    CHECK_FALSE(fs::exists(path + ".tmp"));

    atomic_write(path, [](const std::string& tmp) {
        std::ofstream f(tmp);
        f << "done";
    });
    CHECK(fs::exists(path));
}

TEST_CASE("fnv1a matches the reference offset basis") {
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") != fnv1a("b"));
}

TEST_CASE("config round-trips through its canonical serialization") {
    RunConfig c;
    c.input = "data.csv";
    c.covariates = {"depth", "fluor"};
    c.bandwidths["depth"] = 4.5;
    c.threshold = 20.0;
    c.engine = "mcmc";
    c.seed = 99;
    c.diag_thresholds = {1.0, 5.0, 10.0};

    std::string text = config_to_json_text(c);
    RunConfig back = config_from_json_text(text);
    CHECK(config_to_json_text(back) == text);

    RunConfig defaults = config_from_json_text("{}");
    CHECK(defaults.engine == "laplace");
    CHECK_FALSE(defaults.threshold.has_value());
    std::string text2 = config_to_json_text(defaults);
    CHECK(config_to_json_text(config_from_json_text(text2)) == text2);

    CHECK_THROWS(config_from_json_text("{\"engine\": \"exact\"}"));
    CHECK_THROWS(config_from_json_text("not json"));
}

TEST_CASE("pipeline emits the documented file set") {
    RunConfig c;
    c.input = fixture_csv_path();
    c.out_dir = "pipe_out";
    c.covariates = {"cov1", "cov2"};
    c.threshold = 20.0;
    c.mesh_spacing = 5.0;
    c.mesh_margin = 5.0;
    c.grid_cell = 2.0;
    c.draws = 200;
    c.seed = 12;
    fs::remove_all(c.out_dir);

    std::vector<std::string> files = run_pipeline(c);
    CHECK(files.size() == 8);
    const char* expect[] = {"mesh_nodes.csv",  "mesh_triangles.csv", "covariates_smoothed.csv",
                            "fit_hurdle.json", "fit_extremes.json",  "raster_hurdle.csv",
                            "raster_extremes.csv", "raster_combined.csv"};
    for (const char* name : expect) CHECK(fs::exists(fs::path(c.out_dir) / name));
    CHECK(fs::exists(fs::path(c.out_dir) / "run_manifest.json"));

    // without a threshold the extremes stages are skipped
    RunConfig c2 = c;
    c2.out_dir = "pipe_out_nou";
    c2.threshold.reset();
    fs::remove_all(c2.out_dir);
    std::vector<std::string> files2 = run_pipeline(c2);
    CHECK(files2.size() == 5);
    CHECK_FALSE(fs::exists(fs::path(c2.out_dir) / "raster_extremes.csv"));
}

TEST_CASE("combine stage consumes raster files and checks the grid") {
    RunConfig c;
    c.input = fixture_csv_path();
    c.out_dir = "pipe_out";  // reuse the rasters written above
    c.covariates = {"cov1", "cov2"};
    c.threshold = 20.0;
    REQUIRE(fs::exists(fs::path(c.out_dir) / "raster_hurdle.csv"));

    std::vector<std::string> files = run_combine_from_files(c);
    CHECK(files.size() == 1);

    RunConfig no_u = c;
    no_u.threshold.reset();
    CHECK_THROWS(run_combine_from_files(no_u));
}

TEST_CASE("simulate stage writes data and truth") {
    RunConfig c;
    c.out_dir = "sim_out";
    c.sim_n = 200;
    c.seed = 5;
    c.sim_composite = true;
    fs::remove_all(c.out_dir);
    std::vector<std::string> files = run_simulate(c);
    CHECK(files.size() == 2);
    Table t = read_csv_table(files[0]);
    CHECK(t.n_rows() == 200);
    CHECK(t.find("response") >= 0);
}

TEST_CASE("workspace rejects unknown and constant columns") {
    RunConfig c;
    c.input = fixture_csv_path();
    c.out_dir = "ws_out";
    c.covariates = {"cov1", "nope"};
    try {
        load_workspace(c);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("nope") != std::string::npos);
    }

    c.covariates = {};
    CHECK_THROWS(load_workspace(c));
}
