#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "zigp/extremes.hpp"
#include "zigp/simulate.hpp"

using namespace zigp;

namespace {

TriMesh sim_mesh() { return build_mesh(BBox{0, 0, 10, 10}, 1.0, 1.5); }

}  // namespace

TEST_CASE("presence fraction tracks the logit anchor") {
    SimParams p;
    p.alpha_presence = std::log(0.49 / 0.51);
    p.beta_presence = {0.2, 0.1};
    p.beta_positive = {0.3, 0.0};
    p.hyper_presence = {3.0, 0.3};
    p.hyper_positive = {3.0, 0.3};

    SimResult sim = simulate_hurdle(sim_mesh(), p, 5000, 4242);
    double presence = 0.0;
    for (int i = 0; i < sim.data.n(); ++i) presence += sim.data.response[i] > 0.0 ? 1.0 : 0.0;
    presence /= sim.data.n();
    CHECK(std::abs(presence - 0.49) < 0.03);
}

TEST_CASE("positives are iid gamma when signals are off") {
    SimParams p;
    p.alpha_presence = 0.0;
    p.alpha_positive = 1.0;
    p.beta_presence = {0.0, 0.0};
    p.beta_positive = {0.0, 0.0};
    p.field_presence = false;
    p.field_positive = false;
    p.phi = 2.0;

    SimResult sim = simulate_hurdle(sim_mesh(), p, 100000, 77);
    double sum = 0.0;
    int n_pos = 0;
    for (int i = 0; i < sim.data.n(); ++i)
        if (sim.data.response[i] > 0.0) {
            sum += sim.data.response[i];
            ++n_pos;
        }
    CHECK(sum / n_pos == doctest::Approx(std::exp(1.0)).epsilon(0.02));
}

TEST_CASE("fixed seeds reproduce tables exactly") {
    SimParams p;
    SimResult a = simulate_hurdle(sim_mesh(), p, 500, 11);
    SimResult b = simulate_hurdle(sim_mesh(), p, 500, 11);
    CHECK((a.data.response - b.data.response).norm() == 0.0);
    for (int i = 0; i < 500; ++i) {
        CHECK(a.data.coords[i].x == b.data.coords[i].x);
        CHECK(a.data.coords[i].y == b.data.coords[i].y);
    }
}

TEST_CASE("composite with zero mix reproduces the hurdle table") {
    SimParams p;
    TailParams t;
    t.tail_mix = 0.0;
    TriMesh mesh = sim_mesh();
    SimResult hurdle = simulate_hurdle(mesh, p, 800, 99);
    SimResult comp = simulate_composite(mesh, p, t, 800, 99);
    CHECK((hurdle.data.response - comp.data.response).norm() == 0.0);
}

TEST_CASE("pure tail at zero threshold is gp distributed") {
    SimParams p;
    p.alpha_presence = 2.0;  // nearly all present
    p.beta_presence = {0.0, 0.0};
    p.beta_positive = {0.0, 0.0};
    p.field_presence = false;
    p.field_positive = false;

    TailParams t;
    t.tail_mix = 1.0;
    t.u = 0.0;
    t.xi = 0.3;
    t.alpha_q = 1.2;
    t.beta_q = {0.0, 0.0};
    t.field_q = false;

    SimResult sim = simulate_composite(sim_mesh(), p, t, 5000, 303);
    std::vector<double> pos;
    for (int i = 0; i < sim.data.n(); ++i)
        if (sim.data.response[i] > 0.0) pos.push_back(sim.data.response[i]);
    REQUIRE(pos.size() > 3000);

    GpMle fit = gp_mle(pos);
    double sigma_true = sigma_from_median(std::exp(1.2), 0.3);
    CHECK(std::abs(fit.sigma - sigma_true) < 3.0 * std::sqrt(fit.cov(0, 0)));
    CHECK(std::abs(fit.xi - 0.3) < 3.0 * std::sqrt(fit.cov(1, 1)));
}

TEST_CASE("default composite recipe shows the zero-heavy, heavy-tailed shape") {
    SimParams p;
    TailParams t;
    SimResult sim = simulate_composite(sim_mesh(), p, t, 2000, 20180428);

    int zeros = 0;
    std::vector<double> pos;
    for (int i = 0; i < sim.data.n(); ++i) {
        if (sim.data.response[i] > 0.0)
            pos.push_back(sim.data.response[i]);
        else
            ++zeros;
    }
    CHECK(zeros > 0.40 * sim.data.n());

    std::sort(pos.begin(), pos.end());
    double median = pos[pos.size() / 2];
    CHECK(pos.back() / median > 50.0);
}

TEST_CASE("truth record reproduces the expected density") {
    SimParams p;
    p.alpha_presence = 0.3;
    p.alpha_positive = 0.9;
    p.beta_presence = {0.0, 0.0};
    p.beta_positive = {0.0, 0.0};
    p.field_presence = false;
    p.field_positive = false;

    TriMesh mesh = sim_mesh();
    SimResult sim = simulate_hurdle(mesh, p, 100, 5);
    Eigen::VectorXd d = sim.truth.expected_density(mesh, {{2.0, 2.0}, {7.5, 3.25}});
    double expect = inv_logit(0.3) * std::exp(0.9);
    CHECK(d[0] == doctest::Approx(expect).epsilon(1e-12));
    CHECK(d[1] == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("transect layout builds parallel lines inside the domain") {
    SimParams p;
    p.layout = SampleLayout::transect;
    p.transect_spacing = 2.0;
    SimResult sim = simulate_hurdle(sim_mesh(), p, 400, 1);
    std::vector<double> xs;
    for (const auto& c : sim.data.coords) xs.push_back(c.x);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    CHECK(xs.size() == 5);  // distinct transect lines
    for (const auto& c : sim.data.coords) {
        CHECK(c.y >= 0.0);
        CHECK(c.y <= 10.0);
    }
}

TEST_CASE("survey fixture carries the documented structure") {
    Dataset d = survey_fixture();
    CHECK(d.n() == 553);
    int pos = 0, over20 = 0, over35 = 0;
    double vmax = 0.0, vmin_pos = 1e9;
    for (int i = 0; i < d.n(); ++i) {
        double v = d.response[i];
        if (v > 0.0) {
            ++pos;
            vmin_pos = std::min(vmin_pos, v);
        }
        if (v > 20.0) ++over20;
        if (v > 35.0) ++over35;
        vmax = std::max(vmax, v);
    }
    CHECK(pos == 271);  // 49% presence
    CHECK(over20 == 30);
    CHECK(over35 == 17);
    CHECK(vmin_pos == doctest::Approx(0.1));
    CHECK(vmax == doctest::Approx(664.0));
}
