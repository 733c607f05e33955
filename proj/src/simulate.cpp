#include "zigp/simulate.hpp"

#include <cmath>

#include "zigp/errors.hpp"
#include "zigp/likelihoods.hpp"

namespace zigp {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::vector<SmoothSurface> draw_surfaces(const BBox& box, int count, Rng& rng) {
    std::vector<SmoothSurface> out;
    for (int m = 0; m < count; ++m) {
        SmoothSurface s;
        s.box = box;
        s.a0 = 0.0;
        s.ax = rng.uniform(0.6, 1.4);
        s.fx = rng.uniform(0.5, 1.5);
        s.px = rng.uniform(0.0, kTwoPi);
        s.ay = rng.uniform(0.6, 1.4);
        s.fy = rng.uniform(0.5, 1.5);
        s.py = rng.uniform(0.0, kTwoPi);
        s.axy = rng.uniform(-0.5, 0.5);
        out.push_back(s);
    }
    return out;
}

std::vector<Point> sample_locations(const BBox& box, const SimParams& p, int n, Rng& rng) {
    std::vector<Point> pts;
    pts.reserve(n);
    if (p.layout == SampleLayout::uniform) {
        for (int i = 0; i < n; ++i)
            pts.push_back({rng.uniform(box.xmin, box.xmax), rng.uniform(box.ymin, box.ymax)});
        return pts;
    }
    // Parallel vertical transects, samples equally spaced along each line.
    int nlines = std::max(1, static_cast<int>(std::floor(box.width() / p.transect_spacing)));
    int per_line = (n + nlines - 1) / nlines;
    double along = box.height() / per_line;
    for (int k = 0; k < nlines && static_cast<int>(pts.size()) < n; ++k) {
        double x = box.xmin + (k + 0.5) * box.width() / nlines;
        for (int j = 0; j < per_line && static_cast<int>(pts.size()) < n; ++j)
            pts.push_back({x, box.ymin + (j + 0.5) * along});
    }
    return pts;
}

struct LinearPredictor {
    double alpha;
    const std::vector<double>* beta;
    const std::vector<SmoothSurface>* surfaces;
    const Eigen::VectorXd* field;      // nodal values or nullptr
    const BasisMatrix* basis;          // rows match the evaluation points

    double at(int i, const Point& p) const {
        double eta = alpha;
        for (size_t m = 0; m < beta->size(); ++m) eta += (*beta)[m] * (*surfaces)[m].at(p);
        if (field && field->size() > 0) eta += basis->row(i).dot(*field);
        return eta;
    }
};

}  // namespace

double SmoothSurface::at(const Point& p) const {
    double tx = (p.x - box.xmin) / box.width();
    double ty = (p.y - box.ymin) / box.height();
    return a0 + ax * std::sin(kTwoPi * fx * tx + px) + ay * std::sin(kTwoPi * fy * ty + py) +
           axy * tx * ty;
}

SimResult simulate_hurdle(const TriMesh& mesh, const SimParams& params, int n,
                          std::uint64_t seed) {
    if (static_cast<int>(params.beta_presence.size()) != params.n_covariates ||
        static_cast<int>(params.beta_positive.size()) != params.n_covariates)
        throw usage_error("simulate_hurdle: beta lengths must match n_covariates");

    Rng rng(seed);
    const BBox& box = mesh.domain;

    SimResult out;
    out.truth.params = params;
    out.truth.surfaces = draw_surfaces(box, params.n_covariates, rng);

    FemMatrices fem;
    if (params.field_presence || params.field_positive) fem = fem_matrices(mesh);
    if (params.field_presence) {
        SparsePrecision q = spde_precision(fem, params.hyper_presence);
        out.truth.w_presence = sample_field(q, rng);
    }
    if (params.field_positive) {
        SparsePrecision q = spde_precision(fem, params.hyper_positive);
        out.truth.w_positive = sample_field(q, rng);
    }

    out.data.coords = sample_locations(box, params, n, rng);
    BasisMatrix basis = basis_matrix(mesh, out.data.coords);

    for (int m = 0; m < params.n_covariates; ++m) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v[i] = out.truth.surfaces[m].at(out.data.coords[i]);
        out.data.covariates["cov" + std::to_string(m + 1)] = v;
    }

    LinearPredictor eta1{params.alpha_presence, &params.beta_presence, &out.truth.surfaces,
                         params.field_presence ? &out.truth.w_presence : nullptr, &basis};
    LinearPredictor eta2{params.alpha_positive, &params.beta_positive, &out.truth.surfaces,
                         params.field_positive ? &out.truth.w_positive : nullptr, &basis};

    out.data.response.resize(n);
    for (int i = 0; i < n; ++i) {
        const Point& p = out.data.coords[i];
        double prob = inv_logit(eta1.at(i, p));
        bool present = rng.bernoulli(prob);
        if (!present) {
            out.data.response[i] = 0.0;
            continue;
        }
        double mu = std::exp(eta2.at(i, p));
        out.data.response[i] = rng.gamma(params.phi, params.phi / mu);
    }
    return out;
}

SimResult simulate_composite(const TriMesh& mesh, const SimParams& params,
                             const TailParams& tail, int n, std::uint64_t seed) {
    if (!(tail.tail_mix >= 0.0 && tail.tail_mix <= 1.0))
        throw usage_error("simulate_composite: tail_mix must lie in [0, 1]");

    SimResult out = simulate_hurdle(mesh, params, n, seed);
    out.truth.composite = true;
    out.truth.tail = tail;

    // A separate stream keeps the base table identical to simulate_hurdle
    // for the same seed whenever tail_mix = 0.
    Rng rng(seed ^ 0x7a11b0c5d4e3f291ULL);
    if (tail.field_q) {
        FemMatrices fem = fem_matrices(mesh);
        SparsePrecision q = spde_precision(fem, tail.hyper_q);
        out.truth.w_q = sample_field(q, rng);
    }
    BasisMatrix basis = basis_matrix(mesh, out.data.coords);
    LinearPredictor eta_q{tail.alpha_q, &tail.beta_q, &out.truth.surfaces,
                          tail.field_q ? &out.truth.w_q : nullptr, &basis};

    for (int i = 0; i < n; ++i) {
        if (!(out.data.response[i] > 0.0)) continue;
        if (!(rng.uniform() < tail.tail_mix)) continue;
        double q50 = std::exp(eta_q.at(i, out.data.coords[i]));
        double sigma = sigma_from_median(q50, tail.xi);
        out.data.response[i] = tail.u + gp_quantile(rng.uniform(), sigma, tail.xi);
    }
    return out;
}

void SimTruth::latent_surfaces(const TriMesh& mesh, const std::vector<Point>& at,
                               Eigen::VectorXd* presence, Eigen::VectorXd* cond_mean) const {
    const int n = static_cast<int>(at.size());
    BasisMatrix basis = basis_matrix(mesh, at);
    if (presence) presence->resize(n);
    if (cond_mean) cond_mean->resize(n);
    for (int i = 0; i < n; ++i) {
        double e1 = params.alpha_presence, e2 = params.alpha_positive;
        for (size_t m = 0; m < surfaces.size(); ++m) {
            double c = surfaces[m].at(at[i]);
            e1 += params.beta_presence[m] * c;
            e2 += params.beta_positive[m] * c;
        }
        if (w_presence.size() > 0) e1 += basis.row(i).dot(w_presence);
        if (w_positive.size() > 0) e2 += basis.row(i).dot(w_positive);
        if (presence) (*presence)[i] = inv_logit(e1);
        if (cond_mean) (*cond_mean)[i] = std::exp(e2);
    }
}

Eigen::VectorXd SimTruth::expected_density(const TriMesh& mesh,
                                           const std::vector<Point>& at) const {
    const int n = static_cast<int>(at.size());
    BasisMatrix basis = basis_matrix(mesh, at);
    Eigen::VectorXd out(n);
    for (int i = 0; i < n; ++i) {
        const Point& p = at[i];
        double e1 = params.alpha_presence, e2 = params.alpha_positive;
        for (size_t m = 0; m < surfaces.size(); ++m) {
            double c = surfaces[m].at(p);
            e1 += params.beta_presence[m] * c;
            e2 += params.beta_positive[m] * c;
        }
        if (w_presence.size() > 0) e1 += basis.row(i).dot(w_presence);
        if (w_positive.size() > 0) e2 += basis.row(i).dot(w_positive);
        double prob = inv_logit(e1);
        double mu = std::exp(e2);
        if (!composite || tail.tail_mix == 0.0) {
            out[i] = prob * mu;
            continue;
        }
        double eq = tail.alpha_q;
        for (size_t m = 0; m < surfaces.size(); ++m)
            eq += tail.beta_q[m] * surfaces[m].at(p);
        if (w_q.size() > 0) eq += basis.row(i).dot(w_q);
        double sigma = sigma_from_median(std::exp(eq), tail.xi);
        double gp_mean = tail.u + sigma / (1.0 - tail.xi);
        out[i] = prob * ((1.0 - tail.tail_mix) * mu + tail.tail_mix * gp_mean);
    }
    return out;
}

Dataset survey_fixture() {
    const int n = 553, n_zero = 282, n_small = 241, n_mid = 13, n_high = 17;
    static_assert(n_zero + n_small + n_mid + n_high == n);

    std::vector<double> values;
    values.reserve(n);
    for (int k = 0; k < n_zero; ++k) values.push_back(0.0);
    for (int k = 0; k < n_small; ++k)
        values.push_back(0.1 + 17.9 * k / static_cast<double>(n_small - 1));
    for (int k = 0; k < n_mid; ++k)
        values.push_back(22.0 + 11.0 * k / static_cast<double>(n_mid - 1));
    for (int k = 0; k < n_high; ++k)
        values.push_back(36.0 + 628.0 * k / static_cast<double>(n_high - 1));

    // Deterministic spatial shuffle so categories mix over the domain.
    Rng rng(20180428);
    for (int i = n - 1; i > 0; --i) {
        int j = static_cast<int>(rng.raw() % static_cast<std::uint64_t>(i + 1));
        std::swap(values[i], values[j]);
    }

    Dataset d;
    BBox box{0.0, 0.0, 20.0, 30.0};
    SimParams layout;
    layout.layout = SampleLayout::transect;
    layout.transect_spacing = 1.6;
    Rng loc_rng(1);
    d.coords = sample_locations(box, layout, n, loc_rng);

    SmoothSurface c1{box, 0.0, 1.1, 0.9, 0.7, 0.8, 1.2, 2.1, 0.3};
    SmoothSurface c2{box, 0.0, 0.9, 1.3, 4.0, 1.2, 0.7, 0.5, -0.2};
    Eigen::VectorXd v1(n), v2(n);
    for (int i = 0; i < n; ++i) {
        v1[i] = c1.at(d.coords[i]);
        v2[i] = c2.at(d.coords[i]);
    }
    d.covariates["cov1"] = v1;
    d.covariates["cov2"] = v2;
    d.response = Eigen::Map<Eigen::VectorXd>(values.data(), n);
    return d;
}

}  // namespace zigp
