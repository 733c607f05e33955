#include "zigp/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "zigp/errors.hpp"

namespace zigp {

namespace {

double signed_area2(const Point& a, const Point& b, const Point& c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

}  // namespace

BBox bbox_of(const std::vector<Point>& pts) {
    if (pts.empty()) throw data_error("bbox_of: empty point set");
    BBox b{pts[0].x, pts[0].y, pts[0].x, pts[0].y};
    for (const auto& p : pts) {
        b.xmin = std::min(b.xmin, p.x);
        b.xmax = std::max(b.xmax, p.x);
        b.ymin = std::min(b.ymin, p.y);
        b.ymax = std::max(b.ymax, p.y);
    }
    return b;
}

double TriMesh::triangle_area(int t) const {
    const auto& tr = triangles[t];
    return 0.5 * signed_area2(nodes[tr[0]], nodes[tr[1]], nodes[tr[2]]);
}

double TriMesh::total_area() const {
    double s = 0.0;
    for (int t = 0; t < n_triangles(); ++t) s += triangle_area(t);
    return s;
}

TriMesh build_mesh(const BBox& bbox, double spacing, double margin) {
    if (!(spacing > 0.0)) throw usage_error("build_mesh: spacing must be positive");
    if (margin < 0.0) throw usage_error("build_mesh: margin must be nonnegative");
    if (!(bbox.width() > 0.0) || !(bbox.height() > 0.0))
        throw data_error("build_mesh: degenerate bbox (zero width or height)");

    TriMesh m;
    m.domain = bbox;

    // Pad and round the width up to a whole number of spacings, centered.
    double want_w = bbox.width() + 2.0 * margin;
    int cols = std::max(1, static_cast<int>(std::ceil(want_w / spacing - 1e-12)));
    double wp = cols * spacing;
    double cx = 0.5 * (bbox.xmin + bbox.xmax);
    double x0 = cx - 0.5 * wp, x1 = cx + 0.5 * wp;

    double hp = bbox.height() + 2.0 * margin;
    double y0 = bbox.ymin - margin, y1 = bbox.ymax + margin;
    double dy_ideal = spacing * std::sqrt(3.0) / 2.0;
    int rows = std::max(1, static_cast<int>(std::ceil(hp / dy_ideal - 1e-12)));
    double dy = hp / rows;

    m.padded = BBox{x0, y0, x1, y1};
    m.row_dy = dy;
    m.n_rows = rows;

    // Even rows: cols+1 nodes spaced exactly `spacing`. Odd rows: offset by
    // spacing/2 with end nodes clamped to x0 and x1 (cols+2 nodes).
    std::vector<int> row_begin(rows + 2, 0);
    for (int r = 0; r <= rows; ++r) {
        row_begin[r] = static_cast<int>(m.nodes.size());
        double y = (r == rows) ? y1 : y0 + r * dy;
        if (r % 2 == 0) {
            for (int c = 0; c <= cols; ++c) m.nodes.push_back({x0 + c * spacing, y});
        } else {
            m.nodes.push_back({x0, y});
            for (int c = 0; c < cols; ++c) m.nodes.push_back({x0 + (c + 0.5) * spacing, y});
            m.nodes.push_back({x1, y});
        }
    }
    row_begin[rows + 1] = static_cast<int>(m.nodes.size());

    const double eps = 1e-9 * std::max(wp, hp);
    m.interior.resize(m.nodes.size());
    for (size_t i = 0; i < m.nodes.size(); ++i) {
        const Point& p = m.nodes[i];
        m.interior[i] = p.x >= bbox.xmin - eps && p.x <= bbox.xmax + eps &&
                        p.y >= bbox.ymin - eps && p.y <= bbox.ymax + eps;
    }

    // Triangulate each strip by merging the two sorted node rows; both rows
    // span [x0, x1] exactly so the strips tile the padded rectangle.
    m.strip_start.resize(rows + 1);
    for (int r = 0; r < rows; ++r) {
        m.strip_start[r] = static_cast<int>(m.triangles.size());
        int a = row_begin[r], a_end = row_begin[r + 1];
        int b = row_begin[r + 1], b_end = row_begin[r + 2];
        int i = a, j = b;
        while (i + 1 < a_end || j + 1 < b_end) {
            bool take_bottom;
            if (i + 1 >= a_end)
                take_bottom = false;
            else if (j + 1 >= b_end)
                take_bottom = true;
            else
                take_bottom = m.nodes[i + 1].x <= m.nodes[j + 1].x + 1e-12;
            if (take_bottom) {
                m.triangles.push_back({i, i + 1, j});
                ++i;
            } else {
                m.triangles.push_back({i, j + 1, j});
                ++j;
            }
        }
    }
    m.strip_start[rows] = static_cast<int>(m.triangles.size());

    return m;
}

int TriMesh::find_triangle(const Point& p) const {
    const double tol = 1e-9 * std::max(padded.width(), padded.height());
    if (p.x < padded.xmin - tol || p.x > padded.xmax + tol || p.y < padded.ymin - tol ||
        p.y > padded.ymax + tol)
        return -1;

    // Rows are uniform, so only the strip containing p.y (and its neighbors,
    // when p sits on a row line) can contain p. Scanning candidates in index
    // order keeps the lowest-index tie-break for points on shared edges.
    int r = static_cast<int>(std::floor((p.y - padded.ymin) / row_dy));
    r = std::clamp(r, 0, n_rows - 1);
    int r_lo = std::max(0, r - 1), r_hi = std::min(n_rows - 1, r + 1);
    for (int t = strip_start[r_lo]; t < strip_start[r_hi + 1]; ++t) {
        const auto& tr = triangles[t];
        const Point &a = nodes[tr[0]], &b = nodes[tr[1]], &c = nodes[tr[2]];
        double area2 = signed_area2(a, b, c);
        double l0 = signed_area2(p, b, c) / area2;
        double l1 = signed_area2(a, p, c) / area2;
        double l2 = signed_area2(a, b, p) / area2;
        if (l0 >= -1e-12 && l1 >= -1e-12 && l2 >= -1e-12) return t;
    }
    return -1;
}

BasisMatrix basis_matrix(const TriMesh& mesh, const std::vector<Point>& points) {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(points.size() * 3);
    for (size_t i = 0; i < points.size(); ++i) {
        const Point& p = points[i];
        int t = mesh.find_triangle(p);
        if (t < 0)
            throw data_error("basis_matrix: point " + std::to_string(i) + " at (" +
                             std::to_string(p.x) + ", " + std::to_string(p.y) +
                             ") lies outside the mesh");
        const auto& tr = mesh.triangles[t];
        const Point &a = mesh.nodes[tr[0]], &b = mesh.nodes[tr[1]], &c = mesh.nodes[tr[2]];
        double area2 = signed_area2(a, b, c);
        double l0 = signed_area2(p, b, c) / area2;
        double l1 = signed_area2(a, p, c) / area2;
        l0 = std::clamp(l0, 0.0, 1.0);
        l1 = std::clamp(l1, 0.0, 1.0 - l0);
        double l2 = 1.0 - l0 - l1;  // exact row sum 1
        trips.emplace_back(static_cast<int>(i), tr[0], l0);
        trips.emplace_back(static_cast<int>(i), tr[1], l1);
        trips.emplace_back(static_cast<int>(i), tr[2], l2);
    }
    BasisMatrix a(static_cast<int>(points.size()), mesh.n_nodes());
    a.setFromTriplets(trips.begin(), trips.end());
    return a;
}

FemMatrices fem_matrices(const TriMesh& mesh) {
    const int n = mesh.n_nodes();
    FemMatrices fem;
    fem.c_diag = Eigen::VectorXd::Zero(n);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(mesh.n_triangles() * 9);

    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tr = mesh.triangles[t];
        const Point &a = mesh.nodes[tr[0]], &b = mesh.nodes[tr[1]], &c = mesh.nodes[tr[2]];
        double area = 0.5 * signed_area2(a, b, c);
        if (!(area > 0.0)) throw numeric_error("fem_matrices: non-positive triangle area");

        // Lumped mass: a third of the element area to each vertex.
        for (int k = 0; k < 3; ++k) fem.c_diag[tr[k]] += area / 3.0;

        // Stiffness: grad of basis k on the element is perp(opposite edge)/(2A).
        double gx[3], gy[3];
        const Point* v[3] = {&a, &b, &c};
        for (int k = 0; k < 3; ++k) {
            const Point& p1 = *v[(k + 1) % 3];
            const Point& p2 = *v[(k + 2) % 3];
            gx[k] = (p1.y - p2.y) / (2.0 * area);
            gy[k] = (p2.x - p1.x) / (2.0 * area);
        }
        for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l)
                trips.emplace_back(tr[k], tr[l], area * (gx[k] * gx[l] + gy[k] * gy[l]));
    }

    fem.g = Eigen::SparseMatrix<double>(n, n);
    fem.g.setFromTriplets(trips.begin(), trips.end());
    return fem;
}

void TriMesh::write_csv(const std::string& nodes_path, const std::string& triangles_path) const {
    {
        std::ofstream f(nodes_path);
        if (!f) throw data_error("cannot write " + nodes_path);
        f << "id,x,y,interior\n";
        char buf[80];
        for (int i = 0; i < n_nodes(); ++i) {
            std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%d\n", i, nodes[i].x, nodes[i].y,
                          interior[i] ? 1 : 0);
            f << buf;
        }
    }
    {
        std::ofstream f(triangles_path);
        if (!f) throw data_error("cannot write " + triangles_path);
        f << "id,n1,n2,n3\n";
        for (int t = 0; t < n_triangles(); ++t)
            f << t << ',' << triangles[t][0] << ',' << triangles[t][1] << ',' << triangles[t][2]
              << '\n';
    }
}

}  // namespace zigp
