#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <string>
#include <vector>

namespace zigp {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct BBox {
    double xmin = 0.0, ymin = 0.0, xmax = 0.0, ymax = 0.0;
    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
};

BBox bbox_of(const std::vector<Point>& pts);

// Triangulated planar domain. Nodes carry the piecewise-linear basis
// functions: basis j is 1 at node j, 0 at every other node, linear on each
// triangle. Triangles are stored with positive (counter-clockwise) area.
struct TriMesh {
    std::vector<Point> nodes;
    std::vector<std::array<int, 3>> triangles;
    std::vector<bool> interior;  // node lies inside the un-padded domain
    BBox padded;                 // rectangle the triangles tile exactly
    BBox domain;                 // the un-padded input bbox
    double row_dy = 0.0;         // uniform vertical row spacing
    int n_rows = 0;              // row intervals (rows of nodes = n_rows + 1)
    std::vector<int> strip_start;  // first triangle index of each row strip

    int n_nodes() const { return static_cast<int>(nodes.size()); }
    int n_triangles() const { return static_cast<int>(triangles.size()); }
    double triangle_area(int t) const;
    double total_area() const;

    // Lowest-index triangle containing p (ties on shared edges resolve to the
    // lower index); -1 if p is outside the mesh.
    int find_triangle(const Point& p) const;

    void write_csv(const std::string& nodes_path, const std::string& triangles_path) const;
};

// Sparse basis-evaluation matrix: row i holds the barycentric coordinates of
// point i inside its containing triangle, so (A * w)(i) evaluates the
// piecewise-linear field with nodal weights w at point i.
using BasisMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Finite-element matrices of the linear basis: C is the row-sum lumped mass
// matrix (diagonal), G the stiffness matrix (gradient inner products).
struct FemMatrices {
    Eigen::VectorXd c_diag;
    Eigen::SparseMatrix<double> g;
    int n() const { return static_cast<int>(c_diag.size()); }
};

// Regular triangular lattice over bbox expanded by margin. Node spacing along
// rows equals `spacing`; the padded width is rounded up to a whole number of
// spacings and offset rows clamp their end nodes to the box edges, so the
// triangles tile the padded rectangle exactly.
TriMesh build_mesh(const BBox& bbox, double spacing, double margin);

BasisMatrix basis_matrix(const TriMesh& mesh, const std::vector<Point>& points);

FemMatrices fem_matrices(const TriMesh& mesh);

}  // namespace zigp
