// Cell-centered radial grid with quadrature weights for the N-dimensional
// measure and for the singular |x|^{-b} weight.
#pragma once

#include <memory>
#include <vector>

#include "nlslab/params.hpp"

namespace nlslab {

// Surface area of the unit sphere in R^N, 2 pi^{N/2} / Gamma(N/2).
double unit_sphere_area(int dim);

struct RadialGrid {
    int dim = 3;
    double b = 0;
    double h = 0;       // cell width
    double r_max = 0;   // truncation radius, n * h
    std::vector<double> nodes;             // r_j = (j + 1/2) h
    std::vector<double> quad_weights;      // exact per-cell integral of w r^{N-1}
    std::vector<double> singular_weights;  // exact per-cell integral of w r^{N-1-b}
    std::vector<double> face_coeff;        // w r_f^{N-1} / h at faces r_f = f h, f = 0..n

    std::size_t size() const { return nodes.size(); }
};

using GridPtr = std::shared_ptr<const RadialGrid>;

// Builds the grid; weights integrate r^{N-1} and r^{N-1-b} exactly per cell so
// the singular weight never needs a sample at r = 0.
GridPtr build_grid(const ProblemParams& params, int n_nodes, double r_max);

}  // namespace nlslab
