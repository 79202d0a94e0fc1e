#include "nlslab/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace nlslab {

double unit_sphere_area(int dim) {
    return 2.0 * std::pow(M_PI, 0.5 * dim) / std::tgamma(0.5 * dim);
}

GridPtr build_grid(const ProblemParams& params, int n_nodes, double r_max) {
    params.validate();
    if (n_nodes < 16) throw std::invalid_argument("n_nodes must be >= 16");
    if (!(r_max > 0) || !std::isfinite(r_max))
        throw std::invalid_argument("r_max must be positive and finite");

    auto grid = std::make_shared<RadialGrid>();
    const int n = n_nodes;
    const int N = params.dim;
    const double b = params.b;
    const double w = unit_sphere_area(N);
    const double h = r_max / n;

    grid->dim = N;
    grid->b = b;
    grid->h = h;
    grid->r_max = r_max;
    grid->nodes.resize(n);
    grid->quad_weights.resize(n);
    grid->singular_weights.resize(n);
    grid->face_coeff.resize(n + 1);

    for (int j = 0; j < n; ++j) {
        const double r_lo = j * h;
        const double r_hi = (j + 1) * h;
        grid->nodes[j] = (j + 0.5) * h;
        grid->quad_weights[j] = w * (std::pow(r_hi, N) - std::pow(r_lo, N)) / N;
        grid->singular_weights[j] =
            w * (std::pow(r_hi, N - b) - std::pow(r_lo, N - b)) / (N - b);
    }
    // Face coefficients for the gradient energy; the center face carries no
    // flux (reflective boundary), the outer face sees u(r_max) = 0.
    grid->face_coeff[0] = 0.0;
    for (int f = 1; f <= n; ++f)
        grid->face_coeff[f] = w * std::pow(f * h, N - 1) / h;

    return grid;
}

}  // namespace nlslab
