#include "nlslab/rng.hpp"

#include <cmath>

namespace nlslab {

Field random_smooth_field(const GridPtr& grid, CounterRng& rng, int n_bumps) {
    Field u(grid);
    const double r_max = grid->r_max;
    for (int k = 0; k < n_bumps; ++k) {
        const double amp = rng.next_uniform(-1.0, 1.0);
        const double center = rng.next_uniform(0.0, 0.15 * r_max);
        const double width = rng.next_uniform(0.25, 0.06 * r_max);
        for (std::size_t j = 0; j < grid->size(); ++j) {
            const double r = grid->nodes[j];
            // even bump: symmetric pair of Gaussians so u'(0) = 0
            u.values[j] += amp * (std::exp(-(r - center) * (r - center) / (width * width)) +
                                  std::exp(-(r + center) * (r + center) / (width * width)));
        }
    }
    return u;
}

}  // namespace nlslab
