// Sampled radial functions on a RadialGrid.
#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include "nlslab/grid.hpp"

namespace nlslab {

struct Field {
    GridPtr grid;
    std::vector<double> values;

    Field() = default;
    Field(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
        if (values.size() != grid->size())
            throw std::invalid_argument("field length must match grid");
    }
    explicit Field(GridPtr g) : grid(std::move(g)), values(grid->size(), 0.0) {}
};

struct ComplexField {
    GridPtr grid;
    std::vector<std::complex<double>> values;

    ComplexField() = default;
    ComplexField(GridPtr g, std::vector<std::complex<double>> v)
        : grid(std::move(g)), values(std::move(v)) {
        if (values.size() != grid->size())
            throw std::invalid_argument("field length must match grid");
    }
    explicit ComplexField(GridPtr g) : grid(std::move(g)), values(grid->size(), 0.0) {}
    explicit ComplexField(const Field& u) : grid(u.grid), values(u.values.begin(), u.values.end()) {}
};

}  // namespace nlslab
