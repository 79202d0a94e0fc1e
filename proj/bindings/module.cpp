#include <pybind11/pybind11.h>
PYBIND11_MODULE(_nlslab, m) { m.doc() = "placeholder"; }
