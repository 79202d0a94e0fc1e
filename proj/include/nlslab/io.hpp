// CSV and JSON serialization with stable key names.
#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "nlslab/dynamics.hpp"
#include "nlslab/functionals.hpp"
#include "nlslab/stationary.hpp"
#include "nlslab/thresholds.hpp"
#include "nlslab/zeromass.hpp"

namespace nlslab {

// columns r, re, im
void write_field_csv(std::ostream& os, const Field& u);
void write_field_csv(std::ostream& os, const ComplexField& u);
void write_trace_csv(std::ostream& os, const SimTrace& trace);

nlohmann::json to_json(const EnergyBreakdown& e);
nlohmann::json to_json(const SolveReport& rep);
nlohmann::json to_json(const ThresholdReport& rep);
nlohmann::json to_json(const FiberScan& scan);
nlohmann::json to_json(const TailFit& fit);

}  // namespace nlslab
