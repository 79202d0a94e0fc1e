#include "nlslab/io.hpp"

#include <iomanip>
#include <ostream>

namespace nlslab {

namespace {

void csv_header(std::ostream& os) { os << "r,re,im\n"; }

}  // namespace

void write_field_csv(std::ostream& os, const Field& u) {
    csv_header(os);
    os << std::setprecision(17);
    for (std::size_t j = 0; j < u.values.size(); ++j)
        os << u.grid->nodes[j] << ',' << u.values[j] << ",0\n";
}

void write_field_csv(std::ostream& os, const ComplexField& u) {
    csv_header(os);
    os << std::setprecision(17);
    for (std::size_t j = 0; j < u.values.size(); ++j)
        os << u.grid->nodes[j] << ',' << u.values[j].real() << ',' << u.values[j].imag() << '\n';
}

void write_trace_csv(std::ostream& os, const SimTrace& trace) {
    os << "t,mass,energy,grad_norm,virial,Q\n";
    os << std::setprecision(17);
    for (std::size_t i = 0; i < trace.times.size(); ++i)
        os << trace.times[i] << ',' << trace.mass_series[i] << ',' << trace.energy_series[i] << ','
           << trace.grad_norm_series[i] << ',' << trace.virial_series[i] << ',' << trace.q_series[i]
           << '\n';
}

nlohmann::json to_json(const EnergyBreakdown& e) {
    return {{"kinetic", e.kinetic}, {"term_q", e.term_q}, {"term_p", e.term_p}, {"total", e.total}};
}

nlohmann::json to_json(const SolveReport& rep) {
    return {{"energy", to_json(rep.energy)},
            {"lambda", rep.lambda},
            {"pohozaev_residual", rep.pohozaev_residual},
            {"equation_residual", rep.equation_residual},
            {"iterations", rep.iterations},
            {"level_tag", rep.level_tag},
            {"success", rep.success},
            {"message", rep.message},
            {"mass", mass(rep.state)}};
}

nlohmann::json to_json(const ThresholdReport& rep) {
    nlohmann::json j;
    j["regime"] = rep.regime;
    auto put = [&](const char* k, const std::optional<double>& v) {
        if (v) j[k] = *v;
    };
    put("c1", rep.c1);
    put("c2", rep.c2);
    put("c3", rep.c3);
    put("c1_star", rep.c1_star);
    put("tilde_c2", rep.tilde_c2);
    put("hat_c2", rep.hat_c2);
    j["provenance"] = rep.provenance;
    return j;
}

nlohmann::json to_json(const FiberScan& scan) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& cp : scan.critical_points)
        pts.push_back({{"t", cp.t}, {"energy", cp.energy}, {"morse_sign", cp.morse_sign}});
    return {{"t_values", scan.t_values},
            {"energies", scan.energies},
            {"derivative_signs", scan.derivative_signs},
            {"critical_points", pts}};
}

nlohmann::json to_json(const TailFit& fit) {
    return {{"r_lo", fit.r_lo},
            {"r_hi", fit.r_hi},
            {"slope", fit.slope},
            {"alpha_expected", fit.alpha_expected},
            {"log_corrected", fit.log_corrected},
            {"fit_residual", fit.fit_residual},
            {"power_fit_residual", fit.power_fit_residual}};
}

}  // namespace nlslab
