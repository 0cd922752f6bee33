#include "ghdispatch/plant.hpp"

#include <cmath>
#include <sstream>

namespace ghdispatch {

namespace {

void require_interval(const char* field, double value, double lo, double hi) {
    if (!(value >= lo && value <= hi)) {
        std::ostringstream os;
        os << "value " << value << " outside [" << lo << ", " << hi << "]";
        throw DomainError(field, os.str());
    }
}

void require_positive(const char* field, double value) {
    if (!(value > 0.0) || !std::isfinite(value))
        throw DomainError(field, "rating must be strictly positive");
}

} // namespace

void UnitRatings::validate() const {
    require_positive("chp_heat_max", chp_heat_max);
    require_positive("chp_el_max", chp_el_max);
    require_positive("chp_gas_max", chp_gas_max);
    require_positive("gb_heat_max", gb_heat_max);
    require_positive("gb_gas_max", gb_gas_max);
    require_positive("hp_heat_max", hp_heat_max);
    require_positive("hp_el_max", hp_el_max);
    require_positive("dh_max", dh_max);
    require_positive("tes_capacity", tes_capacity);
    if (!(tes_temp_min < tes_temp_max))
        throw DomainError("tes_temp_range", "lower bound must be below upper bound");
}

PlantOutputs evaluate_units(const PlantInputs& in, const UnitRatings& r) {
    require_interval("lf_chp", in.lf_chp, 0.0, 1.0);
    require_interval("lf_gb", in.lf_gb, 0.0, 1.0);
    if (in.lf_hp != 0 && in.lf_hp != 1)
        throw DomainError("lf_hp", "heat pump state must be 0 or 1");
    require_interval("t_source", in.t_source, 20.0, 50.0);
    require_interval("p_dh_req", in.p_dh_req, 0.0, r.dh_max);

    // t_source is validated only; the heat pump has no COP curve yet.
    PlantOutputs out;
    out.p_h_chp = in.lf_chp * r.chp_heat_max;
    out.p_e_chp = in.lf_chp * r.chp_el_max;
    out.m_chp = in.lf_chp * r.chp_gas_max;
    out.p_h_gb = in.lf_gb * r.gb_heat_max;
    out.m_gb = in.lf_gb * r.gb_gas_max;
    const double hp = static_cast<double>(in.lf_hp);
    out.p_h_hp = hp * r.hp_heat_max;
    out.p_e_hp = hp * r.hp_el_max;
    out.p_dh = in.p_dh_req;
    return out;
}

double tes_energy(double t_tes, const UnitRatings& ratings) {
    return ratings.tes_heat_capacity() * t_tes;
}

TesState tes_state_at(double t_tes, const UnitRatings& ratings) {
    return TesState{t_tes, tes_energy(t_tes, ratings)};
}

TesState tes_step(const TesState& state, double p_charge, double p_demand, double dt,
                  const UnitRatings& ratings) {
    if (!(dt > 0.0))
        throw DomainError("dt", "time step must be positive");
    if (!(p_charge >= 0.0))
        throw DomainError("p_charge", "charging power must be non-negative");
    if (!(p_demand >= 0.0))
        throw DomainError("p_demand", "demand must be non-negative");

    TesState next;
    next.q_tes = state.q_tes + (p_charge - p_demand) * dt / 3600.0;
    next.t_tes = next.q_tes / ratings.tes_heat_capacity();
    return next;
}

} // namespace ghdispatch
