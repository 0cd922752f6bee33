#pragma once

#include <stdexcept>
#include <string>

namespace ghdispatch {

/// Raised when a value falls outside the interval its field allows.
class DomainError : public std::domain_error {
public:
    DomainError(std::string field, const std::string& what)
        : std::domain_error(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Rated maxima of the greenhouse energy units. Powers in W, gas flows in
/// kg/s, storage capacity in Wh, temperatures in degC.
struct UnitRatings {
    double chp_heat_max = 2.8e6;
    double chp_el_max = 1.2e6;
    double chp_gas_max = 12.0;
    double gb_heat_max = 7.0e6;
    double gb_gas_max = 194.0;
    double hp_heat_max = 5.0e5;
    double hp_el_max = 1.25e5;
    double dh_max = 6.0e6;
    double tes_capacity = 65.0e6;
    double tes_temp_min = 0.0;
    double tes_temp_max = 90.0;

    /// Storage heat capacity in Wh/degC.
    double tes_heat_capacity() const { return tes_capacity / (tes_temp_max - tes_temp_min); }

    void validate() const;
};

/// Setpoints and boundary conditions applied to the plant for one instant.
struct PlantInputs {
    double lf_chp = 0.0;
    double lf_gb = 0.0;
    int lf_hp = 0;
    double t_source = 20.0;
    double p_dh_req = 0.0;
};

/// Per-unit power and fuel flows for one instant.
struct PlantOutputs {
    double p_h_chp = 0.0;
    double p_e_chp = 0.0;
    double m_chp = 0.0;
    double p_h_gb = 0.0;
    double m_gb = 0.0;
    double p_h_hp = 0.0;
    double p_e_hp = 0.0;
    double p_dh = 0.0;

    /// Total heat delivered into the storage.
    double heat_supply() const { return p_h_chp + p_h_gb + p_h_hp + p_dh; }

    bool operator==(const PlantOutputs&) const = default;
};

struct TesState {
    double t_tes = 0.0; // degC
    double q_tes = 0.0; // Wh

    bool operator==(const TesState&) const = default;
};

/// Linear unit models: every output is its load factor times the rating.
/// Throws DomainError naming the first out-of-interval input.
PlantOutputs evaluate_units(const PlantInputs& inputs, const UnitRatings& ratings);

/// Stored energy for a storage temperature (zero-intercept affine map).
double tes_energy(double t_tes, const UnitRatings& ratings);

TesState tes_state_at(double t_tes, const UnitRatings& ratings);

/// Lossless storage update over dt seconds. The result is deliberately not
/// clamped to the physical temperature band.
TesState tes_step(const TesState& state, double p_charge, double p_demand, double dt,
                  const UnitRatings& ratings);

} // namespace ghdispatch
