#include "ghdispatch/dispatch.hpp"
#include "support/fixtures.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>

using namespace ghdispatch;
using fixtures::ConstantSignals;
using fixtures::constant_forecasts;

namespace {

const UnitRatings kRatings{};

DecisionGrid grid_of(std::size_t h) {
    DecisionGrid g;
    g.h = h;
    return g;
}

} // namespace

TEST_CASE("DecisionGrid: reference grid gene domains") {
    const auto domains = genome_domains(grid_of(3));
    CHECK(domains == std::vector<int>{2, 2, 2, 21, 21, 21, 2, 2, 2, 601, 601, 601});
}

TEST_CASE("DecisionGrid: resolutions must divide their range") {
    DecisionGrid g;
    g.g_r = 0.3;
    CHECK_THROWS_AS(g.validate(), DomainError);
    g = {};
    g.d_r = 7.0e5;
    CHECK_THROWS_AS(g.validate(), DomainError);
    g = {};
    g.h = 0;
    CHECK_THROWS_AS(g.validate(), DomainError);
}

TEST_CASE("genome decode/encode") {
    DecisionGrid g = grid_of(4);
    moga::Rng rng(1);
    for (int trial = 0; trial < 200; ++trial) {
        const auto s = fixtures::random_schedule(g, rng);
        CHECK_NOTHROW(validate_schedule(s, g));
        CHECK(decode_genome(encode_schedule(s, g), g) == s);
    }
    const std::vector<int> genes{1, 0, 0, 0, 20, 10, 0, 0, 1, 1, 0, 0, 600, 1, 0, 0};
    const auto s = decode_genome(genes, g);
    CHECK(s.c[0] == 1.0);
    CHECK(s.g[0] == 1.0);
    CHECK(s.g[1] == doctest::Approx(0.5));
    CHECK(s.hp[0] == 1);
    CHECK(s.d[0] == 6.0e6);
    CHECK(s.d[1] == 1.0e4);
    CHECK_THROWS_AS(decode_genome(std::vector<int>(3, 0), g), std::invalid_argument);
}

TEST_CASE("validate_schedule rejects off-grid setpoints") {
    DecisionGrid g = grid_of(2);
    auto s = Schedule::zeros(2);
    CHECK_NOTHROW(validate_schedule(s, g));
    s.c[1] = 0.5; // c_r = 1
    CHECK_THROWS_AS(validate_schedule(s, g), DomainError);
    s = Schedule::zeros(2);
    s.g[0] = 0.07;
    CHECK_THROWS_AS(validate_schedule(s, g), DomainError);
    s = Schedule::zeros(2);
    s.d[0] = 6.01e6;
    CHECK_THROWS_AS(validate_schedule(s, g), DomainError);
    s = Schedule::zeros(2);
    s.d[0] = 5.0e3;
    CHECK_THROWS_AS(validate_schedule(s, g), DomainError);
    s = Schedule::zeros(2);
    s.hp[0] = 3;
    CHECK_THROWS_AS(validate_schedule(s, g), DomainError);
}

TEST_CASE("simulate: storage trajectories") {
    EconomicParams p;
    SUBCASE("idle plant and no demand keeps the storage at t_init") {
        const auto f = constant_forecasts(24, {});
        const auto t = simulate(Schedule::zeros(24), f, p, kRatings);
        for (const auto& r : t.instants)
            CHECK(r.tes.t_tes == doctest::Approx(50.0).epsilon(1e-14));
    }
    SUBCASE("constant demand drains two degrees per hour") {
        ConstantSignals s;
        s.heat_demand = 1.444444e6;
        const auto t = simulate(Schedule::zeros(6), constant_forecasts(6, s), p, kRatings);
        for (std::size_t i = 0; i < 6; ++i)
            CHECK(std::abs(t.instants[i].tes.t_tes - (50.0 - 2.0 * (i + 1))) <= 1e-5);
    }
    SUBCASE("CHP at full load charges 2.8 MWh per hour") {
        auto sched = Schedule::zeros(5);
        sched.c.assign(5, 1.0);
        const auto t = simulate(sched, constant_forecasts(5, {}), p, kRatings);
        for (std::size_t i = 0; i < 5; ++i)
            CHECK(std::abs(t.instants[i].tes.t_tes - (50.0 + 3.8769 * (i + 1))) <= 1e-4 * (i + 1));
    }
    SUBCASE("horizon mismatch") {
        CHECK_THROWS_AS(simulate(Schedule::zeros(5), constant_forecasts(4, {}), p, kRatings),
                        std::invalid_argument);
    }
}

TEST_CASE("eval_cost worked examples") {
    EconomicParams p;
    SUBCASE("zero trajectory") {
        ConstantSignals s;
        s.el_price = 50.0;
        s.gas_price = 40.0;
        s.dh_price = 60.0;
        const auto t = simulate(Schedule::zeros(3), constant_forecasts(3, s), p, kRatings);
        CHECK(eval_cost(t) == 0.0);
    }
    SUBCASE("heat pump for one hour pays spot plus tariff") {
        ConstantSignals s;
        s.el_price = 50.0;
        auto sched = Schedule::zeros(1);
        sched.hp[0] = 1;
        const auto t = simulate(sched, constant_forecasts(1, s), p, kRatings);
        CHECK(t.instants[0].cost_el == doctest::Approx(29.375).epsilon(1e-12));
        CHECK(eval_cost(t) == doctest::Approx(29.375).epsilon(1e-12));
    }
    SUBCASE("CHP export earns the spot price only") {
        ConstantSignals s;
        s.el_price = 50.0;
        auto sched = Schedule::zeros(1);
        sched.c[0] = 1.0;
        const auto t = simulate(sched, constant_forecasts(1, s), p, kRatings);
        CHECK(t.instants[0].income_el == doctest::Approx(60.0).epsilon(1e-12));
        CHECK(eval_cost(t) == doctest::Approx(-60.0).epsilon(1e-12)); // gas is free here
    }
    SUBCASE("gas and district heating") {
        ConstantSignals s;
        s.gas_price = 40.0;
        s.dh_price = 60.0;
        p.gas_lhv = 1.0e-5;
        auto sched = Schedule::zeros(1);
        sched.g[0] = 1.0;
        sched.d[0] = 2.0e6;
        const auto t = simulate(sched, constant_forecasts(1, s), p, kRatings);
        // 194 kg/s * 3600 s * 1e-5 MWh/kg = 6.984 MWh
        CHECK(t.instants[0].cost_gas == doctest::Approx(40.0 * 6.984).epsilon(1e-12));
        CHECK(t.instants[0].cost_dh == doctest::Approx(120.0).epsilon(1e-12));
    }
}

TEST_CASE("eval_co2 worked examples") {
    EconomicParams p;
    SUBCASE("zero trajectory") {
        ConstantSignals s;
        s.co2_el = 160.0;
        s.co2_dh = 100.0;
        const auto f = constant_forecasts(2, s);
        CHECK(eval_co2(simulate(Schedule::zeros(2), f, p, kRatings), f) == 0.0);
    }
    SUBCASE("two MWh of gas") {
        p.gas_lhv = 2.0 / (12.0 * 3600.0); // CHP at full load burns exactly 2 MWh
        auto sched = Schedule::zeros(1);
        sched.c[0] = 1.0;
        const auto f = constant_forecasts(1, {});
        const auto t = simulate(sched, f, p, kRatings);
        CHECK(t.instants[0].co2_gas == doctest::Approx(408.0).epsilon(1e-12));
        CHECK(eval_co2(t, f) == doctest::Approx(408.0).epsilon(1e-12));
    }
    SUBCASE("heat pump at 160 kg/MWh") {
        ConstantSignals s;
        s.co2_el = 160.0;
        auto sched = Schedule::zeros(1);
        sched.hp[0] = 1;
        const auto f = constant_forecasts(1, s);
        CHECK(eval_co2(simulate(sched, f, p, kRatings), f) == doctest::Approx(20.0).epsilon(1e-12));
    }
    SUBCASE("exported electricity earns no emission credit") {
        ConstantSignals s;
        s.co2_el = 160.0;
        auto sched = Schedule::zeros(1);
        sched.c[0] = 1.0;
        const auto f = constant_forecasts(1, s);
        CHECK(eval_co2(simulate(sched, f, p, kRatings), f) >= 0.0);
    }
}

TEST_CASE("eval_constraints") {
    EconomicParams p;
    ConstantSignals s;
    SUBCASE("feasible trajectory") {
        const auto f = constant_forecasts(4, s);
        const auto v = eval_constraints(simulate(Schedule::zeros(4), f, p, kRatings), f, p);
        CHECK(v.v_el == 0.0);
        CHECK(v.v_tes == 0.0);
        CHECK(v.v_end == 0.0);
    }
    SUBCASE("ending two degrees low") {
        s.heat_demand = 1.444444e6;
        const auto f = constant_forecasts(1, s);
        const auto v = eval_constraints(simulate(Schedule::zeros(1), f, p, kRatings), f, p);
        CHECK(v.v_end == doctest::Approx(2.0).epsilon(1e-6));
        CHECK(v.v_tes == 0.0);
    }
    SUBCASE("ending warmer is free") {
        auto sched = Schedule::zeros(1);
        sched.d[0] = 3.61e6; // +5 degC over one hour
        const auto f = constant_forecasts(1, s);
        const auto t = simulate(sched, f, p, kRatings);
        CHECK(t.instants[0].tes.t_tes == doctest::Approx(50.0 + 3.61e6 * 90.0 / 65.0e6).epsilon(1e-12));
        CHECK(eval_constraints(t, f, p).v_end == 0.0);
    }
    SUBCASE("grid capacity counts offending instants") {
        s.el_demand = 11.9e6;
        const auto f = constant_forecasts(3, s);
        auto sched = Schedule::zeros(3);
        sched.hp = {1, 0, 1};
        const auto v = eval_constraints(simulate(sched, f, p, kRatings), f, p);
        CHECK(v.v_el == 2.0);
    }
}

TEST_CASE("evaluate") {
    EconomicParams p;
    SUBCASE("deterministic") {
        const auto f = fixtures::daily_forecasts(48);
        moga::Rng rng(2);
        const auto sched = fixtures::random_schedule(grid_of(48), rng);
        const auto a = evaluate(sched, f, p, kRatings);
        const auto b = evaluate(sched, f, p, kRatings);
        CHECK(a.objectives == b.objectives);
        CHECK(std::memcmp(&a.objectives, &b.objectives, sizeof a.objectives) == 0);
    }
    SUBCASE("idle plant under demand leaves the band in the fourth hour") {
        ConstantSignals s;
        s.heat_demand = 1.444444e6;
        const auto f = constant_forecasts(6, s);
        const auto sol = evaluate(Schedule::zeros(6), f, p, kRatings);
        CHECK(sol.trajectory.instants[2].tes.t_tes >= p.t_tes_min);
        CHECK(sol.trajectory.instants[3].tes.t_tes < p.t_tes_min);
        CHECK(sol.objectives.v_tes == 3.0);
        CHECK_FALSE(sol.valid);
    }
    SUBCASE("district heating matching demand is valid") {
        ConstantSignals s;
        s.heat_demand = 3.0e6;
        s.dh_price = 60.0;
        s.co2_dh = 90.0;
        const auto f = constant_forecasts(24, s);
        auto sched = Schedule::zeros(24);
        sched.d.assign(24, 3.0e6);
        const auto sol = evaluate(sched, f, p, kRatings);
        CHECK(sol.valid);
        CHECK(sol.objectives.cost == doctest::Approx(24 * 3.0 * 60.0).epsilon(1e-12));
        CHECK(sol.objectives.co2 == doctest::Approx(24 * 3.0 * 90.0).epsilon(1e-12));
        double per_instant = 0.0;
        for (const auto& r : sol.trajectory.instants)
            per_instant += r.cost_gas + r.cost_el + r.cost_dh - r.income_el;
        CHECK(sol.objectives.cost == doctest::Approx(per_instant).epsilon(1e-12));
    }
}

TEST_CASE("properties over random schedules") {
    EconomicParams p;
    p.gas_lhv = fixtures::kSyntheticGasLhv;
    const DecisionGrid g = grid_of(24);
    const auto f = fixtures::daily_forecasts(24);
    moga::Rng rng(99);

    for (int trial = 0; trial < 300; ++trial) {
        const auto sched = fixtures::random_schedule(g, rng);
        const auto sol = evaluate(sched, f, p, kRatings);

        // Validity agrees with a direct check of the three constraints.
        CHECK(sol.valid == fixtures::constraints_hold(sol.trajectory, f, p));

        // Zero prices cost nothing.
        auto free = f;
        std::fill(free.el_price.begin(), free.el_price.end(), 0.0);
        std::fill(free.gas_price.begin(), free.gas_price.end(), 0.0);
        std::fill(free.dh_price.begin(), free.dh_price.end(), 0.0);
        auto p0 = p;
        p0.el_tariff = 0.0;
        CHECK(evaluate(sched, free, p0, kRatings).objectives.cost == 0.0);

        // Shifting electricity prices by delta moves cost by delta * (E_hp - E_chp).
        const double delta = 17.5;
        auto shifted = f;
        for (auto& v : shifted.el_price)
            v += delta;
        double e_hp = 0.0, e_chp = 0.0;
        for (const auto& r : sol.trajectory.instants) {
            e_hp += r.outputs.p_e_hp / 1e6;
            e_chp += r.outputs.p_e_chp / 1e6;
        }
        const double moved = evaluate(sched, shifted, p, kRatings).objectives.cost - sol.objectives.cost;
        CHECK(moved == doctest::Approx(delta * (e_hp - e_chp)).epsilon(1e-9).scale(1e3));
    }
}

TEST_CASE("CO2 never falls when a load factor rises (constant intensities)") {
    EconomicParams p;
    p.gas_lhv = fixtures::kSyntheticGasLhv;
    ConstantSignals s;
    s.co2_el = 150.0;
    s.co2_dh = 90.0;
    s.heat_demand = 3.0e6;
    const auto f = constant_forecasts(12, s);
    const DecisionGrid g = grid_of(12);
    moga::Rng rng(4);
    for (int trial = 0; trial < 200; ++trial) {
        auto genes = encode_schedule(fixtures::random_schedule(g, rng), g);
        const auto domains = genome_domains(g);
        const double base = evaluate(decode_genome(genes, g), f, p, kRatings).objectives.co2;
        const auto k = rng.index(genes.size());
        if (genes[k] + 1 >= domains[k])
            continue;
        ++genes[k];
        CHECK(evaluate(decode_genome(genes, g), f, p, kRatings).objectives.co2 >= base);
    }
}
