#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "ciot/error.hpp"
#include "ciot/lifetime.hpp"
#include "ciot/trace_oracle.hpp"
#include "support.hpp"

using namespace ciot;
using ciot::test::catalog;
using ciot::test::spec;

namespace {

SpecFactory factory()
{
    return [](const SweepPoint& p) { return spec(p.device, p.scenario, p.payload_bytes, p.cycle_hours, p.t3412_hours); };
}

double lifetime(const CycleSpec& s) { return estimate_lifetime_hours(s, BatteryConfig{}); }

}  // namespace

TEST_SUITE("lifetime")
{
    TEST_CASE("tau occurrences per cycle")
    {
        CHECK(tau_count(hours(2), hours(2)) == 0);
        CHECK(tau_count(hours(24), hours(4)) == 5);
        CHECK(tau_count(hours(1), hours(2)) == 0);
        CHECK(tau_count(hours(2.01), hours(2)) == 1);
        CHECK_THROWS_AS((void)tau_count(hours(1), Milliseconds(0)), ModelError);
    }

    TEST_CASE("short measurement setup has no tau")
    {
        const auto b = cycle_energy(spec("n211", "good", 100, 1.0, 2.0));
        CHECK(b.tau_count == 0);
        CHECK(b.tau_uj == 0);
    }

    TEST_CASE("degenerate cycle is connection plus deep sleep")
    {
        auto s = spec("n211", "good", 0, 1.0);
        s.timers.rrc_inactivity = Milliseconds(0);
        s.timers.t3324 = Milliseconds(0);
        s.device.e_sync = Microjoules(0);
        s.device.t_sync = Milliseconds(0);
        const auto g = s.gaps();
        const auto sr = procedure_energy(connection_script(s), s.device, s.radio, g);
        const auto rel = procedure_energy(s.procedures->release, s.device, s.radio, g);
        const double sleep_ms = kMsPerHour - sr.duration().value() - rel.duration().value();
        const auto b = cycle_energy(s);
        CHECK(b.sync_uj == 0);
        CHECK(b.cdrx_uj == 0);
        CHECK(b.service_request_uj == std::llround(sr.energy().value()));
        CHECK(b.release_uj == std::llround(rel.energy().value()));
        CHECK(b.sleep_uj == std::llround(sleep_ms * s.device.p_psm_sleep.value()));
        CHECK(b.total_uj == b.service_request_uj + b.release_uj + b.sleep_uj);
    }

    TEST_CASE("inactivity period in whole and partial drx cycles")
    {
        const auto& p = ciot::test::n211();
        TimerConfig t;
        t.rrc_inactivity = Milliseconds(20'000);
        const double cycle = cdrx_cycle_energy(p, t).energy().value();
        const double expected = 19 * cycle + (20'000.0 - 19 * 1024.0) * p.p_cdrx_sleep.value();
        CHECK(cdrx_inactivity_energy(p, t).energy().value() == doctest::Approx(expected));
        t.rrc_inactivity = Milliseconds(0);
        CHECK(cdrx_inactivity_energy(p, t).energy().value() == 0.0);
    }

    TEST_CASE("first cycle attach costs more than a service request")
    {
        auto s = spec("n211", "good", 100, 1.0);
        const auto steady = cycle_energy(s);
        s.first_cycle_attach = true;
        const auto first = cycle_energy(s);
        CHECK(first.service_request_uj > steady.service_request_uj);
        CHECK(connection_script(s).ul_total_bits() == 1816 + 800);
    }

    TEST_CASE("closed form agrees with the oracle for the ten-year spec")
    {
        const auto c = compare(spec("n211", "good", 100, 24.0, 4.0));
        CHECK(c.relative_error <= 0.01);
    }

    TEST_CASE("hourly energy")
    {
        const auto s = spec("n211", "good", 100, 1.0);
        const auto b = cycle_energy(s);
        CHECK(hourly_energy_mj(s) == doctest::Approx(b.total_uj / 1e3));

        const auto day = spec("n211", "good", 100, 24.0);
        CHECK(hourly_energy_mj(day) == doctest::Approx(cycle_energy(day).total_uj / 1e3 / 24.0));

        const auto twice = TrafficProfile::from_rate(100, 2.0);
        CHECK(hourly_energy_mj(b, twice) == doctest::Approx(2.0 * hourly_energy_mj(b, s.traffic)));
    }

    TEST_CASE("lifetime arithmetic")
    {
        BatteryConfig battery;
        CHECK(estimate_lifetime_hours(18'000.0, battery) == doctest::Approx(1000.0));
        battery.capacity_wh = 2.5;
        CHECK(estimate_lifetime_hours(18'000.0, battery) == doctest::Approx(500.0));
        battery.e_device_mj_per_hour = 18'000.0;
        CHECK(estimate_lifetime_hours(18'000.0, battery) == doctest::Approx(250.0));
        try {
            (void)estimate_lifetime_hours(0.0, BatteryConfig{});
            FAIL("expected ZeroConsumption");
        } catch (const ModelError& e) {
            CHECK(e.code() == Errc::ZeroConsumption);
        }
    }

    TEST_CASE("ten-year claim")
    {
        CHECK(lifetime(spec("n211", "good", 100, 24.0, 4.0)) >= 87'600.0);
    }

    TEST_CASE("tau terms vanish up to T3412 and the rest ignores it")
    {
        for (double c : {0.5, 1.0, 1.5, 2.0}) {
            CHECK(cycle_energy(spec("n211", "bad", 100, c, 2.0)).tau_uj == 0);
        }
        const auto a = cycle_energy(spec("n211", "good", 100, 24.0, 2.0));
        const auto b = cycle_energy(spec("n211", "good", 100, 24.0, 6.0));
        CHECK(a.sync_uj == b.sync_uj);
        CHECK(a.service_request_uj == b.service_request_uj);
        CHECK(a.cdrx_uj == b.cdrx_uj);
        CHECK(a.release_uj == b.release_uj);
        CHECK(a.tau_count == 11);
        CHECK(b.tau_count == 3);
    }

    TEST_CASE("slope changes at the T3412 boundary")
    {
        const double step = 0.25;
        auto at = [](double c) { return lifetime(spec("n211", "good", 100, c, 2.0)); };
        const double before = (at(2.0) - at(2.0 - step)) / step;
        const double after = (at(2.0 + step) - at(2.0)) / step;
        CHECK(before > 0.0);
        CHECK(after < 0.0);
    }

    TEST_CASE("breakdown parts are non-negative and sum exactly")
    {
        std::mt19937_64 rng(17);
        std::uniform_int_distribution<std::int64_t> payload(0, 1000);
        std::uniform_real_distribution<double> cycle(0.2, 48.0);
        const char* devices[] = {"n211", "r410m-nbiot", "r410m-ltem"};
        const char* scenarios[] = {"good", "bad"};
        for (int i = 0; i < 120; ++i) {
            const auto s = spec(devices[i % 3], scenarios[i % 2], payload(rng), cycle(rng), 1.0 + (i % 5));
            const auto b = cycle_energy(s);
            CHECK(b.total_uj == b.sum_of_parts());
            for (auto part : {b.sync_uj, b.service_request_uj, b.cdrx_uj, b.release_uj, b.tau_uj, b.sleep_uj}) {
                CHECK(part >= 0);
            }
        }
    }

    TEST_CASE("lifetime falls with payload and rises with T3412")
    {
        std::mt19937_64 rng(19);
        std::uniform_int_distribution<std::int64_t> payload(0, 1000);
        std::uniform_real_distribution<double> cycle(0.5, 48.0);
        std::uniform_real_distribution<double> t3412(0.5, 12.0);
        for (int i = 0; i < 150; ++i) {
            const char* dev = i % 2 ? "n211" : "r410m-ltem";
            std::int64_t a = payload(rng);
            std::int64_t b = payload(rng);
            if (a > b) std::swap(a, b);
            const double c = cycle(rng);
            const double t = t3412(rng);
            CHECK(lifetime(spec(dev, "good", a, c, t)) >= lifetime(spec(dev, "good", b, c, t)));

            double t1 = t3412(rng);
            double t2 = t3412(rng);
            if (t1 > t2) std::swap(t1, t2);
            CHECK(lifetime(spec(dev, "good", a, c, t1)) <= lifetime(spec(dev, "good", a, c, t2)));
        }
    }

    TEST_CASE("lifetime falls with rate inside one tau regime")
    {
        std::mt19937_64 rng(23);
        std::uniform_real_distribution<double> frac(0.05, 1.0);
        for (int i = 0; i < 100; ++i) {
            const int regime = i % 6;
            double c1 = 2.0 * (regime + frac(rng));
            double c2 = 2.0 * (regime + frac(rng));
            if (c1 > c2) std::swap(c1, c2);  // c1 has the higher rate
            REQUIRE(tau_count(hours(c1), hours(2)) == tau_count(hours(c2), hours(2)));
            CHECK(lifetime(spec("n211", "good", 100, c1, 2.0)) <= lifetime(spec("n211", "good", 100, c2, 2.0)));
        }
    }

    TEST_CASE("a cycle just past T3412 pays a whole tau")
    {
        // The TAU count steps from 0 to 1 when the cycle passes T3412, so
        // a slightly lower rate can shorten the lifetime.
        const double at = lifetime(spec("n211", "good", 100, 2.0, 2.0));
        const double past = lifetime(spec("n211", "good", 100, 2.01, 2.0));
        CHECK(past < at);
    }

    TEST_CASE("sweep rows")
    {
        SweepGrid one{{"n211"}, {"good"}, {100}, {24.0}, {4.0}};
        const auto rows = sweep(one.expand(), factory(), BatteryConfig{});
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].lifetime_hours == lifetime(spec("n211", "good", 100, 24.0, 4.0)));

        SweepGrid payloads{{"n211"}, {"good"}, {10, 100, 1000}, {12.0}, {2.0}};
        const auto p = sweep(payloads.expand(), factory(), BatteryConfig{});
        REQUIRE(p.size() == 3);
        CHECK(p[0].lifetime_hours >= p[1].lifetime_hours);
        CHECK(p[1].lifetime_hours >= p[2].lifetime_hours);

        SweepGrid mixed{{"r410m-ltem"}, {"good", "extreme"}, {100}, {1.0}, {2.0}};
        const auto m = sweep(mixed.expand(), factory(), BatteryConfig{});
        REQUIRE(m.size() == 2);
        CHECK(m[0].ok());
        CHECK(m[1].error == "Unreachable");
        CHECK_FALSE(m[1].breakdown.has_value());
    }

    TEST_CASE("empty grid")
    {
        SweepGrid g{{"n211"}, {"good"}, {}, {1.0}, {2.0}};
        try {
            (void)g.expand();
            FAIL("expected EmptyGrid");
        } catch (const ModelError& e) {
            CHECK(e.code() == Errc::EmptyGrid);
        }
    }

    TEST_CASE("parallel sweep is byte-identical to sequential")
    {
        SweepGrid g{{"n211", "r410m-ltem"}, {"good", "bad", "extreme"}, {10, 100, 500}, {0.5, 2.0, 24.0}, {2.0, 4.0}};
        const auto points = g.expand();
        std::ostringstream seq;
        std::ostringstream par;
        write_sweep_csv(seq, sweep(points, factory(), BatteryConfig{}, 1));
        write_sweep_csv(par, sweep(points, factory(), BatteryConfig{}, 4));
        CHECK(seq.str() == par.str());
    }

    TEST_CASE("sweep csv round trip")
    {
        SweepGrid g{{"n211", "r410m-ltem"}, {"good", "extreme"}, {100}, {1.0, 24.0}, {2.0}};
        const auto rows = sweep(g.expand(), factory(), BatteryConfig{});
        std::ostringstream out;
        write_sweep_csv(out, rows);
        CHECK(out.str().rfind(kSweepCsvHeader, 0) == 0);
        std::istringstream in(out.str());
        const auto back = read_sweep_csv(in);
        REQUIRE(back.size() == rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            CHECK(back[i].point.device == rows[i].point.device);
            CHECK(back[i].point.scenario == rows[i].point.scenario);
            CHECK(back[i].point.cycle_hours == rows[i].point.cycle_hours);
            CHECK(back[i].error == rows[i].error);
            REQUIRE(back[i].breakdown.has_value() == rows[i].breakdown.has_value());
            if (!rows[i].breakdown) continue;
            // Energies are written as exact millijoule decimals.
            CHECK(back[i].breakdown->total_uj == rows[i].breakdown->total_uj);
            CHECK(back[i].breakdown->tau_uj == rows[i].breakdown->tau_uj);
            CHECK(back[i].breakdown->tau_count == rows[i].breakdown->tau_count);
            CHECK(std::abs(back[i].lifetime_hours - rows[i].lifetime_hours) <= 5e-4);
        }
    }

    TEST_CASE("millijoule rendering is exact")
    {
        CHECK(format_mj(3'113'082) == "3113.082");
        CHECK(format_mj(5) == "0.005");
        CHECK(format_mj(0) == "0.000");
    }
}
