#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "ciot/error.hpp"
#include "ciot/profile.hpp"
#include "ciot/tbs.hpp"
#include "support.hpp"

using namespace ciot;
using ciot::test::catalog;
using nlohmann::json;

namespace {

Errc code_of(auto&& fn)
{
    try {
        fn();
    } catch (const ModelError& e) {
        return e.code();
    }
    FAIL("no ModelError thrown");
    return Errc::ParseError;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_SUITE("model-core")
{
    TEST_CASE("n211 profile loads with tabulated constants")
    {
        const auto& p = ciot::test::n211();
        CHECK(p.technology == Technology::NbIot);
        CHECK(p.p_tx.value() == doctest::Approx(742.858));
        CHECK(p.p_tx_gaps->value() == doctest::Approx(153.6));
        CHECK(p.p_rx.value() == doctest::Approx(222.134));
        CHECK(p.p_psm_sleep.value() == doctest::Approx(0.0095));
        CHECK(p.e_sync.value() == doctest::Approx(160'000.0));
        CHECK(p.t_sync.value() == doctest::Approx(2200.0));
    }

    TEST_CASE("r410m lte-m profile loads with tabulated constants")
    {
        const auto& p = ciot::test::r410m_ltem();
        CHECK(p.technology == Technology::LteM);
        CHECK(p.p_tx.value() == doctest::Approx(1322.157));
        CHECK(p.p_rx.value() == doctest::Approx(335.607));
        CHECK(p.e_sync.value() == doctest::Approx(1'095'000.0));
        CHECK(p.t_sync.value() == doctest::Approx(4740.0));
        CHECK_FALSE(p.p_tx_gaps.has_value());
    }

    TEST_CASE("psm sleep above rx power is an ordering violation")
    {
        json doc = to_json(ciot::test::n211());
        doc["p_psm_sleep_mw"] = 300.0;
        CHECK(code_of([&] { (void)load_device_profile(doc); }) == Errc::OrderingViolation);
    }

    TEST_CASE("profile load errors")
    {
        json doc = to_json(ciot::test::n211());
        SUBCASE("missing field")
        {
            doc.erase("p_rx_mw");
            CHECK(code_of([&] { (void)load_device_profile(doc); }) == Errc::MissingField);
        }
        SUBCASE("negative power")
        {
            doc["p_tx_gaps_mw"] = -1.0;
            CHECK(code_of([&] { (void)load_device_profile(doc); }) == Errc::UnitViolation);
        }
        SUBCASE("malformed text")
        {
            CHECK(code_of([] { (void)load_device_profile_text("{\"name\": "); }) == Errc::ParseError);
        }
    }

    TEST_CASE("profile round trip through json")
    {
        for (const auto& name : catalog().profile_names()) {
            CAPTURE(name);
            const DeviceProfile& a = *catalog().profile(name);
            const json once = to_json(a);
            const DeviceProfile b = load_device_profile(once);
            CHECK(to_json(b) == once);
            CHECK(b.p_tx == a.p_tx);
            CHECK(b.delay_table == a.delay_table);
        }
    }

    TEST_CASE("unlisted transitions take no time")
    {
        CHECK(ciot::test::n211().delay("NO->SUCH").value() == 0.0);
        CHECK(ciot::test::n211().delay("DCI->DATA_TX").value() == 8.0);
    }

    TEST_CASE("nb-iot tbs lookups")
    {
        const auto tbs = catalog().tbs(Technology::NbIot);
        CHECK(tbs->lookup(0, 1) == 16);
        CHECK(tbs->lookup(10, 5) == tbs->lookup(10, 5));
        CHECK(tbs->lookup(10, 5) > tbs->lookup(2, 5));
        CHECK(code_of([&] { (void)tbs->lookup(99, 1); }) == Errc::OutOfDomain);
        CHECK(code_of([&] { (void)tbs->lookup(0, 0); }) == Errc::OutOfDomain);
    }

    TEST_CASE("bundled tbs tables are monotone on both axes")
    {
        for (auto tech : {Technology::NbIot, Technology::LteM}) {
            const auto& e = catalog().tbs(tech)->entries();
            for (const auto& [key, bits] : e) {
                CHECK(bits > 0);
                if (auto it = e.find({key.first + 1, key.second}); it != e.end()) CHECK(it->second >= bits);
                if (auto it = e.find({key.first, key.second + 1}); it != e.end()) CHECK(it->second >= bits);
            }
        }
    }

    TEST_CASE("tbs table rejects non-monotone data")
    {
        const std::string csv = "mcs,units,tbs_bits\n0,1,32\n1,1,16\n";
        CHECK(code_of([&] { (void)TbsTable::from_csv(Technology::NbIot, csv); }) == Errc::OrderingViolation);
        CHECK(code_of([] { (void)TbsTable::from_csv(Technology::NbIot, "mcs,tbs\n0,16\n"); }) == Errc::ParseError);
    }

    TEST_CASE("tbs checksum is enforced")
    {
        const auto dir = std::filesystem::path(CIOT_TEST_DATA_DIR) / "tbs";
        const auto tmp = std::filesystem::temp_directory_path() / "ciot_tbs_checksum";
        std::filesystem::create_directories(tmp);
        std::filesystem::copy_file(dir / "SHA256SUMS", tmp / "SHA256SUMS",
                                   std::filesystem::copy_options::overwrite_existing);
        std::string csv = slurp(dir / "nbiot_npusch.csv");
        {
            std::ofstream(tmp / "nbiot_npusch.csv", std::ios::binary) << csv;
        }
        CHECK_NOTHROW((void)load_tbs_table(tmp / "nbiot_npusch.csv", tmp / "SHA256SUMS", Technology::NbIot));
        csv += "\n";
        {
            std::ofstream(tmp / "nbiot_npusch.csv", std::ios::binary) << csv;
        }
        CHECK(code_of([&] {
                  (void)load_tbs_table(tmp / "nbiot_npusch.csv", tmp / "SHA256SUMS", Technology::NbIot);
              }) == Errc::ChecksumMismatch);
        std::filesystem::remove_all(tmp);
    }

    TEST_CASE("sha256 of a known string")
    {
        CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    TEST_CASE("tx power curve")
    {
        const auto& p = ciot::test::n211();
        CHECK(tx_power_consumption(p, 23.0).value() == 742.858);
        for (const auto& knot : p.tx_power_curve) {
            CHECK(tx_power_consumption(p, knot.dbm).value() == doctest::Approx(knot.power.value()));
        }
        const auto& a = p.tx_power_curve[3];
        const auto& b = p.tx_power_curve[4];
        CHECK(tx_power_consumption(p, (a.dbm + b.dbm) / 2).value() ==
              doctest::Approx((a.power.value() + b.power.value()) / 2));
        CHECK(code_of([&] { (void)tx_power_consumption(p, 24.0); }) == Errc::OutOfDomain);
        CHECK(code_of([&] { (void)tx_power_consumption(p, -60.0); }) == Errc::OutOfDomain);
    }

    TEST_CASE("tx power curve is monotone")
    {
        std::mt19937_64 rng(7);
        for (const auto& name : catalog().profile_names()) {
            const auto& p = *catalog().profile(name);
            std::uniform_real_distribution<double> dbm(p.tx_power_curve.front().dbm, p.tx_power_curve.back().dbm);
            for (int i = 0; i < 200; ++i) {
                double x = dbm(rng);
                double y = dbm(rng);
                if (x > y) std::swap(x, y);
                CHECK(tx_power_consumption(p, x) <= tx_power_consumption(p, y));
            }
        }
    }

    TEST_CASE("traffic profile derives the rate from the cycle")
    {
        const auto t = TrafficProfile::from_rate(100, 1.0 / 24.0);
        CHECK(t.cycle().value() == 24 * kMsPerHour);
        CHECK(t.cycle().value() * t.rate_per_hour() == doctest::Approx(kMsPerHour));
        CHECK(code_of([] { (void)TrafficProfile::from_cycle(-1, hours(1)); }) == Errc::NegativeSize);
        CHECK(code_of([] { (void)TrafficProfile::from_rate(1, 0.0); }) == Errc::InvalidConfig);
    }

    TEST_CASE("timer invariants")
    {
        TimerConfig t;
        CHECK_NOTHROW(validate(t));
        auto bad = t;
        bad.t3324 = hours(3);
        CHECK(code_of([&] { validate(bad); }) == Errc::InvalidTimer);
        bad = t;
        bad.ptw = bad.edrx_cycle + Milliseconds(1);
        CHECK(code_of([&] { validate(bad); }) == Errc::PtwExceedsCycle);
        bad = t;
        bad.cdrx_ondur_sf = bad.cdrx_long_cycle_sf + 1;
        CHECK(code_of([&] { validate(bad); }) == Errc::OnDurExceedsCycle);
        bad = t;
        bad.uss_monitor_sf = bad.uss_period_sf + 1;
        CHECK(code_of([&] { validate(bad); }) == Errc::MonitoringExceedsPeriod);
    }

    TEST_CASE("battery invariants")
    {
        BatteryConfig b;
        CHECK_NOTHROW(validate(b));
        b.safety_factor = 1.5;
        CHECK(code_of([&] { validate(b); }) == Errc::InvalidConfig);
    }
}
