#include <doctest.h>

#include "ciot/error.hpp"
#include "ciot/procedure.hpp"
#include "support.hpp"

using namespace ciot;
using ciot::test::catalog;
using ciot::test::n211;
using nlohmann::json;

namespace {

struct Totals {
    std::int64_t ul;
    std::int64_t dl;
};

void check_totals(const ProcedureScript& s, Totals expected)
{
    CAPTURE(s.name);
    CHECK(s.ul_total_bits() == expected.ul);
    CHECK(s.dl_total_bits() == expected.dl);
}

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

const GapModel kNbGaps = GapModel::for_technology(Technology::NbIot);

}  // namespace

TEST_SUITE("procedure-energy")
{
    TEST_CASE("bundled nb-iot script totals")
    {
        const auto lib = catalog().procedures(n211());
        check_totals(lib->attach, {1816, 2672});
        check_totals(lib->service_request, {616, 496});
        check_totals(lib->tau, {768, 768});
        check_totals(lib->release, {32, 72});
        check_totals(lib->resume, {32, 72});
    }

    TEST_CASE("bundled lte-m script totals")
    {
        const auto lib = catalog().procedures(ciot::test::r410m_ltem());
        check_totals(lib->attach, {2424, 2384});
        check_totals(lib->service_request, {728, 392});
        check_totals(lib->tau, {1096, 1000});
        check_totals(lib->release, {32, 96});
        check_totals(lib->resume, {32, 96});
    }

    TEST_CASE("both nb-iot devices share the same message sizes")
    {
        const auto a = catalog().procedures(n211());
        const auto b = catalog().procedures(ciot::test::r410m_nbiot());
        CHECK(a->attach.ul_total_bits() == b->attach.ul_total_bits());
        CHECK(a->tau.dl_total_bits() == b->tau.dl_total_bits());
    }

    TEST_CASE("script validation")
    {
        const DelayTable none;
        CHECK(code_of([&] {
                  (void)load_procedure_script(json{{"name", "x"}, {"technology", "NBIOT"}, {"steps", json::array()}},
                                              none);
              }) == Errc::EmptyScript);
        const json negative = json::array({{{"name", "m"}, {"kind", "UL_DATA"}, {"size_bits", -8}}});
        CHECK(code_of([&] { (void)load_procedure_script(negative, none, Technology::NbIot); }) == Errc::NegativeSize);
        const json late_rap = json::array({{{"name", "m"}, {"kind", "UL_DATA"}, {"size_bits", 8}},
                                           {{"name", "p"}, {"kind", "RAP"}, {"size_bits", 0}}});
        CHECK_THROWS_AS((void)load_procedure_script(late_rap, none, Technology::NbIot), ModelError);
    }

    TEST_CASE("named delays resolve against the device table")
    {
        const json doc = json::array({{{"name", "DCI"}, {"kind", "DCI_RX"}, {"delay_after", "DCI->DATA_TX"}},
                                      {{"name", "data"}, {"kind", "UL_DATA"}, {"size_bits", 8}, {"delay_after_ms", 5}}});
        const auto s = load_procedure_script(doc, n211().delay_table, Technology::NbIot);
        REQUIRE(s.steps.size() == 2);
        CHECK(s.steps[0].delay_after.value() == 8.0);
        CHECK(s.steps[1].delay_after.value() == 5.0);
        CHECK(s.total_delay().value() == 13.0);
    }

    TEST_CASE("dci energy")
    {
        auto radio = ciot::test::nb_radio();
        CHECK(dci_energy(n211(), radio).value() == doctest::Approx(222.134));
        radio.rep_ctrl = 2;
        CHECK(dci_energy(n211(), radio).value() == doctest::Approx(2 * 222.134));
        radio.dci_sf = 0;
        CHECK(dci_energy(n211(), radio).value() == 0.0);
    }

    TEST_CASE("a single uplink step costs exactly its transmission")
    {
        const auto radio = ciot::test::nb_radio();
        ProcedureScript s{"one", Technology::NbIot, {{"data", MessageKind::UlData, 800}}};
        CHECK(procedure_energy(s, n211(), radio, kNbGaps).energy() == tx_energy(n211(), radio, 800, kNbGaps).energy());
    }

    TEST_CASE("release script composition")
    {
        const auto radio = ciot::test::nb_radio();
        const auto lib = catalog().procedures(n211());
        const auto& rel = lib->release;
        const double expected = dci_energy(n211(), radio).value() + rx_energy(n211(), radio, 72, kNbGaps).energy().value() +
                                ack_energy(n211(), radio, kNbGaps).energy().value() +
                                n211().p_delay().value() * rel.total_delay().value();
        CHECK(procedure_energy(rel, n211(), radio, kNbGaps).energy().value() == doctest::Approx(expected));
    }

    TEST_CASE("delay power follows the device")
    {
        CHECK(n211().p_delay() == n211().p_cdrx_sleep);
        CHECK(ciot::test::r410m_ltem().p_delay() == ciot::test::r410m_ltem().p_rx);
    }

    TEST_CASE("removing delays saves exactly the delay energy")
    {
        const auto radio = ciot::test::nb_radio();
        for (const auto* s : {&catalog().procedures(n211())->attach, &catalog().procedures(n211())->tau}) {
            auto bare = *s;
            for (auto& step : bare.steps) step.delay_after = Milliseconds{};
            const double with = procedure_energy(*s, n211(), radio, kNbGaps).energy().value();
            const double without = procedure_energy(bare, n211(), radio, kNbGaps).energy().value();
            CHECK(with > without);
            CHECK(with - without == doctest::Approx(n211().p_delay().value() * s->total_delay().value()));
        }
    }

    TEST_CASE("procedure energy is additive over concatenation")
    {
        const auto radio = ciot::test::nb_radio();
        const auto lib = catalog().procedures(n211());
        auto joined = lib->service_request;
        joined.steps.back().delay_after = Milliseconds(12);
        auto tail = lib->release.steps;
        joined.steps.insert(joined.steps.end(), tail.begin(), tail.end());
        const double sum = procedure_energy(lib->service_request, n211(), radio, kNbGaps).energy().value() +
                           procedure_energy(lib->release, n211(), radio, kNbGaps).energy().value() +
                           12 * n211().p_delay().value();
        CHECK(procedure_energy(joined, n211(), radio, kNbGaps).energy().value() == doctest::Approx(sum));
    }

    TEST_CASE("technology mismatch")
    {
        const auto lib = catalog().procedures(ciot::test::r410m_ltem());
        CHECK(code_of([&] {
                  (void)procedure_energy(lib->tau, n211(), ciot::test::nb_radio(), kNbGaps);
              }) == Errc::TechnologyMismatch);
    }

    TEST_CASE("service request with data")
    {
        const auto radio = ciot::test::nb_radio();
        const auto lib = catalog().procedures(n211());
        const auto zero = service_request_script(*lib, n211(), radio, 0);
        CHECK(zero.ul_total_bits() == 616);
        CHECK(zero.dl_total_bits() == 496);
        CHECK(service_request_script(*lib, n211(), radio, 800).ul_total_bits() == 1416);

        const auto& lte = ciot::test::r410m_ltem();
        const auto lte_script = service_request_script(*catalog().procedures(lte), lte, ciot::test::lte_radio(), 0);
        CHECK(lte_script.ul_total_bits() == 728);
        CHECK(lte_script.dl_total_bits() == 392);
        CHECK(service_request_script(*catalog().procedures(lte), lte, ciot::test::lte_radio(), 800).ul_total_bits() ==
              1528);
    }

    TEST_CASE("nb-iot data rides in the request, lte-m data follows the connection complete")
    {
        const auto nb = with_payload(catalog().procedures(n211())->service_request, 800);
        int carriers = 0;
        for (const auto& s : nb.steps) carriers += s.carries_payload;
        CHECK(carriers == 1);

        const auto& lte = catalog().procedures(ciot::test::r410m_ltem())->service_request;
        std::size_t complete = 0;
        std::size_t data = 0;
        for (std::size_t i = 0; i < lte.steps.size(); ++i) {
            if (lte.steps[i].name == "RRC Connection Complete") complete = i;
            if (lte.steps[i].carries_payload) data = i;
        }
        CHECK(data > complete);
    }

    TEST_CASE("scheduling requests are spaced by the SR interval")
    {
        const auto& lte = ciot::test::r410m_ltem();
        const auto lib = catalog().procedures(lte);
        auto radio = ciot::test::lte_radio();
        const auto g = GapModel::for_technology(Technology::LteM);
        const double one = service_request_energy(*lib, lte, radio, g, 100).energy().value();
        radio.n_scheduling_requests = 2;
        const double two = service_request_energy(*lib, lte, radio, g, 100).energy().value();
        const double expected = ack_energy(lte, radio, g).energy().value() + lte.p_delay().value() * lte.delay("SR->SR").value();
        CHECK(two - one == doctest::Approx(expected));
    }

    TEST_CASE("attach carries the payload at the end")
    {
        const auto lib = catalog().procedures(n211());
        const auto s = attach_with_payload(lib->attach, 800, n211());
        CHECK(s.ul_total_bits() == 1816 + 800);
        CHECK(s.steps.back().kind == MessageKind::UlData);
    }

    TEST_CASE("message kinds round trip")
    {
        for (auto k : {MessageKind::UlData, MessageKind::DlData, MessageKind::Rap, MessageKind::DciRx, MessageKind::AckUl}) {
            CHECK(message_kind_from_string(to_string(k)) == k);
        }
    }
}
