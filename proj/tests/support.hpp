#pragma once

#include <filesystem>
#include <string>

#include "ciot/catalog.hpp"

namespace ciot::test {

inline DataCatalog& catalog()
{
    static DataCatalog c{std::filesystem::path(CIOT_TEST_DATA_DIR)};
    return c;
}

inline const DeviceProfile& n211() { return *catalog().profile("n211"); }
inline const DeviceProfile& r410m_nbiot() { return *catalog().profile("r410m-nbiot"); }
inline const DeviceProfile& r410m_ltem() { return *catalog().profile("r410m-ltem"); }

inline RadioConfig nb_radio() { return RadioConfig::defaults(Technology::NbIot, catalog().tbs(Technology::NbIot)); }
inline RadioConfig lte_radio() { return RadioConfig::defaults(Technology::LteM, catalog().tbs(Technology::LteM)); }

inline CycleSpec spec(const std::string& device, const std::string& scenario, std::int64_t payload_bytes,
                      double cycle_hours, double t3412_hours = 2.0)
{
    SpecRequest r;
    r.device = device;
    r.scenario = scenario;
    r.payload_bytes = payload_bytes;
    r.cycle_hours = cycle_hours;
    r.t3412_hours = t3412_hours;
    return make_cycle_spec(catalog(), r);
}

inline std::filesystem::path fixture(const std::string& name)
{
    return std::filesystem::path(CIOT_TEST_FIXTURES) / name;
}

}  // namespace ciot::test
