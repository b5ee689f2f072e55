#pragma once

#include <memory>
#include <string_view>

#include "ciot/model.hpp"
#include "ciot/tbs.hpp"
#include "ciot/units.hpp"

namespace ciot {

enum class RapFormat { NbFmt0, NbFmt1, LteMFmt1 };

std::string_view to_string(RapFormat f);
RapFormat rap_format_from_string(std::string_view s);

inline constexpr int kMaxRepetitions = 32;

/// Physical-layer transmission parameters of one configuration.
struct RadioConfig {
    Technology technology = Technology::NbIot;
    int mcs = 10;
    int rep_data_ul = 1;  // N_pkt
    int rep_data_dl = 1;  // N_SF
    int rep_ctrl = 1;     // N_ack, N_USS
    int rep_rap = 1;      // N_RAP
    int n_ru = 5;         // NB-IoT uplink resource units
    Milliseconds t_ru{8.0};
    int n_sf = 5;         // LTE-M uplink and downlink subframes (both technologies)
    int header_bits_ul = 40;
    int header_bits_dl = 40;
    RapFormat rap_format = RapFormat::NbFmt1;
    double ul_tx_power_dbm = 23.0;
    int dci_sf = 1;
    int n_scheduling_requests = 1;
    std::shared_ptr<const TbsTable> tbs;

    /// Defaults for a technology, with the matching RAP format.
    static RadioConfig defaults(Technology technology, std::shared_ptr<const TbsTable> tbs);

    /// Resource count used to index the uplink TBS table.
    [[nodiscard]] int ul_units() const { return technology == Technology::NbIot ? n_ru : n_sf; }
};

void validate(const RadioConfig& radio);

}  // namespace ciot
