#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ciot/model.hpp"
#include "ciot/units.hpp"

namespace ciot {

/// Which measured level stands in for the power drawn while waiting between
/// the messages of a procedure.
enum class DelayPowerMode { AsRx, AsCdrxSleep };

struct TxPowerPoint {
    double dbm = 0.0;
    Milliwatts power;
};

using DelayTable = std::map<std::string, Milliseconds, std::less<>>;

/// Measured per-state power and energy constants of one modem in one mode.
struct DeviceProfile {
    std::string name;
    std::string description;
    Technology technology = Technology::NbIot;

    Milliwatts p_tx;  // at 23 dBm
    std::vector<TxPowerPoint> tx_power_curve;
    std::string tx_power_curve_note;
    std::optional<Milliwatts> p_tx_gaps;

    Milliwatts p_rx;
    std::optional<Milliwatts> p_rx_gaps;

    Milliwatts p_cdrx_sleep;
    Microjoules e_cdrx_ondur;
    Milliseconds t_cdrx_ondur;

    Milliwatts p_edrx_sleep;
    Microjoules e_edrx_ondur;
    Milliseconds t_edrx_ondur;

    Milliwatts p_psm_sleep;

    Microjoules e_sync;
    Milliseconds t_sync;

    Microjoules e_paging;
    Microjoules e_idrx_sync;
    Milliseconds t_idrx_sync;

    DelayPowerMode p_delay_mode = DelayPowerMode::AsCdrxSleep;
    DelayTable delay_table;

    [[nodiscard]] Milliwatts p_delay() const;
    /// Measured delay for a named transition; transitions the device table
    /// does not list take 0 ms.
    [[nodiscard]] Milliseconds delay(std::string_view transition) const;
    [[nodiscard]] Milliwatts tx_gap_power() const { return p_tx_gaps.value_or(Milliwatts{}); }
    [[nodiscard]] Milliwatts rx_gap_power() const { return p_rx_gaps.value_or(Milliwatts{}); }
};

/// Checks units, the deep-sleep ordering psm <= edrx <= cdrx <= rx and the
/// shape of the TX power curve. Throws ModelError.
void validate(const DeviceProfile& profile);

DeviceProfile load_device_profile(const nlohmann::json& doc);
DeviceProfile load_device_profile_text(std::string_view text);
DeviceProfile load_device_profile_file(const std::filesystem::path& path);

nlohmann::json to_json(const DeviceProfile& profile);

/// Consumption in the TX state at a commanded uplink power, by piecewise
/// linear interpolation over the profile's curve. 23 dBm returns p_tx.
Milliwatts tx_power_consumption(const DeviceProfile& profile, double ul_power_dbm);

}  // namespace ciot
