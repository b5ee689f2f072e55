#include "ciot/radio.hpp"

#include <string>

#include "ciot/error.hpp"

namespace ciot {

std::string_view to_string(RapFormat f)
{
    switch (f) {
    case RapFormat::NbFmt0: return "NB_FMT0";
    case RapFormat::NbFmt1: return "NB_FMT1";
    case RapFormat::LteMFmt1: return "LTEM_FMT1";
    }
    return "?";
}

RapFormat rap_format_from_string(std::string_view s)
{
    if (s == "NB_FMT0") return RapFormat::NbFmt0;
    if (s == "NB_FMT1") return RapFormat::NbFmt1;
    if (s == "LTEM_FMT1") return RapFormat::LteMFmt1;
    throw ModelError(Errc::UnknownFormat, "unknown RAP format '" + std::string(s) + "'");
}

RadioConfig RadioConfig::defaults(Technology technology, std::shared_ptr<const TbsTable> tbs)
{
    RadioConfig r;
    r.technology = technology;
    r.rap_format = technology == Technology::NbIot ? RapFormat::NbFmt1 : RapFormat::LteMFmt1;
    r.tbs = std::move(tbs);
    return r;
}

void validate(const RadioConfig& r)
{
    auto check_count = [](int v, const char* what, int lo) {
        if (v < lo) {
            throw ModelError(Errc::InvalidConfig, std::string(what) + " must be >= " + std::to_string(lo));
        }
    };
    auto check_reps = [](int v, const char* what) {
        if (v < 1 || v > kMaxRepetitions) {
            throw ModelError(Errc::InvalidRepetitions,
                             std::string(what) + " must be within 1.." + std::to_string(kMaxRepetitions));
        }
    };
    check_reps(r.rep_data_ul, "rep_data_ul");
    check_reps(r.rep_data_dl, "rep_data_dl");
    check_reps(r.rep_ctrl, "rep_ctrl");
    check_reps(r.rep_rap, "rep_rap");
    check_count(r.n_ru, "n_ru", 1);
    check_count(r.n_sf, "n_sf", 1);
    check_count(r.header_bits_ul, "header_bits_ul", 0);
    check_count(r.header_bits_dl, "header_bits_dl", 0);
    check_count(r.dci_sf, "dci_sf", 0);
    check_count(r.n_scheduling_requests, "n_scheduling_requests", 0);
    if (r.technology == Technology::NbIot) {
        const double t = r.t_ru.value();
        if (t != 1 && t != 2 && t != 4 && t != 8 && t != 16 && t != 32) {
            throw ModelError(Errc::InvalidConfig, "t_ru must be one of 1, 2, 4, 8, 16, 32 ms");
        }
    }
    const bool nb_format = r.rap_format != RapFormat::LteMFmt1;
    if (nb_format != (r.technology == Technology::NbIot)) {
        throw ModelError(Errc::UnknownFormat, "RAP format " + std::string(to_string(r.rap_format)) +
                                                  " is not defined for " + std::string(to_string(r.technology)));
    }
    if (!r.tbs) {
        throw ModelError(Errc::MissingField, "radio configuration has no TBS table");
    }
    if (r.tbs->technology() != r.technology) {
        throw ModelError(Errc::TechnologyMismatch, "TBS table technology differs from radio technology");
    }
    if (!r.tbs->contains(r.mcs, r.ul_units())) {
        throw ModelError(Errc::OutOfDomain, "mcs " + std::to_string(r.mcs) + " with " + std::to_string(r.ul_units()) +
                                                " units is outside the TBS table");
    }
}

}  // namespace ciot
