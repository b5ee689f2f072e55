#include "ciot/lifetime.hpp"

#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include "ciot/error.hpp"

namespace ciot {

GapModel CycleSpec::gaps() const
{
    return gap_override ? *gap_override : GapModel::for_technology(radio.technology, downlink_availability);
}

void validate(const CycleSpec& spec)
{
    validate(spec.device);
    validate(spec.radio);
    validate(spec.timers);
    validate(spec.gaps());
    if (spec.device.technology != spec.radio.technology) {
        throw ModelError(Errc::TechnologyMismatch, "device '" + spec.device.name + "' is " +
                                                       std::string(to_string(spec.device.technology)) +
                                                       " but the radio configuration is " +
                                                       std::string(to_string(spec.radio.technology)));
    }
    if (!(spec.downlink_availability > 0.0 && spec.downlink_availability <= 1.0)) {
        throw ModelError(Errc::InvalidConfig, "downlink_availability must be in (0, 1]");
    }
    if (!spec.idle_only && !spec.procedures) {
        throw ModelError(Errc::MissingField, "cycle specification has no procedure scripts");
    }
    const bool psm = spec.ps_mode == PsMode::PsmIdrx || spec.ps_mode == PsMode::PsmEdrx;
    if (psm && spec.traffic.cycle() < spec.timers.t3324) {
        throw ModelError(Errc::CycleTooShort, "transmit cycle is shorter than T3324");
    }
}

int tau_count(Milliseconds cycle, Milliseconds t3412)
{
    if (!(t3412.value() > 0.0)) {
        throw ModelError(Errc::InvalidTimer, "T3412 must be > 0");
    }
    const double n = std::ceil(cycle / t3412 - 1e-9) - 1.0;
    return n > 0.0 ? static_cast<int>(n) : 0;
}

ProcedureScript connection_script(const CycleSpec& spec)
{
    const auto& lib = *spec.procedures;
    const std::int64_t bits = spec.traffic.payload_bits();
    if (spec.first_cycle_attach) {
        return expand_scheduling_requests(attach_with_payload(lib.attach, bits, spec.device),
                                          spec.radio.n_scheduling_requests, spec.device);
    }
    return service_request_script(lib, spec.device, spec.radio, bits);
}

StateEnergyReport cdrx_inactivity_energy(const DeviceProfile& profile, const TimerConfig& timers)
{
    StateEnergyReport r;
    if (timers.rrc_inactivity.value() <= 0.0) {
        return r;
    }
    const Milliseconds cycle = kSubframe * timers.cdrx_long_cycle_sf;
    if (!(cycle.value() > 0.0)) {
        throw ModelError(Errc::CycleTooShort, "cDRX long cycle must be > 0");
    }
    const double full = std::floor(timers.rrc_inactivity / cycle);
    r.append_repeated(cdrx_cycle_energy(profile, timers), full);
    r.add("cdrx_sleep", profile.p_cdrx_sleep, timers.rrc_inactivity - cycle * full, TimeKind::Sleep);
    return r;
}

namespace {

std::int64_t to_uj(Microjoules e)
{
    return std::llround(e.value());
}

StateEnergyReport idle_interval(const CycleSpec& spec, Milliseconds interval)
{
    if (interval.value() < 0.0) {
        throw ModelError(Errc::CycleTooShort, "transmit cycle is shorter than the activity it contains");
    }
    TimerConfig timers = spec.timers;
    if (timers.t3324 > interval) {
        timers.t3324 = interval;
    }
    return psm_cycle_energy(spec.device, timers, interval, spec.ps_mode);
}

}  // namespace

CycleEnergyBreakdown cycle_energy(const CycleSpec& spec)
{
    validate(spec);
    CycleEnergyBreakdown b;
    const Milliseconds cycle = spec.traffic.cycle();

    if (spec.idle_only) {
        b.sleep_uj = to_uj(idle_interval(spec, cycle).energy());
        b.total_uj = b.sum_of_parts();
        return b;
    }

    const GapModel gaps = spec.gaps();
    const auto& dev = spec.device;

    const StateEnergyReport sr = procedure_energy(connection_script(spec), dev, spec.radio, gaps);
    const StateEnergyReport cdrx = cdrx_inactivity_energy(dev, spec.timers);
    const StateEnergyReport release = procedure_energy(spec.procedures->release, dev, spec.radio, gaps);
    const Milliseconds connection_busy = dev.t_sync + sr.duration() + spec.timers.rrc_inactivity + release.duration();

    b.tau_count = tau_count(cycle, spec.timers.t3412);
    Microjoules sleep;
    Microjoules tau_total;
    if (b.tau_count == 0) {
        sleep += idle_interval(spec, cycle - connection_busy).energy();
    } else {
        const StateEnergyReport tau = procedure_energy(spec.procedures->tau, dev, spec.radio, gaps);
        const Milliseconds tau_busy = dev.t_sync + tau.duration();
        const Milliseconds t3412 = spec.timers.t3412;
        tau_total = (dev.e_sync + tau.energy()) * b.tau_count;

        sleep += idle_interval(spec, t3412 - connection_busy).energy();
        if (b.tau_count > 1) {
            sleep += idle_interval(spec, t3412 - tau_busy).energy() * (b.tau_count - 1);
        }
        sleep += idle_interval(spec, cycle - t3412 * b.tau_count - tau_busy).energy();
    }

    b.sync_uj = to_uj(dev.e_sync);
    b.service_request_uj = to_uj(sr.energy());
    b.cdrx_uj = to_uj(cdrx.energy());
    b.release_uj = to_uj(release.energy());
    b.tau_uj = to_uj(tau_total);
    b.sleep_uj = to_uj(sleep);
    b.total_uj = b.sum_of_parts();
    return b;
}

double hourly_energy_mj(const CycleEnergyBreakdown& breakdown, const TrafficProfile& traffic)
{
    return static_cast<double>(breakdown.total_uj) / 1e3 * traffic.rate_per_hour();
}

double hourly_energy_mj(const CycleSpec& spec)
{
    return hourly_energy_mj(cycle_energy(spec), spec.traffic);
}

double estimate_lifetime_hours(double e_hour_mj, const BatteryConfig& battery)
{
    validate(battery);
    const double denominator = e_hour_mj + battery.e_device_mj_per_hour;
    if (!(denominator > 0.0)) {
        throw ModelError(Errc::ZeroConsumption, "hourly consumption is zero; lifetime is unbounded");
    }
    return battery.capacity_wh * kMillijoulesPerWattHour * battery.safety_factor / denominator;
}

double estimate_lifetime_hours(const CycleSpec& spec, const BatteryConfig& battery)
{
    return estimate_lifetime_hours(hourly_energy_mj(spec), battery);
}

std::vector<SweepPoint> SweepGrid::expand() const
{
    if (devices.empty() || scenarios.empty() || payloads_bytes.empty() || cycles_hours.empty() ||
        t3412_hours.empty()) {
        throw ModelError(Errc::EmptyGrid, "sweep grid has an empty axis");
    }
    std::vector<SweepPoint> points;
    for (const auto& d : devices)
        for (const auto& s : scenarios)
            for (double t : t3412_hours)
                for (double c : cycles_hours)
                    for (auto p : payloads_bytes)
                        points.push_back({d, s, p, c, t});
    return points;
}

std::vector<SweepRow> sweep(const std::vector<SweepPoint>& points, const SpecFactory& factory,
                            const BatteryConfig& battery, unsigned threads)
{
    if (points.empty()) {
        throw ModelError(Errc::EmptyGrid, "sweep grid is empty");
    }
    validate(battery);
    std::vector<SweepRow> rows(points.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) {
            SweepRow& row = rows[i];
            row.point = points[i];
            try {
                const CycleSpec spec = factory(points[i]);
                row.technology = std::string(to_string(spec.radio.technology));
                row.breakdown = cycle_energy(spec);
                row.e_hour_mj = hourly_energy_mj(*row.breakdown, spec.traffic);
                row.lifetime_hours = estimate_lifetime_hours(row.e_hour_mj, battery);
            } catch (const ModelError& e) {
                row.breakdown.reset();
                row.error = std::string(to_string(e.code()));
            }
        }
    };

    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(points.size())));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return rows;
}

const char* const kSweepCsvHeader =
    "device,technology,scenario,payload_bytes,cycle_hours,t3412_hours,e_cycle_mj,e_sync_mj,e_sr_mj,e_cdrx_mj,"
    "e_release_mj,e_tau_mj,e_sleep_mj,tau_count,e_hour_mj,lifetime_hours,lifetime_years,error";

std::string format_mj(std::int64_t uj)
{
    const bool neg = uj < 0;
    const std::uint64_t mag = neg ? static_cast<std::uint64_t>(-(uj + 1)) + 1 : static_cast<std::uint64_t>(uj);
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s%" PRIu64 ".%03" PRIu64, neg ? "-" : "", mag / 1000, mag % 1000);
    return buf;
}

namespace {

std::string fmt(const char* pattern, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::int64_t parse_mj(const std::string& s)
{
    return std::llround(std::stod(s) * 1e3);
}

}  // namespace

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows)
{
    out << kSweepCsvHeader << '\n';
    for (const auto& r : rows) {
        out << r.point.device << ',' << r.technology << ',' << r.point.scenario << ',' << r.point.payload_bytes << ','
            << fmt("%.10g", r.point.cycle_hours) << ',' << fmt("%.10g", r.point.t3412_hours) << ',';
        if (r.breakdown) {
            const auto& b = *r.breakdown;
            out << format_mj(b.total_uj) << ',' << format_mj(b.sync_uj) << ',' << format_mj(b.service_request_uj)
                << ',' << format_mj(b.cdrx_uj) << ',' << format_mj(b.release_uj) << ',' << format_mj(b.tau_uj) << ','
                << format_mj(b.sleep_uj) << ',' << b.tau_count << ',' << fmt("%.6f", r.e_hour_mj) << ','
                << fmt("%.3f", r.lifetime_hours) << ',' << fmt("%.6f", r.lifetime_hours / kHoursPerYear) << ',';
        } else {
            out << ",,,,,,,,,,,";
        }
        out << r.error << '\n';
    }
}

std::vector<SweepRow> read_sweep_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line)) {
        throw ModelError(Errc::ParseError, "sweep CSV is empty");
    }
    while (!line.empty() && line.front() == '#') {
        if (!std::getline(in, line)) throw ModelError(Errc::ParseError, "sweep CSV has no header");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kSweepCsvHeader) {
        throw ModelError(Errc::ParseError, "unexpected sweep CSV header");
    }
    std::vector<SweepRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        const auto f = split_csv_line(line);
        if (f.size() != 18) {
            throw ModelError(Errc::ParseError, "sweep CSV line " + std::to_string(line_no) + " has " +
                                                   std::to_string(f.size()) + " fields");
        }
        try {
            SweepRow r;
            r.point = {f[0], f[2], std::stoll(f[3]), std::stod(f[4]), std::stod(f[5])};
            r.technology = f[1];
            r.error = f[17];
            if (r.error.empty()) {
                CycleEnergyBreakdown b;
                b.total_uj = parse_mj(f[6]);
                b.sync_uj = parse_mj(f[7]);
                b.service_request_uj = parse_mj(f[8]);
                b.cdrx_uj = parse_mj(f[9]);
                b.release_uj = parse_mj(f[10]);
                b.tau_uj = parse_mj(f[11]);
                b.sleep_uj = parse_mj(f[12]);
                b.tau_count = std::stoi(f[13]);
                r.breakdown = b;
                r.e_hour_mj = std::stod(f[14]);
                r.lifetime_hours = std::stod(f[15]);
            }
            rows.push_back(std::move(r));
        } catch (const std::logic_error&) {
            throw ModelError(Errc::ParseError, "sweep CSV line " + std::to_string(line_no) + " has a bad number");
        }
    }
    return rows;
}

}  // namespace ciot
