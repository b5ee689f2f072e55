// ciot: energy and battery lifetime estimates for NB-IoT / LTE-M modems.
//
// Exit status: 0 success, 1 oracle tolerance exceeded, 2 configuration
// error, 3 coverage scenario unreachable for the technology.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <optional>
#include <type_traits>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "ciot/catalog.hpp"
#include "ciot/error.hpp"
#include "ciot/lifetime.hpp"
#include "ciot/link_budget.hpp"
#include "ciot/trace_oracle.hpp"
#include "svg_plot.hpp"

namespace {

using namespace ciot;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitExceeded = 1;
constexpr int kExitConfig = 2;
constexpr int kExitUnreachable = 3;
constexpr double kOracleTolerance = 0.01;

struct Options {
    SpecRequest request;
    BatteryConfig battery;
    std::string format = "text";
    std::string out;
    std::string config;
    std::string data_dir;

    // sweep
    // Grid axes from flags; the config file fills the same fields unless
    // the flag was given.
    std::optional<std::vector<std::string>> devices;
    std::optional<std::vector<std::string>> scenarios;
    std::optional<std::vector<std::int64_t>> payloads;
    std::optional<std::vector<double>> cycles;
    std::optional<std::vector<double>> t3412s;
    unsigned threads = 0;
    std::string plot_dir;

    // trace / validate
    bool psm_only = false;
    bool uplink_only = false;
    int grid_phase = 0;
    std::string matrix;
};

/// Flags that were given on the command line win over the --config file.
struct Overrides {
    std::vector<std::pair<CLI::Option*, std::function<void()>>> apply;
};

std::string read_text(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ModelError(Errc::InvalidConfig, "cannot open '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json parse_json_file(const std::string& path)
{
    json doc = json::parse(read_text(path), nullptr, false);
    if (doc.is_discarded()) {
        throw ModelError(Errc::InvalidConfig, "'" + path + "' is not valid JSON");
    }
    return doc;
}

void load_config(Options& o)
{
    if (o.config.empty()) {
        return;
    }
    const json doc = parse_json_file(o.config);
    o.request = spec_request_from_json(doc, o.request,
                                       {"battery", "format", "out", "data_dir", "command", "devices", "scenarios",
                                        "payloads_bytes", "cycles_hours", "t3412_hours_list", "threads"});
    auto axis = [&](const char* key, auto& target) {
        auto it = doc.find(key);
        if (it == doc.end() || target) return;
        try {
            target = it->get<typename std::decay_t<decltype(target)>::value_type>();
        } catch (const json::exception&) {
            throw ModelError(Errc::InvalidConfig, std::string("configuration field '") + key + "' must be a list");
        }
    };
    axis("devices", o.devices);
    axis("scenarios", o.scenarios);
    axis("payloads_bytes", o.payloads);
    axis("cycles_hours", o.cycles);
    axis("t3412_hours_list", o.t3412s);
    if (auto it = doc.find("threads"); it != doc.end() && it->is_number_unsigned() && o.threads == 0) {
        o.threads = it->get<unsigned>();
    }
    if (auto it = doc.find("battery"); it != doc.end()) {
        try {
            o.battery.capacity_wh = it->value("capacity_wh", o.battery.capacity_wh);
            o.battery.safety_factor = it->value("safety_factor", o.battery.safety_factor);
            o.battery.e_device_mj_per_hour = it->value("e_device_mj_per_hour", o.battery.e_device_mj_per_hour);
        } catch (const json::exception&) {
            throw ModelError(Errc::InvalidConfig, "configuration field 'battery' has the wrong type");
        }
    }
    if (auto it = doc.find("format"); it != doc.end() && it->is_string()) o.format = it->get<std::string>();
    if (auto it = doc.find("out"); it != doc.end() && it->is_string()) o.out = it->get<std::string>();
    if (auto it = doc.find("data_dir"); it != doc.end() && it->is_string()) o.data_dir = it->get<std::string>();
}

void add_spec_flags(CLI::App* cmd, Options& o, Overrides& ov)
{
    static SpecRequest cli;  // flag targets; copied into o.request after the config is applied
    static BatteryConfig bat;
    static std::string device_file, ps_mode;
    static double rrc_inactivity_s = 20.0;
    static int mcs = 0, rep_data_ul = 1, n_ru = 5;
    static double t_ru_ms = 8.0;
    auto bind = [&](CLI::Option* opt, std::function<void()> f) { ov.apply.emplace_back(opt, std::move(f)); };

    bind(cmd->add_option("--device", cli.device, "bundled device profile (n211, r410m-nbiot, r410m-ltem)"),
         [&] { o.request.device = cli.device; });
    bind(cmd->add_option("--device-file", device_file, "device profile JSON file"),
         [&] { o.request.device_file = device_file; });
    bind(cmd->add_option("--scenario", cli.scenario, "coverage scenario: good|bad|extreme"),
         [&] { o.request.scenario = cli.scenario; });
    bind(cmd->add_option("--payload", cli.payload_bytes, "uplink payload per cycle, bytes"),
         [&] { o.request.payload_bytes = cli.payload_bytes; });
    bind(cmd->add_option("--cycle-hours", cli.cycle_hours, "transmit cycle, hours"),
         [&] { o.request.cycle_hours = cli.cycle_hours; });
    bind(cmd->add_option("--t3412-hours", cli.t3412_hours, "periodic TAU timer, hours"),
         [&] { o.request.t3412_hours = cli.t3412_hours; });
    bind(cmd->add_option("--t3324-s", cli.t3324_s, "active timer, seconds"),
         [&] { o.request.t3324_s = cli.t3324_s; });
    bind(cmd->add_option("--ps-mode", ps_mode, "PSM_IDRX|PSM_EDRX|EDRX_ONLY|IDRX_ONLY"),
         [&] { o.request.ps_mode = ps_mode_from_string(ps_mode); });
    bind(cmd->add_flag("--attach", cli.first_cycle_attach, "connect with attach instead of service request"),
         [&] { o.request.first_cycle_attach = cli.first_cycle_attach; });
    bind(cmd->add_option("--rrc-inactivity-s", rrc_inactivity_s, "connected-mode DRX period before release, seconds"),
         [&] { o.request.rrc_inactivity_s = rrc_inactivity_s; });
    bind(cmd->add_option("--mcs", mcs, "uplink MCS index (default: from the scenario)"),
         [&] { o.request.mcs = mcs; });
    bind(cmd->add_option("--reps-ul", rep_data_ul, "uplink data repetitions (default: from the scenario)"),
         [&] { o.request.rep_data_ul = rep_data_ul; });
    bind(cmd->add_option("--n-ru", n_ru, "NB-IoT resource units per transport block"),
         [&] { o.request.n_ru = n_ru; });
    bind(cmd->add_option("--t-ru-ms", t_ru_ms, "NB-IoT resource unit duration, ms"),
         [&] { o.request.t_ru_ms = t_ru_ms; });
    bind(cmd->add_option("--capacity-wh", bat.capacity_wh, "battery capacity, Wh"),
         [&] { o.battery.capacity_wh = bat.capacity_wh; });
    bind(cmd->add_option("--safety-factor", bat.safety_factor, "usable fraction of the capacity"),
         [&] { o.battery.safety_factor = bat.safety_factor; });
    bind(cmd->add_option("--e-device", bat.e_device_mj_per_hour, "other device consumption, mJ/h"),
         [&] { o.battery.e_device_mj_per_hour = bat.e_device_mj_per_hour; });
    bind(cmd->add_option("--format", o.format, "text|csv|json")->check(CLI::IsMember({"text", "csv", "json"})),
         [] {});
    bind(cmd->add_option("--out", o.out, "output file (default: stdout)"), [] {});
    cmd->add_option("--config", o.config, "JSON run configuration");
    cmd->add_option("--data-dir", o.data_dir, "data directory (default: $CIOT_DATA_DIR or bundled)");
}

void finish_options(Options& o, const Overrides& ov)
{
    load_config(o);
    for (const auto& [opt, f] : ov.apply) {
        if (opt->count() > 0) f();
    }
}

std::ostream& output(const Options& o, std::ofstream& file)
{
    if (o.out.empty()) {
        return std::cout;
    }
    file.open(o.out, std::ios::binary);
    if (!file) {
        throw ModelError(Errc::InvalidConfig, "cannot write '" + o.out + "'");
    }
    return file;
}

DataCatalog make_catalog(const Options& o)
{
    return DataCatalog(o.data_dir.empty() ? default_data_dir() : std::filesystem::path(o.data_dir));
}

json breakdown_json(const CycleEnergyBreakdown& b)
{
    return {{"sync_mj", b.sync_uj / 1e3},     {"service_request_mj", b.service_request_uj / 1e3},
            {"cdrx_mj", b.cdrx_uj / 1e3},     {"release_mj", b.release_uj / 1e3},
            {"tau_mj", b.tau_uj / 1e3},       {"sleep_mj", b.sleep_uj / 1e3},
            {"total_mj", b.total_uj / 1e3},   {"tau_count", b.tau_count}};
}

int cmd_estimate(Options& o)
{
    DataCatalog catalog = make_catalog(o);
    const CycleSpec spec = make_cycle_spec(catalog, o.request);
    const CycleEnergyBreakdown b = cycle_energy(spec);
    const double e_hour = hourly_energy_mj(b, spec.traffic);
    const double life = estimate_lifetime_hours(e_hour, o.battery);

    std::ofstream file;
    std::ostream& out = output(o, file);
    if (o.format == "json") {
        json doc = {{"device", spec.device.name},
                    {"technology", std::string(to_string(spec.device.technology))},
                    {"scenario", spec.scenario},
                    {"payload_bytes", spec.traffic.payload_bytes()},
                    {"cycle_hours", o.request.cycle_hours},
                    {"t3412_hours", o.request.t3412_hours},
                    {"t3324_s", o.request.t3324_s},
                    {"ps_mode", std::string(to_string(spec.ps_mode))},
                    {"breakdown", breakdown_json(b)},
                    {"e_hour_mj", e_hour},
                    {"lifetime_hours", life},
                    {"lifetime_years", life / kHoursPerYear}};
        out << doc.dump(2) << '\n';
    } else if (o.format == "csv") {
        SweepRow row;
        row.point = {spec.device.name, spec.scenario, spec.traffic.payload_bytes(), o.request.cycle_hours,
                     o.request.t3412_hours};
        row.technology = std::string(to_string(spec.device.technology));
        row.breakdown = b;
        row.e_hour_mj = e_hour;
        row.lifetime_hours = life;
        write_sweep_csv(out, {row});
    } else {
        char line[160];
        auto put = [&](const char* name, std::int64_t uj) {
            std::snprintf(line, sizeof line, "  %-18s %14s mJ\n", name, format_mj(uj).c_str());
            out << line;
        };
        out << "device     " << spec.device.name << " (" << to_string(spec.device.technology) << ")\n"
            << "scenario   " << spec.scenario << " (mcs " << spec.radio.mcs << ", " << spec.radio.rep_data_ul
            << " repetitions)\n"
            << "traffic    " << spec.traffic.payload_bytes() << " B every " << o.request.cycle_hours << " h\n"
            << "timers     T3412 " << o.request.t3412_hours << " h, T3324 " << o.request.t3324_s << " s, "
            << to_string(spec.ps_mode) << "\n\nenergy per cycle\n";
        put("sync", b.sync_uj);
        put(spec.first_cycle_attach ? "attach + data" : "service request", b.service_request_uj);
        put("cDRX inactivity", b.cdrx_uj);
        put("release", b.release_uj);
        const std::string tau_name = "TAU (x" + std::to_string(b.tau_count) + ")";
        put(tau_name.c_str(), b.tau_uj);
        put("idle / sleep", b.sleep_uj);
        put("total", b.total_uj);
        std::snprintf(line, sizeof line, "\nhourly     %.3f mJ/h\nlifetime   %.1f h (%.2f years)\n", e_hour, life,
                      life / kHoursPerYear);
        out << line;
    }
    return kExitOk;
}

std::vector<std::string> bundled_devices(DataCatalog& catalog)
{
    auto names = catalog.profile_names();
    if (names.empty()) {
        throw ModelError(Errc::InvalidConfig, "no device profiles in " + catalog.root().string());
    }
    return names;
}

void write_sidecar(const std::string& out, const std::string& what)
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    std::ofstream meta(out + ".meta");
    meta << "# " << what << " generated " << stamp << '\n';
}

int cmd_sweep(Options& o)
{
    DataCatalog catalog = make_catalog(o);
    // Unset axes take the default grid; an axis given but empty is an
    // EmptyGrid error.
    SweepGrid grid;
    grid.devices = o.devices.value_or(bundled_devices(catalog));
    grid.scenarios = o.scenarios.value_or(std::vector<std::string>{"good", "bad", "extreme"});
    grid.payloads_bytes = o.payloads.value_or(std::vector<std::int64_t>{10, 50, 100, 200, 500, 1000});
    grid.cycles_hours = o.cycles.value_or(std::vector<double>{0.5, 1, 2, 4, 6, 12, 24, 48});
    grid.t3412_hours = o.t3412s.value_or(std::vector<double>{o.request.t3412_hours});
    const auto points = grid.expand();

    const SpecRequest base = o.request;
    auto factory = [&catalog, base](const SweepPoint& p) {
        SpecRequest r = base;
        r.device = p.device;
        r.device_file.reset();
        r.scenario = p.scenario;
        r.payload_bytes = p.payload_bytes;
        r.cycle_hours = p.cycle_hours;
        r.t3412_hours = p.t3412_hours;
        return make_cycle_spec(catalog, r);
    };
    const unsigned threads = o.threads ? o.threads : std::max(1u, std::thread::hardware_concurrency());
    const auto rows = sweep(points, factory, o.battery, threads);

    std::ofstream file;
    std::ostream& out = output(o, file);
    write_sweep_csv(out, rows);
    if (!o.out.empty()) {
        write_sidecar(o.out, "sweep of " + std::to_string(rows.size()) + " points");
    }
    if (!o.plot_dir.empty()) {
        // Figures are drawn from the CSV text, not from the in-memory rows.
        std::ostringstream csv;
        write_sweep_csv(csv, rows);
        std::istringstream in(csv.str());
        for (const auto& path : plot::write_sweep_figures(read_sweep_csv(in), o.plot_dir)) {
            std::cerr << "wrote " << path.string() << '\n';
        }
    }
    return kExitOk;
}

int cmd_trace(Options& o)
{
    DataCatalog catalog = make_catalog(o);
    SpecRequest req = o.request;
    if (o.psm_only) {
        req.idle_only = true;
        req.t3324_s = 0.0;
    }
    const CycleSpec spec = make_cycle_spec(catalog, req);
    const PowerTrace trace =
        o.uplink_only ? trace_uplink(spec, spec.traffic.payload_bits()) : build_timeline(spec, {o.grid_phase});
    std::ofstream file;
    std::ostream& out = output(o, file);
    write_trace_csv(out, trace);
    if (!o.out.empty()) {
        write_sidecar(o.out, "trace of " + spec.label);
    }
    char summary[200];
    std::snprintf(summary, sizeof summary, "%zu segments, %lld ms, %.3f mJ\n", trace.segments().size(),
                  static_cast<long long>(trace.total_ms()), integrate(trace) / 1e3);
    std::cerr << summary;
    return kExitOk;
}

int cmd_validate(Options& o)
{
    DataCatalog catalog = make_catalog(o);
    const std::string path = o.matrix.empty() ? (catalog.root() / "validation_matrix.json").string() : o.matrix;
    const json doc = parse_json_file(path);
    const json specs = doc.is_array() ? doc : doc.value("specs", json::array());
    if (!specs.is_array() || specs.empty()) {
        throw ModelError(Errc::EmptyGrid, "validation matrix '" + path + "' lists no specs");
    }
    std::ofstream file;
    std::ostream& out = output(o, file);
    double worst = -1.0;
    std::string worst_label;
    int failures = 0;
    char line[240];
    for (const auto& entry : specs) {
        const SpecRequest req = spec_request_from_json(entry, o.request, {"grid_phase", "name"});
        const CycleSpec spec = make_cycle_spec(catalog, req);
        const int phase = entry.value("grid_phase", o.grid_phase);
        const OracleComparison c = compare(spec, {phase});
        const bool ok = c.relative_error <= kOracleTolerance;
        failures += ok ? 0 : 1;
        const std::string label = entry.value("name", spec.label);
        std::snprintf(line, sizeof line, "%-4s %-36s model %12.3f mJ  oracle %12.3f mJ  rel.err %.5f%%\n",
                      ok ? "ok" : "FAIL", label.c_str(), c.closed_form_uj / 1e3, c.oracle_uj / 1e3,
                      c.relative_error * 100.0);
        out << line;
        if (c.relative_error > worst) {
            worst = c.relative_error;
            worst_label = label;
        }
    }
    std::snprintf(line, sizeof line, "%zu specs, %d above %.0f%%, worst %s at %.5f%%\n", specs.size(), failures,
                  kOracleTolerance * 100.0, worst_label.c_str(), worst * 100.0);
    out << line;
    return failures == 0 ? kExitOk : kExitExceeded;
}

int cmd_scenarios(Options& o)
{
    DataCatalog catalog = make_catalog(o);
    const auto table = catalog.scenarios();
    std::ofstream file;
    std::ostream& out = output(o, file);
    char line[200];
    std::snprintf(line, sizeof line, "%-8s %7s  %-6s %4s %5s %9s %12s\n", "scenario", "MCL dB", "tech", "mcs", "reps",
                  "SNR dB", "combined dB");
    out << line;
    for (const auto& row : table->rows()) {
        for (Technology t : {Technology::NbIot, Technology::LteM}) {
            const double snr = rx_snr_db(LinkBudget::for_technology(t, row.mcl_db));
            const auto& a = row.assignment(t);
            if (a) {
                std::snprintf(line, sizeof line, "%-8s %7.1f  %-6s %4d %5d %9.2f %12.2f\n",
                              std::string(to_string(row.scenario)).c_str(), row.mcl_db,
                              std::string(to_string(t)).c_str(), a->mcs, a->repetitions, snr,
                              combined_snr_db(snr, a->repetitions));
            } else {
                std::snprintf(line, sizeof line, "%-8s %7.1f  %-6s %4s %5s %9.2f %12s\n",
                              std::string(to_string(row.scenario)).c_str(), row.mcl_db,
                              std::string(to_string(t)).c_str(), "-", "-", snr, "unreachable");
            }
            out << line;
        }
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Energy consumption and battery lifetime of NB-IoT / LTE-M modems"};
    app.require_subcommand(1);
    Options o;
    Overrides ov;

    auto* estimate = app.add_subcommand("estimate", "energy breakdown and lifetime for one configuration");
    add_spec_flags(estimate, o, ov);

    auto* sweep_cmd = app.add_subcommand("sweep", "evaluate a grid of configurations into a CSV table");
    add_spec_flags(sweep_cmd, o, ov);
    sweep_cmd->add_option("--devices", o.devices, "device profiles (default: all bundled)")->delimiter(',');
    sweep_cmd->add_option("--scenarios", o.scenarios, "scenarios (default: good,bad,extreme)")->delimiter(',');
    sweep_cmd->add_option("--payloads", o.payloads, "payloads in bytes (default: 10,50,100,200,500,1000)")
        ->delimiter(',');
    sweep_cmd->add_option("--cycles", o.cycles, "transmit cycles in hours (default: 0.5,1,2,4,6,12,24,48)")
        ->delimiter(',');
    sweep_cmd->add_option("--t3412", o.t3412s, "T3412 values in hours (default: --t3412-hours)")->delimiter(',');
    sweep_cmd->add_option("--threads", o.threads, "worker threads (default: hardware concurrency)");
    sweep_cmd->add_option("--plot", o.plot_dir, "directory for SVG figures");

    auto* trace = app.add_subcommand("trace", "millisecond power timeline of one transmit cycle");
    add_spec_flags(trace, o, ov);
    trace->add_flag("--psm-only", o.psm_only, "idle interval only, no connection and no reachable window");
    trace->add_flag("--uplink-only", o.uplink_only, "the payload's uplink transmission alone");
    trace->add_option("--grid-phase", o.grid_phase, "downlink grid phase at each reception start");

    auto* validate_cmd = app.add_subcommand("validate", "compare the closed-form model with the trace oracle");
    add_spec_flags(validate_cmd, o, ov);
    validate_cmd->add_option("--matrix", o.matrix, "JSON list of specs (default: bundled matrix)");
    validate_cmd->add_option("--grid-phase", o.grid_phase, "downlink grid phase at each reception start");

    auto* scenarios = app.add_subcommand("scenarios", "list coverage scenarios with their link budgets");
    scenarios->add_option("--data-dir", o.data_dir, "data directory");
    scenarios->add_option("--out", o.out, "output file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        finish_options(o, ov);
        if (*estimate) return cmd_estimate(o);
        if (*sweep_cmd) return cmd_sweep(o);
        if (*trace) return cmd_trace(o);
        if (*validate_cmd) return cmd_validate(o);
        if (*scenarios) return cmd_scenarios(o);
    } catch (const ModelError& e) {
        std::cerr << "ciot: " << e.what() << '\n';
        return e.code() == Errc::Unreachable ? kExitUnreachable : kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "ciot: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitConfig;
}
