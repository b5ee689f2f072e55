#include "ciot/tbs.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include <openssl/evp.h>

#include "ciot/error.hpp"

namespace ciot {

namespace {

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ModelError(Errc::InvalidConfig, "cannot open '" + path.string() + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

int parse_int(std::string_view field, std::size_t line_no)
{
    field = trim(field);
    int value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw ModelError(Errc::ParseError, "TBS CSV line " + std::to_string(line_no) + ": bad integer '" +
                                               std::string(field) + "'");
    }
    return value;
}

}  // namespace

TbsTable::TbsTable(Technology technology, std::map<Key, int> entries)
    : technology_(technology), entries_(std::move(entries))
{
    if (entries_.empty()) {
        throw ModelError(Errc::InvalidConfig, "TBS table is empty");
    }
    for (const auto& [key, tbs] : entries_) {
        const auto [mcs, units] = key;
        if (tbs <= 0) {
            throw ModelError(Errc::UnitViolation, "TBS must be positive at (" + std::to_string(mcs) + ", " +
                                                      std::to_string(units) + ")");
        }
        if (auto prev = entries_.find({mcs - 1, units}); prev != entries_.end() && prev->second > tbs) {
            throw ModelError(Errc::OrderingViolation,
                             "TBS decreases with MCS at (" + std::to_string(mcs) + ", " + std::to_string(units) + ")");
        }
        // Resource counts need not be contiguous (e.g. 6, 8, 10 units), so
        // compare against the nearest smaller count in the same row.
        auto it = entries_.find(key);
        if (it != entries_.begin()) {
            auto prev = std::prev(it);
            if (prev->first.first == mcs && prev->second > tbs) {
                throw ModelError(Errc::OrderingViolation, "TBS decreases with resource count at (" +
                                                              std::to_string(mcs) + ", " + std::to_string(units) + ")");
            }
        }
    }
}

TbsTable TbsTable::from_csv(Technology technology, std::string_view csv)
{
    std::map<Key, int> entries;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (!csv.empty()) {
        auto nl = csv.find('\n');
        std::string_view line = trim(csv.substr(0, nl));
        csv.remove_prefix(nl == std::string_view::npos ? csv.size() : nl + 1);
        ++line_no;
        if (line.empty() || line.front() == '#') {
            continue;
        }
        if (!header_seen) {
            if (line != "mcs,units,tbs_bits") {
                throw ModelError(Errc::ParseError, "TBS CSV header must be 'mcs,units,tbs_bits'");
            }
            header_seen = true;
            continue;
        }
        std::array<std::string_view, 3> fields;
        std::size_t n = 0;
        while (n < fields.size()) {
            auto comma = line.find(',');
            fields[n++] = line.substr(0, comma);
            if (comma == std::string_view::npos) {
                line = {};
                break;
            }
            line.remove_prefix(comma + 1);
        }
        if (n != 3 || !line.empty()) {
            throw ModelError(Errc::ParseError, "TBS CSV line " + std::to_string(line_no) + ": expected 3 fields");
        }
        Key key{parse_int(fields[0], line_no), parse_int(fields[1], line_no)};
        if (!entries.emplace(key, parse_int(fields[2], line_no)).second) {
            throw ModelError(Errc::ParseError, "TBS CSV line " + std::to_string(line_no) + ": duplicate entry");
        }
    }
    if (!header_seen) {
        throw ModelError(Errc::ParseError, "TBS CSV is empty");
    }
    return TbsTable(technology, std::move(entries));
}

int TbsTable::lookup(int mcs, int units) const
{
    auto it = entries_.find({mcs, units});
    if (it == entries_.end()) {
        throw ModelError(Errc::OutOfDomain, "no TBS entry for mcs " + std::to_string(mcs) + " with " +
                                                std::to_string(units) + " resource units (" +
                                                std::string(to_string(technology_)) + ")");
    }
    return it->second;
}

bool TbsTable::contains(int mcs, int units) const
{
    return entries_.count({mcs, units}) != 0;
}

std::string sha256_hex(std::string_view bytes)
{
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw ModelError(Errc::ChecksumMismatch, "SHA-256 computation failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0xF]);
    }
    return out;
}

TbsTable load_tbs_table(const std::filesystem::path& csv, const std::filesystem::path& manifest,
                        Technology technology)
{
    const std::string body = read_file(csv);
    const std::string sums = read_file(manifest);
    const std::string file_name = csv.filename().string();

    std::istringstream lines(sums);
    std::string line;
    std::string expected;
    while (std::getline(lines, line)) {
        std::istringstream fields(line);
        std::string digest, name;
        if (fields >> digest >> name) {
            if (!name.empty() && name.front() == '*') name.erase(0, 1);
            if (name == file_name) {
                expected = digest;
                break;
            }
        }
    }
    if (expected.empty()) {
        throw ModelError(Errc::ChecksumMismatch, "manifest '" + manifest.string() + "' has no entry for " + file_name);
    }
    const std::string actual = sha256_hex(body);
    if (actual != expected) {
        throw ModelError(Errc::ChecksumMismatch, file_name + ": SHA-256 " + actual + " does not match manifest");
    }
    return TbsTable::from_csv(technology, body);
}

}  // namespace ciot
