#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>

#include "ciot/model.hpp"

namespace ciot {

/// Transport block sizes indexed by (MCS index, allocated resource count).
/// Monotonicity along both axes is checked on construction.
class TbsTable {
public:
    using Key = std::pair<int, int>;

    TbsTable(Technology technology, std::map<Key, int> entries);

    static TbsTable from_csv(Technology technology, std::string_view csv);

    [[nodiscard]] Technology technology() const { return technology_; }
    [[nodiscard]] int lookup(int mcs, int units) const;
    [[nodiscard]] bool contains(int mcs, int units) const;
    [[nodiscard]] const std::map<Key, int>& entries() const { return entries_; }

private:
    Technology technology_;
    std::map<Key, int> entries_;
};

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

/// Loads a TBS CSV and checks it against a `sha256sum`-style manifest that
/// sits in the same directory.
TbsTable load_tbs_table(const std::filesystem::path& csv, const std::filesystem::path& manifest,
                        Technology technology);

}  // namespace ciot
