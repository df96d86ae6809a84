#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "gate/types.hpp"

namespace gate {

// Shortest decimal form that round-trips the exact double (std::to_chars).
std::string format_double(double v);

// Strict full-string parse; throws SchemaError on trailing garbage.
double parse_double(const std::string& s, const std::string& context);

// CSV schema: header `rp_id,device_id,sample_idx,ap_0,...,ap_{N-1}`,
// one row per sample, values in decimal dBm, missing AP = -100.
Dataset load_dataset(const std::filesystem::path& path,
                     SplitTag split = SplitTag::train);
void save_dataset(const Dataset& ds, const std::filesystem::path& path);

// The exact byte serialization save_dataset writes.
std::string serialize_dataset(const Dataset& ds);
Dataset parse_dataset_csv(const std::string& text, const std::string& name,
                          SplitTag split);

// FNV-1a over serialize_dataset(ds); used to verify comparative runs share
// identical data across arms.
std::uint64_t dataset_hash(const Dataset& ds);

}  // namespace gate
