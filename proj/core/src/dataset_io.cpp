#include "gate/dataset_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>
#include <vector>

#include "gate/rng.hpp"

namespace gate {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw IoError("failed to format double");
  return std::string(buf, ptr);
}

double parse_double(const std::string& s, const std::string& context) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    throw SchemaError("malformed number '" + s + "' " + context);
  }
  return v;
}

namespace {

int parse_int(const std::string& s, const std::string& context) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw SchemaError("malformed integer '" + s + "' " + context);
  }
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
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

}  // namespace

std::string serialize_dataset(const Dataset& ds) {
  std::string out = "rp_id,device_id,sample_idx";
  for (int k = 0; k < ds.n_aps; ++k) out += ",ap_" + std::to_string(k);
  out += "\n";
  for (const auto& s : ds.samples) {
    out += std::to_string(s.rp_id);
    out += ",";
    out += s.device_id;
    out += ",";
    out += std::to_string(s.sample_idx);
    for (int k = 0; k < ds.n_aps; ++k) {
      out += ",";
      out += format_double(s.fingerprint.rss[k]);
    }
    out += "\n";
  }
  return out;
}

Dataset parse_dataset_csv(const std::string& text, const std::string& name,
                          SplitTag split) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw SchemaError(name + ": empty file");

  auto header = split_csv_line(line);
  if (header.size() < 4 || header[0] != "rp_id" || header[1] != "device_id" ||
      header[2] != "sample_idx") {
    throw SchemaError(name + ": bad header, expected rp_id,device_id,sample_idx,ap_0,...");
  }
  int n_aps = static_cast<int>(header.size()) - 3;
  for (int k = 0; k < n_aps; ++k) {
    if (header[3 + k] != "ap_" + std::to_string(k)) {
      throw SchemaError(name + ": bad AP column '" + header[3 + k] + "'");
    }
  }

  Dataset ds;
  ds.n_aps = n_aps;
  ds.split_tag = split;
  int max_rp = -1;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) != 3 + n_aps) {
      throw SchemaError(name + ": inconsistent AP count at row " +
                        std::to_string(row));
    }
    LabeledSample s;
    s.rp_id = parse_int(fields[0], "at row " + std::to_string(row));
    s.device_id = fields[1];
    s.sample_idx = parse_int(fields[2], "at row " + std::to_string(row));
    s.fingerprint.rss.resize(n_aps);
    for (int k = 0; k < n_aps; ++k) {
      double v =
          parse_double(fields[3 + k], "at row " + std::to_string(row));
      if (v < kRssSentinel || v > kRssMax) {
        throw SchemaError(name + ": rss out of range at row " +
                          std::to_string(row));
      }
      s.fingerprint.rss[k] = v;
    }
    max_rp = std::max(max_rp, s.rp_id);
    ds.samples.push_back(std::move(s));
  }
  ds.n_rps = max_rp + 1;
  if (ds.n_rps < 1) ds.n_rps = 1;  // header-only file
  ds.validate();
  return ds;
}

Dataset load_dataset(const std::filesystem::path& path, SplitTag split) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset file: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_dataset_csv(buf.str(), path.filename().string(), split);
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
  ds.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << serialize_dataset(ds);
  if (!out) throw IoError("write failed: " + path.string());
}

std::uint64_t dataset_hash(const Dataset& ds) {
  return hash_str(serialize_dataset(ds));
}

}  // namespace gate
