#include "audiossl/manifest.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace audiossl {

using nlohmann::json;

const char* partition_name(Partition p) {
  switch (p) {
    case Partition::kTrain: return "train";
    case Partition::kValidation: return "validation";
    case Partition::kTest: return "test";
  }
  return "?";
}

Partition parse_partition(const std::string& s) {
  if (s == "train") return Partition::kTrain;
  if (s == "validation") return Partition::kValidation;
  if (s == "test") return Partition::kTest;
  throw ValueError("unknown partition value: \"" + s + "\"");
}

std::vector<ManifestEntry> Manifest::partition_entries(Partition p) const {
  std::vector<ManifestEntry> out;
  for (const auto& e : entries)
    if (e.partition == p) out.push_back(e);
  return out;
}

std::map<Partition, std::size_t> Manifest::partition_counts() const {
  std::map<Partition, std::size_t> counts{{Partition::kTrain, 0},
                                          {Partition::kValidation, 0},
                                          {Partition::kTest, 0}};
  for (const auto& e : entries) counts[e.partition]++;
  return counts;
}

Manifest load_manifest(const std::string& path,
                       std::optional<std::size_t> train_cap,
                       const std::string& dataset_name) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open manifest: " + path);

  Manifest m;
  m.dataset_name = dataset_name.empty() ? path : dataset_name;
  std::set<std::string> seen_paths;
  std::map<std::pair<std::string, std::string>, std::size_t> cap_counts;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw FormatError("manifest " + path + " line " + std::to_string(line_no) +
                        ": invalid JSON (" + std::string(e.what()) + ")");
    }
    for (const char* field : {"path", "label", "partition"}) {
      if (!rec.contains(field) || !rec[field].is_string())
        throw ValueError("manifest " + path + " line " + std::to_string(line_no) +
                         ": missing or non-string field \"" + field + "\"");
    }
    ManifestEntry e;
    e.path = rec["path"].get<std::string>();
    e.label = rec["label"].get<std::string>();
    try {
      e.partition = parse_partition(rec["partition"].get<std::string>());
    } catch (const ValueError& err) {
      throw ValueError("manifest " + path + " line " + std::to_string(line_no) +
                       ": " + err.what());
    }
    if (rec.contains("group")) {
      if (!rec["group"].is_string())
        throw ValueError("manifest " + path + " line " + std::to_string(line_no) +
                         ": field \"group\" must be a string");
      e.group = rec["group"].get<std::string>();
    }
    if (!seen_paths.insert(e.path).second)
      throw ValueError("manifest " + path + " line " + std::to_string(line_no) +
                       ": duplicate path \"" + e.path + "\"");
    if (train_cap && e.partition == Partition::kTrain) {
      auto key = std::make_pair(e.label, e.group);
      if (cap_counts[key] >= *train_cap) continue;
      cap_counts[key]++;
    }
    m.entries.push_back(std::move(e));
  }
  return m;
}

void save_manifest(const std::string& path, const Manifest& m) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot open for writing: " + path);
  for (const auto& e : m.entries) {
    json rec;
    rec["path"] = e.path;
    rec["label"] = e.label;
    rec["partition"] = partition_name(e.partition);
    if (!e.group.empty()) rec["group"] = e.group;
    f << rec.dump() << "\n";
  }
  if (!f) throw IoError("write failed: " + path);
}

}  // namespace audiossl
