#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "audiossl/error.hpp"

namespace audiossl {

enum class Partition { kTrain, kValidation, kTest };

const char* partition_name(Partition p);
Partition parse_partition(const std::string& s);

struct ManifestEntry {
  std::string path;
  std::string label;
  Partition partition = Partition::kTrain;
  std::string group;  // empty when absent
};

// Dataset manifest: newline-delimited JSON, one record per line with fields
// `path`, `label`, `partition` and optional `group`.
struct Manifest {
  std::string dataset_name;
  std::vector<ManifestEntry> entries;

  std::vector<ManifestEntry> partition_entries(Partition p) const;
  std::map<Partition, std::size_t> partition_counts() const;
};

// Loads and validates a manifest. Order-preserving. When `train_cap` is set,
// at most that many train entries are retained per (label, group) pair,
// first in file order; validation/test entries are never capped.
Manifest load_manifest(const std::string& path,
                       std::optional<std::size_t> train_cap = std::nullopt,
                       const std::string& dataset_name = "");

void save_manifest(const std::string& path, const Manifest& m);

}  // namespace audiossl
