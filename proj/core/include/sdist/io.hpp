#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "sdist/distributions.hpp"
#include "sdist/sample_set.hpp"

namespace sdist::io {

/// CSV sample files: one sample per line, comma-separated decimals. A first
/// line containing any non-numeric cell is treated as a header and skipped.
/// Errors carry the 1-based line and column.
SampleSet read_samples_csv(std::istream& in);
SampleSet load_samples(const std::filesystem::path& path);

/// Values are written with 17 significant digits so that load(save(s)) == s.
void write_samples_csv(const SampleSet& set, std::ostream& out);
void save_samples(const SampleSet& set, const std::filesystem::path& path);

/// Shortest text that round-trips at 17 significant digits.
std::string format_double(double value);

/// Model JSON: {"type": "gaussian"|"mixture", "weights": [...], "means": [[...]],
/// "covariances": [[[...]]]}. "weights" is required for mixtures only.
DistributionModel model_from_json(std::string_view text);
std::string model_to_json(const DistributionModel& model);
DistributionModel load_model(const std::filesystem::path& path);
void save_model(const DistributionModel& model, const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace sdist::io
