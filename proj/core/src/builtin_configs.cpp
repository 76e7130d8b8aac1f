#include <map>
#include <stdexcept>

#include "json_support.hpp"
#include "sdist/harness.hpp"

namespace sdist::harness {

namespace {

using detail::json;

const std::vector<std::size_t> kSizes{50, 100, 200, 500, 1000, 2000, 3000, 4000};
const std::vector<std::size_t> kLowSizes{8, 16, 32, 48, 64, 80};
const std::vector<std::size_t> kDims{5, 10, 50, 100, 500, 1000};

json c2st_metric(int epochs) {
  return {{"name", "c2st"}, {"classifier", "mlp"}, {"folds", 5}, {"epochs", epochs}};
}
json swd_metric() { return {{"name", "swd"}, {"slices", 100}}; }
json mmd_metric(double sigma) { return {{"name", "mmd"}, {"kernel", "gaussian"}, {"bandwidth", sigma}}; }

json scaling(const std::string& id, const std::string& generator, std::vector<std::size_t> sizes,
             std::vector<std::size_t> dims, double sigma, std::uint64_t seed, int epochs) {
  return {{"experiment", id},
          {"generator", {{"name", generator}, {"shift", 1.0}}},
          {"sample_sizes", sizes},
          {"dims", dims},
          {"metrics", json::array({swd_metric(), c2st_metric(epochs), mmd_metric(sigma)})},
          {"repeats", 5},
          {"base_seed", seed}};
}

json bandwidth_sweep(const std::string& id, const std::string& generator, std::size_t dim, std::vector<double> values,
                     std::uint64_t seed) {
  return {{"experiment", id},
          {"generator", {{"name", generator}, {"shift", 1.0}}},
          {"sample_sizes", {10000}},
          {"dims", {dim}},
          {"param_axis", {{"name", "bandwidth"}, {"values", values}, {"relative", false}}},
          {"metrics", json::array({{{"name", "mmd"}, {"kernel", "gaussian"}}})},
          {"repeats", 5},
          {"base_seed", seed}};
}

const std::map<std::string, json>& registry() {
  static const std::map<std::string, json> configs = [] {
    std::map<std::string, json> m;
    m["fig5a"] = scaling("fig5a", "mog2d", kSizes, {2}, 1.0, 501, 100);
    m["fig5b"] = scaling("fig5b", "shift-first", kSizes, {10}, 5.0, 502, 100);
    m["fig5c"] = scaling("fig5c", "shift-first", {10000}, kDims, 10.0, 503, 20);
    m["figS2a"] = scaling("figS2a", "mog2d", kLowSizes, {2}, 1.0, 521, 300);
    m["figS2b"] = scaling("figS2b", "shift-first", kLowSizes, {10}, 5.0, 522, 300);
    m["figS2c"] = scaling("figS2c", "shift-all", kLowSizes, {10}, 5.0, 523, 300);
    m["figS3a"] = scaling("figS3a", "shift-first", {10000}, kDims, 10.0, 531, 20);
    m["figS3b"] = scaling("figS3b", "shift-all", {10000}, kDims, 10.0, 532, 20);
    m["figS3c"] = scaling("figS3c", "var-all", {10000}, kDims, 10.0, 533, 20);
    m["figS4"] = json::array({bandwidth_sweep("figS4a", "mog2d", 2, {0.1, 0.25, 0.5, 1, 2, 3, 4, 5}, 541),
                              bandwidth_sweep("figS4b", "shift-first", 10, {0.1, 0.5, 1, 2, 5, 10, 15, 20}, 542),
                              bandwidth_sweep("figS4c", "shift-first", 100, {1, 2, 5, 10, 20, 30, 40}, 543)});
    m["figS1"] = {{"experiment", "figS1"},
                  {"generator", {{"name", "shift-first"}, {"shift", 1.0}}},
                  {"sample_sizes", {10000}},
                  {"dims", {10, 100, 1000}},
                  {"param_axis", {{"name", "slices"}, {"values", {10, 100, 1000}}}},
                  {"metrics", json::array({swd_metric()})},
                  {"repeats", 5},
                  {"base_seed", 511}};
    return m;
  }();
  return configs;
}

}  // namespace

const std::vector<std::string>& builtin_config_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, _] : registry()) out.push_back(name);
    return out;
  }();
  return names;
}

std::string builtin_config_json(const std::string& name) {
  const auto& reg = registry();
  const auto it = reg.find(name);
  if (it == reg.end()) {
    std::string known;
    for (const auto& n : builtin_config_names()) known += (known.empty() ? "" : ", ") + n;
    throw std::invalid_argument("unknown built-in config '" + name + "' (known: " + known + ")");
  }
  return it->second.dump(2);
}

std::vector<SweepConfig> builtin_configs(const std::string& name) { return parse_sweep_configs(builtin_config_json(name)); }

}  // namespace sdist::harness
