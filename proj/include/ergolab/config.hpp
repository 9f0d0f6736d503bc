#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ergolab/correlate.hpp"
#include "ergolab/nil.hpp"
#include "ergolab/pet.hpp"
#include "ergolab/poly.hpp"
#include "ergolab/systems.hpp"

namespace ergolab {

using json = nlohmann::json;

struct ExperimentConfig {
  json doc;
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::filesystem::path output_dir;
  std::string output_name;

  static ExperimentConfig load(const std::filesystem::path& path);
  // Relative output directories resolve against base.
  static ExperimentConfig from_json(json doc, const std::filesystem::path& base = ".");

  std::uint64_t require_seed(const std::string& what) const;
  std::filesystem::path csv_path() const { return output_dir / (output_name + ".csv"); }
  std::filesystem::path json_path() const { return output_dir / (output_name + ".json"); }
};

// Declaration builders. All throw ConfigError naming the offending key.
const json& require(const json& obj, const std::string& key, const std::string& where);
StateSpace parse_space(const json& j);
Transformation parse_map(const json& j, const StateSpace& space);
Sampler parse_sampler(const json& j, std::optional<std::uint64_t> seed);
CommutingSystem parse_system(const json& j, std::optional<std::uint64_t> seed);
FixedReal parse_fixed(const json& j, const std::string& where);
RealPolynomial parse_polynomial(const json& j);
std::vector<std::vector<RealPolynomial>> parse_grid(const json& j);
Observable parse_observable(const json& j, const StateSpace& space);
CorrelationSpec parse_correlation(const json& doc, std::optional<std::uint64_t> seed);
Window parse_window(const json& j);
NilBasis parse_basis(const json& j);
std::vector<NilBasis> parse_ladder(const json& j);
PolyFamily parse_family(const json& j);

}  // namespace ergolab
