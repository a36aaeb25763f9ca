#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "revhyp/chains.hpp"
#include "revhyp/generator.hpp"
#include "revhyp/measure.hpp"
#include "revhyp/social_choice.hpp"

namespace revhyp::io {

using json = nlohmann::ordered_json;

// Space file: {"labels":[...], "mu":[...]}
json space_to_json(const ProbabilitySpace& space);
SpacePtr space_from_json(const json& j);

// Generator file: {"space":{...}, "L":[[...]]}; kernel file analogous with "K".
json generator_to_json(const Generator& g);
Generator generator_from_json(const json& j);
json kernel_to_json(const MarkovKernel& k);
MarkovKernel kernel_from_json(const json& j);

// Function file: JSON {"values":[...]} (space order) or CSV "label,value".
json function_to_json(const RealFunction& f);
RealFunction function_from_json(const json& j, SpacePtr space);
RealFunction function_from_csv(const std::string& text, SpacePtr space);

// Set file: {"indices":[...]} or {"labels":[...]}
std::vector<std::size_t> set_from_json(const json& j, const ProbabilitySpace& space);

// Ranking law file: {"k":3, "probs":{"abc":...,"acb":...,...}}
json law_to_json(const RankingDistribution& law);
RankingDistribution law_from_json(const json& j);

// Cube function file: {"n":..., "bias":... or [...], "table":[...]}
json cube_to_json(const CubeFunction& f);
CubeFunction cube_from_json(const json& j);

json chain_spec_to_json(const ChainSpec& spec);

/// Shortest round-trip decimal representation (std::to_chars).
std::string format_double(double v);
/// Doubles become JSON numbers; non-finite values become "inf"/"-inf"/"nan".
json json_number(double v);

json read_json_file(const std::string& path);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// CSV with '.' decimal, ',' separator and a mandatory header row.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<double>& values);
  void raw_row(const std::vector<std::string>& cells);
  const std::string& str() const { return text_; }

 private:
  std::size_t columns_;
  std::string text_;
};

}  // namespace revhyp::io
