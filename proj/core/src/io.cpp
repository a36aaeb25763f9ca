#include "revhyp/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace revhyp::io {

json space_to_json(const ProbabilitySpace& space) {
  json j;
  j["labels"] = space.labels();
  j["mu"] = space.mu();
  return j;
}

SpacePtr space_from_json(const json& j) {
  return make_space(j.at("labels").get<std::vector<std::string>>(),
                    j.at("mu").get<std::vector<double>>());
}

namespace {

json matrix_to_json(const Eigen::MatrixXd& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  auto rows = j.get<std::vector<std::vector<double>>>();
  if (rows.empty()) throw std::invalid_argument("empty matrix");
  Eigen::MatrixXd M(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw std::invalid_argument("ragged matrix");
    for (std::size_t k = 0; k < rows[i].size(); ++k)
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
  }
  return M;
}

}  // namespace

json generator_to_json(const Generator& g) {
  json j;
  j["space"] = space_to_json(*g.space());
  j["L"] = matrix_to_json(g.matrix());
  return j;
}

Generator generator_from_json(const json& j) {
  return validate_generator(matrix_from_json(j.at("L")), space_from_json(j.at("space")));
}

json kernel_to_json(const MarkovKernel& k) {
  json j;
  j["space"] = space_to_json(*k.space);
  j["K"] = matrix_to_json(k.K);
  return j;
}

MarkovKernel kernel_from_json(const json& j) {
  return MarkovKernel(space_from_json(j.at("space")), matrix_from_json(j.at("K")));
}

json function_to_json(const RealFunction& f) {
  json j;
  j["values"] = f.values();
  return j;
}

RealFunction function_from_json(const json& j, SpacePtr space) {
  if (j.is_array()) return RealFunction(std::move(space), j.get<std::vector<double>>());
  return RealFunction(std::move(space), j.at("values").get<std::vector<double>>());
}

RealFunction function_from_csv(const std::string& text, SpacePtr space) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty function CSV");
  if (line.rfind("label,value", 0) != 0)
    throw std::invalid_argument("function CSV must start with a 'label,value' header");
  std::vector<double> values(space->size());
  std::vector<bool> seen(space->size(), false);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto comma = line.rfind(',');
    if (comma == std::string::npos) throw std::invalid_argument("malformed CSV row: " + line);
    std::size_t idx = space->index_of(line.substr(0, comma));
    values[idx] = std::stod(line.substr(comma + 1));
    seen[idx] = true;
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i])
      throw std::invalid_argument("function CSV misses label " + space->labels()[i]);
  return RealFunction(std::move(space), std::move(values));
}

std::vector<std::size_t> set_from_json(const json& j, const ProbabilitySpace& space) {
  std::vector<std::size_t> out;
  if (j.contains("indices")) {
    for (const auto& v : j.at("indices")) {
      std::size_t i = v.get<std::size_t>();
      if (i >= space.size()) throw std::invalid_argument("set index out of range");
      out.push_back(i);
    }
  } else if (j.contains("labels")) {
    for (const auto& v : j.at("labels")) out.push_back(space.index_of(v.get<std::string>()));
  } else {
    throw std::invalid_argument("set file needs 'indices' or 'labels'");
  }
  return out;
}

json law_to_json(const RankingDistribution& law) {
  json probs;
  for (int r = 0; r < 6; ++r)
    probs[RankingDistribution::kRankings[static_cast<std::size_t>(r)]] =
        law.probs[static_cast<std::size_t>(r)];
  json j;
  j["k"] = 3;
  j["probs"] = std::move(probs);
  return j;
}

RankingDistribution law_from_json(const json& j) {
  if (j.at("k").get<int>() != 3)
    throw std::invalid_argument("only k = 3 ranking laws are supported; reduce to triples");
  RankingDistribution law{};
  const auto& probs = j.at("probs");
  for (int r = 0; r < 6; ++r)
    law.probs[static_cast<std::size_t>(r)] =
        probs.at(RankingDistribution::kRankings[static_cast<std::size_t>(r)]).get<double>();
  law.validate();
  return law;
}

json cube_to_json(const CubeFunction& f) {
  json j;
  j["n"] = f.n();
  j["bias"] = f.bias();
  j["table"] = f.table();
  return j;
}

CubeFunction cube_from_json(const json& j) {
  std::vector<double> bias;
  if (j.at("bias").is_number())
    bias = {j.at("bias").get<double>()};
  else
    bias = j.at("bias").get<std::vector<double>>();
  return CubeFunction(j.at("n").get<int>(), std::move(bias),
                      j.at("table").get<std::vector<double>>());
}

json chain_spec_to_json(const ChainSpec& spec) {
  json j;
  j["kind"] = to_string(spec.kind);
  switch (spec.kind) {
    case ChainKind::simple:
      if (spec.weights.empty())
        j["m"] = spec.m;
      else
        j["weights"] = spec.weights;
      break;
    case ChainKind::product_walk:
      j["n"] = spec.n;
      if (spec.weights.empty())
        j["m"] = spec.m;
      else
        j["weights"] = spec.weights;
      break;
    case ChainKind::random_transposition:
    case ChainKind::top_to_random:
      j["n"] = spec.n;
      break;
    case ChainKind::bernoulli_laplace:
      j["n"] = spec.n;
      j["r"] = spec.r;
      break;
    case ChainKind::spanning_tree_walk:
      j["graph"] = spec.graph;
      if (spec.graph == "doubled-line")
        j["segments"] = spec.segments;
      else
        j["m"] = spec.m;
      break;
    case ChainKind::glauber_ising:
      j["width"] = spec.width;
      j["height"] = spec.height;
      j["beta"] = spec.beta;
      j["h"] = spec.h;
      j["boundary"] = spec.boundary == IsingBoundary::free_bc ? "free"
                      : spec.boundary == IsingBoundary::plus  ? "plus"
                                                              : "minus";
      j["rates"] = spec.rates == GlauberRates::metropolis ? "metropolis" : "heat-bath";
      break;
    case ChainKind::qq_infinity_truncated:
      j["lambda"] = spec.lambda;
      j["trunc"] = spec.trunc;
      break;
  }
  return j;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

json json_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) text_ += ',';
    text_ += header[i];
  }
  text_ += '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_) throw std::invalid_argument("CSV row width mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) text_ += ',';
    text_ += format_double(values[i]);
  }
  text_ += '\n';
}

void CsvWriter::raw_row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw std::invalid_argument("CSV row width mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) text_ += ',';
    text_ += cells[i];
  }
  text_ += '\n';
}

}  // namespace revhyp::io
