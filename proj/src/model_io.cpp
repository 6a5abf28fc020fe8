#include "cantor/model_io.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cantor/errors.hpp"

namespace cantor {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

double as_number(const json& j, const std::string& ctx) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    double out = 0.0;
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc{} || ptr != end) {
      throw SchemaMismatch(ctx + ": cannot parse \"" + s + "\" as a decimal");
    }
    return out;
  }
  throw SchemaMismatch(ctx + " must be a number or a decimal string");
}

std::vector<double> as_vector(const json& j, const std::string& ctx) {
  if (!j.is_array()) throw SchemaMismatch(ctx + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(as_number(j[i], ctx + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Matrix as_matrix(const json& j, const std::string& ctx) {
  if (!j.is_array() || j.empty()) {
    throw SchemaMismatch(ctx + " must be a nonempty array of rows");
  }
  Matrix M(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto row = as_vector(j[i], ctx + "[" + std::to_string(i) + "]");
    if (row.size() != M.n) {
      throw SchemaMismatch(ctx + " is not square: row " + std::to_string(i) +
                           " has " + std::to_string(row.size()) + " entries");
    }
    for (std::size_t k = 0; k < M.n; ++k) M.at(i, k) = row[k];
  }
  return M;
}

void reject_unknown_keys(const json& obj,
                         const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.contains(key)) {
      throw SchemaMismatch("unknown field \"" + key + "\"");
    }
  }
}

std::string id_or(const json& obj, const std::string& fallback) {
  if (!obj.contains("id")) return fallback;
  if (!obj.at("id").is_string()) throw SchemaMismatch("\"id\" must be a string");
  return obj.at("id").get<std::string>();
}

MeasureModel from_json(const json& obj) {
  if (!obj.is_object()) throw SchemaMismatch("model must be a JSON object");
  if (!obj.contains("type") || !obj.at("type").is_string()) {
    throw SchemaMismatch("model needs a string \"type\" field");
  }
  const std::string type = obj.at("type").get<std::string>();

  if (type == "bernoulli") {
    reject_unknown_keys(obj, {"type", "p", "id"});
    if (!obj.contains("p")) throw SchemaMismatch("bernoulli needs \"p\"");
    return MeasureModel::bernoulli(as_number(obj.at("p"), "p"),
                                   id_or(obj, "bernoulli"));
  }

  if (type == "markov") {
    reject_unknown_keys(obj, {"type", "P", "pi", "id"});
    if (!obj.contains("P")) throw SchemaMismatch("markov needs \"P\"");
    const Matrix M = as_matrix(obj.at("P"), "P");
    if (M.n != 2) {
      throw SchemaMismatch("markov transition matrix must be 2x2, got " +
                           std::to_string(M.n) + "x" + std::to_string(M.n));
    }
    const std::array<std::array<double, 2>, 2> P{
        {{M.at(0, 0), M.at(0, 1)}, {M.at(1, 0), M.at(1, 1)}}};
    const std::string id = id_or(obj, "markov");
    if (!obj.contains("pi")) return MeasureModel::markov(P, id);
    const auto pi = as_vector(obj.at("pi"), "pi");
    if (pi.size() != 2) throw SchemaMismatch("markov \"pi\" must have length 2");
    return MeasureModel::markov_with_start({pi[0], pi[1]}, P, id);
  }

  if (type == "hidden_markov") {
    reject_unknown_keys(obj, {"type", "Q", "emit", "pi", "id"});
    if (!obj.contains("Q") || !obj.contains("emit")) {
      throw SchemaMismatch("hidden_markov needs \"Q\" and \"emit\"");
    }
    const Matrix Q = as_matrix(obj.at("Q"), "Q");
    if (!obj.at("emit").is_array() || obj.at("emit").size() != Q.n) {
      throw SchemaMismatch("\"emit\" must list one bit per hidden state");
    }
    std::vector<std::uint8_t> emit;
    for (const auto& e : obj.at("emit")) {
      if (!e.is_number_integer() || (e.get<int>() != 0 && e.get<int>() != 1)) {
        throw SchemaMismatch("\"emit\" entries must be 0 or 1");
      }
      emit.push_back(static_cast<std::uint8_t>(e.get<int>()));
    }
    const std::string id = id_or(obj, "hidden_markov");
    if (!obj.contains("pi")) return MeasureModel::hidden_markov(Q, emit, id);
    return MeasureModel::hidden_markov(as_vector(obj.at("pi"), "pi"), Q, emit,
                                       id);
  }

  if (type == "mixture") {
    reject_unknown_keys(obj, {"type", "weights", "components", "id"});
    if (!obj.contains("weights") || !obj.contains("components")) {
      throw SchemaMismatch("mixture needs \"weights\" and \"components\"");
    }
    if (!obj.at("components").is_array()) {
      throw SchemaMismatch("\"components\" must be an array of models");
    }
    std::vector<MeasureModel> comps;
    for (const auto& c : obj.at("components")) comps.push_back(from_json(c));
    return MeasureModel::mixture(as_vector(obj.at("weights"), "weights"),
                                 std::move(comps), id_or(obj, "mixture"));
  }

  throw SchemaMismatch("unknown model type \"" + type + "\"");
}

ordered_json to_json(const MeasureModel& m) {
  ordered_json out;
  if (const auto* b = m.get_if<Bernoulli>()) {
    out["type"] = "bernoulli";
    out["p"] = b->p;
  } else if (const auto* mk = m.get_if<Markov>()) {
    out["type"] = "markov";
    out["P"] = {{mk->P[0][0], mk->P[0][1]}, {mk->P[1][0], mk->P[1][1]}};
    out["pi"] = {mk->pi[0], mk->pi[1]};
  } else if (const auto* h = m.get_if<HiddenMarkov>()) {
    out["type"] = "hidden_markov";
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < h->Q.n; ++i) {
      ordered_json row = ordered_json::array();
      for (std::size_t j = 0; j < h->Q.n; ++j) row.push_back(h->Q.at(i, j));
      rows.push_back(std::move(row));
    }
    out["Q"] = std::move(rows);
    out["emit"] = ordered_json::array();
    for (auto e : h->emit) out["emit"].push_back(static_cast<int>(e));
    out["pi"] = h->pi;
  } else {
    const auto* mix = m.get_if<Mixture>();
    out["type"] = "mixture";
    out["weights"] = mix->weights;
    out["components"] = ordered_json::array();
    for (const auto& c : mix->components) out["components"].push_back(to_json(c));
  }
  out["id"] = m.id();
  return out;
}

}  // namespace

MeasureModel parse_model_json(const std::string& text, bool strict) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaMismatch(std::string("model file is not valid JSON: ") +
                         e.what());
  }
  MeasureModel m = from_json(doc);
  if (strict) {
    const CheckReport rep = validate(m);
    if (!rep.passed) {
      throw InvalidModel("model fails validation: " + rep.worst_item);
    }
  }
  return m;
}

MeasureModel load_model_file(const std::string& path, bool strict) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::ios_base::failure("cannot open model file \"" + path + "\"");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model_json(buf.str(), strict);
}

std::string model_to_json(const MeasureModel& m) {
  return to_json(m).dump(2) + "\n";
}

}  // namespace cantor
