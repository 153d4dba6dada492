#include "qregion/serialization.hpp"

#include <json.hpp>

namespace qregion {

using nlohmann::json;

namespace {

json complex_to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

json header(const std::vector<int>& dims, const std::vector<std::string>& labels, const char* kind) {
  json j;
  j["dims"] = dims;
  j["labels"] = labels;
  j["kind"] = kind;
  return j;
}

Complex parse_complex(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw FormatError("state json: " + path + " must be a [re, im] pair");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

}  // namespace

std::string state_to_json(const PureState& s) {
  json j = header(s.dims, s.labels, "ket");
  json data = json::array();
  for (long i = 0; i < s.dim(); ++i) data.push_back(complex_to_json(s.amplitudes[i]));
  j["data"] = std::move(data);
  return j.dump();
}

std::string state_to_json(const MultipartiteState& s) {
  json j = header(s.dims, s.labels, "density");
  json data = json::array();
  for (long r = 0; r < s.dim(); ++r) {
    json row = json::array();
    for (long c = 0; c < s.dim(); ++c) row.push_back(complex_to_json(s.rho(r, c)));
    data.push_back(std::move(row));
  }
  j["data"] = std::move(data);
  return j.dump();
}

BuiltState load_state_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("state json: not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw FormatError("state json: top level must be an object");
  for (const char* field : {"dims", "labels", "kind", "data"})
    if (!j.contains(field)) throw FormatError(std::string("state json: missing field '") + field + "'");

  if (!j["dims"].is_array()) throw FormatError("state json: dims must be an array");
  std::vector<int> dims;
  for (size_t k = 0; k < j["dims"].size(); ++k) {
    const auto& e = j["dims"][k];
    if (!e.is_number_integer() || e.get<long>() < 1)
      throw FormatError("state json: dims[" + std::to_string(k) + "] must be a positive integer");
    dims.push_back(e.get<int>());
  }
  if (!j["labels"].is_array()) throw FormatError("state json: labels must be an array");
  std::vector<std::string> labels;
  for (size_t k = 0; k < j["labels"].size(); ++k) {
    const auto& e = j["labels"][k];
    if (!e.is_string()) throw FormatError("state json: labels[" + std::to_string(k) + "] must be a string");
    labels.push_back(e.get<std::string>());
  }
  if (!j["kind"].is_string()) throw FormatError("state json: kind must be a string");
  std::string kind = j["kind"].get<std::string>();

  long d = 1;
  for (int x : dims) d *= x;
  const json& data = j["data"];
  if (!data.is_array()) throw FormatError("state json: data must be an array");

  BuiltState out;
  try {
    if (kind == "ket") {
      if (static_cast<long>(data.size()) != d)
        throw FormatError("state json: data has " + std::to_string(data.size()) + " entries, expected " +
                          std::to_string(d));
      Vector amps(d);
      for (long i = 0; i < d; ++i) amps[i] = parse_complex(data[i], "data[" + std::to_string(i) + "]");
      out.ket = PureState(dims, labels, std::move(amps));
      out.rho = out.ket->to_density();
    } else if (kind == "density") {
      if (static_cast<long>(data.size()) != d)
        throw FormatError("state json: data has " + std::to_string(data.size()) + " rows, expected " +
                          std::to_string(d));
      Matrix rho(d, d);
      for (long r = 0; r < d; ++r) {
        const auto& row = data[r];
        if (!row.is_array() || static_cast<long>(row.size()) != d)
          throw FormatError("state json: data[" + std::to_string(r) + "] must be a row of " + std::to_string(d) +
                            " entries");
        for (long c = 0; c < d; ++c)
          rho(r, c) = parse_complex(row[c], "data[" + std::to_string(r) + "][" + std::to_string(c) + "]");
      }
      out.rho = MultipartiteState(dims, labels, std::move(rho));
      out.rho.validate();
    } else {
      throw FormatError("state json: kind must be 'ket' or 'density', got '" + kind + "'");
    }
  } catch (const InvariantViolation& e) {
    throw FormatError(std::string("state json: data: ") + e.what());
  } catch (const LabelError& e) {
    throw FormatError(std::string("state json: labels: ") + e.what());
  } catch (const DimensionError& e) {
    throw FormatError(std::string("state json: dims: ") + e.what());
  }
  return out;
}

}  // namespace qregion
