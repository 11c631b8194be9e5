#include "hypowave/field_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "hypowave/report.hpp"

namespace hypowave::io {

namespace {

using nlohmann::json;

const json& member(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(path + "/" + key, "missing");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError(path, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw SchemaError(path, "expected an integer");
  return j.get<int>();
}

CMatrix matrix(const json& j, Eigen::Index n, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array of rows");
  if (static_cast<Eigen::Index>(j.size()) != n)
    throw SchemaError(path, "expected " + std::to_string(n) + " rows, got " + std::to_string(j.size()));
  CMatrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = j[r];
    const std::string rp = path + "/" + std::to_string(r);
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
      throw SchemaError(rp, "expected a row of " + std::to_string(n) + " entries");
    for (Eigen::Index c = 0; c < n; ++c) {
      const auto& e = row[c];
      const std::string ep = rp + "/" + std::to_string(c);
      if (!e.is_array() || e.size() != 2) throw SchemaError(ep, "expected [re, im]");
      m(r, c) = cplx(number(e[0], ep + "/0"), number(e[1], ep + "/1"));
    }
  }
  return m;
}

json matrix_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const cplx z = m(r, c);
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw PreconditionError("cannot save a non-finite coefficient");
      row.push_back(json::array({z.real(), z.imag()}));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

SpectralField field_from_json(const json& j) {
  const auto& g = member(j, "group", "");
  if (!g.is_string()) throw SchemaError("/group", "expected a string");
  const auto group = g.get<std::string>();
  if (group == "su2") {
    su2::SpectralFieldSU2 f;
    f.lmax = {integer(member(j, "lmax2", ""), "/lmax2")};
    if (f.lmax.twice < 0) throw SchemaError("/lmax2", "must be nonnegative");
    const auto& cs = member(j, "coeffs", "");
    if (!cs.is_object()) throw SchemaError("/coeffs", "expected an object keyed by 2l");
    for (const auto& [key, val] : cs.items()) {
      const std::string path = "/coeffs/" + key;
      int l2 = 0;
      std::size_t used = 0;
      try {
        l2 = std::stoi(key, &used);
      } catch (const std::exception&) {
        throw SchemaError(path, "key is not an integer 2l");
      }
      if (used != key.size() || l2 < 0) throw SchemaError(path, "key is not an integer 2l");
      if (l2 > f.lmax.twice) throw SchemaError(path, "2l exceeds lmax2");
      f.coeffs[l2] = matrix(val, l2 + 1, path);
    }
    return f;
  }
  if (group == "heis") {
    heis::SpectralFieldHeis f;
    f.trunc = integer(member(j, "trunc", ""), "/trunc");
    if (f.trunc < 1) throw SchemaError("/trunc", "must be >= 1");
    const auto& ls = member(j, "lambdas", "");
    if (!ls.is_array()) throw SchemaError("/lambdas", "expected an array");
    for (std::size_t i = 0; i < ls.size(); ++i) f.lambdas.push_back(number(ls[i], "/lambdas/" + std::to_string(i)));
    const auto& cs = member(j, "coeffs", "");
    if (!cs.is_array() || cs.size() != f.lambdas.size())
      throw SchemaError("/coeffs", "expected one matrix per lambda");
    for (std::size_t i = 0; i < cs.size(); ++i)
      f.coeffs.push_back(matrix(cs[i], f.trunc, "/coeffs/" + std::to_string(i)));
    try {
      f.validate();
    } catch (const PreconditionError& e) {
      throw SchemaError("/lambdas", e.what());
    }
    return f;
  }
  throw SchemaError("/group", "unknown group '" + group + "'");
}

json field_to_json(const SpectralField& f) {
  if (const auto* s = std::get_if<su2::SpectralFieldSU2>(&f)) {
    json cs = json::object();
    for (const auto& [l2, m] : s->coeffs) cs[std::to_string(l2)] = matrix_json(m);
    return {{"group", "su2"}, {"lmax2", s->lmax.twice}, {"coeffs", cs}};
  }
  const auto& h = std::get<heis::SpectralFieldHeis>(f);
  json cs = json::array();
  for (const auto& m : h.coeffs) cs.push_back(matrix_json(m));
  return {{"group", "heis"}, {"trunc", h.trunc}, {"lambdas", h.lambdas}, {"coeffs", cs}};
}

SpectralField load_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError(path, "cannot open");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw SchemaError(path, std::string("invalid JSON: ") + e.what());
  }
  return field_from_json(j);
}

void save_field(const std::string& path, const SpectralField& f) {
  write_file_atomic(path, field_to_json(f).dump() + "\n");
}

}  // namespace hypowave::io
