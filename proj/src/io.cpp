#include "phasespace/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "phasespace/errors.hpp"

namespace phasespace::io {
namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_header(std::ostream& out, std::string_view title, std::string_view hash) {
  out << "# " << title << " config=" << hash << '\n';
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // folds -0
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const json& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(config.dump())));
  return buf;
}

void write_grid_csv(std::ostream& out, const PhaseField& field, std::string_view title,
                    std::string_view hash) {
  write_header(out, title, hash);
  out << "x,p,re,im\n";
  const PhaseGrid& g = field.grid();
  const auto values = field.values();
  for (int i = 0; i < g.resolution(); ++i) {
    for (int j = 0; j < g.resolution(); ++j) {
      const PhasePoint pt = g.point(i, j);
      const cplx v = values[g.index(i, j)];
      out << format_number(pt.x) << ',' << format_number(pt.p) << ','
          << format_number(v.real()) << ',' << format_number(v.imag()) << '\n';
    }
  }
}

void write_cut_csv(std::ostream& out, const CutTable& table, std::string_view title,
                   std::string_view hash) {
  write_header(out, title, hash);
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    out << (c ? "," : "") << table.columns[c];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size()) throw ParameterError("cut row width mismatch");
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_number(row[c]);
    out << '\n';
  }
}

StateSpec state_spec_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw ParameterError("state JSON needs a string field 'kind'");
  }
  const std::string kind = j["kind"].get<std::string>();
  std::map<std::string, double> params;
  if (j.contains("params")) {
    if (!j["params"].is_object()) throw ParameterError("'params' must be an object");
    for (const auto& [key, value] : j["params"].items()) {
      if (!value.is_number()) throw ParameterError("parameter '" + key + "' must be a number");
      params[key] = value.get<double>();
    }
  }
  auto take = [&](const char* name) {
    auto it = params.find(name);
    if (it == params.end()) return 0.0;
    const double v = it->second;
    params.erase(it);
    return v;
  };

  StateSpec spec;
  PhaseModifier mod;
  mod.rotation = take("rotation");
  mod.displacement = {take("displacement_re"), take("displacement_im")};
  if (kind == "vacuum") {
    spec = StateSpec::vacuum();
  } else if (kind == "coherent") {
    spec = StateSpec::coherent({take("re"), take("im")});
    mod.displacement += spec.modifier.displacement;
  } else {
    spec.kind = state_kind_from_string(kind);
    spec.params = params;
    params.clear();
  }
  if (!params.empty()) {
    throw ParameterError("unexpected parameter '" + params.begin()->first + "' for " + kind);
  }
  spec.modifier = mod;
  return spec;
}

json to_json(const StateSpec& spec) {
  json params = json::object();
  for (const auto& [k, v] : spec.params) params[k] = v;
  if (spec.modifier.rotation != 0.0) params["rotation"] = spec.modifier.rotation;
  if (spec.modifier.displacement.real() != 0.0) {
    params["displacement_re"] = spec.modifier.displacement.real();
  }
  if (spec.modifier.displacement.imag() != 0.0) {
    params["displacement_im"] = spec.modifier.displacement.imag();
  }
  return {{"kind", std::string(to_string(spec.kind))}, {"params", params}};
}

json to_json(const DeltaSeries& series) {
  json coeffs = json::array();
  for (const auto& [key, c] : series.coefficients()) {
    coeffs.push_back({key.first, key.second, c.real(), c.imag()});
  }
  json gen = series.generator() ? json{{"gamma", *series.generator()}} : json(nullptr);
  return {{"generator", gen}, {"coeffs", coeffs}, {"order", series.order()}};
}

DeltaSeries delta_series_from_json(const json& j) {
  if (!j.is_object() || !j.contains("order")) {
    throw ParameterError("delta series JSON needs 'order'");
  }
  const int order = j["order"].get<int>();
  if (j.contains("generator") && !j["generator"].is_null()) {
    return exp_laplace_series(j["generator"].at("gamma").get<double>(), order);
  }
  std::map<DeltaSeries::Key, cplx> coeffs;
  for (const auto& row : j.value("coeffs", json::array())) {
    if (!row.is_array() || row.size() != 4) {
      throw ParameterError("coefficient rows are [q, r, re, im]");
    }
    coeffs[{row[0].get<int>(), row[1].get<int>()}] = {row[2].get<double>(), row[3].get<double>()};
  }
  return DeltaSeries(std::move(coeffs), order);
}

json to_json(const NonclassicalityReport& report) {
  json entries = json::array();
  for (const auto& e : report.entries) {
    json loc = e.location ? json{e.location->x, e.location->p} : json(nullptr);
    entries.push_back({{"criterion", e.criterion},
                       {"verdict", std::string(to_string(e.verdict))},
                       {"value", number(e.value)},
                       {"location", loc},
                       {"note", e.note}});
  }
  return {{"state", report.state},
          {"overall", std::string(to_string(report.overall()))},
          {"certifications", report.certifications()},
          {"criteria", entries}};
}

json to_json(const FockDiagonalReport& r) {
  json out{{"gamma", r.gamma},
           {"pairing", r.pairing},
           {"fourier", r.fourier},
           {"routes_agree", r.routes_agree}};
  if (!r.quoted.empty()) {
    out["quoted"] = r.quoted;
    out["quoted_mismatch"] = r.quoted_mismatch;
  }
  return out;
}

}  // namespace phasespace::io
