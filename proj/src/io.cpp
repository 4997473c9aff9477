#include "maxflat/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "maxflat/error.hpp"

namespace maxflat {

void reject_unknown_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ValidationError(where + ": unknown key '" + key + "'");
  }
}

namespace {

std::string mapping_name(PoleMapping m) {
  return m == PoleMapping::Bilinear ? "bilinear" : "impulse_invariance";
}

PoleMapping parse_mapping(const std::string& s) {
  if (s == "impulse_invariance") return PoleMapping::ImpulseInvariance;
  if (s == "bilinear") return PoleMapping::Bilinear;
  throw ValidationError("pole_mapping must be 'impulse_invariance' or 'bilinear'");
}

template <typename T>
T get_as(const Json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad value for '") + key + "': " + e.what());
  }
}

Json complex_json(Complex c) { return Json::array({c.real(), c.imag()}); }

Complex complex_from(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw ValidationError("complex values are [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

Json spec_to_json(const DesignSpec& s) {
  Json j;
  j["fs_hz"] = s.fs_hz;
  j["f_wb_cyc_per_smp"] = s.f_wb;
  j["f_nb_cyc_per_smp"] = s.f_nb ? Json(*s.f_nb) : Json(nullptr);
  j["k_w_dc"] = s.k_w_dc;
  j["k_w_nb"] = s.k_w_nb;
  j["k_w_pi"] = s.k_w_pi;
  j["k_t"] = s.k_t;
  j["group_delay_smp"] = s.group_delay ? Json(*s.group_delay) : Json("optimal");
  j["causal"] = s.causal;
  j["per_output_delay"] = s.per_output_delay;
  j["bandwidth_factor"] = s.bandwidth_factor;
  j["pole_mapping"] = mapping_name(s.pole_mapping);
  return j;
}

DesignSpec spec_from_json(const Json& j) {
  reject_unknown_keys(j,
                      {"fs_hz", "f_wb_cyc_per_smp", "f_nb_cyc_per_smp", "k_w_dc", "k_w_nb", "k_w_pi", "k_t",
                       "group_delay_smp", "causal", "per_output_delay", "bandwidth_factor", "pole_mapping"},
                      "design spec");
  DesignSpec s;
  if (j.contains("fs_hz")) s.fs_hz = get_as<double>(j, "fs_hz");
  if (j.contains("f_wb_cyc_per_smp")) s.f_wb = get_as<double>(j, "f_wb_cyc_per_smp");
  if (j.contains("f_nb_cyc_per_smp") && !j["f_nb_cyc_per_smp"].is_null())
    s.f_nb = get_as<double>(j, "f_nb_cyc_per_smp");
  if (j.contains("k_w_dc")) s.k_w_dc = get_as<int>(j, "k_w_dc");
  if (j.contains("k_w_nb")) s.k_w_nb = get_as<int>(j, "k_w_nb");
  if (j.contains("k_w_pi")) s.k_w_pi = get_as<int>(j, "k_w_pi");
  if (j.contains("k_t")) s.k_t = get_as<int>(j, "k_t");
  if (j.contains("group_delay_smp")) {
    const auto& g = j["group_delay_smp"];
    if (g.is_string()) {
      if (g.get<std::string>() != "optimal") throw ValidationError("group_delay_smp must be a number or \"optimal\"");
    } else {
      s.group_delay = get_as<double>(j, "group_delay_smp");
    }
  }
  if (j.contains("causal")) s.causal = get_as<bool>(j, "causal");
  if (j.contains("per_output_delay")) s.per_output_delay = get_as<bool>(j, "per_output_delay");
  if (j.contains("bandwidth_factor")) s.bandwidth_factor = get_as<double>(j, "bandwidth_factor");
  if (j.contains("pole_mapping")) s.pole_mapping = parse_mapping(get_as<std::string>(j, "pole_mapping"));
  return s;
}

Json design_to_json(const FilterbankDesign& d) {
  Json j;
  j["spec"] = spec_to_json(d.spec);
  j["ts_s"] = d.Ts;
  j["q_smp"] = d.q;
  j["delays_smp"] = d.delays;
  Json poles = Json::array();
  for (auto p : d.poles.poles) poles.push_back(complex_json(p));
  j["poles"] = poles;
  Json C = Json::array();
  for (Eigen::Index k = 0; k < d.C.rows(); ++k) {
    Json row = Json::array();
    for (Eigen::Index t = 0; t < d.C.cols(); ++t) row.push_back(complex_json(d.C(k, t)));
    C.push_back(row);
  }
  j["C"] = C;
  j["a"] = d.a;
  j["b"] = d.b;
  Json S = Json::array();
  for (Eigen::Index r = 0; r < d.sigma.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < d.sigma.cols(); ++c) row.push_back(d.sigma(r, c));
    S.push_back(row);
  }
  j["sigma"] = S;
  j["condition"] = d.condition;
  j["residual"] = d.residual;
  j["warnings"] = d.warnings;
  return j;
}

FilterbankDesign design_from_json(const Json& j) {
  reject_unknown_keys(j,
                      {"spec", "ts_s", "q_smp", "delays_smp", "poles", "C", "a", "b", "sigma", "condition", "residual",
                       "warnings"},
                      "design file");
  FilterbankDesign d;
  try {
    d.spec = spec_from_json(j.at("spec"));
    d.Ts = j.at("ts_s").get<double>();
    d.q = j.at("q_smp").get<double>();
    d.delays = j.at("delays_smp").get<std::vector<double>>();
    for (const auto& p : j.at("poles")) d.poles.poles.push_back(complex_from(p));
    const auto& C = j.at("C");
    const auto K = static_cast<Eigen::Index>(C.size());
    const auto Kt = K > 0 ? static_cast<Eigen::Index>(C[0].size()) : 0;
    d.C = CMatrix(K, Kt);
    for (Eigen::Index k = 0; k < K; ++k) {
      if (static_cast<Eigen::Index>(C[static_cast<std::size_t>(k)].size()) != Kt)
        throw ValidationError("ragged C matrix");
      for (Eigen::Index t = 0; t < Kt; ++t)
        d.C(k, t) = complex_from(C[static_cast<std::size_t>(k)][static_cast<std::size_t>(t)]);
    }
    d.a = j.at("a").get<std::vector<double>>();
    d.b = j.at("b").get<std::vector<std::vector<double>>>();
    const auto& S = j.at("sigma");
    d.sigma = RMatrix(static_cast<Eigen::Index>(S.size()), S.empty() ? 0 : static_cast<Eigen::Index>(S[0].size()));
    for (std::size_t r = 0; r < S.size(); ++r)
      for (std::size_t c = 0; c < S[r].size(); ++c)
        d.sigma(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = S[r][c].get<double>();
    d.condition = j.at("condition").get<double>();
    d.residual = j.at("residual").get<double>();
    d.warnings = j.at("warnings").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed design file: ") + e.what());
  }
  const std::size_t K = d.poles.size();
  if (static_cast<std::size_t>(d.C.rows()) != K || d.a.size() != K + 1 ||
      d.b.size() != static_cast<std::size_t>(d.C.cols())) {
    throw ValidationError("malformed design file: inconsistent dimensions");
  }
  for (const auto& b : d.b)
    if (b.size() != K + 1) throw ValidationError("malformed design file: numerator length");
  return d;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << text;
  if (!out) throw Error("write to '" + path + "' failed");
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // snprintf follows LC_NUMERIC; force '.'.
  for (char* c = buf; *c; ++c)
    if (*c == ',') *c = '.';
  return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) text_ += (i ? "," : "") + header[i];
  text_ += '\n';
}

void CsvWriter::add_row(const std::vector<double>& row) {
  if (row.size() != columns_) throw Error("CSV row width mismatch");
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) text_ += ',';
    text_ += format_number(row[i]);
  }
  text_ += '\n';
}

std::string CsvWriter::str() const { return text_; }

}  // namespace maxflat
