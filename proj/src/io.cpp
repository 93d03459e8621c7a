#include "subcurv/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace subcurv {

namespace {

// JSON has no infinities; they are written as strings.
Json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

Json vec(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

std::string csv_vec(const std::vector<double>& v) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
  return os.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

Json to_json(const PSDReport& r) {
  Json j;
  j["grid"] = r.grid;
  j["points"] = r.n_points;
  j["r_values"] = r.n_r;
  j["tolerance"] = r.tolerance;
  j["global_min"] = num(r.global_min);
  j["global_min_abs"] = num(r.global_min_abs);
  j["argmin_point"] = vec(r.argmin_point);
  j["argmin_r"] = vec(r.argmin_r);
  j["nonconverged"] = r.nonconverged;
  j["verdict"] = r.pass ? "PASS" : "FAIL";
  return j;
}

Json to_json(const CompactReport& r) {
  Json j;
  j["c_lw"] = num(r.c_lw);
  j["c_gamma"] = num(r.c_gamma);
  j["growth_lw"] = num(r.growth_lw);
  j["growth_gamma"] = num(r.growth_gamma);
  j["bounded"] = r.bounded;
  j["compact"] = r.compact;
  j["w_at_least_one"] = r.w_at_least_one;
  j["detail"] = r.detail;
  j["verdict"] = r.pass ? "PASS" : "FAIL";
  return j;
}

Json to_json(const CbResult& r) {
  Json j;
  j["value"] = num(r.value);
  j["lower"] = num(r.lower);
  j["upper"] = num(r.upper);
  j["s_at_inf"] = num(r.s_at_inf);
  j["divergent"] = r.divergent;
  return j;
}

Json to_json(const RateReport& r) {
  Json j;
  j["lambda"] = num(r.lambda);
  j["r_star"] = vec(r.r_star);
  j["positive"] = r.positive;
  j["trace"] = r.trace;
  return j;
}

Json to_json(const ThetaResult& r) {
  Json j;
  j["theta"] = r.theta;
  j["t_theta"] = num(r.t_theta);
  j["residual"] = num(r.residual);
  j["feasible"] = {num(r.feasible_lo), num(r.feasible_hi)};
  j["stated"] = {r.stated_lo, r.stated_hi};
  j["monotone"] = r.monotone;
  return j;
}

Json to_json(const InequalityCase& c) {
  Json j;
  j["ineq"] = c.ineq;
  j["operator"] = c.op_id;
  j["schedule"] = c.schedule_id;
  j["test_function"] = c.test_function;
  j["method"] = c.method;
  j["x"] = vec(c.x);
  j["y"] = vec(c.y);
  j["t"] = c.t;
  j["alpha"] = c.alpha;
  j["lhs"] = num(c.lhs);
  j["rhs"] = num(c.rhs);
  j["margin"] = num(c.margin);
  j["uncertainty"] = num(c.uncertainty);
  j["verdict"] = c.verdict();
  j["note"] = c.note;
  return j;
}

Json schedule_summary(const Schedule& s) {
  Json j;
  j["label"] = s.label;
  j["t"] = s.t;
  j["ell"] = s.ell;
  Json b0 = Json::array();
  for (std::size_t i = 0; i <= s.ell; ++i) b0.push_back(num(s.b(i, 0.0)));
  j["b_at_0"] = b0;
  j["c_b"] = to_json(s.cb);
  j["omega_ok"] = s.omega_ok;
  j["positive"] = s.positive;
  j["residual_min"] = vec(s.residual_min);
  j["residual_max_abs"] = vec(s.residual_max_abs);
  return j;
}

Json to_json(const Display& d) {
  Json j;
  j["index"] = d.index;
  j["label"] = d.label;
  j["text"] = d.text;
  j["expected_match"] = d.expected_match;
  j["note"] = d.note;
  return j;
}

Json to_json(const Expected& e) {
  Json j;
  j["quantity"] = e.quantity;
  j["value"] = e.value;
  j["provenance"] = provenance_name(e.source);
  j["note"] = e.note;
  return j;
}

Json export_config(const CatalogEntry& e) {
  const auto& s = e.spec;
  const auto& c = s.op.coords;
  Json j;
  j["format"] = "subcurv-config";
  j["version"] = 1;
  j["base"] = {{"catalog", e.id}, {"l", e.l}};
  j["name"] = s.name;
  Json coords = Json::array();
  for (std::size_t i = 0; i < c.size(); ++i) coords.push_back(c.name(i));
  j["coordinates"] = coords;
  Json fields = Json::array();
  for (const auto& f : s.op.fields) {
    Json v = Json::array();
    for (const auto& x : f) v.push_back(x.to_string(c));
    fields.push_back(v);
  }
  j["fields"] = fields;
  Json drift = Json::array();
  for (const auto& x : s.op.drift) drift.push_back(x.to_string(c));
  j["drift"] = drift;
  Json aux = Json::array();
  for (const auto& sf : s.aux) {
    Json m = Json::array();
    for (const auto& row : sf.matrix()) {
      Json r = Json::array();
      for (const auto& x : row) r.push_back(x.to_string(c));
      m.push_back(r);
    }
    aux.push_back({{"name", sf.name()}, {"matrix", m}});
  }
  j["aux"] = aux;
  Json K = Json::array();
  for (const auto& k : s.k.K) K.push_back(k.text());
  j["K"] = K;
  Json omega = Json::array();
  for (const auto& o : s.k.omega) omega.push_back({{"lhs", o.lhs.text()}, {"rhs", o.rhs.text()}});
  j["omega"] = omega;
  j["omega_witness"] = s.omega_witness;
  j["W"] = s.W.to_string(c);
  Json per = Json::array();
  for (std::size_t i = 0; i < c.size(); ++i) per.push_back(!s.periodic.empty() && s.periodic[i]);
  j["periodic"] = per;
  return j;
}

namespace {

const Json& need(const Json& j, const std::string& key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError("field '" + where + key + "': missing");
  return j.at(key);
}

std::string str(const Json& j, const std::string& where) {
  if (!j.is_string()) throw ConfigError("field '" + where + "': expected a string");
  return j.get<std::string>();
}

template <class F>
auto at_field(const std::string& where, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("field '" + where + "': " + e.what());
  }
}

Expression expr(const Json& j, const Coordinates& c, const std::string& where) {
  const std::string s = str(j, where);
  return at_field(where, [&] { return parse_expression(s, c); });
}

FieldVector expr_list(const Json& j, const Coordinates& c, std::size_t n, const std::string& where) {
  if (!j.is_array() || j.size() != n)
    throw ConfigError("field '" + where + "': expected " + std::to_string(n) + " expressions");
  FieldVector v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(expr(j[i], c, where + "[" + std::to_string(i) + "]"));
  return v;
}

CatalogEntry bare_entry(const CurvatureSpec& spec) {
  CatalogEntry e;
  e.id = spec.name;
  e.title = spec.name + " (configuration)";
  e.spec = spec;
  const auto& c = spec.op.coords;
  std::string sum, sq;
  for (std::size_t i = 0; i < c.size(); ++i) sum += (i ? " + " : "") + c.name(i);
  e.battery = {exp_function("exp((" + sum + ")/5)", c, "(" + sum + ")/5"),
               one_plus_square("1 + (" + sum + ")^2", c, sum)};
  e.starts = {std::vector<double>(c.size(), 0.0), std::vector<double>(c.size(), 1.0)};
  e.backend.mc.paths = 20000;
  e.backend.mc.steps = 256;
  KFamily k = spec.k;
  e.schedules = {{"ode", [k](double t) { return solve_schedule_ode(k, t); }}};
  return e;
}

}  // namespace

LoadedConfig parse_config(const std::string& text) {
  LoadedConfig out;
  try {
    out.raw = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1 + static_cast<std::size_t>(
                               std::count(text.begin(), text.begin() + static_cast<long>(std::min(e.byte, text.size())), '\n'));
    throw ConfigError("JSON syntax error at line " + std::to_string(line) + ": " + e.what());
  }
  const Json& j = out.raw;
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  CurvatureSpec s;
  s.name = j.contains("name") ? str(j["name"], "name") : "config";
  const Json& cj = need(j, "coordinates", "");
  if (!cj.is_array() || cj.empty()) throw ConfigError("field 'coordinates': expected a non-empty array of names");
  std::vector<std::string> names;
  for (std::size_t i = 0; i < cj.size(); ++i) names.push_back(str(cj[i], "coordinates[" + std::to_string(i) + "]"));
  Coordinates c = at_field("coordinates", [&] { return Coordinates(names); });
  const std::size_t d = c.size();
  const Json& fj = need(j, "fields", "");
  if (!fj.is_array()) throw ConfigError("field 'fields': expected an array of vector fields");
  std::vector<FieldVector> fields;
  for (std::size_t i = 0; i < fj.size(); ++i) fields.push_back(expr_list(fj[i], c, d, "fields[" + std::to_string(i) + "]"));
  FieldVector drift = j.contains("drift") ? expr_list(j["drift"], c, d, "drift") : FieldVector(d);
  s.op = {c, fields, drift};
  if (j.contains("aux")) {
    const Json& aj = j["aux"];
    if (!aj.is_array()) throw ConfigError("field 'aux': expected an array");
    for (std::size_t i = 0; i < aj.size(); ++i) {
      const std::string w = "aux[" + std::to_string(i) + "]";
      const Json& mj = need(aj[i], "matrix", w + ".");
      if (!mj.is_array() || mj.size() != d) throw ConfigError("field '" + w + ".matrix': expected a " + std::to_string(d) + "x" + std::to_string(d) + " matrix");
      ExprMatrix m;
      for (std::size_t r = 0; r < d; ++r) m.push_back(expr_list(mj[r], c, d, w + ".matrix[" + std::to_string(r) + "]"));
      std::string name = aj[i].contains("name") ? str(aj[i]["name"], w + ".name") : "Gamma" + std::to_string(i + 1);
      s.aux.push_back(at_field(w + ".matrix", [&] { return SquareField(name, m); }));
    }
  }
  const std::size_t ell = s.aux.size();
  s.k.ell = ell;
  const Json& kj = need(j, "K", "");
  if (!kj.is_array() || kj.size() != ell + 1)
    throw ConfigError("field 'K': expected " + std::to_string(ell + 1) + " rate expressions (K_0..K_l)");
  for (std::size_t i = 0; i <= ell; ++i) {
    const std::string w = "K[" + std::to_string(i) + "]";
    const std::string t = str(kj[i], w);
    s.k.K.push_back(at_field(w, [&] { return RExpression::parse(t, ell); }));
  }
  if (j.contains("omega")) {
    const Json& oj = j["omega"];
    if (!oj.is_array()) throw ConfigError("field 'omega': expected an array of {lhs, rhs}");
    for (std::size_t i = 0; i < oj.size(); ++i) {
      const std::string w = "omega[" + std::to_string(i) + "]";
      const std::string l = str(need(oj[i], "lhs", w + "."), w + ".lhs"), r = str(need(oj[i], "rhs", w + "."), w + ".rhs");
      s.k.omega.push_back({at_field(w + ".lhs", [&] { return RExpression::parse(l, ell); }),
                           at_field(w + ".rhs", [&] { return RExpression::parse(r, ell); })});
    }
  }
  if (j.contains("omega_witness")) {
    s.omega_witness = at_field("omega_witness", [&] { return j["omega_witness"].get<std::vector<double>>(); });
  } else {
    s.omega_witness.assign(ell, 1.0);
  }
  s.W = expr(need(j, "W", ""), c, "W");
  if (j.contains("periodic")) {
    auto p = at_field("periodic", [&] { return j["periodic"].get<std::vector<bool>>(); });
    if (p.size() != d) throw ConfigError("field 'periodic': expected " + std::to_string(d) + " flags");
    s.periodic = p;
  }
  at_field("spec", [&] {
    s.validate();
    return 0;
  });

  if (j.contains("base")) {
    const Json& b = j["base"];
    const std::string id = str(need(b, "catalog", "base."), "base.catalog");
    const int l = b.contains("l") ? at_field("base.l", [&] { return b["l"].get<int>(); }) : 1;
    out.entry = at_field("base", [&] { return get(id, std::max(l, 1)); });
    if (out.entry.spec.op.dimension() != d) throw ConfigError("field 'base': catalog entry " + id + " has a different dimension");
    // Closed-form schedules and Harnack constants belong to the base rates; a
    // variant with different rates falls back to the ODE schedule.
    bool same_rates = out.entry.spec.k.omega_text() == s.k.omega_text() && out.entry.spec.k.K.size() == s.k.K.size();
    for (std::size_t i = 0; same_rates && i < s.k.K.size(); ++i)
      same_rates = out.entry.spec.k.K[i].text() == s.k.K[i].text();
    if (!same_rates) {
      KFamily k = s.k;
      out.entry.schedules = {{"ode", [k](double t) { return solve_schedule_ode(k, t); }}};
      out.entry.harnack.reset();
      out.entry.displays.clear();
      out.entry.expected.clear();
      out.entry.lambda_hint = 0.0;
    }
    const auto& bs = out.entry.spec;
    bool same_op = bs.op.coords == s.op.coords && bs.op.fields == s.op.fields && bs.op.drift == s.op.drift &&
                   bs.aux.size() == s.aux.size();
    for (std::size_t i = 0; same_op && i < s.aux.size(); ++i) same_op = bs.aux[i].matrix() == s.aux[i].matrix();
    if (!same_op) {
      out.entry.displays.clear();
      out.entry.display_variants.clear();
      out.entry.harnack.reset();
      out.entry.expected.clear();
      out.entry.sampler = nullptr;
      if (out.entry.backend.method != Method::kMC) {
        out.entry.backend = Backend{};
        out.entry.backend.mc.paths = 20000;
        out.entry.backend.mc.steps = 256;
      }
    }
    out.entry.spec = s;
    out.has_base = true;
  } else {
    out.entry = bare_entry(s);
  }
  return out;
}

LoadedConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open configuration " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << text;
}

std::string cases_csv(const std::vector<InequalityCase>& cases) {
  std::ostringstream os;
  os.precision(17);
  os << "ineq,operator,schedule,test_function,method,x,y,t,alpha,lhs,rhs,margin,uncertainty,verdict,note\n";
  for (const auto& c : cases)
    os << c.ineq << ',' << c.op_id << ',' << c.schedule_id << ',' << csv_field(c.test_function) << ',' << c.method << ','
       << csv_vec(c.x) << ',' << csv_vec(c.y) << ',' << c.t << ',' << c.alpha << ',' << c.lhs << ',' << c.rhs << ','
       << c.margin << ',' << c.uncertainty << ',' << c.verdict() << ',' << csv_field(c.note) << '\n';
  return os.str();
}

std::string psd_cells_csv(const PSDReport& r, const std::vector<std::vector<double>>& points,
                          const std::vector<std::vector<double>>& rs) {
  std::ostringstream os;
  os.precision(17);
  os << "point,r,min_eig,scale,converged\n";
  for (const auto& c : r.cells)
    os << csv_vec(points.at(c.point)) << ',' << csv_vec(rs.at(c.r)) << ',' << c.min_eig << ',' << c.scale << ','
       << (c.converged ? 1 : 0) << '\n';
  return os.str();
}

std::string schedule_csv(const Schedule& s, std::size_t n) {
  std::ostringstream os;
  os.precision(17);
  os << "s";
  for (std::size_t i = 0; i <= s.ell; ++i) os << ",b" << i;
  os << ",cb_integrand\n";
  for (std::size_t k = 0; k <= n; ++k) {
    const double at = s.t * static_cast<double>(k) / static_cast<double>(n);
    os << at;
    for (std::size_t i = 0; i <= s.ell; ++i) os << ',' << s.b(i, at);
    double integrand = std::numeric_limits<double>::quiet_NaN();
    const double b0 = s.b(0, at);
    if (b0 > 0) {
      std::vector<double> r;
      for (std::size_t i = 1; i <= s.ell; ++i) r.push_back(s.b(i, at) / b0);
      integrand = s.db(0, at) + 2 * b0 * s.k.K[0](r);
    }
    os << ',' << integrand << '\n';
  }
  return os.str();
}

}  // namespace subcurv
