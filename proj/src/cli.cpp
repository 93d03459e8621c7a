#include "subcurv/cli.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "subcurv/families.hpp"
#include "subcurv/io.hpp"

namespace subcurv {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string point_text(const std::vector<double>& z) {
  std::string s = "(";
  for (std::size_t i = 0; i < z.size(); ++i) s += (i ? ", " : "") + format_number(z[i]);
  return s + ")";
}

InequalityCase error_case(const std::string& ineq, const std::string& op, const std::string& what) {
  InequalityCase c;
  c.ineq = ineq;
  c.op_id = op;
  c.margin = -std::numeric_limits<double>::infinity();
  c.uncertainty = 0.0;
  c.note = "error: " + what;
  c.pass = false;
  return c;
}

}  // namespace

std::vector<InequalityCase> run_verify_suite(const CatalogEntry& e, const SuiteOptions& o,
                                             std::vector<RayleighRow>* rows) {
  for (const auto& name : o.ineqs)
    if (std::find(known_inequalities().begin(), known_inequalities().end(), name) == known_inequalities().end())
      throw std::invalid_argument("unknown inequality \"" + name + "\"");
  auto want = [&](const std::string& name) {
    return o.ineqs.empty() || std::find(o.ineqs.begin(), o.ineqs.end(), name) != o.ineqs.end();
  };

  Backend backend = e.backend;
  backend.mc.seed = o.seed;
  if (o.paths) backend.mc.paths = o.paths;
  if (o.steps) backend.mc.steps = o.steps;
  const VerifyContext ctx = make_context(e.id, e.spec.op, e.spec.aux, backend);
  const bool exact = backend.method != Method::kMC;
  const std::vector<double> ts = !o.ts.empty() ? o.ts : exact ? std::vector<double>{0.5, 1, 2} : std::vector<double>{1};
  const std::vector<double> decay_ts = !o.ts.empty() ? o.ts : std::vector<double>{0.5, 1, 2};
  const std::vector<double> alphas =
      !o.alphas.empty() ? o.alphas : exact ? std::vector<double>{1.5, 2, 4} : std::vector<double>{2};
  const auto& choice = e.schedule(o.schedule);

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < e.starts.size(); ++i)
    for (std::size_t j = 0; j < e.starts.size(); ++j)
      if (i != j && (exact || i == 0)) pairs.emplace_back(i, j);

  std::vector<InequalityCase> fixed;  // decided before any evaluation
  std::vector<std::function<InequalityCase()>> jobs;
  std::vector<std::string> job_names;
  auto add = [&](std::string name, std::function<InequalityCase()> job) {
    job_names.push_back(std::move(name));
    jobs.push_back(std::move(job));
  };

  // Schedules and forms are built up front so that jobs only read shared state.
  std::map<double, Schedule> schedules;
  std::map<double, GradientForm> forms;
  for (double t : ts) {
    if (!(want("grad-variance") || want("grad-entropy"))) break;
    try {
      schedules.emplace(t, choice.build(t));
      forms.emplace(t, schedule_form(ctx, schedules.at(t)));
    } catch (const std::exception& ex) {
      auto c = error_case("grad-variance", e.id, "schedule " + choice.id + " at t = " + format_number(t) + ": " + ex.what());
      c.schedule_id = choice.id;
      c.t = t;
      fixed.push_back(c);
    }
  }

  if (want("grad-entropy") && !ctx.commutes) {
    auto c = skipped_case("grad-entropy", e.id,
                          "refused: the auxiliary fields do not commute with Gamma, so the entropy bound is not claimed");
    c.schedule_id = choice.id;
    fixed.push_back(c);
  }
  if (want("decay") && !ctx.commutes)
    fixed.push_back(skipped_case("decay", e.id, "refused: the decay bound needs the commutation property"));
  if ((want("harnack") || want("log-harnack") || want("harnack-sqrt")) && !e.harnack)
    fixed.push_back(skipped_case("harnack", e.id, "no closed-form distance for this entry"));

  for (double t : ts) {
    const bool have_sched = schedules.count(t) > 0;
    for (const auto& z : e.starts) {
      for (const auto& f : e.battery) {
        if (have_sched && want("grad-variance")) {
          add("grad-variance", [&, t, z] {
            return check_grad_variance(ctx, forms.at(t), schedules.at(t).cb.value, f, z, t, choice.id);
          });
        }
        if (e.harnack && want("grad-variance")) {
          add("grad-variance", [&, t, z] {
            return check_grad_variance(ctx, e.harnack->form(ctx, t), e.harnack->c_b(t), f, z, t, e.harnack->id);
          });
        }
        if (have_sched && want("grad-entropy") && ctx.commutes && f.positive) {
          add("grad-entropy", [&, t, z] {
            return check_grad_entropy(ctx, forms.at(t), schedules.at(t).cb.value, f, z, t, choice.id);
          });
        }
      }
    }
    if (!e.harnack) continue;
    for (auto [i, j] : pairs) {
      const auto& x = e.starts[i];
      const auto& y = e.starts[j];
      for (const auto& f : e.battery) {
        if (want("harnack") && f.positive)
          for (double a : alphas)
            add("harnack", [&, t, a] {
              return check_harnack(ctx, e.harnack->distance, e.harnack->c_b(t), a, f, x, y, t, e.harnack->id);
            });
        if (want("log-harnack") && f.lower_bound > 0)
          add("log-harnack", [&, t] {
            return check_log_harnack(ctx, e.harnack->distance, e.harnack->c_b(t), f, x, y, t, e.harnack->id);
          });
        if (want("harnack-sqrt"))
          add("harnack-sqrt", [&, t] {
            return check_harnack_sqrt(ctx, e.harnack->distance, e.harnack->c_b(t), f, x, y, t, e.harnack->id);
          });
      }
    }
  }

  if (want("decay") && ctx.commutes) {
    // the best rate over Omega; the witness when the search has no interior optimum
    const auto rate = compute_lambda(e.spec.k);
    const std::vector<double> r = rate.r_star.size() == e.spec.ell() ? rate.r_star : e.spec.omega_witness;
    const double lambda = lambda_at(e.spec.k, r);
    for (double t : decay_ts)
      for (const auto& z : e.starts)
        for (const auto& f : e.battery)
          add("decay", [&, t, z, r, lambda] { return check_decay(ctx, r, lambda, f, z, t); });
  }

  std::vector<InequalityCase> out = fixed;
  std::vector<InequalityCase> done(jobs.size());
  auto run_job = [&](std::size_t k) {
    try {
      done[k] = jobs[k]();
    } catch (const std::exception& ex) {
      done[k] = error_case(job_names[k], e.id, ex.what());
    }
  };
  const long n = static_cast<long>(jobs.size());
  if (exact) {
#pragma omp parallel for schedule(dynamic)
    for (long k = 0; k < n; ++k) run_job(static_cast<std::size_t>(k));
  } else {
    for (long k = 0; k < n; ++k) run_job(static_cast<std::size_t>(k));
  }
  out.insert(out.end(), done.begin(), done.end());

  if (want("poincare")) {
    const auto rate = compute_lambda(e.spec.k);
    if (e.rayleigh_family.empty()) {
      out.push_back(skipped_case("poincare", e.id, "no test family for the Rayleigh quotient"));
    } else {
      try {
        out.push_back(check_poincare_rayleigh(ctx, rate.lambda, e.sampler, e.rayleigh_family, o.poincare_samples,
                                              stream_seed(o.seed, 0x504f494e43415245ULL), rows));
      } catch (const std::exception& ex) {
        out.push_back(error_case("poincare", e.id, ex.what()));
      }
    }
  }
  return out;
}

namespace {

struct Options {
  std::string catalog, config, out, grid, schedule;
  int l = 1;
  std::uint64_t seed = 1;
  std::vector<std::string> ineqs;
  std::vector<double> alphas, ts;
  std::size_t paths = 0, steps = 0, samples = 200000;
  bool shifts = false;
};

struct Loaded {
  CatalogEntry entry;
  Json source;
};

Loaded load(const Options& o) {
  if (o.catalog.empty() == o.config.empty()) throw UsageError("exactly one of --catalog and --config is required");
  Loaded L;
  if (!o.catalog.empty()) {
    L.entry = get(o.catalog, o.l);
    L.source = {{"catalog", o.catalog}, {"l", L.entry.l}};
  } else {
    auto c = load_config(o.config);
    L.entry = std::move(c.entry);
    L.source = {{"config", o.config}};
    if (c.has_base) L.source["base"] = c.raw["base"];
  }
  return L;
}

GridSpec parse_grid(const std::string& g, GridSpec base) {
  if (g.empty() || g == "default") return base;
  if (g == "coarse") {
    base.per_axis = 9;
    base.r_per_axis = 5;
    return base;
  }
  if (g == "fine") {
    base.per_axis = 41;
    base.r_per_axis = 13;
    return base;
  }
  try {
    std::size_t used = 0;
    int n = std::stoi(g, &used);
    if (used == g.size() && n >= 2) {
      base.per_axis = n;
      return base;
    }
  } catch (const std::exception&) {
  }
  throw UsageError("--grid expects default, coarse, fine or a point count >= 2, got \"" + g + "\"");
}

struct Run {
  Json report;
  std::vector<InequalityCase> cases;
  std::vector<std::string> failures;
  std::map<std::string, std::string> plots;  // file name -> CSV text
};

const char* verdict_word(bool pass) { return pass ? "PASS" : "FAIL"; }

void section_gamma2(const CatalogEntry& e, Run& run, std::ostream& out) {
  const auto& op = e.spec.op;
  const auto& c = op.coords;
  std::vector<SquareField> fields{carre_du_champ(op)};
  fields.insert(fields.end(), e.spec.aux.begin(), e.spec.aux.end());
  Json sec;
  sec["gamma"] = fields[0].diagonal().to_string(c);
  out << "Gamma(f) = " << fields[0].diagonal().to_string(c) << "\n";
  std::vector<std::optional<JetForm>> g2(fields.size());
  Json forms = Json::array();
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const std::string label = i == 0 ? "Gamma_2" : "Gamma_2^(" + std::to_string(i) + ")";
    Json f{{"index", i}, {"field", i == 0 ? "Gamma" : fields[i].name()}};
    try {
      g2[i] = gamma2(fields[i], op).form;
      f["gamma2"] = g2[i]->to_string(c);
      out << label << " = " << g2[i]->to_string(c) << "\n";
    } catch (const GammaError& ex) {
      f["error"] = ex.what();
      out << label << ": " << ex.what() << "\n";
      run.failures.push_back(label + " of " + e.id + ": " + ex.what());
    }
    forms.push_back(f);
  }
  sec["forms"] = forms;

  Json displays = Json::array();
  for (const auto& d : e.displays) {
    Json j = to_json(d);
    JetForm shown = parse_jetform(d.text, c);
    const bool have = d.index < g2.size() && g2[d.index].has_value();
    const bool match = have && *g2[d.index] == shown;
    j["engine_match"] = match;
    j["consistent"] = match == d.expected_match;
    if (have && !match) j["engine_minus_display"] = (*g2[d.index] - shown).to_string(c);
    out << "display \"" << d.label << "\": " << (match ? "matches the engine" : "differs from the engine");
    if (have && !match) out << " (engine - display = " << (*g2[d.index] - shown).to_string(c) << ")";
    if (!d.note.empty()) out << "; " << d.note;
    out << "\n";
    if (match != d.expected_match)
      run.failures.push_back("display \"" + d.label + "\" of " + e.id + (match ? " unexpectedly matches" : " differs"));
    displays.push_back(j);
  }
  sec["displays"] = displays;

  Json variants = Json::array();
  for (const auto& v : e.display_variants) {
    Json j{{"field", v.name()}};
    try {
      const auto form = gamma2(v, op).form;
      j["gamma2"] = form.to_string(c);
      out << "variant " << v.name() << ": Gamma_2 = " << form.to_string(c) << "\n";
    } catch (const GammaError& ex) {
      j["error"] = ex.what();
      out << "variant " << v.name() << ": " << ex.what() << "\n";
    }
    variants.push_back(j);
  }
  sec["variants"] = variants;
  run.report["sections"]["gamma2"] = sec;
}

void section_check(const CatalogEntry& e, const Options& o, Run& run, std::ostream& out) {
  const GridSpec grid = parse_grid(o.grid, e.grid);
  const auto prep = PreparedSpec::build(e.spec);
  const auto points = sweep_points(prep, grid);
  const auto rs = sweep_r_values(e.spec.k, grid);
  SweepOptions so;
  so.keep_cells = !o.out.empty();
  const auto psd = psd_sweep(prep, e.spec.k, points, rs, so);
  Json sec;
  sec["psd"] = to_json(psd);
  sec["psd"]["grid"] = grid.describe();
  out << e.id << ": psd_sweep " << verdict_word(psd.pass) << ", global min eigenvalue "
      << fmt("%.6g", psd.global_min) << " (scaled; absolute " << fmt("%.6g", psd.global_min_abs) << ") at x = "
      << point_text(psd.argmin_point) << ", r = " << point_text(psd.argmin_r) << "; " << psd.n_points
      << " points x " << psd.n_r << " r values\n";
  if (!psd.pass)
    run.failures.push_back("psd_sweep on " + e.id + ": global min " + fmt("%.6g", psd.global_min) + " at x = " +
                           point_text(psd.argmin_point) + ", r = " + point_text(psd.argmin_r));
  if (so.keep_cells) run.plots["psd_cells.csv"] = psd_cells_csv(psd, points, rs);

  const auto w = verify_compact_function(e.spec, grid);
  sec["compact"] = to_json(w);
  out << "compact function W = " << e.spec.W.to_string(e.spec.op.coords) << ": " << verdict_word(w.pass)
      << " (sup LW/W = " << fmt("%.6g", w.c_lw) << ", sup sum|Gamma^(i)(W)|/W^2 = " << fmt("%.6g", w.c_gamma) << ")\n";
  if (!w.pass) run.failures.push_back("compact function on " + e.id + ": " + w.detail);

  const SquareField g0 = carre_du_champ(e.spec.op);
  Json comm = Json::array();
  bool all = true;
  for (const auto& a : e.spec.aux) {
    const auto r = check_commutation(a, g0);
    all = all && r.commutes;
    Json j{{"field", a.name()}, {"commutes", r.commutes}};
    if (!r.commutes) j["residual"] = r.residual.to_string(e.spec.op.coords);
    comm.push_back(j);
  }
  sec["commutation"] = {{"all", all}, {"fields", comm}};
  out << "commutation: " << (all ? "true" : "false") << "\n";

  try {
    const auto& sc = e.schedule(o.schedule);
    const auto s = sc.build(1.0);
    sec["c_b"] = to_json(s.cb);
    sec["c_b"]["schedule"] = sc.id;
    sec["c_b"]["t"] = 1.0;
    out << "c_b (" << sc.id << ", t = 1) = " << fmt("%.12g", s.cb.value) << "\n";
  } catch (const std::exception& ex) {
    sec["c_b"] = {{"error", ex.what()}};
    out << "c_b: " << ex.what() << "\n";
  }
  const auto rate = compute_lambda(e.spec.k);
  sec["lambda"] = to_json(rate);
  if (rate.positive)
    out << "lambda = " << fmt("%.10g", rate.lambda) << "\n";
  else
    out << "lambda = " << fmt("%.10g", rate.lambda) << ": no Poincare rate from this spec\n";

  if (e.id == "grushin") {
    Json log = Json::array();
    for (const auto& s : e.search_log) log.push_back(s);
    sec["constants"] = {{"l", e.l},           {"alpha", e.alpha},           {"beta", e.beta},
                        {"c0_fit", e.c0_fit}, {"growth_exponent", e.growth_exponent}, {"search_log", log}};
    out << "alpha = " << format_number(e.alpha) << ", beta = " << format_number(e.beta)
        << ", fitted C0 = " << fmt("%.6g", e.c0_fit) << ", c_b growth exponent = " << fmt("%.4g", e.growth_exponent)
        << "\n";
  }
  if (o.shifts) {
    Json sh = Json::array();
    for (std::size_t i = 0; i < e.spec.k.K.size(); ++i) {
      const double d = maximal_shift(prep, e.spec.k, i, -1.0, 1.0, grid);
      sh.push_back({{"index", i}, {"K", e.spec.k.K[i].text()}, {"maximal_shift", std::isnan(d) ? Json("nan") : Json(d)}});
      out << "maximal shift of K_" << i << " = " << e.spec.k.K[i].text() << ": " << fmt("%.6g", d) << "\n";
    }
    sec["shifts"] = sh;
  }
  run.report["sections"]["check"] = sec;
}

void section_schedule(const CatalogEntry& e, const Options& o, Run& run, std::ostream& out) {
  Json sec;
  Json list = Json::array();
  const std::vector<double> ts = o.ts.empty() ? std::vector<double>{1.0} : o.ts;
  std::vector<const ScheduleChoice*> choices;
  if (o.schedule.empty())
    for (const auto& s : e.schedules) choices.push_back(&s);
  else
    choices.push_back(&e.schedule(o.schedule));
  for (const auto* sc : choices) {
    for (double t : ts) {
      Json j{{"id", sc->id}, {"t", t}};
      try {
        const auto s = sc->build(t);
        j["summary"] = schedule_summary(s);
        const bool ok = s.omega_ok && s.positive;
        j["verdict"] = verdict_word(ok);
        out << sc->id << " at t = " << format_number(t) << ": c_b = " << fmt("%.12g", s.cb.value) << " in ["
            << fmt("%.12g", s.cb.lower) << ", " << fmt("%.12g", s.cb.upper) << "]" << (s.cb.divergent ? " (divergent)" : "")
            << ", b(0) = (";
        for (std::size_t i = 0; i <= s.ell; ++i) out << (i ? ", " : "") << fmt("%.10g", s.b(i, 0.0));
        out << "), " << (ok ? "inside Omega" : "NOT inside Omega or not positive") << "\n";
        if (!ok) run.failures.push_back("schedule " + sc->id + " at t = " + format_number(t) + " leaves Omega or b_0 <= 0");
        run.plots["schedule_" + sc->id + "_t" + format_number(t) + ".csv"] = schedule_csv(s);
      } catch (const ScheduleRejected& ex) {
        j["verdict"] = "FAIL";
        j["rejected"] = {{"reason", ex.what()}, {"exit_s", ex.exit_s}};
        out << sc->id << " at t = " << format_number(t) << ": rejected, " << ex.what() << "\n";
        run.failures.push_back("schedule " + sc->id + " at t = " + format_number(t) + ": " + ex.what());
      }
      list.push_back(j);
    }
  }
  sec["schedules"] = list;
  const auto rate = compute_lambda(e.spec.k);
  sec["lambda"] = to_json(rate);
  out << "lambda = " << fmt("%.10g", rate.lambda) << (rate.positive ? "" : " (no Poincare rate from this spec)") << "\n";
  if (e.id == "kolmogorov" || e.id == "kolmogorov-stated") {
    const auto th = find_t_theta(kKolmogorovTheta, k_family_kolmogorov(true));
    sec["theta"] = to_json(th);
    out << "t_theta(" << th.theta << ") = " << fmt("%.10g", th.t_theta) << " (residual " << fmt("%.3g", th.residual)
        << "); feasible theta range (" << fmt("%.10g", th.feasible_lo) << ", " << fmt("%.10g", th.feasible_hi)
        << "), printed (" << th.stated_lo << ", " << th.stated_hi << ")\n";
  }
  run.report["sections"]["schedule"] = sec;
}

void section_verify(const CatalogEntry& e, const Options& o, Run& run, std::ostream& out) {
  SuiteOptions so;
  so.ineqs = o.ineqs;
  so.ts = o.ts;
  so.alphas = o.alphas;
  so.schedule = o.schedule;
  so.seed = o.seed;
  so.paths = o.paths;
  so.steps = o.steps;
  so.poincare_samples = o.samples;
  std::vector<RayleighRow> rows;
  auto cases = run_verify_suite(e, so, &rows);
  std::map<std::string, std::size_t> counts{{"PASS", 0}, {"FAIL", 0}, {"INCONCLUSIVE", 0}, {"SKIPPED", 0}};
  for (const auto& c : cases) {
    const auto v = c.verdict();
    ++counts[v];
    out << v << ' ' << c.ineq << ' ' << c.op_id;
    if (!c.schedule_id.empty()) out << " [" << c.schedule_id << "]";
    if (!c.test_function.empty()) out << " f = " << c.test_function;
    if (!c.x.empty()) out << " x = " << point_text(c.x);
    if (!c.y.empty()) out << " y = " << point_text(c.y);
    if (c.t > 0) out << " t = " << format_number(c.t);
    if (c.alpha > 0) out << " alpha = " << format_number(c.alpha);
    if (!c.skipped) out << " margin = " << fmt("%.4g", c.margin) << " +- " << fmt("%.2g", c.uncertainty);
    if (c.skipped || c.note.rfind("error", 0) == 0) out << " (" << c.note << ")";
    out << "\n";
    if (v == "FAIL") {
      std::ostringstream os;
      os << c.ineq << ' ' << c.op_id << " f = " << c.test_function << " x = " << point_text(c.x);
      if (!c.y.empty()) os << " y = " << point_text(c.y);
      os << " t = " << format_number(c.t) << " margin = " << c.margin << " uncertainty = " << c.uncertainty;
      if (!c.note.empty()) os << " (" << c.note << ")";
      run.failures.push_back(os.str());
    }
  }
  Json sec;
  sec["method"] = method_name(e.backend.method);
  sec["paths"] = o.paths ? o.paths : e.backend.mc.paths;
  sec["steps"] = o.steps ? o.steps : e.backend.mc.steps;
  Json cj;
  for (const auto& [k, v] : counts) cj[k] = v;
  sec["counts"] = cj;
  Json rj = Json::array();
  for (const auto& r : rows) rj.push_back({{"test_function", r.test_function}, {"quotient", r.quotient}, {"se", r.se}});
  sec["rayleigh"] = rj;
  out << cases.size() << " cases: " << counts["PASS"] << " PASS, " << counts["FAIL"] << " FAIL, "
      << counts["INCONCLUSIVE"] << " INCONCLUSIVE, " << counts["SKIPPED"] << " SKIPPED\n";
  run.report["sections"]["verify"] = sec;
  run.cases.insert(run.cases.end(), cases.begin(), cases.end());
}

void write_outputs(const std::string& dir, const Run& run) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  write_text((fs::path(dir) / "report.json").string(), run.report.dump(2) + "\n");
  if (!run.cases.empty()) write_text((fs::path(dir) / "cases.csv").string(), cases_csv(run.cases));
  if (!run.plots.empty()) {
    fs::create_directories(fs::path(dir) / "plotdata");
    for (const auto& [name, text] : run.plots) write_text((fs::path(dir) / "plotdata" / name).string(), text);
  }
}

int execute(const std::string& command, const Options& o, std::ostream& out, std::ostream& err) {
  const Loaded L = load(o);
  const CatalogEntry& e = L.entry;
  if (command == "export") {
    const std::string text = export_config(e).dump(2) + "\n";
    if (o.out.empty())
      out << text;
    else
      write_text(o.out, text);
    return 0;
  }
  Run run;
  run.report["schema_version"] = 1;
  run.report["tool"] = "subcurv";
  run.report["command"] = command;
  run.report["source"] = L.source;
  run.report["operator"] = e.id;
  run.report["title"] = e.title;
  run.report["seed"] = o.seed;
  run.report["sections"] = Json::object();
  if (command == "gamma2" || command == "report") section_gamma2(e, run, out);
  if (command == "check" || command == "report") section_check(e, o, run, out);
  if (command == "schedule" || command == "report") section_schedule(e, o, run, out);
  if (command == "verify" || command == "report") section_verify(e, o, run, out);
  Json cases = Json::array();
  for (const auto& c : run.cases) cases.push_back(to_json(c));
  run.report["cases"] = cases;
  Json fails = Json::array();
  for (const auto& f : run.failures) fails.push_back(f);
  run.report["failures"] = fails;
  const bool pass = run.failures.empty();
  run.report["verdict"] = verdict_word(pass);
  const std::string dir = !o.out.empty() ? o.out : command == "report" ? "subcurv-report" : "";
  if (!dir.empty()) write_outputs(dir, run);
  out << "verdict: " << verdict_word(pass) << "\n";
  if (!pass) {
    err << run.failures.size() << " failing item(s):\n";
    for (const auto& f : run.failures) err << "  " << f << "\n";
  }
  return pass ? 0 : 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Curvature checks for hypoelliptic diffusions: Gamma_2 forms, PSD sweeps, schedules and "
               "numeric certification of gradient, Harnack and decay inequalities.",
               "subcurv"};
  app.require_subcommand(1);
  Options o;
  std::string command;

  auto common = [&](CLI::App* sc) {
    auto* cat = sc->add_option("--catalog", o.catalog, "built-in entry: kolmogorov, kolmogorov-stated, grushin, exampleC, exampleA, ou");
    auto* cfg = sc->add_option("--config", o.config, "JSON configuration file")->check(CLI::ExistingFile);
    cat->excludes(cfg);
    sc->add_option("--l", o.l, "Grushin order (1..3)")->check(CLI::Range(1, 3));
    sc->add_option("--seed", o.seed, "top-level seed for every random stream");
    sc->add_option("--out", o.out, "output directory (a file for export)");
    sc->callback([&command, sc] { command = sc->get_name(); });
  };
  auto* g = app.add_subcommand("gamma2", "engine Gamma and Gamma_2 forms against the printed displays");
  common(g);
  auto* c = app.add_subcommand("check", "psd sweep, compact function and commutation");
  common(c);
  auto* s = app.add_subcommand("schedule", "schedules with c_b, lambda and t_theta");
  common(s);
  auto* v = app.add_subcommand("verify", "inequality suites");
  common(v);
  auto* r = app.add_subcommand("report", "every section, written as JSON and CSV");
  common(r);
  auto* x = app.add_subcommand("export", "catalog entry as a configuration document");
  common(x);
  for (auto* sc : {c, r}) {
    sc->add_option("--grid", o.grid, "default, coarse, fine or points per axis");
    sc->add_flag("--shifts", o.shifts, "report the maximal constant shift of each K_i");
  }
  for (auto* sc : {s, v, r}) {
    sc->add_option("--t", o.ts, "horizons, comma separated")->delimiter(',');
    sc->add_option("--schedule", o.schedule, "schedule id of the entry");
  }
  for (auto* sc : {c}) sc->add_option("--schedule", o.schedule, "schedule id used for c_b");
  for (auto* sc : {v, r}) {
    sc->add_option("--ineq", o.ineqs, "inequalities, comma separated")->delimiter(',');
    sc->add_option("--alpha", o.alphas, "Harnack powers, comma separated")->delimiter(',');
    sc->add_option("--paths", o.paths, "Monte Carlo paths (0: entry default)");
    sc->add_option("--steps", o.steps, "Euler steps per path (0: entry default)");
    sc->add_option("--samples", o.samples, "samples of the invariant measure for the Rayleigh quotient");
  }

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& ex) {
    return app.exit(ex, out, err) == 0 ? 0 : 2;
  }

  try {
    return execute(command, o, out, err);
  } catch (const UsageError& ex) {
    err << "usage error: " << ex.what() << "\n";
  } catch (const ConfigError& ex) {
    err << "configuration error: " << ex.what() << "\n";
  } catch (const CatalogError& ex) {
    err << "catalog error: " << ex.what() << "\n";
  } catch (const std::invalid_argument& ex) {
    err << "usage error: " << ex.what() << "\n";
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
  }
  return 2;
}

}  // namespace subcurv
