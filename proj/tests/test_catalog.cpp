#include <doctest.h>

#include <cmath>

#include "subcurv/catalog.hpp"
#include "subcurv/io.hpp"

using namespace subcurv;

namespace {

JetForm engine_gamma2(const CatalogEntry& e, std::size_t i) {
  const auto& sf = i == 0 ? carre_du_champ(e.spec.op) : e.spec.aux[i - 1];
  return gamma2(sf, e.spec.op).form;
}

std::string message_of(const std::string& text) {
  try {
    (void)parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("every catalog id builds a well-formed spec") {
  for (const auto& id : catalog_ids()) {
    const auto e = get(id);
    CHECK_NOTHROW(e.spec.validate());
    CHECK_FALSE(e.schedules.empty());
    CHECK_FALSE(e.battery.empty());
    CHECK_FALSE(e.starts.empty());
    for (const auto& x : e.expected) CHECK_FALSE(provenance_name(x.source).empty());
  }
  for (int l = 2; l <= 3; ++l) CHECK_NOTHROW(get("grushin", l).spec.validate());
  CHECK_THROWS_AS(get("grushin", 4), CatalogError);
  CHECK_THROWS_AS(get("heisenberg"), CatalogError);
}

TEST_CASE("displays agree with the engine exactly where expected") {
  for (const auto& id : catalog_ids()) {
    for (int l = 1; l <= (id == "grushin" ? 3 : 1); ++l) {
      const auto e = get(id, l);
      for (const auto& d : e.displays) {
        const bool match = engine_gamma2(e, d.index) == parse_jetform(d.text, e.spec.op.coords);
        CHECK_MESSAGE(match == d.expected_match, id, " l=", l, " ", d.label);
      }
    }
  }
}

TEST_CASE("Kolmogorov goldens and the two readings of the printed Gamma^(2)") {
  const auto e = get("kolmogorov");
  const auto& c = e.spec.op.coords;
  CHECK(carre_du_champ(e.spec.op).diagonal() == parse_jetform("f_x^2", c));
  CHECK(engine_gamma2(e, 0) == parse_jetform("f_xx^2 - f_x*f_y", c));
  CHECK(engine_gamma2(e, 1) == parse_jetform("1/2*f_y^2 - f_xx*f_xy", c));
  CHECK(engine_gamma2(e, 2) == parse_jetform("f_xy^2", c));
  REQUIRE(e.display_variants.size() == 2);
  CHECK(gamma2(e.display_variants[0], e.spec.op).form == parse_jetform("f_xx*f_xy - 1/2*f_y^2", c));
  CHECK(gamma2(e.display_variants[1], e.spec.op).form == parse_jetform("f_xy^2", c));
}

TEST_CASE("validation on the default grids") {
  CHECK_NOTHROW(get("exampleC").validate());
  CHECK_NOTHROW(get("kolmogorov").validate());
  CHECK_NOTHROW(get("kolmogorov-stated").validate());  // expected to fail the sweep
  CHECK_NOTHROW(get("ou").validate());
}

TEST_CASE("stored constants and fits") {
  CHECK(get("exampleC").harnack->c_b(1.0) == 77.0);
  for (int l = 1; l <= 3; ++l) {
    const auto e = get("grushin", l);
    CHECK(e.growth_exponent == doctest::Approx(2.0 * l - 2).epsilon(1e-6));
    CHECK(e.c0_fit > 0);
    CHECK(e.alpha == grushin_constants(l).alpha);
    CHECK(e.beta == grushin_constants(l).beta);
    CHECK_FALSE(e.search_log.empty());
  }
  CHECK(get("exampleA").lambda_hint <= 0);
  CHECK(get("ou").lambda_hint == 1.0);
}

TEST_CASE("configuration export round trip") {
  for (const auto& id : catalog_ids()) {
    const auto e = get(id);
    const auto text = export_config(e).dump(2);
    const auto back = parse_config(text);
    CHECK(back.has_base);
    const auto& a = e.spec;
    const auto& b = back.entry.spec;
    CHECK(a.op.coords == b.op.coords);
    CHECK(a.op.fields == b.op.fields);
    CHECK(a.op.drift == b.op.drift);
    REQUIRE(a.aux.size() == b.aux.size());
    for (std::size_t i = 0; i < a.aux.size(); ++i) CHECK(a.aux[i].matrix() == b.aux[i].matrix());
    REQUIRE(a.k.K.size() == b.k.K.size());
    for (std::size_t i = 0; i < a.k.K.size(); ++i) CHECK(a.k.K[i].text() == b.k.K[i].text());
    CHECK(a.k.omega_text() == b.k.omega_text());
    CHECK(a.W == b.W);
    CHECK(back.entry.schedules.front().id == e.schedules.front().id);
    CHECK(export_config(back.entry).dump(2) == text);
  }
}

TEST_CASE("a variant with new rates falls back to the ODE schedule") {
  auto j = export_config(get("exampleC"));
  j["K"][1] = "1/2 - 4*r1^2/r2";
  const auto v = parse_config(j.dump());
  CHECK(v.entry.schedules.front().id == "ode");
  CHECK_FALSE(v.entry.harnack.has_value());
}

TEST_CASE("configuration without a base") {
  const std::string text = R"({
    "coordinates": ["x"],
    "fields": [["1"]],
    "drift": ["-2*x"],
    "K": ["2"],
    "W": "1 + x^2"
  })";
  const auto c = parse_config(text);
  CHECK_FALSE(c.has_base);
  CHECK(c.entry.spec.ell() == 0);
  CHECK(c.entry.backend.method == Method::kMC);
  CHECK(psd_sweep(c.entry.spec).pass);
}

TEST_CASE("configuration errors name the field and the line") {
  CHECK(message_of("{\n  \"coordinates\": [\"x\"],\n  \"fields\": [[\"1\"]\n}").find("line 4") != std::string::npos);
  CHECK(message_of(R"({"coordinates": ["x"], "fields": [["1"]], "K": ["0"]})").find("'W'") != std::string::npos);
  CHECK(message_of(R"({"coordinates": ["x","y"], "fields": [["1", "x +"]], "K": ["0"], "W": "1"})")
            .find("fields[0][1]") != std::string::npos);
  CHECK(message_of(R"({"coordinates": ["x"], "fields": [["1"]], "K": ["0", "1"], "W": "1"})").find("'K'") !=
        std::string::npos);
  CHECK(message_of(R"({"coordinates": ["x"], "fields": [["1"]], "K": ["r1 +"], "W": "1"})").find("K[0]") !=
        std::string::npos);
  CHECK(message_of(R"({"base": {"catalog": "nope"}, "coordinates": ["x"], "fields": [["1"]], "K": ["0"], "W": "1"})")
            .find("base") != std::string::npos);
  CHECK(message_of("[1, 2]").find("object") != std::string::npos);
}
