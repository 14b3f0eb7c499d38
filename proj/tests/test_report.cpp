#include <doctest.h>

#include "etk/error.hpp"
#include "etk/report.hpp"

using nlohmann::json;

namespace {

etk::ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const etk::Error& e) {
    return e.code();
  }
  return etk::ErrorCode::Ok;
}

}  // namespace

TEST_CASE("run config parsing") {
  const json base = {{"function", {{"kind", "exp"}}}};
  const auto cfg = etk::parse_run_config(base);
  CHECK(cfg.seed == 0);
  CHECK(cfg.threads == 1);
  CHECK(cfg.hash.size() == 16);

  json moved = base;
  moved["out_dir"] = "/tmp/elsewhere";
  moved["threads"] = 4;
  CHECK(etk::parse_run_config(moved).hash == cfg.hash);
  json reseeded = base;
  reseeded["seed"] = 7;
  CHECK(etk::parse_run_config(reseeded).hash != cfg.hash);

  CHECK(code_of([] { etk::parse_run_config(json::array()); }) == etk::ErrorCode::ParseError);
  CHECK(code_of([] { etk::parse_run_config(json::object()); }) == etk::ErrorCode::ParseError);
  CHECK(code_of([&] {
          json j = base;
          j["seed"] = -1;
          etk::parse_run_config(j);
        }) == etk::ErrorCode::ParseError);
  CHECK(code_of([&] {
          json j = base;
          j["threads"] = 0;
          etk::parse_run_config(j);
        }) == etk::ErrorCode::InvalidArgument);
}

TEST_CASE("run_command exit codes") {
  CHECK(etk::run_command("covering-search", json::object()).exit_code == 2);
  CHECK(etk::run_command("unknown", {{"function", {{"kind", "exp"}}}}).exit_code == 2);
  const auto bad_n = etk::run_command("covering-search", {{"function", {{"kind", "exp"}}}, {"covering", {{"N", 0}}}});
  CHECK(bad_n.exit_code == 2);
  CHECK(json::parse(bad_n.summary).at("error") == "InvalidArgument");
  // tail too close is an honest negative, not a config error
  const auto dense = etk::run_command(
      "example-product",
      {{"function", {{"kind", "product"}, {"zeros", {{100, 0}}}, {"tail_zeros_lower_modulus", 200}}}, {"out_dir", "."}});
  CHECK(dense.exit_code == 3);
  CHECK(json::parse(dense.summary).at("error") == "TailTooClose");
}

TEST_CASE("example product verdicts for the four-zero product") {
  const auto cfg = etk::parse_run_config(
      {{"function",
        {{"kind", "product"}, {"zeros", {{100, 0}, {1e4, 0}, {1e8, 0}, {1e16, 0}}}, {"tail_zeros_lower_modulus", 1e32}}},
       {"example", {{"samples", 16}}}});
  const json r = etk::example_product_report(cfg);
  REQUIRE(r.at("radii").size() == 4);
  // the i-fold disk count holds once R^(i-1) dominates the product of the first i zero moduli
  CHECK(r["radii"][2]["disk_pass"] == true);
  CHECK(r["radii"][3]["disk_pass"] == true);
  CHECK(r["radii"][0]["disk_count_max"] == 0);
  CHECK(r["radii"][1]["annulus_diff_max"] == 2);
  CHECK(r["entropy"]["found"] == true);
  CHECK(r["entropy"]["case_tag"] == "IIa");
  CHECK(r["entropy"]["pass"] == true);
  CHECK(r == etk::example_product_report(cfg));
}
