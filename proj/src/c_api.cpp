#include "etk/etk.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "etk/covering.hpp"
#include "etk/entropy.hpp"
#include "etk/error.hpp"
#include "etk/report.hpp"
#include "etk/winding.hpp"

struct etk_function {
  etk::FunctionSpec spec;
};

struct etk_certificate {
  etk::CoveringCertificate cert;
};

namespace {

thread_local std::string last_error;

etk_status fail(etk_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

template <class Body>
etk_status guarded(Body&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const etk::Error& e) {
    return fail(static_cast<etk_status>(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(ETK_PARSE_ERROR, std::string("ParseError: ") + e.what());
  } catch (const std::exception& e) {
    return fail(ETK_INTERNAL, e.what());
  }
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p) std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

}  // namespace

extern "C" {

const char* etk_version(void) { return etk::kToolkitVersion; }

const char* etk_last_error(void) { return last_error.c_str(); }

void etk_string_free(char* s) { std::free(s); }

etk_status etk_function_create(const char* function_json, etk_function** out) {
  if (!function_json || !out) return fail(ETK_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new etk_function{etk::function_from_json(nlohmann::json::parse(function_json))};
    return ETK_OK;
  });
}

void etk_function_destroy(etk_function* f) { delete f; }

etk_status etk_function_evaluate(const etk_function* f, double re, double im, double* out_re, double* out_im) {
  if (!f || !out_re || !out_im) return fail(ETK_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const etk::Complex v = etk::evaluate(f->spec, {re, im});
    *out_re = v.real();
    *out_im = v.imag();
    return ETK_OK;
  });
}

etk_status etk_count_preimages(const etk_function* f, const char* domain_json, double w_re, double w_im, int* count) {
  if (!f || !domain_json || !count) return fail(ETK_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto D = etk::domain_from_json(nlohmann::json::parse(domain_json));
    *count = etk::count_preimages(f->spec, D, {w_re, w_im}).count;
    return ETK_OK;
  });
}

etk_status etk_covering_search(const etk_function* f, int n_cover, const char* options_json, etk_certificate** out) {
  if (!f || !out || n_cover < 1) return fail(ETK_INVALID_ARGUMENT, "null argument or n_cover < 1");
  *out = nullptr;
  return guarded([&] {
    nlohmann::json opts = options_json ? nlohmann::json::parse(options_json) : nlohmann::json::object();
    etk::CoveringOptions o;
    o.d = opts.value("d", 0.0);
    o.seed = opts.value("seed", std::uint64_t{0});
    o.threads = opts.value("threads", 1u);
    o.j_min = opts.value("j_min", o.j_min);
    o.j_max = opts.value("j_max", std::max(o.j_max, o.j_min));
    etk::RSchedule sched = etk::RSchedule::geometric(opts.value("R_start", 64.0), opts.value("ratio", 2.0),
                                                     opts.value("steps", 20));
    if (opts.contains("schedule")) sched.radii = opts.at("schedule").get<std::vector<double>>();
    const auto r = etk::find_self_covering_V(f->spec, n_cover, sched, o);
    if (!r.certificate) return fail(ETK_NOT_FOUND, "budget exhausted: " + r.trace.dump());
    *out = new etk_certificate{*r.certificate};
    return ETK_OK;
  });
}

void etk_certificate_destroy(etk_certificate* c) { delete c; }

etk_status etk_certificate_json(const etk_certificate* c, char** json_out) {
  if (!c || !json_out) return fail(ETK_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *json_out = dup(etk::to_json(c->cert).dump());
    return *json_out ? ETK_OK : fail(ETK_INTERNAL, "out of memory");
  });
}

etk_status etk_entropy_bound(const etk_function* f, const etk_certificate* c, int m, int k, unsigned threads,
                             uint64_t* orbit_count, double* measured, double* floor) {
  if (!f || !c || !orbit_count || !measured || !floor) return fail(ETK_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    etk::BackwardOrbitParams p;
    p.m = m;
    p.k = k;
    p.threads = threads;
    const auto b = etk::certificate_entropy_bound(f->spec, c->cert, p);
    *orbit_count = b.orbits.count;
    *measured = b.measured;
    *floor = b.floor;
    return ETK_OK;
  });
}

etk_status etk_run(const char* command, const char* config_json, int* exit_code, char** summary) {
  if (!command || !config_json || !exit_code || !summary) return fail(ETK_INVALID_ARGUMENT, "null argument");
  *summary = nullptr;
  return guarded([&] {
    nlohmann::json raw;
    try {
      raw = nlohmann::json::parse(config_json);
    } catch (const nlohmann::json::exception& e) {
      *exit_code = 2;
      *summary = dup(nlohmann::json{{"error", "ParseError"}, {"message", e.what()}}.dump());
      return ETK_OK;
    }
    const auto r = etk::run_command(command, raw);
    *exit_code = r.exit_code;
    *summary = dup(r.summary);
    return ETK_OK;
  });
}

}  // extern "C"
