#include <math.h>
#include <stdio.h>
#include <string.h>

#include "etk/etk.h"

static int failures = 0;

#define EXPECT(cond)                                             \
  do {                                                           \
    if (!(cond)) {                                               \
      fprintf(stderr, "%s:%d: failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                \
    }                                                            \
  } while (0)

int main(void) {
  EXPECT(strcmp(etk_version(), "0.1.0") == 0);

  etk_function* f = NULL;
  EXPECT(etk_function_create("{\"kind\":\"exp\"}", &f) == ETK_OK);
  EXPECT(f != NULL);

  double re = 0, im = 0;
  EXPECT(etk_function_evaluate(f, 1.0, 0.0, &re, &im) == ETK_OK);
  EXPECT(fabs(re - exp(1.0)) < 1e-14 && fabs(im) < 1e-14);

  /* e^z = 1 in |z| < 10: 0 and +-2 pi i */
  int count = -1;
  EXPECT(etk_count_preimages(f, "{\"base\":{\"kind\":\"disk\",\"center\":[0,0],\"radius\":10}}", 1.0, 0.0, &count) == ETK_OK);
  EXPECT(count == 3);

  /* errors carry codes and a message */
  etk_function* bad = NULL;
  EXPECT(etk_function_create("{\"kind\":\"nope\"}", &bad) == ETK_PARSE_ERROR);
  EXPECT(bad == NULL);
  EXPECT(strstr(etk_last_error(), "ParseError") != NULL);
  EXPECT(etk_function_create("{", &bad) == ETK_PARSE_ERROR);
  EXPECT(etk_function_create("{\"kind\":\"poly\",\"coeffs\":[]}", &bad) == ETK_INVALID_ARGUMENT);
  EXPECT(etk_count_preimages(NULL, "{}", 0, 0, &count) == ETK_INVALID_ARGUMENT);

  /* search with a fixed d so the run is short */
  etk_certificate* cert = NULL;
  EXPECT(etk_covering_search(f, 2, "{\"d\":30,\"schedule\":[64]}", &cert) == ETK_OK);
  EXPECT(cert != NULL);
  if (cert) {
    char* json = NULL;
    EXPECT(etk_certificate_json(cert, &json) == ETK_OK);
    EXPECT(json && strstr(json, "\"case_tag\":\"IIb\"") != NULL);
    etk_string_free(json);

    uint64_t orbits = 0;
    double measured = 0, floor_ = 0;
    EXPECT(etk_entropy_bound(f, cert, 2, 1, 1, &orbits, &measured, &floor_) == ETK_OK);
    EXPECT(orbits == 4);
    EXPECT(fabs(measured - log(2.0)) < 1e-12);
    EXPECT(fabs(floor_ - log(2.0)) < 1e-12);
    etk_certificate_destroy(cert);
  }

  /* polynomials never produce a certificate */
  etk_function* p = NULL;
  EXPECT(etk_function_create("{\"kind\":\"poly\",\"coeffs\":[[1,0],[0,0],[1,0]]}", &p) == ETK_OK);
  cert = NULL;
  EXPECT(etk_covering_search(p, 2, "{\"d\":30,\"schedule\":[64,128]}", &cert) == ETK_NOT_FOUND);
  EXPECT(cert == NULL);

  /* command runner */
  int exit_code = -1;
  char* summary = NULL;
  EXPECT(etk_run("entropy", "{not json", &exit_code, &summary) == ETK_OK);
  EXPECT(exit_code == 2);
  etk_string_free(summary);
  EXPECT(etk_run("nope", "{\"function\":{\"kind\":\"exp\"}}", &exit_code, &summary) == ETK_OK);
  EXPECT(exit_code == 2);
  etk_string_free(summary);

  etk_function_destroy(p);
  etk_function_destroy(f);
  etk_function_destroy(NULL);
  if (failures == 0) printf("c api: all checks passed\n");
  return failures == 0 ? 0 : 1;
}
