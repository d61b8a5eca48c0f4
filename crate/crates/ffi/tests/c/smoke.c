#include <stdio.h>
#include <string.h>
#include "chi2qec.h"

#define CHECK(cond)                                                    \
  do {                                                                 \
    if (!(cond)) {                                                     \
      const char *msg = chi2qec_last_error();                          \
      fprintf(stderr, "line %d: %s (%s)\n", __LINE__, #cond,           \
              msg ? msg : "no message");                               \
      return 1;                                                        \
    }                                                                  \
  } while (0)

int main(void) {
  Chi2Code *code = NULL;
  CHECK(chi2qec_code_new("pcc", 2, &code) == CHI2_STATUS_OK);

  Chi2KlSummary kl;
  char *json = NULL;
  CHECK(chi2qec_kl_check(code, "lowest-order", 0.01, 1e-12, &kl, &json) == CHI2_STATUS_OK);
  CHECK(kl.passed);
  CHECK(json != NULL && strstr(json, "\"sets\"") != NULL);
  chi2qec_string_free(json);

  uint32_t dim = 0;
  double rate = 0.0;
  CHECK(chi2qec_code_summary(code, &dim, &rate) == CHI2_STATUS_OK);
  CHECK(dim == 2 && rate == 0.5);
  chi2qec_code_free(code);

  CHECK(chi2qec_code_new("nosuch", 2, &code) == CHI2_STATUS_UNKNOWN_NAME);
  CHECK(code == NULL && chi2qec_last_error() != NULL);

  uint32_t n = 0;
  CHECK(chi2qec_rotation_min_n(3, 2, 1, 1, 64, &n) == CHI2_STATUS_OK);
  CHECK(n == 4);

  printf("chi2qec %s ok\n", chi2qec_version());
  return 0;
}
