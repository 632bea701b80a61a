#include <stdio.h>
#include <string.h>
#include "tep.h"

int main(void) {
    TepDegreeDistribution *dd = NULL;
    if (tep_dd_from_polynomials("x^2", "x^5", &dd) != TEP_STATUS_OK) return 10;
    double t = 0.0;
    if (tep_bp_threshold(dd, &t) != TEP_STATUS_OK) return 11;
    TepCode *code = NULL;
    if (tep_code_sample(dd, 128, 7, &code) != TEP_STATUS_OK) return 12;
    size_t n = 0;
    tep_code_dims(code, &n, NULL, NULL);
    int8_t rx[128], word[128];
    for (size_t i = 0; i < n; i++) rx[i] = (i % 9 == 0) ? -1 : 0;
    int32_t ok = 0;
    if (tep_decode(code, TEP_DECODER_TEP, rx, n, word, &ok) != TEP_STATUS_OK) return 13;
    if (tep_dd_parse("L 3 oops", &dd) != TEP_STATUS_PARSE) return 14;
    if (tep_last_error() == NULL) return 15;
    printf("eps_bp=%.4f n=%zu success=%d\n", t, n, ok);
    tep_code_free(code);
    tep_dd_free(dd);
    return 0;
}
