/* Callee functions exercising every marshaling path across a real ABI
 * boundary.  All functions return nothing and take only addresses.
 * get_f_ simulates a Fortran-compiled subroutine: same semantics as
 * get_c (1-based index), trailing-underscore symbol name. */

#include <stdint.h>

void get_c(double *input, int *index, double *output) {
    output[0] = input[index[0] - 1];
}

void get64_c(double *input, int64_t *index, double *output) {
    output[0] = input[index[0] - 1];
}

void get_f_(double *input, int *index, double *output) {
    output[0] = input[index[0] - 1];
}

void BENCHMARK(void *a) {
    (void)a;
}

void fill_seq(double *out, int64_t *n) {
    for (int64_t i = 0; i < n[0]; i++) {
        out[i] = (double)(i + 1);
    }
}

void mutate_all(double *buf, int64_t *n) {
    for (int64_t i = 0; i < n[0]; i++) {
        buf[i] += 1.0;
    }
}
