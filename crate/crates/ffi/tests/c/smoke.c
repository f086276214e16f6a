#include <stdio.h>
#include <string.h>
#include "surface7.h"

#define CHECK(call)                                                        \
    do {                                                                   \
        S7Status s_ = (call);                                              \
        if (s_ != S7_STATUS_OK) {                                          \
            fprintf(stderr, "%s -> %d: %s\n", #call, s_, s7_last_error()); \
            return 1;                                                      \
        }                                                                  \
    } while (0)

int main(void) {
    S7Device *dev = NULL;
    S7Model *model = NULL;
    S7Record *rec = NULL;
    double p[8], fid, ptm[16], a, g;
    size_t n = 0;

    if (s7_model_new(NULL, 0, 0.0, &model) != S7_STATUS_NULL_POINTER || strlen(s7_last_error()) == 0)
        return 2;
    if (s7_device_load("no/such/device.json", &dev) == S7_STATUS_OK || dev != NULL)
        return 3;

    CHECK(s7_device_load("builtin:table-s1", &dev));
    CHECK(s7_model_new(dev, 0, 0.0, &model));
    CHECK(s7_stabilize(model, S7_SCHEME_PIPELINED, "0", 'Z', 5, &rec));
    if (s7_record_len(rec) != 5) return 4;
    if (s7_record_series(rec, S7_SERIES_POST_SELECTED, p, 2, &n) != S7_STATUS_BUFFER_TOO_SMALL || n != 5)
        return 5;
    CHECK(s7_record_series(rec, S7_SERIES_POST_SELECTED, p, 8, &n));
    for (size_t i = 0; i < n; i++)
        if (p[i] < 0.4999999 || p[i] > 0.5000001) return 6;
    CHECK(s7_gate_tomography(model, S7_SCHEME_PIPELINED, "TL", &fid, ptm));
    if (fid < 0.999999 || ptm[0] < 0.999999) return 7;

    double series[5] = {0.9, 0.81, 0.729, 0.6561, 0.59049};
    CHECK(s7_fit_decay(series, 5, &a, &g));
    if (g < 0.0999 || g > 0.1001) return 8;

    printf("ok %s\n", s7_version());
    s7_record_free(rec);
    s7_model_free(model);
    s7_device_free(dev);
    s7_device_free(NULL);
    return 0;
}
