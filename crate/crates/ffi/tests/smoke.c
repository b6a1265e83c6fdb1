#include <math.h>
#include <stdio.h>
#include "chwave.h"

#define CHECK(cond)                                                    \
    do {                                                               \
        if (!(cond)) {                                                 \
            fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__,   \
                    #cond, chw_last_error_message());                  \
            return 1;                                                  \
        }                                                              \
    } while (0)

int main(void) {
    double length = 0.0;
    CHECK(chw_period(0.4, 0.0, 2.0, &length) == CHW_STATUS_OK);
    CHECK(length > 0.0 && isfinite(length));
    CHECK(chw_period(0.5, 5.0, 2.0, &length) == CHW_STATUS_NOT_IN_REGION);

    ChwProfile *profile = NULL;
    CHECK(chw_profile_new(0.4, 0.0, 2.0, 128, &profile) == CHW_STATUS_OK);
    double phi[128];
    CHECK(chw_profile_copy(profile, CHW_PROFILE_FIELD_PHI, phi, 128) == CHW_STATUS_OK);
    ChwEigenSummary k;
    CHECK(chw_operator_spectrum(profile, CHW_OPERATOR_K, 128, 1e-7, &k, NULL, NULL, 0) == CHW_STATUS_OK);
    CHECK(k.negative == 1 && k.zero == 1);
    chw_profile_free(profile);

    ChwStabilityCurve *curve = NULL;
    CHECK(chw_stability_scan(3.141592653589793, 2.0, 6, &curve) == CHW_STATUS_OK);
    bool stable = false;
    CHECK(chw_stability_curve_is_stable(curve, &stable) == CHW_STATUS_OK && stable);
    chw_stability_curve_free(curve);

    puts("ok");
    return 0;
}
