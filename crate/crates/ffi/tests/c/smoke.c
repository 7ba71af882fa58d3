#include "trineumann.h"

#include <stdio.h>

int main(void) {
    TnTriangle *t = NULL;
    TnStatus s = tn_triangle_isosceles(1.0471975511965976, 1.0, &t);
    if (s != TN_STATUS_OK) {
        return 1;
    }
    uint32_t levels[3] = {8, 16, 32};
    double mu = 0.0, err = 0.0;
    s = tn_fundamental_tone(t, levels, 3, &mu, &err);
    printf("%.6f %.2e\n", mu, err);
    TnBounds b;
    tn_triangle_bounds(t, &b);
    tn_triangle_free(t);
    return s == TN_STATUS_OK && b.j11_diameter_lower < mu && mu < b.cheng_upper ? 0 : 2;
}
