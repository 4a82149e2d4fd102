#include <stdio.h>
#include <math.h>
#include "fluctuon.h"

int main(void) {
    const double p[9] = {0.1, 0.7, 0.2, 0.2, 0.1, 0.7, 0.7, 0.2, 0.1};
    FluctuonMarkov *chain = fluctuon_markov_new(p, 3);
    if (!chain) {
        fprintf(stderr, "markov: %s\n", fluctuon_last_error());
        return 1;
    }
    double epr = 0.0, e_half = 0.0;
    if (fluctuon_markov_mean_ep_rate(chain, &epr) != FluctuonStatus_Ok) return 1;
    if (fluctuon_markov_entropic_pressure(chain, 0.5, &e_half) != FluctuonStatus_Ok) return 1;
    printf("version=%s epr=%.12f e(1/2)=%.12f ising_p=%.12f\n",
           fluctuon_version(), epr, e_half, fluctuon_ising_pressure(1.0, 1.0, 0.5));
    FluctuonGrid *rate = NULL, *rate_hat = NULL;
    if (fluctuon_markov_rate_functions(chain, -1.0, 1.0, 201, &rate, &rate_hat) != FluctuonStatus_Ok) return 1;
    double x, v;
    fluctuon_grid_x(rate, 100, &x);
    fluctuon_grid_value(rate, 100, &v);
    printf("I(%.2f)=%.6f len=%zu\n", x, v, fluctuon_grid_len(rate));
    fluctuon_grid_free(rate);
    fluctuon_grid_free(rate_hat);
    fluctuon_markov_free(chain);
    return fabs(epr - 0.626381484247) < 1e-9 ? 0 : 1;
}
