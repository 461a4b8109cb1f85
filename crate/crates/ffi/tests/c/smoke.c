#include <stdio.h>
#include <stdlib.h>

#include "forest_balance.h"

#define CHECK(call)                                                         \
    do {                                                                    \
        enum FbStatus s_ = (call);                                          \
        if (s_ != FB_STATUS_OK) {                                           \
            fprintf(stderr, "%s -> %d: %s\n", #call, s_, fb_last_error_message()); \
            return 1;                                                       \
        }                                                                   \
    } while (0)

int main(void) {
    FbColouring *g = NULL;
    FbForest *f = NULL;
    FbSolveResult *r = NULL;
    size_t edges[2 * 31];
    size_t map[32];

    CHECK(fb_colouring_random_balanced(32, 7, &g));
    for (size_t v = 1; v < 32; v++) {
        edges[2 * (v - 1)] = v - 1;
        edges[2 * (v - 1) + 1] = v;
    }
    CHECK(fb_forest_from_edges(32, edges, 31, &f));

    FbSolveOptions opts = fb_solve_options_default();
    opts.seed = 3;
    CHECK(fb_solve(f, g, &opts, &r));
    CHECK(fb_solve_result_map(r, map, 32));

    unsigned long long achieved = (unsigned long long)fb_solve_result_achieved(r);
    if (achieved % 2 != 1 || !fb_solve_result_within_theorem(r)) {
        fprintf(stderr, "unexpected result %llu\n", achieved);
        return 1;
    }
    if (fb_colouring_c0(10, &g) != FB_STATUS_INVALID_INPUT) {
        fprintf(stderr, "c0(10) should be rejected\n");
        return 1;
    }
    printf("achieved %llu bound %.3f\n", achieved, fb_theorem3_bound(32, 2));

    fb_solve_result_free(r);
    fb_forest_free(f);
    fb_colouring_free(g);
    return 0;
}
