/* Demonstrates the kdlab C interface end to end: build a catalog matrix,
 * decide complete incompatibility, walk the hierarchy, analyze a state,
 * and repair a basis pair that fails the minor condition.
 *
 * Build from the repository root (header and libraries land under target/):
 *
 *   cargo build -p kdlab-capi --release
 *   gcc crates/kdlab-capi/examples/kd_demo.c \
 *       -Icrates/kdlab-capi/include \
 *       target/release/libkdlab_capi.a \
 *       -lpthread -ldl -lm -o kd_demo
 *   ./kd_demo
 */

#include <stdio.h>
#include <stdlib.h>

#include "kdlab.h"

static void die(const char *where, KdlabStatus status) {
    fprintf(stderr, "%s failed: %s (%s)\n", where, kdlab_status_name(status),
            kdlab_last_error_message());
    exit(1);
}

#define CHECK(call)                         \
    do {                                    \
        KdlabStatus s_ = (call);            \
        if (s_ != KDLAB_STATUS_OK)          \
            die(#call, s_);                 \
    } while (0)

int main(void) {
    printf("kdlab %s\n\n", kdlab_version());

    /* A prime-dimension discrete Fourier pair is completely incompatible. */
    KdlabMatrix *dft5 = NULL;
    CHECK(kdlab_matrix_gen("dft", 5, 1.0, 0.0, &dft5));

    bool coinc = false;
    CHECK(kdlab_matrix_is_coinc(dft5, &coinc));
    printf("dft(5) completely incompatible: %s\n", coinc ? "yes" : "no");

    /* The mutually unbiased pair in dimension 4 is not: it has vanishing
     * minors, and the hierarchy pinpoints a commuting projector pair. */
    KdlabMatrix *mub = NULL;
    CHECK(kdlab_matrix_gen("mub4", 0, 1.0, 0.0, &mub));

    KdlabHierarchy h;
    CHECK(kdlab_matrix_hierarchy(mub, &h));
    printf("mub4(1) hierarchy: coinc=%d noncommuting=%d positive=%d below_one=%d\n",
           h.coinc, h.all_projectors_noncommute, h.m_positive, h.max_below_one);
    if (h.has_commuting_pair)
        printf("  commuting projector pair: S mask 0x%llx, T mask 0x%llx\n",
               (unsigned long long)h.commuting_s_mask,
               (unsigned long long)h.commuting_t_mask);

    /* Nudge it into complete incompatibility and measure the damage. */
    KdlabMatrix *fixed = NULL;
    double deviation = 0.0;
    CHECK(kdlab_coincify(mub, 0.05, &fixed, &deviation));
    CHECK(kdlab_matrix_is_coinc(fixed, &coinc));
    printf("after coincify(eps=0.05): coinc=%s, rotation deviation %.4f\n",
           coinc ? "yes" : "no", deviation);

    /* Kirkwood-Dirac analysis of a state against dft(5). */
    KdlabState *psi = NULL;
    CHECK(kdlab_state_parse_json(
        "{\"d\":5,\"u\":[[0.6,0],[0,0.8],[0,0],[0,0],[0,0]]}", 0.0, &psi));

    bool classical = false;
    CHECK(kdlab_kd_classical(dft5, psi, &classical));

    KdlabSupport sup;
    CHECK(kdlab_support_profile(dft5, psi, &sup));

    int outcome = 0, rule = 0;
    CHECK(kdlab_witness(dft5, psi, &outcome, &rule));
    printf("state (0.6, 0.8i, 0, 0, 0): classical=%s, n_a=%zu, n_b=%zu, "
           "witness=%s (rule %d)\n",
           classical ? "yes" : "no", sup.n_a, sup.n_b,
           outcome == KDLAB_WITNESS_NONCLASSICAL ? "nonclassical" : "inconclusive",
           rule);

    /* Structured data crosses the boundary as JSON / CSV strings. */
    char *csv = NULL;
    CHECK(kdlab_matrix_diagram_csv(mub, &csv));
    printf("\nsupport-uncertainty diagram of mub4(1):\n%s", csv);
    kdlab_string_free(csv);

    /* Failures report a status code plus a detail message. */
    KdlabMatrix *bad = NULL;
    KdlabStatus status = kdlab_matrix_gen("hadamard", 0, 1.0, 0.0, &bad);
    printf("\nexpected failure: %s (%s)\n", kdlab_status_name(status),
           kdlab_last_error_message());

    kdlab_state_free(psi);
    kdlab_matrix_free(fixed);
    kdlab_matrix_free(mub);
    kdlab_matrix_free(dft5);
    return 0;
}
