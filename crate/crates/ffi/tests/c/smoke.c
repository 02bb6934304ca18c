#include <stdio.h>
#include <string.h>
#include "iftt_pin.h"

#define CHECK(expr) do { if (!(expr)) { fprintf(stderr, "failed: %s\n", #expr); return 1; } } while (0)

int main(void) {
    uint64_t count = 0;
    CHECK(iftt_count_valid_mappings(9, &count) == IFTT_STATUS_OK);
    CHECK(count == 510);
    CHECK(iftt_count_valid_mappings(1, &count) == IFTT_STATUS_INVALID_CONFIG);
    CHECK(iftt_last_error() != NULL);

    /* Classic session entering 7: yellow digits go to button 0. */
    IfttConfig config = iftt_config_default(IFTT_MODE_CLASSIC);
    config.pin_length = 1;
    config.seed = 11;
    IfttSession *session = NULL;
    CHECK(iftt_session_new(&config, &session) == IFTT_STATUS_OK);
    IfttSessionStatus status = IFTT_SESSION_STATUS_IN_PROGRESS;
    int clicks = 0;
    while (status == IFTT_SESSION_STATUS_IN_PROGRESS && clicks < 20) {
        char *coloring = NULL;
        CHECK(iftt_session_coloring(session, &coloring) == IFTT_STATUS_OK);
        size_t button = coloring[7] == 'Y' ? 0 : 1;
        iftt_string_free(coloring);
        CHECK(iftt_session_click(session, button) == IFTT_STATUS_OK);
        CHECK(iftt_session_status(session, &status) == IFTT_STATUS_OK);
        clicks++;
    }
    CHECK(status == IFTT_SESSION_STATUS_COMPLETE);
    CHECK(iftt_session_click(session, 0) == IFTT_STATUS_INVALID_STATE);

    char *transcript = NULL;
    CHECK(iftt_session_export_transcript(session, &transcript) == IFTT_STATUS_OK);
    char *report = NULL;
    bool unique = false;
    CHECK(iftt_crack_transcript_json(transcript, &report, &unique) == IFTT_STATUS_OK);
    CHECK(unique);
    CHECK(strstr(report, "\"7\"") != NULL);
    iftt_string_free(report);
    iftt_string_free(transcript);
    iftt_session_free(session);

    IfttBelief *belief = NULL;
    CHECK(iftt_belief_new(2, &belief) == IFTT_STATUS_OK);
    CHECK(iftt_belief_apply_click(belief, "YYYYYGGGGG", 0) == IFTT_STATUS_OK);
    CHECK(iftt_belief_apply_click(belief, "YYYYYGGGGX", 0) == IFTT_STATUS_INVALID_COLORING);
    uint16_t mask = 0;
    CHECK(iftt_belief_consistent_mask(belief, &mask) == IFTT_STATUS_OK);
    CHECK(mask == 0x3FF);
    iftt_belief_free(belief);

    puts("ok");
    return 0;
}
