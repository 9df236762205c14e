// revclt command-line front end; talks to the library only through the C API.
#include <cstdio>

#include "revclt/revclt.h"

int main(int argc, char** argv) {
  revclt_config* cfg = nullptr;
  revclt_status s = revclt_config_parse(argc, argv, &cfg);
  if (s == REVCLT_HELP) {
    std::fputs(revclt_last_error(), stdout);
    return 0;
  }
  if (s != REVCLT_OK) {
    std::fprintf(stderr, "revclt: %s\nRun 'revclt --help' for usage.\n", revclt_last_error());
    return 64;
  }
  int code = 0;
  s = revclt_run(cfg, 1, &code);
  revclt_config_free(cfg);
  if (s != REVCLT_OK) {
    std::fprintf(stderr, "revclt: %s: %s\n", revclt_status_string(s), revclt_last_error());
    return 1;
  }
  return code;
}
