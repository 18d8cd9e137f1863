#include <stdio.h>
#include <string.h>

int verbose_level = 2;
const char *banner = "fixture tool: computes checksums of its arguments";

static unsigned mix(unsigned h, int c) { return (h ^ (unsigned)c) * 16777619u; }

unsigned checksum(const char *s) {
    unsigned h = 2166136261u;
    while (*s) h = mix(h, *s++);
    return h;
}

__attribute__((weak)) int hook(int x) { return x + 1; }

int report(const char *name, unsigned value) {
    if (verbose_level > 1) return printf("%s\t%08x\n", name, value);
    return printf("%08x\n", value);
}

int main(int argc, char **argv) {
    puts(banner);
    for (int i = 1; i < argc; ++i) report(argv[i], checksum(argv[i]) + (unsigned)hook(i));
    return argc > 1 ? 0 : 1;
}
