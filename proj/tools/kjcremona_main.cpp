// Command-line front end; argument parsing lives here, all real work in the
// library driver so tests can exercise the same entry points.

#include <cstdio>

int main(int argc, char** argv) {
    (void)argc;
    (void)argv;
    std::fprintf(stderr, "kjcremona: not wired up yet\n");
    return 2;
}
