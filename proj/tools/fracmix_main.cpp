#include "fracmix/cli.hpp"

int main(int argc, char** argv) { return fracmix::cli_main(argc, argv); }
