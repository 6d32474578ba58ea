#include "gsquid/cli.hpp"

int main(int argc, char** argv) { return gsquid::cli_main(argc, argv); }
