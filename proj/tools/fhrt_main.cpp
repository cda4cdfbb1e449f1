#include "fhrt/cli.hpp"

int main(int argc, char** argv) { return fhrt::cli_main(argc, argv); }
