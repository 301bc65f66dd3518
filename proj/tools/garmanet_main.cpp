#include "garmanet/cli.hpp"

int main(int argc, char** argv) { return garmanet::cli_main(argc, argv); }
