#include "zakdd/cli.hpp"

int main(int argc, char** argv) { return zakdd::cli_main(argc, argv); }
