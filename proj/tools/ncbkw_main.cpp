#include "ncbkw/cli.hpp"

int main(int argc, char** argv) { return ncbkw::run_cli(argc, argv); }
