#include "nilcurv/cli.hpp"

int main(int argc, char** argv) { return nilcurv::run_cli(argc, argv); }
