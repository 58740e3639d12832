#include "rabi/cli.hpp"

int main(int argc, char** argv) { return rabi::run_cli(argc, argv); }
