#include "deflab/harness/cli.hpp"

int main(int argc, char** argv) { return deflab::harness::run_cli(argc, argv); }
